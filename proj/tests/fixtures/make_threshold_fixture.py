"""Regenerates threshold_n1000_eps2m20.json at 50 significant digits."""
import json

from mpmath import mp, mpf, log, e, sqrt, cos, pi, findroot

mp.dps = 50


def h(a):
    return -a * log(a, 2) - (1 - a) * log(1 - a, 2)


n = mpf(1000)
eps = mpf(2) ** -20
s = 1 - 2 * log(eps, 2)
exact = n - s - n * h(s / n)
stringent = n - s * log(n, 2) + s * log(s / (2 * e), 2)
tfkw = -log(cos(pi / 8) ** 2, 2)
gamma0 = findroot(lambda a: h(a) + a - 1, mpf("0.2"))


def ratio(m):
    m = mpf(m)
    return (m - s - m * h(s / m)) / (tfkw * m)


out = {
    "n": 1000,
    "epsilon_log2": -20,
    "s": mp.nstr(s, 50),
    "h_s_over_n": mp.nstr(h(s / n), 50),
    "threshold_exact": mp.nstr(exact, 50),
    "threshold_stringent": mp.nstr(stringent, 50),
    "tfkw_rate": mp.nstr(tfkw, 50),
    "gamma_at_zero": mp.nstr(gamma0, 50),
    "ratio": {str(m): mp.nstr(ratio(m), 30) for m in (256, 1024, 4096, 10**6)},
    "ratio_asymptote": mp.nstr(1 / tfkw, 30),
    "schmidt_09_01_emax": mp.nstr(2 * log(sqrt(mpf("0.9")) + sqrt(mpf("0.1")), 2), 50),
}
with open("threshold_n1000_eps2m20.json", "w") as f:
    json.dump(out, f, indent=2)
    f.write("\n")
