// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria (0 = all pass).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "bad_strategies.hpp"
#include "oracles.hpp"
#include "qpvlab/adversaries.hpp"
#include "qpvlab/bounds.hpp"
#include "qpvlab/entropy.hpp"
#include "qpvlab/errors.hpp"
#include "qpvlab/harness.hpp"
#include "qpvlab/protocols.hpp"

using namespace qpvlab;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DensityOperator bb84_mixture(std::uint8_t x) {
  const auto m =
      (bb84_encode(x, 0, "B").projector() + bb84_encode(x, 1, "B").projector()) * Complex(0.5);
  return DensityOperator(m, Factorization::single("B"));
}

// ---------------------------------------------------------------------------

Outcome breidbart_rate() {
  const double exact = std::pow(std::cos(std::numbers::pi / 8), 2);
  const Ensemble ens({0.5, 0.5}, {bb84_mixture(0), bb84_mixture(1)});
  const auto g = pguess(ens, Povm::breidbart());
  const bool analytic = g.ykl_certified && std::abs(g.value - exact) < 1e-12 &&
                        std::abs(predicted_acceptance("breidbart", 1) - exact) < 1e-12;
  const double rate = hmin_cq(ens, g);
  const bool five_sig = std::abs(rate - 0.22845) < 0.000005;

  ExperimentConfig c;
  c.n = 1;
  c.strategy = "breidbart";
  c.trials = 1000000;
  c.seed = 1;
  const auto t0 = Clock::now();
  const auto row = monte_carlo(c);
  const double secs = seconds_since(t0);
  const bool inside = row.ci_lo <= exact && exact <= row.ci_hi;
  return {analytic && five_sig && inside && secs < 10.0,
          fmt("pguess=%.15f (YKL %s), -log2=%.6f, MC p=%.6f CI=[%.6f,%.6f] in %.2fs",
              g.value, g.ykl_certified ? "ok" : "failed", rate, row.p_hat, row.ci_lo, row.ci_hi, secs)};
}

Outcome tightness_attack() {
  const auto t0 = Clock::now();
  std::string detail;
  bool ok = true;
  for (std::size_t n : {1u, 2u, 4u, 8u}) {
    ExperimentConfig c;
    c.n = n;
    c.strategy = "teleport";
    c.ebits = n;
    c.resource = ResourceSpec::max_entangled(n);
    c.trials = 10000;
    c.seed = 2;
    const auto row = monte_carlo(c);
    ok = ok && row.successes == row.trials;
    detail += fmt("n=%zu %llu/%llu ", n, static_cast<unsigned long long>(row.successes),
                  static_cast<unsigned long long>(row.trials));
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 30.0, detail + fmt("in %.2fs", secs)};
}

Outcome threshold_reproduction() {
  const auto fx = oracle::load_fixture("threshold_n1000_eps2m20.json");
  const double want_exact = oracle::fixture_number(fx["threshold_exact"]);
  const double want_stringent = oracle::fixture_number(fx["threshold_stringent"]);
  const auto r = epsilon_threshold(1000, 0x1p-20);
  const double e = *r.threshold_exact, s = *r.threshold_stringent;
  const bool ok = std::abs(e - want_exact) <= 0.01 && std::abs(s - want_stringent) <= 0.01 &&
                  std::abs(s - 710.91) <= 0.01;
  return {ok, fmt("exact=%.6f (fixture %.6f), stringent=%.6f (fixture %.6f)", e, want_exact, s,
                  want_stringent)};
}

Outcome gamma_machinery() {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = -1.0 + 1.5 * i / 999.0;
    worst = std::max(worst, std::abs(g_function(std::min(gamma_function(x), 0.5)) - x));
  }
  bool identity = true;
  for (int i = 0; i <= 100; ++i) {
    const double h = 0.5 + i * 0.05;
    identity = identity && gamma_function(h) == h;
  }
  const double at_minus_one = gamma_function(-1.0);
  long violations = 0;
  for (int i = 1; i <= 100; ++i)
    for (int j = 1; j <= 100; ++j) {
      const double n = std::round(std::pow(10.0, 0.06 * i)) + 1.0;  // 2 .. 10^6
      const double s = n * j / 100.0;
      const double lhs = n * binary_entropy(std::min(s / n, 1.0));
      const double rhs = s * std::log2(n) - s * std::log2(s / std::numbers::e);
      if (lhs > rhs + 1e-9 * std::max(1.0, std::abs(rhs))) ++violations;
    }
  const bool ok = worst <= 1e-10 && identity && std::abs(at_minus_one) <= 1e-12 && violations == 0;
  return {ok, fmt("max|g(gamma(x))-x|=%.2e, gamma(h)=h %s, gamma(-1)=%.1e, inequality violations=%ld/10000",
                  worst, identity ? "ok" : "broken", at_minus_one, violations)};
}

struct SandwichStats {
  int instances = 0;
  int bad_sandwich = 0;
  int bad_closed_form = 0;
  int bad_grid = 0;
  int grid_checked = 0;
  int ordering_violations = 0;  // for the next criterion
  double worst_gap = 0.0;
};

SandwichStats sandwich_runs() {
  SandwichStats st;
  const auto note_order = [&](double neg_hmin_lower, double emax_upper) {
    if (neg_hmin_lower > emax_upper + 1e-9) ++st.ordering_violations;
  };
  // k maximally entangled pairs, certified on the full 2k-qubit state.
  for (std::size_t k = 1; k <= 4; ++k) {
    const auto spec = ResourceSpec::max_entangled(k);
    auto w = pair_witnesses(spec, 0);
    for (std::size_t i = 1; i < k; ++i) {
      const auto next = pair_witnesses(spec, i);
      w.dual = tensor(w.dual, next.dual);
      w.separable = tensor(w.separable, next.separable);
    }
    const auto s = emax_sandwich(spec.realize(), w.dual, w.separable);
    ++st.instances;
    st.worst_gap = std::max(st.worst_gap, s.upper - s.lower);
    if (std::abs(s.lower - k) > 1e-8 || std::abs(s.upper - k) > 1e-8) ++st.bad_sandwich;
    note_order(s.lower, s.upper);
  }
  // Random bipartite pure states, local dimensions 2..4.
  Rng rng(5150);
  const std::vector<std::string> a{"A"};
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t da = 2 + rep % 3, db = 2 + (rep / 3) % 3;
    const PureState psi(oracle::random_unit(da * db, rng), Factorization({{"A", da}, {"B", db}}));
    const auto w = pure_state_witnesses(psi, a);
    const auto s = emax_sandwich(DensityOperator(psi), w.dual, w.separable);
    const auto h = hmin_pure(psi, a);
    ++st.instances;
    st.worst_gap = std::max(st.worst_gap, s.upper - s.lower);
    if (!(s.upper - s.lower <= 1e-8)) ++st.bad_sandwich;
    const double closed = oracle::emax_pure(oracle::schmidt_squares(psi.amplitudes(), da, db));
    if (std::abs(s.lower - closed) > 1e-8 || std::abs(s.upper - closed) > 1e-8) ++st.bad_closed_form;
    if (db == 2) {
      ++st.grid_checked;
      const double grid = oracle::neg_hmin_qubit_grid(oracle::to_eigen(psi.projector()), da);
      if (std::abs(grid - closed) > 1e-6) ++st.bad_grid;
    }
    note_order(s.lower, s.upper);
    if (h.feasible.verified) note_order(-h.feasible.value, s.upper);
  }
  return st;
}

Outcome sandwich_exactness(const SandwichStats& st, double secs) {
  const bool ok = st.bad_sandwich == 0 && st.bad_closed_form == 0 && st.bad_grid == 0 && secs < 60.0;
  return {ok, fmt("%d instances, worst gap %.2e, sandwich misses %d, closed-form misses %d, "
                  "grid-oracle misses %d/%d, %.2fs",
                  st.instances, st.worst_gap, st.bad_sandwich, st.bad_closed_form, st.bad_grid,
                  st.grid_checked, secs)};
}

Outcome emax_vs_hmin(const SandwichStats& st) {
  return {st.ordering_violations == 0,
          fmt("%d violations of -H_min <= E_max over %d certified instances", st.ordering_violations,
              st.instances)};
}

Outcome attack_vs_bound() {
  const auto t0 = Clock::now();
  int cells = 0, violations = 0;
  double worst_margin = -1.0;
  for (std::size_t n = 4; n <= 64; ++n) {
    std::vector<std::pair<std::string, ResourceSpec>> plan;
    for (const auto& name : strategy_names())
      if (name != "teleport") plan.emplace_back(name, ResourceSpec::none());
    for (std::size_t k : {std::size_t{1}, n / 2, n}) {
      plan.emplace_back("teleport", ResourceSpec::max_entangled(k));
    }
    plan.emplace_back("teleport", ResourceSpec::pure_schmidt(n, {0.9, 0.1}));
    plan.emplace_back("teleport", ResourceSpec::isotropic(n, 0.8));
    plan.emplace_back("breidbart", ResourceSpec::max_entangled(2));
    for (const auto& [name, resource] : plan) {
      ExperimentConfig c;
      c.n = n;
      c.strategy = name;
      c.resource = resource;
      c.ebits = name == "teleport" ? resource.pairs : 0;
      c.trials = n <= 16 ? 2000 : 400;
      c.seed = 7000 + n;
      const auto row = monte_carlo(c);
      ++cells;
      if (!row.consistent()) ++violations;
      worst_margin = std::max(worst_margin, row.p_hat - row.eps_star - 3 * row.half_width());
    }
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < 300.0,
          fmt("%d cells (n=4..64), %d violations, max(p_hat - eps* - 3hw)=%.3g, %.1fs", cells,
              violations, worst_margin, secs)};
}

Outcome timing_model() {
  const int trials = 1000;
  int honest = 0, displaced_rejected = 0, quantum_blocked = 0, second_round_blocked = 0;
  for (int i = 0; i < trials; ++i) {
    Rng rng = Rng::for_trial(8, i);
    honest += run_qpv_honest(8, Geometry::unit(0.0), rng).accepted;
    Geometry g = Geometry::unit(0.0);
    g.actual["P"] = g.claimed + (i % 2 ? 0.1 : -0.1);
    displaced_rejected += !run_qpv_honest(8, g, rng).accepted;
    try {
      run_qpv_adversarial(4, Geometry::cheaters(), badstrat::QuantumForward{}, ResourceSpec::none(), rng);
    } catch (const ProtocolViolation&) {
      ++quantum_blocked;
    }
    try {
      run_qpv_adversarial(4, Geometry::cheaters(), badstrat::SecondRound{}, ResourceSpec::none(), rng);
    } catch (const ProtocolViolation&) {
      ++second_round_blocked;
    }
  }
  const bool ok = honest == trials && displaced_rejected == trials && quantum_blocked == trials &&
                  second_round_blocked == trials;
  return {ok, fmt("honest accepted %d/%d, displaced rejected %d/%d, quantum M1->M2 blocked %d/%d, "
                  "second round blocked %d/%d",
                  honest, trials, displaced_rejected, trials, quantum_blocked, trials,
                  second_round_blocked, trials)};
}

Outcome improvement_trend() {
  const double eps = 0x1p-20;
  SweepGrid grid;
  grid.n = {256, 512, 1024, 2048, 4096, 8192, 16384};
  grid.k = {0};
  grid.epsilon = {eps};
  grid.strategy = {"breidbart"};
  grid.trials = 10;
  std::ostringstream sink;
  const auto rows = sweep(grid, sink);
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i)
    monotone = monotone && rows[i].threshold_ratio > rows[i - 1].threshold_ratio;
  // denser formula-only check out to 10^6
  double prev = -std::numeric_limits<double>::infinity();
  for (double n = 100; n <= 1e6; n *= 1.05) {
    EstimateRow r;
    r.n = static_cast<std::size_t>(n);
    fill_bounds(r, 0.0, eps);
    if (std::isnan(r.threshold_ratio)) continue;
    monotone = monotone && r.threshold_ratio > prev;
    prev = r.threshold_ratio;
  }
  double at_1024 = 0.0;
  for (const auto& r : rows)
    if (r.n == 1024) at_1024 = r.threshold_ratio;
  EstimateRow big;
  big.n = 1000000;
  fill_bounds(big, 0.0, eps);
  const double asymptote = 1.0 / tfkw_rate();
  const bool ok = monotone && at_1024 > 3.0 && std::abs(big.threshold_ratio - asymptote) < 0.005;
  return {ok, fmt("monotone %s; ratio(256)=%.4f ratio(1024)=%.4f ratio(4096)=%.4f ratio(1e6)=%.4f "
                  "vs 1/0.22845=%.4f",
                  monotone ? "yes" : "no", rows[0].threshold_ratio, at_1024, rows[4].threshold_ratio,
                  big.threshold_ratio, asymptote)};
}

}  // namespace

int main() {
  int failed = 0;
  const auto report = [&](int id, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %d: %s - %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  };
  report(1, breidbart_rate);
  report(2, tightness_attack);
  report(3, threshold_reproduction);
  report(4, gamma_machinery);
  SandwichStats stats;
  double sandwich_secs = 0.0;
  report(5, [&] {
    const auto t0 = Clock::now();
    stats = sandwich_runs();
    sandwich_secs = seconds_since(t0);
    return sandwich_exactness(stats, sandwich_secs);
  });
  report(6, [&] { return emax_vs_hmin(stats); });
  report(7, attack_vs_bound);
  report(8, timing_model);
  report(9, improvement_trend);
  return failed;
}
