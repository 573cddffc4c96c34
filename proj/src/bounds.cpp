#include "qpvlab/bounds.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qpvlab/errors.hpp"

namespace qpvlab {

namespace {

constexpr int kBisectionCap = 200;

double exact_threshold(double n, double s) { return n - s - n * binary_entropy(s / n); }

double stringent_threshold(double n, double s) {
  return n - s * std::log2(n) + s * std::log2(s / (2.0 * std::numbers::e));
}

}  // namespace

double binary_entropy(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("binary_entropy: argument outside [0,1]");
  if (alpha == 0.0 || alpha == 1.0) return 0.0;
  return -alpha * std::log2(alpha) - (1.0 - alpha) * std::log2(1.0 - alpha);
}

double g_function(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 0.5)) throw DomainError("g: argument outside [0,1/2]");
  return binary_entropy(alpha) + alpha - 1.0;
}

double g_inverse(double y) {
  if (!(y >= -1.0 && y <= 0.5)) throw DomainError("g^-1: argument outside [-1,1/2]");
  double lo = 0.0;
  double hi = 0.5;
  for (int i = 0; i < kBisectionCap; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (g_function(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double gamma_function(double hmin_rate) {
  if (std::isnan(hmin_rate)) throw DomainError("gamma: NaN argument");
  if (hmin_rate >= 0.5) return hmin_rate;
  if (hmin_rate < -1.0) throw VacuousBound("gamma: argument below -1, bound is vacuous");
  return g_inverse(hmin_rate);
}

double lambda_secure(std::int64_t n, double emax) {
  if (n < 1) throw DomainError("lambda_secure: n must be positive");
  if (emax < 0.0) throw DomainError("lambda_secure: E_max must be nonnegative");
  const double nd = static_cast<double>(n);
  if (emax > nd) throw VacuousBound("lambda_secure: E_max exceeds n, no security statement");
  return 0.5 * (gamma_function(-emax / nd) - 1.0 / nd);
}

double epsilon_from_lambda(std::int64_t n, double lambda) {
  return std::exp2(-static_cast<double>(n) * lambda);
}

double lambda_from_epsilon(std::int64_t n, double epsilon) {
  if (n < 1) throw DomainError("lambda_from_epsilon: n must be positive");
  if (!(epsilon > 0.0)) throw DomainError("lambda_from_epsilon: epsilon must be positive");
  return -std::log2(epsilon) / static_cast<double>(n);
}

double s_parameter(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0,1)");
  return 1.0 - 2.0 * std::log2(epsilon);
}

double tfkw_rate() {
  const double c = std::cos(std::numbers::pi / 8.0);
  return -std::log2(c * c);
}

double tfkw_reference(double n) { return tfkw_rate() * n; }

double wse_min_entropy_bound(std::int64_t n, double hmin_a) {
  if (n < 1) throw DomainError("wse_min_entropy_bound: n must be positive");
  const double nd = static_cast<double>(n);
  return 0.5 * (nd * gamma_function(hmin_a / nd) - 1.0);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Secure: return "secure";
    case Verdict::NotCertified: return "not-certified";
    case Verdict::Vacuous: return "vacuous";
    case Verdict::NoComparison: return "no-comparison";
  }
  return "unknown";
}

BoundReport epsilon_threshold(std::int64_t n, double epsilon, std::optional<double> emax) {
  if (n < 1) throw DomainError("epsilon_threshold: n must be positive");
  BoundReport r;
  r.n = n;
  r.epsilon = epsilon;
  r.s = s_parameter(epsilon);
  r.lambda = lambda_from_epsilon(n, epsilon);
  const double nd = static_cast<double>(n);
  r.tfkw_bound = tfkw_reference(nd);
  r.vacuous = *r.s > nd;
  r.secure_regime = 2.0 * *r.s < nd;
  if (!r.vacuous) {
    r.threshold_exact = exact_threshold(nd, *r.s);
    r.threshold_stringent = stringent_threshold(nd, *r.s);
  }
  if (emax) {
    const auto extra = emax_report(n, *emax);
    r.emax = emax;
    r.gamma_value = extra.gamma_value;
    r.certified_lambda = extra.certified_lambda;
    r.certified_epsilon = extra.certified_epsilon;
    if (r.vacuous || !r.secure_regime) {
      r.verdict = Verdict::Vacuous;
    } else {
      r.verdict = *emax <= *r.threshold_exact ? Verdict::Secure : Verdict::NotCertified;
    }
  }
  return r;
}

BoundReport emax_report(std::int64_t n, double emax) {
  if (n < 1) throw DomainError("emax_report: n must be positive");
  if (emax < 0.0) throw DomainError("emax_report: E_max must be nonnegative");
  BoundReport r;
  r.n = n;
  r.emax = emax;
  const double nd = static_cast<double>(n);
  r.tfkw_bound = tfkw_reference(nd);
  if (emax <= nd) {
    r.gamma_value = gamma_function(-emax / nd);
    r.certified_lambda = lambda_secure(n, emax);
  }
  r.certified_epsilon = eps_star(n, emax);
  r.verdict = *r.certified_epsilon < 1.0 ? Verdict::NoComparison : Verdict::Vacuous;
  return r;
}

double eps_star(std::int64_t n, double emax) {
  if (n < 1) throw DomainError("eps_star: n must be positive");
  if (emax < 0.0) throw DomainError("eps_star: E_max must be nonnegative");
  const double nd = static_cast<double>(n);
  double lo = 1.0;       // s = 1  <=> eps = 1
  double hi = nd / 2.0;  // f(n/2) = -n/2 < 0 <= emax
  if (hi <= lo || exact_threshold(nd, lo) < emax) return 1.0;
  // f(s) = n - s - n h(s/n) decreases on [1, n/2]; find f(s*) = emax.
  for (int i = 0; i < kBisectionCap; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (exact_threshold(nd, mid) >= emax) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::min(1.0, std::exp2((1.0 - lo) / 2.0));
}

std::int64_t min_n_for(double epsilon, double emax) {
  if (emax < 0.0) throw DomainError("min_n_for: E_max must be nonnegative");
  const double s = s_parameter(epsilon);
  const auto ok = [&](std::int64_t n) {
    const double nd = static_cast<double>(n);
    return 2.0 * s < nd && exact_threshold(nd, s) >= emax;
  };
  // The exact threshold increases with n once n >= 2s.
  std::int64_t lo = static_cast<std::int64_t>(std::floor(2.0 * s));
  std::int64_t hi = std::max<std::int64_t>(lo + 1, 1);
  while (!ok(hi)) {
    lo = hi;
    if (hi > (std::numeric_limits<std::int64_t>::max() >> 2)) throw DomainError("min_n_for: overflow");
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

nlohmann::json to_json(const BoundReport& r) {
  const auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json j;
  j["n"] = r.n;
  j["epsilon"] = opt(r.epsilon);
  j["emax"] = opt(r.emax);
  j["s"] = opt(r.s);
  j["lambda"] = opt(r.lambda);
  j["threshold_exact"] = opt(r.threshold_exact);
  j["threshold_stringent"] = opt(r.threshold_stringent);
  j["vacuous"] = r.vacuous;
  j["secure_regime"] = r.secure_regime;
  j["gamma"] = opt(r.gamma_value);
  j["certified_lambda"] = opt(r.certified_lambda);
  j["certified_epsilon"] = opt(r.certified_epsilon);
  j["tfkw_bound"] = r.tfkw_bound;
  j["verdict"] = to_string(r.verdict);
  return j;
}

}  // namespace qpvlab
