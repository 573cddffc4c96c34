#pragma once

#include <cstdint>
#include <optional>

#include <json.hpp>

namespace qpvlab {

/// h(a) = -a log2 a - (1-a) log2(1-a), with h(0) = h(1) = 0.
double binary_entropy(double alpha);

/// g(a) = h(a) + a - 1 on [0, 1/2]; increases from -1 to 1/2.
double g_function(double alpha);

/// Inverse of g on [-1, 1/2], by bisection.
double g_inverse(double y);

/// gamma(x) = x for x >= 1/2, g^{-1}(x) for -1 <= x < 1/2.
/// Throws VacuousBound for x < -1, where the bound says nothing.
double gamma_function(double hmin_rate);

/// Largest certified security rate (bits per qubit) of WSE in the noisy
/// entanglement model against cheaters sharing a state with E_max = emax:
///   1/2 [gamma(-emax/n) - 1/n].
/// Throws VacuousBound when emax > n.
double lambda_secure(std::int64_t n, double emax);

/// eps = 2^{-n lambda}
double epsilon_from_lambda(std::int64_t n, double lambda);
/// lambda = -log2(eps) / n
double lambda_from_epsilon(std::int64_t n, double epsilon);

/// s = 1 - 2 log2 eps
double s_parameter(double epsilon);

/// Per-qubit rate of the unentangled bound: -log2 cos^2(pi/8) ~ 0.22845.
double tfkw_rate();
double tfkw_reference(double n);

/// Lower bound on H_min(X^n | Theta^n C Q_2) from H_min(A^n | C Q_2):
///   1/2 [n gamma(hmin_a / n) - 1].
double wse_min_entropy_bound(std::int64_t n, double hmin_a);

enum class Verdict { Secure, NotCertified, Vacuous, NoComparison };

const char* to_string(Verdict v);

struct BoundReport {
  std::int64_t n = 0;
  std::optional<double> epsilon;
  std::optional<double> emax;

  // Populated when epsilon is given.
  std::optional<double> s;
  std::optional<double> lambda;                // -log2(eps)/n
  std::optional<double> threshold_exact;       // n - s - n h(s/n), for s <= n
  std::optional<double> threshold_stringent;   // n - s log2 n + s log2(s/(2e))
  bool vacuous = false;                         // s > n: no positive threshold
  bool secure_regime = false;                   // 2s < n: the threshold is a real guarantee

  // Populated when emax is given.
  std::optional<double> gamma_value;           // gamma(-emax/n)
  std::optional<double> certified_lambda;
  std::optional<double> certified_epsilon;     // eps*(n, emax), capped at 1

  double tfkw_bound = 0.0;
  Verdict verdict = Verdict::NoComparison;
};

/// Both epsilon-security thresholds on E_max, optionally compared with `emax`.
/// Throws DomainError for eps outside (0, 1).
BoundReport epsilon_threshold(std::int64_t n, double epsilon, std::optional<double> emax = {});

/// Report for a given resource only: certified rate and cheating-probability bound.
BoundReport emax_report(std::int64_t n, double emax);

/// eps*(n, emax) = inf{ eps : emax <= n - s(eps) - n h(s(eps)/n) }, found by
/// bisection on s over [1, n/2]; 1 when no eps < 1 qualifies.
double eps_star(std::int64_t n, double emax);

/// Smallest n whose exact threshold at `epsilon` reaches `emax`.
std::int64_t min_n_for(double epsilon, double emax);

nlohmann::json to_json(const BoundReport& report);

}  // namespace qpvlab
