#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpvlab/quantum.hpp"

namespace qpvlab {

/// cq-state sum_x p_x |x><x| (x) tau_x, stored as its ensemble.
class Ensemble {
 public:
  Ensemble(std::vector<double> probabilities, std::vector<DensityOperator> states);

  std::size_t size() const { return probabilities_.size(); }
  double probability(std::size_t x) const { return probabilities_.at(x); }
  const DensityOperator& state(std::size_t x) const { return states_.at(x); }

 private:
  std::vector<double> probabilities_;
  std::vector<DensityOperator> states_;
};

/// psi = sum_i sqrt(lambda_i) |a_i>|b_i>, lambda nonincreasing, zero terms dropped.
struct SchmidtDecomposition {
  std::vector<double> coefficients;  // squared coefficients lambda_i, summing to 1
  std::vector<ComplexVector> a_vectors;
  std::vector<ComplexVector> b_vectors;
  Factorization a_factorization;
  Factorization b_factorization;

  std::size_t rank() const { return coefficients.size(); }
};

SchmidtDecomposition schmidt_decompose(const PureState& psi, std::span<const std::string> a_labels);

enum class CertificateKind { HminUpperWitness, HminFeasiblePair, PguessYkl, EmaxUpperWitness };

std::string to_string(CertificateKind kind);

/// Checked statement about a one-shot quantity.
///
///   HminFeasiblePair : rho <= 2^lambda I_A (x) tau, so H_min(A|B) >= -lambda = value
///   HminUpperWitness : Y >= 0, tr_A Y <= I_B, so H_min(A|B) <= -log2 tr(rho Y) = value
///   PguessYkl        : Gamma >= p_x tau_x for all x, so the POVM is optimal; value = p_guess
///   EmaxUpperWitness : rho <= 2^lambda sigma with sigma separable, so E_max <= lambda = value
struct EntropyCertificate {
  CertificateKind kind;
  double value = 0.0;
  ComplexMatrix witness;
  Factorization witness_factorization;
  bool verified = false;
  double tolerance = kTolerance;
  /// Smallest eigenvalue among the operator inequalities checked.
  double slack = 0.0;
};

nlohmann::json to_json(const EntropyCertificate& cert);

/// D_max(rho || sigma) = log2 of the largest generalized eigenvalue of rho
/// against sigma on sigma's support; +infinity if rho leaves that support.
double dmax(const DensityOperator& rho, const DensityOperator& sigma);

/// rho_AB <= 2^lambda I_A (x) tau_B. The B subsystems are those named by tau.
bool hmin_feasible(const DensityOperator& rho, double lambda, const DensityOperator& tau,
                   double tol = kTolerance);

/// Dual feasible operator for the min-entropy program on the cut A:B, where
/// B = `conditioning`.
struct HminDualWitness {
  ComplexMatrix y;
  Factorization factorization;
  std::vector<std::string> conditioning;
};

HminDualWitness tensor(const HminDualWitness& a, const HminDualWitness& b);

EntropyCertificate certify_hmin_upper(const DensityOperator& rho, const HminDualWitness& witness,
                                      double tol = kTolerance);

struct HminPureResult {
  double value;  // H_min(A|B) in bits
  SchmidtDecomposition schmidt;
  DensityOperator tau;  // optimal conditioning state on B
  EntropyCertificate feasible;
  EntropyCertificate upper;
};

/// H_min(A|B) of a pure state: -2 log2 sum_i sqrt(lambda_i), certified from both sides.
HminPureResult hmin_pure(const PureState& psi, std::span<const std::string> a_labels,
                         double tol = kTolerance);

struct PguessResult {
  double value;
  bool ykl_certified;
  EntropyCertificate certificate;
};

/// Success probability of `candidate` on `ensemble`, with the Yuen-Kennedy-Lax
/// optimality check.
PguessResult pguess(const Ensemble& ensemble, const Povm& candidate, double tol = kTolerance);

/// H_min(X|B) = -log2 p_guess; refuses an uncertified guessing probability.
double hmin_cq(const Ensemble& ensemble, const PguessResult& certified);

struct ProductTerm {
  double weight;
  DensityOperator a;
  DensityOperator b;
};

/// sum_i p_i tau_A^i (x) tau_B^i
struct SeparableMixture {
  std::vector<ProductTerm> terms;

  void validate(double tol = kTolerance) const;
  const Factorization& a_factorization() const { return terms.front().a.factorization(); }
  const Factorization& b_factorization() const { return terms.front().b.factorization(); }
};

DensityOperator realize(const SeparableMixture& mixture);
SeparableMixture tensor(const SeparableMixture& x, const SeparableMixture& y);

struct DominatingMarginal {
  DensityOperator tau;
  bool verified;
};

/// tau = sum_i p_i tau_B^i, checked against sigma <= I_A (x) tau.
DominatingMarginal separable_dominating_marginal(const SeparableMixture& mixture,
                                                 double tol = kTolerance);

struct EmaxSandwich {
  double lower;
  double upper;
  EntropyCertificate lower_certificate;
  EntropyCertificate upper_certificate;
};

/// Two-sided certified bounds on E_max(A;B)_rho:
///   lower = -(certified upper bound on H_min(A|B)),  upper = D_max(rho || sigma).
/// Throws DomainError if either witness fails verification.
EmaxSandwich emax_sandwich(const DensityOperator& rho, const HminDualWitness& lower_witness,
                           const SeparableMixture& upper_witness, double tol = kTolerance);

struct PureStateWitnesses {
  HminDualWitness dual;
  SeparableMixture separable;
};

/// Witnesses from the Schmidt form: Y = |phi><phi| with phi = sum_i |a_i b_i>,
/// and sigma = sum_i w_i |a_i><a_i| (x) |b_i><b_i| with w_i proportional to sqrt(lambda_i).
PureStateWitnesses pure_state_witnesses(const PureState& psi, std::span<const std::string> a_labels);

}  // namespace qpvlab
