#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qpvlab/linalg.hpp"
#include "qpvlab/rng.hpp"

namespace qpvlab {

struct Subsystem {
  std::string label;
  std::size_t dim = 2;

  friend bool operator==(const Subsystem&, const Subsystem&) = default;
};

/// Ordered list of labeled tensor factors. The first factor is the most
/// significant index of the joint basis.
class Factorization {
 public:
  Factorization() = default;
  explicit Factorization(std::vector<Subsystem> parts);
  static Factorization qubits(std::span<const std::string> labels);
  static Factorization single(std::string label, std::size_t dim = 2);

  const std::vector<Subsystem>& parts() const { return parts_; }
  std::size_t size() const { return parts_.size(); }
  bool empty() const { return parts_.empty(); }
  std::size_t total_dim() const;
  bool contains(const std::string& label) const;
  /// Position of `label`; throws std::invalid_argument for unknown labels.
  std::size_t index_of(const std::string& label) const;
  std::vector<std::string> labels() const;
  std::size_t dim_of(std::span<const std::string> labels) const;

  /// Concatenation; throws std::invalid_argument on a label collision.
  Factorization concat(const Factorization& other) const;
  /// Factors named in `labels`, in the given order.
  Factorization select(std::span<const std::string> labels) const;
  /// Factors not named in `labels`, in their original order.
  Factorization without(std::span<const std::string> labels) const;

  friend bool operator==(const Factorization&, const Factorization&) = default;

 private:
  std::vector<Subsystem> parts_;
};

/// Unit vector over a labeled factorization.
class PureState {
 public:
  PureState(ComplexVector amplitudes, Factorization factorization);
  /// Computational basis state |index> of a single subsystem.
  static PureState basis(std::string label, std::size_t dim, std::size_t index);

  const ComplexVector& amplitudes() const { return amplitudes_; }
  const Factorization& factorization() const { return factorization_; }
  std::size_t dim() const { return amplitudes_.size(); }
  ComplexMatrix projector() const { return ComplexMatrix::outer(amplitudes_, amplitudes_); }

 private:
  ComplexVector amplitudes_;
  Factorization factorization_;
};

/// Hermitian, PSD, unit-trace operator over a labeled factorization.
class DensityOperator {
 public:
  /// Validates Hermiticity, unit trace and positivity within `tol`.
  DensityOperator(ComplexMatrix matrix, Factorization factorization, double tol = kTolerance);
  explicit DensityOperator(const PureState& psi);
  /// Skips the eigenvalue check; for results of operations that preserve
  /// positivity by construction (tensor, partial trace, measurement update).
  static DensityOperator unchecked(ComplexMatrix matrix, Factorization factorization);
  static DensityOperator maximally_mixed(Factorization factorization);

  const ComplexMatrix& matrix() const { return matrix_; }
  const Factorization& factorization() const { return factorization_; }
  std::size_t dim() const { return matrix_.rows(); }

 private:
  DensityOperator() = default;
  ComplexMatrix matrix_;
  Factorization factorization_;
};

/// Positive operator-valued measure over a single (possibly composite) space.
class Povm {
 public:
  explicit Povm(std::vector<ComplexMatrix> elements, double tol = kTolerance);
  /// Rank-one projective measurement onto an orthonormal basis.
  static Povm from_basis(std::span<const ComplexVector> basis, double tol = kTolerance);
  static Povm computational(std::size_t dim);
  /// theta = 0: {|0>,|1>}; theta = 1: {|+>,|->}.
  static Povm bb84_basis(std::uint8_t theta);
  /// Eigenbasis of (Z + X)/sqrt(2): outcome b guesses bit b.
  static Povm breidbart();
  /// Two-qubit Bell basis; outcome index 2a + b projects onto (Z^b X^a (x) I)|Phi+>.
  static Povm bell();

  std::size_t size() const { return elements_.size(); }
  std::size_t dim() const { return elements_.front().rows(); }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }
  const ComplexMatrix& element(std::size_t i) const { return elements_.at(i); }
  const ComplexMatrix& sqrt_element(std::size_t i) const { return sqrt_elements_.at(i); }

 private:
  std::vector<ComplexMatrix> elements_;
  std::vector<ComplexMatrix> sqrt_elements_;
};

namespace gates {
ComplexMatrix pauli_x();
ComplexMatrix pauli_z();
ComplexMatrix hadamard();
}  // namespace gates

PureState tensor(const PureState& a, const PureState& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

/// Reorders subsystems to `order` (a permutation of the existing labels).
PureState permute(const PureState& psi, std::span<const std::string> order);
DensityOperator permute(const DensityOperator& rho, std::span<const std::string> order);

/// Marginal on `keep`; kept subsystems retain their original relative order.
DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::string> keep);

/// Lifts an operator on `labels` to the whole factorization (identity elsewhere).
ComplexMatrix embed(const ComplexMatrix& local, std::span<const std::string> labels,
                    const Factorization& factorization);

PureState apply_local(const PureState& psi, const ComplexMatrix& unitary,
                      std::span<const std::string> labels);

/// |<a|b>|^2; factorizations must agree.
double fidelity(const PureState& a, const PureState& b);

/// Hadamard^theta |x> on a qubit named `label`.
PureState bb84_encode(std::uint8_t x, std::uint8_t theta, std::string label = "q");

template <typename State>
struct MeasurementResult {
  std::size_t outcome;
  State post_state;
};

/// Born-rule probabilities of `povm` acting on the subsystems `labels`.
std::vector<double> outcome_probabilities(const PureState& psi, const Povm& povm,
                                          std::span<const std::string> labels);
std::vector<double> outcome_probabilities(const DensityOperator& rho, const Povm& povm,
                                          std::span<const std::string> labels);

/// Samples an outcome; the post-measurement state is the Lueders update
/// sqrt(M_k) psi / ||.|| on the full factorization.
MeasurementResult<PureState> measure(const PureState& psi, const Povm& povm,
                                     std::span<const std::string> labels, Rng& rng);
MeasurementResult<PureState> measure(const PureState& psi, const Povm& povm, Rng& rng);
MeasurementResult<DensityOperator> measure(const DensityOperator& rho, const Povm& povm,
                                           std::span<const std::string> labels, Rng& rng);
/// Single-qubit measurement in the BB84 basis theta.
MeasurementResult<PureState> measure(const PureState& psi, std::uint8_t theta,
                                     const std::string& label, Rng& rng);

/// (|00> + |11>)/sqrt(2) on (a, b).
PureState bell_pair(std::string a = "A", std::string b = "B");
/// (Z^b X^a (x) I)|Phi+> on (first, second).
PureState bell_basis_state(std::uint8_t a, std::uint8_t b, std::string first = "A",
                           std::string second = "B");

struct BellOutcome {
  std::uint8_t a;
  std::uint8_t b;
  /// State of the unmeasured subsystems. When the measured pair is (input,
  /// half of |Phi+>), the other half holds X^a Z^b |input>.
  PureState remainder;
};

/// Bell measurement on the qubits `first`, `second`; both are removed from the result.
BellOutcome bell_measure(const PureState& psi, const std::string& first,
                         const std::string& second, Rng& rng);

/// Undoes X^a Z^b on `label` by applying Z^b X^a.
PureState pauli_correct(const PureState& psi, const std::string& label, std::uint8_t a,
                        std::uint8_t b);

}  // namespace qpvlab
