#include "qpvlab/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qpvlab {

// ---------------------------------------------------------------------------
// Factorization

Factorization::Factorization(std::vector<Subsystem> parts) : parts_(std::move(parts)) {
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i].dim == 0) throw std::invalid_argument("Factorization: zero-dimensional factor");
    for (std::size_t j = i + 1; j < parts_.size(); ++j)
      if (parts_[i].label == parts_[j].label)
        throw std::invalid_argument("Factorization: duplicate label '" + parts_[i].label + "'");
  }
}

Factorization Factorization::qubits(std::span<const std::string> labels) {
  std::vector<Subsystem> parts;
  for (const auto& l : labels) parts.push_back({l, 2});
  return Factorization(std::move(parts));
}

Factorization Factorization::single(std::string label, std::size_t dim) {
  return Factorization({{std::move(label), dim}});
}

std::size_t Factorization::total_dim() const {
  std::size_t d = 1;
  for (const auto& p : parts_) d *= p.dim;
  return d;
}

bool Factorization::contains(const std::string& label) const {
  return std::any_of(parts_.begin(), parts_.end(),
                     [&](const Subsystem& s) { return s.label == label; });
}

std::size_t Factorization::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < parts_.size(); ++i)
    if (parts_[i].label == label) return i;
  throw std::invalid_argument("unknown subsystem label '" + label + "'");
}

std::vector<std::string> Factorization::labels() const {
  std::vector<std::string> out;
  for (const auto& p : parts_) out.push_back(p.label);
  return out;
}

std::size_t Factorization::dim_of(std::span<const std::string> labels) const {
  std::size_t d = 1;
  for (const auto& l : labels) d *= parts_[index_of(l)].dim;
  return d;
}

Factorization Factorization::concat(const Factorization& other) const {
  std::vector<Subsystem> parts = parts_;
  for (const auto& p : other.parts_) {
    if (contains(p.label))
      throw std::invalid_argument("tensor: label collision on '" + p.label + "'");
    parts.push_back(p);
  }
  return Factorization(std::move(parts));
}

Factorization Factorization::select(std::span<const std::string> labels) const {
  std::vector<Subsystem> parts;
  for (const auto& l : labels) parts.push_back(parts_[index_of(l)]);
  return Factorization(std::move(parts));
}

Factorization Factorization::without(std::span<const std::string> labels) const {
  for (const auto& l : labels) (void)index_of(l);
  std::vector<Subsystem> parts;
  for (const auto& p : parts_)
    if (std::find(labels.begin(), labels.end(), p.label) == labels.end()) parts.push_back(p);
  return Factorization(std::move(parts));
}

namespace {

/// new_index[old_index] after reordering factors so that new factor j is old factor order[j].
std::vector<std::size_t> permutation_map(const Factorization& fac,
                                         const std::vector<std::size_t>& order) {
  const auto& parts = fac.parts();
  const std::size_t m = parts.size();
  std::vector<std::size_t> old_stride(m, 1), new_stride(m, 1);
  for (std::size_t k = m; k-- > 1;) old_stride[k - 1] = old_stride[k] * parts[k].dim;
  for (std::size_t j = m; j-- > 1;) new_stride[j - 1] = new_stride[j] * parts[order[j]].dim;
  const std::size_t total = fac.total_dim();
  std::vector<std::size_t> map(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t idx = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t k = order[j];
      const std::size_t digit = (i / old_stride[k]) % parts[k].dim;
      idx += digit * new_stride[j];
    }
    map[i] = idx;
  }
  return map;
}

std::vector<std::size_t> order_indices(const Factorization& fac,
                                       std::span<const std::string> order) {
  if (order.size() != fac.size())
    throw std::invalid_argument("permute: order must name every subsystem exactly once");
  std::vector<std::size_t> idx;
  for (const auto& l : order) {
    const std::size_t k = fac.index_of(l);
    if (std::find(idx.begin(), idx.end(), k) != idx.end())
      throw std::invalid_argument("permute: repeated label '" + l + "'");
    idx.push_back(k);
  }
  return idx;
}

/// `labels` first (in the given order), the rest after in original order.
std::vector<std::string> front_order(const Factorization& fac,
                                     std::span<const std::string> labels) {
  std::vector<std::string> order(labels.begin(), labels.end());
  for (const auto& l : fac.without(labels).labels()) order.push_back(l);
  return order;
}

bool is_identity_order(const std::vector<std::size_t>& idx) {
  for (std::size_t i = 0; i < idx.size(); ++i)
    if (idx[i] != i) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// States

PureState::PureState(ComplexVector amplitudes, Factorization factorization)
    : amplitudes_(std::move(amplitudes)), factorization_(std::move(factorization)) {
  if (amplitudes_.size() != factorization_.total_dim())
    throw std::invalid_argument("PureState: amplitude count does not match factorization");
  if (std::abs(norm(amplitudes_) * norm(amplitudes_) - 1.0) > kTolerance)
    throw std::invalid_argument("PureState: amplitudes are not normalized");
}

PureState PureState::basis(std::string label, std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::invalid_argument("PureState::basis: index out of range");
  ComplexVector amps(dim);
  amps[index] = 1.0;
  return PureState(std::move(amps), Factorization::single(std::move(label), dim));
}

DensityOperator::DensityOperator(ComplexMatrix matrix, Factorization factorization, double tol)
    : matrix_(std::move(matrix)), factorization_(std::move(factorization)) {
  if (!matrix_.is_square() || matrix_.rows() != factorization_.total_dim())
    throw std::invalid_argument("DensityOperator: matrix does not match factorization");
  if (!matrix_.is_finite()) throw std::invalid_argument("DensityOperator: non-finite entries");
  if (!matrix_.is_hermitian(tol)) throw std::invalid_argument("DensityOperator: not Hermitian");
  if (std::abs(matrix_.trace() - Complex(1.0)) > tol)
    throw std::invalid_argument("DensityOperator: trace is not 1");
  if (eigvalsh(matrix_, tol).front() < -tol)
    throw std::invalid_argument("DensityOperator: not positive semidefinite");
}

DensityOperator::DensityOperator(const PureState& psi)
    : matrix_(psi.projector()), factorization_(psi.factorization()) {}

DensityOperator DensityOperator::unchecked(ComplexMatrix matrix, Factorization factorization) {
  if (!matrix.is_square() || matrix.rows() != factorization.total_dim())
    throw std::invalid_argument("DensityOperator: matrix does not match factorization");
  DensityOperator rho;
  rho.matrix_ = std::move(matrix);
  rho.factorization_ = std::move(factorization);
  return rho;
}

DensityOperator DensityOperator::maximally_mixed(Factorization factorization) {
  const std::size_t d = factorization.total_dim();
  return unchecked(ComplexMatrix::identity(d) * Complex(1.0 / static_cast<double>(d)),
                   std::move(factorization));
}

// ---------------------------------------------------------------------------
// POVMs

Povm::Povm(std::vector<ComplexMatrix> elements, double tol) : elements_(std::move(elements)) {
  if (elements_.empty()) throw std::invalid_argument("Povm: no elements");
  const std::size_t d = elements_.front().rows();
  ComplexMatrix sum(d, d);
  for (const auto& e : elements_) {
    if (!e.is_square() || e.rows() != d) throw std::invalid_argument("Povm: dimension mismatch");
    const auto eig = eigh(e, tol);
    if (eig.values.front() < -tol) throw std::invalid_argument("Povm: element is not PSD");
    sqrt_elements_.push_back(spectral_map(eig, [](double x) { return std::sqrt(std::max(x, 0.0)); }));
    sum += e;
  }
  if (sum.max_abs_diff(ComplexMatrix::identity(d)) > tol)
    throw std::invalid_argument("Povm: elements do not sum to identity");
}

Povm Povm::from_basis(std::span<const ComplexVector> basis, double tol) {
  std::vector<ComplexMatrix> elements;
  for (const auto& v : basis) elements.push_back(ComplexMatrix::outer(v, v));
  return Povm(std::move(elements), tol);
}

Povm Povm::computational(std::size_t dim) {
  std::vector<ComplexVector> basis(dim, ComplexVector(dim));
  for (std::size_t i = 0; i < dim; ++i) basis[i][i] = 1.0;
  return from_basis(basis);
}

Povm Povm::bb84_basis(std::uint8_t theta) {
  if (theta > 1) throw std::invalid_argument("bb84_basis: theta must be 0 or 1");
  return from_basis(std::vector<ComplexVector>{bb84_encode(0, theta).amplitudes(),
                                               bb84_encode(1, theta).amplitudes()});
}

Povm Povm::breidbart() {
  const double c = std::cos(std::numbers::pi / 8.0);
  const double s = std::sin(std::numbers::pi / 8.0);
  return from_basis(std::vector<ComplexVector>{{c, s}, {-s, c}});
}

Povm Povm::bell() {
  std::vector<ComplexVector> basis;
  for (std::uint8_t a = 0; a < 2; ++a)
    for (std::uint8_t b = 0; b < 2; ++b) basis.push_back(bell_basis_state(a, b).amplitudes());
  return from_basis(basis);
}

namespace gates {
ComplexMatrix pauli_x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix pauli_z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
ComplexMatrix hadamard() {
  const double r = std::numbers::sqrt2 / 2.0;
  return {{r, r}, {r, -r}};
}
}  // namespace gates

// ---------------------------------------------------------------------------
// Structural operations

PureState tensor(const PureState& a, const PureState& b) {
  auto fac = a.factorization().concat(b.factorization());
  auto amps = kron(a.amplitudes(), b.amplitudes());
  return PureState(std::move(amps), std::move(fac));
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  auto fac = a.factorization().concat(b.factorization());
  return DensityOperator::unchecked(kron(a.matrix(), b.matrix()), std::move(fac));
}

PureState permute(const PureState& psi, std::span<const std::string> order) {
  const auto idx = order_indices(psi.factorization(), order);
  if (is_identity_order(idx)) return psi;
  const auto map = permutation_map(psi.factorization(), idx);
  ComplexVector out(psi.dim());
  for (std::size_t i = 0; i < map.size(); ++i) out[map[i]] = psi.amplitudes()[i];
  return PureState(std::move(out), psi.factorization().select(order));
}

DensityOperator permute(const DensityOperator& rho, std::span<const std::string> order) {
  const auto idx = order_indices(rho.factorization(), order);
  if (is_identity_order(idx)) return rho;
  const auto map = permutation_map(rho.factorization(), idx);
  const std::size_t d = rho.dim();
  ComplexMatrix out(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out(map[i], map[j]) = rho.matrix()(i, j);
  return DensityOperator::unchecked(std::move(out), rho.factorization().select(order));
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::string> keep) {
  const auto& fac = rho.factorization();
  std::vector<std::string> kept;  // original relative order
  for (const auto& l : fac.labels())
    if (std::find(keep.begin(), keep.end(), l) != keep.end()) kept.push_back(l);
  for (const auto& l : keep) (void)fac.index_of(l);
  if (kept.size() != keep.size()) throw std::invalid_argument("partial_trace: repeated label");

  const auto moved = permute(rho, front_order(fac, kept));
  const std::size_t dk = fac.dim_of(kept);
  const std::size_t dr = rho.dim() / dk;
  ComplexMatrix out(dk, dk);
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j < dk; ++j) {
      Complex acc = 0.0;
      for (std::size_t r = 0; r < dr; ++r) acc += moved.matrix()(i * dr + r, j * dr + r);
      out(i, j) = acc;
    }
  return DensityOperator::unchecked(std::move(out), fac.select(kept));
}

ComplexMatrix embed(const ComplexMatrix& local, std::span<const std::string> labels,
                    const Factorization& factorization) {
  const std::size_t dl = factorization.dim_of(labels);
  if (!local.is_square() || local.rows() != dl)
    throw std::invalid_argument("embed: operator dimension does not match subsystems");
  const auto order = front_order(factorization, labels);
  const std::size_t dr = factorization.total_dim() / dl;
  const ComplexMatrix lifted = kron(local, ComplexMatrix::identity(dr));
  // `lifted` lives in `order`; map it back to the factorization's own order.
  const Factorization moved = factorization.select(order);
  std::vector<std::string> original = factorization.labels();
  const auto map = permutation_map(moved, order_indices(moved, original));
  const std::size_t d = lifted.rows();
  ComplexMatrix out(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out(map[i], map[j]) = lifted(i, j);
  return out;
}

PureState apply_local(const PureState& psi, const ComplexMatrix& unitary,
                      std::span<const std::string> labels) {
  auto amps = matvec(embed(unitary, labels, psi.factorization()), psi.amplitudes());
  const double nrm = norm(amps);
  if (std::abs(nrm - 1.0) > kTolerance) throw std::invalid_argument("apply_local: not unitary");
  return PureState(std::move(amps), psi.factorization());
}

double fidelity(const PureState& a, const PureState& b) {
  if (a.factorization() != b.factorization())
    throw std::invalid_argument("fidelity: factorizations differ");
  return std::norm(inner(a.amplitudes(), b.amplitudes()));
}

PureState bb84_encode(std::uint8_t x, std::uint8_t theta, std::string label) {
  if (x > 1 || theta > 1) throw std::invalid_argument("bb84_encode: x and theta must be bits");
  auto ket = PureState::basis(std::move(label), 2, x);
  if (theta == 0) return ket;
  return PureState(matvec(gates::hadamard(), ket.amplitudes()), ket.factorization());
}

// ---------------------------------------------------------------------------
// Measurement

namespace {

void check_povm(const Povm& povm, const Factorization& fac, std::span<const std::string> labels) {
  if (povm.dim() != fac.dim_of(labels))
    throw std::invalid_argument("measure: POVM dimension does not match measured subsystems");
}

std::vector<double> probabilities_from_marginal(const ComplexMatrix& marginal, const Povm& povm) {
  std::vector<double> probs;
  probs.reserve(povm.size());
  const std::size_t d = marginal.rows();
  for (const auto& m : povm.elements()) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) acc += m(i, j) * marginal(j, i);
    probs.push_back(std::max(acc.real(), 0.0));
  }
  return probs;
}

ComplexMatrix pure_marginal(const PureState& psi, std::span<const std::string> labels) {
  const auto moved = permute(psi, front_order(psi.factorization(), labels));
  const std::size_t ds = psi.factorization().dim_of(labels);
  const std::size_t dr = psi.dim() / ds;
  const auto& a = moved.amplitudes();
  ComplexMatrix out(ds, ds);
  for (std::size_t i = 0; i < ds; ++i)
    for (std::size_t j = 0; j < ds; ++j) {
      Complex acc = 0.0;
      for (std::size_t r = 0; r < dr; ++r) acc += a[i * dr + r] * std::conj(a[j * dr + r]);
      out(i, j) = acc;
    }
  return out;
}

}  // namespace

std::vector<double> outcome_probabilities(const PureState& psi, const Povm& povm,
                                          std::span<const std::string> labels) {
  check_povm(povm, psi.factorization(), labels);
  return probabilities_from_marginal(pure_marginal(psi, labels), povm);
}

std::vector<double> outcome_probabilities(const DensityOperator& rho, const Povm& povm,
                                          std::span<const std::string> labels) {
  check_povm(povm, rho.factorization(), labels);
  auto marginal = partial_trace(rho, labels);
  marginal = permute(marginal, labels);
  return probabilities_from_marginal(marginal.matrix(), povm);
}

MeasurementResult<PureState> measure(const PureState& psi, const Povm& povm,
                                     std::span<const std::string> labels, Rng& rng) {
  const auto probs = outcome_probabilities(psi, povm, labels);
  const std::size_t k = rng.sample(probs);
  auto amps = matvec(embed(povm.sqrt_element(k), labels, psi.factorization()), psi.amplitudes());
  const double nrm = norm(amps);
  for (auto& z : amps) z /= nrm;
  return {k, PureState(std::move(amps), psi.factorization())};
}

MeasurementResult<PureState> measure(const PureState& psi, const Povm& povm, Rng& rng) {
  const auto labels = psi.factorization().labels();
  return measure(psi, povm, labels, rng);
}

MeasurementResult<DensityOperator> measure(const DensityOperator& rho, const Povm& povm,
                                           std::span<const std::string> labels, Rng& rng) {
  const auto probs = outcome_probabilities(rho, povm, labels);
  const std::size_t k = rng.sample(probs);
  const auto kraus = embed(povm.sqrt_element(k), labels, rho.factorization());
  auto post = kraus * rho.matrix() * kraus.adjoint();
  post *= Complex(1.0 / probs[k]);
  return {k, DensityOperator::unchecked(std::move(post), rho.factorization())};
}

MeasurementResult<PureState> measure(const PureState& psi, std::uint8_t theta,
                                     const std::string& label, Rng& rng) {
  const std::string labels[] = {label};
  return measure(psi, Povm::bb84_basis(theta), labels, rng);
}

// ---------------------------------------------------------------------------
// Teleportation primitives

PureState bell_pair(std::string a, std::string b) {
  const double r = std::numbers::sqrt2 / 2.0;
  return PureState({r, 0.0, 0.0, r},
                   Factorization({{std::move(a), 2}, {std::move(b), 2}}));
}

PureState bell_basis_state(std::uint8_t a, std::uint8_t b, std::string first, std::string second) {
  if (a > 1 || b > 1) throw std::invalid_argument("bell_basis_state: a and b must be bits");
  ComplexMatrix u = ComplexMatrix::identity(2);
  if (a) u = gates::pauli_x() * u;
  if (b) u = gates::pauli_z() * u;
  const auto phi = bell_pair(first, second);
  const std::string labels[] = {first};
  return apply_local(phi, u, labels);
}

BellOutcome bell_measure(const PureState& psi, const std::string& first,
                         const std::string& second, Rng& rng) {
  const auto& fac = psi.factorization();
  for (const auto& l : {first, second})
    if (fac.parts()[fac.index_of(l)].dim != 2)
      throw std::invalid_argument("bell_measure: '" + l + "' is not a qubit");
  const std::string measured[] = {first, second};
  const auto moved = permute(psi, front_order(fac, measured));
  const std::size_t dr = psi.dim() / 4;
  const auto& amps = moved.amplitudes();

  std::vector<ComplexVector> remainders;
  std::vector<double> probs;
  for (std::uint8_t a = 0; a < 2; ++a)
    for (std::uint8_t b = 0; b < 2; ++b) {
      const auto beta = bell_basis_state(a, b).amplitudes();
      ComplexVector rem(dr);
      for (std::size_t s = 0; s < 4; ++s)
        for (std::size_t r = 0; r < dr; ++r) rem[r] += std::conj(beta[s]) * amps[s * dr + r];
      const double nrm = norm(rem);
      probs.push_back(nrm * nrm);
      remainders.push_back(std::move(rem));
    }
  const std::size_t k = rng.sample(probs);
  auto rem = std::move(remainders[k]);
  const double nrm = std::sqrt(probs[k]);
  for (auto& z : rem) z /= nrm;
  return {static_cast<std::uint8_t>(k >> 1), static_cast<std::uint8_t>(k & 1),
          PureState(std::move(rem), fac.without(measured))};
}

PureState pauli_correct(const PureState& psi, const std::string& label, std::uint8_t a,
                        std::uint8_t b) {
  ComplexMatrix u = ComplexMatrix::identity(2);
  if (a) u = gates::pauli_x() * u;
  if (b) u = gates::pauli_z() * u;
  const std::string labels[] = {label};
  return apply_local(psi, u, labels);
}

}  // namespace qpvlab
