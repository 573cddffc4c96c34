#include "qpvlab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qpvlab/errors.hpp"

namespace qpvlab {

namespace {

constexpr double kSupportCutoff = 1e-12;    // eigenvalues of sigma treated as zero
constexpr double kOutsideSupport = 1e-10;   // rho mass outside supp(sigma) => +inf
constexpr double kDroppedSchmidt = 1e-15;

/// Reorders `x` to the label order of `target`; label sets must coincide.
DensityOperator align(const DensityOperator& x, const Factorization& target) {
  if (x.factorization() == target) return x;
  if (x.factorization().size() != target.size())
    throw std::invalid_argument("operands live on different subsystems");
  const auto order = target.labels();
  auto out = permute(x, order);
  if (out.factorization() != target) throw std::invalid_argument("subsystem dimensions differ");
  return out;
}

double trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  Complex acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * b(j, i);
  return acc.real();
}

double min_eigenvalue(const ComplexMatrix& m) {
  const auto values = eigvalsh(m);
  return values.empty() ? 0.0 : values.front();
}

bool same_label_set(std::vector<std::string> a, std::vector<std::string> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

}  // namespace

// ---------------------------------------------------------------------------

Ensemble::Ensemble(std::vector<double> probabilities, std::vector<DensityOperator> states)
    : probabilities_(std::move(probabilities)), states_(std::move(states)) {
  if (probabilities_.empty() || probabilities_.size() != states_.size())
    throw std::invalid_argument("Ensemble: need one probability per state");
  double total = 0.0;
  for (double p : probabilities_) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("Ensemble: probability out of [0,1]");
    total += p;
  }
  if (std::abs(total - 1.0) > kTolerance)
    throw std::invalid_argument("Ensemble: probabilities do not sum to 1");
  for (const auto& s : states_)
    if (s.dim() != states_.front().dim())
      throw std::invalid_argument("Ensemble: states of different dimension");
}

SchmidtDecomposition schmidt_decompose(const PureState& psi, std::span<const std::string> a_labels) {
  const auto& fac = psi.factorization();
  const Factorization a_fac = fac.select(a_labels);
  const Factorization b_fac = fac.without(a_labels);
  std::vector<std::string> order(a_labels.begin(), a_labels.end());
  for (const auto& l : b_fac.labels()) order.push_back(l);
  const auto moved = permute(psi, order);
  const std::size_t da = a_fac.total_dim();
  const std::size_t db = b_fac.total_dim();

  ComplexMatrix m(da, db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < db; ++j) m(i, j) = moved.amplitudes()[i * db + j];
  const auto eig = eigh(m * m.adjoint());

  SchmidtDecomposition out{{}, {}, {}, a_fac, b_fac};
  for (std::size_t k = da; k-- > 0;) {
    const double lambda = eig.values[k];
    if (lambda <= kDroppedSchmidt) continue;
    ComplexVector u = eig.vector(k);
    // b = M^T conj(u) / sqrt(lambda)
    ComplexVector b(db);
    for (std::size_t j = 0; j < db; ++j) {
      Complex acc = 0.0;
      for (std::size_t i = 0; i < da; ++i) acc += m(i, j) * std::conj(u[i]);
      b[j] = acc / std::sqrt(lambda);
    }
    out.coefficients.push_back(lambda);
    out.a_vectors.push_back(std::move(u));
    out.b_vectors.push_back(std::move(b));
  }
  const double total = std::accumulate(out.coefficients.begin(), out.coefficients.end(), 0.0);
  for (auto& c : out.coefficients) c /= total;
  return out;
}

std::string to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::HminUpperWitness: return "hmin-upper-witness";
    case CertificateKind::HminFeasiblePair: return "hmin-feasible-pair";
    case CertificateKind::PguessYkl: return "pguess-ykl";
    case CertificateKind::EmaxUpperWitness: return "emax-upper-witness";
  }
  return "unknown";
}

nlohmann::json to_json(const EntropyCertificate& cert) {
  nlohmann::json j;
  j["kind"] = to_string(cert.kind);
  j["value"] = std::isfinite(cert.value) ? nlohmann::json(cert.value) : nlohmann::json("inf");
  j["verified"] = cert.verified;
  j["tolerance"] = cert.tolerance;
  j["slack"] = cert.slack;
  nlohmann::json subsystems = nlohmann::json::array();
  for (const auto& s : cert.witness_factorization.parts())
    subsystems.push_back({{"label", s.label}, {"dim", s.dim}});
  j["witness_subsystems"] = subsystems;
  j["witness_dim"] = cert.witness.rows();
  // Small witnesses are embedded entrywise as [re, im] pairs.
  if (cert.witness.rows() > 0 && cert.witness.rows() <= 16) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < cert.witness.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t c = 0; c < cert.witness.cols(); ++c)
        row.push_back({cert.witness(r, c).real(), cert.witness(r, c).imag()});
      rows.push_back(row);
    }
    j["witness"] = rows;
  }
  return j;
}

double dmax(const DensityOperator& rho, const DensityOperator& sigma_in) {
  const DensityOperator sigma = align(sigma_in, rho.factorization());
  const auto eig = eigh(sigma.matrix());
  const std::size_t d = rho.dim();

  std::vector<std::size_t> support;
  for (std::size_t k = 0; k < d; ++k)
    if (eig.values[k] > kSupportCutoff) support.push_back(k);

  // W = V_s D^{-1/2}; M = W^dagger rho W restricted to the support.
  const std::size_t r = support.size();
  ComplexMatrix w(d, r);
  for (std::size_t c = 0; c < r; ++c) {
    const double scale = 1.0 / std::sqrt(eig.values[support[c]]);
    for (std::size_t i = 0; i < d; ++i) w(i, c) = eig.vectors(i, support[c]) * scale;
  }
  double inside = 0.0;
  for (std::size_t c = 0; c < r; ++c) {
    const auto v = eig.vector(support[c]);
    inside += inner(v, matvec(rho.matrix(), v)).real();
  }
  if (1.0 - inside > kOutsideSupport) return std::numeric_limits<double>::infinity();

  const ComplexMatrix m = w.adjoint() * rho.matrix() * w;
  const auto values = eigvalsh(m);
  return std::log2(values.back());
}

bool hmin_feasible(const DensityOperator& rho, double lambda, const DensityOperator& tau,
                   double tol) {
  const auto b_labels = tau.factorization().labels();
  const Factorization& fac = rho.factorization();
  if (fac.select(b_labels) != tau.factorization())
    throw std::invalid_argument("hmin_feasible: tau does not match rho's B subsystems");
  ComplexMatrix bound = embed(tau.matrix(), b_labels, fac);
  bound *= Complex(std::exp2(lambda));
  return psd_dominates(bound, rho.matrix(), tol);
}

HminDualWitness tensor(const HminDualWitness& a, const HminDualWitness& b) {
  HminDualWitness out{kron(a.y, b.y), a.factorization.concat(b.factorization), a.conditioning};
  out.conditioning.insert(out.conditioning.end(), b.conditioning.begin(), b.conditioning.end());
  return out;
}

EntropyCertificate certify_hmin_upper(const DensityOperator& rho, const HminDualWitness& witness,
                                      double tol) {
  EntropyCertificate cert;
  cert.kind = CertificateKind::HminUpperWitness;
  cert.tolerance = tol;
  cert.witness = witness.y;
  cert.witness_factorization = witness.factorization;
  if (!witness.y.is_hermitian(tol)) return cert;

  const auto y = align(DensityOperator::unchecked(witness.y, witness.factorization),
                       rho.factorization());
  const double y_min = min_eigenvalue(y.matrix());
  // I_B - tr_A Y >= 0
  const auto reduced = partial_trace(y, witness.conditioning);
  const ComplexMatrix gap = ComplexMatrix::identity(reduced.dim()) - reduced.matrix();
  const double gap_min = min_eigenvalue(gap);
  cert.slack = std::min(y_min, gap_min);
  cert.verified = cert.slack >= -tol;

  const double overlap = trace_product(rho.matrix(), y.matrix());
  cert.value = overlap > 0.0 ? -std::log2(overlap) : std::numeric_limits<double>::infinity();
  return cert;
}

PureStateWitnesses pure_state_witnesses(const PureState& psi, std::span<const std::string> a_labels) {
  const auto sd = schmidt_decompose(psi, a_labels);
  const Factorization joint = sd.a_factorization.concat(sd.b_factorization);

  ComplexVector phi(joint.total_dim());
  for (std::size_t i = 0; i < sd.rank(); ++i) {
    const auto ab = kron(sd.a_vectors[i], sd.b_vectors[i]);
    for (std::size_t k = 0; k < phi.size(); ++k) phi[k] += ab[k];
  }
  HminDualWitness dual{ComplexMatrix::outer(phi, phi), joint, sd.b_factorization.labels()};

  double root_sum = 0.0;
  for (double c : sd.coefficients) root_sum += std::sqrt(c);
  SeparableMixture sigma;
  for (std::size_t i = 0; i < sd.rank(); ++i) {
    sigma.terms.push_back({std::sqrt(sd.coefficients[i]) / root_sum,
                           DensityOperator::unchecked(ComplexMatrix::outer(sd.a_vectors[i], sd.a_vectors[i]),
                                                      sd.a_factorization),
                           DensityOperator::unchecked(ComplexMatrix::outer(sd.b_vectors[i], sd.b_vectors[i]),
                                                      sd.b_factorization)});
  }
  return {std::move(dual), std::move(sigma)};
}

HminPureResult hmin_pure(const PureState& psi, std::span<const std::string> a_labels, double tol) {
  auto sd = schmidt_decompose(psi, a_labels);
  double root_sum = 0.0;
  for (double c : sd.coefficients) root_sum += std::sqrt(c);
  const double lambda = 2.0 * std::log2(root_sum);

  ComplexMatrix tau_m(sd.b_factorization.total_dim(), sd.b_factorization.total_dim());
  for (std::size_t i = 0; i < sd.rank(); ++i)
    tau_m += ComplexMatrix::outer(sd.b_vectors[i], sd.b_vectors[i]) *
             Complex(std::sqrt(sd.coefficients[i]) / root_sum);
  DensityOperator tau = DensityOperator::unchecked(std::move(tau_m), sd.b_factorization);

  const DensityOperator rho(psi);
  EntropyCertificate feasible{CertificateKind::HminFeasiblePair, -lambda, tau.matrix(),
                              tau.factorization(), hmin_feasible(rho, lambda, tau, tol), tol};
  const auto witnesses = pure_state_witnesses(psi, a_labels);
  EntropyCertificate upper = certify_hmin_upper(rho, witnesses.dual, tol);
  return {-lambda, std::move(sd), std::move(tau), std::move(feasible), std::move(upper)};
}

PguessResult pguess(const Ensemble& ensemble, const Povm& candidate, double tol) {
  if (candidate.size() != ensemble.size())
    throw std::invalid_argument("pguess: POVM outcome count differs from ensemble size");
  if (candidate.dim() != ensemble.state(0).dim())
    throw std::invalid_argument("pguess: POVM dimension differs from the states");
  const std::size_t d = candidate.dim();
  double value = 0.0;
  ComplexMatrix gamma(d, d);
  for (std::size_t x = 0; x < ensemble.size(); ++x) {
    const ComplexMatrix weighted = ensemble.state(x).matrix() * Complex(ensemble.probability(x));
    value += trace_product(candidate.element(x), weighted);
    gamma += candidate.element(x) * weighted;
  }
  EntropyCertificate cert{CertificateKind::PguessYkl, value, gamma, ensemble.state(0).factorization(),
                          false, tol};
  if (gamma.is_hermitian(tol)) {
    ComplexMatrix herm = (gamma + gamma.adjoint()) * Complex(0.5);
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < ensemble.size(); ++x) {
      const ComplexMatrix weighted = ensemble.state(x).matrix() * Complex(ensemble.probability(x));
      slack = std::min(slack, min_eigenvalue(herm - weighted));
    }
    cert.slack = slack;
    cert.verified = slack >= -tol;
  }
  return {value, cert.verified, std::move(cert)};
}

double hmin_cq(const Ensemble& ensemble, const PguessResult& certified) {
  (void)ensemble;
  if (!certified.ykl_certified)
    throw DomainError("hmin_cq: guessing probability is not certified optimal");
  return -std::log2(certified.value);
}

void SeparableMixture::validate(double tol) const {
  if (terms.empty()) throw std::invalid_argument("SeparableMixture: no terms");
  double total = 0.0;
  for (const auto& t : terms) {
    if (t.weight < -tol) throw std::invalid_argument("SeparableMixture: negative weight");
    if (t.a.factorization() != a_factorization() || t.b.factorization() != b_factorization())
      throw std::invalid_argument("SeparableMixture: terms on different subsystems");
    total += t.weight;
  }
  if (std::abs(total - 1.0) > tol) throw std::invalid_argument("SeparableMixture: weights do not sum to 1");
}

DensityOperator realize(const SeparableMixture& mixture) {
  mixture.validate();
  const Factorization fac = mixture.a_factorization().concat(mixture.b_factorization());
  ComplexMatrix sum(fac.total_dim(), fac.total_dim());
  for (const auto& t : mixture.terms) sum += kron(t.a.matrix(), t.b.matrix()) * Complex(t.weight);
  return DensityOperator::unchecked(std::move(sum), fac);
}

SeparableMixture tensor(const SeparableMixture& x, const SeparableMixture& y) {
  SeparableMixture out;
  out.terms.reserve(x.terms.size() * y.terms.size());
  for (const auto& s : x.terms)
    for (const auto& t : y.terms)
      out.terms.push_back({s.weight * t.weight, tensor(s.a, t.a), tensor(s.b, t.b)});
  return out;
}

DominatingMarginal separable_dominating_marginal(const SeparableMixture& mixture, double tol) {
  mixture.validate(tol);
  const auto& b_fac = mixture.b_factorization();
  ComplexMatrix tau(b_fac.total_dim(), b_fac.total_dim());
  for (const auto& t : mixture.terms) tau += t.b.matrix() * Complex(t.weight);
  DensityOperator tau_op = DensityOperator::unchecked(std::move(tau), b_fac);
  const auto sigma = realize(mixture);
  const auto b_labels = b_fac.labels();
  const bool ok = psd_dominates(embed(tau_op.matrix(), b_labels, sigma.factorization()),
                                sigma.matrix(), tol);
  return {std::move(tau_op), ok};
}

EmaxSandwich emax_sandwich(const DensityOperator& rho, const HminDualWitness& lower_witness,
                           const SeparableMixture& upper_witness, double tol) {
  upper_witness.validate(tol);
  if (!same_label_set(lower_witness.conditioning, upper_witness.b_factorization().labels()))
    throw std::invalid_argument("emax_sandwich: witnesses use different cuts");

  auto lower_cert = certify_hmin_upper(rho, lower_witness, tol);
  if (!lower_cert.verified) throw DomainError("emax_sandwich: H_min witness failed verification");

  const auto sigma = align(realize(upper_witness), rho.factorization());
  const double upper = dmax(rho, sigma);
  EntropyCertificate upper_cert{CertificateKind::EmaxUpperWitness, upper, sigma.matrix(),
                                sigma.factorization(), false, tol};
  if (std::isfinite(upper)) {
    ComplexMatrix bound = sigma.matrix() * Complex(std::exp2(upper));
    upper_cert.slack = min_eigenvalue(bound - rho.matrix());
    upper_cert.verified = upper_cert.slack >= -tol;
  }
  if (!upper_cert.verified) throw DomainError("emax_sandwich: separable witness failed verification");
  return {-lower_cert.value, upper, std::move(lower_cert), std::move(upper_cert)};
}

}  // namespace qpvlab
