#include "qpvlab/strategy.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qpvlab/errors.hpp"

namespace qpvlab {

bool LocalLab::owns(const std::string& label) const {
  const auto it = owners_.find(label);
  return it != owners_.end() && it->second == party_;
}

std::size_t LocalLab::measure(std::span<const std::string> labels, const Povm& povm, Rng& rng) {
  for (const auto& l : labels)
    if (!owns(l)) throw ProtocolViolation(party_ + " does not hold subsystem '" + l + "'");
  const std::size_t k = reg_.measure_and_discard(labels, povm, rng);
  for (const auto& l : labels) owners_.erase(l);
  return k;
}

std::size_t LocalLab::measure(const std::string& label, const Povm& povm, Rng& rng) {
  return measure(std::span<const std::string>(&label, 1), povm, rng);
}

// ---------------------------------------------------------------------------

ResourceSpec ResourceSpec::none() { return {}; }

ResourceSpec ResourceSpec::max_entangled(std::size_t k) {
  ResourceSpec r;
  r.kind = k == 0 ? Kind::None : Kind::MaxEntangledPairs;
  r.pairs = k;
  return r;
}

ResourceSpec ResourceSpec::pure_schmidt(std::size_t k, std::vector<double> coefficients) {
  ResourceSpec r;
  r.kind = Kind::PureSchmidt;
  r.pairs = k;
  r.schmidt = std::move(coefficients);
  r.validate();
  return r;
}

ResourceSpec ResourceSpec::isotropic(std::size_t k, double visibility) {
  ResourceSpec r;
  r.kind = Kind::Isotropic;
  r.pairs = k;
  r.visibility = visibility;
  r.validate();
  return r;
}

void ResourceSpec::validate() const {
  if (kind == Kind::None && pairs != 0) throw std::invalid_argument("resource 'none' has no pairs");
  if (kind == Kind::PureSchmidt) {
    if (schmidt.size() != 2) throw std::invalid_argument("pure-schmidt pairs need two coefficients");
    if (schmidt[0] < 0.0 || schmidt[1] < 0.0 || std::abs(schmidt[0] + schmidt[1] - 1.0) > kTolerance)
      throw std::invalid_argument("Schmidt coefficients must be nonnegative and sum to 1");
  }
  if (kind == Kind::Isotropic && !(visibility >= 0.0 && visibility <= 1.0))
    throw std::invalid_argument("isotropic visibility must lie in [0, 1]");
}

std::string ResourceSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind != Kind::None) os << "(k=" << pairs;
  if (kind == Kind::PureSchmidt) os << ";" << schmidt[0] << "," << schmidt[1];
  if (kind == Kind::Isotropic) os << ";v=" << visibility;
  if (kind != Kind::None) os << ")";
  return os.str();
}

std::vector<std::string> ResourceSpec::m1_labels() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < pairs; ++i) out.push_back("m1_" + std::to_string(i));
  return out;
}

std::vector<std::string> ResourceSpec::m2_labels() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < pairs; ++i) out.push_back("m2_" + std::to_string(i));
  return out;
}

namespace {

Factorization pair_factorization(std::size_t i) {
  const std::vector<std::string> l{"m1_" + std::to_string(i), "m2_" + std::to_string(i)};
  return Factorization::qubits(l);
}

ComplexVector phi_plus_unnormalized() { return {1.0, 0.0, 0.0, 1.0}; }

DensityOperator qubit_state(const ComplexVector& v, const std::string& label) {
  return DensityOperator::unchecked(ComplexMatrix::outer(v, v), Factorization::single(label));
}

}  // namespace

DensityOperator ResourceSpec::pair_state(std::size_t i) const {
  validate();
  if (i >= pairs) throw std::out_of_range("resource pair index out of range");
  const auto fac = pair_factorization(i);
  switch (kind) {
    case Kind::MaxEntangledPairs: {
      const double r = 1.0 / std::sqrt(2.0);
      return DensityOperator(PureState({r, 0.0, 0.0, r}, fac));
    }
    case Kind::PureSchmidt:
      return DensityOperator(
          PureState({std::sqrt(schmidt[0]), 0.0, 0.0, std::sqrt(schmidt[1])}, fac));
    case Kind::Isotropic: {
      const auto phi = phi_plus_unnormalized();
      ComplexMatrix m = ComplexMatrix::outer(phi, phi) * Complex(visibility / 2.0) +
                        ComplexMatrix::identity(4) * Complex((1.0 - visibility) / 4.0);
      return DensityOperator::unchecked(std::move(m), fac);
    }
    case Kind::None: break;
  }
  throw std::logic_error("pair_state on an empty resource");
}

void ResourceSpec::install(QuantumRegister& reg) const {
  for (std::size_t i = 0; i < pairs; ++i) reg.add(pair_state(i));
}

DensityOperator ResourceSpec::realize() const {
  if (pairs == 0) throw std::invalid_argument("realize: empty resource");
  if (pairs > 4) throw std::invalid_argument("realize: at most 4 pairs can be formed explicitly");
  DensityOperator rho = pair_state(0);
  for (std::size_t i = 1; i < pairs; ++i) rho = tensor(rho, pair_state(i));
  std::vector<std::string> order = m1_labels();
  for (const auto& l : m2_labels()) order.push_back(l);
  return permute(rho, order);
}

const char* to_string(ResourceSpec::Kind kind) {
  switch (kind) {
    case ResourceSpec::Kind::None: return "none";
    case ResourceSpec::Kind::MaxEntangledPairs: return "max-entangled";
    case ResourceSpec::Kind::PureSchmidt: return "pure-schmidt";
    case ResourceSpec::Kind::Isotropic: return "isotropic";
  }
  return "unknown";
}

ResourceSpec::Kind resource_kind_from_string(const std::string& name) {
  for (auto k : {ResourceSpec::Kind::None, ResourceSpec::Kind::MaxEntangledPairs,
                 ResourceSpec::Kind::PureSchmidt, ResourceSpec::Kind::Isotropic})
    if (name == to_string(k)) return k;
  throw std::invalid_argument("unknown resource kind '" + name + "'");
}

PairWitnesses pair_witnesses(const ResourceSpec& spec, std::size_t i) {
  const auto fac = pair_factorization(i);
  const std::string a = fac.parts()[0].label;
  const std::string b = fac.parts()[1].label;
  const auto phi = phi_plus_unnormalized();
  // Y = |phi><phi| with phi = |00> + |11>: tr_A Y = I.
  HminDualWitness dual{ComplexMatrix::outer(phi, phi), fac, {b}};

  const ComplexVector zero{1.0, 0.0};
  const ComplexVector one{0.0, 1.0};
  SeparableMixture sigma;
  const auto diagonal = [&](double w0, double w1) {
    sigma.terms.push_back({w0, qubit_state(zero, a), qubit_state(zero, b)});
    sigma.terms.push_back({w1, qubit_state(one, a), qubit_state(one, b)});
  };

  switch (spec.kind) {
    case ResourceSpec::Kind::MaxEntangledPairs:
      diagonal(0.5, 0.5);
      break;
    case ResourceSpec::Kind::PureSchmidt: {
      // Schmidt basis is computational; sigma weights proportional to sqrt(lambda_i).
      const double r0 = std::sqrt(spec.schmidt[0]);
      const double r1 = std::sqrt(spec.schmidt[1]);
      if (r1 == 0.0) {
        sigma.terms.push_back({1.0, qubit_state(zero, a), qubit_state(zero, b)});
      } else if (r0 == 0.0) {
        sigma.terms.push_back({1.0, qubit_state(one, a), qubit_state(one, b)});
      } else {
        diagonal(r0 / (r0 + r1), r1 / (r0 + r1));
      }
      break;
    }
    case ResourceSpec::Kind::Isotropic: {
      // Octahedron states psi (x) conj(psi) average to Phi+/3 + I/6.
      const double r = 1.0 / std::sqrt(2.0);
      const std::vector<ComplexVector> six{
          zero, one, {r, r}, {r, -r}, {r, Complex(0.0, r)}, {r, Complex(0.0, -r)}};
      const double v = spec.visibility;
      const double six_weight = v >= 1.0 / 3.0 ? 1.0 / 6.0 : v / 2.0;
      for (const auto& psi : six) {
        ComplexVector conj_psi{std::conj(psi[0]), std::conj(psi[1])};
        sigma.terms.push_back({six_weight, qubit_state(psi, a), qubit_state(conj_psi, b)});
      }
      if (v < 1.0 / 3.0) {
        const double w = (1.0 - 3.0 * v) / 4.0;
        for (const auto& x : {zero, one})
          for (const auto& y : {zero, one})
            sigma.terms.push_back({w, qubit_state(x, a), qubit_state(y, b)});
      }
      break;
    }
    case ResourceSpec::Kind::None:
      throw std::invalid_argument("pair_witnesses: empty resource");
  }
  return {std::move(dual), std::move(sigma)};
}

ResourceEmax resource_emax(const ResourceSpec& spec) {
  spec.validate();
  ResourceEmax out;
  if (spec.kind == ResourceSpec::Kind::None || spec.pairs == 0) {
    out.certified = true;
    return out;
  }
  const auto w = pair_witnesses(spec, 0);
  auto sandwich = emax_sandwich(spec.pair_state(0), w.dual, w.separable);
  const double k = static_cast<double>(spec.pairs);
  out.lower = std::max(0.0, k * sandwich.lower);
  out.upper = std::max(0.0, k * sandwich.upper);
  out.certified = sandwich.lower_certificate.verified && sandwich.upper_certificate.verified;
  out.per_pair = std::move(sandwich);
  return out;
}

nlohmann::json to_json(const ResourceEmax& r) {
  nlohmann::json j;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  j["certified"] = r.certified;
  if (r.per_pair) {
    j["per_pair"] = {{"lower", r.per_pair->lower},
                     {"upper", r.per_pair->upper},
                     {"lower_certificate", to_json(r.per_pair->lower_certificate)},
                     {"upper_certificate", to_json(r.per_pair->upper_certificate)}};
  }
  return j;
}

}  // namespace qpvlab
