#include "qpvlab/adversaries.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qpvlab {

namespace {

const Povm& breidbart_povm() {
  static const Povm p = Povm::breidbart();
  return p;
}

const Povm& bb84_povm(std::uint8_t theta) {
  static const Povm p0 = Povm::bb84_basis(0);
  static const Povm p1 = Povm::bb84_basis(1);
  return theta ? p1 : p0;
}

const Povm& bell_povm() {
  static const Povm p = Povm::bell();
  return p;
}

ClassicalMessage with(std::string key, Bits bits) {
  return ClassicalMessage(std::move(key), std::move(bits));
}

}  // namespace

PhaseOne BreidbartStrategy::phase1_m1(LocalLab& lab, std::span<const std::string> qubits,
                                      std::span<const std::string>, Rng& rng) const {
  Bits x(qubits.size());
  for (std::size_t i = 0; i < qubits.size(); ++i)
    x[i] = static_cast<std::uint8_t>(lab.measure(qubits[i], breidbart_povm(), rng));
  auto c1 = with("x", std::move(x));
  return {c1, {std::move(c1), {}}};
}

PhaseOne BreidbartStrategy::phase1_m2(LocalLab&, const Bits& theta, std::span<const std::string>,
                                      Rng&) const {
  auto c2 = with("theta", theta);
  return {c2, {std::move(c2), {}}};
}

PhaseTwo BreidbartStrategy::phase2_m1(LocalLab&, const ClassicalMessage&, const Memory& memory,
                                      Rng&) const {
  return {memory.classical.at("x"), {}};
}

PhaseTwo BreidbartStrategy::phase2_m2(LocalLab&, const ClassicalMessage& from_m1, const Memory&,
                                      Rng&) const {
  return {from_m1.at("x"), {}};
}

PhaseOne BasisGuessStrategy::phase1_m1(LocalLab& lab, std::span<const std::string> qubits,
                                       std::span<const std::string>, Rng& rng) const {
  Bits x(qubits.size());
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    const std::uint8_t guess = rng.bit();
    x[i] = static_cast<std::uint8_t>(lab.measure(qubits[i], bb84_povm(guess), rng));
  }
  auto c1 = with("x", std::move(x));
  return {c1, {std::move(c1), {}}};
}

// ---------------------------------------------------------------------------

PhaseOne TeleportStrategy::phase1_m1(LocalLab& lab, std::span<const std::string> qubits,
                                     std::span<const std::string> resource, Rng& rng) const {
  if (k_ > qubits.size()) throw std::invalid_argument("teleport: more ebits than qubits");
  if (k_ > resource.size())
    throw std::invalid_argument("teleport: resource provides fewer than k pairs");
  Bits x(qubits.size(), 0);
  Bits a(k_), b(k_);
  for (std::size_t i = 0; i < k_; ++i) {
    const std::vector<std::string> pair{qubits[i], resource[i]};
    const std::size_t outcome = lab.measure(pair, bell_povm(), rng);
    a[i] = static_cast<std::uint8_t>(outcome >> 1);
    b[i] = static_cast<std::uint8_t>(outcome & 1);
  }
  for (std::size_t i = k_; i < qubits.size(); ++i)
    x[i] = static_cast<std::uint8_t>(lab.measure(qubits[i], breidbart_povm(), rng));
  ClassicalMessage c1 = with("x", std::move(x));
  if (k_ > 0) {
    c1.set("a", std::move(a));
    c1.set("b", std::move(b));
  }
  return {c1, {std::move(c1), {}}};
}

PhaseOne TeleportStrategy::phase1_m2(LocalLab& lab, const Bits& theta,
                                     std::span<const std::string> resource, Rng& rng) const {
  if (k_ > theta.size()) throw std::invalid_argument("teleport: more ebits than qubits");
  if (k_ > resource.size())
    throw std::invalid_argument("teleport: resource provides fewer than k pairs");
  ClassicalMessage c2 = with("theta", theta);
  if (k_ > 0) {
    Bits m(k_);
    for (std::size_t i = 0; i < k_; ++i)
      m[i] = static_cast<std::uint8_t>(lab.measure(resource[i], bb84_povm(theta[i]), rng));
    c2.set("m", std::move(m));
  }
  return {c2, {std::move(c2), {}}};
}

namespace {

Bits teleport_answer(const ClassicalMessage& c1, const ClassicalMessage& c2, std::size_t k) {
  Bits x = c1.at("x");
  if (k == 0) return x;
  const Bits& theta = c2.at("theta");
  const Bits& m = c2.at("m");
  const Bits& a = c1.at("a");
  const Bits& b = c1.at("b");
  for (std::size_t i = 0; i < k; ++i) x[i] = m[i] ^ (theta[i] ? b[i] : a[i]);
  return x;
}

}  // namespace

PhaseTwo TeleportStrategy::phase2_m1(LocalLab&, const ClassicalMessage& from_m2,
                                     const Memory& memory, Rng&) const {
  return {teleport_answer(memory.classical, from_m2, k_), {}};
}

PhaseTwo TeleportStrategy::phase2_m2(LocalLab&, const ClassicalMessage& from_m1,
                                     const Memory& memory, Rng&) const {
  return {teleport_answer(from_m1, memory.classical, k_), {}};
}

// ---------------------------------------------------------------------------

PhaseOne GuessIndependentStrategy::phase1_m1(LocalLab&, std::span<const std::string> qubits,
                                             std::span<const std::string>, Rng&) const {
  return {ClassicalMessage{}, {ClassicalMessage{}, {qubits.begin(), qubits.end()}}};
}

PhaseOne GuessIndependentStrategy::phase1_m2(LocalLab&, const Bits& theta,
                                             std::span<const std::string>, Rng&) const {
  return {ClassicalMessage{}, {with("n", Bits(theta.size())), {}}};
}

PhaseTwo GuessIndependentStrategy::phase2_m1(LocalLab&, const ClassicalMessage&,
                                             const Memory& memory, Rng& rng) const {
  return {rng.bits(memory.quantum.size()), {}};
}

PhaseTwo GuessIndependentStrategy::phase2_m2(LocalLab&, const ClassicalMessage&,
                                             const Memory& memory, Rng& rng) const {
  return {rng.bits(memory.classical.at("n").size()), {}};
}

PhaseOne GuessSharedStrategy::phase1_m1(LocalLab&, std::span<const std::string> qubits,
                                        std::span<const std::string>, Rng& rng) const {
  auto c1 = with("x", rng.bits(qubits.size()));
  return {c1, {std::move(c1), {}}};
}

PhaseTwo GuessSharedStrategy::phase2_m1(LocalLab&, const ClassicalMessage&, const Memory& memory,
                                        Rng&) const {
  return {memory.classical.at("x"), {}};
}

PhaseTwo GuessSharedStrategy::phase2_m2(LocalLab&, const ClassicalMessage& from_m1, const Memory&,
                                        Rng&) const {
  return {from_m1.at("x"), {}};
}

// ---------------------------------------------------------------------------

std::vector<std::string> strategy_names() {
  return {"breidbart", "basis-guess", "teleport", "guess-independent", "guess-shared"};
}

std::unique_ptr<Strategy> make_strategy(const std::string& name, std::size_t ebits) {
  if (name == "breidbart") return std::make_unique<BreidbartStrategy>();
  if (name == "basis-guess") return std::make_unique<BasisGuessStrategy>();
  if (name == "teleport") return std::make_unique<TeleportStrategy>(ebits);
  if (name == "guess-independent") return std::make_unique<GuessIndependentStrategy>();
  if (name == "guess-shared") return std::make_unique<GuessSharedStrategy>();
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

double predicted_acceptance(const std::string& name, std::size_t n, std::size_t ebits) {
  const double nd = static_cast<double>(n);
  const double c2 = std::pow(std::cos(std::numbers::pi / 8.0), 2);
  if (name == "breidbart") return std::pow(c2, nd);
  if (name == "basis-guess") return std::pow(0.75, nd);
  if (name == "teleport") {
    if (ebits > n) throw std::invalid_argument("teleport: more ebits than qubits");
    return std::pow(c2, static_cast<double>(n - ebits));
  }
  if (name == "guess-independent") return std::pow(0.25, nd);
  if (name == "guess-shared") return std::pow(0.5, nd);
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

}  // namespace qpvlab
