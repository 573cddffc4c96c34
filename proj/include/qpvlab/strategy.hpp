#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpvlab/entropy.hpp"
#include "qpvlab/register.hpp"
#include "qpvlab/spacetime.hpp"

namespace qpvlab {

/// A party's view of the shared quantum register: it may only touch
/// subsystems it currently holds. Ownership moves with quantum messages.
class LocalLab {
 public:
  LocalLab(std::string party, QuantumRegister& reg, std::map<std::string, std::string>& owners)
      : party_(std::move(party)), reg_(reg), owners_(owners) {}

  const std::string& party() const { return party_; }
  bool owns(const std::string& label) const;
  /// Measures and discards `labels`; ProtocolViolation if any is held elsewhere.
  std::size_t measure(std::span<const std::string> labels, const Povm& povm, Rng& rng);
  std::size_t measure(const std::string& label, const Povm& povm, Rng& rng);

 private:
  std::string party_;
  QuantumRegister& reg_;
  std::map<std::string, std::string>& owners_;
};

/// What a cheater keeps between the two phases.
struct Memory {
  ClassicalMessage classical;
  std::vector<std::string> quantum;  // labels still held
};

struct PhaseOne {
  Payload message;  // C1 or C2; must be classical
  Memory memory;
};

struct PhaseTwo {
  Bits guess;
  /// Any further message to the other cheater. Built-in strategies never
  /// set this; the engine's budget rejects it.
  std::optional<Payload> follow_up;
};

/// Cheating coalition M1 (near V1) and M2 (near V2) in the noisy-entanglement
/// model: a pre-shared resource, one classical message each way, no quantum
/// channel between them.
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string name() const = 0;
  /// Entangled pairs the strategy consumes.
  virtual std::size_t required_pairs() const { return 0; }

  /// M1 has the n qubits from V1 (labels q0..q{n-1}) and its resource halves.
  virtual PhaseOne phase1_m1(LocalLab& lab, std::span<const std::string> qubits,
                             std::span<const std::string> resource, Rng& rng) const = 0;
  /// M2 has Theta^n from V2 and its resource halves.
  virtual PhaseOne phase1_m2(LocalLab& lab, const Bits& theta,
                             std::span<const std::string> resource, Rng& rng) const = 0;
  virtual PhaseTwo phase2_m1(LocalLab& lab, const ClassicalMessage& from_m2,
                             const Memory& memory, Rng& rng) const = 0;
  virtual PhaseTwo phase2_m2(LocalLab& lab, const ClassicalMessage& from_m1,
                             const Memory& memory, Rng& rng) const = 0;
};

/// Entangled state pre-shared between M1 and M2, as k identical two-qubit
/// pairs on (m1_i, m2_i).
struct ResourceSpec {
  enum class Kind { None, MaxEntangledPairs, PureSchmidt, Isotropic };

  Kind kind = Kind::None;
  std::size_t pairs = 0;
  std::vector<double> schmidt;  // squared coefficients (PureSchmidt)
  double visibility = 1.0;      // Isotropic: v Phi+ + (1 - v) I/4

  static ResourceSpec none();
  static ResourceSpec max_entangled(std::size_t k);
  static ResourceSpec pure_schmidt(std::size_t k, std::vector<double> coefficients);
  static ResourceSpec isotropic(std::size_t k, double visibility);

  void validate() const;
  std::string describe() const;
  /// State of pair i on (m1_i, m2_i).
  DensityOperator pair_state(std::size_t i) const;
  /// Adds all pairs to `reg` as independent blocks.
  void install(QuantumRegister& reg) const;
  /// Full state on (m1_0..m1_{k-1} : m2_0..m2_{k-1}); only for k <= 4.
  DensityOperator realize() const;

  std::vector<std::string> m1_labels() const;
  std::vector<std::string> m2_labels() const;
};

const char* to_string(ResourceSpec::Kind kind);
ResourceSpec::Kind resource_kind_from_string(const std::string& name);

struct PairWitnesses {
  HminDualWitness dual;
  SeparableMixture separable;
};

/// Lower and upper witnesses for one pair of `spec` on (m1_i, m2_i).
PairWitnesses pair_witnesses(const ResourceSpec& spec, std::size_t i);

struct ResourceEmax {
  double lower = 0.0;
  double upper = 0.0;
  bool certified = false;
  /// Certificates for one pair; totals are k times these.
  std::optional<EmaxSandwich> per_pair;
};

/// Certified E_max bounds for the whole resource, by additivity of both
/// witnesses over the k pairs. The lower bound is clamped at 0.
ResourceEmax resource_emax(const ResourceSpec& spec);

nlohmann::json to_json(const ResourceEmax& r);

}  // namespace qpvlab
