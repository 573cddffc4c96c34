#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qpvlab/strategy.hpp"

namespace qpvlab {

/// M1 measures every qubit in the Breidbart basis and broadcasts the
/// outcomes; M2 forwards Theta^n. Both answer M1's outcomes.
class BreidbartStrategy : public Strategy {
 public:
  std::string name() const override { return "breidbart"; }
  PhaseOne phase1_m1(LocalLab& lab, std::span<const std::string> qubits,
                     std::span<const std::string> resource, Rng& rng) const override;
  PhaseOne phase1_m2(LocalLab& lab, const Bits& theta, std::span<const std::string> resource,
                     Rng& rng) const override;
  PhaseTwo phase2_m1(LocalLab& lab, const ClassicalMessage& from_m2, const Memory& memory,
                     Rng& rng) const override;
  PhaseTwo phase2_m2(LocalLab& lab, const ClassicalMessage& from_m1, const Memory& memory,
                     Rng& rng) const override;
};

/// M1 guesses each basis uniformly, measures in it and broadcasts.
class BasisGuessStrategy : public BreidbartStrategy {
 public:
  std::string name() const override { return "basis-guess"; }
  PhaseOne phase1_m1(LocalLab& lab, std::span<const std::string> qubits,
                     std::span<const std::string> resource, Rng& rng) const override;
};

/// Teleports the first k qubits to M2 through k shared pairs; the rest are
/// handled as in the Breidbart attack.
///
/// M1 Bell-measures (q_i, m1_i) -> (a_i, b_i). M2 measures m2_i in theta_i -> m_i.
/// Both then output x_i = m_i xor (theta_i ? b_i : a_i).
class TeleportStrategy : public BreidbartStrategy {
 public:
  explicit TeleportStrategy(std::size_t k) : k_(k) {}

  std::string name() const override { return "teleport"; }
  std::size_t required_pairs() const override { return k_; }
  std::size_t ebits() const { return k_; }

  PhaseOne phase1_m1(LocalLab& lab, std::span<const std::string> qubits,
                     std::span<const std::string> resource, Rng& rng) const override;
  PhaseOne phase1_m2(LocalLab& lab, const Bits& theta, std::span<const std::string> resource,
                     Rng& rng) const override;
  PhaseTwo phase2_m1(LocalLab& lab, const ClassicalMessage& from_m2, const Memory& memory,
                     Rng& rng) const override;
  PhaseTwo phase2_m2(LocalLab& lab, const ClassicalMessage& from_m1, const Memory& memory,
                     Rng& rng) const override;

 private:
  std::size_t k_;
};

/// Baseline: M1 and M2 each output an independent uniform string.
class GuessIndependentStrategy : public Strategy {
 public:
  std::string name() const override { return "guess-independent"; }
  PhaseOne phase1_m1(LocalLab& lab, std::span<const std::string> qubits,
                     std::span<const std::string> resource, Rng& rng) const override;
  PhaseOne phase1_m2(LocalLab& lab, const Bits& theta, std::span<const std::string> resource,
                     Rng& rng) const override;
  PhaseTwo phase2_m1(LocalLab& lab, const ClassicalMessage& from_m2, const Memory& memory,
                     Rng& rng) const override;
  PhaseTwo phase2_m2(LocalLab& lab, const ClassicalMessage& from_m1, const Memory& memory,
                     Rng& rng) const override;
};

/// Baseline: M1 draws one uniform string and shares it, so both answers agree.
class GuessSharedStrategy : public GuessIndependentStrategy {
 public:
  std::string name() const override { return "guess-shared"; }
  PhaseOne phase1_m1(LocalLab& lab, std::span<const std::string> qubits,
                     std::span<const std::string> resource, Rng& rng) const override;
  PhaseTwo phase2_m1(LocalLab& lab, const ClassicalMessage& from_m2, const Memory& memory,
                     Rng& rng) const override;
  PhaseTwo phase2_m2(LocalLab& lab, const ClassicalMessage& from_m1, const Memory& memory,
                     Rng& rng) const override;
};

/// Names accepted by make_strategy.
std::vector<std::string> strategy_names();

/// `ebits` is used by "teleport" only.
std::unique_ptr<Strategy> make_strategy(const std::string& name, std::size_t ebits = 0);

/// Exact per-run acceptance probability of a built-in strategy on n qubits
/// with max-entangled resources (teleport) or none.
double predicted_acceptance(const std::string& name, std::size_t n, std::size_t ebits = 0);

}  // namespace qpvlab
