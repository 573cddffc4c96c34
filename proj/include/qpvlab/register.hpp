#pragma once

#include <span>
#include <string>
#include <vector>

#include "qpvlab/quantum.hpp"

namespace qpvlab {

/// Collection of independent quantum blocks addressed by subsystem label.
///
/// Blocks are merged only when an operation spans them, so transversal
/// protocols stay at a few qubits per block. Measured subsystems are traced
/// out after the outcome is drawn.
class QuantumRegister {
 public:
  static constexpr std::size_t kMaxBlockDim = 256;

  void add(DensityOperator block);
  void add(const PureState& block) { add(DensityOperator(block)); }

  bool contains(const std::string& label) const;
  std::vector<std::string> labels() const;
  std::size_t block_count() const { return blocks_.size(); }

  /// Joint marginal of `labels` (in that order).
  DensityOperator state_of(std::span<const std::string> labels) const;

  /// Applies `povm` to `labels`, samples by the Born rule and discards the
  /// measured subsystems. Returns the outcome index.
  std::size_t measure_and_discard(std::span<const std::string> labels, const Povm& povm, Rng& rng);

 private:
  std::size_t block_index(const std::string& label) const;
  /// Merges the blocks holding `labels` into one; returns its index.
  std::size_t merge(std::span<const std::string> labels);

  std::vector<DensityOperator> blocks_;
};

}  // namespace qpvlab
