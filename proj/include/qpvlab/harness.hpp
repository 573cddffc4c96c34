#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpvlab/protocols.hpp"
#include "qpvlab/strategy.hpp"

namespace qpvlab {

/// 95% Wilson score interval.
struct Interval {
  double lo;
  double hi;
};

inline constexpr double kWilsonZ = 1.959963984540054;

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kWilsonZ);

enum class ProtocolKind { Wse, Qpv };

struct ExperimentConfig {
  ProtocolKind protocol = ProtocolKind::Qpv;
  std::size_t n = 1;
  /// Cheater layout for attacks; honest runs read actual["P"].
  Geometry geometry = Geometry::cheaters();
  /// "honest" or a name from strategy_names().
  std::string strategy = "honest";
  std::size_t ebits = 0;  // teleport only
  ResourceSpec resource;
  std::uint64_t trials = 1;
  std::uint64_t seed = 1;
  /// Epsilon at which the threshold columns are evaluated.
  double epsilon = 0x1p-20;
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned threads = 0;

  void validate() const;
};

struct EstimateRow {
  std::size_t n = 0;
  std::size_t k = 0;  // shared pairs
  std::string strategy;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double emax_upper = 0.0;
  double eps_star = 1.0;
  double threshold_exact = 0.0;
  double threshold_stringent = 0.0;
  double tfkw_bound = 0.0;
  double epsilon = 0.0;
  double threshold_ratio = 0.0;  // threshold_exact / tfkw_bound

  double half_width() const { return 0.5 * (ci_hi - ci_lo); }
  /// p_hat <= eps*(n, E_max upper) + 3 half-widths.
  bool consistent() const;

};

/// Field-wise equality; NaN cells compare equal.
bool operator==(const EstimateRow& a, const EstimateRow& b);

/// Success of a single trial: acceptance for QPV, honest correctness for WSE.
bool run_trial(const ExperimentConfig& config, std::uint64_t trial);

/// Runs config.trials independent trials. Trial i draws from
/// Rng::for_trial(seed, i), so the result does not depend on threading.
EstimateRow monte_carlo(const ExperimentConfig& config);

/// Bound columns for (n, E_max upper, epsilon).
void fill_bounds(EstimateRow& row, double emax_upper, double epsilon);

struct SweepGrid {
  std::vector<std::size_t> n;
  std::vector<std::size_t> k;
  std::vector<double> epsilon;
  std::vector<std::string> strategy;
  ResourceSpec::Kind resource = ResourceSpec::Kind::MaxEntangledPairs;
  std::vector<double> schmidt{0.5, 0.5};
  double visibility = 1.0;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// Resource with k pairs of the grid's kind (none when k = 0).
ResourceSpec grid_resource(const SweepGrid& grid, std::size_t k);

const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string csv_row(const EstimateRow& row);

/// Runs every (n, k, epsilon, strategy) cell and streams one CSV row per
/// cell to `out`, flushing after each. Teleport uses min(k, n) ebits. Every
/// row is checked against the bound before it is written; a violation
/// throws BoundViolation. Returns the rows.
std::vector<EstimateRow> sweep(const SweepGrid& grid, std::ostream& out);

/// Inverse of csv_header() + csv_row() lines.
std::vector<EstimateRow> parse_csv(const std::string& text);

nlohmann::json to_json(const EstimateRow& row);

}  // namespace qpvlab
