#include "qpvlab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qpvlab/adversaries.hpp"
#include "qpvlab/bounds.hpp"
#include "qpvlab/errors.hpp"

namespace qpvlab {

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("wilson_interval: no trials");
  if (successes > trials) throw std::invalid_argument("wilson_interval: successes exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // Clamp so the interval always contains p despite rounding.
  return {std::min(p, std::max(0.0, centre - half)), std::max(p, std::min(1.0, centre + half))};
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw std::invalid_argument("experiment needs at least one trial");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  resource.validate();
  if (protocol == ProtocolKind::Wse) {
    if (n < 1) throw std::invalid_argument("WSE needs n >= 1");
    if (strategy != "honest") throw std::invalid_argument("WSE runs the honest protocol only");
    return;
  }
  if (strategy == "honest") {
    geometry.validate();
    return;
  }
  geometry.validate_cheaters();
  const auto names = strategy_names();
  if (std::find(names.begin(), names.end(), strategy) == names.end())
    throw std::invalid_argument("unknown strategy '" + strategy + "'");
  if (strategy == "teleport" && ebits > n)
    throw std::invalid_argument("teleport: more ebits than qubits");
  if (strategy == "teleport" && ebits > resource.pairs)
    throw std::invalid_argument("teleport: resource provides fewer than k pairs");
}

bool EstimateRow::consistent() const {
  if (strategy == "honest") return true;
  return p_hat <= eps_star + 3.0 * half_width();
}

namespace {

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

bool trial_with(const ExperimentConfig& config, const Strategy* strategy, std::uint64_t trial) {
  Rng rng = Rng::for_trial(config.seed, trial);
  if (config.protocol == ProtocolKind::Wse) return run_wse_honest(config.n, rng).correct();
  if (!strategy) return run_qpv_honest(config.n, config.geometry, rng).accepted;
  return run_qpv_adversarial(config.n, config.geometry, *strategy, config.resource, rng).accepted;
}

std::unique_ptr<Strategy> strategy_for(const ExperimentConfig& config) {
  if (config.protocol == ProtocolKind::Wse || config.strategy == "honest") return nullptr;
  return make_strategy(config.strategy, config.ebits);
}

}  // namespace

bool run_trial(const ExperimentConfig& config, std::uint64_t trial) {
  config.validate();
  const auto strategy = strategy_for(config);
  return trial_with(config, strategy.get(), trial);
}

void fill_bounds(EstimateRow& row, double emax_upper, double epsilon) {
  const auto n = static_cast<std::int64_t>(row.n);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  row.emax_upper = emax_upper;
  row.epsilon = epsilon;
  if (n < 1) {
    row.eps_star = 1.0;
    row.threshold_exact = row.threshold_stringent = row.tfkw_bound = row.threshold_ratio = nan;
    return;
  }
  row.eps_star = eps_star(n, emax_upper);
  const auto report = epsilon_threshold(n, epsilon);
  row.threshold_exact = report.threshold_exact.value_or(nan);
  row.threshold_stringent = report.threshold_stringent.value_or(nan);
  row.tfkw_bound = report.tfkw_bound;
  row.threshold_ratio = row.threshold_exact / row.tfkw_bound;
}

EstimateRow monte_carlo(const ExperimentConfig& config) {
  config.validate();
  const auto strategy = strategy_for(config);

  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, config.trials));
  std::vector<std::uint64_t> counts(threads, 0);
  std::vector<std::exception_ptr> errors(threads);
  const auto work = [&](unsigned w) {
    try {
      const std::uint64_t begin = config.trials * w / threads;
      const std::uint64_t end = config.trials * (w + 1) / threads;
      for (std::uint64_t i = begin; i < end; ++i)
        if (trial_with(config, strategy.get(), i)) ++counts[w];
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  EstimateRow row;
  row.n = config.n;
  row.k = config.resource.pairs;
  row.strategy = config.protocol == ProtocolKind::Wse ? "honest" : config.strategy;
  row.trials = config.trials;
  for (auto c : counts) row.successes += c;
  row.p_hat = static_cast<double>(row.successes) / static_cast<double>(row.trials);
  const auto ci = wilson_interval(row.successes, row.trials);
  row.ci_lo = ci.lo;
  row.ci_hi = ci.hi;
  const auto emax = resource_emax(config.resource);
  if (!emax.certified) throw DomainError("resource E_max could not be certified");
  fill_bounds(row, emax.upper, config.epsilon);
  return row;
}

// ---------------------------------------------------------------------------

ResourceSpec grid_resource(const SweepGrid& grid, std::size_t k) {
  if (k == 0) return ResourceSpec::none();
  switch (grid.resource) {
    case ResourceSpec::Kind::None:
    case ResourceSpec::Kind::MaxEntangledPairs: return ResourceSpec::max_entangled(k);
    case ResourceSpec::Kind::PureSchmidt: return ResourceSpec::pure_schmidt(k, grid.schmidt);
    case ResourceSpec::Kind::Isotropic: return ResourceSpec::isotropic(k, grid.visibility);
  }
  return ResourceSpec::none();
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "n",           "k",       "strategy",        "trials",
      "successes",   "p_hat",   "ci_lo",           "ci_hi",
      "emax_upper",  "eps_star", "threshold_exact", "threshold_stringent",
      "tfkw_bound",  "epsilon", "threshold_ratio"};
  return cols;
}

std::string csv_header() {
  std::string s;
  for (const auto& c : csv_columns()) {
    if (!s.empty()) s += ',';
    s += c;
  }
  return s;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw std::invalid_argument("bad number in CSV: '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw std::invalid_argument("bad integer in CSV: '" + s + "'");
  return v;
}

}  // namespace

std::string csv_row(const EstimateRow& r) {
  std::string s = std::to_string(r.n) + ',' + std::to_string(r.k) + ',' + r.strategy + ',' +
                  std::to_string(r.trials) + ',' + std::to_string(r.successes);
  for (double v : {r.p_hat, r.ci_lo, r.ci_hi, r.emax_upper, r.eps_star, r.threshold_exact,
                   r.threshold_stringent, r.tfkw_bound, r.epsilon, r.threshold_ratio})
    s += ',' + num(v);
  return s;
}

std::vector<EstimateRow> sweep(const SweepGrid& grid, std::ostream& out) {
  out << csv_header() << '\n' << std::flush;
  std::vector<EstimateRow> rows;
  for (auto n : grid.n)
    for (auto k : grid.k)
      for (auto eps : grid.epsilon)
        for (const auto& name : grid.strategy) {
          ExperimentConfig config;
          config.n = n;
          config.strategy = name;
          config.resource = grid_resource(grid, k);
          config.ebits = name == "teleport" ? std::min(k, n) : 0;
          config.trials = grid.trials;
          config.seed = grid.seed;
          config.epsilon = eps;
          config.threads = grid.threads;
          auto row = monte_carlo(config);
          if (!row.consistent())
            throw BoundViolation("sweep: " + name + " at n=" + std::to_string(n) +
                                 ", k=" + std::to_string(k) + " has p_hat " + num(row.p_hat) +
                                 " above eps* " + num(row.eps_star) + " + 3 half-widths");
          out << csv_row(row) << '\n' << std::flush;
          rows.push_back(std::move(row));
        }
  return rows;
}

std::vector<EstimateRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != csv_header())
    throw std::invalid_argument("CSV header does not match");
  std::vector<EstimateRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != csv_columns().size())
      throw std::invalid_argument("CSV row has " + std::to_string(cells.size()) + " cells");
    EstimateRow r;
    r.n = parse_uint(cells[0]);
    r.k = parse_uint(cells[1]);
    r.strategy = cells[2];
    r.trials = parse_uint(cells[3]);
    r.successes = parse_uint(cells[4]);
    double* fields[] = {&r.p_hat,      &r.ci_lo,           &r.ci_hi,
                        &r.emax_upper, &r.eps_star,        &r.threshold_exact,
                        &r.threshold_stringent, &r.tfkw_bound, &r.epsilon,
                        &r.threshold_ratio};
    for (std::size_t i = 0; i < 10; ++i) *fields[i] = parse_double(cells[5 + i]);
    rows.push_back(std::move(r));
  }
  return rows;
}

bool operator==(const EstimateRow& a, const EstimateRow& b) {
  return a.n == b.n && a.k == b.k && a.strategy == b.strategy && a.trials == b.trials &&
         a.successes == b.successes && same(a.p_hat, b.p_hat) && same(a.ci_lo, b.ci_lo) &&
         same(a.ci_hi, b.ci_hi) && same(a.emax_upper, b.emax_upper) &&
         same(a.eps_star, b.eps_star) && same(a.threshold_exact, b.threshold_exact) &&
         same(a.threshold_stringent, b.threshold_stringent) && same(a.tfkw_bound, b.tfkw_bound) &&
         same(a.epsilon, b.epsilon) && same(a.threshold_ratio, b.threshold_ratio);
}

nlohmann::json to_json(const EstimateRow& r) {
  const auto num_or_null = [](double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
  };
  nlohmann::json j;
  j["n"] = r.n;
  j["k"] = r.k;
  j["strategy"] = r.strategy;
  j["trials"] = r.trials;
  j["successes"] = r.successes;
  j["p_hat"] = r.p_hat;
  j["ci_lo"] = r.ci_lo;
  j["ci_hi"] = r.ci_hi;
  j["emax_upper"] = r.emax_upper;
  j["eps_star"] = r.eps_star;
  j["threshold_exact"] = num_or_null(r.threshold_exact);
  j["threshold_stringent"] = num_or_null(r.threshold_stringent);
  j["tfkw_bound"] = num_or_null(r.tfkw_bound);
  j["epsilon"] = r.epsilon;
  j["threshold_ratio"] = num_or_null(r.threshold_ratio);
  j["consistent"] = r.consistent();
  return j;
}

}  // namespace qpvlab
