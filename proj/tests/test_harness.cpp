#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "qpvlab/bounds.hpp"
#include "qpvlab/errors.hpp"
#include "qpvlab/harness.hpp"

using namespace qpvlab;

namespace {

ExperimentConfig attack(std::string strategy, std::size_t n, std::uint64_t trials, std::size_t ebits = 0) {
  ExperimentConfig c;
  c.n = n;
  c.strategy = std::move(strategy);
  c.ebits = ebits;
  c.resource = ResourceSpec::max_entangled(ebits);
  c.trials = trials;
  c.seed = 2024;
  return c;
}

}  // namespace

TEST_CASE("Wilson interval") {
  const auto all = wilson_interval(1000, 1000);
  CHECK(all.hi == 1.0);
  CHECK(all.lo == doctest::Approx(0.996173).epsilon(1e-5));
  const auto half = wilson_interval(50, 100);
  CHECK(half.lo == doctest::Approx(0.403831).epsilon(1e-5));
  CHECK(half.hi == doctest::Approx(0.596169).epsilon(1e-5));
  for (std::uint64_t s = 0; s <= 20; ++s) {
    const auto ci = wilson_interval(s, 20);
    CHECK(ci.lo <= s / 20.0);
    CHECK(ci.hi >= s / 20.0);
    CHECK(ci.lo >= 0.0);
    CHECK(ci.hi <= 1.0);
  }
  CHECK_THROWS_AS(wilson_interval(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(wilson_interval(3, 2), std::invalid_argument);
}

TEST_CASE("teleport with k = n in 1000 trials") {
  const auto row = monte_carlo(attack("teleport", 3, 1000, 3));
  CHECK(row.p_hat == 1.0);
  CHECK(row.ci_lo >= 0.996);
  CHECK(row.ci_hi == 1.0);
  CHECK(row.emax_upper == doctest::Approx(3.0));
}

TEST_CASE("shared and independent guessing baselines differ") {
  const auto indep = monte_carlo(attack("guess-independent", 1, 100000));
  const auto shared = monte_carlo(attack("guess-shared", 1, 100000));
  CHECK(indep.ci_lo <= 0.25);
  CHECK(indep.ci_hi >= 0.25);
  CHECK(shared.ci_lo <= 0.5);
  CHECK(shared.ci_hi >= 0.5);
}

TEST_CASE("results do not depend on the thread count") {
  auto c = attack("breidbart", 2, 5000);
  c.threads = 1;
  const auto serial = monte_carlo(c);
  c.threads = 7;
  const auto parallel = monte_carlo(c);
  CHECK(serial == parallel);
  c.seed = 2025;
  CHECK_FALSE(monte_carlo(c) == serial);
}

TEST_CASE("config validation") {
  auto c = attack("breidbart", 2, 0);
  CHECK_THROWS_AS(monte_carlo(c), std::invalid_argument);
  c = attack("teleport", 2, 10, 3);
  CHECK_THROWS_AS(monte_carlo(c), std::invalid_argument);
  c = attack("nope", 2, 10);
  CHECK_THROWS_AS(monte_carlo(c), std::invalid_argument);
  c = attack("breidbart", 2, 10);
  c.epsilon = 0.0;
  CHECK_THROWS_AS(monte_carlo(c), DomainError);
  c = attack("breidbart", 2, 10);
  c.geometry = Geometry::unit();
  CHECK_THROWS_AS(monte_carlo(c), std::invalid_argument);
}

TEST_CASE("honest runs") {
  ExperimentConfig c;
  c.geometry = Geometry::unit();
  c.n = 5;
  c.trials = 200;
  CHECK(monte_carlo(c).p_hat == 1.0);
  c.protocol = ProtocolKind::Wse;
  CHECK(monte_carlo(c).p_hat == 1.0);
  c.geometry.actual["P"] = 1.1;
  c.protocol = ProtocolKind::Qpv;
  CHECK(monte_carlo(c).p_hat == 0.0);
}

TEST_CASE("bound columns") {
  EstimateRow row;
  row.n = 1000;
  fill_bounds(row, 0.0, 0x1p-20);
  const auto fx = oracle::load_fixture("threshold_n1000_eps2m20.json");
  CHECK(row.threshold_exact == doctest::Approx(oracle::fixture_number(fx["threshold_exact"])));
  CHECK(row.threshold_ratio == doctest::Approx(row.threshold_exact / row.tfkw_bound));
  CHECK(row.eps_star < 1e-30);
  CHECK(*epsilon_threshold(1000, row.eps_star).threshold_exact == doctest::Approx(0.0).epsilon(1e-6));
  EstimateRow empty;
  fill_bounds(empty, 0.0, 0x1p-20);
  CHECK(std::isnan(empty.threshold_exact));
  CHECK(empty.eps_star == 1.0);
}

TEST_CASE("consistency check") {
  EstimateRow row;
  row.strategy = "breidbart";
  row.eps_star = 0.1;
  row.p_hat = 0.5;
  row.ci_lo = 0.45;
  row.ci_hi = 0.55;
  CHECK_FALSE(row.consistent());
  row.eps_star = 0.4;
  CHECK(row.consistent());
  row.strategy = "honest";
  row.eps_star = 0.0;
  CHECK(row.consistent());
}

TEST_CASE("empty grid gives a header-only CSV") {
  std::ostringstream out;
  const auto rows = sweep(SweepGrid{}, out);
  CHECK(rows.empty());
  CHECK(out.str() == csv_header() + "\n");
  CHECK(csv_header().rfind("n,k,strategy,trials,successes,p_hat,ci_lo,ci_hi,emax_upper,eps_star,"
                           "threshold_exact,threshold_stringent,tfkw_bound", 0) == 0);
}

TEST_CASE("CSV round trip") {
  SweepGrid g;
  g.n = {0, 2, 8};
  g.k = {0, 2};
  g.epsilon = {0x1p-20, 0.01};
  g.strategy = {"breidbart", "teleport", "guess-shared"};
  g.trials = 200;
  std::ostringstream out;
  const auto rows = sweep(g, out);
  CHECK(rows.size() == 36);
  const auto back = parse_csv(out.str());
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(back[i] == rows[i]);
  CHECK_THROWS_AS(parse_csv("bad header\n"), std::invalid_argument);
}

TEST_CASE("sweep output is byte-identical for identical seeds") {
  SweepGrid g;
  g.n = {4};
  g.k = {0, 1};
  g.epsilon = {0x1p-20};
  g.strategy = {"basis-guess", "teleport"};
  g.trials = 300;
  std::ostringstream a, b;
  sweep(g, a);
  g.threads = 3;
  sweep(g, b);
  CHECK(a.str() == b.str());
}

TEST_CASE("sweep ratio column at the headline grid") {
  const auto fx = oracle::load_fixture("threshold_n1000_eps2m20.json");
  SweepGrid g;
  g.n = {256, 1024, 4096};
  g.k = {0};
  g.epsilon = {0x1p-20};
  g.strategy = {"breidbart"};
  g.trials = 10;
  std::ostringstream out;
  const auto rows = sweep(g, out);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows)
    CHECK(r.threshold_ratio ==
          doctest::Approx(oracle::fixture_number(fx["ratio"][std::to_string(r.n)])).epsilon(1e-10));
  CHECK(rows[0].threshold_ratio < rows[1].threshold_ratio);
  CHECK(rows[1].threshold_ratio < rows[2].threshold_ratio);
}

TEST_CASE("estimate JSON") {
  const auto j = to_json(monte_carlo(attack("breidbart", 1, 100)));
  CHECK(j["strategy"] == "breidbart");
  CHECK(j["trials"] == 100);
  CHECK(j["consistent"] == true);
}
