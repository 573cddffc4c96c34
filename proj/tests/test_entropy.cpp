#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qpvlab/entropy.hpp"
#include "qpvlab/errors.hpp"
#include "qpvlab/strategy.hpp"

using namespace qpvlab;

namespace {

PureState random_bipartite(std::size_t da, std::size_t db, Rng& rng) {
  return PureState(oracle::random_unit(da * db, rng), Factorization({{"A", da}, {"B", db}}));
}

const std::vector<std::string> kA{"A"};

DensityOperator bb84_mixture(std::uint8_t x) {
  const auto m =
      (bb84_encode(x, 0, "B").projector() + bb84_encode(x, 1, "B").projector()) * Complex(0.5);
  return DensityOperator(m, Factorization::single("B"));
}

}  // namespace

TEST_CASE("Schmidt coefficients agree with Eigen's SVD") {
  Rng rng(17);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t da = 2 + rep % 3, db = 2 + (rep / 3) % 3;
    const auto psi = random_bipartite(da, db, rng);
    const auto sd = schmidt_decompose(psi, kA);
    const auto ref = oracle::schmidt_squares(psi.amplitudes(), da, db);
    REQUIRE(sd.rank() <= ref.size());
    for (std::size_t i = 0; i < sd.rank(); ++i) CHECK(sd.coefficients[i] == doctest::Approx(ref[i]).epsilon(1e-10));
    double total = 0.0;
    for (double c : sd.coefficients) total += c;
    CHECK(total == doctest::Approx(1.0));
  }
}

TEST_CASE("hmin_pure is certified from both sides") {
  Rng rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const auto psi = random_bipartite(2 + rep % 3, 2 + rep % 2, rng);
    const auto r = hmin_pure(psi, kA);
    CHECK(r.feasible.verified);
    CHECK(r.upper.verified);
    CHECK(r.feasible.value <= r.value + 1e-12);
    CHECK(r.upper.value == doctest::Approx(r.value).epsilon(1e-9));
    const auto ref = oracle::schmidt_squares(psi.amplitudes(), psi.factorization().parts()[0].dim,
                                             psi.factorization().parts()[1].dim);
    CHECK(-r.value == doctest::Approx(oracle::emax_pure(ref)).epsilon(1e-9));
  }
}

TEST_CASE("hmin_feasible rejects lambda below the optimum") {
  const auto psi = bell_pair("A", "B");
  const auto r = hmin_pure(psi, kA);
  CHECK(r.value == doctest::Approx(-1.0));
  const DensityOperator rho(psi);
  CHECK(hmin_feasible(rho, 1.0, r.tau));
  CHECK_FALSE(hmin_feasible(rho, 0.99, r.tau));
}

TEST_CASE("qubit-scale grid oracle agrees with the closed form") {
  Rng rng(5);
  for (int rep = 0; rep < 6; ++rep) {
    const std::size_t da = 2 + rep % 2;
    const auto psi = random_bipartite(da, 2, rng);
    const auto grid = oracle::neg_hmin_qubit_grid(oracle::to_eigen(psi.projector()), da);
    const auto r = hmin_pure(psi, kA);
    CHECK(grid == doctest::Approx(-r.value).epsilon(1e-6));
  }
}

TEST_CASE("bisection and direct feasible lambda agree") {
  Rng rng(6);
  const auto rho = oracle::to_eigen(oracle::random_density(4, rng));
  const auto tau = oracle::bloch_tau(0.1, -0.2, 0.3);
  CHECK(oracle::feasible_lambda(rho, 2, tau) == doctest::Approx(oracle::direct_lambda(rho, 2, tau)).epsilon(1e-9));
}

TEST_CASE("dmax basics") {
  const auto f = Factorization::single("q");
  const auto mixed = DensityOperator::maximally_mixed(f);
  const DensityOperator zero(bb84_encode(0, 0));
  CHECK(dmax(zero, mixed) == doctest::Approx(1.0));
  CHECK(dmax(mixed, mixed) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::isinf(dmax(mixed, zero)));
}

TEST_CASE("E_max sandwich is tight on random pure states") {
  Rng rng(31);
  for (int rep = 0; rep < 25; ++rep) {
    const auto psi = random_bipartite(2 + rep % 3, 2 + (rep / 3) % 3, rng);
    const auto w = pure_state_witnesses(psi, kA);
    const auto s = emax_sandwich(DensityOperator(psi), w.dual, w.separable);
    CHECK(s.lower_certificate.verified);
    CHECK(s.upper_certificate.verified);
    CHECK(s.upper - s.lower <= 1e-8);
    CHECK(s.lower <= s.upper + 1e-12);
  }
}

TEST_CASE("E_max sandwich rejects a bad witness") {
  const auto psi = bell_pair("A", "B");
  auto w = pure_state_witnesses(psi, kA);
  w.dual.y *= Complex(2.0);  // tr_A Y = 2 I_B
  CHECK_THROWS_AS(emax_sandwich(DensityOperator(psi), w.dual, w.separable), DomainError);
}

TEST_CASE("Breidbart measurement is YKL-certified on the BB84 bit ensemble") {
  const Ensemble ens({0.5, 0.5}, {bb84_mixture(0), bb84_mixture(1)});
  const auto opt = pguess(ens, Povm::breidbart());
  CHECK(opt.ykl_certified);
  CHECK(opt.value == doctest::Approx(std::pow(std::cos(std::numbers::pi / 8), 2)).epsilon(1e-12));
  CHECK(hmin_cq(ens, opt) == doctest::Approx(0.228446696836388).epsilon(1e-12));

  const auto naive = pguess(ens, Povm::computational(2));
  CHECK(naive.value == doctest::Approx(0.75));
  CHECK_FALSE(naive.ykl_certified);
  CHECK_THROWS_AS(hmin_cq(ens, naive), DomainError);
}

TEST_CASE("separable mixtures and dominating marginals") {
  const auto w = pure_state_witnesses(bell_pair("A", "B"), kA);
  CHECK_NOTHROW(w.separable.validate());
  const auto m = separable_dominating_marginal(w.separable);
  CHECK(m.verified);
  SeparableMixture bad = w.separable;
  bad.terms[0].weight = 0.9;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("resource E_max for the built-in resource families") {
  SUBCASE("max entangled") {
    for (std::size_t k = 0; k <= 6; ++k) {
      const auto r = resource_emax(ResourceSpec::max_entangled(k));
      CHECK(r.certified);
      CHECK(r.lower == doctest::Approx(static_cast<double>(k)).epsilon(1e-10));
      CHECK(r.upper == doctest::Approx(static_cast<double>(k)).epsilon(1e-10));
    }
  }
  SUBCASE("pure Schmidt (0.9, 0.1)") {
    const double per_pair = oracle::fixture_number(
        oracle::load_fixture("threshold_n1000_eps2m20.json")["schmidt_09_01_emax"]);
    for (std::size_t k = 1; k <= 3; ++k) {
      const auto r = resource_emax(ResourceSpec::pure_schmidt(k, {0.9, 0.1}));
      CHECK(r.lower == doctest::Approx(k * per_pair).epsilon(1e-10));
      CHECK(r.upper == doctest::Approx(k * per_pair).epsilon(1e-10));
    }
  }
  SUBCASE("isotropic") {
    for (double v : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0}) {
      const auto r = resource_emax(ResourceSpec::isotropic(2, v));
      CHECK(r.certified);
      CHECK(r.lower <= r.upper + 1e-10);
      const double f = (1.0 + 3.0 * v) / 4.0;
      const double expected = f > 0.5 ? 2.0 * std::log2(2.0 * f) : 0.0;
      CHECK(r.upper == doctest::Approx(expected).epsilon(1e-9));
      CHECK(r.lower == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("certificates serialize") {
  const auto r = resource_emax(ResourceSpec::max_entangled(1));
  const auto j = to_json(r);
  CHECK(j["certified"] == true);
  CHECK(j["per_pair"]["upper_certificate"]["kind"] == "emax-upper-witness");
}
