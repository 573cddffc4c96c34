#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qpvlab/linalg.hpp"

using namespace qpvlab;

TEST_CASE("eigh agrees with Eigen on random Hermitian matrices") {
  Rng rng(11);
  for (std::size_t d : {1u, 2u, 3u, 4u, 7u, 16u, 32u}) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto m = oracle::random_hermitian(d, rng);
      const auto ours = eigh(m);
      const auto ref = oracle::eigenvalues(oracle::to_eigen(m));
      REQUIRE(ours.values.size() == d);
      for (std::size_t i = 0; i < d; ++i) CHECK(ours.values[i] == doctest::Approx(ref[i]).epsilon(1e-10));
      for (std::size_t i = 1; i < d; ++i) CHECK(ours.values[i - 1] <= ours.values[i]);

      // V D V^dagger reconstructs m; V is unitary
      const auto back = spectral_map(ours, [](double x) { return x; });
      CHECK(back.max_abs_diff(m) < 1e-10);
      const auto vv = ours.vectors.adjoint() * ours.vectors;
      CHECK(vv.max_abs_diff(ComplexMatrix::identity(d)) < 1e-10);
    }
  }
}

TEST_CASE("eigh rejects non-Hermitian input") {
  ComplexMatrix m{{1.0, 2.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(eigh(m), std::invalid_argument);
}

TEST_CASE("kron matches Eigen") {
  Rng rng(3);
  const auto a = oracle::random_hermitian(2, rng);
  const auto b = oracle::random_hermitian(3, rng);
  const auto ours = kron(a, b);
  const auto ref = oracle::kron(oracle::to_eigen(a), oracle::to_eigen(b));
  CHECK(ours.max_abs_diff(oracle::from_eigen(ref)) < 1e-15);
}

TEST_CASE("matrix products, adjoint and trace") {
  ComplexMatrix a{{1.0, Complex(0, 1)}, {2.0, 3.0}};
  ComplexMatrix b{{0.0, 1.0}, {1.0, 0.0}};
  const auto ab = a * b;
  CHECK(ab(0, 0) == Complex(0, 1));
  CHECK(ab(0, 1) == Complex(1, 0));
  CHECK(a.adjoint()(1, 0) == Complex(0, -1));
  CHECK(a.trace() == Complex(4, 0));
  CHECK(inner(ComplexVector{Complex(0, 1), 0.0}, ComplexVector{1.0, 0.0}) == Complex(0, -1));
  CHECK(norm(ComplexVector{3.0, 4.0}) == doctest::Approx(5.0));
}

TEST_CASE("psd_dominates") {
  const auto id = ComplexMatrix::identity(2);
  ComplexMatrix p{{1.0, 0.0}, {0.0, 0.0}};
  CHECK(psd_dominates(id, p));
  CHECK_FALSE(psd_dominates(p, id));
  CHECK(psd_dominates(p, p));
}

TEST_CASE("spectral square root squares back") {
  Rng rng(5);
  const auto rho = oracle::random_density(4, rng);
  const auto root = spectral_map(eigh(rho), [](double x) { return std::sqrt(std::max(x, 0.0)); });
  CHECK((root * root).max_abs_diff(rho) < 1e-10);
}
