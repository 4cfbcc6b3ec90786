#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "hubscan/matrix.hpp"
#include "oracles.hpp"

using hubscan::SymmetricMatrix;

namespace {

Eigen::MatrixXd m2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("SymmetricMatrix enforces its invariants") {
  Eigen::MatrixXd raw(2, 2);
  raw << 1.0, 0.2, 0.4, 1.0;
  const auto s = SymmetricMatrix::from_dense(raw);
  CHECK(s(0, 1) == s(1, 0));
  CHECK(s(0, 1) == doctest::Approx(0.3));

  raw(0, 1) = std::nan("");
  CHECK_THROWS_AS(SymmetricMatrix::from_dense(raw), hubscan::NonFiniteError);
  CHECK_THROWS_AS(SymmetricMatrix::from_dense(Eigen::MatrixXd::Zero(2, 3)),
                  hubscan::DimensionMismatchError);
}

TEST_CASE("symmetric_eigen on closed-form inputs") {
  SUBCASE("identity") {
    const auto e = symmetric_eigen(SymmetricMatrix::identity(3));
    for (int i = 0; i < 3; ++i) CHECK(e.eigenvalues(i) == doctest::Approx(1.0));
  }
  SUBCASE("diagonal") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 1.0;
    const auto e = symmetric_eigen(SymmetricMatrix::from_dense(d));
    CHECK(e.eigenvalues(0) == doctest::Approx(4.0));
    CHECK(e.eigenvalues(1) == doctest::Approx(1.0));
    CHECK(e.eigenvectors(0, 0) == doctest::Approx(1.0));
    CHECK(e.eigenvectors(1, 1) == doctest::Approx(1.0));
  }
  SUBCASE("2x2 closed form") {
    const auto e =
        symmetric_eigen(SymmetricMatrix::from_dense(m2(2, 1, 1, 2)));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(e.eigenvalues(0) == doctest::Approx(3.0));
    CHECK(e.eigenvalues(1) == doctest::Approx(1.0));
    CHECK(e.eigenvectors(0, 0) == doctest::Approx(inv_sqrt2));
    CHECK(e.eigenvectors(1, 0) == doctest::Approx(inv_sqrt2));
    // Sign convention: tie on magnitudes resolves to the lowest index.
    CHECK(e.eigenvectors(0, 1) == doctest::Approx(inv_sqrt2));
    CHECK(e.eigenvectors(1, 1) == doctest::Approx(-inv_sqrt2));
  }
}

TEST_CASE("symmetric_eigen reconstruction and orthonormality") {
  std::mt19937_64 rng(991);
  for (int rep = 0; rep < 60; ++rep) {
    const auto a = SymmetricMatrix::from_dense(oracles::random_symmetric(6, rng));
    const auto e = symmetric_eigen(a);
    const Eigen::MatrixXd vtv =
        e.eigenvectors.transpose() * e.eigenvectors;
    CHECK((vtv - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <=
          1e-8);
    const Eigen::MatrixXd rec = e.eigenvectors *
                                e.eigenvalues.asDiagonal() *
                                e.eigenvectors.transpose();
    const double tol = 1e-8 * std::max(1.0, a.mat().cwiseAbs().maxCoeff());
    CHECK((rec - a.mat()).cwiseAbs().maxCoeff() <= tol);
    for (int i = 0; i + 1 < 6; ++i) {
      CHECK(e.eigenvalues(i) >= e.eigenvalues(i + 1));
    }
  }
}

TEST_CASE("symmetric_eigen agrees with the Jacobi oracle") {
  std::mt19937_64 rng(5150);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = SymmetricMatrix::from_dense(oracles::random_symmetric(7, rng));
    const auto e = symmetric_eigen(a);
    const auto j = oracles::jacobi_eigen(a.mat());
    for (int i = 0; i < 7; ++i) {
      CHECK(e.eigenvalues(i) == doctest::Approx(j.values(i)).epsilon(1e-9));
    }
  }
}

TEST_CASE("symmetric_eigen is deterministic") {
  std::mt19937_64 rng(7);
  const auto a = SymmetricMatrix::from_dense(oracles::random_symmetric(8, rng));
  const auto e1 = symmetric_eigen(a);
  const auto e2 = symmetric_eigen(a);
  CHECK(std::memcmp(e1.eigenvalues.data(), e2.eigenvalues.data(),
                    sizeof(double) * 8) == 0);
  CHECK(std::memcmp(e1.eigenvectors.data(), e2.eigenvectors.data(),
                    sizeof(double) * 64) == 0);
}

TEST_CASE("cholesky on closed-form inputs") {
  const auto i2 = cholesky(SymmetricMatrix::identity(2));
  CHECK((i2.mat() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() ==
        0.0);

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const auto ld = cholesky(SymmetricMatrix::from_dense(d));
  CHECK(ld.mat()(0, 0) == doctest::Approx(2.0));
  CHECK(ld.mat()(1, 1) == doctest::Approx(3.0));

  const auto l = cholesky(SymmetricMatrix::from_dense(m2(1, 0.5, 0.5, 1)));
  CHECK(l.mat()(0, 0) == doctest::Approx(1.0));
  CHECK(l.mat()(1, 0) == doctest::Approx(0.5));
  CHECK(l.mat()(1, 1) == doctest::Approx(std::sqrt(0.75)));
  CHECK(l.mat()(0, 1) == 0.0);

  CHECK_THROWS_AS(cholesky(SymmetricMatrix::from_dense(m2(1, 2, 2, 1))),
                  hubscan::NotPositiveDefiniteError);
}

TEST_CASE("cholesky factor reproduces the input") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = SymmetricMatrix::from_dense(oracles::random_spd(6, rng));
    const auto l = cholesky(a);
    const Eigen::MatrixXd rec = l.mat() * l.mat().transpose();
    CHECK((rec - a.mat()).cwiseAbs().maxCoeff() <=
          1e-10 * a.mat().cwiseAbs().maxCoeff());
  }
}

TEST_CASE("invert_spd on closed-form inputs") {
  const auto i3 = invert_spd(SymmetricMatrix::identity(3));
  CHECK((i3.mat() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <=
        1e-14);

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  const auto dinv = invert_spd(SymmetricMatrix::from_dense(d));
  CHECK(dinv(0, 0) == doctest::Approx(0.5));
  CHECK(dinv(1, 1) == doctest::Approx(0.25));
  CHECK(dinv(0, 1) == doctest::Approx(0.0));

  const auto binv = invert_spd(SymmetricMatrix::from_dense(m2(2, 1, 1, 2)));
  CHECK(binv(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(binv(0, 1) == doctest::Approx(-1.0 / 3.0));
  CHECK(binv(1, 1) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("invert_spd round trip on well-conditioned inputs") {
  std::mt19937_64 rng(1234);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a =
        SymmetricMatrix::from_dense(oracles::random_spd(6, rng, 0.2, 20.0));
    const auto back = invert_spd(invert_spd(a));
    CHECK((back.mat() - a.mat()).cwiseAbs().maxCoeff() <=
          1e-6 * a.mat().cwiseAbs().maxCoeff());
    const Eigen::MatrixXd prod = a.mat() * invert_spd(a).mat();
    CHECK((prod - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() <=
          1e-8 * 1e3);
  }
}

TEST_CASE("invert_spd rejects singular input") {
  Eigen::MatrixXd s(3, 3);
  // Rank 2: third row equals the first.
  s << 2, 1, 2,
       1, 3, 1,
       2, 1, 2;
  CHECK_THROWS_AS(invert_spd(SymmetricMatrix::from_dense(s)),
                  hubscan::NotPositiveDefiniteError);
}

TEST_CASE("cov_to_corr") {
  SUBCASE("idempotent on a correlation matrix") {
    const auto r = SymmetricMatrix::from_dense(m2(1, 0.4, 0.4, 1));
    const auto rr = cov_to_corr(r);
    CHECK((rr.mat() - r.mat()).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("diagonal input") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    const auto r = cov_to_corr(SymmetricMatrix::from_dense(d));
    CHECK((r.mat() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <=
          1e-15);
  }
  SUBCASE("direct formula") {
    const auto r = cov_to_corr(SymmetricMatrix::from_dense(m2(4, 3, 3, 9)));
    CHECK(r(0, 0) == 1.0);
    CHECK(r(1, 1) == 1.0);
    CHECK(r(0, 1) == doctest::Approx(0.5));
  }
  SUBCASE("zero variance reports the offending index") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
    d(0, 0) = 1.0;
    d(2, 2) = 2.0;
    try {
      cov_to_corr(SymmetricMatrix::from_dense(d));
      FAIL("expected ZeroVarianceError");
    } catch (const hubscan::ZeroVarianceError& e) {
      CHECK(e.index() == 1);
    }
  }
  SUBCASE("unit diagonal and entries in [-1, 1] on random covariances") {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 30; ++rep) {
      const auto a = SymmetricMatrix::from_dense(oracles::random_spd(5, rng));
      const auto r = cov_to_corr(a);
      for (int i = 0; i < 5; ++i) {
        CHECK(r(i, i) == 1.0);
        for (int j = 0; j < 5; ++j) {
          CHECK(std::abs(r(i, j)) <= 1.0 + 1e-12);
        }
      }
    }
  }
}
