#include "lsdiv/linalg.hpp"

#include "doctest.h"
#include "lsdiv/rng.hpp"

using namespace lsdiv;

namespace {

Matrix seeded_spd(int d, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.next_normal();
  return a.transpose() * a + Matrix::Identity(d, d);
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("spd_sqrt on identity and diagonal matrices") {
    SpdMatrix id(Matrix::Identity(3, 3));
    CHECK((spd_sqrt(id).m() - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = 4.0;
    diag(1, 1) = 9.0;
    Matrix root = spd_sqrt(SpdMatrix(diag)).m();
    CHECK(root(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(root(1, 1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(root(0, 1)) < 1e-12);
  }

  TEST_CASE("spd_sqrt squares back to the input") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
      Matrix m = seeded_spd(4, seed);
      SpdMatrix root = spd_sqrt(SpdMatrix(m));
      CHECK((root.m() * root.m() - m).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("determinant, inverse, trace") {
    CHECK(spd_det(SpdMatrix(Matrix::Identity(3, 3))) == doctest::Approx(1.0).epsilon(1e-14));

    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = 2.0;
    diag(1, 1) = 4.0;
    Matrix inv = spd_inv(SpdMatrix(diag)).m();
    CHECK(inv(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(inv(1, 1) == doctest::Approx(0.25).epsilon(1e-14));

    Matrix m = seeded_spd(5, 7);
    CHECK((spd_inv(SpdMatrix(m)).m() * m - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(trace(m) == doctest::Approx(m.diagonal().sum()));
  }

  TEST_CASE("eigen-route identities") {
    for (std::uint64_t seed : {10u, 11u, 12u}) {
      SpdMatrix m(seeded_spd(3, seed));
      const double root_det = spd_det(spd_sqrt(m));
      CHECK(root_det * root_det == doctest::Approx(spd_det(m)).epsilon(1e-10));
      CHECK(spd_det(spd_inv(m)) * spd_det(m) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  TEST_CASE("SPD invariants reject bad inputs") {
    Matrix asym(2, 2);
    asym << 1.0, 0.5, -0.5, 1.0;
    CHECK_THROWS_AS(SpdMatrix{asym}, std::domain_error);

    Matrix indef(2, 2);
    indef << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
    CHECK_THROWS_AS(SpdMatrix{indef}, std::domain_error);

    Matrix singular(2, 2);
    singular << 1.0, 1.0, 1.0, 1.0;
    CHECK_THROWS_AS(SpdMatrix{singular}, std::domain_error);

    CHECK_THROWS_AS(inverse(singular), std::domain_error);
  }

  TEST_CASE("general determinant and log|det|") {
    Matrix m(2, 2);
    m << 2.0, 1.0, 0.0, 3.0;  // not symmetric
    CHECK(det(m) == doctest::Approx(6.0));
    CHECK(log_abs_det(m) == doctest::Approx(std::log(6.0)).epsilon(1e-13));
    CHECK((inverse(m) * m - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-13);
  }
}
