#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/QR>

#include <cmath>
#include <random>

#include "polyopt/linalg.hpp"
#include "support.hpp"

using namespace polyopt;

namespace {

Eigen::MatrixXd random_orthogonal(std::mt19937_64& rng, int dim) {
  const Eigen::MatrixXd A = testsupport::random_sym(rng, dim);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ();
}

}  // namespace

TEST_CASE("sym_eig on pinned matrices") {
  const auto diag = sym_eig(Eigen::MatrixXd{{3.0, 0.0}, {0.0, -2.0}});
  CHECK(diag.values(0) == doctest::Approx(3.0));
  CHECK(diag.values(1) == doctest::Approx(-2.0));
  CHECK(std::abs(diag.vectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(diag.vectors(1, 1)) == doctest::Approx(1.0));
  CHECK(diag.vectors(1, 0) == doctest::Approx(0.0));

  const auto offdiag = sym_eig(Eigen::MatrixXd{{0.0, 1.0}, {1.0, 0.0}});
  CHECK(offdiag.values(0) == doctest::Approx(1.0));
  CHECK(offdiag.values(1) == doctest::Approx(-1.0));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(offdiag.vectors(0, 0) * offdiag.vectors(1, 0)) == doctest::Approx(s * s));
  CHECK(std::abs(offdiag.vectors.col(1).dot(Eigen::Vector2d(1.0, -1.0) * s)) ==
        doctest::Approx(1.0).epsilon(1e-9));

  // identity ties keep the ascending-solver output order: first column is e0
  const auto id = sym_eig(Eigen::MatrixXd::Identity(2, 2));
  CHECK(id.vectors(0, 0) == doctest::Approx(1.0));
  CHECK(id.vectors(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("sym_eig recovers a planted spectrum") {
  std::mt19937_64 rng(3);
  Eigen::VectorXd d(6);
  d << 5.0, 2.5, 1.0, 0.0, -0.5, -3.0;
  const Eigen::MatrixXd Q = random_orthogonal(rng, 6);
  const Eigen::MatrixXd A = Q * d.asDiagonal() * Q.transpose();
  const auto eig = sym_eig(A);
  for (int i = 0; i < 6; ++i) CHECK(eig.values(i) == doctest::Approx(d(i)).epsilon(1e-9));
}

TEST_CASE("sym_eig reconstruction and orthonormality on random matrices") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dims(1, 20);
  for (int rep = 0; rep < 200; ++rep) {
    const int dim = dims(rng);
    const Eigen::MatrixXd A = testsupport::random_sym(rng, dim, 3.0);
    const auto eig = sym_eig(A);
    const Eigen::MatrixXd R =
        eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    CHECK((A - R).norm() <= 1e-9 * std::max(1.0, A.norm()));
    CHECK((eig.vectors.transpose() * eig.vectors - Eigen::MatrixXd::Identity(dim, dim))
              .norm() <= 1e-9);
    for (int i = 1; i < dim; ++i) CHECK(eig.values(i - 1) >= eig.values(i));
  }
}

TEST_CASE("sym_eig input validation") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.0, 0.0, std::nan("");
  CHECK_THROWS_AS(sym_eig(bad), std::invalid_argument);
  CHECK_THROWS_AS(sym_eig(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("k_eigs") {
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd A = testsupport::random_sym(rng, 5);
  const auto full = sym_eig(A);
  const auto trunc = k_eigs(A, 5);
  CHECK((full.values - trunc.values).norm() == doctest::Approx(0.0));

  Eigen::VectorXd u(3);
  u << 2.0, -1.0, 2.0;
  u.normalize();
  const auto top = k_eigs(u * u.transpose(), 1);
  CHECK(top.values.size() == 1);
  CHECK(top.values(0) == doctest::Approx(1.0));
  CHECK(std::abs(top.vectors.col(0).dot(u)) == doctest::Approx(1.0));

  const auto m2 = k_eigs(Eigen::MatrixXd{{1.0, 0.5}, {0.5, 0.25}}, 1);
  CHECK(m2.values(0) == doctest::Approx(1.25));
  Eigen::Vector2d dir(2.0, 1.0);
  dir.normalize();
  CHECK(std::abs(m2.vectors.col(0).dot(dir)) == doctest::Approx(1.0));

  const auto prefix = k_eigs(A, 2);
  CHECK(prefix.values(0) == doctest::Approx(full.values(0)).epsilon(1e-9));
  CHECK(prefix.values(1) == doctest::Approx(full.values(1)).epsilon(1e-9));

  CHECK_THROWS_AS(k_eigs(A, 0), std::invalid_argument);
  CHECK_THROWS_AS(k_eigs(A, 6), std::invalid_argument);
}

TEST_CASE("numerical_rank") {
  CHECK(numerical_rank(Eigen::MatrixXd::Identity(3, 3), 1e-6) == 3);

  Eigen::VectorXd u(4);
  u << 1.0, 2.0, -1.0, 0.5;
  CHECK(numerical_rank(u * u.transpose(), 1e-6) == 1);

  const Eigen::MatrixXd two_atom{{1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}, {1.0, 0.0, 1.0}};
  CHECK(numerical_rank(two_atom, 1e-6) == 2);

  std::mt19937_64 rng(13);
  const Eigen::MatrixXd A = testsupport::random_sym(rng, 6);
  int prev = 7;
  for (double tau : {1e-12, 1e-8, 1e-4, 1e-1, 1.0}) {
    const int r = numerical_rank(A, tau);
    CHECK(r <= prev);
    prev = r;
  }
}

TEST_CASE("rank1_factor") {
  Eigen::Vector2d v(2.0, 1.0);
  v.normalize();
  CHECK(rank1_factor(0.0, v).norm() == doctest::Approx(0.0));

  const Eigen::VectorXd u = rank1_factor(1.25, v);
  CHECK(u(0) == doctest::Approx(1.0));
  CHECK(u(1) == doctest::Approx(0.5));

  const Eigen::VectorXd flipped = rank1_factor(1.25, -v);
  CHECK(flipped(0) == doctest::Approx(1.0));  // sign fixed so u(0) >= 0

  const Eigen::MatrixXd outer = u * u.transpose();
  CHECK((outer - 1.25 * v * v.transpose()).norm() <= 1e-12);

  CHECK_THROWS_AS(rank1_factor(-0.1, v), std::invalid_argument);
}

TEST_CASE("frob_inner") {
  CHECK(frob_inner(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)) ==
        doctest::Approx(2.0));

  std::mt19937_64 rng(17);
  const Eigen::MatrixXd A = testsupport::random_sym(rng, 4);
  CHECK(frob_inner(A, A) == doctest::Approx(A.squaredNorm()));

  const Eigen::MatrixXd D{{1.0, 0.0}, {0.0, 2.0}};
  const Eigen::MatrixXd O{{0.0, 1.0}, {1.0, 0.0}};
  CHECK(frob_inner(D, O) == doctest::Approx(0.0));

  CHECK_THROWS_AS(frob_inner(D, Eigen::MatrixXd::Identity(3, 3)), std::invalid_argument);
}
