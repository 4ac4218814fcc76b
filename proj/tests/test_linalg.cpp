#include <cmath>

#include "ddlqr/error.hpp"
#include "ddlqr/linalg.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ddlqr;
using testing::max_abs;

TEST_CASE("svd reconstructs and orders singular values") {
  std::mt19937_64 rng(7);
  const Matrix m = testing::random_matrix(4, 6, rng);
  const linalg::SvdResult s = linalg::svd(m);
  CHECK(s.singular_values.size() == 4);
  for (Eigen::Index i = 1; i < s.singular_values.size(); ++i) {
    CHECK(s.singular_values(i) <= s.singular_values(i - 1));
  }
  CHECK(max_abs(s.reconstruct() - m) < 1e-12);
  CHECK(max_abs(s.left_vectors.transpose() * s.left_vectors - Matrix::Identity(4, 4)) < 1e-12);
}

TEST_CASE("pinv satisfies the Moore-Penrose conditions") {
  std::mt19937_64 rng(11);
  // rank 2, 3 x 5
  const Matrix m = testing::random_matrix(3, 2, rng) * testing::random_matrix(2, 5, rng);
  const Matrix p = linalg::pinv(m);
  CHECK(linalg::numerical_rank(m) == 2);
  CHECK(max_abs(m * p * m - m) < 1e-10);
  CHECK(max_abs(p * m * p - p) < 1e-10);
  CHECK(max_abs((m * p).transpose() - m * p) < 1e-10);
  CHECK(max_abs((p * m).transpose() - p * m) < 1e-10);
}

TEST_CASE("null_space is orthonormal and annihilated") {
  std::mt19937_64 rng(3);
  const Matrix m = testing::random_matrix(3, 8, rng);
  const Matrix n = linalg::null_space(m);
  REQUIRE(n.cols() == 5);
  CHECK(max_abs(m * n) < 1e-12);
  CHECK(max_abs(n.transpose() * n - Matrix::Identity(5, 5)) < 1e-12);
  CHECK(linalg::null_space(Matrix::Identity(3, 3)).cols() == 0);
}

TEST_CASE("is_schur is strict") {
  CHECK(linalg::is_schur(0.999 * Matrix::Identity(2, 2)));
  CHECK_FALSE(linalg::is_schur(Matrix::Identity(2, 2)));
  CHECK_FALSE(linalg::is_schur(0.95 * Matrix::Identity(2, 2), 0.1));
}

TEST_CASE("dlyap matches the truncated series") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix f = testing::random_with_radius(4, 0.6, rng);
    const Matrix g = testing::random_matrix(4, 4, rng);
    const Matrix w = g * g.transpose();
    const Matrix p = linalg::dlyap(f, w);
    CHECK(max_abs(p - testing::truncated_gramian(f, w, 400)) < 1e-9 * (1.0 + max_abs(p)));
    CHECK(max_abs(f * p * f.transpose() - p + w) < 1e-9 * (1.0 + max_abs(p)));
  }
}

TEST_CASE("dlyap rejects an unstable matrix") {
  CHECK_THROWS_AS(linalg::dlyap(1.01 * Matrix::Identity(2, 2), Matrix::Identity(2, 2)), NotSchur);
}

TEST_CASE("scalar Riccati matches the closed form") {
  // b = q = r = 1: p solves p^2 - a^2 p - 1 = 0, k = -a p / (1 + p).
  for (double a : {0.5, 1.0, 2.0}) {
    Matrix A(1, 1), one = Matrix::Identity(1, 1);
    A(0, 0) = a;
    const linalg::RiccatiSolution s = linalg::dare_gain(A, one, one, one);
    const double p = (a * a + std::sqrt(a * a * a * a + 4.0)) / 2.0;
    CHECK(s.cost_to_go(0, 0) == doctest::Approx(p).epsilon(1e-10));
    CHECK(s.gain(0, 0) == doctest::Approx(-a * p / (1.0 + p)).epsilon(1e-10));
  }
}

TEST_CASE("Riccati gain is a local optimum of the H2 cost") {
  std::mt19937_64 rng(9);
  const Matrix a = testing::random_with_radius(3, 1.1, rng);
  const Matrix b = testing::random_matrix(3, 2, rng);
  const Matrix q = Matrix::Identity(3, 3), r = Matrix::Identity(2, 2);
  const linalg::RiccatiSolution s = linalg::dare_gain(a, b, q, r);
  auto cost = [&](const Matrix& k) {
    const Matrix p = linalg::dlyap(a + b * k, Matrix::Identity(3, 3));
    return (q * p + k.transpose() * r * k * p).trace();
  };
  const double best = cost(s.gain);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix dk = 1e-3 * testing::random_matrix(2, 3, rng);
    CHECK(cost(s.gain + dk) >= best - 1e-12);
  }
}

TEST_CASE("dare_gain reports an unstabilizable pair") {
  Matrix a = Matrix::Identity(2, 2) * 1.5;
  Matrix b(2, 1);
  b << 1.0, 0.0;
  CHECK_THROWS_AS(linalg::dare_gain(a, b, Matrix::Identity(2, 2), Matrix::Identity(1, 1)), NotStabilizable);
}

TEST_CASE("sqrt_psd squares back") {
  std::mt19937_64 rng(1);
  const Matrix g = testing::random_matrix(3, 3, rng);
  const Matrix m = g * g.transpose();
  const Matrix s = linalg::sqrt_psd(m);
  CHECK(max_abs(s * s - m) < 1e-10);
}

TEST_CASE("require_finite rejects NaN") {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = std::nan("");
  CHECK_THROWS_AS(linalg::require_finite(m, "m"), InvalidInput);
}
