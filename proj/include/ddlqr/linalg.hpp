#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace ddlqr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// Full singular value decomposition M = U * diag(sigma) * V^T.
/// singular_values is sorted nonincreasing and has min(rows, cols) entries.
struct SvdResult {
  Matrix left_vectors;   // rows x rows
  Vector singular_values;
  Matrix right_vectors;  // cols x cols

  [[nodiscard]] Matrix reconstruct() const;
  [[nodiscard]] double max() const;
  [[nodiscard]] double min() const;
};

void require_finite(const Matrix& m, std::string_view what);

SvdResult svd(const Matrix& m);

/// sigma_i counts as nonzero iff sigma_i > 1e-10 * sigma_max * max(rows, cols).
double default_rank_tolerance(const Matrix& m);
double default_rank_tolerance(const SvdResult& s, Eigen::Index rows, Eigen::Index cols);

Eigen::Index numerical_rank(const Matrix& m);

/// Moore-Penrose pseudo-inverse; singular values at or below rank_tol are
/// truncated. For full-row-rank input this is the right inverse.
Matrix pinv(const Matrix& m, std::optional<double> rank_tol = std::nullopt);

/// Orthonormal basis (columns) of the null space of m.
Matrix null_space(const Matrix& m, std::optional<double> rank_tol = std::nullopt);

double spectral_radius(const Matrix& m);

/// Strict discrete-time stability test: spectral_radius(m) < 1 - tol.
bool is_schur(const Matrix& m, double tol = 0.0);

/// Induced 2-norm (largest singular value).
double norm2(const Matrix& m);

double min_eigenvalue_symmetric(const Matrix& m);
double max_eigenvalue_symmetric(const Matrix& m);

/// Symmetric PSD square root via eigendecomposition. Negative eigenvalues
/// within roundoff are clamped to zero.
Matrix sqrt_psd(const Matrix& m);

Matrix symmetrize(const Matrix& m);

/// Solves F P F^T - P + W = 0 for a Schur F by Kronecker vectorization.
/// Throws NotSchur when spectral_radius(F) >= 1.
Matrix dlyap(const Matrix& f, const Matrix& w);

struct RiccatiSolution {
  Matrix gain;        // K, so that u = K x and A + B K is Schur
  Matrix cost_to_go;  // stabilizing fixed point of the Riccati recursion
  int iterations = 0;
};

/// Iterates P <- Q + A'PA - A'PB (R + B'PB)^-1 B'PA from P = Q until the
/// relative Frobenius update drops below 1e-12 (at most 1e5 steps).
/// K = -(R + B'PB)^-1 B'PA. Throws NotStabilizable on non-convergence or
/// when the resulting closed loop is not Schur.
RiccatiSolution dare_gain(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r);

}  // namespace linalg
}  // namespace ddlqr
