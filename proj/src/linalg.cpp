#include "ddlqr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddlqr/error.hpp"

namespace ddlqr::linalg {

namespace {

void require_square(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    throw InvalidInput(std::string(what) + ": expected a square matrix, got " +
                       std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_nonempty(const Matrix& m, std::string_view what) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw InvalidInput(std::string(what) + ": empty matrix");
  }
}

}  // namespace

Matrix SvdResult::reconstruct() const {
  Matrix sigma = Matrix::Zero(left_vectors.cols(), right_vectors.cols());
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    sigma(i, i) = singular_values(i);
  }
  return left_vectors * sigma * right_vectors.transpose();
}

double SvdResult::max() const {
  return singular_values.size() == 0 ? 0.0 : singular_values(0);
}

double SvdResult::min() const {
  return singular_values.size() == 0 ? 0.0 : singular_values(singular_values.size() - 1);
}

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw InvalidInput(std::string(what) + ": non-finite entry");
  }
}

SvdResult svd(const Matrix& m) {
  require_nonempty(m, "svd");
  require_finite(m, "svd");
  Eigen::JacobiSVD<Matrix> dec(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return SvdResult{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

double default_rank_tolerance(const SvdResult& s, Eigen::Index rows, Eigen::Index cols) {
  return 1e-10 * s.max() * static_cast<double>(std::max(rows, cols));
}

double default_rank_tolerance(const Matrix& m) {
  return default_rank_tolerance(svd(m), m.rows(), m.cols());
}

Eigen::Index numerical_rank(const Matrix& m) {
  const SvdResult s = svd(m);
  const double tol = default_rank_tolerance(s, m.rows(), m.cols());
  return (s.singular_values.array() > tol).count();
}

Matrix pinv(const Matrix& m, std::optional<double> rank_tol) {
  const SvdResult s = svd(m);
  const double tol = rank_tol.value_or(default_rank_tolerance(s, m.rows(), m.cols()));
  if (!(tol > 0.0) && s.max() > 0.0) {
    throw InvalidInput("pinv: rank tolerance must be positive");
  }
  Matrix out = Matrix::Zero(m.cols(), m.rows());
  for (Eigen::Index i = 0; i < s.singular_values.size(); ++i) {
    const double sigma = s.singular_values(i);
    if (sigma > tol) {
      out += (1.0 / sigma) * s.right_vectors.col(i) * s.left_vectors.col(i).transpose();
    }
  }
  return out;
}

Matrix null_space(const Matrix& m, std::optional<double> rank_tol) {
  const SvdResult s = svd(m);
  const double tol = rank_tol.value_or(default_rank_tolerance(s, m.rows(), m.cols()));
  const Eigen::Index rank = (s.singular_values.array() > tol).count();
  return s.right_vectors.rightCols(m.cols() - rank);
}

double spectral_radius(const Matrix& m) {
  require_nonempty(m, "spectral_radius");
  require_square(m, "spectral_radius");
  require_finite(m, "spectral_radius");
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericalFailure("spectral_radius: eigenvalue iteration did not converge");
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_schur(const Matrix& m, double tol) { return spectral_radius(m) < 1.0 - tol; }

double norm2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  require_finite(m, "norm2");
  Eigen::JacobiSVD<Matrix> dec(m);
  return dec.singularValues()(0);
}

double min_eigenvalue_symmetric(const Matrix& m) {
  require_square(m, "min_eigenvalue_symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue_symmetric(const Matrix& m) {
  require_square(m, "max_eigenvalue_symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

Matrix sqrt_psd(const Matrix& m) {
  require_square(m, "sqrt_psd");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m));
  const Vector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return symmetrize(es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose());
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix dlyap(const Matrix& f, const Matrix& w) {
  require_nonempty(f, "dlyap");
  require_square(f, "dlyap");
  require_square(w, "dlyap");
  require_finite(f, "dlyap");
  require_finite(w, "dlyap");
  if (w.rows() != f.rows()) {
    throw InvalidInput("dlyap: F and W dimensions differ");
  }
  if ((w - w.transpose()).norm() > 1e-10 * std::max(1.0, w.norm())) {
    throw InvalidInput("dlyap: W must be symmetric");
  }
  const double rho = spectral_radius(f);
  if (!(rho < 1.0)) {
    throw NotSchur("dlyap: spectral radius " + std::to_string(rho) + " >= 1");
  }

  // vec(F P F^T) = (F kron F) vec(P) in column-major vectorization.
  const Eigen::Index n = f.rows();
  const Eigen::Index nn = n * n;
  Matrix lhs = Matrix::Identity(nn, nn);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      lhs.block(i * n, j * n, n, n) -= f(i, j) * f;
    }
  }
  const Vector rhs = Eigen::Map<const Vector>(w.data(), nn);
  const Vector sol = lhs.partialPivLu().solve(rhs);
  const Matrix p = Eigen::Map<const Matrix>(sol.data(), n, n);
  return symmetrize(p);
}

RiccatiSolution dare_gain(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& r) {
  require_square(a, "dare_gain(A)");
  require_square(q, "dare_gain(Q)");
  require_square(r, "dare_gain(R)");
  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.cols();
  if (b.rows() != n || q.rows() != n || r.rows() != m) {
    throw InvalidInput("dare_gain: inconsistent dimensions");
  }
  for (const Matrix* x : {&a, &b, &q, &r}) require_finite(*x, "dare_gain");
  if (min_eigenvalue_symmetric(q) <= 0.0 || min_eigenvalue_symmetric(r) <= 0.0) {
    throw InvalidInput("dare_gain: Q and R must be positive definite");
  }

  constexpr int kMaxIterations = 100000;
  constexpr double kRelTol = 1e-12;

  Matrix p = symmetrize(q);
  Matrix gain = Matrix::Zero(m, n);
  int it = 0;
  bool converged = false;
  for (; it < kMaxIterations; ++it) {
    const Matrix bp = b.transpose() * p;
    const Eigen::LLT<Matrix> s(r + bp * b);
    if (s.info() != Eigen::Success) {
      throw NumericalFailure("dare_gain: R + B'PB lost positive definiteness");
    }
    gain = -s.solve(bp * a);
    // Equivalent to Q + A'PA - A'PB (R + B'PB)^-1 B'PA.
    const Matrix next = symmetrize(q + a.transpose() * p * a + a.transpose() * bp.transpose() * gain);
    if (!next.allFinite()) break;
    const double step = (next - p).norm();
    p = next;
    if (step <= kRelTol * p.norm()) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) {
    throw NotStabilizable("dare_gain: Riccati recursion did not converge");
  }
  {
    const Matrix bp = b.transpose() * p;
    gain = -(r + bp * b).llt().solve(bp * a);
  }
  if (!is_schur(a + b * gain)) {
    throw NotStabilizable("dare_gain: recursion converged to a non-stabilizing gain");
  }
  return RiccatiSolution{gain, p, it};
}

}  // namespace ddlqr::linalg
