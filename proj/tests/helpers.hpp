#pragma once

#include <random>

#include "ddlqr/linalg.hpp"
#include "ddlqr/system.hpp"

namespace testing {

inline ddlqr::Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ddlqr::Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = g(rng);
  return m;
}

// Random matrix rescaled to the given spectral radius.
inline ddlqr::Matrix random_with_radius(Eigen::Index n, double radius, std::mt19937_64& rng) {
  ddlqr::Matrix m = random_matrix(n, n, rng);
  return m * (radius / ddlqr::linalg::spectral_radius(m));
}

// Closed-loop Gramian by summing F^k W F^k' until the terms vanish.
inline ddlqr::Matrix truncated_gramian(const ddlqr::Matrix& f, const ddlqr::Matrix& w, int terms) {
  ddlqr::Matrix sum = ddlqr::Matrix::Zero(f.rows(), f.cols());
  ddlqr::Matrix fk = ddlqr::Matrix::Identity(f.rows(), f.cols());
  for (int k = 0; k < terms; ++k) {
    sum += fk * w * fk.transpose();
    fk = f * fk;
  }
  return sum;
}

inline double max_abs(const ddlqr::Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing
