#pragma once

// Cone algebra for the interior point solver. A cone vector stores all
// second-order cones first, then every PSD block in scaled lower-triangular
// form (svec: off-diagonals multiplied by sqrt(2), so that the Euclidean
// inner product equals the trace inner product).

#include <vector>

#include "ddlqr/linalg.hpp"

namespace ddlqr::sdp::detail {

class Cones {
 public:
  Cones(std::vector<int> soc_dims, std::vector<int> psd_dims);

  [[nodiscard]] const std::vector<int>& soc_dims() const { return soc_dims_; }
  [[nodiscard]] const std::vector<int>& psd_dims() const { return psd_dims_; }
  [[nodiscard]] Eigen::Index soc_offset(std::size_t i) const { return soc_off_[i]; }
  [[nodiscard]] Eigen::Index psd_offset(std::size_t i) const { return psd_off_[i]; }
  [[nodiscard]] Eigen::Index size() const { return size_; }
  /// Barrier degree: 1 per second-order cone, k per k x k block.
  [[nodiscard]] int degree() const { return degree_; }

  [[nodiscard]] Vector identity() const;
  /// Jordan product: (u'v, u0 v1 + v0 u1) on SOC, (UV + VU)/2 on PSD.
  [[nodiscard]] Vector product(const Vector& u, const Vector& v) const;
  /// Smallest Jordan eigenvalue over all blocks.
  [[nodiscard]] double min_eigenvalue(const Vector& u) const;

 private:
  std::vector<int> soc_dims_, psd_dims_;
  std::vector<Eigen::Index> soc_off_, psd_off_;
  Eigen::Index size_ = 0;
  int degree_ = 0;
};

inline Eigen::Index svec_size(int k) { return static_cast<Eigen::Index>(k) * (k + 1) / 2; }
Matrix smat(const Eigen::Ref<const Vector>& v, int k);
void svec(const Matrix& m, Eigen::Ref<Vector> out);

/// Nesterov-Todd scaling W of a strictly interior pair (s, z): W z = W^-T s = lambda.
class NtScaling {
 public:
  /// Returns false when s or z is not strictly interior (factorization fails).
  bool compute(const Cones& cones, const Vector& s, const Vector& z);

  [[nodiscard]] const Vector& lambda() const { return lambda_; }

  enum class Op { W, Wt, Winv, Wit };  // W, W^T, W^-1, W^-T
  void apply(const Cones& cones, Op op, Eigen::Ref<Vector> v) const;
  /// Applies the operator to every column.
  void apply_columns(const Cones& cones, Op op, Matrix& m) const;

  /// Solves lambda o u = r.
  [[nodiscard]] Vector inverse_product(const Cones& cones, const Vector& r) const;

  /// Largest alpha with lambda + alpha d in the cone (infinity when unbounded).
  [[nodiscard]] double max_step(const Cones& cones, const Vector& d) const;

 private:
  struct Soc {
    double beta = 1.0;
    Vector w;  // J-normalized NT point, w0^2 - |w1|^2 = 1
  };
  struct Psd {
    Matrix r, r_inv;
    Vector eig;  // diagonal of the scaled point
  };
  std::vector<Soc> soc_;
  std::vector<Psd> psd_;
  Vector lambda_;
};

}  // namespace ddlqr::sdp::detail
