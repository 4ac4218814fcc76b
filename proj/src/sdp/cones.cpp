#include "sdp/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ddlqr::sdp::detail {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest alpha >= 0 keeping x + alpha d inside the second-order cone, for x
// strictly interior. Roots of (x0 + a d0)^2 - |x1 + a d1|^2 = 0.
double soc_step(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& d) {
  const Eigen::Index k = x.size();
  const double a = d(0) * d(0) - d.tail(k - 1).squaredNorm();
  const double b = x(0) * d(0) - x.tail(k - 1).dot(d.tail(k - 1));
  const double c = std::max(x(0) * x(0) - x.tail(k - 1).squaredNorm(), 0.0);
  const double disc = b * b - a * c;
  if (a < 0.0 || (b < 0.0 && disc >= 0.0)) {
    const double denom = -b + std::sqrt(std::max(disc, 0.0));
    return denom > 0.0 ? c / denom : 0.0;
  }
  return kInf;
}

double soc_jnorm(const Eigen::Ref<const Vector>& x) {
  const double r = x.tail(x.size() - 1).norm();
  const double prod = (x(0) - r) * (x(0) + r);
  return x(0) > r && prod > 0.0 ? std::sqrt(prod) : -1.0;
}

}  // namespace

Cones::Cones(std::vector<int> soc_dims, std::vector<int> psd_dims)
    : soc_dims_(std::move(soc_dims)), psd_dims_(std::move(psd_dims)) {
  for (int k : soc_dims_) {
    soc_off_.push_back(size_);
    size_ += k;
    degree_ += 1;
  }
  for (int k : psd_dims_) {
    psd_off_.push_back(size_);
    size_ += svec_size(k);
    degree_ += k;
  }
}

Matrix smat(const Eigen::Ref<const Vector>& v, int k) {
  Matrix m(k, k);
  Eigen::Index idx = 0;
  for (int j = 0; j < k; ++j) {
    m(j, j) = v(idx++);
    for (int i = j + 1; i < k; ++i) {
      m(i, j) = m(j, i) = v(idx++) / kSqrt2;
    }
  }
  return m;
}

void svec(const Matrix& m, Eigen::Ref<Vector> out) {
  const auto k = static_cast<int>(m.rows());
  Eigen::Index idx = 0;
  for (int j = 0; j < k; ++j) {
    out(idx++) = m(j, j);
    for (int i = j + 1; i < k; ++i) out(idx++) = kSqrt2 * 0.5 * (m(i, j) + m(j, i));
  }
}

Vector Cones::identity() const {
  Vector e = Vector::Zero(size_);
  for (std::size_t i = 0; i < soc_dims_.size(); ++i) e(soc_off_[i]) = 1.0;
  for (std::size_t i = 0; i < psd_dims_.size(); ++i) {
    Eigen::Index idx = psd_off_[i];
    for (int j = 0; j < psd_dims_[i]; ++j) {
      e(idx) = 1.0;
      idx += psd_dims_[i] - j;
    }
  }
  return e;
}

Vector Cones::product(const Vector& u, const Vector& v) const {
  Vector out(size_);
  for (std::size_t i = 0; i < soc_dims_.size(); ++i) {
    const Eigen::Index o = soc_off_[i], k = soc_dims_[i];
    out(o) = u.segment(o, k).dot(v.segment(o, k));
    out.segment(o + 1, k - 1) = u(o) * v.segment(o + 1, k - 1) + v(o) * u.segment(o + 1, k - 1);
  }
  for (std::size_t i = 0; i < psd_dims_.size(); ++i) {
    const int k = psd_dims_[i];
    const Eigen::Index o = psd_off_[i];
    const Matrix a = smat(u.segment(o, svec_size(k)), k);
    const Matrix b = smat(v.segment(o, svec_size(k)), k);
    const Matrix ab = a * b;
    svec(0.5 * (ab + ab.transpose()), out.segment(o, svec_size(k)));
  }
  return out;
}

double Cones::min_eigenvalue(const Vector& u) const {
  double lo = kInf;
  for (std::size_t i = 0; i < soc_dims_.size(); ++i) {
    const Eigen::Index o = soc_off_[i], k = soc_dims_[i];
    lo = std::min(lo, u(o) - u.segment(o + 1, k - 1).norm());
  }
  for (std::size_t i = 0; i < psd_dims_.size(); ++i) {
    const int k = psd_dims_[i];
    lo = std::min(lo, linalg::min_eigenvalue_symmetric(smat(u.segment(psd_off_[i], svec_size(k)), k)));
  }
  return lo;
}

bool NtScaling::compute(const Cones& cones, const Vector& s, const Vector& z) {
  soc_.assign(cones.soc_dims().size(), Soc{});
  psd_.assign(cones.psd_dims().size(), Psd{});
  lambda_.resize(cones.size());

  for (std::size_t i = 0; i < soc_.size(); ++i) {
    const Eigen::Index o = cones.soc_offset(i), k = cones.soc_dims()[i];
    const auto sk = s.segment(o, k);
    const auto zk = z.segment(o, k);
    const double a = soc_jnorm(sk);
    const double b = soc_jnorm(zk);
    if (!(a > 0.0) || !(b > 0.0)) return false;
    const Vector sb = sk / a;
    const Vector zb = zk / b;
    const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
    Vector w(k);
    w(0) = (sb(0) + zb(0)) / (2.0 * gamma);
    w.tail(k - 1) = (sb.tail(k - 1) - zb.tail(k - 1)) / (2.0 * gamma);
    soc_[i].beta = std::sqrt(a / b);
    soc_[i].w = std::move(w);
  }

  for (std::size_t i = 0; i < psd_.size(); ++i) {
    const int k = cones.psd_dims()[i];
    const Eigen::Index o = cones.psd_offset(i);
    const Eigen::LLT<Matrix> ls(smat(s.segment(o, svec_size(k)), k));
    const Eigen::LLT<Matrix> lz(smat(z.segment(o, svec_size(k)), k));
    if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    const Matrix Ls = ls.matrixL();
    const Matrix Lz = lz.matrixL();
    const Eigen::JacobiSVD<Matrix> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& eig = svd.singularValues();
    if (!(eig.minCoeff() > 0.0) || !eig.allFinite()) return false;
    const Vector isq = eig.cwiseSqrt().cwiseInverse();
    psd_[i].r = Ls * svd.matrixV() * isq.asDiagonal();
    psd_[i].r_inv = isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
    psd_[i].eig = eig;
  }

  lambda_ = z;
  apply(cones, Op::W, lambda_);
  // The PSD part of lambda is diagonal by construction; store it exactly.
  for (std::size_t i = 0; i < psd_.size(); ++i) {
    const int k = cones.psd_dims()[i];
    svec(Matrix(psd_[i].eig.asDiagonal()), lambda_.segment(cones.psd_offset(i), svec_size(k)));
  }
  return lambda_.allFinite();
}

void NtScaling::apply(const Cones& cones, Op op, Eigen::Ref<Vector> v) const {
  const bool inverse = op == Op::Winv || op == Op::Wit;
  for (std::size_t i = 0; i < soc_.size(); ++i) {
    const Eigen::Index o = cones.soc_offset(i), k = cones.soc_dims()[i];
    const Soc& c = soc_[i];
    // W is symmetric; W^-1 flips the sign of w1 and divides by beta.
    const double w0 = c.w(0);
    const double sign = inverse ? -1.0 : 1.0;
    const double scale = inverse ? 1.0 / c.beta : c.beta;
    auto x = v.segment(o, k);
    const double x0 = x(0);
    const double w1x1 = sign * c.w.tail(k - 1).dot(x.tail(k - 1));
    x(0) = scale * (w0 * x0 + w1x1);
    x.tail(k - 1) = scale * (x.tail(k - 1) + (sign * (x0 + w1x1 / (1.0 + w0))) * c.w.tail(k - 1));
  }
  for (std::size_t i = 0; i < psd_.size(); ++i) {
    const int k = cones.psd_dims()[i];
    const Eigen::Index o = cones.psd_offset(i);
    auto seg = v.segment(o, svec_size(k));
    const Matrix u = smat(seg, k);
    const Psd& c = psd_[i];
    Matrix out;
    switch (op) {
      case Op::W: out = c.r.transpose() * u * c.r; break;
      case Op::Wt: out = c.r * u * c.r.transpose(); break;
      case Op::Winv: out = c.r_inv.transpose() * u * c.r_inv; break;
      case Op::Wit: out = c.r_inv * u * c.r_inv.transpose(); break;
    }
    svec(out, seg);
  }
}

void NtScaling::apply_columns(const Cones& cones, Op op, Matrix& m) const {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    Vector col = m.col(j);
    apply(cones, op, col);
    m.col(j) = col;
  }
}

Vector NtScaling::inverse_product(const Cones& cones, const Vector& r) const {
  Vector u(cones.size());
  for (std::size_t i = 0; i < soc_.size(); ++i) {
    const Eigen::Index o = cones.soc_offset(i), k = cones.soc_dims()[i];
    const auto l = lambda_.segment(o, k);
    const auto rk = r.segment(o, k);
    const double det = l(0) * l(0) - l.tail(k - 1).squaredNorm();
    const double u0 = (l(0) * rk(0) - l.tail(k - 1).dot(rk.tail(k - 1))) / det;
    u(o) = u0;
    u.segment(o + 1, k - 1) = (rk.tail(k - 1) - u0 * l.tail(k - 1)) / l(0);
  }
  for (std::size_t i = 0; i < psd_.size(); ++i) {
    const int k = cones.psd_dims()[i];
    const Vector& eig = psd_[i].eig;
    Eigen::Index idx = cones.psd_offset(i);
    for (int j = 0; j < k; ++j) {
      for (int row = j; row < k; ++row, ++idx) u(idx) = 2.0 * r(idx) / (eig(row) + eig(j));
    }
  }
  return u;
}

double NtScaling::max_step(const Cones& cones, const Vector& d) const {
  double alpha = kInf;
  for (std::size_t i = 0; i < soc_.size(); ++i) {
    const Eigen::Index o = cones.soc_offset(i), k = cones.soc_dims()[i];
    alpha = std::min(alpha, soc_step(lambda_.segment(o, k), d.segment(o, k)));
  }
  for (std::size_t i = 0; i < psd_.size(); ++i) {
    const int k = cones.psd_dims()[i];
    const Vector isq = psd_[i].eig.cwiseSqrt().cwiseInverse();
    const Matrix dm = isq.asDiagonal() * smat(d.segment(cones.psd_offset(i), svec_size(k)), k) *
                      isq.asDiagonal();
    const double lo = linalg::min_eigenvalue_symmetric(dm);
    if (lo < 0.0) alpha = std::min(alpha, -1.0 / lo);
  }
  return alpha;
}

}  // namespace ddlqr::sdp::detail
