#include "ddlqr/data.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ddlqr/error.hpp"
#include "ddlqr/system.hpp"

namespace ddlqr {

void Dataset::validate() const {
  const Eigen::Index t = X0.cols();
  if (t < 1) throw InvalidInput("Dataset: T must be at least 1");
  if (U0.rows() < 1 || X0.rows() < 1) throw InvalidInput("Dataset: n and m must be positive");
  if (U0.cols() != t || X1.cols() != t) {
    throw InvalidInput("Dataset: U0, X0, X1 must all have T columns");
  }
  if (X1.rows() != X0.rows()) throw InvalidInput("Dataset: X0 and X1 row counts differ");
  if (D0 && (D0->rows() != X0.rows() || D0->cols() != t)) {
    throw InvalidInput("Dataset: D0 must be n x T");
  }
  linalg::require_finite(U0, "Dataset(U0)");
  linalg::require_finite(X0, "Dataset(X0)");
  linalg::require_finite(X1, "Dataset(X1)");
  if (D0) linalg::require_finite(*D0, "Dataset(D0)");
}

DerivedData derive(const Dataset& ds) {
  ds.validate();
  DerivedData out;
  const Eigen::Index n = ds.n();
  const Eigen::Index m = ds.m();
  const Eigen::Index t = ds.T();

  out.W0.resize(m + n, t);
  out.W0 << ds.U0, ds.X0;

  const linalg::SvdResult s = linalg::svd(out.W0);
  const double tol = linalg::default_rank_tolerance(s, out.W0.rows(), out.W0.cols());
  out.rank = (s.singular_values.array() > tol).count();
  out.identifiable = out.rank == m + n;
  out.W0_pinv = linalg::pinv(out.W0, tol > 0.0 ? std::optional<double>(tol) : std::nullopt);
  out.Pi = Matrix::Identity(t, t) - out.W0_pinv * out.W0;

  if (ds.D0) {
    if (!out.identifiable) {
      out.snr = 0.0;
    } else {
      const double noise = linalg::norm2(*ds.D0);
      const double signal = s.singular_values(m + n - 1);
      out.snr = noise == 0.0 ? std::numeric_limits<double>::infinity() : signal / noise;
    }
  }
  return out;
}

double snr_decibels(double snr) {
  if (snr == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(snr);
}

LtiSystem least_squares_id(const Dataset& ds) {
  const DerivedData d = derive(ds);
  if (!d.identifiable) {
    throw NotIdentifiable("not identifiable (rank W0 < n+m): rank " + std::to_string(d.rank) +
                          ", n+m = " + std::to_string(ds.n() + ds.m()));
  }
  const Matrix ba = ds.X1 * d.W0_pinv;
  return LtiSystem(ba.rightCols(ds.n()), ba.leftCols(ds.m()));
}

}  // namespace ddlqr
