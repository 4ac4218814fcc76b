#pragma once

#include <vector>

#include "ddlqr/data.hpp"
#include "ddlqr/sdp.hpp"
#include "ddlqr/solution.hpp"
#include "ddlqr/system.hpp"

namespace ddlqr {

/// Interior point accuracy used by every data-driven route.
inline constexpr double kSynthesisTolerance = 1e-9;

/// Runs one formulation on a dataset.
///
/// Errors: InvalidInput (bad method or weight sizes), NotIdentifiable (rank
/// W0 < n+m, except direct_plain), OracleRequired (direct_ideal without D0),
/// Infeasible (program infeasible, including an identified pair that cannot
/// be stabilized), DegenerateRecovery (X0 Y too ill-conditioned to invert).
/// A gain that fails the post-check against the formulation's own closed
/// loop comes back with status numerical_failure.
LqrSolution synthesize(const Dataset& ds, const LqrWeights& w, const Method& method);

/// ||K - K_ref||_F / max(1, ||K_ref||_F).
double relative_gain_gap(const Matrix& k, const Matrix& k_ref);

/// 40 log-spaced points on [1e-5, 1].
std::vector<double> default_lambda_grid();

struct LambdaScan {
  std::vector<double> grid;
  LqrSolution orthogonal;
  // One entry per grid point; an entry whose synthesis threw carries
  // status numerical_failure and the error text in note.
  std::vector<LqrSolution> path;
  double lambda_star = 0.0;  // +inf when no grid point matches
  int star_index = -1;
};

/// Solves direct_orthogonal once and direct_regularized (Frobenius, rho = 0)
/// at every grid point. lambda_star is the first grid value whose gain is
/// within 1e-4 relative Frobenius of the orthogonal gain.
LambdaScan scan_lambda(const Dataset& ds, const LqrWeights& w, const std::vector<double>& grid);

/// Smallest grid lambda at which the penalty is exact, +inf if none.
/// The grid must be positive and strictly ascending.
double detect_lambda_star(const Dataset& ds, const LqrWeights& w,
                          const std::vector<double>& grid = default_lambda_grid());

}  // namespace ddlqr
