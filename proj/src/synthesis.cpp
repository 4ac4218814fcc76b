#include "ddlqr/synthesis.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ddlqr/error.hpp"

namespace ddlqr {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::indirect_ce: return "indirect_ce";
    case Variant::compact: return "compact";
    case Variant::direct_plain: return "direct_plain";
    case Variant::direct_orthogonal: return "direct_orthogonal";
    case Variant::direct_regularized: return "direct_regularized";
    case Variant::direct_ideal: return "direct_ideal";
  }
  return "indirect_ce";
}

std::string_view to_string(NormKind k) { return k == NormKind::spectral ? "spectral" : "frobenius"; }

std::string_view to_string(LqrStatus s) {
  return s == LqrStatus::optimal ? "optimal" : "numerical_failure";
}

Variant parse_variant(std::string_view s) {
  for (Variant v : {Variant::indirect_ce, Variant::compact, Variant::direct_plain,
                    Variant::direct_orthogonal, Variant::direct_regularized, Variant::direct_ideal}) {
    if (s == to_string(v)) return v;
  }
  throw InvalidInput("unknown method variant '" + std::string(s) + "'");
}

NormKind parse_norm_kind(std::string_view s) {
  if (s == "frobenius") return NormKind::frobenius;
  if (s == "spectral") return NormKind::spectral;
  throw InvalidInput("unknown norm kind '" + std::string(s) + "'");
}

void Method::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidInput("Method: lambda must be finite and >= 0");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw InvalidInput("Method: rho must be finite and >= 0");
  if (variant != Variant::direct_regularized && (lambda != 0.0 || rho != 0.0)) {
    throw InvalidInput("Method: lambda and rho apply to direct_regularized only");
  }
  if (zero_gain && (variant == Variant::indirect_ce || variant == Variant::compact)) {
    throw InvalidInput("Method: zero_gain applies to the direct formulations only");
  }
}

double relative_gain_gap(const Matrix& k, const Matrix& k_ref) {
  return (k - k_ref).norm() / std::max(1.0, k_ref.norm());
}

std::vector<double> default_lambda_grid() {
  std::vector<double> g(40);
  for (int i = 0; i < 40; ++i) g[static_cast<std::size_t>(i)] = std::pow(10.0, -5.0 + 5.0 * i / 39.0);
  return g;
}

namespace {

using sdp::AffineExpr;
using sdp::AffineMatrix;

constexpr double kMaxRecoveryCondition = 1e12;

AffineMatrix identity_expr(Eigen::Index n) { return AffineMatrix::constant(Matrix::Identity(n, n)); }

void check_weights(const Dataset& ds, const LqrWeights& w) {
  if (w.Q().rows() != ds.n() || w.R().rows() != ds.m()) {
    throw InvalidInput("weights do not match the dataset dimensions (Q " + std::to_string(w.Q().rows()) +
                       "x" + std::to_string(w.Q().rows()) + ", R " + std::to_string(w.R().rows()) + "x" +
                       std::to_string(w.R().rows()) + ")");
  }
}

sdp::ConicSolution run(const sdp::ConicProgram& prog) {
  sdp::SolverOptions opts;
  opts.tol = kSynthesisTolerance;
  sdp::ConicSolution s = sdp::solve(prog, opts);
  if (s.status == sdp::SolveStatus::infeasible) throw Infeasible("LQR program infeasible: " + s.detail);
  if (s.status == sdp::SolveStatus::unbounded) throw NumericalFailure("LQR program reported unbounded: " + s.detail);
  return s;
}

// K = U0 Y (X0 Y)^-1 with a conditioning guard.
Matrix recover_gain(const Matrix& u0y, const Matrix& x0y) {
  const linalg::SvdResult s = linalg::svd(x0y);
  if (!(s.min() > 0.0) || s.max() / s.min() > kMaxRecoveryCondition) {
    throw DegenerateRecovery("X0 Y is singular to working precision (condition " +
                             std::to_string(s.min() > 0.0 ? s.max() / s.min() : INFINITY) + ")");
  }
  return x0y.transpose().partialPivLu().solve(u0y.transpose()).transpose();
}

struct DataProgramSpec {
  const Matrix* x1 = nullptr;  // X1, or X1 - D0 for the ideal formulation
  bool orthogonal = false;
  double lambda = 0.0;
  double rho = 0.0;
  NormKind norm = NormKind::frobenius;
  bool zero_gain = false;
};

// Data-parameterized program over Y (T x n) and X (m x m):
//   min trace(Q X0Y) + trace(X) [+ lambda ||Pi Y|| + rho trace(Y (X0Y)^-1 Y')]
//   s.t. X0Y symmetric, [X0Y - I, X1Y; *, X0Y] >= 0, [X, R^1/2 U0 Y; *, X0Y] >= 0.
LqrSolution solve_data_program(const Dataset& ds, const DerivedData& d, const LqrWeights& w,
                               const DataProgramSpec& spec) {
  const Eigen::Index n = ds.n(), m = ds.m(), T = ds.T();
  sdp::ConicProgram prog;
  const AffineMatrix Y = prog.add_matrix_variable(T, n);
  const AffineMatrix X = prog.add_symmetric_variable(m);

  const AffineMatrix x0y = ds.X0 * Y;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) prog.add_equality(x0y(i, j) - x0y(j, i));
  const AffineMatrix P = x0y.symmetric_part();
  const AffineMatrix x1y = *spec.x1 * Y;
  const AffineMatrix ruy = w.R_sqrt() * (ds.U0 * Y);

  prog.add_psd(AffineMatrix::blocks(P - identity_expr(n), x1y, x1y.transpose(), P));
  prog.add_psd(AffineMatrix::blocks(X, ruy, ruy.transpose(), P));

  AffineExpr objective = (w.Q() * P).trace() + X.trace();

  // Orthonormal basis of range(Pi): Pi Y = 0 iff N' Y = 0, and ||Pi Y||_F = ||N' Y||_F.
  Matrix N;
  if (spec.orthogonal || spec.lambda > 0.0) N = linalg::null_space(d.W0);
  if (spec.orthogonal && N.cols() > 0) prog.add_equality(N.transpose() * Y);
  if (spec.zero_gain) prog.add_equality(ds.U0 * Y);

  if (spec.lambda > 0.0 && N.cols() > 0) {
    const int t = prog.add_variable();
    if (spec.norm == NormKind::frobenius) {
      prog.add_soc(AffineExpr::variable(t), (N.transpose() * Y).vec());
    } else {
      // ||Pi Y||_2 <= t  <=>  [t I_T, Pi Y; (Pi Y)', t I_n] >= 0.
      const AffineMatrix piy = d.Pi * Y;
      auto scaled_identity = [t](Eigen::Index k) {
        AffineMatrix a(k, k);
        for (Eigen::Index i = 0; i < k; ++i) a(i, i) = AffineExpr::variable(t);
        return a;
      };
      prog.add_psd(AffineMatrix::blocks(scaled_identity(T), piy, piy.transpose(), scaled_identity(n)));
    }
    objective += spec.lambda * AffineExpr::variable(t);
  }

  if (spec.rho > 0.0) {
    // Row-wise epigraph: v_i >= y_i P^-1 y_i', so sum v_i >= trace(G P G').
    for (Eigen::Index i = 0; i < T; ++i) {
      const int v = prog.add_variable();
      AffineMatrix vi(1, 1);
      vi(0, 0) = AffineExpr::variable(v);
      const AffineMatrix yi = Y.block(i, 0, 1, n);
      prog.add_psd(AffineMatrix::blocks(vi, yi, yi.transpose(), P));
      objective += spec.rho * AffineExpr::variable(v);
    }
  }
  prog.set_objective(objective);

  const sdp::ConicSolution s = run(prog);
  LqrSolution sol;
  sol.Y = Y.evaluate(s.values);
  sol.X = linalg::symmetrize(X.evaluate(s.values));
  const Matrix x0y_val = ds.X0 * sol.Y;
  sol.P = linalg::symmetrize(x0y_val);
  sol.K = recover_gain(ds.U0 * sol.Y, x0y_val);
  sol.G = x0y_val.transpose().partialPivLu().solve(sol.Y.transpose()).transpose();
  sol.objective = s.objective;
  sol.solver_iterations = s.iterations;
  if (s.status != sdp::SolveStatus::optimal) {
    sol.status = LqrStatus::numerical_failure;
    sol.note = "solver: " + std::string(sdp::to_string(s.status)) + " (" + s.detail + ")";
    return sol;
  }
  const double rho_cl = linalg::spectral_radius(*spec.x1 * sol.G);
  if (!(rho_cl < 1.0)) {
    sol.status = LqrStatus::numerical_failure;
    sol.note = "post-check: data closed loop has spectral radius " + std::to_string(rho_cl);
  }
  return sol;
}

// Model-based program on (A_hat, B_hat) over P, L = K P and X.
LqrSolution solve_model_program(const LtiSystem& sys, const LqrWeights& w) {
  const Eigen::Index n = sys.n(), m = sys.m();
  sdp::ConicProgram prog;
  const AffineMatrix P = prog.add_symmetric_variable(n);
  const AffineMatrix L = prog.add_matrix_variable(m, n);
  const AffineMatrix X = prog.add_symmetric_variable(m);
  const AffineMatrix cl = sys.A() * P + sys.B() * L;
  const AffineMatrix rl = w.R_sqrt() * L;
  prog.add_psd(AffineMatrix::blocks(P - identity_expr(n), cl, cl.transpose(), P));
  prog.add_psd(AffineMatrix::blocks(X, rl, rl.transpose(), P));
  prog.set_objective((w.Q() * P).trace() + X.trace());

  const sdp::ConicSolution s = run(prog);
  LqrSolution sol;
  sol.P = linalg::symmetrize(P.evaluate(s.values));
  sol.X = linalg::symmetrize(X.evaluate(s.values));
  sol.K = recover_gain(L.evaluate(s.values), sol.P);
  sol.objective = s.objective;
  sol.solver_iterations = s.iterations;
  if (s.status != sdp::SolveStatus::optimal) {
    sol.status = LqrStatus::numerical_failure;
    sol.note = "solver: " + std::string(sdp::to_string(s.status)) + " (" + s.detail + ")";
  }
  return sol;
}

void require_identifiable(const DerivedData& d, const Dataset& ds) {
  if (!d.identifiable) {
    throw NotIdentifiable("not identifiable (rank W0 < n+m): rank " + std::to_string(d.rank) +
                          ", n+m = " + std::to_string(ds.n() + ds.m()));
  }
}

// Fills the data-side fields of a model-based solution: G = W0^+ [K; I], Y = G P.
void attach_data_view(LqrSolution& sol, const Dataset& ds, const DerivedData& d) {
  Matrix ki(ds.m() + ds.n(), ds.n());
  ki << sol.K, Matrix::Identity(ds.n(), ds.n());
  sol.G = d.W0_pinv * ki;
  sol.Y = sol.G * sol.P;
}

LqrSolution certainty_equivalent(const Dataset& ds, const DerivedData& d, const LqrWeights& w) {
  require_identifiable(d, ds);
  const LtiSystem id = least_squares_id(ds);
  LqrSolution sol;
  try {
    sol = model_lqr(id, w);
  } catch (const NotStabilizable& e) {
    throw Infeasible(std::string("identified pair cannot be stabilized: ") + e.what());
  }
  attach_data_view(sol, ds, d);
  return sol;
}

LqrSolution compact(const Dataset& ds, const DerivedData& d, const LqrWeights& w) {
  require_identifiable(d, ds);
  const LtiSystem id = least_squares_id(ds);
  LqrSolution sol = solve_model_program(id, w);

  LqrSolution riccati;
  try {
    riccati = model_lqr(id, w);
  } catch (const NotStabilizable& e) {
    throw NumericalFailure(std::string("compact program feasible but Riccati route failed: ") + e.what());
  }
  sol.route_discrepancy = relative_gain_gap(sol.K, riccati.K);
  attach_data_view(sol, ds, d);
  if (sol.status == LqrStatus::optimal && *sol.route_discrepancy > 1e-5) {
    sol.status = LqrStatus::numerical_failure;
    sol.note = "LMI and Riccati routes disagree (relative gap " + std::to_string(*sol.route_discrepancy) + ")";
  }
  if (sol.status == LqrStatus::optimal && !linalg::is_schur(closed_loop(id, sol.K))) {
    sol.status = LqrStatus::numerical_failure;
    sol.note = "post-check: identified closed loop is not Schur";
  }
  return sol;
}

}  // namespace

LqrSolution synthesize(const Dataset& ds, const LqrWeights& w, const Method& method) {
  method.validate();
  ds.validate();
  check_weights(ds, w);
  const DerivedData d = derive(ds);

  LqrSolution sol;
  DataProgramSpec spec;
  spec.x1 = &ds.X1;
  spec.zero_gain = method.zero_gain;
  Matrix x1_ideal;
  switch (method.variant) {
    case Variant::indirect_ce:
      sol = certainty_equivalent(ds, d, w);
      break;
    case Variant::compact:
      sol = compact(ds, d, w);
      break;
    case Variant::direct_plain:
      sol = solve_data_program(ds, d, w, spec);
      break;
    case Variant::direct_orthogonal:
      require_identifiable(d, ds);
      spec.orthogonal = true;
      sol = solve_data_program(ds, d, w, spec);
      break;
    case Variant::direct_regularized:
      require_identifiable(d, ds);
      spec.lambda = method.lambda;
      spec.rho = method.rho;
      spec.norm = method.norm;
      sol = solve_data_program(ds, d, w, spec);
      break;
    case Variant::direct_ideal:
      require_identifiable(d, ds);
      if (!ds.D0) throw OracleRequired("direct_ideal needs the disturbance record D0");
      x1_ideal = ds.X1 - *ds.D0;
      spec.x1 = &x1_ideal;
      sol = solve_data_program(ds, d, w, spec);
      break;
  }
  sol.method = method;
  return sol;
}

LambdaScan scan_lambda(const Dataset& ds, const LqrWeights& w, const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidInput("lambda grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw InvalidInput("lambda grid must be positive, finite and strictly ascending");
    }
  }
  LambdaScan scan;
  scan.grid = grid;
  scan.orthogonal = synthesize(ds, w, Method::of(Variant::direct_orthogonal));
  scan.lambda_star = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    LqrSolution s;
    try {
      s = synthesize(ds, w, Method::regularized(grid[i]));
    } catch (const Infeasible&) {
      throw;
    } catch (const Error& e) {
      s.status = LqrStatus::numerical_failure;
      s.note = e.what();
      s.method = Method::regularized(grid[i]);
    }
    if (scan.star_index < 0 && s.status == LqrStatus::optimal && s.K.size() > 0 &&
        relative_gain_gap(s.K, scan.orthogonal.K) <= 1e-4) {
      scan.star_index = static_cast<int>(i);
      scan.lambda_star = grid[i];
    }
    scan.path.push_back(std::move(s));
  }
  return scan;
}

double detect_lambda_star(const Dataset& ds, const LqrWeights& w, const std::vector<double>& grid) {
  return scan_lambda(ds, w, grid).lambda_star;
}

}  // namespace ddlqr
