#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ddlqr/sdp.hpp"
#include "sdp/cones.hpp"

namespace ddlqr::sdp {

namespace {

using detail::Cones;
using detail::NtScaling;
using Op = NtScaling::Op;

// minimize c'x  s.t.  G x + s = h,  s in K.  G has orthonormal columns.
struct StandardForm {
  Vector c;
  Matrix G;
  Vector h;
  Cones cones;
};

struct IpmResult {
  SolveStatus status = SolveStatus::numerical_failure;
  Vector x;
  int iterations = 0;
  std::string detail;
};

Vector shift_interior(const Cones& cones, Vector v) {
  const double lo = cones.min_eigenvalue(v);
  if (lo <= 0.0) v += (1.0 + -lo) * cones.identity();
  return v;
}

IpmResult run_ipm(const StandardForm& p, const SolverOptions& opts) {
  const Cones& K = p.cones;
  const Matrix& G = p.G;
  const Vector& c = p.c;
  const Vector& h = p.h;
  const Eigen::Index nx = G.cols();
  const double resx0 = std::max(1.0, c.norm());
  const double resz0 = std::max(1.0, h.norm());
  const Vector e = K.identity();
  const double deg = K.degree();

  IpmResult out;
  Vector x = G.transpose() * h;
  Vector s = shift_interior(K, h - G * x);
  Vector z = shift_interior(K, -G * c);
  double tau = 1.0, kappa = 1.0;

  NtScaling W;
  Vector best_x = x;
  std::ostringstream why;

  for (int it = 0; it <= opts.max_iterations; ++it) {
    out.iterations = it;
    const Vector rx = G.transpose() * z + c * tau;
    const Vector rz = G * x + s - h * tau;
    const double cx = c.dot(x), hz = h.dot(z);
    const double rt = kappa + cx + hz;
    const double gap = s.dot(z);
    const double mu = (gap + tau * kappa) / (deg + 1.0);
    const double pcost = cx / tau;
    const double dcost = -hz / tau;
    const double pres = rz.norm() / tau / resz0;
    const double dres = rx.norm() / tau / resx0;
    const double relgap = gap / (tau * tau) / std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));
    best_x = x / tau;

    if (pres <= opts.tol && dres <= opts.tol && relgap <= opts.tol) {
      out.status = SolveStatus::optimal;
      out.x = best_x;
      return out;
    }
    if (hz < 0.0) {
      const double pinf = (G.transpose() * z).norm() / resx0 / -hz;
      if (pinf <= opts.tol) {
        out.status = SolveStatus::infeasible;
        out.detail = "primal infeasibility certificate";
        return out;
      }
    }
    if (cx < 0.0) {
      const double dinf = (G * x + s).norm() / resz0 / -cx;
      if (dinf <= opts.tol) {
        out.status = SolveStatus::unbounded;
        out.detail = "dual infeasibility certificate";
        return out;
      }
    }
    if (it == opts.max_iterations) {
      why << "iteration limit reached (pres " << pres << ", dres " << dres << ", gap " << relgap << ")";
      break;
    }
    if (!W.compute(K, s, z)) {
      why << "scaling failed at iteration " << it;
      break;
    }
    const Vector& lam = W.lambda();

    Matrix Gs = G;
    W.apply_columns(K, Op::Wit, Gs);
    Matrix H = Gs.transpose() * Gs;
    Eigen::LLT<Matrix> llt(H);
    if (llt.info() != Eigen::Success) {
      H.diagonal().array() += 1e-13 * std::max(1.0, H.diagonal().maxCoeff());
      llt.compute(H);
      if (llt.info() != Eigen::Success) {
        why << "Newton system singular at iteration " << it;
        break;
      }
    }
    Vector hs = h;
    W.apply(K, Op::Wit, hs);

    // Solves [0 G'; G -W'W][dx; dz] = [a; b] with dzt = W dz, given bs = W^-T b.
    auto kkt = [&](const Vector& a, const Vector& bs, Vector& dx, Vector& dzt) {
      dx = llt.solve(a + Gs.transpose() * bs);
      dzt = Gs * dx - bs;
      // One step of iterative refinement on the reduced system.
      const Vector res = a + Gs.transpose() * bs - H * dx;
      if (res.norm() > 1e-14 * (a.norm() + 1.0)) {
        dx += llt.solve(res);
        dzt = Gs * dx - bs;
      }
    };

    Vector x1, z1;
    kkt(-c, hs, x1, z1);
    const double denom_base = c.dot(x1) + hs.dot(z1);
    const Vector lam_sq = K.product(lam, lam);

    struct Dir {
      Vector dx, dzt, dst;
      double dtau = 0.0, dkappa = 0.0;
    };
    auto direction = [&](double sigma, const Vector* corr_s, const Vector* corr_z, double corr_tk) {
      Dir d;
      const double f = 1.0 - sigma;
      Vector r4 = -lam_sq + sigma * mu * e;
      if (corr_s != nullptr) r4 -= K.product(*corr_s, *corr_z);
      const double r5 = -tau * kappa + sigma * mu - corr_tk;
      const Vector lr4 = W.inverse_product(K, r4);
      Vector bs = -f * rz;
      W.apply(K, Op::Wit, bs);
      bs -= lr4;
      Vector x2, z2;
      kkt(-f * rx, bs, x2, z2);
      const double r3 = -f * rt;
      d.dtau = (r3 - r5 / tau - c.dot(x2) - hs.dot(z2)) / (denom_base - kappa / tau);
      d.dx = x2 + d.dtau * x1;
      d.dzt = z2 + d.dtau * z1;
      d.dkappa = (r5 - kappa * d.dtau) / tau;
      d.dst = lr4 - d.dzt;
      return d;
    };
    auto step_limit = [&](const Dir& d) {
      double a = std::min(W.max_step(K, d.dst), W.max_step(K, d.dzt));
      if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
      return a;
    };

    const Dir aff = direction(0.0, nullptr, nullptr, 0.0);
    const double alpha_aff = std::min(1.0, step_limit(aff));
    const double sigma = std::pow(1.0 - alpha_aff, 3);
    const Dir d = direction(sigma, &aff.dst, &aff.dzt, aff.dtau * aff.dkappa);
    const double alpha = std::min(1.0, 0.99 * step_limit(d));
    if (!std::isfinite(alpha) || alpha < 1e-12 || !d.dx.allFinite()) {
      why << "step length collapsed at iteration " << it;
      break;
    }

    Vector ds = d.dst, dz = d.dzt;
    W.apply(K, Op::Wt, ds);
    W.apply(K, Op::Winv, dz);
    x += alpha * d.dx;
    s += alpha * ds;
    z += alpha * dz;
    tau += alpha * d.dtau;
    kappa += alpha * d.dkappa;
    if (!(tau > 0.0) || !(kappa > 0.0) || !x.allFinite()) {
      why << "iterate left the cone at iteration " << it;
      break;
    }
  }
  out.status = SolveStatus::numerical_failure;
  out.x = best_x;
  out.detail = why.str();
  (void)nx;
  return out;
}

// Dense row for an affine expression: coefficients into `row`, returns constant.
template <typename Row>
double fill_row(const AffineExpr& e, Row&& row) {
  for (const LinearTerm& t : e.terms()) row(t.var) += t.coef;
  return e.constant();
}

}  // namespace

ConicSolution solve(const ConicProgram& p, const SolverOptions& opts) {
  const Eigen::Index nv = p.num_variables();
  ConicSolution sol;
  sol.values = Vector::Zero(nv);

  // Equalities A v = b, eliminated through v = v0 + N y.
  const auto neq = static_cast<Eigen::Index>(p.equalities().size());
  Vector v0 = Vector::Zero(nv);
  Matrix N = Matrix::Identity(nv, nv);
  if (neq > 0) {
    Matrix A = Matrix::Zero(neq, nv);
    Vector b(neq);
    for (Eigen::Index i = 0; i < neq; ++i) {
      b(i) = -fill_row(p.equalities()[static_cast<std::size_t>(i)], A.row(i));
    }
    const Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double tol = linalg::default_rank_tolerance(A);
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > tol) ++r;
    v0 = svd.matrixV().leftCols(r) *
         (svd.matrixU().leftCols(r).transpose() * b).cwiseQuotient(sv.head(r));
    if ((A * v0 - b).norm() > 1e-9 * std::max(1.0, b.norm())) {
      sol.status = SolveStatus::infeasible;
      sol.detail = "inconsistent equality constraints";
      return sol;
    }
    N = svd.matrixV().rightCols(nv - r);
  }

  // Cone rows s(v) = F v + f, SOC blocks first, then PSD blocks in svec order.
  std::vector<int> soc_dims, psd_dims;
  for (const SocConstraint& sc : p.soc_constraints()) soc_dims.push_back(static_cast<int>(sc.u.size()) + 1);
  for (const AffineMatrix& m : p.psd_blocks()) psd_dims.push_back(static_cast<int>(m.rows()));
  Cones cones(soc_dims, psd_dims);
  Matrix F = Matrix::Zero(cones.size(), nv);
  Vector f = Vector::Zero(cones.size());
  {
    Eigen::Index row = 0;
    for (const SocConstraint& sc : p.soc_constraints()) {
      f(row) = fill_row(sc.t, F.row(row));
      ++row;
      for (const AffineExpr& e : sc.u) {
        f(row) = fill_row(e, F.row(row));
        ++row;
      }
    }
    constexpr double kSqrt2 = 1.4142135623730950488;
    for (const AffineMatrix& m : p.psd_blocks()) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        f(row) = fill_row(m(j, j), F.row(row));
        ++row;
        for (Eigen::Index i = j + 1; i < m.rows(); ++i) {
          f(row) = kSqrt2 * fill_row(m(i, j), F.row(row));
          F.row(row) *= kSqrt2;
          ++row;
        }
      }
    }
  }

  Eigen::RowVectorXd cv = Eigen::RowVectorXd::Zero(nv);
  const double c0 = fill_row(p.objective(), cv);
  const Vector cy = N.transpose() * cv.transpose();
  const Matrix G0 = -F * N;
  const Vector h = F * v0 + f;

  // Directions that do not enter any cone: either irrelevant or unbounded.
  Matrix Vr;
  Vector sig;
  Matrix U;
  if (G0.cols() > 0 && G0.rows() > 0) {
    const Eigen::JacobiSVD<Matrix> svd(G0, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double tol = 1e-10 * (sv.size() ? sv(0) : 0.0) * static_cast<double>(std::max(G0.rows(), G0.cols()));
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > tol && sv(r) > 0.0) ++r;
    const Matrix Vn = svd.matrixV().rightCols(G0.cols() - r);
    if (Vn.cols() > 0 && (Vn.transpose() * cy).norm() > 1e-9 * std::max(1.0, cy.norm())) {
      sol.status = SolveStatus::unbounded;
      sol.detail = "objective decreases along a direction no constraint restricts";
      return sol;
    }
    U = svd.matrixU().leftCols(r);
    Vr = svd.matrixV().leftCols(r);
    sig = sv.head(r);
  } else if (cy.size() > 0 && cy.norm() > 0.0) {
    sol.status = SolveStatus::unbounded;
    sol.detail = "no cone constraints and a nonconstant objective";
    return sol;
  }

  Vector y = Vector::Zero(N.cols());
  if (sig.size() > 0) {
    StandardForm sf{(Vr.transpose() * cy).cwiseQuotient(sig), U, h, cones};
    const IpmResult r = run_ipm(sf, opts);
    sol.iterations = r.iterations;
    sol.detail = r.detail;
    if (r.status == SolveStatus::infeasible || r.status == SolveStatus::unbounded) {
      sol.status = r.status;
      return sol;
    }
    y = Vr * r.x.cwiseQuotient(sig);
    sol.status = r.status;
  } else {
    // Cones are constant: feasible iff the constant point is in the cone.
    sol.status = cones.size() == 0 || cones.min_eigenvalue(h) >= -kCertificateTolerance
                     ? SolveStatus::optimal
                     : SolveStatus::infeasible;
  }

  sol.values = v0 + N * y;
  sol.objective = cv.dot(sol.values) + c0;
  sol.residuals = measure_residuals(p, sol.values);
  if (sol.status == SolveStatus::optimal && !(sol.residuals.worst() <= kCertificateTolerance)) {
    std::ostringstream msg;
    msg << "converged point fails residual check (worst " << sol.residuals.worst() << ")";
    sol.status = SolveStatus::numerical_failure;
    sol.detail = msg.str();
  }
  return sol;
}

}  // namespace ddlqr::sdp
