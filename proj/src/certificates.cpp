#include "ddlqr/certificates.hpp"

#include <cmath>
#include <string>

#include "ddlqr/error.hpp"

namespace ddlqr {

const std::vector<double>& eta_scan() {
  static const std::vector<double> etas{1.01, 1.1, 1.5, 2.0, 5.0};
  return etas;
}

namespace {

void check_eta(double eta) {
  if (!(eta >= 1.0) || !std::isfinite(eta)) throw InvalidInput("eta must be finite and >= 1");
}

Matrix psi_of(const Matrix& m, const Matrix& x1, const Matrix& d0) {
  const Matrix x1md = x1 * m * d0.transpose();
  return linalg::symmetrize(d0 * m * d0.transpose() - x1md - x1md.transpose());
}

void require_pg(const LqrSolution& sol, const Dataset& ds) {
  if (sol.P.rows() != ds.n() || sol.P.cols() != ds.n() || sol.G.rows() != ds.T() || sol.G.cols() != ds.n()) {
    throw InvalidInput("certificates: solution does not carry P (n x n) and G (T x n) for this dataset");
  }
}

struct Core {
  Matrix M, X1M, Theta;
  double theta_slack;
};

Core core(const LqrSolution& sol, const Dataset& ds) {
  require_pg(sol, ds);
  Core c;
  c.M = linalg::symmetrize(sol.G * sol.P * sol.G.transpose());
  c.X1M = ds.X1 * c.M;
  c.Theta = linalg::symmetrize(c.X1M * ds.X1.transpose() - sol.P);
  c.theta_slack = linalg::max_eigenvalue_symmetric(c.Theta + Matrix::Identity(ds.n(), ds.n()));
  return c;
}

}  // namespace

bool FeasibilityCheck::holds(double eta2) const {
  check_eta(eta2);
  return linalg::max_eigenvalue_symmetric(-Psi_star) <= 1.0 - 1.0 / eta2;
}

bool Certificates::lemma1_holds(double eta1) const {
  check_eta(eta1);
  return theta_slack <= kThetaTolerance && 1.0 - eta1_margin <= 1.0 - 1.0 / eta1;
}

bool Certificates::delta_test(double delta, double eta1) const {
  check_eta(eta1);
  if (!(delta >= 0.0)) throw InvalidInput("delta must be >= 0");
  return theta_slack <= kThetaTolerance &&
         delta * delta * m_norm + 2.0 * delta * x1m_norm <= 1.0 - 1.0 / eta1;
}

Certificates certificates(const LqrSolution& sol, const Dataset& ds, const LtiSystem* truth,
                          const LqrWeights* weights) {
  if (!ds.D0) throw OracleRequired("certificates need the disturbance record D0");
  const Core c = core(sol, ds);
  Certificates out;
  out.M = c.M;
  out.Theta = c.Theta;
  out.theta_slack = c.theta_slack;
  out.Psi = psi_of(c.M, ds.X1, *ds.D0);
  out.eta1_margin = 1.0 - linalg::max_eigenvalue_symmetric(out.Psi);
  out.m_norm = linalg::norm2(c.M);
  out.x1m_norm = linalg::norm2(c.X1M);
  for (double eta : eta_scan()) {
    if (out.lemma1_holds(eta)) {
      out.eta1 = eta;
      break;
    }
  }

  if (truth != nullptr) {
    const DerivedData d = derive(ds);
    if (!d.identifiable) throw NotIdentifiable("not identifiable (rank W0 < n+m)");
    const LqrWeights w = weights != nullptr ? *weights : LqrWeights::cheap_control(ds.n(), ds.m());
    const LqrSolution opt = model_lqr(*truth, w);
    Matrix ki(ds.m() + ds.n(), ds.n());
    ki << opt.K, Matrix::Identity(ds.n(), ds.n());
    const Matrix g_star = d.W0_pinv * ki;
    const Matrix m_star = linalg::symmetrize(g_star * opt.P * g_star.transpose());
    FeasibilityCheck f;
    f.Psi_star = psi_of(m_star, ds.X1, *ds.D0);
    f.margin = 1.0 - linalg::max_eigenvalue_symmetric(-f.Psi_star);
    for (double eta : eta_scan()) {
      if (f.holds(eta)) {
        f.eta2 = eta;
        break;
      }
    }
    out.feasibility = std::move(f);
  }
  return out;
}

bool stability_test(const LqrSolution& sol, const Dataset& ds, double delta, double eta1) {
  check_eta(eta1);
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw InvalidInput("delta must be finite and >= 0");
  if (ds.D0) {
    const double d0 = linalg::norm2(*ds.D0);
    if (delta < d0) {
      throw InvalidInput("delta " + std::to_string(delta) + " is below ||D0||_2 = " + std::to_string(d0));
    }
  }
  const Core c = core(sol, ds);
  const bool pass = c.theta_slack <= kThetaTolerance &&
                    delta * delta * linalg::norm2(c.M) + 2.0 * delta * linalg::norm2(c.X1M) <= 1.0 - 1.0 / eta1;
  if (pass && ds.D0) {
    const Matrix psi = psi_of(c.M, ds.X1, *ds.D0);
    // ||Psi|| <= delta^2 ||M|| + 2 delta ||X1 M||, so the noise condition must follow.
    if (linalg::max_eigenvalue_symmetric(psi) > 1.0 - 1.0 / eta1 + 1e-12) {
      throw NumericalFailure("stability test passed but the noise condition on Psi does not hold");
    }
  }
  return pass;
}

}  // namespace ddlqr
