#include "ddlqr/system.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ddlqr/error.hpp"

namespace ddlqr {

LtiSystem::LtiSystem(Matrix a, Matrix b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() < 1 || a_.rows() != a_.cols()) {
    throw InvalidInput("LtiSystem: A must be square and nonempty");
  }
  if (b_.rows() != a_.rows() || b_.cols() < 1) {
    throw InvalidInput("LtiSystem: B must have n rows and at least one column");
  }
  linalg::require_finite(a_, "LtiSystem(A)");
  linalg::require_finite(b_, "LtiSystem(B)");
}

LtiSystem LtiSystem::laplacian3() {
  Matrix a(3, 3);
  a << 1.01, 0.01, 0.0,
       0.01, 1.01, 0.01,
       0.0, 0.01, 1.01;
  return LtiSystem(a, Matrix::Identity(3, 3));
}

LqrWeights::LqrWeights(Matrix q, Matrix r) : q_(std::move(q)), r_(std::move(r)) {
  for (const auto& [mat, name] : {std::pair{&q_, "Q"}, std::pair{&r_, "R"}}) {
    if (mat->rows() < 1 || mat->rows() != mat->cols()) {
      throw InvalidInput(std::string("LqrWeights: ") + name + " must be square");
    }
    linalg::require_finite(*mat, name);
    if ((*mat - mat->transpose()).norm() > 1e-12 * std::max(1.0, mat->norm())) {
      throw InvalidInput(std::string("LqrWeights: ") + name + " must be symmetric");
    }
    if (!(linalg::min_eigenvalue_symmetric(*mat) > 0.0)) {
      throw InvalidInput(std::string("LqrWeights: ") + name + " must be positive definite");
    }
  }
  q_sqrt_ = linalg::sqrt_psd(q_);
  r_sqrt_ = linalg::sqrt_psd(r_);
}

LqrWeights LqrWeights::cheap_control(Eigen::Index n, Eigen::Index m) {
  return LqrWeights(Matrix::Identity(n, n), 1e-3 * Matrix::Identity(m, m));
}

Matrix closed_loop(const LtiSystem& sys, const Matrix& k) {
  if (k.rows() != sys.m() || k.cols() != sys.n()) {
    throw InvalidInput("closed_loop: K must be " + std::to_string(sys.m()) + "x" +
                       std::to_string(sys.n()));
  }
  linalg::require_finite(k, "closed_loop(K)");
  return sys.A() + sys.B() * k;
}

double h2_norm_sq(const LtiSystem& sys, const LqrWeights& w, const Matrix& k) {
  if (w.Q().rows() != sys.n() || w.R().rows() != sys.m()) {
    throw InvalidInput("h2_norm_sq: weights do not match the system dimensions");
  }
  const Matrix f = closed_loop(sys, k);
  const Matrix p = linalg::dlyap(f, Matrix::Identity(sys.n(), sys.n()));
  return (w.Q() * p + k.transpose() * w.R() * k * p).trace();
}

LqrSolution model_lqr(const LtiSystem& sys, const LqrWeights& w) {
  const linalg::RiccatiSolution ric = linalg::dare_gain(sys.A(), sys.B(), w.Q(), w.R());
  LqrSolution sol;
  sol.K = ric.gain;
  sol.P = linalg::dlyap(closed_loop(sys, sol.K), Matrix::Identity(sys.n(), sys.n()));
  sol.X = w.R_sqrt() * sol.K * sol.P * sol.K.transpose() * w.R_sqrt();
  sol.objective = (w.Q() * sol.P).trace() + sol.X.trace();
  sol.solver_iterations = ric.iterations;
  return sol;
}

void NoiseSpec::validate() const {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw InvalidInput("NoiseSpec: scale must be finite and nonnegative");
  }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) { return master ^ tag; }

Matrix sample(const NoiseSpec& spec, Eigen::Index rows, Eigen::Index cols) {
  spec.validate();
  Matrix out = Matrix::Zero(rows, cols);
  if (spec.kind == NoiseKind::zero || spec.scale == 0.0) return out;

  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                    static_cast<std::uint32_t>(spec.seed >> 32)};
  std::mt19937_64 rng(seq);
  if (spec.kind == NoiseKind::gaussian_iid) {
    std::normal_distribution<double> dist(0.0, spec.scale);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = dist(rng);
  } else {
    std::uniform_real_distribution<double> dist(-spec.scale, spec.scale);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = dist(rng);
  }
  return out;
}

Trajectory simulate(const LtiSystem& sys, const Vector& x0, const Matrix& inputs,
                    const NoiseSpec& noise) {
  const Eigen::Index steps = inputs.rows();
  if (steps < 1) throw InvalidInput("simulate: need at least one input sample");
  if (inputs.cols() != sys.m()) throw InvalidInput("simulate: inputs must be T x m");
  if (x0.size() != sys.n()) throw InvalidInput("simulate: x0 must have n entries");

  Trajectory traj;
  traj.disturbances = sample(noise, sys.n(), steps).transpose();
  traj.states.resize(steps + 1, sys.n());
  traj.states.row(0) = x0.transpose();
  for (Eigen::Index k = 0; k < steps; ++k) {
    const Vector x = traj.states.row(k).transpose();
    const Vector next = sys.A() * x + sys.B() * inputs.row(k).transpose() +
                        traj.disturbances.row(k).transpose();
    traj.states.row(k + 1) = next.transpose();
  }
  return traj;
}

Dataset generate_dataset(const LtiSystem& sys, Eigen::Index T, const NoiseSpec& input_spec,
                         const NoiseSpec& noise_spec, const Vector& x0) {
  if (T < 1) throw InvalidInput("generate_dataset: T must be positive");
  const Vector start = x0.size() == 0 ? Vector::Zero(sys.n()) : x0;
  const Matrix inputs = sample(input_spec, sys.m(), T).transpose();
  const Trajectory traj = simulate(sys, start, inputs, noise_spec);

  Dataset ds;
  ds.U0 = inputs.transpose();
  ds.X0 = traj.states.topRows(T).transpose();
  ds.X1 = traj.states.bottomRows(T).transpose();
  ds.D0 = traj.disturbances.transpose();
  ds.origin = DatasetOrigin{input_spec.seed, input_spec, noise_spec};

  // X1 - D0 = [B A] [U0; X0] holds by construction; a violation means the
  // trajectory was assembled incorrectly.
  const Matrix residual = ds.X1 - *ds.D0 - sys.B() * ds.U0 - sys.A() * ds.X0;
  const double scale = std::max(1.0, ds.X1.cwiseAbs().maxCoeff());
  if (residual.cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw NumericalFailure("generate_dataset: subspace identity violated");
  }
  return ds;
}

Dataset generate_dataset(const LtiSystem& sys, Eigen::Index T, double sigma, std::uint64_t seed) {
  Dataset ds = generate_dataset(sys, T,
                                NoiseSpec::gaussian(1.0, derive_seed(seed, kInputStreamTag)),
                                NoiseSpec::gaussian(sigma, derive_seed(seed, kDisturbanceStreamTag)));
  ds.origin->seed = seed;
  return ds;
}

}  // namespace ddlqr
