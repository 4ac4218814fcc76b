#pragma once

#include <cstdint>

#include "ddlqr/data.hpp"
#include "ddlqr/linalg.hpp"
#include "ddlqr/solution.hpp"

namespace ddlqr {

/// x(k+1) = A x(k) + B u(k) + d(k).
class LtiSystem {
 public:
  LtiSystem(Matrix a, Matrix b);

  /// Marginally unstable 3-state Laplacian plant with B = I.
  static LtiSystem laplacian3();

  [[nodiscard]] const Matrix& A() const { return a_; }
  [[nodiscard]] const Matrix& B() const { return b_; }
  [[nodiscard]] Eigen::Index n() const { return a_.rows(); }
  [[nodiscard]] Eigen::Index m() const { return b_.cols(); }

 private:
  Matrix a_;
  Matrix b_;
};

/// Q and R with cached symmetric square roots. Construction rejects
/// non-symmetric or non positive definite weights.
class LqrWeights {
 public:
  LqrWeights(Matrix q, Matrix r);

  /// Q = I, R = 1e-3 I for the given dimensions.
  static LqrWeights cheap_control(Eigen::Index n, Eigen::Index m);

  [[nodiscard]] const Matrix& Q() const { return q_; }
  [[nodiscard]] const Matrix& R() const { return r_; }
  [[nodiscard]] const Matrix& Q_sqrt() const { return q_sqrt_; }
  [[nodiscard]] const Matrix& R_sqrt() const { return r_sqrt_; }

 private:
  Matrix q_, r_, q_sqrt_, r_sqrt_;
};

Matrix closed_loop(const LtiSystem& sys, const Matrix& k);

/// trace(Q P + K' R K P) with P = dlyap(A + BK, I). Throws NotSchur.
double h2_norm_sq(const LtiSystem& sys, const LqrWeights& w, const Matrix& k);

/// Optimal state feedback through the Riccati recursion; objective is the
/// H2 cost of the returned gain.
LqrSolution model_lqr(const LtiSystem& sys, const LqrWeights& w);

struct Trajectory {
  Matrix states;         // (T+1) x n
  Matrix disturbances;   // T x n
};

/// inputs is T x m. Disturbances are drawn from a stream seeded by noise.seed.
Trajectory simulate(const LtiSystem& sys, const Vector& x0, const Matrix& inputs,
                    const NoiseSpec& noise);

/// Draws a rows x cols matrix from the NoiseSpec's seeded stream, column by column.
Matrix sample(const NoiseSpec& spec, Eigen::Index rows, Eigen::Index cols);

/// Independent sub-seed for one named stream of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag);

inline constexpr std::uint64_t kInputStreamTag = 0x696e707574ULL;       // "input"
inline constexpr std::uint64_t kDisturbanceStreamTag = 0x6e6f697365ULL;  // "noise"

/// Runs one experiment from x0 (zero by default) and packages it as a dataset
/// whose D0 records the realized disturbance.
Dataset generate_dataset(const LtiSystem& sys, Eigen::Index T, const NoiseSpec& input_spec,
                         const NoiseSpec& noise_spec, const Vector& x0 = Vector());

/// Convenience for experiments: unit gaussian input and gaussian disturbance of
/// standard deviation sigma, both streams derived from one master seed.
Dataset generate_dataset(const LtiSystem& sys, Eigen::Index T, double sigma, std::uint64_t seed);

}  // namespace ddlqr
