#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddlqr/solution.hpp"
#include "ddlqr/system.hpp"

namespace ddlqr::bench {

/// A method under a display label ("ce", "robust", "mixed", ...).
struct NamedMethod {
  std::string label;
  Method method;
};

/// The three regimes compared across noise levels: certainty equivalence
/// (indirect), robust (trace(GPG') weight rho) and mixed (both weights).
NamedMethod ce_method();
NamedMethod robust_method(double rho = 1.0);
NamedMethod mixed_method(double lambda = 1.0, double rho = 1.0);

/// Plant, weights and horizon shared by every trial, with the optimal cost
/// of the true plant precomputed.
class Experiment {
 public:
  Experiment(LtiSystem sys, LqrWeights w, Eigen::Index T);

  [[nodiscard]] const LtiSystem& system() const { return sys_; }
  [[nodiscard]] const LqrWeights& weights() const { return w_; }
  [[nodiscard]] Eigen::Index horizon() const { return T_; }
  [[nodiscard]] double optimal_cost() const { return optimal_cost_; }
  [[nodiscard]] const Matrix& optimal_gain() const { return optimal_gain_; }

 private:
  LtiSystem sys_;
  LqrWeights w_;
  Eigen::Index T_;
  double optimal_cost_;
  Matrix optimal_gain_;
};

struct TrialMetrics {
  std::string label;
  Method method;
  double sigma = 0.0;
  int trial_index = 0;
  std::uint64_t seed = 0;
  double snr_db = 0.0;
  bool stabilizing = false;
  std::optional<double> error;  // relative excess H2 cost, only when stabilizing
  std::string failure_cause;    // empty when stabilizing
  double spectral_radius = 0.0;  // of A + B K against the true plant (inf if no gain)

  // Oracle certificates evaluated on the trial's own (P, G).
  bool lemma1_certified = false;  // lemma1_holds for some eta in eta_scan()
  bool delta_certified = false;   // stability_test with delta = ||D0||_2, largest eta in eta_scan()
};

/// Scores one method on an existing dataset. Never throws for numerical
/// reasons: failures become non-stabilizing metrics with a cause.
TrialMetrics score(const Experiment& ex, const Dataset& ds, const NamedMethod& method, double sigma,
                   int trial_index, std::uint64_t seed);

/// Unit gaussian input, gaussian disturbance of standard deviation sigma,
/// dataset drawn from `seed`.
TrialMetrics run_trial(const Experiment& ex, double sigma, const NamedMethod& method, std::uint64_t seed,
                       int trial_index = 0);

struct SweepSummary {
  std::string label;
  Method method;
  double sigma = 0.0;
  Eigen::Index T = 0;
  int trials = 0;
  double S = 0.0;  // percentage of stabilizing trials
  // Statistics of the error over stabilizing trials; absent if none.
  std::optional<double> M, q1, q3, min, max;
  double median_snr_db = 0.0;
};

/// Quartiles use linear interpolation between order statistics.
SweepSummary summarize(const std::vector<TrialMetrics>& trials, Eigen::Index T);

struct SweepResult {
  std::vector<TrialMetrics> trials;  // ordered by (group, trial index)
  std::vector<SweepSummary> summaries;
};

/// Trial k uses seed master_seed + k for every lambda, so all lambdas see the
/// same datasets. `jobs` worker threads; results do not depend on it.
SweepResult sweep_lambda(const Experiment& ex, double sigma, const std::vector<double>& lambda_grid,
                         int trials, std::uint64_t master_seed, int jobs = 1, double rho = 0.0);

/// Every (sigma, method) pair; trial k uses seed master_seed + k for every
/// sigma and method.
SweepResult sweep_noise(const Experiment& ex, const std::vector<double>& sigma_grid,
                        const std::vector<NamedMethod>& methods, int trials, std::uint64_t master_seed,
                        int jobs = 1);

/// method,sigma,lambda,rho,trial,seed,snr_db,stabilizing,error,failure_cause
std::string trials_csv(const std::vector<TrialMetrics>& trials);
/// method,sigma,lambda,rho,trials,S,M,q1,q3,min,max
std::string summary_csv(const std::vector<SweepSummary>& summaries);

struct ScalingPoint {
  double sigma = 0.0;
  double M = 0.0;
  double inverse_snr = 0.0;  // median over the sweep's trials
};

struct ScalingReport {
  std::vector<ScalingPoint> points;  // ascending sigma
  bool monotone = false;             // M strictly increasing in sigma
  double slope = 0.0;                // least-squares log-log slope of M vs sigma over sigma <= 0.1
  bool slope_in_band = false;        // slope in [0.8, 2.2]
  [[nodiscard]] bool passed() const { return monotone && slope_in_band; }
};

/// InvalidInput when fewer than two summaries with a median, or fewer than
/// two of them at sigma <= 0.1.
ScalingReport snr_scaling_report(const std::vector<SweepSummary>& summaries);

}  // namespace ddlqr::bench
