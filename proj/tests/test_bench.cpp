#include <algorithm>
#include <sstream>

#include "ddlqr/bench.hpp"
#include "ddlqr/error.hpp"
#include "ddlqr/synthesis.hpp"
#include "doctest.h"

using namespace ddlqr;
using namespace ddlqr::bench;

namespace {
Experiment experiment() { return Experiment(LtiSystem::laplacian3(), LqrWeights::cheap_control(3, 3), 20); }

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }
}  // namespace

TEST_CASE("trial error is a relative excess cost") {
  const Experiment ex = experiment();
  const TrialMetrics t = run_trial(ex, 0.1, ce_method(), 77);
  REQUIRE(t.stabilizing);
  REQUIRE(t.error);
  const LqrSolution s = synthesize(generate_dataset(ex.system(), 20, 0.1, 77), ex.weights(), Method::indirect());
  const double j = h2_norm_sq(ex.system(), ex.weights(), s.K);
  CHECK(*t.error == doctest::Approx((j - ex.optimal_cost()) / ex.optimal_cost()).epsilon(1e-9));
  CHECK(*t.error >= -1e-9);
  CHECK(t.failure_cause.empty());
}

TEST_CASE("failed synthesis is scored, not thrown") {
  const Experiment ex(LtiSystem::laplacian3(), LqrWeights::cheap_control(3, 3), 4);
  const TrialMetrics t = run_trial(ex, 0.1, ce_method(), 1);
  CHECK_FALSE(t.stabilizing);
  CHECK(t.failure_cause == "not_identifiable");
  CHECK_FALSE(t.error);
}

TEST_CASE("sweeps pair seeds and ignore the job count") {
  const Experiment ex = experiment();
  const std::vector<NamedMethod> methods{ce_method(), mixed_method()};
  const SweepResult one = sweep_noise(ex, {0.1, 0.5}, methods, 6, 40, 1);
  const SweepResult three = sweep_noise(ex, {0.1, 0.5}, methods, 6, 40, 3);
  CHECK(trials_csv(one.trials) == trials_csv(three.trials));
  CHECK(summary_csv(one.summaries) == summary_csv(three.summaries));
  REQUIRE(one.trials.size() == 24);
  // same sigma and trial index: same dataset for every method
  for (const TrialMetrics& a : one.trials) {
    for (const TrialMetrics& b : one.trials) {
      if (a.sigma == b.sigma && a.trial_index == b.trial_index) {
        CHECK(a.seed == b.seed);
        CHECK(a.snr_db == b.snr_db);
      }
    }
    CHECK(a.seed == 40 + static_cast<std::uint64_t>(a.trial_index));
    if (a.error) CHECK(*a.error >= -1e-9);
  }
}

TEST_CASE("lambda sweep reuses the datasets across lambdas") {
  const SweepResult r = sweep_lambda(experiment(), 0.1, {1e-3, 1e-1}, 4, 5, 2);
  REQUIRE(r.summaries.size() == 2);
  REQUIRE(r.trials.size() == 8);
  for (std::size_t k = 0; k < 4; ++k) CHECK(r.trials[k].snr_db == r.trials[k + 4].snr_db);
  CHECK(r.summaries[0].method.lambda == 1e-3);
}

TEST_CASE("summary statistics") {
  std::vector<TrialMetrics> t(5);
  const double errs[] = {0.5, 0.1, 0.4, 0.2, 0.3};
  for (int k = 0; k < 5; ++k) {
    t[k].label = "x";
    t[k].sigma = 0.1;
    t[k].trial_index = k;
    t[k].stabilizing = k != 4;
    if (t[k].stabilizing) t[k].error = errs[k];
    t[k].snr_db = k;
  }
  const SweepSummary s = summarize(t, 20);
  CHECK(s.trials == 5);
  CHECK(s.S == doctest::Approx(80.0));
  // stabilizing errors sorted: 0.1 0.2 0.4 0.5
  CHECK(*s.M == doctest::Approx(0.3));
  CHECK(*s.q1 == doctest::Approx(0.175));
  CHECK(*s.q3 == doctest::Approx(0.425));
  CHECK(*s.min == 0.1);
  CHECK(*s.max == 0.5);
  CHECK(s.median_snr_db == doctest::Approx(2.0));
}

TEST_CASE("csv schemas") {
  const SweepResult r = sweep_noise(experiment(), {0.1}, {ce_method()}, 2, 1);
  const std::string trials = trials_csv(r.trials);
  CHECK(first_line(trials) == "method,sigma,lambda,rho,trial,seed,snr_db,stabilizing,error,failure_cause");
  CHECK(std::count(trials.begin(), trials.end(), '\n') == 3);
  const std::string lines = trials.substr(trials.find('\n') + 1);
  CHECK(lines.rfind("ce,0.1,0,0,0,1,", 0) == 0);
  CHECK(first_line(summary_csv(r.summaries)) == "method,sigma,lambda,rho,trials,S,M,q1,q3,min,max");
}

TEST_CASE("scaling report") {
  std::vector<SweepSummary> rows(3);
  const double sig[] = {0.01, 0.1, 1.0};
  for (int k = 0; k < 3; ++k) {
    rows[k].sigma = sig[k];
    rows[k].M = sig[k] * sig[k];
  }
  const ScalingReport rep = snr_scaling_report(rows);
  CHECK(rep.monotone);
  CHECK(rep.slope == doctest::Approx(2.0));
  CHECK(rep.passed());
  rows[2].M = 1e-6;
  CHECK_FALSE(snr_scaling_report(rows).monotone);
  CHECK_THROWS_AS(snr_scaling_report({rows[0]}), InvalidInput);
}
