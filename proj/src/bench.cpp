#include "ddlqr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "ddlqr/certificates.hpp"
#include "ddlqr/dataset_io.hpp"
#include "ddlqr/error.hpp"
#include "ddlqr/synthesis.hpp"

namespace ddlqr::bench {

NamedMethod ce_method() { return {"ce", Method::indirect()}; }
NamedMethod robust_method(double rho) { return {"robust", Method::regularized(0.0, rho)}; }
NamedMethod mixed_method(double lambda, double rho) { return {"mixed", Method::regularized(lambda, rho)}; }

Experiment::Experiment(LtiSystem sys, LqrWeights w, Eigen::Index T)
    : sys_(std::move(sys)), w_(std::move(w)), T_(T) {
  if (T_ < 1) throw InvalidInput("experiment horizon T must be >= 1");
  if (w_.Q().rows() != sys_.n() || w_.R().rows() != sys_.m()) {
    throw InvalidInput("experiment weights do not match the plant dimensions");
  }
  const LqrSolution opt = model_lqr(sys_, w_);
  optimal_cost_ = opt.objective;
  optimal_gain_ = opt.K;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs fn(i) for i in [0, n) on `jobs` threads; each index is written by
// exactly one worker so the outcome does not depend on scheduling.
template <typename Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void validate_sigma(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInput("sigma must be finite and >= 0");
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::string fmt(double v) { return std::isfinite(v) ? io::format_double(v) : (v > 0 ? "inf" : (v < 0 ? "-inf" : "nan")); }
std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

}  // namespace

TrialMetrics score(const Experiment& ex, const Dataset& ds, const NamedMethod& method, double sigma,
                   int trial_index, std::uint64_t seed) {
  TrialMetrics t;
  t.label = method.label;
  t.method = method.method;
  t.sigma = sigma;
  t.trial_index = trial_index;
  t.seed = seed;
  t.spectral_radius = kInf;
  const DerivedData d = derive(ds);
  t.snr_db = snr_decibels(d.snr.value_or(0.0));

  LqrSolution sol;
  try {
    sol = synthesize(ds, ex.weights(), method.method);
  } catch (const Infeasible&) {
    t.failure_cause = "infeasible";
    return t;
  } catch (const DegenerateRecovery&) {
    t.failure_cause = "degenerate_recovery";
    return t;
  } catch (const NotIdentifiable&) {
    t.failure_cause = "not_identifiable";
    return t;
  } catch (const Error&) {
    t.failure_cause = "numerical_failure";
    return t;
  }
  if (sol.status != LqrStatus::optimal) {
    t.failure_cause = "numerical_failure";
    return t;
  }

  t.spectral_radius = linalg::spectral_radius(closed_loop(ex.system(), sol.K));
  t.stabilizing = t.spectral_radius < 1.0;
  if (t.stabilizing) {
    t.error = (h2_norm_sq(ex.system(), ex.weights(), sol.K) - ex.optimal_cost()) / ex.optimal_cost();
  } else {
    t.failure_cause = "not_stabilizing";
  }

  if (ds.D0 && sol.G.size() > 0) {
    try {
      const Certificates c = certificates(sol, ds);
      t.lemma1_certified = c.eta1.has_value();
      t.delta_certified = stability_test(sol, ds, linalg::norm2(*ds.D0), eta_scan().back());
    } catch (const Error&) {
      // A certificate that cannot be evaluated certifies nothing.
      t.lemma1_certified = t.delta_certified = false;
    }
  }
  return t;
}

TrialMetrics run_trial(const Experiment& ex, double sigma, const NamedMethod& method, std::uint64_t seed,
                       int trial_index) {
  validate_sigma(sigma);
  const Dataset ds = generate_dataset(ex.system(), ex.horizon(), sigma, seed);
  return score(ex, ds, method, sigma, trial_index, seed);
}

SweepSummary summarize(const std::vector<TrialMetrics>& trials, Eigen::Index T) {
  if (trials.empty()) throw InvalidInput("summarize: no trials");
  SweepSummary s;
  s.label = trials.front().label;
  s.method = trials.front().method;
  s.sigma = trials.front().sigma;
  s.T = T;
  s.trials = static_cast<int>(trials.size());
  std::vector<double> errors, snr;
  int stable = 0;
  for (const TrialMetrics& t : trials) {
    snr.push_back(t.snr_db);
    if (t.stabilizing) {
      ++stable;
      errors.push_back(*t.error);
    }
  }
  s.S = 100.0 * stable / static_cast<double>(trials.size());
  std::sort(snr.begin(), snr.end());
  s.median_snr_db = quantile(snr, 0.5);
  if (!errors.empty()) {
    std::sort(errors.begin(), errors.end());
    s.M = quantile(errors, 0.5);
    s.q1 = quantile(errors, 0.25);
    s.q3 = quantile(errors, 0.75);
    s.min = errors.front();
    s.max = errors.back();
  }
  return s;
}

SweepResult sweep_lambda(const Experiment& ex, double sigma, const std::vector<double>& lambda_grid,
                         int trials, std::uint64_t master_seed, int jobs, double rho) {
  validate_sigma(sigma);
  if (trials < 1) throw InvalidInput("sweep_lambda: trials must be >= 1");
  if (lambda_grid.empty()) throw InvalidInput("sweep_lambda: empty lambda grid");
  std::vector<NamedMethod> methods;
  for (double l : lambda_grid) methods.push_back({"regularized", Method::regularized(l, rho)});
  for (const NamedMethod& m : methods) m.method.validate();

  const std::size_t L = methods.size();
  std::vector<TrialMetrics> flat(L * static_cast<std::size_t>(trials));
  parallel_for(trials, jobs, [&](int k) {
    const std::uint64_t seed = master_seed + static_cast<std::uint64_t>(k);
    const Dataset ds = generate_dataset(ex.system(), ex.horizon(), sigma, seed);
    for (std::size_t l = 0; l < L; ++l) {
      flat[l * static_cast<std::size_t>(trials) + static_cast<std::size_t>(k)] =
          score(ex, ds, methods[l], sigma, k, seed);
    }
  });

  SweepResult out;
  out.trials = std::move(flat);
  for (std::size_t l = 0; l < L; ++l) {
    const auto begin = out.trials.begin() + static_cast<std::ptrdiff_t>(l * static_cast<std::size_t>(trials));
    out.summaries.push_back(summarize(std::vector<TrialMetrics>(begin, begin + trials), ex.horizon()));
  }
  return out;
}

SweepResult sweep_noise(const Experiment& ex, const std::vector<double>& sigma_grid,
                        const std::vector<NamedMethod>& methods, int trials, std::uint64_t master_seed,
                        int jobs) {
  if (trials < 1) throw InvalidInput("sweep_noise: trials must be >= 1");
  if (sigma_grid.empty() || methods.empty()) throw InvalidInput("sweep_noise: empty sigma grid or method list");
  for (double s : sigma_grid) validate_sigma(s);
  for (const NamedMethod& m : methods) m.method.validate();

  const std::size_t S = sigma_grid.size(), Mn = methods.size(), N = static_cast<std::size_t>(trials);
  // Layout: [method][sigma][trial].
  std::vector<TrialMetrics> flat(Mn * S * N);
  parallel_for(static_cast<int>(S * N), jobs, [&](int task) {
    const std::size_t si = static_cast<std::size_t>(task) / N;
    const std::size_t k = static_cast<std::size_t>(task) % N;
    const std::uint64_t seed = master_seed + k;
    const Dataset ds = generate_dataset(ex.system(), ex.horizon(), sigma_grid[si], seed);
    for (std::size_t mi = 0; mi < Mn; ++mi) {
      flat[(mi * S + si) * N + k] = score(ex, ds, methods[mi], sigma_grid[si], static_cast<int>(k), seed);
    }
  });

  SweepResult out;
  out.trials = std::move(flat);
  for (std::size_t g = 0; g < Mn * S; ++g) {
    const auto begin = out.trials.begin() + static_cast<std::ptrdiff_t>(g * N);
    out.summaries.push_back(
        summarize(std::vector<TrialMetrics>(begin, begin + static_cast<std::ptrdiff_t>(N)), ex.horizon()));
  }
  return out;
}

std::string trials_csv(const std::vector<TrialMetrics>& trials) {
  std::string out = "method,sigma,lambda,rho,trial,seed,snr_db,stabilizing,error,failure_cause\n";
  for (const TrialMetrics& t : trials) {
    out += t.label + ',' + fmt(t.sigma) + ',' + fmt(t.method.lambda) + ',' + fmt(t.method.rho) + ',' +
           std::to_string(t.trial_index) + ',' + std::to_string(t.seed) + ',' + fmt(t.snr_db) + ',' +
           (t.stabilizing ? "1" : "0") + ',' + fmt(t.error) + ',' + t.failure_cause + '\n';
  }
  return out;
}

std::string summary_csv(const std::vector<SweepSummary>& summaries) {
  std::string out = "method,sigma,lambda,rho,trials,S,M,q1,q3,min,max\n";
  for (const SweepSummary& s : summaries) {
    out += s.label + ',' + fmt(s.sigma) + ',' + fmt(s.method.lambda) + ',' + fmt(s.method.rho) + ',' +
           std::to_string(s.trials) + ',' + fmt(s.S) + ',' + fmt(s.M) + ',' + fmt(s.q1) + ',' + fmt(s.q3) +
           ',' + fmt(s.min) + ',' + fmt(s.max) + '\n';
  }
  return out;
}

ScalingReport snr_scaling_report(const std::vector<SweepSummary>& summaries) {
  ScalingReport r;
  for (const SweepSummary& s : summaries) {
    if (!s.M) continue;
    r.points.push_back({s.sigma, *s.M, std::pow(10.0, -s.median_snr_db / 10.0)});
  }
  std::sort(r.points.begin(), r.points.end(),
            [](const ScalingPoint& a, const ScalingPoint& b) { return a.sigma < b.sigma; });
  if (r.points.size() < 2) throw InvalidInput("snr scaling: need at least two noise levels with a median error");

  r.monotone = true;
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    if (!(r.points[i].sigma > r.points[i - 1].sigma) || !(r.points[i].M > r.points[i - 1].M)) r.monotone = false;
  }

  std::vector<double> lx, ly;
  for (const ScalingPoint& p : r.points) {
    if (p.sigma <= 0.1 && p.sigma > 0.0 && p.M > 0.0) {
      lx.push_back(std::log(p.sigma));
      ly.push_back(std::log(p.M));
    }
  }
  if (lx.size() < 2) throw InvalidInput("snr scaling: need at least two noise levels with sigma <= 0.1");
  const auto n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (!(sxx > 0.0)) throw InvalidInput("snr scaling: noise levels with sigma <= 0.1 must be distinct");
  r.slope = sxy / sxx;
  r.slope_in_band = r.slope >= 0.8 && r.slope <= 2.2;
  return r;
}

}  // namespace ddlqr::bench
