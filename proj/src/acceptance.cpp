#include "ddlqr/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "ddlqr/bench.hpp"
#include "ddlqr/certificates.hpp"
#include "ddlqr/error.hpp"
#include "ddlqr/sdp.hpp"
#include "ddlqr/synthesis.hpp"

namespace ddlqr::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << v;
  return s.str();
}

bool in_band(const std::optional<double>& v, double lo, double hi) { return v && *v >= lo && *v <= hi; }

// Shared state: the noise and lambda sweeps feed several criteria.
class Runner {
 public:
  explicit Runner(const Options& o)
      : opts_(o), ex_(LtiSystem::laplacian3(), LqrWeights::cheap_control(3, 3), 20) {}

  CriterionResult run(int id) {
    const auto t0 = Clock::now();
    CriterionResult r;
    r.id = id;
    try {
      switch (id) {
        case 1: noise_free(r); break;
        case 2: equivalence(r); break;
        case 3: exact_penalty(r); break;
        case 4: lambda_sweep(r); break;
        case 5: ce_row(r); break;
        case 6: robust_mixed_rows(r); break;
        case 7: certificate_soundness(r); break;
        case 8: snr_scaling(r); break;
        case 9: identification_bound(r); break;
        case 10: property_suites(r); break;
        default: throw InvalidInput("no criterion " + std::to_string(id));
      }
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail += std::string(r.detail.empty() ? "" : "; ") + "error: " + e.what();
    }
    r.seconds = seconds_since(t0);
    if (id == 1 && r.seconds >= 5.0) fail_runtime(r, 5.0);
    if (id == 2 && r.seconds >= 120.0) fail_runtime(r, 120.0);
    if (id == 4 && r.seconds + lambda_sweep_seconds_ >= 600.0) fail_runtime(r, 600.0);
    if (id == 10 && r.seconds >= 60.0) fail_runtime(r, 60.0);
    return r;
  }

 private:
  static void fail_runtime(CriterionResult& r, double limit) {
    r.passed = false;
    r.detail += "; runtime limit " + sci(limit) + " s exceeded";
  }

  static constexpr int kDatasets = 50;
  static constexpr int kTrials = 100;

  std::uint64_t seed(std::uint64_t offset) const { return opts_.seed + offset; }

  const std::vector<Dataset>& noisy_datasets() {
    if (datasets_.empty()) {
      for (int k = 0; k < kDatasets; ++k) {
        datasets_.push_back(generate_dataset(ex_.system(), ex_.horizon(), 0.1, seed(static_cast<std::uint64_t>(k))));
      }
    }
    return datasets_;
  }

  const bench::SweepResult& noise_sweep() {
    if (!noise_) {
      noise_ = bench::sweep_noise(ex_, {0.01, 0.1, 0.3, 0.7, 1.0},
                                  {bench::ce_method(), bench::robust_method(), bench::mixed_method()}, kTrials,
                                  opts_.seed, opts_.jobs);
    }
    return *noise_;
  }

  const bench::SweepResult& lambda_sweep_result() {
    if (!lambda_) {
      const auto t0 = Clock::now();
      lambda_ = bench::sweep_lambda(ex_, 0.1, default_lambda_grid(), kTrials, opts_.seed, opts_.jobs);
      lambda_sweep_seconds_ = seconds_since(t0);
    }
    return *lambda_;
  }

  const bench::SweepSummary& summary(const std::string& label, double sigma) {
    for (const bench::SweepSummary& s : noise_sweep().summaries) {
      if (s.label == label && s.sigma == sigma) return s;
    }
    throw InvalidInput("no summary for " + label);
  }

  static std::string row(const bench::SweepSummary& s) {
    return s.label + " sigma=" + sci(s.sigma) + ": S=" + sci(s.S) + "% M=" + (s.M ? sci(*s.M) : "n/a");
  }

  // 1. Every variant reproduces the Riccati gain on noise-free data.
  void noise_free(CriterionResult& r) {
    r.name = "noise-free exactness";
    const Dataset ds = generate_dataset(ex_.system(), ex_.horizon(), 0.0, seed(0));
    const std::vector<Method> methods{
        Method::indirect(),
        Method::of(Variant::compact),
        Method::of(Variant::direct_plain),
        Method::of(Variant::direct_orthogonal),
        Method::regularized(0.01),
        Method::regularized(0.01, 0.0, NormKind::spectral),
        Method::of(Variant::direct_ideal),
    };
    double worst_gain = 0.0, worst_cost = 0.0;
    bool ok = true;
    for (const Method& m : methods) {
      const LqrSolution s = synthesize(ds, ex_.weights(), m);
      if (s.status != LqrStatus::optimal) {
        ok = false;
        r.detail += std::string(to_string(m.variant)) + " status " + std::string(to_string(s.status)) + "; ";
        continue;
      }
      const double g = relative_gain_gap(s.K, ex_.optimal_gain());
      const double c = std::abs(h2_norm_sq(ex_.system(), ex_.weights(), s.K) - ex_.optimal_cost()) / ex_.optimal_cost();
      worst_gain = std::max(worst_gain, g);
      worst_cost = std::max(worst_cost, c);
    }
    r.passed = ok && worst_gain <= 1e-4 && worst_cost <= 1e-6;
    r.detail += std::to_string(methods.size()) + " methods, max gain error " + sci(worst_gain) +
                " (<= 1e-4), max cost error " + sci(worst_cost) + " (<= 1e-6)";
  }

  // 2. Certainty equivalence, compact (both routes) and orthogonal coincide.
  void equivalence(CriterionResult& r) {
    r.name = "indirect/compact/orthogonal equivalence";
    double worst = 0.0;
    int mismatched_feasibility = 0, failures = 0, feasible = 0;
    for (const Dataset& ds : noisy_datasets()) {
      std::vector<std::optional<Matrix>> gains;
      std::optional<double> route;
      for (Variant v : {Variant::indirect_ce, Variant::compact, Variant::direct_orthogonal}) {
        try {
          const LqrSolution s = synthesize(ds, ex_.weights(), Method::of(v));
          if (s.status != LqrStatus::optimal) ++failures;
          gains.emplace_back(s.K);
          if (v == Variant::compact) route = s.route_discrepancy;
        } catch (const Infeasible&) {
          gains.emplace_back(std::nullopt);
        }
      }
      const auto n_feasible = std::count_if(gains.begin(), gains.end(), [](const auto& g) { return g.has_value(); });
      if (n_feasible != 0 && n_feasible != 3) {
        ++mismatched_feasibility;
        continue;
      }
      if (n_feasible == 0) continue;
      ++feasible;
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) worst = std::max(worst, relative_gain_gap(*gains[i], *gains[j]));
      if (route) worst = std::max(worst, *route);
    }
    r.passed = worst <= 1e-4 && mismatched_feasibility == 0 && failures == 0;
    r.detail = std::to_string(kDatasets) + " datasets (" + std::to_string(feasible) + " feasible), max pairwise gap " +
               sci(worst) + " (<= 1e-4), feasibility mismatches " + std::to_string(mismatched_feasibility) +
               ", solver failures " + std::to_string(failures);
  }

  // 3. Exact penalty above the detected threshold; penalty never exceeds the constraint.
  void exact_penalty(CriterionResult& r) {
    r.name = "exact penalty";
    const std::vector<double> grid = default_lambda_grid();
    double worst_gap = 0.0, worst_excess = -INFINITY, star_max = 0.0;
    int no_star = 0, failures = 0;
    for (const Dataset& ds : noisy_datasets()) {
      const LambdaScan scan = scan_lambda(ds, ex_.weights(), grid);
      if (scan.orthogonal.status != LqrStatus::optimal) ++failures;
      for (const LqrSolution& s : scan.path) {
        if (s.status != LqrStatus::optimal) {
          ++failures;
          continue;
        }
        worst_excess = std::max(worst_excess, s.objective - scan.orthogonal.objective);
      }
      if (scan.star_index < 0 || scan.star_index + 1 >= static_cast<int>(grid.size())) {
        ++no_star;
        continue;
      }
      star_max = std::max(star_max, scan.lambda_star);
      const LqrSolution& above = scan.path[static_cast<std::size_t>(scan.star_index + 1)];
      worst_gap = std::max(worst_gap, (above.K - scan.orthogonal.K).norm() / std::max(1.0, scan.orthogonal.K.norm()));
    }
    r.passed = no_star == 0 && failures == 0 && worst_gap <= 1e-4 && worst_excess <= 1e-6;
    r.detail = "max gain gap one step above lambda* " + sci(worst_gap) + " (<= 1e-4), max objective excess " +
               sci(worst_excess) + " (<= 1e-6), largest lambda* " + sci(star_max) + ", datasets without lambda* " +
               std::to_string(no_star) + ", solver failures " + std::to_string(failures);
  }

  // 4. Lambda sweep: regularized method at sigma = 0.1.
  void lambda_sweep(CriterionResult& r) {
    r.name = "lambda sweep (sigma 0.1, 100 trials)";
    bool ok = true;
    int checked = 0;
    double m_lo = INFINITY, m_hi = 0.0, min_lo = INFINITY, min_hi = 0.0, max_hi = 0.0, s_lo = 100.0;
    for (const bench::SweepSummary& s : lambda_sweep_result().summaries) {
      if (s.method.lambda < 0.003) continue;
      ++checked;
      s_lo = std::min(s_lo, s.S);
      const bool row_ok = s.S == 100.0 && in_band(s.M, 1e-3, 8e-3) && in_band(s.min, 1e-4, 3e-3) && s.max &&
                          *s.max <= 0.05;
      ok = ok && row_ok;
      if (s.M) {
        m_lo = std::min(m_lo, *s.M);
        m_hi = std::max(m_hi, *s.M);
        min_lo = std::min(min_lo, *s.min);
        min_hi = std::max(min_hi, *s.min);
        max_hi = std::max(max_hi, *s.max);
      }
    }
    r.passed = ok && checked > 0;
    r.detail = std::to_string(checked) + " lambdas >= 0.003: min S " + sci(s_lo) + "%, M in [" + sci(m_lo) + ", " +
               sci(m_hi) + "], min E in [" + sci(min_lo) + ", " + sci(min_hi) + "], max E " + sci(max_hi);
  }

  // 5. Certainty-equivalence row of the noise table.
  void ce_row(CriterionResult& r) {
    r.name = "noise sweep, certainty-equivalence row";
    const auto& a = summary("ce", 0.01);
    const auto& b = summary("ce", 0.3);
    const auto& c = summary("ce", 1.0);
    r.passed = a.S == 100.0 && in_band(a.M, 8e-6, 8e-5) && b.S == 100.0 && in_band(b.M, 0.008, 0.07) &&
               c.S >= 70.0 && c.S <= 95.0 && in_band(c.M, 0.1, 0.6);
    r.detail = row(a) + "; " + row(b) + "; " + row(c);
  }

  // 6. Robust and mixed rows.
  void robust_mixed_rows(CriterionResult& r) {
    r.name = "noise sweep, robust and mixed rows";
    const auto& rob = summary("robust", 1.0);
    const auto& mix = summary("mixed", 1.0);
    bool ordering = true;
    std::string order_detail;
    for (double s : {0.01, 0.1, 0.3}) {
      const auto& rm = summary("robust", s);
      const auto& mm = summary("mixed", s);
      const bool ok = rm.M && mm.M && *mm.M <= *rm.M;
      ordering = ordering && ok;
      order_detail += " sigma=" + sci(s) + ": " + (mm.M ? sci(*mm.M) : "n/a") + (ok ? " <= " : " > ") +
                      (rm.M ? sci(*rm.M) : "n/a") + ";";
    }
    r.passed = rob.S == 100.0 && in_band(rob.M, 0.2, 1.5) && mix.S == 100.0 && in_band(mix.M, 0.1, 0.8) && ordering;
    r.detail = row(rob) + "; " + row(mix) + "; mixed vs robust M:" + order_detail;
  }

  // 7. No certificate ever vouches for an unstable closed loop.
  void certificate_soundness(CriterionResult& r) {
    r.name = "certificate soundness";
    int total = 0, lemma = 0, delta = 0, violations = 0;
    auto visit = [&](const std::vector<bench::TrialMetrics>& trials) {
      for (const bench::TrialMetrics& t : trials) {
        ++total;
        lemma += t.lemma1_certified;
        delta += t.delta_certified;
        if ((t.lemma1_certified || t.delta_certified) && !(t.spectral_radius < 1.0)) ++violations;
        if (t.delta_certified && !t.lemma1_certified) ++violations;
      }
    };
    visit(noise_sweep().trials);
    visit(lambda_sweep_result().trials);
    r.passed = violations == 0;
    r.detail = std::to_string(total) + " trials, lemma certificates " + std::to_string(lemma) +
               ", noise-bound certificates " + std::to_string(delta) + ", violations " + std::to_string(violations);
  }

  // 8. Median CE error grows with the noise level like SNR^-1.
  void snr_scaling(CriterionResult& r) {
    r.name = "SNR scaling of the CE error";
    std::vector<bench::SweepSummary> ce;
    for (const bench::SweepSummary& s : noise_sweep().summaries) {
      if (s.label == "ce") ce.push_back(s);
    }
    const bench::ScalingReport rep = bench::snr_scaling_report(ce);
    r.passed = rep.passed() && rep.points.size() == 5;
    r.detail = "medians";
    for (const bench::ScalingPoint& p : rep.points) r.detail += " " + sci(p.M);
    r.detail += std::string(rep.monotone ? " (increasing)" : " (NOT increasing)") + ", log-log slope " +
                sci(rep.slope) + " (in [0.8, 2.2])";
  }

  // 9. Least-squares error is bounded by 1/SNR.
  void identification_bound(CriterionResult& r) {
    r.name = "identification error bound";
    std::mt19937_64 rng(opts_.seed);
    std::uniform_int_distribution<int> dim(1, 4);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> log_sigma(-3.0, 0.5);
    int violations = 0, identifiable = 0;
    double worst_ratio = 0.0;
    for (int k = 0; k < 200; ++k) {
      const int n = dim(rng), m = dim(rng);
      const int T = n + m + std::uniform_int_distribution<int>(0, 25)(rng);
      Matrix A(n, n), B(n, m);
      for (Eigen::Index j = 0; j < A.size(); ++j) A.data()[j] = gauss(rng) / std::sqrt(n);
      for (Eigen::Index j = 0; j < B.size(); ++j) B.data()[j] = gauss(rng);
      const LtiSystem sys(A, B);
      const double sigma = std::pow(10.0, log_sigma(rng));
      const Dataset ds = generate_dataset(sys, T, sigma, opts_.seed + 1000 + static_cast<std::uint64_t>(k));
      const DerivedData d = derive(ds);
      if (!d.identifiable) continue;
      ++identifiable;
      const LtiSystem id = least_squares_id(ds);
      Matrix err(n, m + n);
      err << id.B() - B, id.A() - A;
      const double e = linalg::norm2(err);
      const double bound = 1.0 / *d.snr;
      if (e > bound + 1e-10) ++violations;
      worst_ratio = std::max(worst_ratio, e / bound);
    }
    r.passed = violations == 0 && identifiable > 0;
    r.detail = "200 random plants (" + std::to_string(identifiable) + " identifiable), violations " +
               std::to_string(violations) + ", max error / bound " + sci(worst_ratio);
  }

  // 10. Oracle-backed property checks on the numerical kernels.
  void property_suites(CriterionResult& r) {
    r.name = "property suites";
    std::mt19937_64 rng(opts_.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_matrix = [&](Eigen::Index rows, Eigen::Index cols) {
      Matrix m(rows, cols);
      for (Eigen::Index j = 0; j < m.size(); ++j) m.data()[j] = gauss(rng);
      return m;
    };
    std::vector<std::string> failed;
    double lyap_err = 0.0, proj_err = 0.0, sdp_err = 0.0;
    int riccati_violations = 0, sdp_bad_status = 0;

    for (int k = 0; k < 20; ++k) {
      const Eigen::Index n = 2 + k % 4;
      Matrix F = random_matrix(n, n);
      F *= 0.8 / linalg::spectral_radius(F);
      Matrix W = random_matrix(n, n);
      W = (W * W.transpose()).eval();
      const Matrix P = linalg::dlyap(F, W);
      Matrix sum = Matrix::Zero(n, n), Fk = Matrix::Identity(n, n);
      for (int i = 0; i <= 200; ++i) {
        sum += Fk * W * Fk.transpose();
        Fk = (Fk * F).eval();
      }
      lyap_err = std::max(lyap_err, (P - sum).norm() / sum.norm());
    }
    if (lyap_err > 1e-9) failed.push_back("dlyap");

    for (int k = 0; k < 10; ++k) {
      const Eigen::Index n = 2 + k % 3, m = 1 + k % 2;
      const Matrix A = random_matrix(n, n), B = random_matrix(n, m);
      const LtiSystem sys(A, B);
      const LqrWeights w(Matrix::Identity(n, n), 0.1 * Matrix::Identity(m, m));
      LqrSolution opt;
      try {
        opt = model_lqr(sys, w);
      } catch (const NotStabilizable&) {
        continue;
      }
      for (int p = 0; p < 10; ++p) {
        const Matrix K = opt.K + 1e-3 * random_matrix(m, n);
        if (!linalg::is_schur(closed_loop(sys, K))) continue;
        if (h2_norm_sq(sys, w, K) < opt.objective - 1e-9 * opt.objective) ++riccati_violations;
      }
    }
    if (riccati_violations > 0) failed.push_back("riccati optimality");

    for (int k = 0; k < 10; ++k) {
      const Eigen::Index T = 8 + k, rows = 3 + k % 3;
      const Matrix W0 = random_matrix(rows, T);
      const DerivedData d = derive(Dataset{W0.topRows(1), W0.bottomRows(rows - 1), Matrix::Zero(rows - 1, T), {}, {}});
      const Matrix& Pi = d.Pi;
      proj_err = std::max({proj_err, (Pi * Pi - Pi).norm(), (Pi - Pi.transpose()).norm(), (W0 * Pi).norm(),
                           std::abs(Pi.trace() - static_cast<double>(T - rows))});
    }
    if (proj_err > 1e-10) failed.push_back("projector");

    for (int k = 0; k < 10; ++k) {
      const Eigen::Index n = 3 + k % 4;
      Matrix C = random_matrix(n, n);
      C = (C + C.transpose()).eval();
      sdp::ConicProgram p;
      const sdp::AffineMatrix X = p.add_symmetric_variable(n);
      p.add_psd(X);
      p.add_equality(X.trace() - sdp::AffineExpr(1.0));
      p.set_objective((C * X).trace());
      const sdp::ConicSolution s = sdp::solve(p);
      if (s.status != sdp::SolveStatus::optimal || s.residuals.worst() > sdp::kCertificateTolerance) ++sdp_bad_status;
      sdp_err = std::max(sdp_err, std::abs(s.objective - linalg::min_eigenvalue_symmetric(C)));
    }
    {
      // Infeasible: t >= |1| and t <= -1.
      sdp::ConicProgram p;
      const int t = p.add_variable();
      p.add_soc(sdp::AffineExpr::variable(t), {1.0});
      sdp::AffineMatrix neg(1, 1);
      neg(0, 0) = -sdp::AffineExpr::variable(t) - sdp::AffineExpr(1.0);
      p.add_psd(neg);
      p.set_objective(sdp::AffineExpr::variable(t));
      if (sdp::solve(p).status != sdp::SolveStatus::infeasible) ++sdp_bad_status;
    }
    if (sdp_bad_status > 0 || sdp_err > 1e-6) failed.push_back("sdp certification");

    r.passed = failed.empty();
    r.detail = "dlyap vs truncated sum " + sci(lyap_err) + ", Riccati perturbation violations " +
               std::to_string(riccati_violations) + ", projector identities " + sci(proj_err) +
               ", SDP eigenvalue oracle " + sci(sdp_err) + ", SDP status/residual failures " +
               std::to_string(sdp_bad_status);
    for (const std::string& f : failed) r.detail += "; failed: " + f;
  }

  Options opts_;
  bench::Experiment ex_;
  std::vector<Dataset> datasets_;
  std::optional<bench::SweepResult> noise_;
  std::optional<bench::SweepResult> lambda_;
  double lambda_sweep_seconds_ = 0.0;
};

}  // namespace

std::vector<CriterionResult> run(const Options& opts, const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<int> ids = opts.only;
  if (ids.empty()) ids = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  Runner runner(opts);
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(runner.run(id));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.name << ": " << r.detail << " ("
    << std::fixed << std::setprecision(1) << r.seconds << " s)";
  return s.str();
}

}  // namespace ddlqr::acceptance
