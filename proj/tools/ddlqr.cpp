// Command-line front end. Every subcommand reads a RunConfig, calls into the
// library and writes files; no numerics live here.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "ddlqr/acceptance.hpp"
#include "ddlqr/bench.hpp"
#include "ddlqr/certificates.hpp"
#include "ddlqr/config.hpp"
#include "ddlqr/dataset_io.hpp"
#include "ddlqr/error.hpp"
#include "ddlqr/solution_io.hpp"
#include "ddlqr/synthesis.hpp"

namespace fs = std::filesystem;
using namespace ddlqr;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kConfig = 2, kNumerical = 3, kInfeasible = 4 };

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string dataset;
  std::string solution;
  std::optional<double> delta;
  std::optional<double> eta1;
  std::vector<int> only;
};

config::RunConfig resolve(const Flags& f) {
  config::RunConfig cfg = f.config.empty() ? config::RunConfig() : config::load(f.config);
  if (!f.out.empty()) cfg.out = f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (!f.dataset.empty()) cfg.dataset = f.dataset;
  if (!f.solution.empty()) cfg.solution = f.solution;
  if (f.delta) cfg.delta = *f.delta;
  if (f.eta1) cfg.eta1 = *f.eta1;
  return cfg;
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + p.string());
  out << text;
}

void print_matrix(const char* name, const Matrix& m) {
  const Eigen::IOFormat fmt(Eigen::FullPrecision, 0, ", ", "\n", "  [", "]");
  std::cout << name << " =\n" << m.format(fmt) << "\n";
}

Dataset load_dataset(const config::RunConfig& cfg) {
  if (cfg.dataset.empty()) throw InvalidInput("no dataset given (use --dataset or the 'dataset' key)");
  return io::read_dataset(cfg.dataset);
}

int cmd_simulate(const config::RunConfig& cfg) {
  const Dataset ds = generate_dataset(cfg.system(), cfg.T, cfg.sigma, cfg.seed);
  const fs::path path = fs::path(cfg.out) / "dataset.csv";
  io::write_dataset(ds, path);
  std::cout << "wrote " << path.string() << " (n=" << ds.n() << ", m=" << ds.m() << ", T=" << ds.T()
            << ", sigma=" << cfg.sigma << ", seed=" << cfg.seed << ")\n";
  return kOk;
}

int cmd_identify(const config::RunConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  const DerivedData d = derive(ds);
  std::cout << "rank W0 = " << d.rank << " (n+m = " << ds.n() + ds.m() << ")\n";
  const LtiSystem id = least_squares_id(ds);
  print_matrix("A_hat", id.A());
  print_matrix("B_hat", id.B());
  if (d.snr) std::cout << "SNR = " << *d.snr << " (" << snr_decibels(*d.snr) << " dB)\n";
  else std::cout << "SNR = unknown (dataset has no disturbance record)\n";
  return kOk;
}

int cmd_synthesize(const config::RunConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  const LqrSolution sol = synthesize(ds, cfg.weights(), cfg.method);
  const fs::path path = fs::path(cfg.out) / "solution.json";
  io::write_solution(sol, path);
  print_matrix("K", sol.K);
  std::cout << "objective = " << sol.objective << "\nstatus = " << to_string(sol.status) << "\n";
  std::cout << "wrote " << path.string() << "\n";
  if (sol.status != LqrStatus::optimal) {
    std::cerr << "synthesize: " << sol.note << "\n";
    return kNumerical;
  }
  return kOk;
}

int cmd_certify(const config::RunConfig& cfg) {
  const Dataset ds = load_dataset(cfg);
  const LqrSolution sol =
      cfg.solution.empty() ? synthesize(ds, cfg.weights(), cfg.method) : io::read_solution(cfg.solution);
  std::optional<Certificates> cert;
  if (ds.D0) {
    cert = certificates(sol, ds);
    std::cout << "eta1 margin (1 - lambda_max(Psi)) = " << cert->eta1_margin << "\n"
              << "lambda_max(Theta + I) = " << cert->theta_slack << "\n";
    if (cert->eta1) std::cout << "noise condition holds for eta1 = " << *cert->eta1 << "\n";
    else std::cout << "noise condition fails for every eta1 in the scan\n";
  } else {
    std::cout << "no disturbance record: oracle certificates skipped\n";
  }
  double delta = 0.0;
  if (cfg.delta) delta = *cfg.delta;
  else if (ds.D0) delta = linalg::norm2(*ds.D0);
  else throw InvalidInput("certify needs a noise bound (delta) when the dataset has no disturbance record");
  const bool pass = stability_test(sol, ds, delta, cfg.eta1);
  std::cout << "stability test (delta = " << delta << ", eta1 = " << cfg.eta1 << "): "
            << (pass ? "certified" : "not certified") << "\n";
  const fs::path path = fs::path(cfg.out) / "certified_solution.json";
  io::write_solution(sol, path, cert ? &*cert : nullptr);
  std::cout << "wrote " << path.string() << "\n";
  return kOk;
}

bench::Experiment experiment(const config::RunConfig& cfg) {
  return bench::Experiment(cfg.system(), cfg.weights(), cfg.T);
}

void print_summaries(const std::vector<bench::SweepSummary>& rows) {
  std::cout << "method       sigma     lambda    rho       S(%)    M\n";
  for (const bench::SweepSummary& s : rows) {
    std::cout << std::left << std::setw(13) << s.label << std::setw(10) << s.sigma << std::setw(10)
              << s.method.lambda << std::setw(10) << s.method.rho << std::setw(8) << s.S
              << (s.M ? std::to_string(*s.M) : std::string("n/a")) << "\n";
  }
}

int cmd_sweep_lambda(const config::RunConfig& cfg) {
  const std::vector<double> grid = cfg.lambdas.value_or(default_lambda_grid());
  const bench::SweepResult r =
      bench::sweep_lambda(experiment(cfg), cfg.sigma, grid, cfg.trials, cfg.seed, cfg.jobs);
  const fs::path dir(cfg.out);
  write_text(dir / "lambda_trials.csv", bench::trials_csv(r.trials));
  write_text(dir / "lambda_summary.csv", bench::summary_csv(r.summaries));
  print_summaries(r.summaries);
  std::cout << "wrote " << (dir / "lambda_trials.csv").string() << " and " << (dir / "lambda_summary.csv").string()
            << "\n";
  return kOk;
}

int cmd_sweep_noise(const config::RunConfig& cfg) {
  const bench::SweepResult r =
      bench::sweep_noise(experiment(cfg), cfg.sigmas, cfg.named_methods(), cfg.trials, cfg.seed, cfg.jobs);
  const fs::path dir(cfg.out);
  write_text(dir / "noise_trials.csv", bench::trials_csv(r.trials));
  write_text(dir / "noise_summary.csv", bench::summary_csv(r.summaries));
  print_summaries(r.summaries);
  std::vector<bench::SweepSummary> ce;
  for (const bench::SweepSummary& s : r.summaries) {
    if (s.label == "ce") ce.push_back(s);
  }
  if (!ce.empty()) {
    try {
      const bench::ScalingReport rep = bench::snr_scaling_report(ce);
      std::cout << "ce scaling: " << (rep.monotone ? "monotone" : "NOT monotone") << ", log-log slope "
                << rep.slope << (rep.slope_in_band ? " (in [0.8, 2.2])" : " (outside [0.8, 2.2])") << "\n";
    } catch (const InvalidInput& e) {
      std::cout << "ce scaling: not reported (" << e.what() << ")\n";
    }
  }
  std::cout << "wrote " << (dir / "noise_trials.csv").string() << " and " << (dir / "noise_summary.csv").string()
            << "\n";
  return kOk;
}

int cmd_verify(const config::RunConfig& cfg, const std::vector<int>& only) {
  acceptance::Options opts;
  opts.seed = cfg.seed;
  opts.jobs = cfg.jobs;
  opts.only = only;
  bool all = true;
  acceptance::run(opts, [&](const acceptance::CriterionResult& r) {
    all = all && r.passed;
    std::cout << acceptance::format(r) << std::endl;
  });
  std::cout << (all ? "all criteria passed" : "some criteria FAILED") << "\n";
  return all ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven LQR synthesis, certificates and Monte-Carlo experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags flags;
  app.add_option("--config", flags.config, "Run configuration file (key = value)");
  app.add_option("--out", flags.out, "Output directory");
  app.add_option("--seed", flags.seed, "Master seed (overrides the config)");
  app.add_option("--jobs", flags.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Generate a dataset from the configured plant");
  auto* identify = app.add_subcommand("identify", "Least-squares identification of a dataset");
  auto* synth = app.add_subcommand("synthesize", "Run the configured method on a dataset");
  auto* certify = app.add_subcommand("certify", "Stability certificates for a solution");
  auto* sweep_l = app.add_subcommand("sweep-lambda", "Regularization sweep over lambda");
  auto* sweep_n = app.add_subcommand("sweep-noise", "Method comparison across noise levels");
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  for (auto* sub : {identify, synth, certify}) {
    sub->add_option("--dataset", flags.dataset, "Dataset csv (sidecar json alongside)");
  }
  certify->add_option("--solution", flags.solution, "Solution json (default: synthesize with the config method)");
  certify->add_option("--delta", flags.delta, "Noise bound ||D0||_2 <= delta");
  certify->add_option("--eta1", flags.eta1, "Certificate parameter eta1 >= 1");
  verify->add_option("--only", flags.only, "Run only these criteria")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  const char* stage = "config";
  try {
    const config::RunConfig cfg = resolve(flags);
    if (simulate->parsed()) { stage = "simulate"; return cmd_simulate(cfg); }
    if (identify->parsed()) { stage = "identify"; return cmd_identify(cfg); }
    if (synth->parsed()) { stage = "synthesize"; return cmd_synthesize(cfg); }
    if (certify->parsed()) { stage = "certify"; return cmd_certify(cfg); }
    if (sweep_l->parsed()) { stage = "sweep-lambda"; return cmd_sweep_lambda(cfg); }
    if (sweep_n->parsed()) { stage = "sweep-noise"; return cmd_sweep_noise(cfg); }
    if (verify->parsed()) { stage = "verify"; return cmd_verify(cfg, flags.only); }
  } catch (const config::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfig;
  } catch (const Infeasible& e) {
    std::cerr << stage << ": infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const NotIdentifiable& e) {
    std::cerr << stage << ": " << e.what() << "\n";
    return kNumerical;
  } catch (const InvalidInput& e) {
    std::cerr << stage << ": invalid input: " << e.what() << "\n";
    return kConfig;
  } catch (const Error& e) {
    std::cerr << stage << ": numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << stage << ": " << e.what() << "\n";
    return kNumerical;
  }
  return kConfig;
}
