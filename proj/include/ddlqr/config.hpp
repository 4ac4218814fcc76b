#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ddlqr/bench.hpp"
#include "ddlqr/error.hpp"
#include "ddlqr/solution.hpp"
#include "ddlqr/system.hpp"

namespace ddlqr::config {

/// Malformed configuration; what() reads "config:LINE: message".
class ConfigError : public InvalidInput {
 public:
  ConfigError(int line, const std::string& msg);
  [[nodiscard]] int line() const { return line_; }

 private:
  int line_;
};

/// Everything a run needs. Defaults reproduce the laplacian3 experiment.
struct RunConfig {
  Matrix A, B;  // plant
  Matrix Q, R;  // weights
  Eigen::Index T = 20;
  double sigma = 0.1;
  std::vector<double> sigmas{0.01, 0.1, 0.3, 0.7, 1.0};
  Method method = Method::indirect();
  std::optional<std::vector<double>> lambdas;  // absent: default_lambda_grid()
  std::vector<std::string> methods{"ce", "robust", "mixed"};
  double robust_rho = 1.0;
  double mixed_lambda = 1.0;
  double mixed_rho = 1.0;
  int trials = 100;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string dataset;   // input dataset csv for identify/synthesize/certify
  std::string solution;  // input solution json for certify
  std::string out = "out";
  std::optional<double> delta;  // noise bound for certify; default ||D0||_2
  double eta1 = 2.0;

  RunConfig();

  [[nodiscard]] LtiSystem system() const;
  [[nodiscard]] LqrWeights weights() const;
  [[nodiscard]] std::vector<bench::NamedMethod> named_methods() const;
};

/// Parses the key = value format documented in docs/config.md.
RunConfig parse(std::string_view text);
RunConfig load(const std::string& path);

/// Parses a bracketed matrix such as [[1, 0], [0, 1]].
Matrix parse_matrix(std::string_view text);

}  // namespace ddlqr::config
