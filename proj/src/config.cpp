#include "ddlqr/config.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "ddlqr/dataset_io.hpp"

namespace ddlqr::config {

ConfigError::ConfigError(int line, const std::string& msg)
    : InvalidInput("config:" + std::to_string(line) + ": " + msg), line_(line) {}

RunConfig::RunConfig() {
  const LtiSystem sys = LtiSystem::laplacian3();
  A = sys.A();
  B = sys.B();
  const LqrWeights w = LqrWeights::cheap_control(sys.n(), sys.m());
  Q = w.Q();
  R = w.R();
}

LtiSystem RunConfig::system() const { return LtiSystem(A, B); }
LqrWeights RunConfig::weights() const { return LqrWeights(Q, R); }

std::vector<bench::NamedMethod> RunConfig::named_methods() const {
  std::vector<bench::NamedMethod> out;
  for (const std::string& m : methods) {
    if (m == "ce") out.push_back(bench::ce_method());
    else if (m == "robust") out.push_back(bench::robust_method(robust_rho));
    else if (m == "mixed") out.push_back(bench::mixed_method(mixed_lambda, mixed_rho));
    else throw InvalidInput("unknown method label '" + m + "' (expected ce, robust or mixed)");
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return std::string(s.substr(1, s.size() - 2));
  return std::string(s);
}

// Splits "[a, b, [c, d]]" into its top-level items.
std::vector<std::string_view> split_list(std::string_view s) {
  s = trim(s);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw InvalidInput("expected a bracketed list");
  s = trim(s.substr(1, s.size() - 2));
  std::vector<std::string_view> items;
  if (s.empty()) return items;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '[') ++depth;
    else if (s[i] == ']') --depth;
    else if (s[i] == ',' && depth == 0) {
      items.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
    if (depth < 0) throw InvalidInput("unbalanced brackets");
  }
  if (depth != 0) throw InvalidInput("unbalanced brackets");
  items.push_back(trim(s.substr(start)));
  for (std::string_view it : items) {
    if (it.empty()) throw InvalidInput("empty list item");
  }
  return items;
}

double number(std::string_view s) {
  const double v = io::parse_double(s);
  if (!std::isfinite(v)) throw InvalidInput("not a finite number: '" + std::string(trim(s)) + "'");
  return v;
}

std::vector<double> number_list(std::string_view s) {
  std::vector<double> out;
  for (std::string_view it : split_list(s)) out.push_back(number(it));
  return out;
}

long long integer(std::string_view s) {
  s = trim(s);
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidInput("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t unsigned_integer(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidInput("not an unsigned integer: '" + std::string(s) + "'");
  }
  return v;
}

bool boolean(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InvalidInput("not a boolean: '" + std::string(s) + "'");
}

// Matrix literal, or a scalar meaning scalar * I of the given size.
Matrix matrix_or_scalar(std::string_view s, Eigen::Index n, const char* name) {
  s = trim(s);
  if (s.empty() || s.front() != '[') return number(s) * Matrix::Identity(n, n);
  Matrix m = parse_matrix(s);
  if (m.rows() != n || m.cols() != n) {
    throw InvalidInput(std::string(name) + " must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  return m;
}

}  // namespace

Matrix parse_matrix(std::string_view text) {
  const std::vector<std::string_view> rows = split_list(text);
  if (rows.empty()) throw InvalidInput("matrix has no rows");
  std::vector<std::vector<double>> vals;
  for (std::string_view r : rows) vals.push_back(number_list(r));
  Matrix m(static_cast<Eigen::Index>(vals.size()), static_cast<Eigen::Index>(vals[0].size()));
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i].size() != vals[0].size() || vals[i].empty()) throw InvalidInput("matrix rows differ in length");
    for (std::size_t j = 0; j < vals[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vals[i][j];
    }
  }
  return m;
}

RunConfig parse(std::string_view text) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  // Weight values are resolved after the plant, since scalars expand to identities.
  std::optional<std::pair<std::string, int>> q_text, r_text;
  std::optional<std::pair<std::string, int>> lambda_text, rho_text;
  int method_line = 0;

  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    const int key_line = line_no;

    auto strip_comment = [](std::string& l) {
      const std::size_t hash = l.find('#');
      if (hash != std::string::npos) l.erase(hash);
    };
    strip_comment(line);
    if (trim(line).empty()) continue;

    // A value whose brackets are still open continues on the following lines.
    auto depth_of = [](const std::string& l) {
      int d = 0;
      for (char ch : l) d += ch == '[' ? 1 : (ch == ']' ? -1 : 0);
      return d;
    };
    while (depth_of(line) > 0 && pos < text.size()) {
      end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string more(text.substr(pos, end - pos));
      pos = end + 1;
      ++line_no;
      strip_comment(more);
      line += ' ' + more;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(key_line, "expected 'key = value'");
    const std::string key(trim(std::string_view(line).substr(0, eq)));
    const std::string_view value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(key_line, "missing key before '='");
    if (value.empty()) throw ConfigError(key_line, "missing value for '" + key + "'");
    if (const auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(key_line, "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
    }
    seen.emplace(key, key_line);

    try {
      if (key == "system") {
        if (value != "laplacian3") throw InvalidInput("unknown system preset '" + std::string(value) + "'");
        const LtiSystem s = LtiSystem::laplacian3();
        cfg.A = s.A();
        cfg.B = s.B();
      } else if (key == "A") {
        cfg.A = parse_matrix(value);
      } else if (key == "B") {
        cfg.B = parse_matrix(value);
      } else if (key == "weights") {
        if (value != "cheap_control") throw InvalidInput("unknown weights preset '" + std::string(value) + "'");
      } else if (key == "Q") {
        q_text = {std::string(value), key_line};
      } else if (key == "R") {
        r_text = {std::string(value), key_line};
      } else if (key == "T") {
        const long long t = integer(value);
        if (t < 1) throw InvalidInput("T must be >= 1");
        cfg.T = static_cast<Eigen::Index>(t);
      } else if (key == "sigma") {
        cfg.sigma = number(value);
        if (!(cfg.sigma >= 0.0)) throw InvalidInput("sigma must be >= 0");
      } else if (key == "sigmas") {
        cfg.sigmas = number_list(value);
        if (cfg.sigmas.empty()) throw InvalidInput("sigmas must not be empty");
        for (double s : cfg.sigmas) {
          if (!(s >= 0.0)) throw InvalidInput("sigmas must be >= 0");
        }
      } else if (key == "method") {
        cfg.method.variant = parse_variant(unquote(value));
        method_line = key_line;
      } else if (key == "lambda") {
        lambda_text = {std::string(value), key_line};
      } else if (key == "rho") {
        rho_text = {std::string(value), key_line};
      } else if (key == "norm") {
        cfg.method.norm = parse_norm_kind(unquote(value));
      } else if (key == "zero_gain") {
        cfg.method.zero_gain = boolean(value);
      } else if (key == "lambdas") {
        cfg.lambdas = number_list(value);
        const auto& g = *cfg.lambdas;
        if (g.empty()) throw InvalidInput("lambdas must not be empty");
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (!(g[i] > 0.0) || (i > 0 && !(g[i] > g[i - 1]))) {
            throw InvalidInput("lambdas must be positive and strictly ascending");
          }
        }
      } else if (key == "methods") {
        cfg.methods.clear();
        for (std::string_view it : split_list(value)) cfg.methods.push_back(unquote(it));
        (void)cfg.named_methods();  // validates the names
      } else if (key == "robust_rho") {
        cfg.robust_rho = number(value);
      } else if (key == "mixed_lambda") {
        cfg.mixed_lambda = number(value);
      } else if (key == "mixed_rho") {
        cfg.mixed_rho = number(value);
      } else if (key == "trials") {
        const long long t = integer(value);
        if (t < 1) throw InvalidInput("trials must be >= 1");
        cfg.trials = static_cast<int>(t);
      } else if (key == "seed") {
        cfg.seed = unsigned_integer(value);
      } else if (key == "jobs") {
        const long long j = integer(value);
        if (j < 1) throw InvalidInput("jobs must be >= 1");
        cfg.jobs = static_cast<int>(j);
      } else if (key == "dataset") {
        cfg.dataset = unquote(value);
      } else if (key == "solution") {
        cfg.solution = unquote(value);
      } else if (key == "out") {
        cfg.out = unquote(value);
      } else if (key == "delta") {
        cfg.delta = number(value);
        if (!(*cfg.delta >= 0.0)) throw InvalidInput("delta must be >= 0");
      } else if (key == "eta1") {
        cfg.eta1 = number(value);
        if (!(cfg.eta1 >= 1.0)) throw InvalidInput("eta1 must be >= 1");
      } else {
        throw InvalidInput("unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidInput& e) {
      throw ConfigError(key_line, e.what());
    }
  }

  auto line_of = [&](const char* k) {
    const auto it = seen.find(k);
    return it == seen.end() ? 0 : it->second;
  };
  const int plant_line = std::max(line_of("A"), line_of("B"));
  if (cfg.A.rows() != cfg.A.cols()) throw ConfigError(line_of("A"), "A must be square");
  if (cfg.B.rows() != cfg.A.rows()) throw ConfigError(plant_line, "B must have as many rows as A");
  try {
    if (q_text) cfg.Q = matrix_or_scalar(q_text->first, cfg.A.rows(), "Q");
    else if (cfg.Q.rows() != cfg.A.rows()) cfg.Q = Matrix::Identity(cfg.A.rows(), cfg.A.rows());
  } catch (const InvalidInput& e) {
    throw ConfigError(q_text->second, e.what());
  }
  try {
    if (r_text) cfg.R = matrix_or_scalar(r_text->first, cfg.B.cols(), "R");
    else if (cfg.R.rows() != cfg.B.cols()) cfg.R = 1e-3 * Matrix::Identity(cfg.B.cols(), cfg.B.cols());
  } catch (const InvalidInput& e) {
    throw ConfigError(r_text->second, e.what());
  }
  try {
    (void)cfg.weights();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::max({line_of("Q"), line_of("R"), plant_line}), e.what());
  }
  try {
    if (lambda_text) cfg.method.lambda = number(lambda_text->first);
    if (rho_text) cfg.method.rho = number(rho_text->first);
    cfg.method.validate();
  } catch (const InvalidInput& e) {
    const int l = std::max({lambda_text ? lambda_text->second : 0, rho_text ? rho_text->second : 0, method_line});
    throw ConfigError(l, e.what());
  }
  for (const char* k : {"robust_rho", "mixed_lambda", "mixed_rho"}) {
    const double v = std::string(k) == "robust_rho" ? cfg.robust_rho
                     : std::string(k) == "mixed_lambda" ? cfg.mixed_lambda : cfg.mixed_rho;
    if (!(v >= 0.0)) throw ConfigError(line_of(k), std::string(k) + " must be >= 0");
  }
  return cfg;
}

RunConfig load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace ddlqr::config
