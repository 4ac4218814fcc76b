#include "ddlqr/solution_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ddlqr/error.hpp"
#include "json.hpp"

namespace ddlqr::io {

using nlohmann::json;

namespace {

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const char* name) {
  if (!j.is_array()) throw InvalidInput(std::string("solution json: ") + name + " must be an array of rows");
  if (j.empty()) return Matrix();
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidInput(std::string("solution json: ragged rows in ") + name);
    }
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

// JSON has no infinity; non-finite values become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string solution_to_json(const LqrSolution& sol, const Certificates* cert) {
  json j;
  const Method method = sol.method.value_or(Method{});
  j["method"] = std::string(to_string(method.variant));
  j["lambda"] = method.lambda;
  j["rho"] = method.rho;
  j["norm"] = std::string(to_string(method.norm));
  j["zero_gain"] = method.zero_gain;
  j["K"] = matrix_json(sol.K);
  j["P"] = matrix_json(sol.P);
  j["objective"] = number(sol.objective);
  j["status"] = std::string(to_string(sol.status));
  if (!sol.note.empty()) j["note"] = sol.note;
  if (sol.route_discrepancy) j["route_discrepancy"] = number(*sol.route_discrepancy);
  j["solver_iterations"] = sol.solver_iterations;
  j["X"] = matrix_json(sol.X);
  j["Y"] = matrix_json(sol.Y);
  j["G"] = matrix_json(sol.G);
  if (cert != nullptr) {
    json c;
    c["eta1_margin"] = number(cert->eta1_margin);
    c["theta_slack"] = number(cert->theta_slack);
    c["M_norm"] = number(cert->m_norm);
    c["X1M_norm"] = number(cert->x1m_norm);
    c["lemma1_eta1"] = cert->eta1 ? json(*cert->eta1) : json(nullptr);
    if (cert->feasibility) {
      c["feasibility_margin"] = number(cert->feasibility->margin);
      c["feasibility_eta2"] = cert->feasibility->eta2 ? json(*cert->feasibility->eta2) : json(nullptr);
    }
    j["certificates"] = std::move(c);
  } else {
    j["certificates"] = nullptr;
  }
  return j.dump(2) + "\n";
}

LqrSolution solution_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    LqrSolution sol;
    Method m;
    m.variant = parse_variant(j.at("method").get<std::string>());
    m.lambda = j.value("lambda", 0.0);
    m.rho = j.value("rho", 0.0);
    m.norm = parse_norm_kind(j.value("norm", std::string("frobenius")));
    m.zero_gain = j.value("zero_gain", false);
    sol.method = m;
    sol.K = matrix_from_json(j.at("K"), "K");
    sol.P = matrix_from_json(j.at("P"), "P");
    sol.objective = j.at("objective").is_null() ? NAN : j.at("objective").get<double>();
    sol.status = j.at("status").get<std::string>() == "optimal" ? LqrStatus::optimal : LqrStatus::numerical_failure;
    sol.note = j.value("note", std::string());
    if (j.contains("route_discrepancy") && !j["route_discrepancy"].is_null()) {
      sol.route_discrepancy = j["route_discrepancy"].get<double>();
    }
    sol.solver_iterations = j.value("solver_iterations", 0);
    if (j.contains("X")) sol.X = matrix_from_json(j["X"], "X");
    if (j.contains("Y")) sol.Y = matrix_from_json(j["Y"], "Y");
    if (j.contains("G")) sol.G = matrix_from_json(j["G"], "G");
    return sol;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed solution json: ") + e.what());
  }
}

void write_solution(const LqrSolution& sol, const std::filesystem::path& path, const Certificates* cert) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << solution_to_json(sol, cert);
}

LqrSolution read_solution(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return solution_from_json(ss.str());
}

}  // namespace ddlqr::io
