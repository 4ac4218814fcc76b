#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "ddlqr/certificates.hpp"
#include "ddlqr/solution.hpp"

namespace ddlqr::io {

/// JSON record {method, lambda, rho, norm, K, P, objective, status,
/// certificates} plus the raw Y, X, G needed to re-certify later.
/// Matrices are arrays of rows.
std::string solution_to_json(const LqrSolution& sol, const Certificates* cert = nullptr);
LqrSolution solution_from_json(const std::string& text);

void write_solution(const LqrSolution& sol, const std::filesystem::path& path,
                    const Certificates* cert = nullptr);
LqrSolution read_solution(const std::filesystem::path& path);

}  // namespace ddlqr::io
