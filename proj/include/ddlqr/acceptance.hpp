#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ddlqr::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  std::uint64_t seed = 1;  // master seed for every stochastic criterion
  int jobs = 1;
  std::vector<int> only;   // empty: all criteria 1..10
};

/// Runs the criteria in order, reporting each result as soon as it is known.
std::vector<CriterionResult> run(const Options& opts,
                                 const std::function<void(const CriterionResult&)>& on_result = {});

/// "[PASS] 3 exact penalty: ... (1.2 s)".
std::string format(const CriterionResult& r);

}  // namespace ddlqr::acceptance
