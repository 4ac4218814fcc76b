// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Usage: acceptance [seed] [jobs]

#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include "ddlqr/acceptance.hpp"

int main(int argc, char** argv) {
  ddlqr::acceptance::Options opts;
  if (argc > 1) opts.seed = std::stoull(argv[1]);
  opts.jobs = argc > 2 ? std::stoi(argv[2]) : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int failed = 0;
  ddlqr::acceptance::run(opts, [&](const ddlqr::acceptance::CriterionResult& r) {
    if (!r.passed) ++failed;
    std::cout << ddlqr::acceptance::format(r) << std::endl;
  });
  std::cout << (failed == 0 ? "acceptance: all criteria passed" : "acceptance: " + std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
