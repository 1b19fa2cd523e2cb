#include <iostream>

#include "dsbm/acceptance.hpp"

// Runs every criterion (Monte Carlo included) and prints one line each.
int main() {
  dsbm::acceptance::SuiteOptions options;
  options.fixture_dir = DSBM_FIXTURE_DIR;
  const auto results = dsbm::acceptance::run_suite(
      options, [](const dsbm::acceptance::CriterionResult& r) { std::cout << r.line() << std::endl; });
  int failed = 0;
  for (const auto& r : results) failed += r.ok() ? 0 : 1;
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
