#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ek {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// One entry per acceptance criterion, evaluated at the pinned parameters
// and tolerances. Exposed both to the test suite and the CLI selftest.
CriterionResult acceptance_criterion(int id);

// Runs all criteria; prints one pass/fail line each to `out` when given.
std::vector<CriterionResult> run_acceptance(std::ostream* out);

}  // namespace ek
