#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ionsim::app {

struct CheckResult {
  std::string name;
  bool passed = false;
  bool fatal = true;  // false for qualitative reports (WARN on failure)
  double deviation = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

std::vector<CheckResult> oracle_checks();
std::vector<CheckResult> claim_reports();

// Prints one line per check; returns 0 iff every fatal check passed.
int run_selftest(std::ostream& out, bool with_claims = true);

}  // namespace ionsim::app
