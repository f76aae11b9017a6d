#pragma once

// Acceptance checks over the bundled scenario suite.

#include <ostream>
#include <string>
#include <vector>

namespace vsheet::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs all criteria in order. When out_dir is non-empty each scenario's
/// report.json and sweep.csv are written under out_dir/<scenario>.
std::vector<CriterionResult> run_all(std::ostream *log = nullptr, const std::string &out_dir = {});

/// "PASS 3 name: detail" or "FAIL ...".
std::string format(const CriterionResult &r);

} // namespace vsheet::acceptance
