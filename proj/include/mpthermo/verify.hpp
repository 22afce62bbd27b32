#pragma once

#include <string>
#include <vector>

namespace mpt {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Number of acceptance criteria in the golden battery.
inline constexpr int kCriterionCount = 11;

/// Runs one acceptance criterion (1-based). Exceptions become failures.
CriterionResult run_criterion(int id);

/// Runs the listed criteria, or all of them when `ids` is empty.
std::vector<CriterionResult> run_battery(const std::vector<int>& ids = {});

/// One line per criterion: "PASS|FAIL  <id>  <name>  <seconds>s  <detail>".
std::string format_result(const CriterionResult& r);

}  // namespace mpt
