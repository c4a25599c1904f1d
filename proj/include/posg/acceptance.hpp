#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace posg {

struct CheckLine {
  std::string label;
  bool pass = false;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<CheckLine> checks;
  double seconds = 0.0;

  bool passed() const;
};

inline constexpr int kCriterionCount = 8;

/// Runs one acceptance criterion (1..8). Exceptions are reported as a failed check.
CriterionResult run_criterion(int id);

/// One PASS/FAIL line per criterion, followed by its indented checks.
void print(std::ostream& out, const CriterionResult& result);

/// Randomized property suite outcome.
struct PropertyOutcome {
  std::string name;
  int cases = 0;
  int failures = 0;
  double worst = 0.0;
};

/// The six property suites of criterion 8, each with `cases` cases from a fixed seed.
std::vector<PropertyOutcome> run_property_suites(int cases = 1000, unsigned long long seed = 7);

}  // namespace posg
