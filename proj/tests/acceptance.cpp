// Acceptance runner: one PASS/FAIL line per criterion. Exit 0 iff every selected criterion passes.

#include "posg/acceptance.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int criterion = 0;
  app.add_option("--criterion", criterion, "run a single criterion")
      ->check(CLI::Range(1, posg::kCriterionCount));
  CLI11_PARSE(app, argc, argv);

  bool ok = true;
  for (int id = 1; id <= posg::kCriterionCount; ++id) {
    if (criterion != 0 && id != criterion) continue;
    const auto result = posg::run_criterion(id);
    posg::print(std::cout, result);
    ok &= result.passed();
  }
  return ok ? 0 : 1;
}
