// Runs acceptance criteria 1-7 and prints one PASS/FAIL line per criterion.

#include <cstdlib>
#include <iostream>

#include "torusdyn/verify.hpp"

int main(int argc, char** argv) {
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  bool ok = true;
  torusdyn::run_acceptance(only, [&](const torusdyn::CriterionResult& r) {
    std::cout << format_line(r) << std::endl;
    ok = ok && r.pass;
  });
  return ok ? 0 : 1;
}
