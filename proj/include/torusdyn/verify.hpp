#pragma once

#include <functional>
#include <string>
#include <vector>

#include "torusdyn/config.hpp"

namespace torusdyn {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  json measured = json::object();  // the numbers the verdict rests on
};

/// Runs the acceptance criteria 1-7 in order; `only` restricts to one id.
/// `progress` is called after each criterion.
std::vector<CriterionResult> run_acceptance(int only = 0,
                                            const std::function<void(const CriterionResult&)>& progress = {});

/// "PASS  3 linearization  (1.23 s)  {...}"
std::string format_line(const CriterionResult& r);

}  // namespace torusdyn
