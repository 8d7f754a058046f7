#pragma once

#include <string>
#include <vector>

#include "tailselect/distributions.hpp"

namespace tailselect {

// A named selection problem: k alternatives, exactly one family. Alternative
// indices are 0-based throughout the API.
struct Scenario {
  std::string name;
  Family family = Family::pareto_type_i;
  std::vector<DistributionSpec> alternatives;
  bool tie = false;

  int k() const { return static_cast<int>(alternatives.size()); }
  // Argmin of the true tail index; smallest index on ties.
  int best_index() const;
  // Every index whose tail index equals the minimum.
  std::vector<int> tie_indices() const;
};

// The six built-in scenarios: {pareto, student_t, frechet} x {setup1, setup2},
// where setup2 replaces the last alternative with a 1.1-scaled copy of the
// first (same tail index, strictly larger losses).
const std::vector<Scenario>& scenario_catalog();
const Scenario& scenario_by_name(const std::string& name);

std::string scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const std::string& text);

}  // namespace tailselect
