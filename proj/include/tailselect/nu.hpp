#pragma once

#include "tailselect/scenario.hpp"

namespace tailselect {

// How the risk threshold nu is derived for a given scenario and budget.
enum class NuKind {
  power_of_t,        // coeff * T^exponent
  mean_plus_sigmas,  // mean(best alt) + c * stddev(best alt)
  quantile_level,    // 1 / (1 - p), i.e. VaR/CVaR at level p
};

struct NuSpec {
  NuKind kind = NuKind::mean_plus_sigmas;
  double coeff = 0.2;    // power_of_t
  double exponent = 0.5; // power_of_t
  double c = 2.0;        // mean_plus_sigmas
  double p = 0.99;       // quantile_level
};

// Resolves the threshold. mean_plus_sigmas uses the first alternative and
// throws std::domain_error when its variance does not exist.
double resolve_nu(const NuSpec& spec, const Scenario& scenario, long long t);

}  // namespace tailselect
