#pragma once

#include "tailselect/rng.hpp"

namespace tailselect {

enum class Family { pareto_type_i, shifted_abs_student_t, frechet };

// One loss distribution. The shape parameter is kappa (Pareto), omega
// (Student-t degrees of freedom), or a (Frechet); scale_or_shift is tau
// (Pareto), the additive shift (Student-t, 3 in the built-in scenarios), or
// s (Frechet). multiplier rescales the loss: L_c = c * L_1, so
// survival_c(x) = survival_1(x/c).
struct DistributionSpec {
  Family family = Family::pareto_type_i;
  double shape = 1.0;
  double scale_or_shift = 1.0;
  double multiplier = 1.0;
};

DistributionSpec make_pareto(double kappa, double tau, double multiplier = 1.0);
// The loss is |X| + shift - E|X| with X Student-t(omega); requires omega > 1
// so that E|X| exists. Mean is exactly `shift`.
DistributionSpec make_student_t(double omega, double shift = 3.0,
                                double multiplier = 1.0);
DistributionSpec make_frechet(double a, double s, double multiplier = 1.0);

double sample(const DistributionSpec& spec, Rng& g);

// Analytic oracle.
double tail_index(const DistributionSpec& spec);  // always 1/shape
double mean(const DistributionSpec& spec);
double variance(const DistributionSpec& spec);
double survival(const DistributionSpec& spec, double x);
double var_level(const DistributionSpec& spec, double p);   // VaR at level p
double cvar_level(const DistributionSpec& spec, double p);  // CVaR at level p

// E|X| for X Student-t(omega), omega > 1. Exposed so tests can cross-check the
// closed form against numerical integration.
double abs_student_t_mean(double omega);

}  // namespace tailselect
