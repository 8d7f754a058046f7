#pragma once

#include <vector>

namespace tailselect {

// KL divergence between exponential laws with means theta and vartheta.
double kl_exp(double theta, double vartheta);

struct RateInstance {
  std::vector<double> betas;  // true or estimated tail indices, all > 0
  int best = 0;               // argmin of betas, smallest index on ties
};

RateInstance make_rate_instance(std::vector<double> betas);

// alpha_b * KL(theta* || beta_b) + alpha_i * KL(theta* || beta_i) with
// theta* = (alpha_b + alpha_i) / (alpha_b/beta_b + alpha_i/beta_i).
// Zero when either allocation is zero (continuity convention).
double pairwise_rate(double alpha_b, double alpha_i, double beta_b,
                     double beta_i);

// Decay rate of the false-selection probability under allocation alpha:
// the minimum pairwise rate against the best alternative.
double rate_G(const std::vector<double>& alpha, const RateInstance& inst);

// Euclidean projection onto the probability simplex via the threshold form
// (v - kappa)^+ with kappa from a sort-and-scan pass.
std::vector<double> project_simplex(std::vector<double> v);

struct MaximizeResult {
  std::vector<double> alpha;
  double value = 0.0;
  bool degenerate = false;  // some competitor shares the best value exactly
  bool converged = false;
  long evals = 0;
};

// Projected supergradient ascent from equal allocation: an opening pass with
// the diminishing 0.1/sqrt(n) schedule, then normalized-direction stages whose
// step halves until step_floor. When polish is set, a nested-bisection solve
// of the equal-rate balance system refines the incumbent; sequential policies
// skip it on their per-batch path. Returns the best iterate seen.
MaximizeResult maximize_rate(const RateInstance& inst,
                             double step_floor = 1e-9,
                             int iters_per_stage = 120, bool polish = true);

// Bernoulli-Chernoff analogue used by the exceedance-probability benchmark:
// min over i != best of -(a_b+a_i) log((1-r_b)^w (1-r_i)^{1-w} + r_b^w r_i^{1-w})
// with w = a_b/(a_b+a_i).
double gj_rate(const std::vector<double>& alpha, const std::vector<double>& rho,
               int best);

MaximizeResult maximize_gj_rate(const std::vector<double>& rho, int best,
                                double step_floor = 1e-9,
                                int iters_per_stage = 120, bool polish = true);

}  // namespace tailselect
