#pragma once

#include <functional>

#include "tailselect/sample_store.hpp"

namespace tailselect {

// Empirical tail probability: fraction of samples strictly above nu.
double est_tail_prob(const SampleStore& store, int i, double nu);

// Mean of max{h(L) - h(nu), 0}; h defaults to the identity.
double est_excess_loss(const SampleStore& store, int i, double nu);
double est_excess_loss(const SampleStore& store, int i, double nu,
                       const std::function<double(double)>& h);

// Empirical VaR at level p: the ceil(N*p)-th smallest value, no interpolation.
double est_var(const SampleStore& store, int i, double p);

// Empirical CVaR at rarity nu (level 1 - 1/nu): the Rockafellar-Uryasev
// objective evaluated at the empirical VaR, where its minimum is attained.
double est_cvar(const SampleStore& store, int i, double nu);

struct ThresholdRule {
  double delta = 0.8;        // in (1/2, 1)
  int min_exceedances = 5;
};

struct ThresholdResult {
  double gamma = 0.0;  // the (k+1)-th largest value; exactly k values exceed it
  long k = 0;
};

// Data-driven threshold: k = clamp(ceil(N_i * t^{delta-1}), min_exceedances,
// N_i - 1) where t is the current total budget across alternatives.
ThresholdResult select_threshold(const SampleStore& store, int i,
                                 const ThresholdRule& rule, long budget_now);

struct TailIndexEstimate {
  double beta_hat = 0.0;
  double gamma = 0.0;
  long exceedance_count = 0;
};

// Ratio estimator: mean of log(L/gamma) over samples with L > gamma strictly.
TailIndexEstimate est_tail_index(const SampleStore& store, int i, double gamma);

// Peaks-over-threshold extrapolations from the body quantile at level u to the
// extreme threshold nu (p_hat) or the extreme quantile 1 - 1/nu (q_hat).
double est_pot_prob(const SampleStore& store, int i, double nu, double u,
                    double beta_hat);
double est_pot_quantile(const SampleStore& store, int i, double nu, double u,
                        double beta_hat);

}  // namespace tailselect
