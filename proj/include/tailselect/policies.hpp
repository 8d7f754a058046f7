#pragma once

#include <vector>

#include "tailselect/estimators.hpp"
#include "tailselect/nu.hpp"
#include "tailselect/rng.hpp"
#include "tailselect/scenario.hpp"

namespace tailselect {

// Which risk functional a rule or experiment targets. tail_prob and
// excess_loss take nu as a loss threshold; var and cvar take nu as the
// rarity 1/(1-level).
enum class RiskKind { tail_prob, excess_loss, var, cvar };

enum class SelectionKind {
  min_tail_index,          // argmin beta_hat
  min_pot_prob,            // argmin extrapolated tail probability p_hat
  min_pot_quantile,        // argmin extrapolated quantile q_hat
  min_standard_estimator,  // argmin of the plain empirical risk estimate
};

// How the final selection is made from a finished sample store. The rule
// never influences how the budget was allocated.
struct SelectionRule {
  SelectionKind kind = SelectionKind::min_tail_index;
  RiskKind risk = RiskKind::tail_prob;  // for min_standard_estimator and the
                                        // p-hat/q-hat dichotomy
  NuSpec nu;
  double u = 0.9;     // body quantile level for POT fits
  double delta = 0.8; // threshold exponent for tail-index fits
};

struct PolicyParams {
  long n0 = 100;            // warmup samples per alternative
  long m = 100;             // batch size
  double delta0 = 0.8;      // initial threshold exponent
  double delta_step = 0.05; // local-search stride for delta
  double delta_lo = 0.55;
  double delta_hi = 0.95;
  double u = 0.9;
  int min_exceedances = 5;
  double solver_step_floor = 1e-6; // allocation solver precision per batch
  int solver_iters_per_stage = 60;
  // Test hook: nonempty replaces every tail-index fit with these values.
  std::vector<double> forced_betas;
};

// One allocation decision, recorded before the batch is drawn.
struct TrajectoryPoint {
  long t = 0;
  std::vector<double> alpha;      // empirical sampling ratio counts/t
  std::vector<double> estimates;  // beta_hat per alternative (rho_hat for GJ)
  double delta_t = 0.0;           // NaN where no threshold exponent applies
  double g_hat = 0.0;             // rate of the empirical ratio
};

struct RunResult {
  int selected = -1;
  // The false-selection event: the true best alternative's estimate is not
  // the strict minimum. A tie counts as false even though argmin with
  // smallest-index tie-break would still pick the best.
  bool false_selection = false;
  std::vector<long> counts;
  std::vector<double> final_estimates;
  std::vector<TrajectoryPoint> trajectory;  // populated only when tracing
};

// Throws std::invalid_argument unless every field is usable for a scenario
// with k alternatives.
void validate_policy_params(const PolicyParams& params, int k);

// Apportions `total` into integers proportional to `weights` (nonnegative,
// positive sum): floors of the exact quotas plus the largest fractional
// remainders, smallest index winning remainder ties.
std::vector<long> largest_remainder(const std::vector<double>& weights,
                                    long total);

int argmin_index(const std::vector<double>& v);
bool is_false_selection(const std::vector<double>& estimates, int best);

// Per-alternative estimates under `rule` from a finished store. `stage` is
// the total consumed budget (drives the threshold rule); `nu_value` is the
// already-resolved threshold.
std::vector<double> rule_estimates(const SampleStore& store,
                                   const SelectionRule& rule, double nu_value,
                                   long stage);

// Static allocation: draw largest_remainder(alpha, T) samples per
// alternative, then select by `rule`.
RunResult run_static(const Scenario& scenario, const std::vector<double>& alpha,
                     long T, const SelectionRule& rule, Rng& g);

// Tail-index-based rate-optimal policy: round-robin warmup, then batches of m
// samples split by tracking the estimated rate-optimal allocation; selects
// argmin beta_hat.
RunResult run_tiro(const Scenario& scenario, long T, const PolicyParams& params,
                   Rng& g, bool trace = false);

// TIRO plus a per-batch local search over the threshold exponent delta
// (maximizing T^delta * G_hat at the current ratio) and a tie-robust final
// selection through the POT extrapolation: p_hat for threshold risks,
// q_hat for quantile risks.
RunResult run_itiro(const Scenario& scenario, long T, const NuSpec& nu,
                    RiskKind risk, const PolicyParams& params, Rng& g,
                    bool trace = false);

// Benchmark: the same batch skeleton driven by the Bernoulli large-deviations
// rate of the exceedance indicators 1{L > nu}; selects argmin rho_hat.
RunResult run_gj(const Scenario& scenario, long T, const NuSpec& nu,
                 const PolicyParams& params, Rng& g, bool trace = false);

}  // namespace tailselect
