#include "tailselect/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tailselect/rate_function.hpp"

namespace tailselect {

void validate_policy_params(const PolicyParams& p, int k) {
  if (p.n0 < 1) throw std::invalid_argument("n0 must be >= 1");
  if (p.m < 1) throw std::invalid_argument("batch size m must be >= 1");
  if (!(p.delta0 > 0.5 && p.delta0 < 1.0))
    throw std::invalid_argument("delta0 must lie in (1/2, 1)");
  if (!(p.delta_lo > 0.5 && p.delta_hi < 1.0 && p.delta_lo <= p.delta_hi))
    throw std::invalid_argument("delta bounds must satisfy 1/2 < lo <= hi < 1");
  if (p.delta_step < 0.0)
    throw std::invalid_argument("delta_step must be >= 0");
  if (!(p.u > 0.0 && p.u < 1.0))
    throw std::invalid_argument("u must lie in (0, 1)");
  if (p.min_exceedances < 2)
    throw std::invalid_argument("min_exceedances must be >= 2");
  if (!(p.solver_step_floor > 0.0) || p.solver_iters_per_stage < 1)
    throw std::invalid_argument("bad solver settings");
  if (!p.forced_betas.empty()) {
    if (static_cast<int>(p.forced_betas.size()) != k)
      throw std::invalid_argument("forced_betas size must equal k");
    for (double b : p.forced_betas)
      if (!(b > 0.0)) throw std::invalid_argument("forced_betas must be > 0");
  }
}

namespace {

void check_budget(long T, int k, const PolicyParams& p) {
  if (T < static_cast<long>(k) * p.n0)
    throw std::invalid_argument("budget T smaller than k * n0 warmup");
}

void draw_into(SampleStore& store, std::vector<long>& counts,
               const Scenario& sc, int i, long n, Rng& g) {
  for (long j = 0; j < n; ++j) store.add(i, sample(sc.alternatives[i], g));
  counts[static_cast<std::size_t>(i)] += n;
}

// Warmup: alternatives 0..k-1 in order, repeated n0 times.
void warmup(SampleStore& store, std::vector<long>& counts, const Scenario& sc,
            long n0, Rng& g) {
  for (long r = 0; r < n0; ++r)
    for (int i = 0; i < sc.k(); ++i) draw_into(store, counts, sc, i, 1, g);
}

std::vector<double> sampling_ratio(const std::vector<long>& counts, long t) {
  std::vector<double> a(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    a[i] = static_cast<double>(counts[i]) / static_cast<double>(t);
  return a;
}

std::vector<double> fit_betas(const SampleStore& store, double delta,
                              int min_exc, long stage) {
  const int k = store.num_alternatives();
  std::vector<double> betas(static_cast<std::size_t>(k));
  const ThresholdRule rule{delta, min_exc};
  for (int i = 0; i < k; ++i) {
    const ThresholdResult thr = select_threshold(store, i, rule, stage);
    betas[static_cast<std::size_t>(i)] =
        est_tail_index(store, i, thr.gamma).beta_hat;
  }
  return betas;
}

// The per-batch solves often repeat their inputs exactly (forced betas, or a
// slow-moving rho vector), so memoize the last solution.
struct AllocCache {
  std::vector<double> key;
  int key_best = -1;
  std::vector<double> alpha;
  bool valid = false;
};

const std::vector<double>& solve_rate_alloc(AllocCache& c,
                                            const std::vector<double>& betas,
                                            const PolicyParams& p) {
  if (c.valid && c.key == betas) return c.alpha;
  const MaximizeResult res =
      maximize_rate(make_rate_instance(betas), p.solver_step_floor,
                    p.solver_iters_per_stage, /*polish=*/false);
  c.key = betas;
  c.alpha = res.alpha;
  c.valid = true;
  return c.alpha;
}

const std::vector<double>& solve_gj_alloc(AllocCache& c,
                                          const std::vector<double>& rho,
                                          int best, const PolicyParams& p) {
  if (c.valid && c.key_best == best && c.key == rho) return c.alpha;
  const MaximizeResult res =
      maximize_gj_rate(rho, best, p.solver_step_floor,
                       p.solver_iters_per_stage, /*polish=*/false);
  c.key = rho;
  c.key_best = best;
  c.alpha = res.alpha;
  c.valid = true;
  return c.alpha;
}

// Tracking step: project the per-batch deficit onto the simplex and
// integerize it. d_i = ((t+m) a_hat_i - N_i) / m.
std::vector<long> split_batch(const std::vector<double>& alpha_hat,
                              const std::vector<long>& counts, long t,
                              long m_cur) {
  std::vector<double> d(alpha_hat.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = (static_cast<double>(t + m_cur) * alpha_hat[i] -
            static_cast<double>(counts[i])) /
           static_cast<double>(m_cur);
  return largest_remainder(project_simplex(std::move(d)), m_cur);
}

RunResult finish(const Scenario& sc, std::vector<long> counts,
                 std::vector<double> estimates,
                 std::vector<TrajectoryPoint> trajectory) {
  RunResult r;
  r.selected = argmin_index(estimates);
  r.false_selection = is_false_selection(estimates, sc.best_index());
  r.counts = std::move(counts);
  r.final_estimates = std::move(estimates);
  r.trajectory = std::move(trajectory);
  return r;
}

double clamp(double x, double lo, double hi) {
  return std::min(std::max(x, lo), hi);
}

}  // namespace

std::vector<long> largest_remainder(const std::vector<double>& weights,
                                    long total) {
  const std::size_t k = weights.size();
  if (k == 0) throw std::invalid_argument("largest_remainder: empty weights");
  if (total < 0) throw std::invalid_argument("largest_remainder: total < 0");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w))
      throw std::invalid_argument("largest_remainder: bad weight");
    sum += w;
  }
  if (!(sum > 0.0))
    throw std::invalid_argument("largest_remainder: weights sum to zero");

  std::vector<long> out(k);
  std::vector<double> rem(k);
  long assigned = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double quota = weights[i] / sum * static_cast<double>(total);
    out[i] = static_cast<long>(std::floor(quota));
    rem[i] = quota - static_cast<double>(out[i]);
    assigned += out[i];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  long leftover = total - assigned;
  for (std::size_t j = 0; leftover > 0; j = (j + 1) % k) {
    ++out[order[j]];
    --leftover;
  }
  for (std::size_t j = k; leftover < 0;) {
    j = (j == 0 ? k : j) - 1;
    if (out[order[j]] > 0) {
      --out[order[j]];
      ++leftover;
    }
  }
  return out;
}

int argmin_index(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("argmin_index: empty vector");
  return static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
}

bool is_false_selection(const std::vector<double>& estimates, int best) {
  if (best < 0 || best >= static_cast<int>(estimates.size()))
    throw std::invalid_argument("is_false_selection: best out of range");
  double rival = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < estimates.size(); ++i)
    if (static_cast<int>(i) != best) rival = std::min(rival, estimates[i]);
  return estimates[static_cast<std::size_t>(best)] >= rival;
}

std::vector<double> rule_estimates(const SampleStore& store,
                                   const SelectionRule& rule, double nu_value,
                                   long stage) {
  const int k = store.num_alternatives();
  std::vector<double> out(static_cast<std::size_t>(k));
  const ThresholdRule thr_rule{rule.delta, 5};
  for (int i = 0; i < k; ++i) {
    double est = 0.0;
    switch (rule.kind) {
      case SelectionKind::min_tail_index: {
        const ThresholdResult thr = select_threshold(store, i, thr_rule, stage);
        est = est_tail_index(store, i, thr.gamma).beta_hat;
        break;
      }
      case SelectionKind::min_pot_prob:
      case SelectionKind::min_pot_quantile: {
        const ThresholdResult thr = select_threshold(store, i, thr_rule, stage);
        const double beta = est_tail_index(store, i, thr.gamma).beta_hat;
        est = rule.kind == SelectionKind::min_pot_prob
                  ? est_pot_prob(store, i, nu_value, rule.u, beta)
                  : est_pot_quantile(store, i, nu_value, rule.u, beta);
        break;
      }
      case SelectionKind::min_standard_estimator:
        switch (rule.risk) {
          case RiskKind::tail_prob:
            est = est_tail_prob(store, i, nu_value);
            break;
          case RiskKind::excess_loss:
            est = est_excess_loss(store, i, nu_value);
            break;
          case RiskKind::var:
            est = est_var(store, i, 1.0 - 1.0 / nu_value);
            break;
          case RiskKind::cvar:
            est = est_cvar(store, i, nu_value);
            break;
        }
        break;
    }
    out[static_cast<std::size_t>(i)] = est;
  }
  return out;
}

RunResult run_static(const Scenario& scenario, const std::vector<double>& alpha,
                     long T, const SelectionRule& rule, Rng& g) {
  const int k = scenario.k();
  if (static_cast<int>(alpha.size()) != k)
    throw std::invalid_argument("run_static: alpha size must equal k");
  if (T < k) throw std::invalid_argument("run_static: T must be >= k");
  const std::vector<long> counts = largest_remainder(alpha, T);
  SampleStore store(k);
  std::vector<long> drawn(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < k; ++i)
    draw_into(store, drawn, scenario, i, counts[static_cast<std::size_t>(i)], g);
  double nu = std::numeric_limits<double>::quiet_NaN();
  if (rule.kind != SelectionKind::min_tail_index)
    nu = resolve_nu(rule.nu, scenario, T);
  return finish(scenario, drawn, rule_estimates(store, rule, nu, T), {});
}

RunResult run_tiro(const Scenario& scenario, long T, const PolicyParams& params,
                   Rng& g, bool trace) {
  const int k = scenario.k();
  validate_policy_params(params, k);
  check_budget(T, k, params);
  SampleStore store(k);
  std::vector<long> counts(static_cast<std::size_t>(k), 0);
  std::vector<TrajectoryPoint> traj;
  warmup(store, counts, scenario, params.n0, g);
  long t = static_cast<long>(k) * params.n0;
  AllocCache cache;
  while (t < T) {
    const long m_cur = std::min(params.m, T - t);
    const std::vector<double> betas =
        params.forced_betas.empty()
            ? fit_betas(store, params.delta0, params.min_exceedances, t)
            : params.forced_betas;
    const std::vector<double>& alpha_hat = solve_rate_alloc(cache, betas, params);
    if (trace) {
      const std::vector<double> ratio = sampling_ratio(counts, t);
      traj.push_back({t, ratio, betas, params.delta0,
                      rate_G(ratio, make_rate_instance(betas))});
    }
    const std::vector<long> ms = split_batch(alpha_hat, counts, t, m_cur);
    for (int i = 0; i < k; ++i)
      draw_into(store, counts, scenario, i, ms[static_cast<std::size_t>(i)], g);
    t += m_cur;
  }
  const std::vector<double> final_betas =
      params.forced_betas.empty()
          ? fit_betas(store, params.delta0, params.min_exceedances, T)
          : params.forced_betas;
  return finish(scenario, std::move(counts), final_betas, std::move(traj));
}

RunResult run_itiro(const Scenario& scenario, long T, const NuSpec& nu,
                    RiskKind risk, const PolicyParams& params, Rng& g,
                    bool trace) {
  const int k = scenario.k();
  validate_policy_params(params, k);
  check_budget(T, k, params);
  SampleStore store(k);
  std::vector<long> counts(static_cast<std::size_t>(k), 0);
  std::vector<TrajectoryPoint> traj;
  warmup(store, counts, scenario, params.n0, g);
  long t = static_cast<long>(k) * params.n0;
  double delta = clamp(params.delta0, params.delta_lo, params.delta_hi);
  AllocCache cache;
  while (t < T) {
    const long m_cur = std::min(params.m, T - t);
    // Local search over the threshold exponent: the candidate maximizing
    // T^delta * G_hat at the current ratio wins; the incumbent keeps ties and
    // the lower candidate beats the upper one.
    const double cand[3] = {delta,
                            clamp(delta - params.delta_step, params.delta_lo,
                                  params.delta_hi),
                            clamp(delta + params.delta_step, params.delta_lo,
                                  params.delta_hi)};
    const std::vector<double> ratio = sampling_ratio(counts, t);
    std::vector<double> betas;
    double best_val = -std::numeric_limits<double>::infinity();
    double g_hat = 0.0;
    for (const double c : cand) {
      std::vector<double> b =
          params.forced_betas.empty()
              ? fit_betas(store, c, params.min_exceedances, t)
              : params.forced_betas;
      const double gc = rate_G(ratio, make_rate_instance(b));
      const double val = std::pow(static_cast<double>(T), c) * gc;
      if (val > best_val) {
        best_val = val;
        delta = c;
        betas = std::move(b);
        g_hat = gc;
      }
    }
    const std::vector<double>& alpha_hat = solve_rate_alloc(cache, betas, params);
    if (trace) traj.push_back({t, ratio, betas, delta, g_hat});
    const std::vector<long> ms = split_batch(alpha_hat, counts, t, m_cur);
    for (int i = 0; i < k; ++i)
      draw_into(store, counts, scenario, i, ms[static_cast<std::size_t>(i)], g);
    t += m_cur;
  }
  const double nu_value = resolve_nu(nu, scenario, T);
  const std::vector<double> final_betas =
      params.forced_betas.empty()
          ? fit_betas(store, delta, params.min_exceedances, T)
          : params.forced_betas;
  std::vector<double> est(static_cast<std::size_t>(k));
  const bool threshold_risk =
      risk == RiskKind::tail_prob || risk == RiskKind::excess_loss;
  for (int i = 0; i < k; ++i) {
    const double b = final_betas[static_cast<std::size_t>(i)];
    est[static_cast<std::size_t>(i)] =
        threshold_risk ? est_pot_prob(store, i, nu_value, params.u, b)
                       : est_pot_quantile(store, i, nu_value, params.u, b);
  }
  return finish(scenario, std::move(counts), std::move(est), std::move(traj));
}

RunResult run_gj(const Scenario& scenario, long T, const NuSpec& nu,
                 const PolicyParams& params, Rng& g, bool trace) {
  const int k = scenario.k();
  validate_policy_params(params, k);
  check_budget(T, k, params);
  const double nu_value = resolve_nu(nu, scenario, T);
  SampleStore store(k);
  std::vector<long> counts(static_cast<std::size_t>(k), 0);
  std::vector<TrajectoryPoint> traj;
  warmup(store, counts, scenario, params.n0, g);
  long t = static_cast<long>(k) * params.n0;
  AllocCache cache;
  std::vector<double> raw(static_cast<std::size_t>(k));
  std::vector<double> clamped(static_cast<std::size_t>(k));
  while (t < T) {
    const long m_cur = std::min(params.m, T - t);
    for (int i = 0; i < k; ++i) {
      raw[static_cast<std::size_t>(i)] = est_tail_prob(store, i, nu_value);
      const double cap = 1.0 / (2.0 * static_cast<double>(store.count(i)));
      clamped[static_cast<std::size_t>(i)] =
          clamp(raw[static_cast<std::size_t>(i)], cap, 1.0 - cap);
    }
    const int b = argmin_index(raw);
    const std::vector<double>& alpha_hat = solve_gj_alloc(cache, clamped, b,
                                                          params);
    if (trace) {
      const std::vector<double> ratio = sampling_ratio(counts, t);
      traj.push_back({t, ratio, raw, std::numeric_limits<double>::quiet_NaN(),
                      gj_rate(ratio, clamped, b)});
    }
    const std::vector<long> ms = split_batch(alpha_hat, counts, t, m_cur);
    for (int i = 0; i < k; ++i)
      draw_into(store, counts, scenario, i, ms[static_cast<std::size_t>(i)], g);
    t += m_cur;
  }
  for (int i = 0; i < k; ++i)
    raw[static_cast<std::size_t>(i)] = est_tail_prob(store, i, nu_value);
  return finish(scenario, std::move(counts), raw, std::move(traj));
}

}  // namespace tailselect
