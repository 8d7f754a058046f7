#include "tailselect/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tailselect {

namespace {

long require_samples(const SampleStore& store, int i) {
  const long n = store.count(i);
  if (n == 0) throw std::invalid_argument("no samples");
  return n;
}

}  // namespace

double est_tail_prob(const SampleStore& store, int i, double nu) {
  const long n = require_samples(store, i);
  const auto& v = store.sorted_values(i);
  const auto it = std::upper_bound(v.begin(), v.end(), nu);
  return static_cast<double>(v.end() - it) / static_cast<double>(n);
}

double est_excess_loss(const SampleStore& store, int i, double nu) {
  return est_excess_loss(store, i, nu, [](double x) { return x; });
}

double est_excess_loss(const SampleStore& store, int i, double nu,
                       const std::function<double(double)>& h) {
  const long n = require_samples(store, i);
  const auto& v = store.sorted_values(i);
  const double hnu = h(nu);
  double sum = 0.0;
  for (auto it = std::upper_bound(v.begin(), v.end(), nu); it != v.end(); ++it)
    sum += std::max(h(*it) - hnu, 0.0);
  return sum / static_cast<double>(n);
}

double est_var(const SampleStore& store, int i, double p) {
  const long n = require_samples(store, i);
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("est_var: level must be in (0,1)");
  const long r = static_cast<long>(
      std::ceil(p * static_cast<double>(n)));
  return store.kth_smallest(i, std::max<long>(1, r));
}

double est_cvar(const SampleStore& store, int i, double nu) {
  const long n = require_samples(store, i);
  if (!(nu > 1.0)) throw std::invalid_argument("est_cvar: nu must be > 1");
  const double x = est_var(store, i, 1.0 - 1.0 / nu);
  const auto& v = store.sorted_values(i);
  double sum = 0.0;
  for (auto it = std::upper_bound(v.begin(), v.end(), x); it != v.end(); ++it)
    sum += *it - x;
  return x + nu * sum / static_cast<double>(n);
}

ThresholdResult select_threshold(const SampleStore& store, int i,
                                 const ThresholdRule& rule, long budget_now) {
  if (!(rule.delta > 0.5 && rule.delta < 1.0))
    throw std::invalid_argument("select_threshold: delta must be in (1/2,1)");
  if (rule.min_exceedances < 2)
    throw std::invalid_argument("select_threshold: min_exceedances < 2");
  if (budget_now < 1)
    throw std::invalid_argument("select_threshold: budget must be >= 1");
  const long n = store.count(i);
  if (n < rule.min_exceedances + 1)
    throw std::invalid_argument("insufficient samples for threshold");
  const double target = static_cast<double>(n) *
                        std::pow(static_cast<double>(budget_now),
                                 rule.delta - 1.0);
  long k = static_cast<long>(std::ceil(target));
  k = std::clamp<long>(k, rule.min_exceedances, n - 1);
  return {store.order_statistic(i, k + 1), k};
}

TailIndexEstimate est_tail_index(const SampleStore& store, int i,
                                 double gamma) {
  require_samples(store, i);
  const auto& v = store.sorted_values(i);
  const auto it = std::upper_bound(v.begin(), v.end(), gamma);
  const long k = static_cast<long>(v.end() - it);
  if (k == 0)
    throw std::invalid_argument("est_tail_index: no values above threshold");
  double sum = 0.0;
  for (auto p = it; p != v.end(); ++p) sum += std::log(*p / gamma);
  return {sum / static_cast<double>(k), gamma, k};
}

double est_pot_prob(const SampleStore& store, int i, double nu, double u,
                    double beta_hat) {
  if (!(nu > 0.0)) throw std::invalid_argument("est_pot_prob: nu must be > 0");
  if (!(u > 0.0 && u < 1.0))
    throw std::invalid_argument("est_pot_prob: u must be in (0,1)");
  if (!(beta_hat > 0.0))
    throw std::invalid_argument("est_pot_prob: beta_hat must be > 0");
  const double var_u = est_var(store, i, u);
  return (1.0 - u) * std::pow(var_u / nu, 1.0 / beta_hat);
}

double est_pot_quantile(const SampleStore& store, int i, double nu, double u,
                        double beta_hat) {
  if (!(nu > 0.0))
    throw std::invalid_argument("est_pot_quantile: nu must be > 0");
  if (!(u > 0.0 && u < 1.0))
    throw std::invalid_argument("est_pot_quantile: u must be in (0,1)");
  if (beta_hat < 0.0)
    throw std::invalid_argument("est_pot_quantile: beta_hat must be >= 0");
  const double var_u = est_var(store, i, u);
  return var_u * std::pow(nu * (1.0 - u), beta_hat);
}

}  // namespace tailselect
