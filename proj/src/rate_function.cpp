#include "tailselect/rate_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tailselect {

namespace {

struct TermEval {
  double value;
  double g_best;  // envelope derivative w.r.t. the best allocation
  double g_alt;   // envelope derivative w.r.t. the competitor allocation
};

// Pairwise exponential-KL rate with its envelope supergradient. theta* is the
// minimizer over theta, so the partials reduce to the two KL values.
TermEval exp_kl_term(double ab, double ai, double bb, double bi) {
  double theta;
  if (ab + ai <= 0.0)
    theta = 2.0 / (1.0 / bb + 1.0 / bi);  // limit along the diagonal
  else
    theta = (ab + ai) / (ab / bb + ai / bi);
  const double db = kl_exp(theta, bb);
  const double di = kl_exp(theta, bi);
  return {ab * db + ai * di, db, di};
}

double bernoulli_kl(double x, double p) {
  return x * std::log(x / p) + (1.0 - x) * std::log((1.0 - x) / (1.0 - p));
}

// Bernoulli Chernoff rate; the optimal tilt x* has the closed geometric-mix
// form, and the envelope gradient is the pair of Bernoulli KLs at x*.
TermEval bernoulli_term(double ab, double ai, double rb, double ri) {
  const double s = ab + ai;
  double wb = 0.5, wi = 0.5;
  if (s > 0.0) {
    wb = ab / s;
    wi = ai / s;
  }
  const double u = std::exp(wb * std::log(rb) + wi * std::log(ri));
  const double v =
      std::exp(wb * std::log(1.0 - rb) + wi * std::log(1.0 - ri));
  const double x = u / (u + v);
  return {-s * std::log(u + v), bernoulli_kl(x, rb), bernoulli_kl(x, ri)};
}

std::vector<double> equal_allocation(int k) {
  return std::vector<double>(static_cast<std::size_t>(k),
                             1.0 / static_cast<double>(k));
}

// Objective value and averaged supergradient of the active min-terms.
template <class Term>
double eval_objective(const std::vector<double>& x, int best, Term&& term,
                      std::vector<double>* grad) {
  const int k = static_cast<int>(x.size());
  double gmin = std::numeric_limits<double>::infinity();
  std::vector<TermEval> evals(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    if (i == best) continue;
    evals[i] = term(x[best], x[i], i);
    gmin = std::min(gmin, evals[i].value);
  }
  if (grad) {
    std::fill(grad->begin(), grad->end(), 0.0);
    const double tol = 1e-12 * std::max(1.0, std::fabs(gmin)) + 1e-15;
    int active = 0;
    for (int i = 0; i < k; ++i)
      if (i != best && evals[i].value <= gmin + tol) ++active;
    for (int i = 0; i < k; ++i) {
      if (i == best || evals[i].value > gmin + tol) continue;
      (*grad)[best] += evals[i].g_best / active;
      (*grad)[i] += evals[i].g_alt / active;
    }
  }
  return gmin;
}

template <class Term>
MaximizeResult ascend(int k, int best, Term&& term, double step_floor,
                      int iters_per_stage) {
  MaximizeResult res;
  std::vector<double> x = equal_allocation(k);
  std::vector<double> grad(static_cast<std::size_t>(k));
  res.alpha = x;
  res.value = eval_objective(x, best, term, nullptr);
  ++res.evals;

  // Opening pass: diminishing-step supergradient ascent.
  double recent_best = res.value;
  int since_improvement = 0;
  for (int n = 1; n <= 200; ++n) {
    const double g = eval_objective(x, best, term, &grad);
    ++res.evals;
    if (g > res.value) {
      res.value = g;
      res.alpha = x;
    }
    const double step = 0.1 / std::sqrt(static_cast<double>(n));
    std::vector<double> next(x);
    for (int i = 0; i < k; ++i) next[i] += step * grad[i];
    next = project_simplex(std::move(next));
    double move = 0.0;
    for (int i = 0; i < k; ++i) move = std::max(move, std::fabs(next[i] - x[i]));
    x = std::move(next);
    if (move < 1e-10) break;
    if (res.value > recent_best + 1e-12) {
      recent_best = res.value;
      since_improvement = 0;
    } else if (++since_improvement >= 50) {
      break;
    }
  }

  // Refinement: normalized direction, geometrically shrinking step. Each stage
  // restarts from the incumbent so a failed stage only costs its iterations.
  for (double s = 0.25; s > step_floor; s *= 0.5) {
    x = res.alpha;
    for (int j = 0; j < iters_per_stage; ++j) {
      const double g = eval_objective(x, best, term, &grad);
      ++res.evals;
      if (g > res.value) {
        res.value = g;
        res.alpha = x;
      }
      const double nrm = std::sqrt(
          std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0));
      if (!(nrm > 0.0)) {
        res.converged = true;
        return res;
      }
      for (int i = 0; i < k; ++i) x[i] += (s / nrm) * grad[i];
      x = project_simplex(std::move(x));
    }
  }
  res.converged = true;
  return res;
}

// Balanced-allocation polish. At an interior maximizer every competitor's
// pairwise rate equals the common value, so for a candidate leader share x
// the remaining mass splits at the rate level g whose induced allocations sum
// to 1-x (each term is increasing in its competitor allocation and zero at
// zero). The scalar profile F(x) = balanced level is maximized by a coarse
// scan plus golden-section refinement. Returns the balanced allocation at the
// winning x; the caller keeps it only if it beats the ascent incumbent.
template <class Term>
std::vector<double> balance_polish(int k, int best, Term&& term, long* evals) {
  auto rate = [&](double ab, double ai, int i) {
    ++*evals;
    return term(ab, ai, i).value;
  };
  // Smallest competitor allocation whose rate against the leader reaches g.
  auto alloc_for = [&](double x, int i, double g) {
    double lo = 0.0, hi = 1.0 - x;
    if (rate(x, hi, i) <= g) return hi;
    for (int it = 0; it < 48; ++it) {
      const double mid = 0.5 * (lo + hi);
      (rate(x, mid, i) < g ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  std::vector<double> alpha(static_cast<std::size_t>(k), 0.0);
  auto profile = [&](double x) {
    std::fill(alpha.begin(), alpha.end(), 0.0);
    alpha[best] = x;
    if (k == 2) {
      alpha[1 - best] = 1.0 - x;
      return rate(x, 1.0 - x, 1 - best);
    }
    double ghi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i)
      if (i != best) ghi = std::min(ghi, rate(x, 1.0 - x, i));
    if (!(ghi > 0.0)) {  // a zero-rate competitor pins the minimum at zero
      for (int i = 0; i < k; ++i)
        if (i != best) alpha[i] = (1.0 - x) / (k - 1);
      return 0.0;
    }
    double glo = 0.0;
    for (int it = 0; it < 48; ++it) {
      const double g = 0.5 * (glo + ghi);
      double sum = 0.0;
      for (int i = 0; i < k; ++i)
        if (i != best) sum += alloc_for(x, i, g);
      (sum > 1.0 - x ? ghi : glo) = g;
    }
    double sum = 0.0;
    for (int i = 0; i < k; ++i)
      if (i != best) sum += (alpha[i] = alloc_for(x, i, glo));
    // Scaling the shortfall up only raises rates, so glo stays a valid floor.
    if (sum > 0.0)
      for (int i = 0; i < k; ++i)
        if (i != best) alpha[i] *= (1.0 - x) / sum;
    return glo;
  };

  const int scan_points = 33;
  double best_x = 0.5, best_g = -1.0;
  for (int j = 1; j < scan_points; ++j) {
    const double x = static_cast<double>(j) / scan_points;
    const double g = profile(x);
    if (g > best_g) {
      best_g = g;
      best_x = x;
    }
  }
  double lo = std::max(1e-9, best_x - 1.0 / scan_points);
  double hi = std::min(1.0 - 1e-9, best_x + 1.0 / scan_points);
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = profile(x1), f2 = profile(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = profile(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = profile(x1);
    }
  }
  profile(0.5 * (lo + hi));
  return alpha;
}

// Ascend from equal allocation, then try the balanced candidate.
template <class Term>
MaximizeResult maximize_with(int k, int best, Term&& term, double step_floor,
                             int iters_per_stage, bool polish) {
  MaximizeResult res = ascend(k, best, term, step_floor, iters_per_stage);
  if (polish) {
    std::vector<double> cand = balance_polish(k, best, term, &res.evals);
    const double val = eval_objective(cand, best, term, nullptr);
    ++res.evals;
    if (val > res.value) {
      res.value = val;
      res.alpha = std::move(cand);
    }
  }
  return res;
}

void check_allocation_signs(const std::vector<double>& alpha) {
  for (double a : alpha)
    if (a < 0.0) throw std::invalid_argument("allocation must be nonnegative");
}

}  // namespace

double kl_exp(double theta, double vartheta) {
  if (!(theta > 0.0) || !(vartheta > 0.0))
    throw std::invalid_argument("kl_exp: arguments must be > 0");
  const double r = theta / vartheta;
  return r - std::log(r) - 1.0;
}

RateInstance make_rate_instance(std::vector<double> betas) {
  if (betas.size() < 2)
    throw std::invalid_argument("rate instance needs at least 2 alternatives");
  for (double b : betas)
    if (!(b > 0.0))
      throw std::invalid_argument("rate instance: betas must be > 0");
  const int best = static_cast<int>(
      std::min_element(betas.begin(), betas.end()) - betas.begin());
  return {std::move(betas), best};
}

double pairwise_rate(double alpha_b, double alpha_i, double beta_b,
                     double beta_i) {
  if (alpha_b < 0.0 || alpha_i < 0.0)
    throw std::invalid_argument("pairwise_rate: negative allocation");
  if (!(beta_b > 0.0) || !(beta_i > 0.0))
    throw std::invalid_argument("pairwise_rate: betas must be > 0");
  if (alpha_b + alpha_i <= 0.0) return 0.0;
  return exp_kl_term(alpha_b, alpha_i, beta_b, beta_i).value;
}

double rate_G(const std::vector<double>& alpha, const RateInstance& inst) {
  const int k = static_cast<int>(inst.betas.size());
  if (static_cast<int>(alpha.size()) != k)
    throw std::invalid_argument("rate_G: dimension mismatch");
  if (inst.best < 0 || inst.best >= k)
    throw std::invalid_argument("rate_G: best index out of range");
  check_allocation_signs(alpha);
  double gmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    if (i == inst.best) continue;
    gmin = std::min(gmin, pairwise_rate(alpha[inst.best], alpha[i],
                                        inst.betas[inst.best], inst.betas[i]));
  }
  return gmin;
}

std::vector<double> project_simplex(std::vector<double> v) {
  const int k = static_cast<int>(v.size());
  if (k == 0) throw std::invalid_argument("project_simplex: empty vector");
  std::vector<double> u(v);
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, kappa = 0.0;
  for (int j = 0; j < k; ++j) {
    css += u[j];
    const double cand = (css - 1.0) / static_cast<double>(j + 1);
    if (u[j] - cand > 0.0) kappa = cand;
  }
  for (double& x : v) x = std::max(x - kappa, 0.0);
  return v;
}

MaximizeResult maximize_rate(const RateInstance& inst, double step_floor,
                             int iters_per_stage, bool polish) {
  const int k = static_cast<int>(inst.betas.size());
  if (k < 2) throw std::invalid_argument("maximize_rate: need k >= 2");
  const double bb = inst.betas[inst.best];
  for (int i = 0; i < k; ++i) {
    if (i == inst.best) continue;
    if (inst.betas[i] == bb) {
      // A tied competitor zeroes the rate everywhere; sample evenly.
      MaximizeResult res;
      res.alpha = equal_allocation(k);
      res.value = 0.0;
      res.degenerate = true;
      res.converged = true;
      return res;
    }
  }
  return maximize_with(
      k, inst.best,
      [&](double ab, double ai, int i) {
        return exp_kl_term(ab, ai, bb, inst.betas[i]);
      },
      step_floor, iters_per_stage, polish);
}

double gj_rate(const std::vector<double>& alpha, const std::vector<double>& rho,
               int best) {
  const int k = static_cast<int>(rho.size());
  if (static_cast<int>(alpha.size()) != k)
    throw std::invalid_argument("gj_rate: dimension mismatch");
  if (best < 0 || best >= k)
    throw std::invalid_argument("gj_rate: best index out of range");
  check_allocation_signs(alpha);
  for (double r : rho)
    if (!(r > 0.0 && r < 1.0))
      throw std::invalid_argument("gj_rate: rho must lie in (0,1)");
  double gmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    if (i == best) continue;
    gmin = std::min(gmin,
                    bernoulli_term(alpha[best], alpha[i], rho[best], rho[i])
                        .value);
  }
  return gmin;
}

MaximizeResult maximize_gj_rate(const std::vector<double>& rho, int best,
                                double step_floor, int iters_per_stage,
                                bool polish) {
  const int k = static_cast<int>(rho.size());
  if (k < 2) throw std::invalid_argument("maximize_gj_rate: need k >= 2");
  for (double r : rho)
    if (!(r > 0.0 && r < 1.0))
      throw std::invalid_argument("maximize_gj_rate: rho must lie in (0,1)");
  for (int i = 0; i < k; ++i) {
    if (i == best) continue;
    if (rho[i] == rho[best]) {
      MaximizeResult res;
      res.alpha = equal_allocation(k);
      res.value = 0.0;
      res.degenerate = true;
      res.converged = true;
      return res;
    }
  }
  return maximize_with(
      k, best,
      [&](double ab, double ai, int i) {
        return bernoulli_term(ab, ai, rho[best], rho[i]);
      },
      step_floor, iters_per_stage, polish);
}

}  // namespace tailselect
