#pragma once

#include <functional>

namespace tailselect {

double log_gamma(double x);
double gamma_fn(double x);

// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double a, double b, double x);

// Lower incomplete gamma (non-regularized).
double lower_inc_gamma(double a, double x);

// Root of a continuous monotone function on [lo, hi] by bisection.
// Requires f(lo) and f(hi) to bracket zero; stops when the bracket width
// falls below rel_tol relative to max(1, |midpoint|).
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double rel_tol);

}  // namespace tailselect
