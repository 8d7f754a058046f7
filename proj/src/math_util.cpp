#include "tailselect/math_util.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <stdexcept>

namespace tailselect {

double log_gamma(double x) { return boost::math::lgamma(x); }

double gamma_fn(double x) { return boost::math::tgamma(x); }

double reg_inc_beta(double a, double b, double x) {
  return boost::math::ibeta(a, b, x);
}

double lower_inc_gamma(double a, double x) {
  return boost::math::tgamma_lower(a, x);
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double rel_tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect_root: endpoints do not bracket a root");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(1.0, std::fabs(mid))) return mid;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace tailselect
