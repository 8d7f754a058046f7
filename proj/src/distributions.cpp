#include "tailselect/distributions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tailselect/math_util.hpp"

namespace tailselect {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Normalizing constant of the Student-t density.
double t_density_const(double omega) {
  return std::exp(log_gamma(0.5 * (omega + 1.0)) - log_gamma(0.5 * omega)) /
         std::sqrt(omega * std::numbers::pi);
}

// P(|X| > z) for X Student-t(omega), z >= 0.
double abs_t_survival(double omega, double z) {
  if (z <= 0.0) return 1.0;
  return reg_inc_beta(0.5 * omega, 0.5, omega / (omega + z * z));
}

// Quantile of |X| at level p: the z with P(|X| <= z) = p.
double abs_t_quantile(double omega, double p) {
  double hi = 1.0;
  while (abs_t_survival(omega, hi) > 1.0 - p) hi *= 2.0;
  return bisect_root(
      [&](double z) { return abs_t_survival(omega, z) - (1.0 - p); }, 0.0, hi,
      1e-10);
}

// E[(|X| - z)^+]: partial expectation of the t tail minus the threshold mass.
double abs_t_excess(double omega, double z) {
  const double v = t_density_const(omega);
  const double part = 2.0 * v * omega / (omega - 1.0) *
                      std::pow(1.0 + z * z / omega, -0.5 * (omega - 1.0));
  return part - z * abs_t_survival(omega, z);
}

}  // namespace

DistributionSpec make_pareto(double kappa, double tau, double multiplier) {
  require(kappa > 0.0, "pareto: kappa must be > 0");
  require(tau > 0.0, "pareto: tau must be > 0");
  require(multiplier > 0.0, "pareto: multiplier must be > 0");
  return {Family::pareto_type_i, kappa, tau, multiplier};
}

DistributionSpec make_student_t(double omega, double shift, double multiplier) {
  require(omega > 1.0, "student_t: omega must be > 1 for E|X| to exist");
  require(shift > 0.0, "student_t: shift must be > 0");
  require(multiplier > 0.0, "student_t: multiplier must be > 0");
  return {Family::shifted_abs_student_t, omega, shift, multiplier};
}

DistributionSpec make_frechet(double a, double s, double multiplier) {
  require(a > 0.0, "frechet: a must be > 0");
  require(s > 0.0, "frechet: s must be > 0");
  require(multiplier > 0.0, "frechet: multiplier must be > 0");
  return {Family::frechet, a, s, multiplier};
}

double abs_student_t_mean(double omega) {
  require(omega > 1.0, "abs_student_t_mean: omega must be > 1");
  return 2.0 * std::sqrt(omega) *
         std::exp(log_gamma(0.5 * (omega + 1.0)) - log_gamma(0.5 * omega)) /
         (std::sqrt(std::numbers::pi) * (omega - 1.0));
}

double sample(const DistributionSpec& spec, Rng& g) {
  switch (spec.family) {
    case Family::pareto_type_i: {
      const double u = uniform_open01(g);
      // Multiplier last, so a scaled spec draws exactly multiplier times the
      // base draw on the same stream.
      return spec.multiplier *
             (spec.scale_or_shift * std::pow(u, -1.0 / spec.shape));
    }
    case Family::frechet: {
      const double u = uniform_open01(g);
      return spec.multiplier *
             (spec.scale_or_shift * std::pow(-std::log(u), -1.0 / spec.shape));
    }
    case Family::shifted_abs_student_t: {
      const double z = standard_normal(g);
      const double v = chi_square_draw(g, spec.shape);
      const double x = z * std::sqrt(spec.shape / v);
      return spec.multiplier * (std::fabs(x) + spec.scale_or_shift -
                                abs_student_t_mean(spec.shape));
    }
  }
  throw std::logic_error("sample: unknown family");
}

double tail_index(const DistributionSpec& spec) { return 1.0 / spec.shape; }

double mean(const DistributionSpec& spec) {
  switch (spec.family) {
    case Family::pareto_type_i:
      if (spec.shape <= 1.0)
        throw std::domain_error("mean does not exist: pareto kappa <= 1");
      return spec.multiplier * spec.shape * spec.scale_or_shift /
             (spec.shape - 1.0);
    case Family::shifted_abs_student_t:
      return spec.multiplier * spec.scale_or_shift;
    case Family::frechet:
      if (spec.shape <= 1.0)
        throw std::domain_error("mean does not exist: frechet a <= 1");
      return spec.multiplier * spec.scale_or_shift *
             gamma_fn(1.0 - 1.0 / spec.shape);
  }
  throw std::logic_error("mean: unknown family");
}

double variance(const DistributionSpec& spec) {
  const double m2 = spec.multiplier * spec.multiplier;
  switch (spec.family) {
    case Family::pareto_type_i: {
      if (spec.shape <= 2.0)
        throw std::domain_error("variance does not exist: pareto kappa <= 2");
      const double k = spec.shape, tau = spec.scale_or_shift;
      return m2 * k * tau * tau / ((k - 1.0) * (k - 1.0) * (k - 2.0));
    }
    case Family::shifted_abs_student_t: {
      if (spec.shape <= 2.0)
        throw std::domain_error("variance does not exist: student omega <= 2");
      const double e = abs_student_t_mean(spec.shape);
      return m2 * (spec.shape / (spec.shape - 2.0) - e * e);
    }
    case Family::frechet: {
      if (spec.shape <= 2.0)
        throw std::domain_error("variance does not exist: frechet a <= 2");
      const double g1 = gamma_fn(1.0 - 1.0 / spec.shape);
      const double g2 = gamma_fn(1.0 - 2.0 / spec.shape);
      const double s = spec.scale_or_shift;
      return m2 * s * s * (g2 - g1 * g1);
    }
  }
  throw std::logic_error("variance: unknown family");
}

double survival(const DistributionSpec& spec, double x) {
  const double y = x / spec.multiplier;
  switch (spec.family) {
    case Family::pareto_type_i:
      if (y < spec.scale_or_shift) return 1.0;
      return std::pow(spec.scale_or_shift / y, spec.shape);
    case Family::frechet:
      if (y <= 0.0) return 1.0;
      return 1.0 - std::exp(-std::pow(y / spec.scale_or_shift, -spec.shape));
    case Family::shifted_abs_student_t: {
      const double z =
          y - spec.scale_or_shift + abs_student_t_mean(spec.shape);
      return abs_t_survival(spec.shape, z);
    }
  }
  throw std::logic_error("survival: unknown family");
}

double var_level(const DistributionSpec& spec, double p) {
  require(p > 0.0 && p < 1.0, "var_level: p must be in (0,1)");
  switch (spec.family) {
    case Family::pareto_type_i:
      return spec.multiplier * spec.scale_or_shift *
             std::pow(1.0 - p, -1.0 / spec.shape);
    case Family::frechet:
      return spec.multiplier * spec.scale_or_shift *
             std::pow(-std::log(p), -1.0 / spec.shape);
    case Family::shifted_abs_student_t: {
      const double z = abs_t_quantile(spec.shape, p);
      return spec.multiplier * (z + spec.scale_or_shift -
                                abs_student_t_mean(spec.shape));
    }
  }
  throw std::logic_error("var_level: unknown family");
}

double cvar_level(const DistributionSpec& spec, double p) {
  require(p > 0.0 && p < 1.0, "cvar_level: p must be in (0,1)");
  switch (spec.family) {
    case Family::pareto_type_i:
      if (spec.shape <= 1.0)
        throw std::domain_error("cvar does not exist: pareto kappa <= 1");
      return var_level(spec, p) * spec.shape / (spec.shape - 1.0);
    case Family::frechet: {
      if (spec.shape <= 1.0)
        throw std::domain_error("cvar does not exist: frechet a <= 1");
      // (1-p)^{-1} * integral of the quantile function over (p, 1), which
      // reduces to a lower incomplete gamma after q -> exp(-t).
      return spec.multiplier * spec.scale_or_shift *
             lower_inc_gamma(1.0 - 1.0 / spec.shape, -std::log(p)) / (1.0 - p);
    }
    case Family::shifted_abs_student_t: {
      const double z = abs_t_quantile(spec.shape, p);
      const double base = z + spec.scale_or_shift -
                          abs_student_t_mean(spec.shape);
      return spec.multiplier *
             (base + abs_t_excess(spec.shape, z) / (1.0 - p));
    }
  }
  throw std::logic_error("cvar_level: unknown family");
}

}  // namespace tailselect
