#include "tailselect/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tailselect {

double uniform_open01(Rng& g) {
  for (;;) {
    // 53 random bits; can produce 0.0 but never 1.0.
    const double u = static_cast<double>(g() >> 11) * 0x1.0p-53;
    if (u > 0.0 && u < 1.0) return u;
  }
}

double standard_normal(Rng& g) {
  const double u1 = uniform_open01(g);
  const double u2 = uniform_open01(g);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double gamma_draw(Rng& g, double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma_draw: shape must be > 0");
  if (shape < 1.0) {
    // Boost the shape above 1 and correct with a power of a uniform.
    const double x = gamma_draw(g, shape + 1.0);
    return x * std::pow(uniform_open01(g), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double z = standard_normal(g);
    const double t = 1.0 + c * z;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = uniform_open01(g);
    if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
  }
}

double chi_square_draw(Rng& g, double dof) {
  return 2.0 * gamma_draw(g, 0.5 * dof);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::string_view method,
                         long T, long trial) {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ fnv1a64(method));
  h = splitmix64(h ^ static_cast<std::uint64_t>(T));
  h = splitmix64(h ^ static_cast<std::uint64_t>(trial));
  return h;
}

}  // namespace tailselect
