#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "tailselect/rate_function.hpp"

using namespace tailselect;

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return (rng() >> 11) * 0x1.0p-53;
}

std::vector<double> random_simplex_point(std::mt19937_64& rng, int k) {
  std::vector<double> a(k);
  double sum = 0.0;
  for (double& x : a) sum += (x = -std::log(unit_uniform(rng)));
  for (double& x : a) x /= sum;
  return a;
}

// Projection oracle: enumerate active sets; exactly one satisfies both primal
// feasibility (positive coordinates) and dual feasibility (v <= kappa off the
// set).
std::vector<double> project_by_active_set(const std::vector<double>& v) {
  const int k = static_cast<int>(v.size());
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    double sum = 0.0;
    int size = 0;
    for (int i = 0; i < k; ++i)
      if (mask >> i & 1) {
        sum += v[i];
        ++size;
      }
    const double kappa = (sum - 1.0) / size;
    bool ok = true;
    for (int i = 0; i < k && ok; ++i)
      ok = (mask >> i & 1) ? v[i] - kappa > 0.0 : v[i] - kappa <= 1e-12;
    if (!ok) continue;
    std::vector<double> x(k, 0.0);
    for (int i = 0; i < k; ++i)
      if (mask >> i & 1) x[i] = v[i] - kappa;
    return x;
  }
  return {};
}

double bernoulli_kl(double x, double p) {
  return x * std::log(x / p) + (1.0 - x) * std::log((1.0 - x) / (1.0 - p));
}

double gj_pair(double ab, double ai, double rb, double ri) {
  const double w = ab / (ab + ai);
  const double u = std::exp(w * std::log(rb) + (1.0 - w) * std::log(ri));
  const double v =
      std::exp(w * std::log(1.0 - rb) + (1.0 - w) * std::log(1.0 - ri));
  return -(ab + ai) * std::log(u + v);
}

}  // namespace

TEST_CASE("exponential kl divergence") {
  CHECK(kl_exp(0.7, 0.7) == 0.0);
  CHECK(kl_exp(2.0, 1.0) ==
        doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-14));
  CHECK(kl_exp(1.0, 2.0) ==
        doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-14));
  CHECK_THROWS_AS((void)kl_exp(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)kl_exp(1.0, -2.0), std::invalid_argument);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const double a = 0.05 + 3.0 * unit_uniform(rng);
    const double b = 0.05 + 3.0 * unit_uniform(rng);
    const double d = kl_exp(a, b);
    CHECK(d >= 0.0);
    if (a != b) CHECK(d > 0.0);
  }
}

TEST_CASE("pairwise rate closed form") {
  // Equal betas zero the rate for any allocation.
  CHECK(pairwise_rate(0.25, 0.75, 0.5, 0.5) == 0.0);
  CHECK(std::fabs(pairwise_rate(0.3, 0.7, 1.4, 1.4)) <= 1e-30);
  CHECK(pairwise_rate(0.5, 0.5, 1.0, 2.0) ==
        doctest::Approx(0.0588915178281917).epsilon(1e-12));
  // Degree-one homogeneity in the allocations.
  const double r1 = pairwise_rate(0.2, 0.5, 0.25, 0.5);
  CHECK(pairwise_rate(0.4, 1.0, 0.25, 0.5) ==
        doctest::Approx(2.0 * r1).epsilon(1e-14));
  // Boundary conventions: no samples on either side kill the rate.
  CHECK(pairwise_rate(0.0, 0.5, 1.0, 2.0) == 0.0);
  CHECK(pairwise_rate(0.5, 0.0, 1.0, 2.0) == 0.0);
  CHECK(pairwise_rate(0.0, 0.0, 1.0, 2.0) == 0.0);
  CHECK(pairwise_rate(0.3, 0.7, 0.2, 0.9) > 0.0);
  CHECK_THROWS_AS((void)pairwise_rate(-0.1, 0.5, 1.0, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)pairwise_rate(0.5, 0.5, 0.0, 2.0),
                  std::invalid_argument);
}

TEST_CASE("pairwise rate equals the scalar minimization over theta") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const double bb = 0.2 + 0.8 * unit_uniform(rng);
    const double bi = 0.2 + 0.8 * unit_uniform(rng);
    const double ab = 0.05 + unit_uniform(rng);
    const double ai = 0.05 + unit_uniform(rng);
    const double lo = std::min(bb, bi), hi = std::max(bb, bi);
    double best = 1e300;
    for (double th = lo; th <= hi; th += (hi - lo) / 200000.0 + 1e-12)
      best = std::min(best, ab * kl_exp(th, bb) + ai * kl_exp(th, bi));
    const double got = pairwise_rate(ab, ai, bb, bi);
    CHECK(std::fabs(got - best) <= 1e-9);
    CHECK(got <= best + 1e-15);  // the scan can only overshoot the infimum
  }
}

TEST_CASE("rate instance construction") {
  const RateInstance inst = make_rate_instance({0.5, 0.2, 0.2});
  CHECK(inst.best == 1);  // smallest index wins the tie
  CHECK_THROWS_AS((void)make_rate_instance({0.5}), std::invalid_argument);
  CHECK_THROWS_AS((void)make_rate_instance({0.5, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("overall rate") {
  const RateInstance tie = make_rate_instance({0.5, 0.5, 0.9});
  CHECK(rate_G({0.2, 0.3, 0.5}, tie) == 0.0);
  const RateInstance two = make_rate_instance({1.0, 2.0});
  CHECK(rate_G({0.5, 0.5}, two) ==
        doctest::Approx(pairwise_rate(0.5, 0.5, 1.0, 2.0)).epsilon(1e-15));
  const RateInstance three = make_rate_instance({0.5, 1.0, 2.0});
  const double a = 1.0 / 3.0;
  CHECK(rate_G({a, a, a}, three) ==
        doctest::Approx(std::min(pairwise_rate(a, a, 0.5, 1.0),
                                 pairwise_rate(a, a, 0.5, 2.0)))
            .epsilon(1e-15));
  CHECK_THROWS_AS((void)rate_G({0.5, 0.5}, three), std::invalid_argument);
  CHECK_THROWS_AS((void)rate_G({-0.1, 0.6, 0.5}, three),
                  std::invalid_argument);
}

TEST_CASE("rate is midpoint concave") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 2 + int(rng() % 5);
    std::vector<double> betas(k);
    for (double& b : betas) b = 0.2 + 1.8 * unit_uniform(rng);
    const RateInstance inst = make_rate_instance(betas);
    const auto x = random_simplex_point(rng, k);
    const auto y = random_simplex_point(rng, k);
    std::vector<double> mid(k);
    for (int i = 0; i < k; ++i) mid[i] = 0.5 * (x[i] + y[i]);
    CHECK(rate_G(mid, inst) >=
          0.5 * (rate_G(x, inst) + rate_G(y, inst)) - 1e-12);
  }
}

TEST_CASE("simplex projection") {
  const std::vector<double> inside{0.2, 0.3, 0.5};
  CHECK(project_simplex(inside) == inside);
  const std::vector<double> out = project_simplex({0.8, 0.8, -0.1});
  CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(out[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(out[2] == 0.0);
  CHECK_THROWS_AS((void)project_simplex({}), std::invalid_argument);
}

TEST_CASE("simplex projection matches the active-set oracle") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + int(rng() % 6);
    std::vector<double> v(k);
    for (double& x : v) x = -2.0 + 4.0 * unit_uniform(rng);
    const auto got = project_simplex(v);
    const auto want = project_by_active_set(v);
    REQUIRE(want.size() == std::size_t(k));
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      CHECK(got[i] >= 0.0);
      CHECK(std::fabs(got[i] - want[i]) <= 1e-12);
      sum += got[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rate maximization") {
  SUBCASE("two arms against a dense grid") {
    const RateInstance inst = make_rate_instance({0.25, 0.5});
    const MaximizeResult res = maximize_rate(inst);
    CHECK(res.converged);
    CHECK_FALSE(res.degenerate);
    double grid_val = 0.0, grid_a0 = 0.0;
    for (int j = 0; j <= 10000; ++j) {
      const double a0 = 1e-4 * j;
      const double g = pairwise_rate(a0, 1.0 - a0, 0.25, 0.5);
      if (g > grid_val) {
        grid_val = g;
        grid_a0 = a0;
      }
    }
    CHECK(std::fabs(res.value - grid_val) <= 1e-6);
    CHECK(std::fabs(res.alpha[0] - grid_a0) <= 1e-3);
  }
  SUBCASE("relabeling mirrors the solution") {
    const MaximizeResult f = maximize_rate(make_rate_instance({1.0, 2.0}));
    const MaximizeResult r = maximize_rate(make_rate_instance({2.0, 1.0}));
    CHECK(f.alpha[0] == doctest::Approx(r.alpha[1]).epsilon(1e-9));
    CHECK(f.alpha[1] == doctest::Approx(r.alpha[0]).epsilon(1e-9));
    CHECK(f.value == doctest::Approx(r.value).epsilon(1e-10));
  }
  SUBCASE("identical competitors share mass equally") {
    const MaximizeResult res =
        maximize_rate(make_rate_instance({0.2, 0.7, 0.7, 0.7}));
    CHECK(res.alpha[1] == doctest::Approx(res.alpha[2]).epsilon(1e-6));
    CHECK(res.alpha[2] == doctest::Approx(res.alpha[3]).epsilon(1e-6));
  }
  SUBCASE("tied best is degenerate") {
    const MaximizeResult res = maximize_rate(make_rate_instance({0.5, 0.5}));
    CHECK(res.degenerate);
    CHECK(res.value == 0.0);
    CHECK(res.alpha == std::vector<double>{0.5, 0.5});
  }
  SUBCASE("ten-arm ladder: balance at the optimum") {
    std::vector<double> betas;
    for (int i = 1; i <= 10; ++i) betas.push_back(0.2 + 0.025 * i);
    const RateInstance inst = make_rate_instance(betas);
    const MaximizeResult res = maximize_rate(inst);
    CHECK(std::fabs(res.value - 0.0011528931) <= 1e-9);
    double lo = 1e300, hi = 0.0;
    double sum = 0.0;
    for (int i = 0; i < 10; ++i) {
      CHECK(res.alpha[i] > 0.0);  // interior optimum
      sum += res.alpha[i];
      if (i == 0) continue;
      const double r =
          pairwise_rate(res.alpha[0], res.alpha[i], betas[0], betas[i]);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(hi - lo <= 1e-8 * hi);  // every pairwise rate equal at the optimum
  }
}

TEST_CASE("bernoulli chernoff rate") {
  CHECK(std::fabs(gj_rate({0.4, 0.6}, {0.3, 0.3}, 0)) <= 1e-12);
  CHECK(gj_rate({0.5, 0.5}, {0.1, 0.3}, 0) ==
        doctest::Approx(0.033628685).epsilon(1e-7));
  CHECK(gj_rate({0.2, 0.8}, {0.05, 0.2}, 0) >= 0.0);
  CHECK_THROWS_AS((void)gj_rate({0.5, 0.5}, {0.0, 0.3}, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)gj_rate({0.5, 0.5}, {0.5, 1.0}, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)gj_rate({0.5, 0.5, 0.0}, {0.1, 0.3}, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)gj_rate({0.5, 0.5}, {0.1, 0.3}, 2),
                  std::invalid_argument);
}

TEST_CASE("bernoulli rate equals the scalar chernoff minimization") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const double rb = 0.02 + 0.45 * unit_uniform(rng);
    const double ri = 0.02 + 0.9 * unit_uniform(rng);
    if (rb == ri) continue;
    const double ab = 0.05 + unit_uniform(rng);
    const double ai = 0.05 + unit_uniform(rng);
    double best = 1e300;
    for (double x = 1e-6; x < 1.0; x += 1e-5)
      best = std::min(best, ab * bernoulli_kl(x, rb) + ai * bernoulli_kl(x, ri));
    const double got = gj_rate({ab, ai}, {rb, ri}, 0);
    CHECK(std::fabs(got - best) <= 1e-8);
    CHECK(got <= best + 1e-12);  // the scan can only overshoot the infimum
  }
}

TEST_CASE("bernoulli rate maximization") {
  SUBCASE("two arms against a dense grid") {
    const std::vector<double> rho{0.05, 0.25};
    const MaximizeResult res = maximize_gj_rate(rho, 0);
    CHECK(res.converged);
    double grid_val = 0.0;
    for (int j = 1; j < 10000; ++j) {
      const double a0 = 1e-4 * j;
      grid_val = std::max(grid_val, gj_rate({a0, 1.0 - a0}, rho, 0));
    }
    CHECK(std::fabs(res.value - grid_val) <= 1e-6);
  }
  SUBCASE("equal exceedance probabilities are degenerate") {
    const MaximizeResult res = maximize_gj_rate({0.2, 0.2, 0.4}, 0);
    CHECK(res.degenerate);
    CHECK(res.value == 0.0);
  }
  SUBCASE("three arms balance at the optimum") {
    const std::vector<double> rho{0.02, 0.1, 0.3};
    const MaximizeResult res = maximize_gj_rate(rho, 0);
    const double r1 = gj_pair(res.alpha[0], res.alpha[1], rho[0], rho[1]);
    const double r2 = gj_pair(res.alpha[0], res.alpha[2], rho[0], rho[2]);
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-7));
    CHECK(res.value == doctest::Approx(std::min(r1, r2)).epsilon(1e-12));
    CHECK(gj_rate(res.alpha, rho, 0) ==
          doctest::Approx(res.value).epsilon(1e-14));
  }
  SUBCASE("invalid rho rejected") {
    CHECK_THROWS_AS((void)maximize_gj_rate({0.5, 1.5}, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)maximize_gj_rate({0.5}, 0), std::invalid_argument);
  }
}
