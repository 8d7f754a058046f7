#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tailselect/distributions.hpp"
#include "tailselect/rng.hpp"
#include "tailselect/scenario.hpp"

using namespace tailselect;

namespace {

// Student-t pdf through lgamma only, independent of the library's internals.
double student_t_pdf(double x, double omega) {
  const double c = std::exp(std::lgamma((omega + 1) / 2) -
                            std::lgamma(omega / 2)) /
                   std::sqrt(omega * M_PI);
  return c * std::pow(1.0 + x * x / omega, -(omega + 1) / 2);
}

// E|X| for Student-t via Simpson on the compactified axis x = sqrt(w)*tan(t).
double abs_mean_by_quadrature(double omega) {
  const int n = 1 << 16;
  const double h = (M_PI / 2) / n;
  auto f = [&](double t) {
    const double x = std::sqrt(omega) * std::tan(t);
    const double jac = std::sqrt(omega) / std::pow(std::cos(t), 2);
    return 2.0 * x * student_t_pdf(x, omega) * jac;
  };
  double acc = f(0.0);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  acc += 0.0;  // integrand vanishes at pi/2
  return acc * h / 3.0;
}

}  // namespace

TEST_CASE("pareto closed forms") {
  const DistributionSpec p = make_pareto(4.0, 0.75);
  CHECK(mean(p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tail_index(p) == 0.25);
  CHECK(variance(p) == doctest::Approx(0.125).epsilon(1e-12));
  // Inverse CDF at the median and at level 0.9.
  CHECK(var_level(p, 0.5) ==
        doctest::Approx(0.8919053362520408).epsilon(1e-12));
  CHECK(var_level(p, 0.9) ==
        doctest::Approx(1.3337095575291921).epsilon(1e-12));
  CHECK(survival(p, var_level(p, 0.5)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(survival(p, 1.5) ==
        doctest::Approx(std::pow(0.75 / 1.5, 4.0)).epsilon(1e-12));
  // Pareto CVaR is VaR * kappa/(kappa-1).
  CHECK(cvar_level(p, 0.99) ==
        doctest::Approx(var_level(p, 0.99) * 4.0 / 3.0).epsilon(1e-10));
  CHECK(cvar_level(p, 0.9) > var_level(p, 0.9));
}

TEST_CASE("frechet closed forms") {
  const DistributionSpec f = make_frechet(2.0, 1.0);
  CHECK(tail_index(f) == 0.5);
  CHECK(survival(f, 1.0) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(mean(f) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));
  CHECK_THROWS_AS((void)variance(f), std::domain_error);  // needs a > 2
  const DistributionSpec f4 = make_frechet(4.0, 2.0);
  // survival(VaR_p) = 1 - p across the numeric path.
  for (double p : {0.5, 0.9, 0.99})
    CHECK(survival(f4, var_level(f4, p)) ==
          doctest::Approx(1.0 - p).epsilon(1e-9));
  CHECK(cvar_level(f4, 0.99) > var_level(f4, 0.99));
}

TEST_CASE("student t closed forms") {
  const DistributionSpec s = make_student_t(10.0 / 3.0);
  CHECK(tail_index(s) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(mean(s) == doctest::Approx(3.0).epsilon(1e-10));
  for (double p : {0.9, 0.99})
    CHECK(survival(s, var_level(s, p)) ==
          doctest::Approx(1.0 - p).epsilon(1e-8));
  CHECK(cvar_level(s, 0.99) > var_level(s, 0.99));
  // The absolute-moment constant against an independent quadrature.
  for (double omega : {2.5, 10.0 / 3.0, 8.0})
    CHECK(abs_student_t_mean(omega) ==
          doctest::Approx(abs_mean_by_quadrature(omega)).epsilon(1e-5));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((void)make_pareto(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)make_pareto(1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)make_student_t(1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)make_frechet(2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)make_pareto(2.0, 1.0, 0.0), std::invalid_argument);
  // Mean requires shape > 1, variance shape > 2.
  CHECK_THROWS_AS((void)mean(make_pareto(0.9, 1.0)), std::domain_error);
  CHECK_THROWS_AS((void)variance(make_pareto(1.5, 1.0)), std::domain_error);
  CHECK_THROWS_AS((void)variance(make_student_t(1.5)), std::domain_error);
  const DistributionSpec p = make_pareto(4.0, 0.75);
  CHECK_THROWS_AS((void)var_level(p, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)var_level(p, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)cvar_level(p, -0.1), std::invalid_argument);
}

TEST_CASE("scale multiplier") {
  const DistributionSpec base = make_pareto(4.0, 0.75);
  const DistributionSpec scaled = make_pareto(4.0, 0.75, 1.1);
  CHECK(tail_index(scaled) == tail_index(base));
  CHECK(mean(scaled) == doctest::Approx(1.1 * mean(base)).epsilon(1e-12));
  for (double x : {1.0, 2.0, 5.0})
    CHECK(survival(scaled, x) ==
          doctest::Approx(survival(base, x / 1.1)).epsilon(1e-12));
  for (double p : {0.5, 0.9})
    CHECK(var_level(scaled, p) ==
          doctest::Approx(1.1 * var_level(base, p)).epsilon(1e-12));
  // Same stream: the scaled draw is exactly 1.1 times the base draw.
  Rng g1(7), g2(7);
  for (int i = 0; i < 100; ++i)
    CHECK(sample(scaled, g2) == 1.1 * sample(base, g1));
}

TEST_CASE("sampling determinism and positivity") {
  for (const Scenario& sc : scenario_catalog()) {
    Rng g1(42), g2(42);
    for (const DistributionSpec& a : sc.alternatives) {
      for (int i = 0; i < 10; ++i) {
        const double x = sample(a, g1);
        CHECK(x == sample(a, g2));
        CHECK(x > 0.0);
      }
    }
  }
}

TEST_CASE("empirical means within four standard errors") {
  struct Probe {
    const char* scenario;
    int alt;
  };
  // Finite-variance alternatives only (student-t columns 5..10 have none).
  const Probe probes[] = {{"setup1_pareto", 0},    {"setup1_pareto", 4},
                          {"setup1_pareto", 9},    {"setup1_frechet", 0},
                          {"setup1_frechet", 9},   {"setup1_student_t", 0},
                          {"setup1_student_t", 3}, {"setup2_pareto", 9}};
  const long n = 400000;
  for (const Probe& pr : probes) {
    const DistributionSpec& spec =
        scenario_by_name(pr.scenario).alternatives[pr.alt];
    Rng g(1234 + pr.alt);
    double acc = 0.0;
    for (long s = 0; s < n; ++s) acc += sample(spec, g);
    const double emp = acc / n;
    const double band = 4.0 * std::sqrt(variance(spec) / n);
    CHECK(std::fabs(emp - mean(spec)) <= band);
  }
}

TEST_CASE("empirical survival within binomial bands") {
  const DistributionSpec specs[] = {
      make_pareto(4.0, 0.75), scenario_by_name("setup1_frechet").alternatives[0],
      scenario_by_name("setup1_student_t").alternatives[0]};
  const long n = 200000;
  for (const DistributionSpec& spec : specs) {
    Rng g(99);
    std::vector<double> draws(n);
    for (double& d : draws) d = sample(spec, g);
    for (double p : {0.9, 0.99}) {
      const double x = var_level(spec, p);
      long exceed = 0;
      for (double d : draws) exceed += d > x;
      const double band = 4.0 * std::sqrt(p * (1.0 - p) / n);
      CHECK(std::fabs(double(exceed) / n - (1.0 - p)) <= band);
    }
  }
}

TEST_CASE("scenario catalog") {
  const auto& cat = scenario_catalog();
  REQUIRE(cat.size() == 6);
  for (const Scenario& sc : cat) {
    CHECK(sc.k() == 10);
    CHECK(sc.best_index() == 0);
    for (const DistributionSpec& a : sc.alternatives)
      CHECK(tail_index(a) == 1.0 / a.shape);
  }
  const Scenario& s1 = scenario_by_name("setup1_pareto");
  CHECK_FALSE(s1.tie);
  CHECK(s1.tie_indices() == std::vector<int>{0});
  // Column i has tail index 0.2 + 0.025(i+1); means are all one.
  for (int i = 0; i < 10; ++i) {
    CHECK(tail_index(s1.alternatives[i]) ==
          doctest::Approx(0.2 + 0.025 * (i + 1)).epsilon(1e-12));
    CHECK(mean(s1.alternatives[i]) == doctest::Approx(1.0).epsilon(1e-10));
  }
  const Scenario& s2 = scenario_by_name("setup2_pareto");
  CHECK(s2.tie);
  CHECK(s2.tie_indices() == std::vector<int>{0, 9});
  CHECK(s2.alternatives[9].multiplier == 1.1);
  CHECK(tail_index(s2.alternatives[9]) == tail_index(s2.alternatives[0]));
  // Frechet scales make every mean one as well.
  const Scenario& fr = scenario_by_name("setup1_frechet");
  for (const DistributionSpec& a : fr.alternatives)
    CHECK(mean(a) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS((void)scenario_by_name("nope"), std::invalid_argument);
}

TEST_CASE("scenario json round trip") {
  for (const Scenario& sc : scenario_catalog()) {
    const Scenario back = scenario_from_json(scenario_to_json(sc));
    CHECK(back.name == sc.name);
    CHECK(back.family == sc.family);
    CHECK(back.tie == sc.tie);
    REQUIRE(back.k() == sc.k());
    for (int i = 0; i < sc.k(); ++i) {
      CHECK(back.alternatives[i].shape == sc.alternatives[i].shape);
      CHECK(back.alternatives[i].scale_or_shift ==
            sc.alternatives[i].scale_or_shift);
      CHECK(back.alternatives[i].multiplier == sc.alternatives[i].multiplier);
    }
  }
  CHECK_THROWS_AS((void)scenario_from_json("not json"),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)scenario_from_json("{\"name\":\"x\"}"),
                  std::invalid_argument);
}
