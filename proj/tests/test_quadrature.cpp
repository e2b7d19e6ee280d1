#include <doctest.h>

#include <cmath>

#include "alphapatch/quadrature.hpp"

using namespace alphapatch;

TEST_SUITE_BEGIN("quadrature");

TEST_CASE("endpoint singular: closed-form power laws") {
  auto one = [](double) { return 1.0; };
  // int_0^1 y^{-1/2} dy = 2
  CHECK(integrate_endpoint_singular(one, 0.0, 1.0, 0.0, 0.5) ==
        doctest::Approx(2.0).epsilon(1e-12));
  // int_0^1 y^{-1/4} dy = 4/3
  CHECK(integrate_endpoint_singular(one, 0.0, 1.0, 0.0, 0.25) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  // singular endpoint on the right
  CHECK(integrate_endpoint_singular(one, 0.0, 1.0, 1.0, 0.5) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("endpoint singular: smooth factor, oracle cross-check") {
  auto g = [](double y) { return 1.0 + y; };
  // int_0^1 (1+y) y^{-1/2} dy = 2 + 2/3
  const double exact = 2.0 + 2.0 / 3.0;
  const double got = integrate_endpoint_singular(g, 0.0, 1.0, 0.0, 0.5);
  CHECK(got == doctest::Approx(exact).epsilon(1e-12));

  // brute-force midpoint Riemann oracle (10^7 cells); the singular head makes
  // it only ~sqrt(h) accurate, so compare loosely.
  const int n = 10000000;
  double riemann = 0.0;
  const double h = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    const double y = (i + 0.5) * h;
    riemann += (1.0 + y) * std::pow(y, -0.5);
  }
  riemann *= h;
  CHECK(got == doctest::Approx(riemann).epsilon(2e-4));
}

TEST_CASE("smooth integrals") {
  CHECK(integrate_smooth([](double) { return 0.0; }, 0.0, 1.0) == 0.0);
  CHECK(integrate_smooth([](double) { return 1.0; }, 0.0, 2.0) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(integrate_smooth([](double y) { return y * y; }, 0.0, 1.0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(integrate_smooth([](double y) { return std::exp(-y * y); }, -6.0,
                         6.0) ==
        doctest::Approx(std::sqrt(4.0 * std::atan(1.0))).epsilon(1e-12));
}

TEST_CASE("tail integrals") {
  auto inv_sq = [](double y) { return 1.0 / (y * y); };
  CHECK(integrate_tail(inv_sq, 1.0, 2.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  auto p125 = [](double y) { return std::pow(y, -1.25); };
  // int_2^inf y^{-1.25} dy = 2^{-0.25}/0.25
  const double exact = std::pow(2.0, -0.25) / 0.25;
  CHECK(integrate_tail(p125, 2.0, 1.25) ==
        doctest::Approx(exact).epsilon(1e-12));
  CHECK(integrate_tail([](double) { return 0.0; }, 1.0, 2.0) == 0.0);
}

TEST_CASE("tail rejects nonintegrable decay") {
  auto g = [](double y) { return 1.0 / y; };
  CHECK_THROWS_AS(integrate_tail(g, 1.0, 1.0), DivergentTailError);
  CHECK_THROWS_AS(integrate_tail(g, 1.0, 0.5), DivergentTailError);
}

TEST_CASE("linearity within 10x tolerance") {
  QuadratureSpec spec;
  auto g1 = [](double y) { return std::sin(3.0 * y) + 2.0; };
  auto g2 = [](double y) { return std::exp(-y) * y; };
  const double c1 = 1.7, c2 = -0.35;
  const double lhs = integrate_smooth(
      [&](double y) { return c1 * g1(y) + c2 * g2(y); }, 0.0, 3.0, spec);
  const double rhs = c1 * integrate_smooth(g1, 0.0, 3.0, spec) +
                     c2 * integrate_smooth(g2, 0.0, 3.0, spec);
  CHECK(std::abs(lhs - rhs) <=
        10.0 * spec.rel_tol * (std::abs(lhs) + std::abs(rhs)));

  const double sl = integrate_endpoint_singular(
      [&](double y) { return c1 * g1(y) + c2 * g2(y); }, 0.0, 1.0, 0.0, 0.6,
      spec);
  const double sr =
      c1 * integrate_endpoint_singular(g1, 0.0, 1.0, 0.0, 0.6, spec) +
      c2 * integrate_endpoint_singular(g2, 0.0, 1.0, 0.0, 0.6, spec);
  CHECK(std::abs(sl - sr) <= 10.0 * spec.rel_tol * (std::abs(sl) + 1.0));
}

TEST_CASE("refinement monotonicity: halving rel_tol moves results < old tol") {
  auto g = [](double y) { return std::cos(7.0 * y) / (1.0 + y); };
  QuadratureSpec coarse;
  coarse.rel_tol = 1e-6;
  coarse.abs_tol = 1e-14;
  QuadratureSpec fine = coarse;
  fine.rel_tol = 5e-7;
  const double a = integrate_smooth(g, 0.0, 4.0, coarse);
  const double b = integrate_smooth(g, 0.0, 4.0, fine);
  CHECK(std::abs(a - b) <= coarse.rel_tol * std::abs(a) + coarse.abs_tol);
}

TEST_CASE("reports convergence failure") {
  QuadratureSpec tight;
  tight.rel_tol = 1e-15;
  tight.abs_tol = 1e-300;
  tight.max_subdivisions = 12;
  auto kink = [](double y) { return std::pow(std::abs(y - 0.37), 0.1); };
  CHECK_THROWS_AS(integrate_smooth(kink, 0.0, 1.0, tight), QuadratureError);
}

TEST_CASE("spec validation") {
  QuadratureSpec bad;
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  QuadratureSpec bad2;
  bad2.max_subdivisions = 5;
  CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
  CHECK_THROWS_AS(
      integrate_endpoint_singular([](double) { return 1.0; }, 0.0, 1.0, 0.5,
                                  0.5),
      std::invalid_argument);
}

TEST_SUITE_END();
