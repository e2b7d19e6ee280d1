#include <doctest.h>

#include <cmath>

#include "alphapatch/initial_data.hpp"

using namespace alphapatch;

TEST_SUITE_BEGIN("initial_data");

namespace {

ModelParams default_params() { return ModelParams::make(0.5, 0.25, 0.25, 5.2852); }

}  // namespace

TEST_CASE("barrier multiple: origin value and pointwise values") {
  auto params = default_params();
  Barrier b{0.5, 0.1, 0.25};
  auto omega = build_initial_data(InitialDataKind::barrier_multiple, params, b,
                                  129, 50.0, 3.0);
  CHECK(omega.values().front() == 0.0);
  // (1+2 eps)((x+a0)^p - a0^p) at x = 1/2 with eps = 5.2852:
  // high-precision closed form 11.5704 * (1 - 2^{-1/4}) = 1.84089211...
  const double expected = (1.0 + 2.0 * 5.2852) * (1.0 - std::pow(2.0, -0.25));
  CHECK(expected == doctest::Approx(1.8408921169).epsilon(1e-9));
  // eval(0.5) interpolates between nodes; the generator is exact at nodes
  CHECK(omega.eval(0.5) == doctest::Approx(expected).epsilon(1e-5));
  const auto& xs = omega.nodes();
  for (std::size_t i = 0; i < xs.size(); i += 10)
    CHECK(omega.values()[i] ==
          doctest::Approx((1.0 + 2.0 * 5.2852) *
                          phi_value(0.5, 0.25, xs[i])).epsilon(1e-13));
}

TEST_CASE("dominance holds with strict margin for both generators") {
  auto params = default_params();
  Barrier b{0.5, 0.1, 0.25};
  for (auto kind :
       {InitialDataKind::barrier_multiple, InitialDataKind::smooth_rational}) {
    auto omega = build_initial_data(kind, params, b, 257, 50.0, 3.0);
    double min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < omega.nodes().size(); ++i) {
      const double x = omega.nodes()[i];
      min_margin = std::min(min_margin,
                            omega.values()[i] - (1.0 + params.margin_epsilon) *
                                                    phi_value(b.a0, b.p, x));
    }
    CHECK(min_margin > 0.0);
  }
}

TEST_CASE("dominance failure reports the violating x") {
  auto params = default_params();
  Barrier b{0.5, 0.1, 0.25};
  CHECK_THROWS_AS(
      build_initial_data(InitialDataKind::smooth_rational, params, b, 129,
                         50.0, 3.0, /*amplitude=*/0.01),
      DominanceError);
  try {
    build_initial_data(InitialDataKind::smooth_rational, params, b, 129, 50.0,
                       3.0, 0.01);
  } catch (const DominanceError& e) {
    CHECK(std::string(e.what()).find("x=") != std::string::npos);
  }
}

TEST_CASE("zero data builds without a dominance check") {
  auto params = default_params();
  Barrier b{0.5, 0.1, 0.25};
  auto omega =
      build_initial_data(InitialDataKind::zero, params, b, 65, 50.0, 3.0);
  for (double v : omega.values()) CHECK(v == 0.0);
  CHECK(omega.tail_coefficient() == 0.0);
}

TEST_CASE("kind names parse strictly") {
  CHECK(initial_data_kind_from_name("zero") == InitialDataKind::zero);
  CHECK(initial_data_kind_from_name("barrier_multiple") ==
        InitialDataKind::barrier_multiple);
  CHECK(initial_data_kind_from_name("smooth_rational") ==
        InitialDataKind::smooth_rational);
  CHECK_THROWS_AS(initial_data_kind_from_name("gaussian"), ConfigError);
}

TEST_CASE("sampled phi profile carries the exact algebraic tail") {
  auto omega = sample_phi_profile(0.5, 0.25, 2.0, 129, 30.0, 3.0);
  for (double y : {35.0, 80.0, 400.0})
    CHECK(omega.eval(y) ==
          doctest::Approx(2.0 * phi_value(0.5, 0.25, y)).epsilon(1e-14));
  auto wx = sample_phi_derivative(0.5, 0.25, 2.0, 129, 30.0, 3.0);
  for (double y : {35.0, 80.0})
    CHECK(wx.eval(y) ==
          doctest::Approx(2.0 * phi_x(0.5, 0.25, y)).epsilon(1e-14));
}

TEST_SUITE_END();
