#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "photosplit/quadrature.hpp"
#include "photosplit/types.hpp"

using namespace photosplit;

TEST_CASE("exponential on the half line") {
  const auto r = integrate_1d([](double t) { return std::exp(-t); }, IntegrationDomain::half_line(0.0));
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.error < 1e-8);
}

TEST_CASE("gaussian on the whole line") {
  const auto r = integrate_1d([](double t) { return std::exp(-t * t); }, IntegrationDomain::whole_line());
  CHECK(r.value == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
}

TEST_CASE("normalized exponential density") {
  const double k = 1.44;
  const auto r =
      integrate_1d([k](double t) { return 2.0 * k * std::exp(-2.0 * k * t); }, IntegrationDomain::half_line(0.0));
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ordered exponential product") {
  // int_0^inf dt1 int_t1^inf dt2 4 e^{-2(t1+t2)} = int_0^inf 2 e^{-4 t1} = 1/2
  const auto r = integrate_ordered_2d([](double a, double b) { return 4.0 * std::exp(-2.0 * (a + b)); },
                                      IntegrationDomain::half_line(0.0), QuadratureSpec::two_dimensional());
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("finite interval polynomial is exact") {
  const auto r = integrate_1d([](double t) { return t * t * t - 2.0 * t; }, IntegrationDomain::interval(-1.0, 2.0));
  CHECK(r.value == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("jump at a breakpoint") {
  auto step = [](double t) { return t < 0.7 ? 1.0 : 3.0; };
  const auto r = integrate_1d(step, IntegrationDomain::interval(0.0, 2.0).with_breakpoints({0.7}));
  CHECK(r.value == doctest::Approx(0.7 + 3.0 * 1.3).epsilon(1e-13));
}

TEST_CASE("complex and matrix values") {
  const auto c = integrate_1d([](double t) { return std::complex<double>(std::exp(-t), t * std::exp(-t)); },
                              IntegrationDomain::half_line(0.0));
  CHECK(c.value.real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.value.imag() == doctest::Approx(1.0).epsilon(1e-12));

  const auto m = integrate_1d(
      [](double t) {
        Eigen::Vector2d v(std::exp(-t), std::exp(-2.0 * t));
        return Eigen::Matrix2d(v * v.transpose());
      },
      IntegrationDomain::half_line(0.0));
  CHECK(m.value(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.value(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(m.value(1, 1) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("invalid domain and spec") {
  CHECK_THROWS_AS(integrate_1d([](double) { return 1.0; }, IntegrationDomain::interval(1.0, 0.0)),
                  std::invalid_argument);
  QuadratureSpec bad;
  bad.rel_tol = -1.0;
  CHECK_THROWS_AS(integrate_1d([](double) { return 1.0; }, IntegrationDomain::interval(0.0, 1.0), bad),
                  std::invalid_argument);
}

TEST_CASE("non-convergence is reported") {
  QuadratureSpec spec;
  spec.max_depth = 3;
  const auto r = integrate_1d([](double t) { return 1.0 / std::sqrt(t); }, IntegrationDomain::interval(0.0, 1.0), spec);
  CHECK_FALSE(r.converged);
  CHECK_THROWS_AS(value_or_throw(r), QuadratureError);
}

TEST_CASE("property: linearity, translation invariance, determinism") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (int i = 0; i < 20; ++i) {
    const double a = u(rng), b = u(rng), w = u(rng), c = u(rng) - 1.5;
    auto f = [w](double t) { return std::exp(-w * t * t) * std::cos(t); };
    auto g = [w](double t) { return std::exp(-w * std::abs(t)); };
    auto fg = [&](double t) { return a * f(t) + b * g(t); };
    const auto dom = IntegrationDomain::whole_line().with_breakpoints({0.0});
    const double lhs = integrate_1d(fg, dom).value;
    const double rhs = a * integrate_1d(f, dom).value + b * integrate_1d(g, dom).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

    auto shifted = [&](double t) { return f(t - c); };
    CHECK(integrate_1d(shifted, IntegrationDomain::whole_line()).value ==
          doctest::Approx(integrate_1d(f, IntegrationDomain::whole_line()).value).epsilon(1e-10));

    auto h = [w](double s, double t) { return std::exp(-w * s - t); };
    const auto r1 = integrate_ordered_2d(h, IntegrationDomain::half_line(0.0), QuadratureSpec::two_dimensional());
    const auto r2 = integrate_ordered_2d(h, IntegrationDomain::half_line(0.0), QuadratureSpec::two_dimensional());
    CHECK(r1.value == r2.value);
    CHECK(r1.evaluations == r2.evaluations);
    // int_0^inf e^{-w s} e^{-s} ds = 1 / (w + 1)
    CHECK(r1.value == doctest::Approx(1.0 / (w + 1.0)).epsilon(1e-8));
  }
}

TEST_CASE("narrow features next to breakpoints on long domains") {
  // Plateau on [-80, 80] with a unit-width ramp at the left edge and a sharp
  // decay past the right edge.
  auto f = [](double t) {
    if (t < -80.0) return 0.0;
    if (t <= 80.0) return 1.0 - std::exp(-4.0 * (t + 80.0));
    return std::exp(-8.0 * (t - 80.0));
  };
  const double exact = 160.0 - 0.25 * (1.0 - std::exp(-640.0)) + 0.125;
  const auto r = integrate_1d(f, IntegrationDomain::half_line(-80.0).with_breakpoints({-80.0, 80.0}));
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-9));
  const auto g = integrate_1d([](double t) { return std::exp(-6.0 * t); }, IntegrationDomain::half_line(0.0));
  CHECK(g.value == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}
