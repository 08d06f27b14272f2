#include <doctest.h>

#include <cmath>
#include <random>

#include "photosplit/pulses.hpp"

using namespace photosplit;

namespace {

double profile_overlap(const StationaryProfile& a, const StationaryProfile& b) {
  return integrate_1d([&](double s) { return a(s) * b(s); }, IntegrationDomain::half_line(0.0)).value;
}

}  // namespace

TEST_CASE("family names round trip") {
  for (Family f : {Family::UnentangledExponential, Family::UnentangledGaussian, Family::EntangledExponential,
                   Family::EntangledGaussianWindowed, Family::EntangledExponentialWindowed,
                   Family::StationaryBasisMode, Family::StationarySuperposition}) {
    CHECK(parse_family(family_name(f)) == f);
  }
  CHECK_FALSE(parse_family("laser").has_value());
}

TEST_CASE("unentangled exponential") {
  const auto in = make_unentangled(SinglePhotonShape::Exponential, 1.0);
  CHECK(norm_squared(in) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(in(-0.1, 0.5) == 0.0);
  CHECK(in(0.5, 0.2) == 0.0);
  CHECK(in(0.2, 0.5) == doctest::Approx(std::sqrt(2.0) * 2.0 * std::exp(-0.7)).epsilon(1e-12));
}

TEST_CASE("unentangled gaussian value at the origin") {
  const auto in = make_unentangled(SinglePhotonShape::Gaussian, 1.0);
  CHECK(in(0.0, 0.0) == doctest::Approx(std::sqrt(2.0) * std::sqrt(2.0 / kPi)).epsilon(1e-10));
  CHECK(in(0.0, 0.0) == doctest::Approx(1.1284).epsilon(1e-4));
  CHECK(norm_squared(in) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("entangled exponential") {
  CHECK(norm_squared(make_entangled_exponential(1.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-8));
  const auto in = make_entangled_exponential(1.0, 2.0);
  CHECK(in(0.0, 0.5) == doctest::Approx(2.0 * std::sqrt(2.0) * std::exp(-1.0)).epsilon(1e-12));
  CHECK(in(0.0, 0.5) == doctest::Approx(1.0405).epsilon(1e-4));
}

TEST_CASE("small envelope rate gives a flat marginal") {
  const auto in = make_entangled_exponential(0.01, 2.73);
  auto marginal = [&](double t1) {
    return integrate_1d([&](double t2) { return in(t1, t2) * in(t1, t2); }, IntegrationDomain::half_line(t1)).value;
  };
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double m = marginal(0.5 * i);
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  CHECK(hi / lo < 1.25);
}

TEST_CASE("windowed gaussian") {
  const auto in = make_entangled_gaussian_windowed(2.0, 10.0);
  CHECK(norm_squared(in) == doctest::Approx(1.0).epsilon(1e-8));
  // Profile exp(-delta^2 s^2 / 2).
  CHECK(in(0.0, 1.0) / in(0.0, 0.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(in(-10.5, -10.0) == 0.0);
  CHECK(in(10.5, 11.0) == 0.0);
}

TEST_CASE("mode zero is the gaussian") {
  const double sigma = 0.6;
  const auto mode = make_stationary_mode(0, sigma, 20.0);
  const auto gauss = make_entangled_gaussian_windowed(1.0 / sigma, 20.0);
  for (int i = 0; i < 50; ++i) {
    const double s = 0.05 * i;
    CHECK(mode.profile()(s) == doctest::Approx(gauss.profile()(s)).epsilon(1e-12));
  }
}

TEST_CASE("first two modes are orthogonal") {
  const auto a = make_stationary_mode(0, 1.3, 20.0);
  const auto b = make_stationary_mode(1, 1.3, 20.0);
  CHECK(std::abs(profile_overlap(a.profile(), b.profile())) < 1e-10);
}

TEST_CASE("mode one has one zero crossing") {
  const auto in = make_stationary_mode(1, 1.0, 20.0);
  int crossings = 0;
  double prev = in.profile()(1e-6);
  for (int i = 1; i <= 2000; ++i) {
    const double v = in.profile()(0.005 * i);
    if ((v > 0) != (prev > 0) && v != 0.0) ++crossings;
    prev = v;
  }
  CHECK(crossings == 1);
}

TEST_CASE("superpositions") {
  const double sigma = 0.7, L = 15.0;
  const auto m0 = make_stationary_mode(0, sigma, L);
  const auto m1 = make_stationary_mode(1, sigma, L);
  const auto s0 = make_stationary_superposition(VecX::Unit(1, 0), sigma, L);
  const auto s1 = make_stationary_superposition(VecX::Unit(2, 1), sigma, L);
  for (int i = 0; i < 30; ++i) {
    const double t2 = 0.1 * i;
    CHECK(s0(0.0, t2) == doctest::Approx(m0(0.0, t2)).epsilon(1e-12));
    CHECK(s1(0.0, t2) == doctest::Approx(m1(0.0, t2)).epsilon(1e-12));
  }
  VecX half(2);
  half << std::sqrt(0.5), std::sqrt(0.5);
  CHECK(norm_squared(make_stationary_superposition(half, sigma, L)) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(make_stationary_superposition(VecX::Ones(3), sigma, L), std::invalid_argument);
}

TEST_CASE("half-line modes are orthonormal up to order 80") {
  const int modes = 41;
  const double sigma = 0.8;
  MatX g = MatX::Zero(modes, modes);
  for (int m = 0; m < modes; ++m) {
    for (int n = m; n < modes; ++n) {
      g(m, n) = integrate_1d([&](double t) { return half_line_mode(m, sigma, t) * half_line_mode(n, sigma, t); },
                             IntegrationDomain::interval(0.0, 20.0 * sigma))
                    .value;
    }
  }
  const MatX sym = g.selfadjointView<Eigen::Upper>();
  CHECK((sym - MatX::Identity(modes, modes)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("hermite functions match the recurrence") {
  const VecX h = hermite_functions(5, 0.3);
  for (int k = 0; k <= 5; ++k) CHECK(h(k) == doctest::Approx(hermite_function(k, 0.3)).epsilon(1e-14));
  CHECK(hermite_function(0, 0.0) == doctest::Approx(std::pow(kPi, -0.25)).epsilon(1e-14));
}

TEST_CASE("invalid parameters throw") {
  CHECK_THROWS_AS(make_unentangled(SinglePhotonShape::Exponential, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_entangled_exponential(1.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_entangled_gaussian_windowed(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_stationary_mode(-1, 1.0, 10.0), std::invalid_argument);
}

TEST_CASE("property: every family is normalized and unentangled inputs factorize") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> band(0.3, 4.0), win(5.0, 30.0), t(-1.0, 4.0);
  for (int i = 0; i < 6; ++i) {
    const double b = band(rng), L = win(rng);
    VecX a = VecX::Random(4);
    a.normalize();
    for (const auto& in :
         {make_unentangled(SinglePhotonShape::Exponential, b), make_unentangled(SinglePhotonShape::Gaussian, b),
          make_entangled_exponential(band(rng), b), make_entangled_gaussian_windowed(b, L),
          make_entangled_exponential_windowed(b, L), make_stationary_mode(i, 1.0 / b, L),
          make_stationary_superposition(a, 1.0 / b, L)}) {
      CAPTURE(family_name(in.family()));
      CHECK(norm_squared(in) == doctest::Approx(1.0).epsilon(1e-6));
    }
    const auto u = make_unentangled(SinglePhotonShape::Gaussian, b);
    const double t1 = t(rng), t2 = t1 + std::abs(t(rng));
    CHECK(u(t1, t2) == doctest::Approx(std::sqrt(2.0) * u.single_photon(t1) * u.single_photon(t2)).epsilon(1e-13));
  }
}
