#include <doctest.h>

#include <cmath>
#include <random>

#include "photosplit/interferometer.hpp"

using namespace photosplit;

namespace {

AtomAmplitudes random_atom(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return {0.0, 0.0, n(rng), n(rng), n(rng), n(rng)};
}

MziSetting random_setting(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-7.0, 7.0);
  const double th = u(rng);
  return {th, u(rng)};
}

}  // namespace

TEST_CASE("identity setting swaps the ports") {
  const Mat2c m = mzi_matrix({0.0, 0.0});
  CHECK(std::abs(m(0, 0)) < 1e-16);
  CHECK(std::abs(m(1, 1)) < 1e-16);
  CHECK(std::abs(m(0, 1) - 1.0) < 1e-16);
  CHECK(std::abs(m(1, 0) - 1.0) < 1e-16);
}

TEST_CASE("balanced splitter") {
  const Mat2c m = mzi_matrix({kPi / 2.0, 0.0});
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) CHECK(std::abs(m(i, j)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  }
}

TEST_CASE("property: unitarity") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const MziSetting s = random_setting(rng);
    const Mat2c m = mzi_matrix(s);
    CHECK((m.adjoint() * m - Mat2c::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    const Mat4c k = port_coefficients(s);
    CHECK((k.adjoint() * k - Mat4c::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("bare and swapped limits") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const AtomAmplitudes a = random_atom(rng);
    const PortAmplitudes p0 = port_amplitudes(a, {0.0, 0.0});
    CHECK(std::abs(p0.cd) == doctest::Approx(std::abs(a.ba)).epsilon(1e-14));
    CHECK(std::abs(p0.dc) == doctest::Approx(std::abs(a.ab)).epsilon(1e-14));
    const PortAmplitudes pi = port_amplitudes(a, {kPi, 0.0});
    CHECK(std::abs(pi.cd) == doctest::Approx(std::abs(a.ab)).epsilon(1e-14));
    CHECK(std::abs(pi.dc) == doctest::Approx(std::abs(a.ba)).epsilon(1e-14));
    CHECK(split_density(a, {0.0, 1.234}) == doctest::Approx(a.ab * a.ab + a.ba * a.ba).epsilon(1e-14));
  }
}

TEST_CASE("norm conservation at the reported optimum") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const AtomAmplitudes a = random_atom(rng);
    CHECK(port_amplitudes(a, {0.206 * kPi, 0.0}).norm_squared() ==
          doctest::Approx(a.vector().squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("split density at isolated points") {
  // Only aa: psi_cd = psi_dc = e^{2 i phi} sin(theta/2) cos(theta/2).
  const AtomAmplitudes only_aa{0.0, 0.0, 0.0, 0.0, 0.0, 1.0};
  CHECK(split_density(only_aa, {kPi / 2.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(split_density_expanded(only_aa, {kPi / 2.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(split_density(AtomAmplitudes{}, {0.3, 0.4}) == 0.0);
  CHECK(split_density_expanded(AtomAmplitudes{}, {0.3, 0.4}) == 0.0);
}

TEST_CASE("property: expanded form, quadratic form, conjugation, periodicity") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 500; ++i) {
    const AtomAmplitudes a = random_atom(rng);
    const MziSetting s = random_setting(rng);
    const double rho = split_density(a, s);
    const double scale = std::max(1.0, a.vector().squaredNorm());
    CHECK(std::abs(rho - split_density_expanded(a, s)) < 1e-12 * scale);
    CHECK(split_density_checked(a, s) == rho);
    const Mat4 S = split_matrix(s);
    CHECK((S - S.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(a.vector().dot(S * a.vector()) - rho) < 1e-12 * scale);
    CHECK(std::abs(split_density(a, {s.theta, -s.phi}) - rho) < 1e-12 * scale);
    CHECK(std::abs(split_density(a, {s.theta + kPi, s.phi}) - rho) < 1e-12 * scale);
    CHECK(std::abs(split_density(a, {kPi - s.theta, s.phi + kPi}) - rho) < 1e-12 * scale);
    CHECK(std::abs(split_density(a, s.reduced()) - rho) < 1e-12 * scale);
    CHECK(rho <= a.vector().squaredNorm() * (1.0 + 1e-12));
  }
}

TEST_CASE("reduced setting ranges") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const MziSetting r = random_setting(rng).reduced();
    CHECK(r.theta >= 0.0);
    CHECK(r.theta < kPi);
    CHECK(r.phi >= 0.0);
    CHECK(r.phi < 2.0 * kPi);
  }
}
