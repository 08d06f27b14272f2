#pragma once

// Two-photon input wavefunctions xi(t1, t2) on the ordered domain t2 >= t1.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "photosplit/quadrature.hpp"
#include "photosplit/types.hpp"

namespace photosplit {

enum class Family {
  UnentangledExponential,
  UnentangledGaussian,
  EntangledExponential,
  EntangledGaussianWindowed,
  EntangledExponentialWindowed,
  StationaryBasisMode,
  StationarySuperposition,
};

std::string_view family_name(Family family);
std::optional<Family> parse_family(std::string_view name);
bool is_stationary(Family family);
bool is_unentangled(Family family);

enum class SinglePhotonShape { Exponential, Gaussian };

// Orthonormal Hermite function h_k(x) = (2^k k! sqrt(pi))^{-1/2} H_k(x) e^{-x^2/2}.
double hermite_function(int order, double x);
// h_0(x) ... h_max(x) by the three-term recurrence.
VecX hermite_functions(int max_order, double x);
// Even Hermite-Gauss mode of order 2n at scale sigma, orthonormal on [0, inf).
double half_line_mode(int n, double sigma, double tau);

/// Difference-coordinate profile xi_s(tau) of a stationary state, unit norm on
/// tau in [0, inf). Zero for tau < 0.
class StationaryProfile {
 public:
  enum class Shape { Gaussian, Exponential, HermiteGauss };

  // exp(-delta^2 tau^2 / 2); delta is a rate.
  static StationaryProfile gaussian(double delta);
  // exp(-delta tau).
  static StationaryProfile exponential(double delta);
  // sum_n alpha_n * half_line_mode(n, sigma, tau); requires |alpha| = 1.
  static StationaryProfile hermite_gauss(VecX coefficients, double sigma);

  double operator()(double tau) const;

  Shape shape() const { return shape_; }
  double bandwidth() const { return bandwidth_; }
  double sigma() const { return sigma_; }
  const VecX& coefficients() const { return coefficients_; }

  // Beyond this time difference the profile is below ~1e-20 of its peak.
  double extent() const;
  // Smallest structural length of the profile (sets cache grid spacing).
  double feature_scale() const;

 private:
  StationaryProfile() = default;
  void normalize();
  double raw(double tau) const;

  Shape shape_ = Shape::Gaussian;
  double bandwidth_ = 0.0;
  double sigma_ = 0.0;
  VecX coefficients_;
  double scale_ = 1.0;
};

/// A normalized two-photon input. The evaluator is defined for t2 >= t1 and
/// returns zero elsewhere.
class TwoPhotonInput {
 public:
  double operator()(double t1, double t2) const;

  Family family() const { return family_; }
  double kappa() const { return kappa_; }
  double delta() const { return delta_; }
  // Window half-length L of stationary families (t1 in [-L, L]); infinite otherwise.
  double window() const { return window_; }
  double support_lower() const { return support_lower_; }
  // Points in t1 (or t2) where xi has a jump: support edges and window edges.
  std::vector<double> breakpoints() const;

  // Unentangled families: normalized single-photon wavepacket, xi = sqrt(2) xi1(t1) xi1(t2).
  double single_photon(double t) const;
  SinglePhotonShape single_photon_shape() const { return single_shape_; }
  // Stationary families: xi = window_amplitude() * profile()(t2 - t1) for |t1| <= L.
  const StationaryProfile& profile() const;
  double window_amplitude() const { return window_amplitude_; }

  // Same family and parameters with a different window half-length.
  TwoPhotonInput with_window(double L) const;

  friend TwoPhotonInput make_unentangled(SinglePhotonShape shape, double kappa);
  friend TwoPhotonInput make_entangled_exponential(double kappa, double delta);
  friend TwoPhotonInput make_stationary_state(Family family, StationaryProfile profile, double L);

 private:
  TwoPhotonInput() = default;

  Family family_ = Family::UnentangledExponential;
  double kappa_ = 0.0;
  double delta_ = 0.0;
  double window_ = kInfinity;
  double support_lower_ = -kInfinity;
  SinglePhotonShape single_shape_ = SinglePhotonShape::Exponential;
  double single_scale_ = 1.0;
  double amplitude_ = 1.0;
  std::optional<StationaryProfile> profile_;
  double window_amplitude_ = 0.0;
};

TwoPhotonInput make_unentangled(SinglePhotonShape shape, double kappa);
// 2 sqrt(kappa delta) exp(-kappa t1) exp(-delta (t2 - t1)), t1 >= 0.
TwoPhotonInput make_entangled_exponential(double kappa, double delta);
TwoPhotonInput make_stationary_state(Family family, StationaryProfile profile, double L);
TwoPhotonInput make_entangled_gaussian_windowed(double delta, double L);
TwoPhotonInput make_entangled_exponential_windowed(double delta, double L);
TwoPhotonInput make_stationary_mode(int n, double sigma, double L);
TwoPhotonInput make_stationary_superposition(const VecX& alpha, double sigma, double L);

/// Numerical integral of |xi|^2 over the ordered domain.
double norm_squared(const TwoPhotonInput& input, const QuadratureSpec& spec = QuadratureSpec::two_dimensional());

}  // namespace photosplit
