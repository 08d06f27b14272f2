#pragma once

// Splitting efficiency P_S = int int_{tau2 >= tau1} rho_s and the closed-form
// efficiencies of the exponential inputs.

#include <limits>

#include "photosplit/interferometer.hpp"
#include "photosplit/pulses.hpp"
#include "photosplit/quadrature.hpp"
#include "photosplit/scattering.hpp"

namespace photosplit {

struct EfficiencyResult {
  Family family = Family::UnentangledExponential;
  double kappa = 0.0;
  double delta = 0.0;
  // Window half-length of stationary inputs; infinite otherwise.
  double L = kInfinity;
  MziSetting setting;
  double P_S = 0.0;
  double error = 0.0;
  // |P_S(L) - P_S(2L)| for stationary inputs, NaN otherwise.
  double L_delta = std::numeric_limits<double>::quiet_NaN();
  bool converged = true;
  double wall_seconds = 0.0;
};

/// Outer tau1 domain matching the support and jumps of the input.
IntegrationDomain outer_domain(const TwoPhotonInput& input);

/// G = int int psi psi^T over tau2 >= tau1, psi = (aa, ab, ba, bb). Any
/// setting's efficiency is then sum(split_matrix(setting) .* G).
QuadratureResult<Mat4> amplitude_gram(const AmplitudeKernel& kernel,
                                      const QuadratureSpec& spec = QuadratureSpec::two_dimensional());

/// The infinite-window limit of amplitude_gram for stationary inputs:
/// int_0^inf A(s) A(s)^T ds over the bulk amplitudes.
QuadratureResult<Mat4> stationary_gram(const AmplitudeKernel& kernel,
                                       const QuadratureSpec& spec = QuadratureSpec::one_dimensional());

inline double contract(const Mat4& S, const Mat4& G) { return S.cwiseProduct(G).sum(); }

/// Direct integration of rho_s with the tabulated amplitude kernel. Stationary
/// inputs are also evaluated at 2L and the difference is reported; pass
/// window_check = false to skip that second integral.
EfficiencyResult splitting_efficiency(const TwoPhotonInput& input, const MziSetting& setting,
                                      const QuadratureSpec& spec = QuadratureSpec::two_dimensional(),
                                      bool window_check = true);

/// P_S of a stationary input in the infinite-window limit, as a 1D integral.
double stationary_limit_efficiency(const TwoPhotonInput& input, const MziSetting& setting,
                                   const QuadratureSpec& spec = QuadratureSpec::one_dimensional());

/// Closed-form P_S for the unentangled exponential input.
double oracle_unentangled_exponential(double kappa, const MziSetting& setting);
/// Closed-form P_S for the entangled exponential input in the stationary limit.
double oracle_entangled_stationary_exponential(double delta, const MziSetting& setting);

/// Integrated port probabilities (cc, cd, dc, dd).
Vec4 bunch_check(const TwoPhotonInput& input, const MziSetting& setting,
                 const QuadratureSpec& spec = QuadratureSpec::two_dimensional());
/// Port probabilities from a precomputed amplitude Gram matrix.
Vec4 port_probabilities(const Mat4& gram, const MziSetting& setting);

}  // namespace photosplit
