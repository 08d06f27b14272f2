#pragma once

// Efficiency surfaces over (bandwidth, theta), peak search, and the
// Hermite-Gauss pulse-shape eigenproblem.

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "photosplit/efficiency.hpp"
#include "photosplit/interferometer.hpp"
#include "photosplit/pulses.hpp"
#include "photosplit/quadrature.hpp"
#include "photosplit/types.hpp"

namespace photosplit {

/// Maps a scalar bandwidth to an input of one family. For unentangled inputs
/// the bandwidth is kappa; for the entangled and stationary families it is
/// delta (basis families: delta = 1 / sigma).
struct FamilyDescriptor {
  Family family = Family::UnentangledExponential;
  // Envelope rate of the entangled exponential input.
  double envelope_kappa = 1e-3;
  // Window half-length of the stationary families.
  double window = 20.0;
  // Basis families: mode index or coefficient vector.
  int mode = 0;
  VecX coefficients;

  TwoPhotonInput make(double bandwidth) const;
  std::string bandwidth_name() const;
};

/// Deterministic parallel loop: fn(i) for i in [0, n), results written by index.
/// workers <= 0 picks the hardware concurrency.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

/// Amplitude Gram matrix of family.make(bandwidth); the efficiency of any
/// setting is contract(split_matrix(setting), gram).
struct BandwidthGram {
  double bandwidth = 0.0;
  Mat4 gram = Mat4::Zero();
  double error = 0.0;
  bool converged = true;
};
BandwidthGram bandwidth_gram(const FamilyDescriptor& family, double bandwidth, const QuadratureSpec& spec);

struct SettingOptimum {
  MziSetting setting;
  double P_S = 0.0;
};

/// max over phi of the efficiency at fixed theta: best point of the phi grid
/// refined by golden section within one grid step.
SettingOptimum optimize_phi(const Mat4& gram, double theta, const std::vector<double>& phi_grid);
/// max over (theta, phi) at a fixed Gram matrix; fixed_theta pins theta.
SettingOptimum optimize_setting(const Mat4& gram, std::optional<double> fixed_theta = std::nullopt,
                                const std::vector<double>& phi_grid = {});

std::vector<double> default_phi_grid(int steps = 8);

struct EfficiencySurface {
  FamilyDescriptor family;
  std::vector<double> bandwidths;
  std::vector<double> thetas;
  std::vector<double> phis;
  // rows: bandwidth, columns: theta. Failed points hold NaN.
  MatX P_S;
  MatX phi_opt;
  MatX error;
  std::vector<std::string> failures;
};

EfficiencySurface sweep_surface(const FamilyDescriptor& family, const std::vector<double>& bandwidths,
                                const std::vector<double>& thetas, const std::vector<double>& phis,
                                const QuadratureSpec& spec = QuadratureSpec::two_dimensional(), int workers = 0);

struct PeakGuess {
  double bandwidth = 1.0;
  double bandwidth_lo = 0.25;
  double bandwidth_hi = 5.0;
  std::optional<double> fixed_theta;
};

struct PeakResult {
  double bandwidth = 0.0;
  MziSetting setting;
  double P_S = 0.0;
  double error = 0.0;
  // Stationary families: |P_S(L) - P_S(2L)| at the peak.
  double L_delta = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool converged = false;
};

/// Golden-section search in the bandwidth; at every bandwidth the setting is
/// optimized on the Gram matrix. Stops when the bracket is below 1e-3 and the
/// efficiency changes by less than 1e-5.
PeakResult find_peak(const FamilyDescriptor& family, const PeakGuess& guess,
                     const QuadratureSpec& spec = QuadratureSpec::two_dimensional());

/// Coarse bandwidth grid followed by find_peak around the best grid point.
PeakResult locate_peak(const FamilyDescriptor& family, double band_min, double band_max, int band_steps,
                       std::optional<double> fixed_theta = std::nullopt,
                       const QuadratureSpec& spec = QuadratureSpec::two_dimensional());

struct ShapeProblem {
  int N = 0;  // highest even Hermite order; basis size N/2 + 1
  double sigma = 1.0;
  MziSetting setting;
  double L = 20.0;  // infinite: stationary limit
  MatX R;
  double error = 0.0;
  bool converged = true;
  // Filled by optimal_shape.
  double eigenvalue = std::numeric_limits<double>::quiet_NaN();
  VecX coefficients;
  VecX spectrum;

  int basis_size() const { return N / 2 + 1; }
};

/// R_mn = int int psi(mode m)^T S psi(mode n), assembled from the upper
/// triangle. L = inf integrates the stationary-limit bulk amplitudes in 1D.
ShapeProblem build_r_matrix(int N, double sigma, const MziSetting& setting, double L,
                            const QuadratureSpec& spec = QuadratureSpec::two_dimensional());

/// Dominant eigenpair; the eigenvector is unit norm with coefficients(0) >= 0.
ShapeProblem optimal_shape(ShapeProblem problem);

/// Cross Gram of all modes: block (m, n) is int int psi(m) psi(n)^T (4 x 4).
struct ModeGram {
  int N = 0;
  double sigma = 1.0;
  double L = 20.0;
  MatX G;  // (4M) x (4M), index 4 m + i
  double error = 0.0;

  int modes() const { return N / 2 + 1; }
  MatX r_matrix(const MziSetting& setting) const;
  Mat4 state_gram(const VecX& alpha) const;
};
ModeGram build_mode_gram(int N, double sigma, double L,
                         const QuadratureSpec& spec = QuadratureSpec::two_dimensional());

struct AlternationResult {
  ShapeProblem problem;
  MziSetting setting;
  std::vector<double> history;  // P_S after each round
  int rounds = 0;
  bool converged = false;
};

/// Alternates the dominant-eigenvector shape at fixed setting with the best
/// setting at fixed shape until P_S improves by less than 1e-5.
AlternationResult alternate_shape_and_setting(int N, double sigma, const MziSetting& initial, double L,
                                              const QuadratureSpec& spec = QuadratureSpec::two_dimensional(),
                                              std::optional<double> fixed_theta = std::nullopt);

struct ConvergencePoint {
  int N = 0;
  double eigenvalue = 0.0;
  double alpha0_squared = 0.0;
};

/// Dominant eigenvalue for each N, from leading blocks of the largest R.
std::vector<ConvergencePoint> shape_convergence_curve(const std::vector<int>& Ns, double sigma,
                                                      const MziSetting& setting, double L,
                                                      const QuadratureSpec& spec = QuadratureSpec::two_dimensional());
std::vector<ConvergencePoint> shape_convergence_curve(const ShapeProblem& largest, const std::vector<int>& Ns);

/// sum_n alpha_n * half_line_mode(n, sigma, tau).
double shaped_profile(const VecX& alpha, double sigma, double tau);

}  // namespace photosplit
