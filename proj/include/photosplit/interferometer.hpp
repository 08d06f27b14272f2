#pragma once

// Mach-Zehnder transform of the emitter outputs (a, b) into the final ports (c, d).

#include <stdexcept>
#include <string>

#include "photosplit/scattering.hpp"
#include "photosplit/types.hpp"

namespace photosplit {

/// Interferometer angles in radians. The raw values are kept; reduced() maps
/// them to theta in [0, pi), phi in [0, 2 pi), which leaves every efficiency
/// unchanged.
struct MziSetting {
  double theta = 0.0;
  double phi = 0.0;

  MziSetting reduced() const;
};

struct PortAmplitudes {
  Complex cc;
  Complex cd;
  Complex dc;
  Complex dd;

  Vec4c vector() const { return Vec4c(cc, cd, dc, dd); }
  double norm_squared() const { return std::norm(cc) + std::norm(cd) + std::norm(dc) + std::norm(dd); }
};

class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// [[e^{i phi} sin(theta/2), cos(theta/2)], [e^{i phi} cos(theta/2), -sin(theta/2)]]
/// Rows are the outputs (c, d), columns the inputs (a, b).
Mat2c mzi_matrix(const MziSetting& setting);

/// kron(M, M): maps (aa, ab, ba, bb) to (cc, cd, dc, dd).
Mat4c port_coefficients(const MziSetting& setting);

PortAmplitudes port_amplitudes(const AtomAmplitudes& atom, const MziSetting& setting);

/// Real symmetric S with rho_s = psi^T S psi for real psi = (aa, ab, ba, bb).
Mat4 split_matrix(const MziSetting& setting);

/// |psi_cd|^2 + |psi_dc|^2.
double split_density(const AtomAmplitudes& atom, const MziSetting& setting);

/// The same density written as a trigonometric polynomial in the real amplitudes.
double split_density_expanded(const AtomAmplitudes& atom, const MziSetting& setting);

/// split_density, cross-checked against the expanded polynomial. Throws
/// ConsistencyError when the two disagree by more than tol (relative to the
/// amplitude norm, floored at 1).
double split_density_checked(const AtomAmplitudes& atom, const MziSetting& setting, double tol = 1e-9);

}  // namespace photosplit
