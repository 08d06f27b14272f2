#include "photosplit/interferometer.hpp"

#include <cmath>

namespace photosplit {

namespace {

double wrap(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

}  // namespace

MziSetting MziSetting::reduced() const { return {wrap(theta, kPi), wrap(phi, 2.0 * kPi)}; }

Mat2c mzi_matrix(const MziSetting& setting) {
  const double s = std::sin(0.5 * setting.theta);
  const double c = std::cos(0.5 * setting.theta);
  const Complex e = std::polar(1.0, setting.phi);
  Mat2c m;
  m << e * s, c, e * c, -s;
  return m;
}

Mat4c port_coefficients(const MziSetting& setting) {
  const Mat2c m = mzi_matrix(setting);
  Mat4c k;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      for (int l = 0; l < 2; ++l)
        for (int n = 0; n < 2; ++n) k(2 * p + q, 2 * l + n) = m(p, l) * m(q, n);
  return k;
}

PortAmplitudes port_amplitudes(const AtomAmplitudes& atom, const MziSetting& setting) {
  const Vec4c out = port_coefficients(setting) * atom.vector().cast<Complex>();
  return {out(0), out(1), out(2), out(3)};
}

Mat4 split_matrix(const MziSetting& setting) {
  const Mat4c k = port_coefficients(setting);
  const Mat4c h = k.row(1).adjoint() * k.row(1) + k.row(2).adjoint() * k.row(2);
  return h.real();
}

double split_density(const AtomAmplitudes& atom, const MziSetting& setting) {
  const PortAmplitudes p = port_amplitudes(atom, setting);
  return std::norm(p.cd) + std::norm(p.dc);
}

double split_density_expanded(const AtomAmplitudes& atom, const MziSetting& setting) {
  const double th = setting.theta;
  const double ph = setting.phi;
  const double s2 = std::sin(th) * std::sin(th);
  const double cross = 0.5 * std::sin(2.0 * th) * std::cos(ph);
  const double same = 0.25 * (3.0 + std::cos(2.0 * th));
  const double aa = atom.aa, ab = atom.ab, ba = atom.ba, bb = atom.bb;
  return 0.5 * s2 * (bb * bb + aa * aa) + same * (ab * ab + ba * ba) - s2 * std::cos(2.0 * ph) * bb * aa -
         s2 * ab * ba + cross * (aa - bb) * (ab + ba);
}

double split_density_checked(const AtomAmplitudes& atom, const MziSetting& setting, double tol) {
  const double direct = split_density(atom, setting);
  const double expanded = split_density_expanded(atom, setting);
  const double scale = std::max(1.0, atom.vector().squaredNorm());
  if (std::abs(direct - expanded) > tol * scale) {
    throw ConsistencyError("split density forms disagree: " + std::to_string(direct) + " vs " +
                           std::to_string(expanded));
  }
  return direct;
}

}  // namespace photosplit
