#include "photosplit/scattering.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace photosplit {

namespace {

void require_ordered(double tau1, double tau2) {
  if (!(tau2 >= tau1)) throw std::invalid_argument("amplitudes need tau2 >= tau1");
}

// Windowed stationary amplitudes from the two cumulative tables of the profile.
template <typename T, typename VF, typename PF>
std::array<T, 4> windowed_amplitudes(const VF& V, const PF& P, const T& p0, const T& fs, double C, double L,
                                     double tau1, double s) {
  if (tau1 < -L) {
    const T z = T(0.0 * fs);
    return {z, z, z, z};
  }
  auto W = [&](double x) -> T { return T(0.25 * (V(x) + P(x) - std::exp(-2.0 * x) * p0)); };
  const double a = std::max(0.0, tau1 - L);
  const double b = tau1 + L;
  const double ea = std::exp(-2.0 * a);
  const double eb = std::exp(-2.0 * b);
  const double es = std::exp(-2.0 * s);
  auto Fw = [&](double v) -> T { return T(ea * P(a + v) - eb * P(b + v)); };
  auto Z = [&](double c) -> T { return T(W(c + s) - es * W(c)); };
  const bool inside = tau1 <= L;

  T bb = T(4.0 * C * (ea * Z(a) - eb * Z(b)));
  T ba = T(-2.0 * C * Fw(s) + bb);
  T ab = inside ? T(-2.0 * C * (es * Fw(0.0) + V(s)) + bb) : T(-2.0 * C * es * Fw(0.0) + bb);
  T aa = inside ? T(C * fs + ab + ba - bb) : T(ab + ba - bb);
  return {aa, ab, ba, bb};
}

template <typename T, typename VF, typename PF>
std::array<T, 4> bulk_amplitudes(const VF& V, const PF& P, const T& p0, const T& fs, double s) {
  const double es = std::exp(-2.0 * s);
  T bb = T(V(s) + P(s) - es * p0);
  T ba = T(-2.0 * P(s) + bb);
  T ab = T(-2.0 * (es * p0 + V(s)) + bb);
  T aa = T(fs + ab + ba - bb);
  return {aa, ab, ba, bb};
}

}  // namespace

double exp_convolution(double p, double q, double x) {
  if (!(x > 0.0)) return 0.0;
  const double lo = std::min(p, q);
  const double d = std::max(p, q) - lo;
  const double shape = d == 0.0 ? x : -std::expm1(-d * x) / d;
  return std::exp(-lo * x) * shape;
}

AtomAmplitudes atom_amplitudes(const TwoPhotonInput& input, double tau1, double tau2, const QuadratureSpec& spec) {
  require_ordered(tau1, tau2);
  const double lower = input.support_lower();
  const auto breaks = input.breakpoints();
  AtomAmplitudes out{tau1, tau2};
  if (tau1 < lower) return out;

  // int_lower^tau1 e^{-2(tau1 - t1)} g(t1) dt1
  auto left = [&](auto g) {
    auto dom = std::isfinite(lower) ? IntegrationDomain::interval(lower, tau1) : IntegrationDomain::up_to(tau1);
    if (std::isfinite(lower) && !(tau1 > lower)) return 0.0;
    return value_or_throw(integrate_1d([&](double t1) { return std::exp(-2.0 * (tau1 - t1)) * g(t1); },
                                       dom.with_breakpoints(breaks), spec),
                          "amplitude integral did not converge");
  };
  // int_tau1^tau2 e^{-2(tau2 - t2)} g(t2) dt2
  auto right = [&](auto g) {
    if (!(tau2 > tau1)) return 0.0;
    return value_or_throw(integrate_1d([&](double t2) { return std::exp(-2.0 * (tau2 - t2)) * g(t2); },
                                       IntegrationDomain::interval(tau1, tau2).with_breakpoints(breaks), spec),
                          "amplitude integral did not converge");
  };

  out.bb = 4.0 * right([&](double t2) { return left([&](double t1) { return input(t1, t2); }); });
  out.ba = -2.0 * left([&](double t1) { return input(t1, tau2); }) + out.bb;
  out.ab = -2.0 * (std::exp(-2.0 * (tau2 - tau1)) * left([&](double t1) { return input(t1, tau1); }) +
                   right([&](double t2) { return input(tau1, t2); })) +
           out.bb;
  out.aa = input(tau1, tau2) + out.ab + out.ba - out.bb;
  return out;
}

AtomAmplitudes printed_exponential_amplitudes(double kappa, double t1, double t2) {
  require_ordered(t1, t2);
  AtomAmplitudes out{t1, t2};
  if (t1 < 0.0) return out;
  const double k = kappa;
  const double den = (k - 2.0) * (k - 2.0);
  const double r2 = std::sqrt(2.0);
  const double common = std::exp(-2.0 * t1 * (1.0 + k) - t2 * (2.0 + k));
  const double lead = std::exp(2.0 * t1) - std::exp(k * t1);
  out.bb = -8.0 * r2 * k * lead * common * (std::exp(2.0 * t1 + k * t2) - std::exp(k * t1 + 2.0 * t2)) / den;
  out.ba = -4.0 * r2 * k * lead * common * (2.0 * std::exp(2.0 * t1 + k * t2) - k * std::exp(k * t1 + 2.0 * t2)) / den;
  out.ab = 4.0 * r2 * k * std::exp(-2.0 * t1 * (1.0 + k) - t2 * (4.0 + k)) *
           (-2.0 * std::exp(2.0 * k * t1 + 4.0 * t2) - 2.0 * std::exp(4.0 * t1 + 2.0 * t2 + k * t2) +
            (4.0 - k) * std::exp((2.0 + k) * (t1 + t2)) + k * std::exp(2.0 * t1 + k * t1 + 4.0 * t2)) /
           den;
  const double xi = 2.0 * r2 * k * std::exp(-k * (t1 + t2));
  out.aa = xi + out.ab + out.ba - out.bb;
  return out;
}

AtomAmplitudes stable_exponential_amplitudes(double kappa, double t1, double t2) {
  require_ordered(t1, t2);
  AtomAmplitudes out{t1, t2};
  if (t1 < 0.0) return out;
  const double k = kappa;
  const double c = 2.0 * std::sqrt(2.0) * k;  // sqrt(2) * (sqrt(2 kappa))^2
  const double q1 = exp_convolution(2.0, k, t1);
  const double q2 = exp_convolution(2.0, k, t2);
  const double gap = exp_convolution(2.0, k, t2 - t1);
  out.bb = 4.0 * c * q1 * std::exp(-k * t1) * gap;
  out.ba = -2.0 * c * q1 * std::exp(-k * t2) + out.bb;
  out.ab = -2.0 * c * std::exp(-k * t1) * q2 + out.bb;
  out.aa = c * std::exp(-k * (t1 + t2)) + out.ab + out.ba - out.bb;
  return out;
}

AtomAmplitudes closed_form_exponential_amplitudes(double kappa, double tau1, double tau2) {
  if (!(kappa > 0.0)) throw std::invalid_argument("bandwidth kappa must be positive");
  // The printed forms cancel to relative order eps / (kappa - 2)^2.
  constexpr double kSingularBand = 1e-3;
  if (std::abs(kappa - 2.0) < kSingularBand) return stable_exponential_amplitudes(kappa, tau1, tau2);
  return printed_exponential_amplitudes(kappa, tau1, tau2);
}

// ---------------------------------------------------------------------------
// AmplitudeKernel

AmplitudeKernel::AmplitudeKernel(const TwoPhotonInput& input, const QuadratureSpec& spec)
    : input_(input), spec_(spec) {
  spec_.validate();
  const Family fam = input.family();
  if (is_unentangled(fam)) {
    const double k = input.kappa();
    const bool expo = input.single_photon_shape() == SinglePhotonShape::Exponential;
    const double lo = expo ? 0.0 : -7.0 / k;
    const double hi = expo ? 46.0 / k : 7.0 / k;
    const double peak = input.single_photon(0.0);
    q_ = detail::CumulativeTable<double>::build([&](double t) { return input_.single_photon(t); }, 2.0, lo, hi,
                                                std::min(0.05, 0.25 / k), false, 1e-13 * peak);
    method_ = Method::Unentangled;
  } else if (fam == Family::EntangledExponential) {
    method_ = Method::EntangledExponential;
  } else if (is_stationary(fam)) {
    const StationaryProfile& f = input.profile();
    const double top = f.extent();
    double peak = 0.0;
    for (int i = 0; i <= 400; ++i) peak = std::max(peak, std::abs(f(top * i / 400.0)));
    const double step = std::min(0.05, 0.5 * f.feature_scale());
    v_ = detail::CumulativeTable<double>::build(f, 2.0, 0.0, top, step, false, 1e-13 * peak);
    p_ = detail::CumulativeTable<double>::build(f, 2.0, 0.0, top, step, true, 1e-13 * peak);
    p0_ = p_(0.0);
    method_ = Method::Windowed;
  }
}

Vec4 AmplitudeKernel::at(double tau1, double s) const {
  if (!(s >= 0.0)) throw std::invalid_argument("amplitudes need tau2 >= tau1");
  switch (method_) {
    case Method::Unentangled: {
      const double r2 = std::sqrt(2.0);
      const double tau2 = tau1 + s;
      const double q1 = q_(tau1);
      const double q2 = q_(tau2);
      const double x1 = input_.single_photon(tau1);
      const double x2 = input_.single_photon(tau2);
      const double bb = 4.0 * r2 * q1 * (q2 - std::exp(-2.0 * s) * q1);
      const double ba = -2.0 * r2 * q1 * x2 + bb;
      const double ab = -2.0 * r2 * x1 * q2 + bb;
      const double aa = r2 * x1 * x2 + ab + ba - bb;
      return Vec4(aa, ab, ba, bb);
    }
    case Method::EntangledExponential: {
      if (tau1 < 0.0) return Vec4::Zero();
      const double k = input_.kappa();
      const double d = input_.delta();
      const double n = 2.0 * std::sqrt(k * d);
      const double a1 = exp_convolution(2.0 + d, k, tau1);
      const double b1 = exp_convolution(2.0, d, s);
      const double bb = 4.0 * n * a1 * b1;
      const double ba = -2.0 * n * a1 * std::exp(-d * s) + bb;
      const double ab = -2.0 * n * (std::exp(-2.0 * s) * a1 + std::exp(-k * tau1) * b1) + bb;
      const double aa = n * std::exp(-k * tau1 - d * s) + ab + ba - bb;
      return Vec4(aa, ab, ba, bb);
    }
    case Method::Windowed: {
      const auto r = windowed_amplitudes<double>(v_, p_, p0_, input_.profile()(s), input_.window_amplitude(),
                                                 input_.window(), tau1, s);
      return Vec4(r[0], r[1], r[2], r[3]);
    }
    case Method::Direct:
      break;
  }
  return atom_amplitudes(input_, tau1, tau1 + s, spec_).vector();
}

AtomAmplitudes AmplitudeKernel::operator()(double tau1, double tau2) const {
  require_ordered(tau1, tau2);
  return AtomAmplitudes::from_vector(tau1, tau2, at(tau1, tau2 - tau1));
}

Vec4 AmplitudeKernel::stationary_bulk(double s) const {
  if (method_ != Method::Windowed) throw std::logic_error("stationary bulk amplitudes need a stationary input");
  const auto r = bulk_amplitudes<double>(v_, p_, p0_, input_.profile()(s), s);
  return Vec4(r[0], r[1], r[2], r[3]);
}

std::vector<double> AmplitudeKernel::breakpoints() const { return input_.breakpoints(); }

AmplitudeKernel cumulative_kernel(const TwoPhotonInput& input, const QuadratureSpec& spec) {
  try {
    return AmplitudeKernel(input, spec);
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    // Table construction failed: fall back to direct quadrature.
    return AmplitudeKernel::direct(input, spec);
  }
}

AmplitudeKernel::AmplitudeKernel(const TwoPhotonInput& input, const QuadratureSpec& spec, DirectTag)
    : input_(input), spec_(spec) {
  spec_.validate();
}

AmplitudeKernel AmplitudeKernel::direct(const TwoPhotonInput& input, const QuadratureSpec& spec) {
  return AmplitudeKernel(input, spec, DirectTag{});
}

// ---------------------------------------------------------------------------
// ModeKernel

namespace {

VecX mode_values(int modes, double sigma, double tau) {
  VecX out = VecX::Zero(modes);
  if (tau < 0.0) return out;
  const VecX h = hermite_functions(2 * (modes - 1), tau / sigma);
  const double c = std::sqrt(2.0 / sigma);
  for (int n = 0; n < modes; ++n) out(n) = c * h(2 * n);
  return out;
}

}  // namespace

ModeKernel::ModeKernel(int modes, double sigma, double L) : modes_(modes), sigma_(sigma), window_(L) {
  if (modes < 1) throw std::invalid_argument("mode kernel needs at least one mode");
  if (!(sigma > 0.0)) throw std::invalid_argument("basis scale sigma must be positive");
  if (!(L > 0.0)) throw std::invalid_argument("window half-length L must be positive");
  const double order = 2.0 * (modes - 1);
  extent_ = sigma * (std::sqrt(2.0 * order + 1.0) + 10.0);
  const double step = std::min(0.05, 0.5 * sigma / std::sqrt(2.0 * order + 1.0));
  auto g = [&](double t) { return mode_values(modes_, sigma_, t); };
  const double tol = 1e-13 * std::sqrt(2.0 / sigma);
  v_ = detail::CumulativeTable<VecX>::build(g, 2.0, 0.0, extent_, step, false, tol);
  p_ = detail::CumulativeTable<VecX>::build(g, 2.0, 0.0, extent_, step, true, tol);
  p0_ = p_(0.0);
}

VecX ModeKernel::profiles(double s) const { return mode_values(modes_, sigma_, s); }

MatX ModeKernel::at(double tau1, double s) const {
  const double C = std::isfinite(window_) ? 1.0 / std::sqrt(2.0 * window_) : 1.0;
  const auto r = windowed_amplitudes<VecX>(v_, p_, p0_, profiles(s), C, window_, tau1, s);
  MatX out(4, modes_);
  for (int i = 0; i < 4; ++i) out.row(i) = r[i].transpose();
  return out;
}

MatX ModeKernel::stationary_bulk(double s) const {
  const auto r = bulk_amplitudes<VecX>(v_, p_, p0_, profiles(s), s);
  MatX out(4, modes_);
  for (int i = 0; i < 4; ++i) out.row(i) = r[i].transpose();
  return out;
}

}  // namespace photosplit
