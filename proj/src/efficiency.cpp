#include "photosplit/efficiency.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace photosplit {

IntegrationDomain outer_domain(const TwoPhotonInput& input) {
  const double lower = input.support_lower();
  if (std::isfinite(lower)) return IntegrationDomain::half_line(lower).with_breakpoints(input.breakpoints());
  return IntegrationDomain::whole_line().with_breakpoints({0.0});
}

QuadratureResult<Mat4> amplitude_gram(const AmplitudeKernel& kernel, const QuadratureSpec& spec) {
  return integrate_ordered_2d(
      [&](double t1, double t2) -> Mat4 {
        const Vec4 psi = kernel.at(t1, t2 - t1);
        return psi * psi.transpose();
      },
      outer_domain(kernel.input()), spec);
}

QuadratureResult<Mat4> stationary_gram(const AmplitudeKernel& kernel, const QuadratureSpec& spec) {
  return integrate_1d(
      [&](double s) -> Mat4 {
        const Vec4 a = kernel.stationary_bulk(s);
        return a * a.transpose();
      },
      IntegrationDomain::half_line(0.0), spec);
}

namespace {

QuadratureResult<double> integrate_density(const TwoPhotonInput& input, const MziSetting& setting,
                                           const QuadratureSpec& spec) {
  const AmplitudeKernel kernel = cumulative_kernel(input);
  const Mat4 S = split_matrix(setting);
  return integrate_ordered_2d(
      [&](double t1, double t2) {
        const Vec4 psi = kernel.at(t1, t2 - t1);
        return psi.dot(S * psi);
      },
      outer_domain(input), spec);
}

}  // namespace

EfficiencyResult splitting_efficiency(const TwoPhotonInput& input, const MziSetting& setting,
                                      const QuadratureSpec& spec, bool window_check) {
  const auto start = std::chrono::steady_clock::now();
  EfficiencyResult out;
  out.family = input.family();
  out.kappa = input.kappa();
  out.delta = input.delta();
  out.L = input.window();
  out.setting = setting;
  const auto r = integrate_density(input, setting, spec);
  out.P_S = r.value;
  out.error = r.error;
  out.converged = r.converged;
  if (window_check && is_stationary(input.family())) {
    const auto r2 = integrate_density(input.with_window(2.0 * input.window()), setting, spec);
    out.L_delta = std::abs(r.value - r2.value);
    out.converged = out.converged && r2.converged;
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

double stationary_limit_efficiency(const TwoPhotonInput& input, const MziSetting& setting,
                                   const QuadratureSpec& spec) {
  if (!is_stationary(input.family())) throw std::invalid_argument("stationary limit needs a stationary input");
  const AmplitudeKernel kernel = cumulative_kernel(input);
  const Mat4 S = split_matrix(setting);
  const auto r = integrate_1d(
      [&](double s) {
        const Vec4 a = kernel.stationary_bulk(s);
        return a.dot(S * a);
      },
      IntegrationDomain::half_line(0.0), spec);
  return value_or_throw(r, "stationary-limit efficiency did not converge");
}

double oracle_unentangled_exponential(double kappa, const MziSetting& setting) {
  if (!(kappa > 0.0)) throw std::invalid_argument("bandwidth kappa must be positive");
  const double k = kappa;
  const double th = setting.theta;
  const double ph = setting.phi;
  const double num = (k * (k * (10.0 - 3.0 * k) + 20.0) - 8.0) * std::cos(2.0 * th) +
                     16.0 * k * std::pow(std::sin(th), 2) * std::cos(2.0 * ph) +
                     32.0 * k * std::sin(2.0 * th) * std::cos(ph) + k * (k * (3.0 * k + 38.0) + 44.0) + 8.0;
  return num / (4.0 * (k + 2.0) * (k + 2.0) * (3.0 * k + 2.0));
}

double oracle_entangled_stationary_exponential(double delta, const MziSetting& setting) {
  if (!(delta > 0.0)) throw std::invalid_argument("bandwidth delta must be positive");
  const double d = delta;
  const double th = setting.theta;
  const double ph = setting.phi;
  const double num = -(d * ((d - 10.0) * d - 12.0) + 8.0) * std::cos(2.0 * th) +
                     16.0 * d * std::pow(std::sin(th), 2) * std::cos(2.0 * ph) +
                     32.0 * d * std::sin(2.0 * th) * std::cos(ph) + d * (d * (d + 22.0) + 20.0) + 8.0;
  return num / (4.0 * std::pow(d + 2.0, 3));
}

Vec4 port_probabilities(const Mat4& gram, const MziSetting& setting) {
  const Mat4c k = port_coefficients(setting);
  const Mat4c g = gram.cast<Complex>();
  return (k * g * k.adjoint()).diagonal().real();
}

Vec4 bunch_check(const TwoPhotonInput& input, const MziSetting& setting, const QuadratureSpec& spec) {
  const AmplitudeKernel kernel = cumulative_kernel(input);
  const auto g = amplitude_gram(kernel, spec);
  return port_probabilities(g.value, setting);
}

}  // namespace photosplit
