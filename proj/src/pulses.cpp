#include "photosplit/pulses.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace photosplit {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 7> kFamilyNames{{
    {Family::UnentangledExponential, "unentangled-exp"},
    {Family::UnentangledGaussian, "unentangled-gauss"},
    {Family::EntangledExponential, "entangled-exp"},
    {Family::EntangledGaussianWindowed, "entangled-gauss"},
    {Family::EntangledExponentialWindowed, "entangled-exp-windowed"},
    {Family::StationaryBasisMode, "stationary-mode"},
    {Family::StationarySuperposition, "stationary-superposition"},
}};

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

}  // namespace

std::string_view family_name(Family family) {
  for (const auto& [f, name] : kFamilyNames) {
    if (f == family) return name;
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  for (const auto& [f, n] : kFamilyNames) {
    if (n == name) return f;
  }
  return std::nullopt;
}

bool is_stationary(Family family) {
  return family == Family::EntangledGaussianWindowed || family == Family::EntangledExponentialWindowed ||
         family == Family::StationaryBasisMode || family == Family::StationarySuperposition;
}

bool is_unentangled(Family family) {
  return family == Family::UnentangledExponential || family == Family::UnentangledGaussian;
}

// ---------------------------------------------------------------------------
// Hermite functions

VecX hermite_functions(int max_order, double x) {
  if (max_order < 0) throw std::invalid_argument("Hermite order must be non-negative");
  VecX h(max_order + 1);
  h(0) = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  if (max_order >= 1) h(1) = std::sqrt(2.0) * x * h(0);
  for (int k = 1; k < max_order; ++k) {
    h(k + 1) = std::sqrt(2.0 / (k + 1)) * x * h(k) - std::sqrt(static_cast<double>(k) / (k + 1)) * h(k - 1);
  }
  return h;
}

double hermite_function(int order, double x) { return hermite_functions(order, x)(order); }

double half_line_mode(int n, double sigma, double tau) {
  if (n < 0) throw std::invalid_argument("mode index must be non-negative");
  require_positive(sigma, "basis scale sigma");
  if (tau < 0.0) return 0.0;
  return std::sqrt(2.0 / sigma) * hermite_function(2 * n, tau / sigma);
}

// ---------------------------------------------------------------------------
// StationaryProfile

StationaryProfile StationaryProfile::gaussian(double delta) {
  require_positive(delta, "bandwidth delta");
  StationaryProfile p;
  p.shape_ = Shape::Gaussian;
  p.bandwidth_ = delta;
  p.sigma_ = 1.0 / delta;
  p.scale_ = std::sqrt(2.0 * delta / std::sqrt(kPi));
  p.normalize();
  return p;
}

StationaryProfile StationaryProfile::exponential(double delta) {
  require_positive(delta, "bandwidth delta");
  StationaryProfile p;
  p.shape_ = Shape::Exponential;
  p.bandwidth_ = delta;
  p.scale_ = std::sqrt(2.0 * delta);
  p.normalize();
  return p;
}

StationaryProfile StationaryProfile::hermite_gauss(VecX coefficients, double sigma) {
  require_positive(sigma, "basis scale sigma");
  if (coefficients.size() == 0) throw std::invalid_argument("coefficient vector must not be empty");
  if (std::abs(coefficients.squaredNorm() - 1.0) > 1e-9) {
    throw std::invalid_argument("coefficient vector must have unit norm");
  }
  StationaryProfile p;
  p.shape_ = Shape::HermiteGauss;
  p.sigma_ = sigma;
  p.bandwidth_ = 1.0 / sigma;
  p.coefficients_ = std::move(coefficients);
  p.scale_ = 1.0;
  p.normalize();
  return p;
}

double StationaryProfile::raw(double tau) const {
  if (tau < 0.0) return 0.0;
  switch (shape_) {
    case Shape::Gaussian:
      return std::exp(-0.5 * bandwidth_ * bandwidth_ * tau * tau);
    case Shape::Exponential:
      return std::exp(-bandwidth_ * tau);
    case Shape::HermiteGauss: {
      const int top = 2 * static_cast<int>(coefficients_.size() - 1);
      const VecX h = hermite_functions(top, tau / sigma_);
      double sum = 0.0;
      for (Index n = 0; n < coefficients_.size(); ++n) sum += coefficients_(n) * h(2 * n);
      return std::sqrt(2.0 / sigma_) * sum;
    }
  }
  return 0.0;
}

double StationaryProfile::operator()(double tau) const { return scale_ * raw(tau); }

double StationaryProfile::extent() const {
  switch (shape_) {
    case Shape::Gaussian:
      return 9.7 / bandwidth_;
    case Shape::Exponential:
      return 46.0 / bandwidth_;
    case Shape::HermiteGauss: {
      const double order = 2.0 * static_cast<double>(coefficients_.size() - 1);
      return sigma_ * (std::sqrt(2.0 * order + 1.0) + 10.0);
    }
  }
  return 0.0;
}

double StationaryProfile::feature_scale() const {
  switch (shape_) {
    case Shape::Gaussian:
      return 1.0 / bandwidth_;
    case Shape::Exponential:
      return 1.0 / bandwidth_;
    case Shape::HermiteGauss: {
      const double order = 2.0 * static_cast<double>(coefficients_.size() - 1);
      return sigma_ / std::sqrt(2.0 * order + 1.0);
    }
  }
  return 1.0;
}

void StationaryProfile::normalize() {
  const double top = extent();
  auto sq = [this](double t) {
    const double v = (*this)(t);
    return v * v;
  };
  QuadratureSpec spec;
  spec.rel_tol = 1e-13;
  spec.abs_tol = 1e-300;
  const double n2 = integrate_1d(sq, IntegrationDomain::interval(0.0, top), spec).value;
  scale_ /= std::sqrt(n2);
}

// ---------------------------------------------------------------------------
// TwoPhotonInput

double TwoPhotonInput::operator()(double t1, double t2) const {
  if (t2 < t1 || t1 < support_lower_) return 0.0;
  switch (family_) {
    case Family::UnentangledExponential:
    case Family::UnentangledGaussian:
      return std::sqrt(2.0) * single_photon(t1) * single_photon(t2);
    case Family::EntangledExponential:
      return amplitude_ * std::exp(-kappa_ * t1 - delta_ * (t2 - t1));
    default:
      if (t1 > window_) return 0.0;
      return window_amplitude_ * (*profile_)(t2 - t1);
  }
}

double TwoPhotonInput::single_photon(double t) const {
  if (!is_unentangled(family_)) throw std::logic_error("single-photon profile requested for an entangled input");
  if (single_shape_ == SinglePhotonShape::Exponential) {
    return t < 0.0 ? 0.0 : single_scale_ * std::exp(-kappa_ * t);
  }
  return single_scale_ * std::exp(-kappa_ * kappa_ * t * t);
}

const StationaryProfile& TwoPhotonInput::profile() const {
  if (!profile_) throw std::logic_error("stationary profile requested for a non-stationary input");
  return *profile_;
}

std::vector<double> TwoPhotonInput::breakpoints() const {
  std::vector<double> out;
  if (std::isfinite(support_lower_)) out.push_back(support_lower_);
  if (std::isfinite(window_)) out.push_back(window_);
  return out;
}

TwoPhotonInput TwoPhotonInput::with_window(double L) const {
  if (!profile_) throw std::logic_error("only stationary inputs carry a window");
  return make_stationary_state(family_, *profile_, L);
}

TwoPhotonInput make_unentangled(SinglePhotonShape shape, double kappa) {
  require_positive(kappa, "bandwidth kappa");
  TwoPhotonInput in;
  in.family_ = shape == SinglePhotonShape::Exponential ? Family::UnentangledExponential : Family::UnentangledGaussian;
  in.kappa_ = kappa;
  in.single_shape_ = shape;
  if (shape == SinglePhotonShape::Exponential) {
    in.single_scale_ = std::sqrt(2.0 * kappa);
    in.support_lower_ = 0.0;
  } else {
    in.single_scale_ = std::sqrt(std::sqrt(2.0 / kPi) * kappa);
    in.support_lower_ = -kInfinity;
  }
  // Numerical re-normalization of the single-photon wavepacket.
  QuadratureSpec spec;
  spec.rel_tol = 1e-13;
  spec.abs_tol = 1e-300;
  spec.horizon = 10.0 / kappa;
  const auto domain = shape == SinglePhotonShape::Exponential ? IntegrationDomain::half_line(0.0)
                                                              : IntegrationDomain::whole_line();
  const double n2 = integrate_1d(
                        [&](double t) {
                          const double v = in.single_photon(t);
                          return v * v;
                        },
                        domain, spec)
                        .value;
  in.single_scale_ /= std::sqrt(n2);
  return in;
}

TwoPhotonInput make_entangled_exponential(double kappa, double delta) {
  require_positive(kappa, "envelope bandwidth kappa");
  require_positive(delta, "bandwidth delta");
  TwoPhotonInput in;
  in.family_ = Family::EntangledExponential;
  in.kappa_ = kappa;
  in.delta_ = delta;
  in.support_lower_ = 0.0;
  in.amplitude_ = 2.0 * std::sqrt(kappa * delta);
  return in;
}

TwoPhotonInput make_stationary_state(Family family, StationaryProfile profile, double L) {
  if (!is_stationary(family)) throw std::invalid_argument("family is not a stationary family");
  require_positive(L, "window half-length L");
  TwoPhotonInput in;
  in.family_ = family;
  in.delta_ = profile.shape() == StationaryProfile::Shape::HermiteGauss ? 0.0 : profile.bandwidth();
  in.window_ = L;
  in.support_lower_ = -L;
  in.profile_ = std::move(profile);
  // The profile has unit norm on [0, inf), so the window contributes 2L.
  in.window_amplitude_ = 1.0 / std::sqrt(2.0 * L);
  return in;
}

TwoPhotonInput make_entangled_gaussian_windowed(double delta, double L) {
  return make_stationary_state(Family::EntangledGaussianWindowed, StationaryProfile::gaussian(delta), L);
}

TwoPhotonInput make_entangled_exponential_windowed(double delta, double L) {
  return make_stationary_state(Family::EntangledExponentialWindowed, StationaryProfile::exponential(delta), L);
}

TwoPhotonInput make_stationary_mode(int n, double sigma, double L) {
  if (n < 0) throw std::invalid_argument("mode index must be non-negative");
  VecX alpha = VecX::Zero(n + 1);
  alpha(n) = 1.0;
  return make_stationary_state(Family::StationaryBasisMode, StationaryProfile::hermite_gauss(std::move(alpha), sigma), L);
}

TwoPhotonInput make_stationary_superposition(const VecX& alpha, double sigma, double L) {
  return make_stationary_state(Family::StationarySuperposition, StationaryProfile::hermite_gauss(alpha, sigma), L);
}

double norm_squared(const TwoPhotonInput& input, const QuadratureSpec& spec) {
  auto density = [&](double t1, double t2) {
    const double v = input(t1, t2);
    return v * v;
  };
  IntegrationDomain outer = std::isfinite(input.support_lower()) ? IntegrationDomain::half_line(input.support_lower())
                                                                  : IntegrationDomain::whole_line();
  if (std::isfinite(input.window())) outer = IntegrationDomain::interval(-input.window(), input.window());
  return integrate_ordered_2d(density, outer.with_breakpoints(input.breakpoints()), spec).value;
}

}  // namespace photosplit
