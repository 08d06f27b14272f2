#pragma once

// Emitter-output two-photon correlation amplitudes psi_pq(tau1, tau2).

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "photosplit/pulses.hpp"
#include "photosplit/quadrature.hpp"
#include "photosplit/types.hpp"

namespace photosplit {

struct AtomAmplitudes {
  double tau1 = 0.0;
  double tau2 = 0.0;
  double bb = 0.0;
  double ba = 0.0;
  double ab = 0.0;
  double aa = 0.0;

  // Component order used by every matrix in the library: (aa, ab, ba, bb).
  Vec4 vector() const { return Vec4(aa, ab, ba, bb); }
  static AtomAmplitudes from_vector(double tau1, double tau2, const Vec4& v) {
    return {tau1, tau2, v(3), v(2), v(1), v(0)};
  }
};

/// Nested adaptive quadrature of the amplitude integrals over the support of
/// the input. Slow; this is the reference path.
AtomAmplitudes atom_amplitudes(const TwoPhotonInput& input, double tau1, double tau2,
                               const QuadratureSpec& spec = QuadratureSpec{1e-11, 1e-15, 20.0, 40});

/// Closed forms for the unentangled exponential input sqrt(2) xi1(t1) xi1(t2),
/// xi1 = sqrt(2 kappa) exp(-kappa t). Near kappa = 2 the printed expressions
/// lose precision and an expm1-based form takes over.
AtomAmplitudes closed_form_exponential_amplitudes(double kappa, double tau1, double tau2);
// The rational-exponential expressions with the (kappa - 2)^2 denominator.
AtomAmplitudes printed_exponential_amplitudes(double kappa, double tau1, double tau2);
// The same amplitudes written with int_0^x e^{-p(x-v)} e^{-q v} dv; stable for every kappa.
AtomAmplitudes stable_exponential_amplitudes(double kappa, double tau1, double tau2);

// int_0^x e^{-p (x - v)} e^{-q v} dv, evaluated without cancellation.
double exp_convolution(double p, double q, double x);

namespace detail {

// Piecewise Chebyshev table of y(x) = int_lo^x e^{-r (x - t)} g(t) dt on [lo, hi]
// (or the backward integral int_x^hi e^{-r (t - x)} g(t) dt). Each panel holds
// values at 17 Chebyshev points; panels are bisected until a held-out point
// agrees with direct Gauss-Legendre evaluation. g must vanish outside [lo, hi].
template <typename T>
class CumulativeTable {
 public:
  static constexpr int kDegree = 16;

  CumulativeTable() = default;

  template <typename G>
  static CumulativeTable build(G&& g, double rate, double lo, double hi, double step, bool backward, double abs_tol);

  T operator()(double x) const;
  std::size_t panels() const { return starts_.size(); }

 private:
  template <typename G>
  void build_panel(G& g, double a, double b, const T& ya, int depth, double abs_tol);
  T interpolate(std::size_t k, double x) const;

  double rate_ = 2.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
  bool backward_ = false;
  T zero_{};
  T end_value_{};
  std::vector<double> starts_;
  std::vector<double> ends_;
  std::vector<std::vector<T>> values_;
};

inline const std::vector<double>& chebyshev_points() {
  static const std::vector<double> pts = [] {
    std::vector<double> p(CumulativeTable<double>::kDegree + 1);
    const int n = CumulativeTable<double>::kDegree;
    for (int j = 0; j <= n; ++j) p[j] = -std::cos(kPi * j / n);
    return p;
  }();
  return pts;
}

template <typename T>
template <typename G>
CumulativeTable<T> CumulativeTable<T>::build(G&& g, double rate, double lo, double hi, double step, bool backward,
                                             double abs_tol) {
  if (!(hi > lo) || !(step > 0.0)) throw std::invalid_argument("cumulative table needs lo < hi and step > 0");
  CumulativeTable t;
  t.rate_ = rate;
  t.lo_ = lo;
  t.hi_ = hi;
  t.backward_ = backward;
  // Work in the forward variable u; backward tables use u = lo + hi - x.
  auto gu = [&](double u) -> T { return T(g(backward ? lo + hi - u : u)); };
  t.zero_ = T(0.0 * gu(lo));
  const int cells = std::max(1, static_cast<int>(std::ceil((hi - lo) / step)));
  const double h = (hi - lo) / cells;
  T y = t.zero_;
  for (int c = 0; c < cells; ++c) {
    const double a = lo + c * h;
    const double b = c + 1 == cells ? hi : a + h;
    t.build_panel(gu, a, b, y, 0, abs_tol);
    y = t.values_.back().back();
  }
  t.end_value_ = y;
  return t;
}

template <typename T>
template <typename G>
void CumulativeTable<T>::build_panel(G& g, double a, double b, const T& ya, int depth, double abs_tol) {
  constexpr int kMaxDepth = 14;
  const GaussRule& rule = gauss_legendre(20);
  const GaussRule& coarse_rule = gauss_legendre(10);
  const auto& cheb = chebyshev_points();
  auto local = [&](double x, const GaussRule& r) -> T {
    // y(x) from the panel start: carried value plus the remainder integral.
    T acc = T(std::exp(-rate_ * (x - a)) * ya);
    if (x > a) {
      const double half = 0.5 * (x - a);
      const double mid = 0.5 * (x + a);
      for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        const double t = mid + half * r.nodes[i];
        acc += T(r.weights[i] * half * std::exp(-rate_ * (x - t)) * g(t));
      }
    }
    return acc;
  };
  std::vector<T> vals;
  vals.reserve(cheb.size());
  for (double c : cheb) vals.push_back(local(0.5 * (a + b) + 0.5 * (b - a) * c, rule));

  double err = detail::magnitude(T(local(b, rule) - local(b, coarse_rule)));
  const std::size_t k = starts_.size();
  starts_.push_back(a);
  ends_.push_back(b);
  values_.push_back(std::move(vals));
  for (double probe : {-0.83, -0.31, 0.47, 0.91}) {
    const double x = 0.5 * (a + b) + 0.5 * (b - a) * probe;
    err = std::max(err, detail::magnitude(T(interpolate(k, x) - local(x, rule))));
  }
  if (err > abs_tol && depth < kMaxDepth) {
    starts_.pop_back();
    ends_.pop_back();
    values_.pop_back();
    const double m = 0.5 * (a + b);
    build_panel(g, a, m, ya, depth + 1, abs_tol);
    const T ym = values_.back().back();
    build_panel(g, m, b, ym, depth + 1, abs_tol);
  }
}

template <typename T>
T CumulativeTable<T>::interpolate(std::size_t k, double x) const {
  const auto& cheb = chebyshev_points();
  const double a = starts_[k];
  const double b = ends_[k];
  const double u = (2.0 * x - a - b) / (b - a);
  const auto& v = values_[k];
  double den = 0.0;
  T num = zero_;
  for (int j = 0; j <= kDegree; ++j) {
    const double d = u - cheb[j];
    if (d == 0.0) return v[j];
    double w = (j % 2 == 0 ? 1.0 : -1.0) / d;
    if (j == 0 || j == kDegree) w *= 0.5;
    num += T(w * v[j]);
    den += w;
  }
  return T(num / den);
}

template <typename T>
T CumulativeTable<T>::operator()(double x) const {
  const double u = backward_ ? lo_ + hi_ - x : x;
  if (u <= lo_) return zero_;
  if (u >= hi_) return T(std::exp(-rate_ * (u - hi_)) * end_value_);
  auto it = std::upper_bound(starts_.begin(), starts_.end(), u);
  const std::size_t k = static_cast<std::size_t>(std::distance(starts_.begin(), it)) - 1;
  return interpolate(k, u);
}

}  // namespace detail

/// Fast evaluator of the emitter amplitudes for one input. Inner integrals are
/// tabulated once; evaluation then costs a few table lookups. Inputs without a
/// tabulated form use the direct nested quadrature.
class AmplitudeKernel {
 public:
  enum class Method { Direct, Unentangled, EntangledExponential, Windowed };

  AmplitudeKernel(const TwoPhotonInput& input, const QuadratureSpec& spec);
  // Kernel that always uses direct nested quadrature.
  static AmplitudeKernel direct(const TwoPhotonInput& input, const QuadratureSpec& spec);

  AtomAmplitudes operator()(double tau1, double tau2) const;
  // (aa, ab, ba, bb) at (tau1, tau1 + s).
  Vec4 at(double tau1, double s) const;

  // Stationary inputs only: amplitudes per unit window amplitude deep inside
  // an infinite window, as a function of s = tau2 - tau1.
  Vec4 stationary_bulk(double s) const;

  const TwoPhotonInput& input() const { return input_; }
  Method method() const { return method_; }
  // Outer-integration breakpoints in tau1.
  std::vector<double> breakpoints() const;

 private:
  struct DirectTag {};
  AmplitudeKernel(const TwoPhotonInput& input, const QuadratureSpec& spec, DirectTag);

  TwoPhotonInput input_;
  QuadratureSpec spec_;
  Method method_ = Method::Direct;
  detail::CumulativeTable<double> q_;  // unentangled: int_lo^x e^{-2(x-t)} xi1(t) dt
  detail::CumulativeTable<double> v_;  // stationary: int_0^x e^{-2(x-v)} f(v) dv
  detail::CumulativeTable<double> p_;  // stationary: int_x^inf e^{-2(w-x)} f(w) dw
  double p0_ = 0.0;
};

/// Tabulated evaluator; falls back to direct quadrature when the table cannot
/// be built.
AmplitudeKernel cumulative_kernel(const TwoPhotonInput& input,
                                  const QuadratureSpec& spec = QuadratureSpec::one_dimensional());

/// Amplitudes of every half-line Hermite-Gauss mode n = 0..M-1 at once, for the
/// windowed stationary state built from each mode.
class ModeKernel {
 public:
  ModeKernel(int modes, double sigma, double L);

  // 4 x M matrix, rows (aa, ab, ba, bb); zero window amplitude for tau1 < -L.
  MatX at(double tau1, double s) const;
  // Stationary-limit bulk amplitudes per unit window amplitude.
  MatX stationary_bulk(double s) const;
  VecX profiles(double s) const;

  int modes() const { return modes_; }
  double sigma() const { return sigma_; }
  double window() const { return window_; }
  double extent() const { return extent_; }

 private:
  int modes_;
  double sigma_;
  double window_;
  double extent_;
  detail::CumulativeTable<VecX> v_;
  detail::CumulativeTable<VecX> p_;
  VecX p0_;
};

}  // namespace photosplit
