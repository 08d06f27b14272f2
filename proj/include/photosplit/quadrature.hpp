#pragma once

// Deterministic adaptive Gauss-Legendre quadrature for 1D integrals on finite,
// semi-infinite and infinite domains, and for 2D integrals over the ordered
// region tau2 >= tau1.
//
// The integrators are templated on the value type: anything closed under
// addition and multiplication by a double works (double, std::complex<double>,
// fixed or dynamic Eigen matrices). Adaptivity is driven by the max-norm of the
// value.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace photosplit {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-14;
  // Length scale: initial panels are at most horizon/4 wide, and past the last
  // breakpoint semi-infinite integrals are summed over segments of width
  // horizon/4, horizon/2, horizon, ...
  double horizon = 20.0;
  int max_depth = 30;

  static QuadratureSpec one_dimensional() { return {}; }
  static QuadratureSpec two_dimensional() { return {1e-6, 1e-12, 20.0, 30}; }

  void validate() const;
};

struct IntegrationDomain {
  double lower = 0.0;
  double upper = kInfinity;
  // Interior points where the integrand may have a kink or a jump.
  std::vector<double> breakpoints;

  static IntegrationDomain interval(double a, double b) { return {a, b, {}}; }
  static IntegrationDomain half_line(double a) { return {a, kInfinity, {}}; }
  static IntegrationDomain up_to(double b) { return {-kInfinity, b, {}}; }
  static IntegrationDomain whole_line() { return {-kInfinity, kInfinity, {}}; }

  IntegrationDomain with_breakpoints(std::vector<double> points) const {
    IntegrationDomain d = *this;
    d.breakpoints = std::move(points);
    return d;
  }

  void validate() const;
};

template <typename T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  bool converged = true;
  std::size_t evaluations = 0;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate_norm, double error)
      : std::runtime_error(what), estimate_norm_(estimate_norm), error_(error) {}
  double estimate_norm() const { return estimate_norm_; }
  double error() const { return error_; }

 private:
  double estimate_norm_;
  double error_;
};

namespace detail {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const std::complex<double>& x) { return std::abs(x); }
template <typename Derived>
double magnitude(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.template lpNorm<Eigen::Infinity>();
}

// A value carried together with an integrated error density; used so the
// outer integral of a nested 2D integration also integrates inner errors.
template <typename T>
struct WithError {
  T value;
  double error;

  WithError& operator+=(const WithError& o) {
    value += o.value;
    error += o.error;
    return *this;
  }
  WithError& operator-=(const WithError& o) {
    value -= o.value;
    error -= o.error;
    return *this;
  }
  friend WithError operator+(WithError a, const WithError& b) { return a += b; }
  friend WithError operator-(WithError a, const WithError& b) { return a -= b; }
  friend WithError operator*(double w, const WithError& a) { return {T(w * a.value), w * a.error}; }
};

template <typename T>
double magnitude(const WithError<T>& x) {
  return magnitude(x.value);
}

template <typename F>
using value_t = std::decay_t<std::invoke_result_t<F&, double>>;

template <typename F, typename T = value_t<F>>
T gauss_panel(F& f, double a, double b, const GaussRule& rule, std::size_t& evals) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  T acc = T(rule.weights[0] * half * f(mid + half * rule.nodes[0]));
  for (std::size_t i = 1; i < rule.nodes.size(); ++i) {
    acc += T(rule.weights[i] * half * f(mid + half * rule.nodes[i]));
  }
  evals += rule.nodes.size();
  return acc;
}

template <typename T>
struct Panel {
  double a;
  double b;
  T left;   // rule applied to [a, m]
  T right;  // rule applied to [m, b]
  double error;
  int depth;
};

// Global adaptive bisection over the panels delimited by `cuts` (sorted,
// including both ends). Each panel's error is |rule(a,b) - rule(a,m) - rule(m,b)|;
// the worst panel is bisected until the summed error meets the tolerance.
template <typename F, typename T = value_t<F>>
QuadratureResult<T> adaptive_finite(F& f, std::span<const double> cuts, const QuadratureSpec& spec,
                                    double abs_floor) {
  constexpr int kOrder = 8;
  constexpr std::size_t kMaxPanels = 1u << 17;
  const GaussRule& rule = gauss_legendre(kOrder);

  QuadratureResult<T> out;
  std::vector<Panel<T>> panels;
  std::size_t evals = 0;

  auto make_panel = [&](double a, double b, const T& coarse, int depth) {
    const double m = 0.5 * (a + b);
    T left = gauss_panel(f, a, m, rule, evals);
    T right = gauss_panel(f, m, b, rule, evals);
    T fine = left + right;
    const double err = magnitude(T(fine - coarse));
    return Panel<T>{a, b, std::move(left), std::move(right), err, depth};
  };

  // Priority: largest error first, ties broken by creation order.
  using Entry = std::pair<double, std::size_t>;
  auto cmp = [](const Entry& x, const Entry& y) {
    return x.first < y.first || (x.first == y.first && x.second > y.second);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> queue(cmp);

  double err_sum = 0.0;
  bool have_total = false;
  T total{};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (!(b > a)) continue;
    T coarse = gauss_panel(f, a, b, rule, evals);
    panels.push_back(make_panel(a, b, coarse, 1));
    const auto& p = panels.back();
    err_sum += p.error;
    T fine = p.left + p.right;
    if (have_total) {
      total += fine;
    } else {
      total = fine;
      have_total = true;
    }
    if (p.depth < spec.max_depth) queue.emplace(p.error, panels.size() - 1);
  }
  if (!have_total) {
    out.value = T(0.0 * f(cuts.empty() ? 0.0 : cuts.front()));
    out.evaluations = evals + 1;
    return out;
  }

  auto target = [&] { return std::max(spec.rel_tol * magnitude(total), abs_floor); };

  while (err_sum > target()) {
    if (queue.empty() || panels.size() >= kMaxPanels) {
      out.converged = false;
      break;
    }
    const std::size_t idx = queue.top().second;
    queue.pop();
    Panel<T> parent = panels[idx];
    const double m = 0.5 * (parent.a + parent.b);
    Panel<T> lo = make_panel(parent.a, m, parent.left, parent.depth + 1);
    Panel<T> hi = make_panel(m, parent.b, parent.right, parent.depth + 1);
    total -= T(parent.left + parent.right);
    total += T(lo.left + lo.right);
    total += T(hi.left + hi.right);
    err_sum += lo.error + hi.error - parent.error;
    panels[idx] = std::move(lo);
    panels.push_back(std::move(hi));
    if (panels[idx].depth < spec.max_depth) queue.emplace(panels[idx].error, idx);
    if (panels.back().depth < spec.max_depth) queue.emplace(panels.back().error, panels.size() - 1);
  }

  // Reassemble in spatial order so the result does not depend on refinement
  // history beyond the final panel set.
  std::vector<std::size_t> order(panels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return panels[x].a < panels[y].a; });
  T sum = panels[order[0]].left + panels[order[0]].right;
  double err = panels[order[0]].error;
  for (std::size_t k = 1; k < order.size(); ++k) {
    sum += T(panels[order[k]].left + panels[order[k]].right);
    err += panels[order[k]].error;
  }
  out.value = std::move(sum);
  out.error = err;
  out.evaluations = evals;
  return out;
}

// Sorted cuts from a to b through the interior breakpoints; no initial panel
// is wider than max_width.
inline std::vector<double> cuts_between(double a, double b, const std::vector<double>& breakpoints,
                                        double max_width = kInfinity) {
  std::vector<double> bp = breakpoints;
  std::sort(bp.begin(), bp.end());
  std::vector<double> edges{a};
  for (double x : bp) {
    if (x > a && x < b) edges.push_back(x);
  }
  edges.push_back(b);
  std::vector<double> cuts{a};
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double w = edges[i + 1] - edges[i];
    const int pieces = std::isfinite(max_width) ? std::max(1, static_cast<int>(std::ceil(w / max_width))) : 1;
    for (int k = 1; k < pieces; ++k) cuts.push_back(edges[i] + w * k / pieces);
    cuts.push_back(edges[i + 1]);
  }
  return cuts;
}

// Integral over [a, +inf): [a, b] through the breakpoints (b the last one),
// then [b, b+h], [b+h, b+3h], [b+3h, b+7h], ... with h = horizon / 4, stopping
// once a segment contributes below tolerance. The short first segment keeps a
// narrow feature just past a jump from falling between the nodes.
template <typename F, typename T = value_t<F>>
QuadratureResult<T> tail_integral(F& f, double a, const std::vector<double>& breakpoints, const QuadratureSpec& spec) {
  constexpr int kMaxSegments = 64;
  double last_break = a;
  for (double x : breakpoints) last_break = std::max(last_break, x);

  QuadratureResult<T> out;
  bool first = true;
  auto add = [&](QuadratureResult<T>&& part) {
    if (first) {
      out.value = std::move(part.value);
      first = false;
    } else {
      out.value += part.value;
    }
    out.error += part.error;
    out.evaluations += part.evaluations;
    out.converged = out.converged && part.converged;
  };
  if (last_break > a) {
    add(adaptive_finite(f, cuts_between(a, last_break, breakpoints, 0.25 * spec.horizon), spec, spec.abs_tol));
  }

  double lo = last_break;
  double width = 0.25 * spec.horizon;
  for (int seg = 0; seg < kMaxSegments; ++seg) {
    const double hi = lo + width;
    const double floor = first ? spec.abs_tol : std::max(spec.abs_tol, 0.5 * spec.rel_tol * magnitude(out.value));
    const std::vector<double> cuts{lo, hi};
    auto part = adaptive_finite(f, cuts, spec, floor);
    const double seg_size = magnitude(part.value);
    add(std::move(part));
    const double target = std::max(spec.rel_tol * magnitude(out.value), spec.abs_tol);
    if (seg > 0 && seg_size <= 0.25 * target) {
      out.error += seg_size;
      return out;
    }
    lo = hi;
    width *= 2.0;
  }
  out.converged = false;
  return out;
}

}  // namespace detail

/// Integrates f over `domain`. Infinite ends are handled by horizon doubling.
/// Non-convergence is reported through `converged == false`; the value and
/// error fields then hold the best estimate.
template <typename F>
auto integrate_1d(F&& f, const IntegrationDomain& domain, const QuadratureSpec& spec = QuadratureSpec::one_dimensional())
    -> QuadratureResult<detail::value_t<F>> {
  using T = detail::value_t<F>;
  spec.validate();
  domain.validate();
  const bool lower_inf = std::isinf(domain.lower);
  const bool upper_inf = std::isinf(domain.upper);

  if (!lower_inf && !upper_inf) {
    const auto cuts = detail::cuts_between(domain.lower, domain.upper, domain.breakpoints, 0.25 * spec.horizon);
    return detail::adaptive_finite(f, cuts, spec, spec.abs_tol);
  }
  if (!lower_inf) {
    return detail::tail_integral(f, domain.lower, domain.breakpoints, spec);
  }
  if (!upper_inf) {
    const double b = domain.upper;
    auto g = [&](double u) -> T { return T(f(b - u)); };
    std::vector<double> bp;
    for (double x : domain.breakpoints) {
      if (x < b) bp.push_back(b - x);
    }
    return detail::tail_integral(g, 0.0, bp, spec);
  }
  // Whole line: split at the first breakpoint (or 0).
  const double pivot = domain.breakpoints.empty() ? 0.0 : *std::min_element(domain.breakpoints.begin(), domain.breakpoints.end());
  IntegrationDomain left{-kInfinity, pivot, domain.breakpoints};
  IntegrationDomain right{pivot, kInfinity, domain.breakpoints};
  auto l = integrate_1d(f, left, spec);
  auto r = integrate_1d(f, right, spec);
  QuadratureResult<T> out;
  out.value = l.value + r.value;
  out.error = l.error + r.error;
  out.converged = l.converged && r.converged;
  out.evaluations = l.evaluations + r.evaluations;
  return out;
}

/// Integrates f(tau1, tau2) over tau1 in `outer` and tau2 in [tau1, +inf),
/// through the substitution tau2 = tau1 + s with s in [0, +inf).
template <typename F>
auto integrate_ordered_2d(F&& f, const IntegrationDomain& outer,
                          const QuadratureSpec& spec = QuadratureSpec::two_dimensional())
    -> QuadratureResult<std::decay_t<std::invoke_result_t<F&, double, double>>> {
  using T = std::decay_t<std::invoke_result_t<F&, double, double>>;
  bool inner_ok = true;
  std::size_t inner_evals = 0;
  const auto inner_domain = IntegrationDomain::half_line(0.0);
  auto row = [&](double tau1) -> detail::WithError<T> {
    auto inner = integrate_1d([&](double s) -> T { return T(f(tau1, tau1 + s)); }, inner_domain, spec);
    inner_ok = inner_ok && inner.converged;
    inner_evals += inner.evaluations;
    return {std::move(inner.value), inner.error};
  };
  auto res = integrate_1d(row, outer, spec);
  QuadratureResult<T> out;
  out.value = std::move(res.value.value);
  out.error = res.error + std::abs(res.value.error);
  out.converged = res.converged && inner_ok;
  out.evaluations = inner_evals;
  return out;
}

/// Throws QuadratureError when `r` did not converge; returns the value otherwise.
template <typename T>
const T& value_or_throw(const QuadratureResult<T>& r, const char* what = "quadrature did not converge") {
  if (!r.converged) throw QuadratureError(what, detail::magnitude(r.value), r.error);
  return r.value;
}

}  // namespace photosplit
