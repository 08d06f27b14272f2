#include "photosplit/quadrature.hpp"

#include <map>
#include <mutex>
#include <numbers>

namespace photosplit {

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("quadrature tolerances must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("quadrature horizon must be positive");
  if (max_depth < 1) throw std::invalid_argument("quadrature max depth must be at least 1");
}

void IntegrationDomain::validate() const {
  if (std::isnan(lower) || std::isnan(upper)) throw std::invalid_argument("integration bounds must not be NaN");
  if (std::isinf(lower) && lower > 0) throw std::invalid_argument("lower bound cannot be +inf");
  if (std::isinf(upper) && upper < 0) throw std::invalid_argument("upper bound cannot be -inf");
  if (std::isfinite(lower) && std::isfinite(upper) && !(lower < upper)) {
    throw std::invalid_argument("integration domain requires lower < upper");
  }
}

namespace detail {

namespace {

GaussRule compute_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-like initial guess, refined by Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

}  // namespace detail
}  // namespace photosplit
