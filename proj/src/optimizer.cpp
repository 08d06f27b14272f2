#include "photosplit/optimizer.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace photosplit {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Maximizes f on [a, b]; returns (argmax, max) over every evaluated point.
template <typename F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol, int max_iter = 200) {
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  double best_x = fc >= fd ? c : d;
  double best_f = std::max(fc, fd);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
      if (fc > best_f) best_x = c, best_f = fc;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
      if (fd > best_f) best_x = d, best_f = fd;
    }
  }
  return {best_x, best_f};
}

void require_increasing(const std::vector<double>& grid, const char* what) {
  if (grid.empty()) throw std::invalid_argument(std::string(what) + " grid must not be empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument(std::string(what) + " grid must be strictly increasing");
  }
}

double wrap_phi(double phi) {
  const double r = MziSetting{0.0, phi}.reduced().phi;
  return 2.0 * kPi - r < 1e-8 ? 0.0 : r;
}

// rho_s(pi - theta, phi + pi) = rho_s(theta, phi) for real amplitudes; report
// the representative with theta <= pi/2.
MziSetting canonical(MziSetting s) {
  s = s.reduced();
  if (s.theta > 0.5 * kPi) s = {kPi - s.theta, s.phi + kPi};
  return {s.theta, wrap_phi(s.phi)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Families and workers

TwoPhotonInput FamilyDescriptor::make(double bandwidth) const {
  switch (family) {
    case Family::UnentangledExponential:
      return make_unentangled(SinglePhotonShape::Exponential, bandwidth);
    case Family::UnentangledGaussian:
      return make_unentangled(SinglePhotonShape::Gaussian, bandwidth);
    case Family::EntangledExponential:
      return make_entangled_exponential(envelope_kappa, bandwidth);
    case Family::EntangledGaussianWindowed:
      return make_entangled_gaussian_windowed(bandwidth, window);
    case Family::EntangledExponentialWindowed:
      return make_entangled_exponential_windowed(bandwidth, window);
    case Family::StationaryBasisMode:
      return make_stationary_mode(mode, 1.0 / bandwidth, window);
    case Family::StationarySuperposition:
      return make_stationary_superposition(coefficients, 1.0 / bandwidth, window);
  }
  throw std::invalid_argument("unknown family");
}

std::string FamilyDescriptor::bandwidth_name() const { return is_unentangled(family) ? "kappa" : "delta"; }

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const std::size_t count = std::min<std::size_t>(n, static_cast<std::size_t>(workers));
  if (count <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

BandwidthGram bandwidth_gram(const FamilyDescriptor& family, double bandwidth, const QuadratureSpec& spec) {
  BandwidthGram out;
  out.bandwidth = bandwidth;
  if (!std::isfinite(family.window) && is_stationary(family.family)) {
    FamilyDescriptor unit = family;
    unit.window = 1.0;
    const AmplitudeKernel kernel = cumulative_kernel(unit.make(bandwidth));
    QuadratureSpec one = spec;
    one.rel_tol = std::min(spec.rel_tol, 1e-9);
    const auto g = stationary_gram(kernel, one);
    out.gram = g.value;
    out.error = g.error;
    out.converged = g.converged;
    return out;
  }
  const AmplitudeKernel kernel = cumulative_kernel(family.make(bandwidth));
  const auto g = amplitude_gram(kernel, spec);
  out.gram = g.value;
  out.error = g.error;
  out.converged = g.converged;
  return out;
}

// ---------------------------------------------------------------------------
// Settings

std::vector<double> default_phi_grid(int steps) {
  if (steps < 1) throw std::invalid_argument("phi grid needs at least one point");
  std::vector<double> out(steps);
  for (int i = 0; i < steps; ++i) out[i] = 2.0 * kPi * i / steps;
  return out;
}

SettingOptimum optimize_phi(const Mat4& gram, double theta, const std::vector<double>& phi_grid) {
  const std::vector<double>& grid = phi_grid.empty() ? default_phi_grid() : phi_grid;
  auto value = [&](double phi) { return contract(split_matrix({theta, phi}), gram); };
  std::size_t best = 0;
  double best_v = -kInfinity;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = value(grid[i]);
    if (v > best_v) best_v = v, best = i;
  }
  const double step = 2.0 * kPi / static_cast<double>(grid.size());
  const auto [x, fx] = golden_max(value, grid[best] - step, grid[best] + step, 1e-10);
  if (fx > best_v) return {{theta, wrap_phi(x)}, fx};
  return {{theta, wrap_phi(grid[best])}, best_v};
}

SettingOptimum optimize_setting(const Mat4& gram, std::optional<double> fixed_theta,
                                const std::vector<double>& phi_grid) {
  if (fixed_theta) return optimize_phi(gram, *fixed_theta, phi_grid);
  constexpr int kThetaGrid = 64;
  SettingOptimum best{{0.0, 0.0}, -kInfinity};
  for (int i = 0; i < kThetaGrid; ++i) {
    const auto o = optimize_phi(gram, kPi * i / kThetaGrid, phi_grid);
    if (o.P_S > best.P_S) best = o;
  }
  const double step = kPi / kThetaGrid;
  SettingOptimum refined = best;
  golden_max(
      [&](double th) {
        const auto o = optimize_phi(gram, th, phi_grid);
        if (o.P_S > refined.P_S) refined = o;
        return o.P_S;
      },
      best.setting.theta - step, best.setting.theta + step, 1e-10);
  refined.setting = canonical(refined.setting);
  return refined;
}

// ---------------------------------------------------------------------------
// Surfaces and peaks

EfficiencySurface sweep_surface(const FamilyDescriptor& family, const std::vector<double>& bandwidths,
                                const std::vector<double>& thetas, const std::vector<double>& phis,
                                const QuadratureSpec& spec, int workers) {
  require_increasing(bandwidths, "bandwidth");
  require_increasing(thetas, "theta");
  require_increasing(phis, "phi");
  EfficiencySurface out;
  out.family = family;
  out.bandwidths = bandwidths;
  out.thetas = thetas;
  out.phis = phis;
  const Index nb = static_cast<Index>(bandwidths.size());
  const Index nt = static_cast<Index>(thetas.size());
  out.P_S = MatX::Constant(nb, nt, std::numeric_limits<double>::quiet_NaN());
  out.phi_opt = out.P_S;
  out.error = out.P_S;
  std::vector<std::string> row_failure(bandwidths.size());

  parallel_for(bandwidths.size(), workers, [&](std::size_t i) {
    BandwidthGram g;
    try {
      g = bandwidth_gram(family, bandwidths[i], spec);
    } catch (const std::exception& e) {
      row_failure[i] = "bandwidth " + std::to_string(bandwidths[i]) + ": " + e.what();
      return;
    }
    if (!g.converged) row_failure[i] = "bandwidth " + std::to_string(bandwidths[i]) + ": quadrature did not converge";
    for (Index j = 0; j < nt; ++j) {
      const auto o = optimize_phi(g.gram, thetas[j], phis);
      const Index r = static_cast<Index>(i);
      out.P_S(r, j) = o.P_S;
      out.phi_opt(r, j) = o.setting.phi;
      out.error(r, j) = g.error * split_matrix(o.setting).cwiseAbs().sum();
    }
  });
  for (auto& f : row_failure) {
    if (!f.empty()) out.failures.push_back(f);
  }
  return out;
}

PeakResult find_peak(const FamilyDescriptor& family, const PeakGuess& guess, const QuadratureSpec& spec) {
  if (!(guess.bandwidth_lo > 0.0) || !(guess.bandwidth_hi > guess.bandwidth_lo)) {
    throw std::invalid_argument("peak search needs 0 < bandwidth_lo < bandwidth_hi");
  }
  std::map<double, std::pair<SettingOptimum, double>> memo;
  auto eval = [&](double bw) {
    auto it = memo.find(bw);
    if (it != memo.end()) return it->second;
    const BandwidthGram g = bandwidth_gram(family, bw, spec);
    const SettingOptimum o = optimize_setting(g.gram, guess.fixed_theta);
    const double err = g.error * split_matrix(o.setting).cwiseAbs().sum();
    return memo.emplace(bw, std::make_pair(o, err)).first->second;
  };

  PeakResult out;
  double a = guess.bandwidth_lo;
  double b = guess.bandwidth_hi;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = eval(c).first.P_S;
  double fd = eval(d).first.P_S;
  eval(std::clamp(guess.bandwidth, a, b));
  double prev = std::max(fc, fd);
  constexpr int kMaxIter = 100;
  for (int it = 0; it < kMaxIter; ++it) {
    out.iterations = it + 1;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = eval(c).first.P_S;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = eval(d).first.P_S;
    }
    const double now = std::max(fc, fd);
    const bool small_bracket = (b - a) < 1e-3;
    const bool small_change = std::abs(now - prev) < 1e-5;
    prev = now;
    if (small_bracket && small_change) {
      out.converged = true;
      break;
    }
  }
  // Best of every evaluated point, so the result never falls below the guess.
  double best_bw = memo.begin()->first;
  for (const auto& [bw, v] : memo) {
    if (v.first.P_S > memo.at(best_bw).first.P_S) best_bw = bw;
  }
  const auto& best = memo.at(best_bw);
  out.bandwidth = best_bw;
  out.setting = best.first.setting;
  out.P_S = best.first.P_S;
  out.error = best.second;
  if (is_stationary(family.family) && std::isfinite(family.window)) {
    FamilyDescriptor doubled = family;
    doubled.window = 2.0 * family.window;
    const BandwidthGram g2 = bandwidth_gram(doubled, best_bw, spec);
    out.L_delta = std::abs(contract(split_matrix(out.setting), g2.gram) - out.P_S);
  }
  return out;
}

PeakResult locate_peak(const FamilyDescriptor& family, double band_min, double band_max, int band_steps,
                       std::optional<double> fixed_theta, const QuadratureSpec& spec) {
  if (band_steps < 3) throw std::invalid_argument("coarse peak grid needs at least 3 bandwidths");
  if (!(band_min > 0.0) || !(band_max > band_min)) throw std::invalid_argument("need 0 < band_min < band_max");
  std::vector<double> grid(band_steps);
  for (int i = 0; i < band_steps; ++i) grid[i] = band_min + (band_max - band_min) * i / (band_steps - 1);
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), 0, [&](std::size_t i) {
    const BandwidthGram g = bandwidth_gram(family, grid[i], spec);
    values[i] = optimize_setting(g.gram, fixed_theta).P_S;
  });
  const std::size_t best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
  PeakGuess guess;
  guess.bandwidth = grid[best];
  guess.bandwidth_lo = grid[best == 0 ? 0 : best - 1];
  guess.bandwidth_hi = grid[std::min(best + 1, grid.size() - 1)];
  if (best == 0) guess.bandwidth_lo = 0.5 * grid[0];
  if (best + 1 == grid.size()) guess.bandwidth_hi = grid.back() + (grid[1] - grid[0]);
  guess.fixed_theta = fixed_theta;
  return find_peak(family, guess, spec);
}

// ---------------------------------------------------------------------------
// Shape optimization

namespace {

void require_even(int N) {
  if (N < 0 || N % 2 != 0) throw std::invalid_argument("basis order N must be a non-negative even integer");
}

}  // namespace

ShapeProblem build_r_matrix(int N, double sigma, const MziSetting& setting, double L, const QuadratureSpec& spec) {
  require_even(N);
  ShapeProblem p;
  p.N = N;
  p.sigma = sigma;
  p.setting = setting;
  p.L = L;
  const int M = p.basis_size();
  const ModeKernel kernel(M, sigma, std::isfinite(L) ? L : 1.0);
  const Mat4 S = split_matrix(setting);
  MatX R;
  if (std::isfinite(L)) {
    const auto r = integrate_ordered_2d(
        [&](double t1, double t2) -> MatX {
          const MatX A = kernel.at(t1, t2 - t1);
          return A.transpose() * (S * A);
        },
        IntegrationDomain::half_line(-L).with_breakpoints({-L, L}), spec);
    R = r.value;
    p.error = r.error;
    p.converged = r.converged;
  } else {
    QuadratureSpec one = spec;
    one.rel_tol = std::min(spec.rel_tol, 1e-9);
    const auto r = integrate_1d(
        [&](double s) -> MatX {
          const MatX A = kernel.stationary_bulk(s);
          return A.transpose() * (S * A);
        },
        IntegrationDomain::half_line(0.0), one);
    R = r.value;
    p.error = r.error;
    p.converged = r.converged;
  }
  // Mirror the upper triangle.
  p.R = R.triangularView<Eigen::Upper>();
  p.R.triangularView<Eigen::StrictlyLower>() = R.triangularView<Eigen::StrictlyUpper>().transpose();
  return p;
}

ShapeProblem optimal_shape(ShapeProblem problem) {
  if (problem.R.rows() == 0 || problem.R.rows() != problem.R.cols()) {
    throw std::invalid_argument("shape problem has no assembled R matrix");
  }
  Eigen::SelfAdjointEigenSolver<MatX> es(problem.R);
  if (es.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolver did not converge");
  const Index top = problem.R.rows() - 1;
  problem.spectrum = es.eigenvalues();
  problem.eigenvalue = es.eigenvalues()(top);
  problem.coefficients = es.eigenvectors().col(top).normalized();
  if (problem.coefficients(0) < 0.0) problem.coefficients = -problem.coefficients;
  return problem;
}

MatX ModeGram::r_matrix(const MziSetting& setting) const {
  const Mat4 S = split_matrix(setting);
  const int M = modes();
  MatX R(M, M);
  for (int m = 0; m < M; ++m)
    for (int n = m; n < M; ++n) {
      R(m, n) = contract(S, G.block<4, 4>(4 * m, 4 * n));
      R(n, m) = R(m, n);
    }
  return R;
}

Mat4 ModeGram::state_gram(const VecX& alpha) const {
  if (alpha.size() != modes()) throw std::invalid_argument("coefficient vector does not match the basis size");
  Mat4 out = Mat4::Zero();
  for (int m = 0; m < modes(); ++m)
    for (int n = 0; n < modes(); ++n) out += alpha(m) * alpha(n) * G.block<4, 4>(4 * m, 4 * n);
  return out;
}

ModeGram build_mode_gram(int N, double sigma, double L, const QuadratureSpec& spec) {
  require_even(N);
  ModeGram g;
  g.N = N;
  g.sigma = sigma;
  g.L = L;
  const int M = g.modes();
  const ModeKernel kernel(M, sigma, std::isfinite(L) ? L : 1.0);
  auto outer = [](const MatX& A) -> MatX {
    const Eigen::Map<const VecX> v(A.data(), A.size());
    return v * v.transpose();
  };
  if (std::isfinite(L)) {
    const auto r = integrate_ordered_2d([&](double t1, double t2) -> MatX { return outer(kernel.at(t1, t2 - t1)); },
                                        IntegrationDomain::half_line(-L).with_breakpoints({-L, L}), spec);
    g.G = r.value;
    g.error = r.error;
  } else {
    QuadratureSpec one = spec;
    one.rel_tol = std::min(spec.rel_tol, 1e-9);
    const auto r = integrate_1d([&](double s) -> MatX { return outer(kernel.stationary_bulk(s)); },
                                IntegrationDomain::half_line(0.0), one);
    g.G = r.value;
    g.error = r.error;
  }
  return g;
}

AlternationResult alternate_shape_and_setting(int N, double sigma, const MziSetting& initial, double L,
                                              const QuadratureSpec& spec, std::optional<double> fixed_theta) {
  constexpr int kMaxRounds = 50;
  const ModeGram gram = build_mode_gram(N, sigma, L, spec);
  AlternationResult out;
  MziSetting setting = fixed_theta ? MziSetting{*fixed_theta, initial.phi} : initial;
  double prev = -kInfinity;
  for (int round = 0; round < kMaxRounds; ++round) {
    ShapeProblem p;
    p.N = N;
    p.sigma = sigma;
    p.L = L;
    p.setting = setting;
    p.R = gram.r_matrix(setting);
    p.error = gram.error;
    p = optimal_shape(std::move(p));
    // Best setting for this shape; keep the current one if nothing beats it.
    const Mat4 g_alpha = gram.state_gram(p.coefficients);
    const SettingOptimum o = optimize_setting(g_alpha, fixed_theta);
    double value = p.eigenvalue;
    if (o.P_S > value) {
      setting = o.setting;
      value = o.P_S;
    }
    out.history.push_back(value);
    out.rounds = round + 1;
    out.problem = std::move(p);
    out.setting = setting;
    if (value - prev < 1e-5) {
      out.converged = true;
      break;
    }
    prev = value;
  }
  // Final shape at the final setting.
  ShapeProblem p = out.problem;
  p.setting = setting;
  p.R = gram.r_matrix(setting);
  out.problem = optimal_shape(std::move(p));
  return out;
}

std::vector<ConvergencePoint> shape_convergence_curve(const ShapeProblem& largest, const std::vector<int>& Ns) {
  std::vector<ConvergencePoint> out;
  int last = -1;
  for (int N : Ns) {
    require_even(N);
    if (N <= last) throw std::invalid_argument("basis orders must be increasing");
    if (N > largest.N) throw std::invalid_argument("basis order exceeds the assembled R matrix");
    last = N;
    ShapeProblem sub = largest;
    const int M = N / 2 + 1;
    sub.N = N;
    sub.R = largest.R.topLeftCorner(M, M);
    sub = optimal_shape(std::move(sub));
    out.push_back({N, sub.eigenvalue, sub.coefficients(0) * sub.coefficients(0)});
  }
  return out;
}

std::vector<ConvergencePoint> shape_convergence_curve(const std::vector<int>& Ns, double sigma,
                                                      const MziSetting& setting, double L,
                                                      const QuadratureSpec& spec) {
  if (Ns.empty()) return {};
  const ShapeProblem largest = build_r_matrix(*std::max_element(Ns.begin(), Ns.end()), sigma, setting, L, spec);
  return shape_convergence_curve(largest, Ns);
}

double shaped_profile(const VecX& alpha, double sigma, double tau) {
  if (tau < 0.0 || alpha.size() == 0) return 0.0;
  const VecX h = hermite_functions(2 * static_cast<int>(alpha.size() - 1), tau / sigma);
  double sum = 0.0;
  for (Index n = 0; n < alpha.size(); ++n) sum += alpha(n) * h(2 * n);
  return std::sqrt(2.0 / sigma) * sum;
}

}  // namespace photosplit
