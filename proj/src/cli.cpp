#include "photosplit/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "photosplit/efficiency.hpp"
#include "photosplit/optimizer.hpp"
#include "photosplit/serialization.hpp"
#include "photosplit/validation.hpp"

namespace photosplit::cli {

namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string subcommand;
  std::optional<std::string> family;
  std::optional<double> kappa;
  std::optional<double> delta;
  double band_min = 0.25;
  double band_max = 5.0;
  std::optional<int> band_steps;
  int theta_steps = 64;
  int phi_steps = 8;
  std::optional<double> theta;
  std::optional<double> phi;
  bool bare = false;
  double L = 20.0;
  int basis_n = 78;
  std::optional<double> sigma;
  int mode = 0;
  std::optional<std::string> coefficients;
  double tol = 1e-6;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::uint64_t seed = 20240611;
  int workers = 0;
  bool quick = false;
  bool alternate = false;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Artifacts and the manifest of one run. The manifest is written even when
// the run fails part way.
struct Outputs {
  Json config = Json::object();
  Json artifacts = Json::array();
  Json extra = Json::object();
};

std::string alias_of(const std::string& key) { return "--" + key; }

std::vector<std::string> regenerating_command(const std::string& sub, const Json& config) {
  std::vector<std::string> cmd{"photosplit", sub};
  for (const auto& [key, value] : config.items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) cmd.push_back(alias_of(key));
    } else if (value.is_string()) {
      cmd.push_back(alias_of(key));
      cmd.push_back(value.get<std::string>());
    } else if (value.is_number_float()) {
      cmd.push_back(alias_of(key));
      cmd.push_back(format_number(value.get<double>()));
    } else if (value.is_number()) {
      cmd.push_back(alias_of(key));
      cmd.push_back(value.dump());
    } else if (value.is_array()) {
      cmd.push_back(alias_of(key));
      cmd.push_back(value.dump());
    }
  }
  return cmd;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension();
  return fs::path(p.string() + suffix);
}

void record_artifact(Outputs& o, const fs::path& path, const std::string& kind) {
  o.artifacts.push_back(Json{{"path", path.generic_string()}, {"kind", kind}, {"complete", true}});
}

void write_manifest(const fs::path& out, const std::string& sub, const Outputs& o, int exit_code, bool partial) {
  Json m;
  m["tool"] = "photosplit";
  m["subcommand"] = sub;
  m["command"] = regenerating_command(sub, o.config);
  m["config"] = o.config;
  m["artifacts"] = o.artifacts;
  for (const auto& [k, v] : o.extra.items()) m[k] = v;
  m["partial"] = partial;
  m["exit_code"] = exit_code;
  write_file(sibling(out, ".manifest.json"), m.dump(2) + "\n");
}

Family require_family(const RunConfig& c) {
  if (!c.family) throw UsageError("--family is required");
  const auto f = parse_family(*c.family);
  if (!f) throw UsageError("unknown family '" + *c.family + "'");
  return *f;
}

VecX parse_coefficients(const std::string& text_or_path) {
  std::string text = text_or_path;
  if (text.empty() || text.front() != '[') {
    std::ifstream f(text_or_path);
    if (!f) throw UsageError("cannot read coefficient file " + text_or_path);
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw UsageError(std::string("coefficients are not a JSON array: ") + e.what());
  }
  if (!j.is_array() || j.empty()) throw UsageError("coefficients must be a non-empty JSON array");
  VecX a(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw UsageError("coefficients must be numbers");
    a(static_cast<Index>(i)) = j[i].get<double>();
  }
  return a;
}

Json coefficients_json(const VecX& a) {
  Json j = Json::array();
  for (Index i = 0; i < a.size(); ++i) j.push_back(a(i));
  return j;
}

// Family descriptor plus the config keys that define it.
FamilyDescriptor resolve_family(const RunConfig& c, Json& config) {
  FamilyDescriptor fd;
  fd.family = require_family(c);
  config["family"] = std::string(family_name(fd.family));
  if (is_unentangled(fd.family) && c.delta) throw UsageError("--delta does not apply to unentangled families");
  if (fd.family == Family::EntangledExponential) {
    fd.envelope_kappa = c.kappa.value_or(1e-3);
    config["kappa"] = fd.envelope_kappa;
  }
  if (is_stationary(fd.family)) {
    if (!(c.L > 0.0)) throw UsageError("--L must be positive");
    fd.window = c.L;
    config["L"] = c.L;
  }
  if (fd.family == Family::StationaryBasisMode) {
    if (c.mode < 0) throw UsageError("--mode must be non-negative");
    fd.mode = c.mode;
    config["mode"] = c.mode;
  }
  if (fd.family == Family::StationarySuperposition) {
    if (!c.coefficients) throw UsageError("--coefficients is required for stationary-superposition");
    fd.coefficients = parse_coefficients(*c.coefficients);
    if (!(fd.coefficients.norm() > 0.0)) throw UsageError("coefficients must not all vanish");
    fd.coefficients.normalize();
    config["coefficients"] = coefficients_json(fd.coefficients);
  }
  return fd;
}

std::optional<double> single_bandwidth(const RunConfig& c, const FamilyDescriptor& fd) {
  if (is_unentangled(fd.family)) return c.kappa;
  return c.delta;
}

QuadratureSpec resolve_spec(const RunConfig& c, Json& config) {
  if (!(c.tol > 0.0)) throw UsageError("--tol must be positive");
  QuadratureSpec spec = QuadratureSpec::two_dimensional();
  spec.rel_tol = c.tol;
  config["tol"] = c.tol;
  return spec;
}

std::string resolve_format(const RunConfig& c, const std::string& fallback, bool csv_allowed) {
  const std::string f = c.format.value_or(fallback);
  if (f != "csv" && f != "json") throw UsageError("--format must be csv or json");
  if (f == "csv" && !csv_allowed) throw UsageError("this subcommand writes JSON only");
  return f;
}

std::vector<double> band_grid(double lo, double hi, int steps) {
  if (steps < 1) throw UsageError("--band-steps must be at least 1");
  if (!(lo > 0.0) || !(hi >= lo)) throw UsageError("need 0 < --band-min <= --band-max");
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) out[i] = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
  return out;
}

int run_sweep(const RunConfig& c, Outputs& o, std::ostream& out, bool& partial, fs::path& out_path) {
  const FamilyDescriptor fd = resolve_family(c, o.config);
  std::vector<double> bands;
  const auto single = single_bandwidth(c, fd);
  if (single && !c.band_steps) {
    if (!(*single > 0.0)) throw UsageError("bandwidth must be positive");
    bands = {*single};
    o.config[fd.bandwidth_name()] = *single;
  } else {
    bands = band_grid(c.band_min, c.band_max, c.band_steps.value_or(40));
    o.config["band-min"] = c.band_min;
    o.config["band-max"] = c.band_max;
    o.config["band-steps"] = static_cast<int>(bands.size());
  }
  if (c.theta_steps < 1 || c.phi_steps < 1) throw UsageError("--theta-steps and --phi-steps must be at least 1");
  std::vector<double> thetas(static_cast<std::size_t>(c.theta_steps));
  for (int i = 0; i < c.theta_steps; ++i) thetas[i] = kPi * i / c.theta_steps;
  o.config["theta-steps"] = c.theta_steps;
  o.config["phi-steps"] = c.phi_steps;
  const QuadratureSpec spec = resolve_spec(c, o.config);
  const std::string format = resolve_format(c, "csv", true);
  o.config["format"] = format;
  out_path = c.out.value_or(format == "csv" ? "sweep.csv" : "sweep.json");
  o.config["out"] = out_path.generic_string();
  o.config["workers"] = c.workers;

  const EfficiencySurface s = sweep_surface(fd, bands, thetas, default_phi_grid(c.phi_steps), spec, c.workers);
  std::ostringstream text;
  if (format == "csv") {
    write_surface_csv(text, s);
  } else {
    text << surface_to_json(s).dump(2) << '\n';
  }
  write_file(out_path, text.str());
  record_artifact(o, out_path, "surface");
  if (!s.failures.empty()) {
    partial = true;
    o.artifacts.back()["complete"] = false;
    o.extra["failures"] = s.failures;
    out << "sweep: " << s.failures.size() << " grid points failed; see manifest\n";
    return kFailure;
  }
  out << "wrote " << out_path.generic_string() << '\n';
  return kSuccess;
}

int run_peak(const RunConfig& c, Outputs& o, std::ostream& out, fs::path& out_path) {
  const FamilyDescriptor fd = resolve_family(c, o.config);
  const int steps = c.band_steps.value_or(12);
  band_grid(c.band_min, c.band_max, steps);
  o.config["band-min"] = c.band_min;
  o.config["band-max"] = c.band_max;
  o.config["band-steps"] = steps;
  std::optional<double> fixed;
  if (c.bare) {
    fixed = 0.0;
    o.config["bare"] = true;
  } else if (c.theta) {
    fixed = *c.theta;
    o.config["theta"] = *c.theta;
  }
  const QuadratureSpec spec = resolve_spec(c, o.config);
  resolve_format(c, "json", false);
  out_path = c.out.value_or("peak.json");
  o.config["out"] = out_path.generic_string();

  const PeakResult p = locate_peak(fd, c.band_min, c.band_max, steps, fixed, spec);
  const std::string text = to_json(p, fd).dump(2) + "\n";
  write_file(out_path, text);
  record_artifact(o, out_path, "peak");
  out << text;
  return kSuccess;
}

int run_shape(const RunConfig& c, Outputs& o, std::ostream& out, fs::path& out_path) {
  if (c.basis_n < 0 || c.basis_n % 2 != 0) throw UsageError("--basis-n must be a non-negative even order");
  if (!(c.L > 0.0)) throw UsageError("--L must be positive");
  o.config["basis-n"] = c.basis_n;
  o.config["L"] = c.L;
  const QuadratureSpec spec = resolve_spec(c, o.config);
  resolve_format(c, "json", false);

  // Missing scale or setting: take them from the Gaussian stationary peak.
  double sigma = c.sigma.value_or(0.0);
  MziSetting setting{c.theta.value_or(0.0), c.phi.value_or(0.0)};
  const bool need_setting = !c.bare && !(c.theta && c.phi);
  if (!c.sigma || need_setting) {
    FamilyDescriptor fd;
    fd.family = Family::EntangledGaussianWindowed;
    fd.window = c.L;
    const int steps = c.band_steps.value_or(12);
    band_grid(c.band_min, c.band_max, steps);
    const PeakResult p = locate_peak(fd, c.band_min, c.band_max, steps,
                                     c.bare ? std::optional<double>(0.0) : std::nullopt, spec);
    if (!c.sigma) sigma = 1.0 / p.bandwidth;
    if (need_setting) setting = p.setting;
    o.extra["peak"] = to_json(p, fd);
  }
  if (c.bare) setting = {0.0, 0.0};
  if (!(sigma > 0.0)) throw UsageError("--sigma must be positive");
  o.config["sigma"] = sigma;
  o.config["theta"] = setting.theta;
  o.config["phi"] = setting.phi;
  if (c.bare) o.config["bare"] = true;
  if (c.alternate) o.config["alternate"] = true;
  out_path = c.out.value_or("shape.json");
  o.config["out"] = out_path.generic_string();

  const ShapeProblem problem = optimal_shape(build_r_matrix(c.basis_n, sigma, setting, c.L, spec));
  std::vector<int> Ns;
  for (int n = 0; n <= c.basis_n; n += 2) Ns.push_back(n);
  Json j = to_json(problem);
  j["curve"] = to_json(shape_convergence_curve(problem, Ns));
  if (c.alternate) {
    const AlternationResult a = alternate_shape_and_setting(
        c.basis_n, sigma, setting, c.L, spec, c.bare ? std::optional<double>(0.0) : std::nullopt);
    j["alternation"] = Json{{"setting", to_json(a.setting)},
                            {"eigenvalue", a.problem.eigenvalue},
                            {"coefficients", coefficients_json(a.problem.coefficients)},
                            {"history", a.history},
                            {"rounds", a.rounds},
                            {"converged", a.converged}};
  }
  write_file(out_path, j.dump(2) + "\n");
  record_artifact(o, out_path, "shape");

  const fs::path profile_path = sibling(out_path, "_profile.csv");
  std::ostringstream csv;
  const double tau_max = sigma * (std::sqrt(2.0 * c.basis_n + 1.0) + 5.0);
  write_profile_csv(csv, problem.coefficients, sigma, tau_max, 401);
  write_file(profile_path, csv.str());
  record_artifact(o, profile_path, "profile");

  out << "lambda_max " << format_number(problem.eigenvalue) << " alpha0^2 "
      << format_number(problem.coefficients(0) * problem.coefficients(0)) << '\n';
  out << "wrote " << out_path.generic_string() << " and " << profile_path.generic_string() << '\n';
  return kSuccess;
}

int run_validate(const RunConfig& c, Outputs& o, std::ostream& out, fs::path& out_path) {
  ValidationOptions v;
  v.quick = c.quick;
  v.seed = c.seed;
  v.workers = c.workers;
  v.window = c.L;
  if (!(c.L > 0.0)) throw UsageError("--L must be positive");
  o.config["L"] = c.L;
  o.config["seed"] = c.seed;
  o.config["workers"] = c.workers;
  if (c.quick) o.config["quick"] = true;
  out_path = c.out.value_or("validation.json");
  o.config["out"] = out_path.generic_string();

  const auto results = run_validation(v, [&](const CheckResult& r) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n' << std::flush;
  });
  write_file(out_path, report_json(results).dump(2) + "\n");
  record_artifact(o, out_path, "validation-report");
  const bool ok = std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
  out << (ok ? "all checks passed" : "some checks failed") << '\n';
  return ok ? kSuccess : kFailure;
}

int run_oracle(const RunConfig& c, Outputs& o, std::ostream& out) {
  const Family f = require_family(c);
  const MziSetting s{c.theta.value_or(0.0), c.phi.value_or(0.0)};
  o.config["family"] = std::string(family_name(f));
  double value = 0.0;
  if (f == Family::UnentangledExponential) {
    if (!c.kappa || !(*c.kappa > 0.0)) throw UsageError("--kappa > 0 is required");
    o.config["kappa"] = *c.kappa;
    value = oracle_unentangled_exponential(*c.kappa, s);
  } else if (f == Family::EntangledExponential) {
    if (!c.delta || !(*c.delta > 0.0)) throw UsageError("--delta > 0 is required");
    o.config["delta"] = *c.delta;
    value = oracle_entangled_stationary_exponential(*c.delta, s);
  } else {
    throw UsageError("closed forms exist for unentangled-exp and entangled-exp only");
  }
  o.config["theta"] = s.theta;
  o.config["phi"] = s.phi;
  out << format_number(value) << '\n';
  if (c.out) {
    o.config["out"] = *c.out;
    Json j{{"family", std::string(family_name(f))}, {"setting", to_json(s)}, {"P_S", value}};
    if (c.kappa && f == Family::UnentangledExponential) j["kappa"] = *c.kappa;
    if (c.delta && f == Family::EntangledExponential) j["delta"] = *c.delta;
    write_file(*c.out, j.dump(2) + "\n");
    record_artifact(o, *c.out, "oracle");
  }
  return kSuccess;
}

void add_options(CLI::App& app, RunConfig& c) {
  app.add_option("--family", c.family, "Input family")
      ->check(CLI::IsMember({"unentangled-exp", "unentangled-gauss", "entangled-exp", "entangled-gauss",
                             "entangled-exp-windowed", "stationary-mode", "stationary-superposition"}));
  app.add_option("--kappa", c.kappa, "Unentangled bandwidth, or envelope rate of entangled-exp");
  app.add_option("--delta", c.delta, "Entangled bandwidth");
  app.add_option("--band-min", c.band_min, "Lower end of the bandwidth grid");
  app.add_option("--band-max", c.band_max, "Upper end of the bandwidth grid");
  app.add_option("--band-steps", c.band_steps, "Points in the bandwidth grid");
  app.add_option("--theta-steps", c.theta_steps, "theta grid: i pi / steps");
  app.add_option("--phi-steps", c.phi_steps, "phi grid used for the maximization over phi");
  app.add_option("--theta", c.theta, "MZI theta (radians)");
  app.add_option("--phi", c.phi, "MZI phi (radians)");
  app.add_flag("--bare", c.bare, "No interferometer (theta = 0)");
  app.add_option("--L", c.L, "Window half-length of stationary inputs");
  app.add_option("--basis-n", c.basis_n, "Highest even Hermite order of the shape basis");
  app.add_option("--sigma", c.sigma, "Hermite-Gauss scale");
  app.add_option("--mode", c.mode, "Mode index of stationary-mode");
  app.add_option("--coefficients", c.coefficients, "JSON array (file path or inline) for stationary-superposition");
  app.add_option("--tol", c.tol, "Relative tolerance of the 2D quadrature");
  app.add_option("--out", c.out, "Output artifact path");
  app.add_option("--format", c.format, "csv or json");
  app.add_option("--seed", c.seed, "Seed for the randomized validation checks");
  app.add_option("--workers", c.workers, "Worker threads (0: hardware concurrency)");
  app.add_flag("--quick", c.quick, "validate: reduced grids, skip the peak and shape checks");
  app.add_flag("--alternate", c.alternate, "shape-opt: also alternate shape and setting optimization");
  app.set_config("--config", "", "Flat key=value file; flags override it");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Two-photon splitting with a driven two-level emitter and a Mach-Zehnder interferometer"};
  app.name("photosplit");
  add_options(app, c);
  app.require_subcommand(1);
  for (const char* name : {"sweep", "peak", "shape-opt", "validate", "oracle"}) {
    app.add_subcommand(name)->fallthrough();
  }
  app.get_subcommand("sweep")->description("Efficiency surface over bandwidth and theta");
  app.get_subcommand("peak")->description("Maximum efficiency over bandwidth and setting");
  app.get_subcommand("shape-opt")->description("Optimal Hermite-Gauss pulse shape");
  app.get_subcommand("validate")->description("Run the acceptance checks");
  app.get_subcommand("oracle")->description("Closed-form efficiency of the exponential inputs");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }
  c.subcommand = app.get_subcommands().front()->get_name();

  Outputs o;
  fs::path out_path;
  bool partial = false;
  int code = kFailure;
  try {
    if (c.subcommand == "sweep") {
      code = run_sweep(c, o, out, partial, out_path);
    } else if (c.subcommand == "peak") {
      code = run_peak(c, o, out, out_path);
    } else if (c.subcommand == "shape-opt") {
      code = run_shape(c, o, out, out_path);
    } else if (c.subcommand == "validate") {
      code = run_validate(c, o, out, out_path);
    } else {
      code = run_oracle(c, o, out);
      if (c.out) out_path = *c.out;
    }
  } catch (const std::invalid_argument& e) {
    err << "photosplit: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "photosplit: " << e.what() << '\n';
    code = kFailure;
    partial = true;
  }
  if (!out_path.empty()) {
    try {
      write_manifest(out_path, c.subcommand, o, code, partial);
    } catch (const std::exception& e) {
      err << "photosplit: " << e.what() << '\n';
      return kFailure;
    }
  }
  return code;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace photosplit::cli
