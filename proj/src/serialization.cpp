#include "photosplit/serialization.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace photosplit {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

Json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

Json to_json(const MziSetting& setting) { return Json{{"theta", setting.theta}, {"phi", setting.phi}}; }

namespace {

Json params_json(Family family, double kappa, double delta) {
  Json p = Json::object();
  if (is_unentangled(family) || family == Family::EntangledExponential) p["kappa"] = kappa;
  if (!is_unentangled(family)) p["delta"] = delta;
  return p;
}

}  // namespace

Json to_json(const EfficiencyResult& r) {
  Json j;
  j["family"] = std::string(family_name(r.family));
  j["params"] = params_json(r.family, r.kappa, r.delta);
  j["theta"] = r.setting.theta;
  j["phi"] = r.setting.phi;
  j["L"] = json_number(r.L);
  j["P_S"] = r.P_S;
  j["err"] = r.error;
  j["L_delta"] = json_number(r.L_delta);
  j["converged"] = r.converged;
  return j;
}

Json to_json(const PeakResult& peak, const FamilyDescriptor& family) {
  Json j;
  j["family"] = std::string(family_name(family.family));
  Json p = Json::object();
  p[family.bandwidth_name()] = peak.bandwidth;
  if (family.family == Family::EntangledExponential) p["kappa"] = family.envelope_kappa;
  j["params"] = p;
  j["theta"] = peak.setting.theta;
  j["phi"] = peak.setting.phi;
  j["L"] = is_stationary(family.family) ? json_number(family.window) : Json(nullptr);
  j["P_S"] = peak.P_S;
  j["err"] = peak.error;
  j["L_delta"] = json_number(peak.L_delta);
  j["iterations"] = peak.iterations;
  j["converged"] = peak.converged;
  return j;
}

Json to_json(const ShapeProblem& p) {
  Json j;
  j["N"] = p.N;
  j["basis_size"] = p.basis_size();
  j["sigma"] = p.sigma;
  j["setting"] = to_json(p.setting);
  j["L"] = json_number(p.L);
  Json rows = Json::array();
  for (Index r = 0; r < p.R.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < p.R.cols(); ++c) row.push_back(p.R(r, c));
    rows.push_back(std::move(row));
  }
  j["R"] = std::move(rows);
  j["err"] = p.error;
  j["eigenvalue"] = json_number(p.eigenvalue);
  Json coeffs = Json::array();
  for (Index i = 0; i < p.coefficients.size(); ++i) coeffs.push_back(p.coefficients(i));
  j["coefficients"] = std::move(coeffs);
  return j;
}

Json to_json(const std::vector<ConvergencePoint>& curve) {
  Json a = Json::array();
  for (const auto& c : curve) {
    a.push_back(Json{{"N", c.N}, {"basis_size", c.N / 2 + 1}, {"eigenvalue", c.eigenvalue},
                     {"alpha0_squared", c.alpha0_squared}});
  }
  return a;
}

void write_surface_csv(std::ostream& out, const EfficiencySurface& s) {
  out << "bandwidth,theta,phi_opt,P_S,err\n";
  for (std::size_t i = 0; i < s.bandwidths.size(); ++i) {
    for (std::size_t j = 0; j < s.thetas.size(); ++j) {
      const Index r = static_cast<Index>(i);
      const Index c = static_cast<Index>(j);
      out << format_number(s.bandwidths[i]) << ',' << format_number(s.thetas[j]) << ','
          << format_number(s.phi_opt(r, c)) << ',' << format_number(s.P_S(r, c)) << ','
          << format_number(s.error(r, c)) << '\n';
    }
  }
}

Json surface_to_json(const EfficiencySurface& s) {
  Json j;
  j["family"] = std::string(family_name(s.family.family));
  j["bandwidth_name"] = s.family.bandwidth_name();
  Json rows = Json::array();
  for (std::size_t i = 0; i < s.bandwidths.size(); ++i) {
    for (std::size_t k = 0; k < s.thetas.size(); ++k) {
      const Index r = static_cast<Index>(i);
      const Index c = static_cast<Index>(k);
      rows.push_back(Json{{"bandwidth", s.bandwidths[i]},
                          {"theta", s.thetas[k]},
                          {"phi_opt", json_number(s.phi_opt(r, c))},
                          {"P_S", json_number(s.P_S(r, c))},
                          {"err", json_number(s.error(r, c))}});
    }
  }
  j["points"] = std::move(rows);
  j["failures"] = s.failures;
  return j;
}

void write_profile_csv(std::ostream& out, const VecX& alpha, double sigma, double tau_max, int samples) {
  out << "tau,amplitude\n";
  for (int i = 0; i < samples; ++i) {
    const double tau = tau_max * i / std::max(1, samples - 1);
    out << format_number(tau) << ',' << format_number(shaped_profile(alpha, sigma, tau)) << '\n';
  }
}

}  // namespace photosplit
