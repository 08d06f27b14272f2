#include <doctest.h>

#include <cstdlib>
#include <random>
#include <sstream>

#include "photosplit/serialization.hpp"

using namespace photosplit;

TEST_CASE("numbers round trip") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::pow(10.0, u(rng)) * (i % 2 ? -1.0 : 1.0);
    CHECK(std::strtod(format_number(x).c_str(), nullptr) == x);
  }
  CHECK(format_number(0.625) == "0.625");
  CHECK(format_number(20.0) == "20");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(kInfinity) == "inf");
  CHECK(json_number(std::nan("")).is_null());
  CHECK(json_number(kInfinity).is_null());
  CHECK(json_number(1.5).get<double>() == 1.5);
}

TEST_CASE("efficiency record fields") {
  EfficiencyResult r;
  r.family = Family::EntangledGaussianWindowed;
  r.delta = 1.98;
  r.L = 20.0;
  r.setting = {0.5, 0.0};
  r.P_S = 0.91;
  r.error = 1e-7;
  r.L_delta = 1e-3;
  const Json j = to_json(r);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"family", "params", "theta", "phi", "L", "P_S", "err", "L_delta", "converged"});
  CHECK(j["family"] == "entangled-gauss");
  CHECK(j["params"]["delta"] == 1.98);
  CHECK_FALSE(j["params"].contains("kappa"));

  EfficiencyResult u;
  u.family = Family::UnentangledExponential;
  u.kappa = 2.0;
  const Json ju = to_json(u);
  CHECK(ju["L"].is_null());
  CHECK(ju["L_delta"].is_null());
  CHECK(ju["params"]["kappa"] == 2.0);
}

TEST_CASE("peak and shape records") {
  FamilyDescriptor fd;
  fd.family = Family::EntangledExponential;
  PeakResult p;
  p.bandwidth = 2.73;
  p.P_S = 0.77;
  const Json j = to_json(p, fd);
  CHECK(j["params"]["delta"] == 2.73);
  CHECK(j["params"]["kappa"] == 1e-3);
  CHECK(j.contains("iterations"));

  ShapeProblem s;
  s.N = 2;
  s.R = MatX::Identity(2, 2);
  s.eigenvalue = 1.0;
  s.coefficients = VecX::Unit(2, 0);
  const Json js = to_json(s);
  CHECK(js["basis_size"] == 2);
  CHECK(js["R"].size() == 2);
  CHECK(js["R"][1][1] == 1.0);
  CHECK(js["coefficients"].size() == 2);

  const Json c = to_json(std::vector<ConvergencePoint>{{0, 0.9, 1.0}, {2, 0.91, 0.99}});
  CHECK(c.size() == 2);
  CHECK(c[1]["N"] == 2);
}

TEST_CASE("csv layout") {
  EfficiencySurface s;
  s.family.family = Family::UnentangledExponential;
  s.bandwidths = {1.0, 2.0};
  s.thetas = {0.0};
  s.P_S = MatX::Constant(2, 1, 0.5);
  s.phi_opt = MatX::Zero(2, 1);
  s.error = MatX::Constant(2, 1, 1e-9);
  std::ostringstream out;
  write_surface_csv(out, s);
  CHECK(out.str() == "bandwidth,theta,phi_opt,P_S,err\n1,0,0,0.5,1e-09\n2,0,0,0.5,1e-09\n");
  CHECK(out.str().find('\r') == std::string::npos);

  std::ostringstream prof;
  write_profile_csv(prof, VecX::Unit(1, 0), 1.0, 2.0, 3);
  CHECK(prof.str().rfind("tau,amplitude\n0,", 0) == 0);
  int lines = 0;
  for (char ch : prof.str()) lines += ch == '\n';
  CHECK(lines == 4);
}
