#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "photosplit/cli.hpp"

namespace fs = std::filesystem;
using photosplit::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("photosplit_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("oracle prints the closed form") {
  const Outcome o = call({"oracle", "--family", "unentangled-exp", "--kappa", "2", "--theta", "0", "--phi", "0"});
  CHECK(o.code == 0);
  CHECK(o.out == "0.625\n");
  const Outcome s = call({"oracle", "--family", "entangled-exp", "--delta", "2.73"});
  CHECK(s.code == 0);
  CHECK(std::stod(s.out) == doctest::Approx(0.770).epsilon(1e-3));
}

TEST_CASE("usage errors exit with 2") {
  CHECK(call({}).code == 2);
  CHECK(call({"bogus"}).code == 2);
  CHECK(call({"oracle", "--family", "laser", "--kappa", "1"}).code == 2);
  CHECK(call({"oracle", "--family", "unentangled-exp"}).code == 2);
  CHECK(call({"oracle", "--family", "unentangled-gauss", "--kappa", "1"}).code == 2);
  CHECK(call({"oracle", "--family", "unentangled-exp", "--kappa", "abc"}).code == 2);
  CHECK(call({"oracle", "--family", "unentangled-exp", "--kappa", "-1"}).code == 2);
  CHECK(call({"peak", "--family", "unentangled-exp", "--format", "csv"}).code == 2);
  CHECK(call({"sweep", "--family", "unentangled-exp", "--format", "xml"}).code == 2);
  CHECK(call({"shape-opt", "--basis-n", "3"}).code == 2);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("sweep artifacts are byte-identical and regenerable from the manifest") {
  const fs::path dir = scratch("sweep");
  const std::vector<std::string> args{"sweep", "--family", "unentangled-exp", "--band-min", "0.5", "--band-max", "2",
                                      "--band-steps", "4", "--theta-steps", "6", "--phi-steps", "4",
                                      "--workers", "2"};
  auto with_out = [&](const std::string& name) {
    auto a = args;
    a.push_back("--out");
    a.push_back((dir / name).string());
    return a;
  };
  REQUIRE(call(with_out("a.csv")).code == 0);
  REQUIRE(call(with_out("b.csv")).code == 0);
  const std::string a = slurp(dir / "a.csv");
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(a.rfind("bandwidth,theta,phi_opt,P_S,err\n", 0) == 0);
  int lines = 0;
  for (char ch : a) lines += ch == '\n';
  CHECK(lines == 1 + 4 * 6);

  const auto manifest = nlohmann::ordered_json::parse(slurp(dir / "a.manifest.json"));
  CHECK(manifest["partial"] == false);
  CHECK(manifest["exit_code"] == 0);
  CHECK(manifest["artifacts"][0]["kind"] == "surface");
  auto cmd = manifest["command"].get<std::vector<std::string>>();
  REQUIRE(cmd.size() > 2);
  CHECK(cmd[0] == "photosplit");
  // Rerun the recorded command against a new path.
  std::vector<std::string> again(cmd.begin() + 1, cmd.end());
  for (std::size_t i = 0; i + 1 < again.size(); ++i) {
    if (again[i] == "--out") again[i + 1] = (dir / "c.csv").string();
  }
  REQUIRE(call(again).code == 0);
  CHECK(slurp(dir / "c.csv") == a);

  auto json_args = with_out("d.json");
  json_args.push_back("--format");
  json_args.push_back("json");
  REQUIRE(call(json_args).code == 0);
  const auto j = nlohmann::ordered_json::parse(slurp(dir / "d.json"));
  CHECK(j["family"] == "unentangled-exp");
}

TEST_CASE("config file values yield to flags") {
  const fs::path dir = scratch("config");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "family=unentangled-exp\nkappa=1.0\ntheta=0\n";
  }
  const Outcome from_file = call({"oracle", "--config", (dir / "run.cfg").string()});
  CHECK(from_file.code == 0);
  CHECK(std::stod(from_file.out) == doctest::Approx(112.0 / 180.0).epsilon(1e-12));
  const Outcome overridden = call({"oracle", "--config", (dir / "run.cfg").string(), "--kappa", "2"});
  CHECK(overridden.out == "0.625\n");
}

TEST_CASE("peak writes a JSON record") {
  const fs::path dir = scratch("peak");
  const Outcome o = call({"peak", "--family", "unentangled-exp", "--bare", "--band-min", "1", "--band-max", "2",
                          "--band-steps", "5", "--out", (dir / "peak.json").string()});
  REQUIRE(o.code == 0);
  const auto j = nlohmann::ordered_json::parse(slurp(dir / "peak.json"));
  CHECK(j["P_S"].get<double>() == doctest::Approx(0.641).epsilon(1e-3));
  CHECK(j["params"]["kappa"].get<double>() == doctest::Approx(1.44).epsilon(0.02));
  CHECK(j["theta"] == 0.0);
  CHECK(fs::exists(dir / "peak.manifest.json"));
}

TEST_CASE("shape-opt writes the problem and the profile") {
  const fs::path dir = scratch("shape");
  const Outcome o = call({"shape-opt", "--basis-n", "4", "--sigma", "0.5", "--theta", "0.55", "--phi", "0",
                          "--out", (dir / "shape.json").string()});
  REQUIRE(o.code == 0);
  const auto j = nlohmann::ordered_json::parse(slurp(dir / "shape.json"));
  CHECK(j["basis_size"] == 3);
  CHECK(j["R"].size() == 3);
  CHECK(j["curve"].size() == 3);
  CHECK(j["eigenvalue"].get<double>() <= 1.0 + 1e-3);
  const std::string prof = slurp(dir / "shape_profile.csv");
  CHECK(prof.rfind("tau,amplitude\n", 0) == 0);
  const auto m = nlohmann::ordered_json::parse(slurp(dir / "shape.manifest.json"));
  CHECK(m["artifacts"].size() == 2);
  CHECK(m["config"]["sigma"] == 0.5);
}

TEST_CASE("validate reports consistently with its exit code") {
  const fs::path dir = scratch("validate");
  const Outcome o = call({"validate", "--quick", "--out", (dir / "report.json").string()});
  const auto j = nlohmann::ordered_json::parse(slurp(dir / "report.json"));
  CHECK(o.code == (j["passed"].get<bool>() ? 0 : 1));
  CHECK(j["checks"].size() == 5);
  for (const auto& c : j["checks"]) CHECK(o.out.find(c["name"].get<std::string>()) != std::string::npos);
}

TEST_CASE("installed binary exit codes") {
  const std::string bin = PHOTOSPLIT_BINARY;
  CHECK(std::system((bin + " oracle --family unentangled-exp --kappa 2 > /dev/null").c_str()) == 0);
  const int bad = std::system((bin + " oracle --family nope 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(bad) == 2);
}
