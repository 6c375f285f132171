#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../tools/cli.hpp"
#include "doctest.h"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "sscat");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = sscat::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch() {
  const fs::path d = fs::temp_directory_path() / ("sscat_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("reflect methods") {
  Run r = run({"reflect", "--family", "sech2", "--delta", "0.5", "--eps", "0.5", "--method", "exact"});
  REQUIRE(r.code == sscat::cli::kOk);
  json j = json::parse(r.out);
  CHECK(j["method"] == "exact");
  CHECK(j["status"] == "OK");
  CHECK(j["R"].get<double>() == doctest::Approx(0.014008276175006746405).epsilon(1e-6));

  for (const char* m : {"closed-form", "born", "wkb"}) {
    r = run({"reflect", "--family", "fermi", "--delta", "0.3", "--eps", "0.7", "--method", m});
    CHECK(r.code == 0);
    j = json::parse(r.out);
    CHECK(j["method"] == m);
    CHECK(j.contains("status"));
    CHECK(j["R"].get<double>() > 0.0);
  }
  r = run({"reflect", "--family", "gauss", "--delta", "0.2", "--eps", "0.8", "--backend", "tm", "--incidence", "right"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["backend"] == "tm");
}

TEST_CASE("exit codes") {
  Run r = run({"reflect", "--family", "fermi", "--delta", "1.2", "--eps", "1"});
  CHECK(r.code == sscat::cli::kDomain);
  CHECK(r.err.find("above-barrier only") != std::string::npos);
  CHECK(run({"reflect", "--family", "fermi", "--delta", "0.2", "--eps", "-1"}).code == sscat::cli::kDomain);
  // below the certified floor
  CHECK(run({"reflect", "--family", "sech2", "--delta", "0.1", "--eps", "0.05", "--backend", "tm"}).code ==
        sscat::cli::kNumeric);
  // first-order Born term underflows
  CHECK(run({"reflect", "--family", "gauss", "--delta", "0.01", "--eps", "0.02", "--method", "born"}).code ==
        sscat::cli::kNumeric);
  CHECK(run({"reflect", "--family", "fermi", "--delta", "0.2", "--bogus"}).code == sscat::cli::kUsage);
  CHECK(run({}).code == sscat::cli::kUsage);
  CHECK(run({"reflect", "--family", "lorentz", "--delta", "0.2"}).code == sscat::cli::kUsage);
  CHECK(run({"reflect", "--family", "fermi", "--delta", "0.2", "--method", "magic"}).code == sscat::cli::kUsage);
  CHECK(run({"reflect", "--family", "tabulated", "--delta", "0.2"}).code == sscat::cli::kUsage);
  CHECK(run({"localize", "--delta", "0.1", "--L0", "100", "--n", "1"}).code == sscat::cli::kUsage);

  Run h = run({"--help"});
  CHECK(h.code == sscat::cli::kOk);
  CHECK(h.out.find("Exit codes") != std::string::npos);
  CHECK(h.out.find("delta,eps,R_exact,R_born,R_wkb,S,regime") != std::string::npos);
}

TEST_CASE("tabulated input, shape dump and the wkb restriction") {
  const fs::path d = scratch();
  const fs::path shape = d / "shape.csv";
  Run r = run({"reflect", "--family", "gauss", "--delta", "0.5", "--eps", "1", "--dump-shape", shape.string(),
               "--z-min", "-10", "--z-max", "10", "--points", "2001"});
  REQUIRE(r.code == 0);
  CHECK(slurp(shape).rfind("z,U\n", 0) == 0);
  r = run({"reflect", "--family", "tabulated", "--input", shape.string(), "--delta", "0.5"});
  REQUIRE(r.code == 0);
  // frozen ODE value for the analytic bump
  CHECK(json::parse(r.out)["R"].get<double>() == doctest::Approx(0.05520573620496394).epsilon(1e-3));
  r = run({"reflect", "--family", "tabulated", "--input", shape.string(), "--delta", "0.5", "--method", "wkb"});
  CHECK(r.code == sscat::cli::kUsage);
  fs::remove_all(d);
}

TEST_CASE("turning points") {
  Run r = run({"turning-points", "--family", "sech2", "--delta", "0.3", "--eps", "0.5"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["method"] == "wkb");
  CHECK(j["status"] == "OK");
  REQUIRE(j["turning_points"].size() == 2);
  CHECK(j["turning_points"][0]["gamma"].get<double>() == doctest::Approx(1.4208714907261503059).epsilon(1e-10));
  CHECK(run({"turning-points", "--family", "gauss", "--delta", "0.3", "--eps", "0.5", "--seed-grid"}).code == 0);
}

TEST_CASE("validate tables") {
  for (const char* f : {"fermi", "sech2", "gauss"}) {
    const Run r = run({"validate", "--family", f});
    CHECK(r.code == 0);
    CHECK(r.out.find("all checks passed") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
  }
}

TEST_CASE("config file") {
  const fs::path d = scratch();
  const fs::path cfg = d / "run.ini";
  std::ofstream(cfg) << "[reflect]\nfamily = \"sech2\"\ndelta = 0.5\neps = 0.5\nmethod = \"closed-form\"\n";
  const Run r = run({"--config", cfg.string(), "reflect"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["method"] == "closed-form");
  CHECK(j["R"].get<double>() == doctest::Approx(0.014008276175006746405).epsilon(1e-12));
  fs::remove_all(d);
}

TEST_CASE("byte-identical outputs") {
  const fs::path d = scratch();
  auto sweep = [&](const std::string& tag, const char* threads) {
    return run({"--threads", threads, "sweep", "--family", "fermi", "--eps-min", "0.1", "--eps-max", "0.5", "--eps-n",
                "4", "--delta-n", "12", "--out", (d / ("cells" + tag)).string(), "--line",
                (d / ("line" + tag)).string()});
  };
  const Run a = sweep("a", "1"), b = sweep("b", "4");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);
  CHECK(slurp(d / "cellsa") == slurp(d / "cellsb"));
  CHECK(slurp(d / "linea") == slurp(d / "lineb"));
  CHECK(json::parse(a.out)["method"] == "sweep");

  auto loc = [&](const std::string& tag, const char* threads) {
    return run({"--threads", threads, "--out", (d / ("est" + tag)).string(), "localize", "--eps", "1", "--delta", "0.1",
                "--L0", "300", "--n", "6", "--seed", "17", "--lnT-csv", (d / ("lnT" + tag)).string()});
  };
  REQUIRE(loc("a", "1").code == 0);
  REQUIRE(loc("b", "3").code == 0);
  CHECK(slurp(d / "esta") == slurp(d / "estb"));
  CHECK(slurp(d / "lnTa") == slurp(d / "lnTb"));
  const json e = json::parse(slurp(d / "esta"));
  CHECK(e["method"] == "ensemble");
  CHECK(e["lloc_inv"].get<double>() > 0.0);
  fs::remove_all(d);
}

TEST_CASE("localize methods") {
  Run r = run({"localize", "--method", "born", "--eps", "1", "--delta", "0.05"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["lloc_inv"].get<double>() ==
        doctest::Approx(0.0025 * 0.65204933217329218306 / 4.0).epsilon(1e-12));
  r = run({"localize", "--method", "wkb-hist", "--eps", "0.5", "--delta", "0.8", "--L0", "100", "--n", "2",
           "--bins", "8"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["up_to_constant"] == true);
  CHECK(j["density"].size() == 8);
  CHECK(run({"localize", "--method", "born", "--eps", "1", "--delta", "1.5"}).code == sscat::cli::kDomain);
  CHECK(run({"localize", "--correlation", "exponential", "--delta", "0.1", "--L0", "100", "--n", "2"}).code ==
        sscat::cli::kUsage);
}
