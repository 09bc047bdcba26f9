#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "qtunnel/case.hpp"
#include "qtunnel/config.hpp"
#include "qtunnel/errors.hpp"

using namespace qtunnel;

namespace {

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

std::vector<std::string> failures_of(const std::string& text) {
  try {
    (void)load_config_text(text);
  } catch (const ConfigError& e) {
    return e.failures;
  }
  return {};
}

bool mentions(const std::vector<std::string>& fs, const std::string& what) {
  for (const auto& f : fs)
    if (f.find(what) != std::string::npos) return true;
  return false;
}

ProblemConfig small_case() {
  auto cfg = reference_config();
  cfg.truncation.N = 40;
  cfg.truncation.M = 100;
  cfg.truncation.L_samples = 1024;
  cfg.outputs.surface_points = 21;
  cfg.outputs.periphery_points = 8;
  cfg.outputs.history_rows = 50;
  cfg.outputs.times = {100, 120};
  return cfg;
}

}  // namespace

TEST_CASE("reference document loads with unit conversion and defaults") {
  const auto cfg = reference_config();
  CHECK(cfg.material.kappa() == doctest::Approx(1.8));
  CHECK(FaceLawCoeffs<double>(cfg.material.nu).U0 == doctest::Approx(0.256));
  CHECK(cfg.material.G_inf == 20000);
  CHECK(cfg.material.G_E == 1000);
  CHECK(cfg.material.eta_E == 1e8);
  CHECK(cfg.truncation.N == 200);
  CHECK(cfg.truncation.M == 500);
  CHECK(cfg.truncation.L_samples == 4096);
  CHECK(cfg.truncation.eps == 1e-16);
  CHECK(cfg.schedule.dtau == 0.01);
  CHECK(cfg.snapshot_times() == std::vector<double>{100, 105, 110, 120});
}

TEST_CASE("unit spellings") {
  const auto base = reference_config_text();
  auto a = load_config_text(replace(base, "G_inf = 20 MPa", "G_inf = 20000 kPa"));
  CHECK(a.material.G_inf == 20000);
  auto b = load_config_text(replace(base, "eta_E = 1e5 MPa*day", "eta_E = 1e5 MPa\xc2\xb7" "day"));
  CHECK(b.material.eta_E == 1e8);
  auto c = load_config_text(replace(base, "eta_E = 1e5 MPa*day", "eta_E = 1e8"));
  CHECK(c.material.eta_E == 1e8);
  CHECK(mentions(failures_of(replace(base, "nu = 0.3", "nu = 0.3 MPa")), "material.nu"));
  CHECK(mentions(failures_of(replace(base, "G_E = 1 MPa", "G_E = 1 GPa")), "material.G_E"));
}

TEST_CASE("invalid documents list every failure") {
  const auto base = reference_config_text();
  CHECK(mentions(failures_of(replace(base, "nu = 0.3", "nu = 0.6")), "nu must lie"));
  CHECK(mentions(failures_of(replace(base, "t3 = 110", "t3 = 104")), "t0 < t1 < t2 < t3 < t4"));
  CHECK(mentions(failures_of(replace(base, "H = 10", "H = 5")), "H must exceed R"));

  auto several = replace(base, "nu = 0.3", "nu = 0.6");
  several = replace(several, "R = 5\n", "");
  several = replace(several, "M = 500", "M = 100");
  several += "[outputs]\nbogus = 1\n";
  const auto fs = failures_of(several);
  CHECK(mentions(fs, "missing geometry.R"));
  CHECK(mentions(fs, "nu must lie"));
  CHECK(mentions(fs, "M must exceed N"));
  CHECK(mentions(fs, "unknown key 'bogus'"));
  CHECK_FALSE(mentions(fs, "geometry.R must be > 0"));

  CHECK(mentions(failures_of(base + "[outputs]\ntimes = 100, 105.005\n"), "not on the time grid"));
  CHECK(mentions(failures_of(base + "[schedule]\nV = 3\n"), "duplicate"));
  CHECK(mentions(failures_of("[geometry]\nR = abc\n"), "not a number"));
  CHECK(mentions(failures_of("R = 5\n"), "outside any section"));
}

TEST_CASE("config hash tracks content") {
  const auto a = reference_config();
  const auto b = load_config_text(reference_config_text() + "\n# trailing comment\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash_hex().size() == 16);
  auto c = a;
  c.geometry.x0 = 11;
  CHECK(c.hash() != a.hash());
}

TEST_CASE("config file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "qtunnel_test_config.ini";
  {
    std::ofstream out(path);
    out << reference_config_text();
  }
  CHECK(load_config_file(path.string()).hash() == reference_config().hash());
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config_file("/nonexistent/qtunnel.ini"), ConfigError);
}

TEST_CASE("case bundle is complete and deterministic") {
  const auto cfg = small_case();
  const auto a = run_case(cfg);
  const auto b = run_case(cfg);
  for (const char* name : {"surface_100.csv", "surface_120.csv", "periphery_100.csv", "periphery_120.csv",
                           "history_P1.csv", "history_P2.csv", "report.json"})
    CHECK(a.files.count(name) == 1);
  CHECK(a.files == b.files);
  const auto& hist = a.files.at("history_P1.csv");
  CHECK(hist.rfind("# qtunnel history P1 config_hash=" + cfg.hash_hex(), 0) == 0);
  const auto rows = std::count(hist.begin(), hist.end(), '\n') - 2;
  CHECK(rows <= 50);
  CHECK(rows >= 40);
  CHECK(a.report.json["config_hash"] == cfg.hash_hex());
}

TEST_CASE("zero load gives zero outputs") {
  auto cfg = small_case();
  cfg.material.gamma = 0;
  const auto result = run_case(cfg);
  for (const auto& [name, content] : result.files) {
    if (name.find(".csv") == std::string::npos || name.rfind("history", 0) == 0) continue;
    std::istringstream in(content);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    while (std::getline(in, line)) {
      std::istringstream cells(line);
      std::string cell;
      int col = 0;
      while (std::getline(cells, cell, ',')) {
        // leading coordinate columns are geometry, not results
        const int coords = name.rfind("surface", 0) == 0 ? 1 : 3;
        if (col++ >= coords) CHECK(std::stod(cell) == 0);
      }
    }
  }
}

TEST_CASE("sweeps") {
  const auto cfg = small_case();
  SUBCASE("unknown parameter") { CHECK_THROWS_AS(run_sweep(cfg, {"bogus", {1.0}}), ConfigError); }
  SUBCASE("per-value failures are recorded and the sweep continues") {
    const auto r = run_sweep(cfg, {"G_E*", {0.1, -1.0, 0.5}});
    REQUIRE(r.runs.size() == 3);
    CHECK(r.runs[0].ok);
    CHECK_FALSE(r.runs[1].ok);
    CHECK(r.runs[2].ok);
    CHECK(r.files.count("sweep_G_E_failures.json") == 1);
    CHECK(std::abs(r.runs[2].u_r_vault.back()) < std::abs(r.runs[0].u_r_vault.back()));
  }
  SUBCASE("x0 sweep emits the pairwise table") {
    const auto r = run_sweep(cfg, {"x0*", {2.0, 4.0}});
    CHECK(r.files.count("sweep_x0.csv") == 1);
    CHECK(r.files.count("sweep_x0_diff.csv") == 1);
    REQUIRE(r.diffs.size() == 1);
    CHECK(r.diffs[0].a == 2.0);
  }
}

TEST_CASE("normalised columns use gamma H and u0") {
  const auto cfg = reference_config();
  CHECK(cfg.material.gamma * cfg.geometry.H * cfg.geometry.R / (2 * cfg.material.G_inf) == doctest::Approx(0.025));
}
