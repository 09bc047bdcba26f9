// Command-line front end: solve, case, sweep, verify.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qtunnel/case.hpp"
#include "qtunnel/config.hpp"
#include "qtunnel/errors.hpp"

namespace {

qtunnel::ProblemConfig load(const std::string& path) {
  return path.empty() ? qtunnel::reference_config() : qtunnel::load_config_file(path);
}

void print_checks(const qtunnel::VerificationReport& report) {
  for (const auto& c : report.checks)
    std::printf("%s  %-40s value=%.6g limit=%.6g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.limit);
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw qtunnel::ConfigError({"sweep value '" + item + "' is not a number"});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-dependent shallow tunnelling fields in visco-elastic ground"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = "out";

  auto* solve = app.add_subcommand("solve", "solve and print the verification report (JSON)");
  solve->add_option("-c,--config", config_path, "config file (default: built-in reference case)");

  auto* run = app.add_subcommand("case", "solve and write the full output bundle");
  run->add_option("-c,--config", config_path, "config file (default: built-in reference case)");
  run->add_option("-o,--out", out_dir, "output directory");

  std::string param, values;
  auto* sweep = app.add_subcommand("sweep", "one-parameter sweep");
  sweep->add_option("-c,--config", config_path, "config file (default: built-in reference case)");
  sweep->add_option("-o,--out", out_dir, "output directory");
  sweep->add_option("--param", param, "V*, G_E*, eta_E (MPa*day) or x0*")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();

  auto* verify = app.add_subcommand("verify", "run the invariant suite; nonzero exit on failure");
  verify->add_option("-c,--config", config_path, "config file (default: built-in reference case)");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = load(config_path);
    if (solve->parsed()) {
      const auto result = qtunnel::run_solve(cfg);
      std::cout << result.report.json.dump(2) << '\n';
      return 0;
    }
    if (run->parsed()) {
      const auto start = std::chrono::steady_clock::now();
      const auto result = qtunnel::run_case(cfg);
      qtunnel::write_bundle(result.files, out_dir);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::fprintf(stderr, "wrote %zu files to %s (Q=%d, %.2f s)\n", result.files.size(), out_dir.c_str(),
                   result.solution.series.Q, secs);
      return result.report.all_pass() ? 0 : 1;
    }
    if (sweep->parsed()) {
      const auto result = qtunnel::run_sweep(cfg, {param, parse_values(values)});
      qtunnel::write_bundle(result.files, out_dir);
      int failed = 0;
      for (const auto& r : result.runs)
        if (!r.ok) {
          ++failed;
          std::fprintf(stderr, "value %g failed: %s\n", r.value, r.error.c_str());
        }
      for (const auto& d : result.diffs)
        std::printf("%g vs %g: rel diff sigma_x=%.3g sigma_y=%.3g tau_xy=%.3g u=%.3g v=%.3g\n", d.a, d.b, d.rel[0],
                    d.rel[1], d.rel[2], d.rel[3], d.rel[4]);
      return failed ? 1 : 0;
    }
    if (verify->parsed()) {
      const auto result = qtunnel::run_solve(cfg);
      print_checks(result.report);
      return result.report.all_pass() ? 0 : 1;
    }
  } catch (const qtunnel::SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    for (std::size_t q = 0; q < e.residual_history.size(); ++q)
      std::fprintf(stderr, "  q=%zu max|f|=%.3e\n", q, e.residual_history[q]);
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
