#pragma once

// Scenario orchestration: the full case bundle (surface, periphery and point-history
// CSVs plus a JSON verification report) and one-parameter sweeps.

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "qtunnel/config.hpp"
#include "qtunnel/solver.hpp"
#include "qtunnel/time_model.hpp"

namespace qtunnel {

struct Check {
  std::string name;
  double value;
  double limit;
  bool pass;
};

struct VerificationReport {
  std::vector<Check> checks;
  nlohmann::ordered_json json;
  bool all_pass() const;
};

/// Invariant suite for one solved configuration.
VerificationReport verification_report(const ProblemConfig& cfg, const PlaneSolution<double>& sol,
                                       const TimeWeights<double>& weights);

/// File name -> content. Content is deterministic for a given configuration.
using FileBundle = std::map<std::string, std::string>;

struct CaseResult {
  PlaneSolution<double> solution;
  TimeWeights<double> weights;
  VerificationReport report;
  FileBundle files;
};

/// Solves and emits the bundle. The configuration is not re-validated, so programmatic
/// callers may pass e.g. gamma = 0 for a zero-load run.
CaseResult run_case(const ProblemConfig& cfg);

/// Solve plus report only.
CaseResult run_solve(const ProblemConfig& cfg);

struct SweepSpec {
  std::string param;  ///< "V*", "G_E*", "eta_E" (MPa day) or "x0*"
  std::vector<double> values;
};

/// Applies one sweep value to a copy of the base configuration.
ProblemConfig apply_sweep_value(const ProblemConfig& base, const std::string& param, double value);

struct SweepRun {
  double value = 0;
  bool ok = false;
  std::string error;
  std::vector<double> t;             ///< full time grid (history-type sweeps)
  std::vector<double> u_r_vault;     ///< radial displacement at the vault [m]
  std::vector<double> xs;            ///< surface abscissae (x0* sweep)
  std::vector<std::array<double, 5>> surface;  ///< sigma_x, sigma_y, tau_xy, u, v at t4
};

struct SweepDiff {
  double a = 0, b = 0;
  std::array<double, 5> max_diff{}, scale{}, rel{};
};

struct SweepResult {
  std::string param;
  std::vector<SweepRun> runs;
  std::vector<SweepDiff> diffs;  ///< consecutive pairs, x0* only
  FileBundle files;
};

/// Per-value failures are recorded in the run and the sweep continues.
SweepResult run_sweep(const ProblemConfig& base, const SweepSpec& spec);

void write_bundle(const FileBundle& files, const std::filesystem::path& dir);

/// "%.17g"
std::string format_double(double v);

}  // namespace qtunnel
