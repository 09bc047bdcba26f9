#pragma once

// Problem configuration: a small INI dialect with sections [geometry], [material],
// [schedule], [truncation] and [outputs]. Moduli accept "MPa"/"kPa" suffixes and
// viscosity "MPa*day"/"kPa*day"; everything is stored in kPa, kN, m, day.

#include <cstdint>
#include <string>
#include <vector>

#include "qtunnel/geometry.hpp"
#include "qtunnel/series.hpp"
#include "qtunnel/time_model.hpp"

namespace qtunnel {

struct OutputSpec {
  std::vector<double> times;  ///< snapshot times [day]; empty means t1, t2, t3, t4
  double surface_x_min = 0;   ///< 0/0 range means [-10 x0, 10 x0]
  double surface_x_max = 0;
  int surface_points = 401;
  int periphery_points = 72;
  int history_rows = 2000;
};

struct ProblemConfig {
  TunnelGeometry<double> geometry{};
  MaterialParams<double> material{};
  ExcavationSchedule<double> schedule{};
  TruncationConfig<double> truncation{};
  OutputSpec outputs{};

  /// Normalised text of every field, the input to hash().
  std::string canonical() const;
  std::uint64_t hash() const;
  std::string hash_hex() const;

  /// Snapshot times after defaults are applied.
  std::vector<double> snapshot_times() const;
  double surface_min() const;
  double surface_max() const;
};

/// Every invariant breach, empty when valid.
std::vector<std::string> validate(const ProblemConfig& cfg);

/// Parses, fills defaults and validates; throws ConfigError listing every problem.
ProblemConfig load_config_text(const std::string& text);
ProblemConfig load_config_file(const std::string& path);

/// The reference case: R = 5 m, H = 10 m, x0 = 10 m, V = 2 m/day, t = 0/100/105/110/120 day.
std::string reference_config_text();
ProblemConfig reference_config();

}  // namespace qtunnel
