#include "qtunnel/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "qtunnel/errors.hpp"

namespace qtunnel {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

enum class Kind { Length, UnitWeight, Plain, Modulus, Viscosity, Rate, Time, Integer, List };

struct KeySpec {
  Kind kind;
  bool required;
};

const std::map<std::string, std::map<std::string, KeySpec>>& schema() {
  static const std::map<std::string, std::map<std::string, KeySpec>> s{
      {"geometry", {{"R", {Kind::Length, true}}, {"H", {Kind::Length, true}}, {"x0", {Kind::Length, true}}}},
      {"material",
       {{"gamma", {Kind::UnitWeight, true}},
        {"k0", {Kind::Plain, true}},
        {"nu", {Kind::Plain, true}},
        {"G_inf", {Kind::Modulus, true}},
        {"G_E", {Kind::Modulus, true}},
        {"eta_E", {Kind::Viscosity, true}}}},
      {"schedule",
       {{"V", {Kind::Rate, true}},
        {"t0", {Kind::Time, true}},
        {"t1", {Kind::Time, true}},
        {"t2", {Kind::Time, true}},
        {"t3", {Kind::Time, true}},
        {"t4", {Kind::Time, true}},
        {"dtau", {Kind::Time, false}}}},
      {"truncation",
       {{"N", {Kind::Integer, false}},
        {"M", {Kind::Integer, false}},
        {"L_samples", {Kind::Integer, false}},
        {"eps", {Kind::Plain, false}},
        {"max_iterations", {Kind::Integer, false}}}},
      {"outputs",
       {{"times", {Kind::List, false}},
        {"surface_x_min", {Kind::Length, false}},
        {"surface_x_max", {Kind::Length, false}},
        {"surface_points", {Kind::Integer, false}},
        {"periphery_points", {Kind::Integer, false}},
        {"history_rows", {Kind::Integer, false}}}},
  };
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

/// Scale factor into internal units for a unit suffix, nullopt when the suffix is not allowed.
std::optional<double> unit_factor(Kind kind, std::string unit) {
  unit = lower(unit);
  // accept "MPa·day", "MPa*day", "MPa.day", "MPa day"
  for (const std::string dot : {"\xc2\xb7", "*", ".", " "}) {
    const auto pos = unit.find(dot);
    if (pos != std::string::npos) unit = unit.substr(0, pos) + "*" + trim(unit.substr(pos + dot.size()));
  }
  if (unit.empty()) return 1.0;
  switch (kind) {
    case Kind::Length: return unit == "m" ? std::optional(1.0) : std::nullopt;
    case Kind::UnitWeight: return (unit == "kn/m3" || unit == "kn/m^3") ? std::optional(1.0) : std::nullopt;
    case Kind::Modulus:
      if (unit == "kpa") return 1.0;
      if (unit == "mpa") return 1e3;
      return std::nullopt;
    case Kind::Viscosity:
      if (unit == "kpa*day" || unit == "kpa*d") return 1.0;
      if (unit == "mpa*day" || unit == "mpa*d") return 1e3;
      return std::nullopt;
    case Kind::Rate: return unit == "m/day" ? std::optional(1.0) : std::nullopt;
    case Kind::Time: return (unit == "day" || unit == "d") ? std::optional(1.0) : std::nullopt;
    default: return std::nullopt;
  }
}

std::optional<double> parse_number(const std::string& text, Kind kind, std::string& error) {
  const std::string t = trim(text);
  const char* begin = t.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) {
    error = "not a number: '" + t + "'";
    return std::nullopt;
  }
  if (!std::isfinite(v)) {
    error = "non-finite value: '" + t + "'";
    return std::nullopt;
  }
  const std::string unit = trim(std::string(end));
  const auto factor = unit_factor(kind, unit);
  if (!factor) {
    error = "unit '" + unit + "' not accepted here";
    return std::nullopt;
  }
  return v * *factor;
}

struct Parsed {
  std::map<std::string, std::map<std::string, std::string>> values;
  std::vector<std::string> failures;
};

Parsed parse_ini(const std::string& text) {
  Parsed out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        out.failures.push_back(where + "malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!schema().count(section)) out.failures.push_back(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      out.failures.push_back(where + "expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      out.failures.push_back(where + "key '" + key + "' outside any section");
      continue;
    }
    if (!schema().count(section)) continue;
    if (!schema().at(section).count(key)) {
      out.failures.push_back(where + "unknown key '" + key + "' in [" + section + "]");
      continue;
    }
    if (out.values[section].count(key)) {
      out.failures.push_back(where + "duplicate key '" + key + "' in [" + section + "]");
      continue;
    }
    out.values[section][key] = value;
  }
  return out;
}

}  // namespace

std::vector<double> ProblemConfig::snapshot_times() const {
  if (!outputs.times.empty()) return outputs.times;
  return {schedule.t1, schedule.t2, schedule.t3, schedule.t4};
}

double ProblemConfig::surface_min() const {
  return outputs.surface_x_min == outputs.surface_x_max ? -10 * geometry.x0 : outputs.surface_x_min;
}

double ProblemConfig::surface_max() const {
  return outputs.surface_x_min == outputs.surface_x_max ? 10 * geometry.x0 : outputs.surface_x_max;
}

std::string ProblemConfig::canonical() const {
  std::ostringstream os;
  os << "[geometry]\nR=" << fmt(geometry.R) << "\nH=" << fmt(geometry.H) << "\nx0=" << fmt(geometry.x0) << '\n';
  os << "[material]\ngamma=" << fmt(material.gamma) << "\nk0=" << fmt(material.k0) << "\nnu=" << fmt(material.nu)
     << "\nG_inf=" << fmt(material.G_inf) << "\nG_E=" << fmt(material.G_E) << "\neta_E=" << fmt(material.eta_E) << '\n';
  os << "[schedule]\nV=" << fmt(schedule.V) << "\nt0=" << fmt(schedule.t0) << "\nt1=" << fmt(schedule.t1)
     << "\nt2=" << fmt(schedule.t2) << "\nt3=" << fmt(schedule.t3) << "\nt4=" << fmt(schedule.t4)
     << "\ndtau=" << fmt(schedule.dtau) << '\n';
  os << "[truncation]\nN=" << truncation.N << "\nM=" << truncation.M << "\nL_samples=" << truncation.L_samples
     << "\neps=" << fmt(truncation.eps) << "\nmax_iterations=" << truncation.max_iterations << '\n';
  os << "[outputs]\ntimes=";
  const auto ts = snapshot_times();
  for (std::size_t j = 0; j < ts.size(); ++j) os << (j ? "," : "") << fmt(ts[j]);
  os << "\nsurface_x_min=" << fmt(surface_min()) << "\nsurface_x_max=" << fmt(surface_max())
     << "\nsurface_points=" << outputs.surface_points << "\nperiphery_points=" << outputs.periphery_points
     << "\nhistory_rows=" << outputs.history_rows << '\n';
  return os.str();
}

std::uint64_t ProblemConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string ProblemConfig::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

std::vector<std::string> validate(const ProblemConfig& c) {
  std::vector<std::string> f;
  const auto& g = c.geometry;
  const auto& m = c.material;
  const auto& s = c.schedule;
  const auto& t = c.truncation;
  if (!(g.R > 0)) f.push_back("geometry.R must be > 0");
  if (!(g.H > g.R)) f.push_back("geometry.H must exceed R (tunnel strictly below the surface)");
  if (!(g.x0 > 0)) f.push_back("geometry.x0 must be > 0");
  if (!(m.gamma > 0)) f.push_back("material.gamma must be > 0");
  if (!(m.k0 > 0)) f.push_back("material.k0 must be > 0");
  if (!(m.nu > 0 && m.nu < 0.5)) f.push_back("material.nu must lie in (0, 0.5)");
  if (!(m.G_inf > 0)) f.push_back("material.G_inf must be > 0");
  if (!(m.G_E >= 0)) f.push_back("material.G_E must be >= 0");
  if (!(m.eta_E > 0)) f.push_back("material.eta_E must be > 0");
  if (!(s.V > 0)) f.push_back("schedule.V must be > 0");
  if (!(s.t0 < s.t1 && s.t1 < s.t2 && s.t2 < s.t3 && s.t3 < s.t4))
    f.push_back("schedule times must satisfy t0 < t1 < t2 < t3 < t4");
  if (!(s.dtau > 0)) f.push_back("schedule.dtau must be > 0");
  else if (s.t4 > s.t1 && !(s.dtau <= (s.t4 - s.t1) / 100)) f.push_back("schedule.dtau must be <= (t4 - t1)/100");
  if (!(t.N >= 1)) f.push_back("truncation.N must be >= 1");
  if (!(t.M > t.N)) f.push_back("truncation.M must exceed N");
  if (!(t.L_samples >= 2 * (2 * t.M + 1))) f.push_back("truncation.L_samples must be >= 2(2M+1)");
  if (!(t.eps > 0)) f.push_back("truncation.eps must be > 0");
  if (!(t.max_iterations >= 1)) f.push_back("truncation.max_iterations must be >= 1");
  const auto& o = c.outputs;
  if (o.surface_points < 2) f.push_back("outputs.surface_points must be >= 2");
  if (o.periphery_points < 4) f.push_back("outputs.periphery_points must be >= 4");
  if (o.history_rows < 2) f.push_back("outputs.history_rows must be >= 2");
  const bool explicit_range = o.surface_x_min != o.surface_x_max;
  if ((explicit_range || g.x0 > 0) && c.surface_min() >= c.surface_max())
    f.push_back("outputs.surface_x_min must be < surface_x_max");
  if (s.t4 > s.t1 && s.dtau > 0) {
    const auto n = detail::step_count(s.t4 - s.t1, s.dtau);
    const double h = (s.t4 - s.t1) / static_cast<double>(n);
    for (double tt : c.snapshot_times()) {
      const double pos = (tt - s.t1) / h;
      if (tt < s.t1 || tt > s.t4 || std::abs(pos - std::round(pos)) > 1e-6)
        f.push_back("outputs.times: " + fmt(tt) + " is not on the time grid of [t1, t4]");
    }
  }
  return f;
}

ProblemConfig load_config_text(const std::string& text) {
  Parsed p = parse_ini(text);
  std::vector<std::string> failures = p.failures;
  ProblemConfig c;

  std::set<std::string> bad;
  std::map<std::string, double> num;
  std::map<std::string, std::vector<double>> lists;
  for (const auto& [section, keys] : schema()) {
    for (const auto& [key, spec] : keys) {
      const std::string name = section + "." + key;
      const auto sit = p.values.find(section);
      if (sit == p.values.end() || !sit->second.count(key)) {
        if (spec.required) {
          failures.push_back("missing " + name);
          bad.insert(name);
        }
        continue;
      }
      const std::string& raw = sit->second.at(key);
      std::string err;
      if (spec.kind == Kind::List) {
        std::vector<double> vals;
        std::stringstream ss(raw);
        std::string item;
        while (std::getline(ss, item, ',')) {
          const auto v = parse_number(item, Kind::Time, err);
          if (!v) {
            failures.push_back(name + ": " + err);
            bad.insert(name);
            break;
          }
          vals.push_back(*v);
        }
        lists[name] = vals;
        continue;
      }
      const auto v = parse_number(raw, spec.kind == Kind::Integer ? Kind::Plain : spec.kind, err);
      if (!v) {
        failures.push_back(name + ": " + err);
        bad.insert(name);
        continue;
      }
      if (spec.kind == Kind::Integer && (*v != std::floor(*v) || std::abs(*v) > 1e9)) {
        failures.push_back(name + ": expected an integer");
        bad.insert(name);
        continue;
      }
      num[name] = *v;
    }
  }
  auto get = [&](const std::string& k, double fallback) { return num.count(k) ? num[k] : fallback; };
  auto get_int = [&](const std::string& k, int fallback) { return num.count(k) ? static_cast<int>(num[k]) : fallback; };

  c.geometry = {get("geometry.R", 0), get("geometry.H", 0), get("geometry.x0", 0)};
  c.material = {get("material.gamma", 0), get("material.k0", 0),    get("material.nu", 0),
                get("material.G_inf", 0), get("material.G_E", -1), get("material.eta_E", 0)};
  c.schedule = {get("schedule.V", 0),  get("schedule.t0", 0), get("schedule.t1", 0), get("schedule.t2", 0),
                get("schedule.t3", 0), get("schedule.t4", 0), get("schedule.dtau", 0.01)};
  c.truncation.N = get_int("truncation.N", 200);
  c.truncation.M = get_int("truncation.M", 500);
  c.truncation.L_samples = get_int("truncation.L_samples", std::max(4096, 2 * (2 * c.truncation.M + 1)));
  c.truncation.eps = get("truncation.eps", 1e-16);
  c.truncation.max_iterations = get_int("truncation.max_iterations", 500);
  if (lists.count("outputs.times")) c.outputs.times = lists["outputs.times"];
  c.outputs.surface_x_min = get("outputs.surface_x_min", 0);
  c.outputs.surface_x_max = get("outputs.surface_x_max", 0);
  c.outputs.surface_points = get_int("outputs.surface_points", c.outputs.surface_points);
  c.outputs.periphery_points = get_int("outputs.periphery_points", c.outputs.periphery_points);
  c.outputs.history_rows = get_int("outputs.history_rows", c.outputs.history_rows);

  // A key that failed to parse would only repeat its parse error as a range error.
  for (const auto& msg : validate(c)) {
    const bool repeat = std::any_of(bad.begin(), bad.end(), [&](const std::string& name) {
      return msg.rfind(name + " ", 0) == 0;
    });
    if (!repeat) failures.push_back(msg);
  }
  if (!failures.empty()) throw ConfigError(failures);
  return c;
}

ProblemConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str());
}

std::string reference_config_text() {
  return R"([geometry]
R = 5
H = 10
x0 = 10

[material]
gamma = 20
k0 = 0.8
nu = 0.3
G_inf = 20 MPa
G_E = 1 MPa
eta_E = 1e5 MPa*day

[schedule]
V = 2
t0 = 0
t1 = 100
t2 = 105
t3 = 110
t4 = 120
dtau = 0.01

[truncation]
N = 200
M = 500
eps = 1e-16
)";
}

ProblemConfig reference_config() { return load_config_text(reference_config_text()); }

}  // namespace qtunnel
