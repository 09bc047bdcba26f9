#include "qtunnel/case.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "qtunnel/errors.hpp"
#include "qtunnel/fields.hpp"
#include "qtunnel/verification.hpp"

namespace qtunnel {
namespace {

constexpr double kPi = std::numbers::pi;

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

/// CSV writer: provenance comment, header row, %.17g cells.
class Csv {
 public:
  Csv(const std::string& kind, const ProblemConfig& cfg, const std::vector<std::string>& columns) {
    out_ << "# qtunnel " << kind << " config_hash=" << cfg.hash_hex() << '\n';
    for (std::size_t j = 0; j < columns.size(); ++j) out_ << (j ? "," : "") << columns[j];
    out_ << '\n';
  }
  void row(const std::vector<double>& cells) {
    for (std::size_t j = 0; j < cells.size(); ++j) out_ << (j ? "," : "") << format_double(cells[j]);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

double safe_div(double v, double scale) { return scale != 0 ? v / scale : 0.0; }

std::vector<std::size_t> thinned(std::size_t n, int max_rows) {
  std::vector<std::size_t> idx;
  if (n == 0) return idx;
  const std::size_t rows = static_cast<std::size_t>(std::max(2, max_rows));
  const std::size_t stride = std::max<std::size_t>(1, (n - 1 + rows - 2) / (rows - 1));
  for (std::size_t j = 0; j < n - 1; j += stride) idx.push_back(j);
  idx.push_back(n - 1);
  return idx;
}

void add(VerificationReport& r, const std::string& name, double value, double limit) {
  r.checks.push_back({name, value, limit, value <= limit});
}

FieldSample<double> periphery_point_sample(const PlaneSolution<double>& sol, double theta) {
  const auto zeta = forward_map(periphery_point(sol.geometry, theta), sol.params);
  return plane_sample(zeta, plane_fields(zeta, sol, FilterMode::Auto), sol.params);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0 ? 0.0 : v);
  return buf;
}

bool VerificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

VerificationReport verification_report(const ProblemConfig& cfg, const PlaneSolution<double>& sol,
                                       const TimeWeights<double>& w) {
  VerificationReport r;
  const auto& g = sol.geometry;
  const auto& m = sol.material;
  const auto& p = sol.params;
  const double gR2 = m.gamma * g.R * g.R;
  const double gH = m.gamma * g.H;

  // mapping
  add(r, "mapping.a_identity_rel", std::abs(p.a - std::sqrt(g.H * g.H - g.R * g.R)) / p.a, 1e-12);
  double round_trip = 0;
  for (int j = 0; j < 100; ++j) {
    const auto zeta = std::polar(p.alpha + (1 - p.alpha) * j / 99.0, 2 * kPi * j / 100 + 0.1);
    round_trip = std::max(round_trip, std::abs(forward_map(backward_map(zeta, p), p) - zeta) / std::abs(zeta));
  }
  add(r, "mapping.round_trip_rel", round_trip, 1e-12);

  // time model
  double monotone = 0;
  for (std::size_t j = 1; j < w.size(); ++j) {
    monotone = std::max(monotone, w.U_vals[j - 1] - w.U_vals[j]);
    monotone = std::max(monotone, w.I_vals[j - 1] - w.I_vals[j]);
  }
  add(r, "time.U_I_nondecreasing", monotone, 0);
  const double u_lo = *std::min_element(w.U_vals.begin(), w.U_vals.end());
  const double u_hi = *std::max_element(w.U_vals.begin(), w.U_vals.end());
  r.checks.push_back({"time.U_in_open_unit_interval", u_hi, 1, u_lo > 0 && u_hi < 1});

  // series
  const auto self_basis = basis_coeffs(m.kappa(), p.theta0, 400);
  double basis_res = 0;
  for (std::complex<double> probe : {std::complex<double>(0, 0), std::complex<double>(0.5 * p.alpha, 0),
                                     std::complex<double>(3, 0)})
    basis_res = std::max(basis_res, product_series_check(self_basis, p.theta0, probe));
  add(r, "series.basis_self_test", basis_res, 1e-10);
  const double E1 = sol.loads.E[-1].real();
  add(r, "series.E_minus1_rel", std::abs(E1 + g.R * g.R / 2) / (g.R * g.R / 2), 1e-6);
  add(r, "series.E_minus1_imag", std::abs(sol.loads.E[-1].imag()), 1e-10 * std::max(1.0, g.R * g.R / 12.5));

  // solver
  const auto& s = sol.series;
  add(r, "solver.iterations", s.Q, 100);
  add(r, "solver.single_valuedness", s.diagnostics.single_valuedness, 1e-8 * gR2);
  add(r, "solver.resultant_identity", std::abs((s.A[-1] - s.B[-1]).real() + gR2 / 2), 1e-6 * gR2);
  add(r, "solver.imag_residue", s.diagnostics.imag_residue, 1e-9);
  {
    const RhSystem<double> system(sol.basis, sol.loads, m, p, sol.truncation);
    OffsetSeries<std::complex<double>> f(-s.N, s.N);
    for (int n = -s.N; n <= s.N; ++n) f.at(n) = s.f[n];
    add(r, "solver.coupled_residual", system.coupled_residual(f), 1e-8 * gR2);
  }

  // resultant
  const auto res = resultant_check(sol);
  add(r, "resultant.virtual_quadrature_rel", res.virtual_rel_error(), 5e-3);
  add(r, "resultant.evaluated_quadrature_rel", res.evaluated_rel_error(), 5e-3);
  add(r, "resultant.ab_vs_gammaE_rel", res.ab_rel_error(), 1e-6);

  // boundary residuals (plane values; time restoration scales both sides equally)
  const auto sr = surface_residual(sol);
  add(r, "fields.free_surface_traction", sr.free_traction, 0.01 * gH);
  add(r, "fields.fixed_surface_displacement", sr.fixed_g, 0.02 * gH * g.R);

  // symmetry on the surface
  {
    const auto xs = linspace(0.05 * g.x0, 10 * g.x0, 100);
    std::vector<double> neg(xs.size());
    std::transform(xs.begin(), xs.end(), neg.begin(), [](double x) { return -x; });
    const auto right = surface_samples(sol, xs, FilterMode::On);
    const auto left = surface_samples(sol, neg, FilterMode::On);
    double worst = 0;
    auto comp = [](const FieldSample<double>& f, int c) {
      switch (c) {
        case 0: return f.sigma_x;
        case 1: return f.sigma_y;
        case 2: return f.tau_xy;
        case 3: return f.u;
        default: return f.v;
      }
    };
    const double parity[5] = {1, 1, -1, -1, 1};
    for (int c = 0; c < 5; ++c) {
      double scale = 0, diff = 0;
      for (std::size_t j = 0; j < xs.size(); ++j) {
        scale = std::max({scale, std::abs(comp(right[j], c)), std::abs(comp(left[j], c))});
        diff = std::max(diff, std::abs(comp(right[j], c) - parity[c] * comp(left[j], c)));
      }
      worst = std::max(worst, safe_div(diff, scale));
    }
    add(r, "fields.surface_symmetry_rel", worst, 1e-8);
  }

  // wall traction at t4
  {
    const std::size_t last = w.size() - 1;
    const double U = w.U_vals[last];
    double worst = 0, trace = 0;
    for (int j = 0; j < 36; ++j) {
      const double theta = 2 * kPi * j / 36;
      const auto plane = periphery_point_sample(sol, theta);
      trace = std::max(trace, safe_div(std::abs(plane.sigma_x + plane.sigma_y - plane.sigma_rho - plane.sigma_theta),
                                       std::abs(plane.sigma_x + plane.sigma_y)));
      const auto total = total_stress(restore_time(plane, w, w.grid[last]), m, p);
      const auto [sr_t, tr_t] = local_polar(total, theta);
      const auto [sR, tR] = traction_oracle(theta, m, g);
      worst = std::max({worst, std::abs(sr_t + (1 - U) * sR), std::abs(tr_t + (1 - U) * tR)});
    }
    add(r, "fields.wall_traction_t4", worst, 0.02 * gH);
    add(r, "fields.trace_invariance_rel", trace, 1e-10);
  }

  auto& j = r.json;
  j["config_hash"] = cfg.hash_hex();
  j["mapping"] = {{"alpha", p.alpha}, {"a", p.a}, {"theta0", p.theta0}};
  j["solver"] = {{"Q", s.Q},
                 {"rcond_inner", s.diagnostics.rcond_inner},
                 {"rcond_outer", s.diagnostics.rcond_outer},
                 {"A_minus1", s.A[-1].real()},
                 {"B_minus1", s.B[-1].real()},
                 {"residual_history", s.residual_history}};
  j["resultant"] = {{"expected", res.expected},
                    {"virtual", res.virtual_force},
                    {"evaluated", res.evaluated_force},
                    {"E_minus1", res.E_minus1}};
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", c.pass}});
  j["checks"] = checks;
  j["all_pass"] = r.all_pass();
  return r;
}

CaseResult run_solve(const ProblemConfig& cfg) {
  CaseResult out{solve_plane(cfg.geometry, cfg.material, cfg.truncation),
                 build_time_weights(cfg.material, cfg.schedule, cfg.geometry.R),
                 {},
                 {}};
  out.report = verification_report(cfg, out.solution, out.weights);
  out.files["report.json"] = out.report.json.dump(2) + "\n";
  return out;
}

CaseResult run_case(const ProblemConfig& cfg) {
  CaseResult out = run_solve(cfg);
  const auto& sol = out.solution;
  const auto& w = out.weights;
  const auto& m = cfg.material;
  const auto& g = cfg.geometry;
  const double stress_scale = m.gamma * g.H;
  const double u0 = m.gamma * g.H * g.R / (2 * m.G_inf);

  const auto xs = linspace(cfg.surface_min(), cfg.surface_max(), cfg.outputs.surface_points);
  const auto surface = surface_samples(sol, xs, FilterMode::On);
  std::vector<FieldSample<double>> wall;
  std::vector<double> wall_theta;
  for (int j = 0; j < cfg.outputs.periphery_points; ++j) {
    wall_theta.push_back(2 * kPi * j / cfg.outputs.periphery_points);
    wall.push_back(periphery_point_sample(sol, wall_theta.back()));
  }

  for (double t : cfg.snapshot_times()) {
    const std::string tag = short_num(t);
    Csv sc("surface t=" + tag, cfg,
           {"x", "sigma_x", "sigma_y", "tau_xy", "u", "v", "sigma_x_norm", "sigma_y_norm", "tau_xy_norm", "u_norm",
            "v_norm"});
    for (const auto& plane : surface) {
      const auto f = total_stress(restore_time(plane, w, t), m, sol.params);
      sc.row({plane.z.real(), f.sigma_x, f.sigma_y, f.tau_xy, f.u, f.v, safe_div(f.sigma_x, stress_scale),
              safe_div(f.sigma_y, stress_scale), safe_div(f.tau_xy, stress_scale), safe_div(f.u, u0),
              safe_div(f.v, u0)});
    }
    out.files["surface_" + tag + ".csv"] = sc.str();

    Csv pc("periphery t=" + tag, cfg,
           {"theta", "x", "y", "sigma_r", "sigma_theta", "tau_rtheta", "sigma_x", "sigma_y", "tau_xy", "u", "v",
            "u_r", "sigma_r_norm", "sigma_theta_norm", "tau_rtheta_norm", "u_r_norm"});
    for (std::size_t j = 0; j < wall.size(); ++j) {
      const double theta = wall_theta[j];
      const auto f = total_stress(restore_time(wall[j], w, t), m, sol.params);
      const auto [sr, tr] = local_polar(f, theta);
      const double st = f.sigma_x + f.sigma_y - sr;
      const double ur = radial_displacement(f, theta);
      pc.row({theta, f.z.real(), f.z.imag(), sr, st, tr, f.sigma_x, f.sigma_y, f.tau_xy, f.u, f.v, ur,
              safe_div(sr, stress_scale), safe_div(st, stress_scale), safe_div(tr, stress_scale), safe_div(ur, u0)});
    }
    out.files["periphery_" + tag + ".csv"] = pc.str();
  }

  const std::pair<const char*, double> points[] = {{"P1", kPi / 2}, {"P2", 3 * kPi / 2}};
  for (const auto& [name, theta] : points) {
    const auto plane = periphery_point_sample(sol, theta);
    Csv hc(std::string("history ") + name, cfg,
           {"t", "face_distance", "U", "I", "sigma_r", "sigma_theta", "tau_rtheta", "u", "v", "u_r", "sigma_r_norm",
            "sigma_theta_norm", "u_r_norm"});
    for (std::size_t j : thinned(w.size(), cfg.outputs.history_rows)) {
      const double t = w.grid[j];
      const auto f = total_stress(restore_time(plane, w, t), m, sol.params);
      const auto [sr, tr] = local_polar(f, theta);
      const double st = f.sigma_x + f.sigma_y - sr;
      const double ur = radial_displacement(f, theta);
      hc.row({t, cfg.schedule.V / g.R * (t - cfg.schedule.t2), w.U_vals[j], w.I_vals[j], sr, st, tr, f.u, f.v, ur,
              safe_div(sr, stress_scale), safe_div(st, stress_scale), safe_div(ur, u0)});
    }
    out.files[std::string("history_") + name + ".csv"] = hc.str();
  }
  return out;
}

ProblemConfig apply_sweep_value(const ProblemConfig& base, const std::string& param, double value) {
  ProblemConfig c = base;
  if (param == "V*") c.schedule.V = value * c.geometry.R;
  else if (param == "G_E*") c.material.G_E = value * c.material.G_inf;
  else if (param == "eta_E") c.material.eta_E = value * 1e3;
  else if (param == "x0*") c.geometry.x0 = value * c.geometry.R;
  else throw ConfigError({"unknown sweep parameter '" + param + "' (expected V*, G_E*, eta_E or x0*)"});
  return c;
}

SweepResult run_sweep(const ProblemConfig& base, const SweepSpec& spec) {
  if (spec.values.empty()) throw ConfigError({"sweep values must be nonempty"});
  apply_sweep_value(base, spec.param, 1.0);  // rejects unknown names up front
  SweepResult out;
  out.param = spec.param;
  const bool surface_sweep = spec.param == "x0*";
  const auto& g = base.geometry;
  const double vault = kPi / 2;

  // Time-type sweeps leave the plane problem untouched, so it is solved once.
  std::optional<PlaneSolution<double>> shared;
  std::optional<FieldSample<double>> vault_plane;

  std::string file_tag = spec.param;
  file_tag.erase(std::remove(file_tag.begin(), file_tag.end(), '*'), file_tag.end());
  Csv csv("sweep " + spec.param, base,
          surface_sweep ? std::vector<std::string>{"value", "x", "sigma_x", "sigma_y", "tau_xy", "u", "v"}
                        : std::vector<std::string>{"value", "t", "face_distance", "U", "I", "u", "v", "u_r", "u_r_norm"});

  for (double value : spec.values) {
    SweepRun run;
    run.value = value;
    try {
      if (!std::isfinite(value)) throw ConfigError({"sweep value is not finite"});
      const ProblemConfig cfg = apply_sweep_value(base, spec.param, value);
      const auto problems = validate(cfg);
      if (!problems.empty()) throw ConfigError(problems);
      const auto w = build_time_weights(cfg.material, cfg.schedule, cfg.geometry.R);
      if (surface_sweep) {
        const auto sol = solve_plane(cfg.geometry, cfg.material, cfg.truncation);
        run.xs = linspace(-8 * g.R, 8 * g.R, 81);
        const double t4 = w.grid.back();
        for (const auto& plane : surface_samples(sol, run.xs, FilterMode::On)) {
          const auto f = restore_time(plane, w, t4);
          run.surface.push_back({f.sigma_x, f.sigma_y, f.tau_xy, f.u, f.v});
          csv.row({value, plane.z.real(), f.sigma_x, f.sigma_y, f.tau_xy, f.u, f.v});
        }
      } else {
        if (!shared) {
          shared = solve_plane(cfg.geometry, cfg.material, cfg.truncation);
          vault_plane = periphery_point_sample(*shared, vault);
        }
        const double u0 = cfg.material.gamma * g.H * g.R / (2 * cfg.material.G_inf);
        run.t = w.grid;
        run.u_r_vault.resize(w.size());
        for (std::size_t j = 0; j < w.size(); ++j)
          run.u_r_vault[j] = radial_displacement(restore_time(*vault_plane, w, w.grid[j]), vault);
        for (std::size_t j : thinned(w.size(), base.outputs.history_rows)) {
          const auto f = restore_time(*vault_plane, w, w.grid[j]);
          csv.row({value, w.grid[j], cfg.schedule.V / g.R * (w.grid[j] - cfg.schedule.t2), w.U_vals[j], w.I_vals[j],
                   f.u, f.v, run.u_r_vault[j], safe_div(run.u_r_vault[j], u0)});
        }
      }
      run.ok = true;
    } catch (const std::exception& e) {
      run.error = e.what();
    }
    out.runs.push_back(std::move(run));
  }
  out.files["sweep_" + file_tag + ".csv"] = csv.str();

  if (surface_sweep) {
    Csv diff("sweep diff " + spec.param, base,
             {"value_a", "value_b", "sigma_x_diff", "sigma_y_diff", "tau_xy_diff", "u_diff", "v_diff",
              "stress_scale", "displacement_scale", "sigma_x_rel", "sigma_y_rel", "tau_xy_rel", "u_rel", "v_rel"});
    const double stress_scale = base.material.gamma * g.H;
    for (std::size_t k = 1; k < out.runs.size(); ++k) {
      const auto& a = out.runs[k - 1];
      const auto& b = out.runs[k];
      if (!a.ok || !b.ok) continue;
      SweepDiff d;
      d.a = a.value;
      d.b = b.value;
      double disp = 0;
      for (std::size_t j = 0; j < a.surface.size(); ++j) {
        for (int c = 0; c < 5; ++c) d.max_diff[c] = std::max(d.max_diff[c], std::abs(a.surface[j][c] - b.surface[j][c]));
        disp = std::max({disp, std::hypot(a.surface[j][3], a.surface[j][4]), std::hypot(b.surface[j][3], b.surface[j][4])});
      }
      for (int c = 0; c < 5; ++c) {
        d.scale[c] = c < 3 ? stress_scale : disp;
        d.rel[c] = safe_div(d.max_diff[c], d.scale[c]);
      }
      diff.row({d.a, d.b, d.max_diff[0], d.max_diff[1], d.max_diff[2], d.max_diff[3], d.max_diff[4], stress_scale,
                disp, d.rel[0], d.rel[1], d.rel[2], d.rel[3], d.rel[4]});
      out.diffs.push_back(d);
    }
    out.files["sweep_" + file_tag + "_diff.csv"] = diff.str();
  }

  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (const auto& r : out.runs)
    if (!r.ok) failures.push_back({{"value", r.value}, {"error", r.error}});
  if (!failures.empty()) out.files["sweep_" + file_tag + "_failures.json"] = failures.dump(2) + "\n";
  return out;
}

void write_bundle(const FileBundle& files, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, content] : files) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << content;
  }
}

}  // namespace qtunnel
