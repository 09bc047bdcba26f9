#pragma once

// Independent checks: the static periphery traction in closed form, resultant
// equilibrium, boundary residuals on the ground surface, and the growth of the
// classical logarithmic displacement term against the present solution.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "qtunnel/errors.hpp"
#include "qtunnel/fields.hpp"
#include "qtunnel/geometry.hpp"
#include "qtunnel/solver.hpp"
#include "qtunnel/time_model.hpp"

namespace qtunnel {

/// Static radial and tangential traction on the tunnel periphery at local angle theta,
/// compression positive: (sigma_R, tau_R) [kPa].
template <class Scalar>
std::pair<Scalar, Scalar> traction_oracle(Scalar theta, const MaterialParams<Scalar>& mat,
                                          const TunnelGeometry<Scalar>& geom) {
  const Scalar depth = mat.gamma * (geom.H - geom.R * std::sin(theta));
  const Scalar sR = depth * ((1 + mat.k0) / 2 - (1 - mat.k0) / 2 * std::cos(2 * theta));
  const Scalar tR = depth * (1 - mat.k0) / 2 * std::sin(2 * theta);
  return {sR, tR};
}

/// Same traction by rotating the rectangular geostatic field into local polar components
/// (sign flipped to compression positive).
template <class Scalar>
std::pair<Scalar, Scalar> traction_by_rotation(Scalar theta, const MaterialParams<Scalar>& mat,
                                               const TunnelGeometry<Scalar>& geom) {
  const Scalar y = periphery_point(geom, theta).imag();
  const Scalar sx = mat.k0 * mat.gamma * y, sy = mat.gamma * y;
  const Scalar srr = (sx + sy) / 2 + (sx - sy) / 2 * std::cos(2 * theta);
  const Scalar trt = -(sx - sy) / 2 * std::sin(2 * theta);
  return {-srr, -trt};
}

/// Excavation (virtual) traction at release fraction U: -U times the static oracle.
template <class Scalar>
std::pair<Scalar, Scalar> virtual_traction(Scalar theta, Scalar U, const MaterialParams<Scalar>& mat,
                                           const TunnelGeometry<Scalar>& geom) {
  const auto [sR, tR] = traction_oracle(theta, mat, geom);
  return {-U * sR, -U * tR};
}

/// Local polar components (sigma_r, tau_rtheta) about the tunnel centre, tension positive.
template <class Scalar>
std::pair<Scalar, Scalar> local_polar(const FieldSample<Scalar>& s, Scalar theta) {
  const Scalar c = std::cos(2 * theta), sn = std::sin(2 * theta);
  const Scalar sr = (s.sigma_x + s.sigma_y) / 2 + (s.sigma_x - s.sigma_y) / 2 * c + s.tau_xy * sn;
  const Scalar tr = -(s.sigma_x - s.sigma_y) / 2 * sn + s.tau_xy * c;
  return {sr, tr};
}

/// Plane-strain samples on the tunnel periphery at local angles theta_j = 2 pi j / count.
template <class Scalar>
std::vector<FieldSample<Scalar>> periphery_samples(const PlaneSolution<Scalar>& sol, int count, FilterMode mode) {
  const RingExpansion<Scalar> ring(sol, sol.params.alpha, mode);
  std::vector<FieldSample<Scalar>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) {
    const Scalar theta = 2 * std::numbers::pi_v<Scalar> * j / count;
    const auto zeta = forward_map(periphery_point(sol.geometry, theta), sol.params);
    out.push_back(plane_sample(zeta, ring.at(std::arg(zeta)), sol.params));
  }
  return out;
}

template <class Scalar = double>
struct ResultantReport {
  Scalar expected;            ///< gamma pi R^2 [kN/m]
  Scalar virtual_force;       ///< quadrature of the excavation traction at U = 1
  Scalar evaluated_force;     ///< quadrature of the evaluated wall traction at U = 1
  Scalar E_minus1;            ///< Re E_{-1} [m^2]
  Scalar E_minus1_expected;   ///< -R^2/2
  Scalar ab_difference;       ///< Re(A_{-1} - B_{-1})
  Scalar ab_expected;         ///< gamma E_{-1}

  static Scalar rel(Scalar got, Scalar want) {
    return want == Scalar(0) ? std::abs(got) : std::abs(got - want) / std::abs(want);
  }
  Scalar virtual_rel_error() const { return rel(virtual_force, expected); }
  Scalar evaluated_rel_error() const { return rel(evaluated_force, expected); }
  Scalar E_rel_error() const { return rel(E_minus1, E_minus1_expected); }
  Scalar ab_rel_error() const { return rel(ab_difference, ab_expected); }
};

/// Vertical resultant on the ground side of the tunnel wall, trapezoid over `count` angles.
template <class Scalar>
ResultantReport<Scalar> resultant_check(const PlaneSolution<Scalar>& sol, int count = 2000) {
  using C = std::complex<Scalar>;
  const auto& g = sol.geometry;
  const auto& mat = sol.material;
  const Scalar dtheta = 2 * std::numbers::pi_v<Scalar> / count;
  C virt(0), eval(0);
  const auto samples = periphery_samples(sol, count, FilterMode::Off);
  for (int j = 0; j < count; ++j) {
    const Scalar theta = dtheta * j;
    const C radial = std::polar(Scalar(1), theta);
    // traction on the ground, whose outward normal at the wall points to the tunnel centre
    const auto [vs, vt] = virtual_traction(theta, Scalar(1), mat, g);
    virt += C(vs, vt) * radial;
    const auto [sr, tr] = local_polar(samples[static_cast<std::size_t>(j)], theta);
    eval -= C(sr, tr) * radial;
  }
  ResultantReport<Scalar> r;
  r.expected = mat.gamma * std::numbers::pi_v<Scalar> * g.R * g.R;
  r.virtual_force = virt.imag() * g.R * dtheta;
  r.evaluated_force = eval.imag() * g.R * dtheta;
  r.E_minus1 = sol.loads.E[-1].real();
  r.E_minus1_expected = -g.R * g.R / 2;
  r.ab_difference = (sol.series.A[-1] - sol.series.B[-1]).real();
  r.ab_expected = mat.gamma * r.E_minus1;
  return r;
}

template <class Scalar = double>
struct SingularityRow {
  Scalar radius;       ///< |z| along the ray z = -i |z| [m]
  Scalar traditional;  ///< |logarithmic part of the classical displacement| (U = 1, unit weight)
  Scalar present;      ///< |g| of the present solution at the same point
};

/// Logarithmic part of the classical-potential displacement with the branch point at the tunnel centre.
template <class Scalar>
std::complex<Scalar> traditional_log_part(std::complex<Scalar> z, const MaterialParams<Scalar>& mat,
                                          const TunnelGeometry<Scalar>& geom) {
  using C = std::complex<Scalar>;
  const C zc_bar(0, geom.H);
  const C pre = C(0, geom.R * geom.R * mat.gamma / 2) * Scalar(-0.5);
  return pre * (std::log(std::conj(z) - zc_bar) + mat.kappa() * std::log(z - zc_bar));
}

template <class Scalar>
std::vector<SingularityRow<Scalar>> singularity_demo(const std::vector<Scalar>& radii, const PlaneSolution<Scalar>& sol) {
  std::vector<SingularityRow<Scalar>> rows;
  Scalar prev = 0;
  for (Scalar r : radii) {
    if (!(r > sol.geometry.H + sol.geometry.R)) throw DomainError("singularity_demo: radius must lie below the tunnel");
    if (!(r > prev)) throw DomainError("singularity_demo: radii must increase");
    prev = r;
    const std::complex<Scalar> z(0, -r);
    const auto zeta = forward_map(z, sol.params);
    const auto pf = plane_fields(zeta, sol, FilterMode::Auto);
    rows.push_back({r, std::abs(traditional_log_part(z, sol.material, sol.geometry)), std::abs(pf.g)});
  }
  return rows;
}

/// Plane-strain surface samples at abscissae xs (rho = 1).
template <class Scalar>
std::vector<FieldSample<Scalar>> surface_samples(const PlaneSolution<Scalar>& sol, const std::vector<Scalar>& xs,
                                                 FilterMode mode) {
  const RingExpansion<Scalar> ring(sol, Scalar(1), mode);
  std::vector<FieldSample<Scalar>> out;
  out.reserve(xs.size());
  for (Scalar x : xs) {
    const auto zeta = forward_map(std::complex<Scalar>(x, 0), sol.params);
    auto s = plane_sample(zeta, ring.at(std::arg(zeta)), sol.params);
    s.z = {x, 0};
    out.push_back(s);
  }
  return out;
}

template <class Scalar>
std::vector<Scalar> linspace(Scalar lo, Scalar hi, int count) {
  std::vector<Scalar> v(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) v[static_cast<std::size_t>(j)] = count == 1 ? lo : lo + (hi - lo) * j / (count - 1);
  return v;
}

/// Plane-strain boundary residuals on the ground surface, joint neighbourhoods excluded:
/// free segment |x| <= 0.9 x0, fixed segment 1.1 x0 <= |x| <= 10 x0.
template <class Scalar = double>
struct SurfaceResidual {
  Scalar free_traction;   ///< max(|sigma_y|, |tau_xy|) [kPa] at U = 1
  Scalar fixed_g;         ///< max |g| [kN/m]; |u + i v| = I(t)/2 times this
};

template <class Scalar>
SurfaceResidual<Scalar> surface_residual(const PlaneSolution<Scalar>& sol, FilterMode mode = FilterMode::On,
                                         int count = 200) {
  const Scalar x0 = sol.geometry.x0;
  SurfaceResidual<Scalar> r{0, 0};
  for (const auto& s : surface_samples(sol, linspace(-Scalar(0.9) * x0, Scalar(0.9) * x0, count), mode))
    r.free_traction = std::max({r.free_traction, std::abs(s.sigma_y), std::abs(s.tau_xy)});
  std::vector<Scalar> fixed = linspace(Scalar(1.1) * x0, 10 * x0, count);
  for (Scalar x : linspace(-10 * x0, -Scalar(1.1) * x0, count)) fixed.push_back(x);
  for (const auto& s : surface_samples(sol, fixed, mode)) r.fixed_g = std::max(r.fixed_g, std::hypot(s.u, s.v));
  return r;
}

}  // namespace qtunnel
