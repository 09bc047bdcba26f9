#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "qtunnel/fields.hpp"
#include "qtunnel/verification.hpp"
#include "support.hpp"

using namespace qtunnel;
using qtunnel::testing::reference;
using qtunnel::testing::reference_solution;
using qtunnel::testing::reference_weights;
using C = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

/// Stresses straight from the potentials phi'(zeta) = i sum A_k zeta^k and
/// psi'(zeta) = -i sum B_{-k-2} zeta^k + zeta phi' - (1 - zeta^2)/2 phi'', through
/// Phi = phi'/z', Psi = psi'/z' and the rectangular combinations.
struct DirectStress {
  double sum;
  C radial_shear;
  double sx, sy, txy;
};

DirectStress direct_stress(C zeta, const PlaneSolution<double>& sol) {
  const auto& A = sol.series.A;
  const auto& B = sol.series.B;
  const int N = sol.series.N;
  C p1(0), p2(0), bsum(0);
  for (int k = -N; k <= N; ++k) {
    p1 += A[k] * std::pow(zeta, k);
    p2 += static_cast<double>(k) * A[k] * std::pow(zeta, k - 1);
    bsum += B[-k - 2] * std::pow(zeta, k);
  }
  const C i(0, 1);
  p1 *= i;
  p2 *= i;
  const C psi1 = -i * bsum + zeta * p1 - (1.0 - zeta * zeta) / 2.0 * p2;
  const auto& p = sol.params;
  const C z1 = backward_map_deriv(zeta, p), z2 = backward_map_deriv2(zeta, p), z = backward_map(zeta, p);
  const C Phi = p1 / z1, dPhi = (p2 / z1 - p1 * z2 / (z1 * z1)) / z1, Psi = psi1 / z1;
  const double sum = 4 * Phi.real();
  const C D = 2.0 * (std::conj(z) * dPhi + Psi);
  const double rho = std::abs(zeta);
  const C e2 = zeta * zeta * z1 / (rho * rho * std::conj(z1));
  return {sum, 2 * Phi.real() - std::conj(e2 * D) / 2.0, (sum - D.real()) / 2, (sum + D.real()) / 2, D.imag() / 2};
}

C displacement_factor(C z, const PlaneSolution<double>& sol) {
  return plane_fields(forward_map(z, sol.params), sol, FilterMode::Off).g;
}

}  // namespace

TEST_CASE("Lanczos factors") {
  CHECK(lanczos(0, 200) == 1);
  CHECK(std::abs(lanczos(200, 200)) < 1e-16);
  CHECK(lanczos(100, 200) == doctest::Approx(2 / kPi).epsilon(1e-15));
  CHECK(lanczos(-100, 200) == lanczos(100, 200));
}

TEST_CASE("filter selection") {
  CHECK(filter_enabled(FilterMode::Auto, 1.0));
  CHECK(filter_enabled(FilterMode::Auto, 0.96));
  CHECK_FALSE(filter_enabled(FilterMode::Auto, 0.9));
  CHECK(filter_enabled(FilterMode::On, 0.3));
  CHECK_FALSE(filter_enabled(FilterMode::Off, 1.0));
}

TEST_CASE("series fields agree with the potentials") {
  const auto& sol = reference_solution();
  for (C zeta : {std::polar(0.5, 0.3), std::polar(0.3, 2.0), std::polar(0.8, -1.0), std::polar(0.6, kPi / 2)}) {
    const auto pf = plane_fields(zeta, sol, FilterMode::Off);
    const auto d = direct_stress(zeta, sol);
    const double scale = std::max(std::abs(d.sum), std::abs(d.radial_shear)) + 1;
    CHECK(std::abs(pf.stress_sum - d.sum) < 1e-10 * scale);
    CHECK(std::abs(pf.radial_shear - d.radial_shear) < 1e-10 * scale);
    const auto s = plane_sample(zeta, pf, sol.params);
    CHECK(std::abs(s.sigma_x - d.sx) < 1e-10 * scale);
    CHECK(std::abs(s.sigma_y - d.sy) < 1e-10 * scale);
    CHECK(std::abs(s.tau_xy - d.txy) < 1e-10 * scale);
  }
}

TEST_CASE("near the surface the truncated kernel expansion limits agreement") {
  // e_l(rho) ~ rho^l, so the clipped window leaves a tail of order rho^N there
  const auto& sol = reference_solution();
  const C zeta = std::polar(0.95, 2.5);
  const auto pf = plane_fields(zeta, sol, FilterMode::Off);
  const auto d = direct_stress(zeta, sol);
  CHECK(std::abs(pf.stress_sum - d.sum) < 1e-10 * std::abs(d.sum));
  CHECK(std::abs(pf.radial_shear - d.radial_shear) < 1e-3 * std::abs(d.radial_shear));
}

TEST_CASE("outside the annulus is rejected") {
  CHECK_THROWS_AS(plane_fields(C(0.1, 0), reference_solution(), FilterMode::Off), DomainError);
  CHECK_THROWS_AS(plane_fields(C(0, 1.2), reference_solution(), FilterMode::Off), DomainError);
}

TEST_CASE("zero coefficients give zero fields") {
  auto sol = reference_solution();
  sol.series.A.data.setZero();
  sol.series.B.data.setZero();
  sol.series.f.data.setZero();
  for (C zeta : {C(0.5, 0.1), std::polar(1.0, 2.0), std::polar(sol.params.alpha, 1.0)}) {
    const auto pf = plane_fields(zeta, sol, FilterMode::On);
    CHECK(pf.stress_sum == 0);
    CHECK(pf.radial_shear == C(0));
    CHECK(pf.g == C(0));
  }
}

TEST_CASE("ground surface boundary conditions (filtered)") {
  const auto& sol = reference_solution();
  const auto r = surface_residual(sol, FilterMode::On);
  const double gH = 200, gHR = 1000;
  MESSAGE("free traction " << r.free_traction << " kPa, fixed |g| " << r.fixed_g);
  CHECK(r.free_traction <= 0.01 * gH);
  // |u + iv| = I/2 |g| <= 1% gamma H R I
  CHECK(r.fixed_g <= 0.02 * gHR);
}

TEST_CASE("tunnel wall carries the released traction") {
  const auto& sol = reference_solution();
  const auto& mat = reference().material;
  const auto& geom = reference().geometry;
  for (int j = 0; j < 36; ++j) {
    const double theta = 2 * kPi * j / 36;
    const C zeta = forward_map(periphery_point(geom, theta), sol.params);
    const auto s = plane_sample(zeta, plane_fields(zeta, sol, FilterMode::Off), sol.params);
    const auto [sr, tr] = local_polar(s, theta);
    const auto [sR, tR] = traction_oracle(theta, mat, geom);
    CHECK(std::abs(sr - sR) < 1e-8 * 200);
    CHECK(std::abs(tr - tR) < 1e-8 * 200);
    // the curvilinear radial direction at the wall is the local radial direction
    CHECK(std::abs(s.sigma_rho - sr) < 1e-8 * 200);
    CHECK(std::abs(std::abs(s.tau_rhotheta) - std::abs(tr)) < 1e-8 * 200);
  }
}

TEST_CASE("wall traction integrates to the excavation resultant") {
  const auto& sol = reference_solution();
  const auto samples = periphery_samples(sol, 2000, FilterMode::Off);
  C total(0);
  for (int j = 0; j < 2000; ++j) {
    const double theta = 2 * kPi * j / 2000;
    const auto [sr, tr] = local_polar(samples[static_cast<std::size_t>(j)], theta);
    total += C(sr, tr) * std::polar(1.0, theta) * (5.0 * 2 * kPi / 2000);
  }
  CHECK(std::abs(-total.imag() - 500 * kPi) <= 5e-3 * 500 * kPi);
  CHECK(std::abs(total.real()) < 1e-6);
}

TEST_CASE("vertical axis carries no shear") {
  const auto& sol = reference_solution();
  for (double depth : {1.0, 3.0, 17.0, 40.0, 200.0}) {
    const C zeta = forward_map(C(0, -depth), sol.params);
    const auto s = plane_sample(zeta, plane_fields(zeta, sol, FilterMode::Auto), sol.params);
    CHECK(std::abs(s.tau_xy) <= 1e-8 * 200);
    CHECK(std::abs(s.u) <= 1e-8 * std::abs(s.v) + 1e-12);
  }
}

TEST_CASE("trace is preserved by the rotation") {
  const auto& sol = reference_solution();
  for (C zeta : {std::polar(0.4, 0.2), std::polar(0.9, -2.0), std::polar(1.0, 1.0)}) {
    const auto s = plane_sample(zeta, plane_fields(zeta, sol, FilterMode::Auto), sol.params);
    CHECK(std::abs(s.sigma_x + s.sigma_y - s.sigma_rho - s.sigma_theta) <=
          1e-10 * std::abs(s.sigma_x + s.sigma_y) + 1e-12);
    CHECK(std::abs(rotation_factor(zeta, sol.params)) == doctest::Approx(1).epsilon(1e-14));
  }
  CHECK_THROWS_AS(rotation_factor(C(0, 0), sol.params), DomainError);
}

TEST_CASE("stresses follow from displacements through plane-strain Hooke's law") {
  // With unit shear modulus the displacement is g/2.
  const auto& sol = reference_solution();
  const double nu = reference().material.nu;
  const double lame = 2 * nu / (1 - 2 * nu);
  const double h = 1e-3;
  for (C z : {C(9, -8), C(-12, -20), C(25, -6), C(0.5, -35)}) {
    const C dgx = (displacement_factor(z + h, sol) - displacement_factor(z - h, sol)) / (2 * h);
    const C dgy = (displacement_factor(z + C(0, h), sol) - displacement_factor(z - C(0, h), sol)) / (2 * h);
    const double ex = dgx.real() / 2, ey = dgy.imag() / 2, gxy = (dgy.real() + dgx.imag()) / 2;
    const double sx = 2 * ex + lame * (ex + ey), sy = 2 * ey + lame * (ex + ey), txy = gxy;
    const C zeta = forward_map(z, sol.params);
    const auto s = plane_sample(zeta, plane_fields(zeta, sol, FilterMode::Auto), sol.params);
    const double scale = std::max({std::abs(s.sigma_x), std::abs(s.sigma_y), std::abs(s.tau_xy)});
    CHECK(std::abs(sx - s.sigma_x) <= 0.01 * scale);
    CHECK(std::abs(sy - s.sigma_y) <= 0.01 * scale);
    CHECK(std::abs(txy - s.tau_xy) <= 0.01 * scale);
  }
}

TEST_CASE("time restoration") {
  const auto& sol = reference_solution();
  const auto& w = reference_weights();
  const C zeta = std::polar(0.6, 2.2);
  const auto plane = plane_sample(zeta, plane_fields(zeta, sol, FilterMode::Auto), sol.params);

  const auto at_t1 = restore_time(plane, w, 100.0);
  CHECK(at_t1.t.has_value());
  CHECK(*at_t1.t == 100);
  CHECK(at_t1.sigma_x == doctest::Approx(w.U_vals[0] * plane.sigma_x).epsilon(1e-15));
  CHECK(std::abs(w.U_vals[0] - 0.0327) < 5e-4);
  CHECK(at_t1.u == doctest::Approx(w.I_vals[0] / 2 * plane.u).epsilon(1e-15));
  CHECK_THROWS_AS(restore_time(plane, w, 100.004), DomainError);

  double prev = 0;
  for (std::size_t j = 0; j < w.size(); j += 50) {
    const auto s = restore_time(plane, w, w.grid[j]);
    const double mag = std::hypot(s.u, s.v);
    CHECK(mag >= prev);
    prev = mag;
  }

  auto mat = reference().material;
  mat.G_E = 0;
  const auto elastic = build_time_weights(mat, reference().schedule, reference().geometry.R);
  for (double t : {100.0, 104.0, 110.5, 120.0}) {
    const auto s = restore_time(plane, elastic, t);
    const double U = equivalent_coefficient(t, mat, reference().schedule, reference().geometry.R);
    const C expected = U / (2 * mat.G_inf) * C(plane.u, plane.v);
    CHECK(std::abs(C(s.u, s.v) - expected) <= 1e-12 * std::abs(expected));
  }
}

TEST_CASE("total stress adds the geostatic field") {
  const auto& sol = reference_solution();
  const auto& mat = reference().material;
  FieldSample<double> s;
  s.zeta = forward_map(C(0, -10), sol.params);
  s.z = C(0, -10);
  const auto t = total_stress(s, mat, sol.params);
  CHECK(t.sigma_y == doctest::Approx(-200));
  CHECK(t.sigma_x == doctest::Approx(-160));
  CHECK(t.tau_xy == 0);
  CHECK(t.sigma_rho + t.sigma_theta == doctest::Approx(-360));

  FieldSample<double> surface;
  surface.zeta = C(-1, 0);
  surface.z = C(0, 0);
  const auto ts = total_stress(surface, mat, sol.params);
  CHECK(ts.sigma_x == 0);
  CHECK(ts.sigma_y == 0);

  // far below the tunnel the additional field is negligible next to the initial one
  const C deep(0, -1000);
  const C zeta = forward_map(deep, sol.params);
  const auto add = plane_sample(zeta, plane_fields(zeta, sol, FilterMode::Auto), sol.params);
  const auto tot = total_stress(add, mat, sol.params);
  CHECK(std::abs(add.sigma_y) < 1e-3 * std::abs(tot.sigma_y));
  CHECK(std::abs(add.sigma_x) < 1e-3 * std::abs(tot.sigma_x));
  CHECK(tot.sigma_y == doctest::Approx(-20000).epsilon(1e-3));
}

TEST_CASE("ring evaluation is independent of evaluation order") {
  const auto& sol = reference_solution();
  const RingExpansion<double> ring(sol, 0.7, FilterMode::Auto);
  const auto a = ring.at(1.1);
  (void)ring.at(-2.0);
  const auto b = ring.at(1.1);
  CHECK(a.stress_sum == b.stress_sum);
  CHECK(a.g == b.g);
}
