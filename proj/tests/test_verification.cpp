#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qtunnel/verification.hpp"
#include "support.hpp"

using namespace qtunnel;
using qtunnel::testing::reference;
using qtunnel::testing::reference_solution;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("traction oracle anchors") {
  const auto& mat = reference().material;
  const auto& geom = reference().geometry;
  auto [sv, tv] = traction_oracle(kPi / 2, mat, geom);
  CHECK(sv == doctest::Approx(100));
  CHECK(std::abs(tv) < 1e-12);
  auto [sb, tb] = traction_oracle(3 * kPi / 2, mat, geom);
  CHECK(sb == doctest::Approx(300));
  CHECK(std::abs(tb) < 1e-12);
  auto iso = mat;
  iso.k0 = 1;
  for (double th : {0.1, 1.0, 2.5, 4.0}) {
    auto [s, t] = traction_oracle(th, iso, geom);
    CHECK(s == doctest::Approx(20 * (10 - 5 * std::sin(th))));
    CHECK(t == 0);
  }
}

TEST_CASE("oracle equals the rotated geostatic field") {
  const auto& mat = reference().material;
  const auto& geom = reference().geometry;
  for (int j = 0; j < 100; ++j) {
    const double th = 2 * kPi * j / 100;
    const auto [s1, t1] = traction_oracle(th, mat, geom);
    const auto [s2, t2] = traction_by_rotation(th, mat, geom);
    CHECK(std::abs(s1 - s2) <= 1e-10 * std::abs(s1));
    CHECK(std::abs(t1 - t2) <= 1e-10 * std::max(1.0, std::abs(t1)));
  }
}

TEST_CASE("excavation traction is -U times the static traction") {
  const auto& mat = reference().material;
  const auto& geom = reference().geometry;
  for (double U : {0.0, 0.0327, 0.5, 0.99}) {
    for (double th : {0.3, 2.0, 5.0}) {
      const auto [s, t] = traction_oracle(th, mat, geom);
      const auto [vs, vt] = virtual_traction(th, U, mat, geom);
      CHECK(vs == -U * s);
      CHECK(vt == -U * t);
    }
  }
}

TEST_CASE("resultant report for the reference case") {
  const auto r = resultant_check(reference_solution());
  CHECK(r.expected == doctest::Approx(500 * kPi));
  CHECK(r.virtual_rel_error() < 5e-3);
  CHECK(r.evaluated_rel_error() < 5e-3);
  CHECK(r.E_minus1 == doctest::Approx(-12.5).epsilon(1e-6));
  CHECK(r.E_rel_error() < 1e-6);
  CHECK(r.ab_rel_error() < 1e-6);
}

TEST_CASE("zero unit weight gives zero resultants") {
  auto mat = reference().material;
  mat.gamma = 0;
  const auto sol = solve_plane(reference().geometry, mat, reference().truncation);
  const auto r = resultant_check(sol, 200);
  CHECK(r.expected == 0);
  CHECK(r.virtual_force == 0);
  CHECK(r.evaluated_force == 0);
  CHECK(r.ab_difference == 0);
}

TEST_CASE("classical log term grows, present displacement decays") {
  const double H = 10;
  const auto rows = singularity_demo<double>({2 * H, 1e2 * H, 1e3 * H, 1e4 * H}, reference_solution());
  const double ratio = rows[3].traditional / rows[1].traditional;
  const double law = std::log(1e4 * H) / std::log(1e2 * H);
  CHECK(std::abs(ratio / law - 1) < 0.05);
  CHECK(rows[3].present <= 0.01 * rows[0].present);
  for (std::size_t j = 1; j < rows.size(); ++j) {
    CHECK(rows[j].traditional > rows[j - 1].traditional);
    CHECK(rows[j].present < rows[j - 1].present);
  }
  CHECK_THROWS_AS(singularity_demo<double>({100.0, 50.0}, reference_solution()), DomainError);
  CHECK_THROWS_AS(singularity_demo<double>({12.0}, reference_solution()), DomainError);
}

TEST_CASE("far fixed surface has no displacement") {
  const auto& sol = reference_solution();
  for (const auto& s : surface_samples(sol, {-1e4, -500.0, 300.0, 5e4}, FilterMode::On))
    CHECK(std::hypot(s.u, s.v) < 0.02 * 1000);
}
