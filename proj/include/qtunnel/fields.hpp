#pragma once

// Plane-strain fields from a series solution, time restoration and the change to
// rectangular components.
//
// On a ring |zeta| = rho the three series are precomputed once (O(N^2)) and then
// evaluated at any sigma = e^{i theta} in O(N):
//   sigma_theta + sigma_rho = 4 Re[(i / z') sum A_k rho^k sigma^k]
//   sigma_rho + i tau       = (i / z') sum b_k(rho) sigma^k
//   g                       = sum g_k(rho) sigma^k + g_const(rho)
// and u + i v = I(t)/2 g once time is restored.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "qtunnel/errors.hpp"
#include "qtunnel/geometry.hpp"
#include "qtunnel/series.hpp"
#include "qtunnel/solver.hpp"
#include "qtunnel/time_model.hpp"

namespace qtunnel {

/// Lanczos sigma factor sinc(k / N).
template <class Scalar = double>
Scalar lanczos(int k, int N) {
  if (k == 0) return Scalar(1);
  const Scalar x = std::numbers::pi_v<Scalar> * static_cast<Scalar>(k) / static_cast<Scalar>(N);
  return std::sin(x) / x;
}

enum class FilterMode { Off, On, Auto };

/// Filtering is applied near the ground surface only under Auto.
template <class Scalar>
bool filter_enabled(FilterMode mode, Scalar rho) {
  if (mode == FilterMode::Auto) return std::abs(rho - 1) <= Scalar(0.05);
  return mode == FilterMode::On;
}

/// Raw series values at one annulus point.
template <class Scalar = double>
struct PlaneFields {
  Scalar stress_sum = 0;                 ///< sigma_rho + sigma_theta [kPa]
  std::complex<Scalar> radial_shear{};   ///< sigma_rho + i tau_rhotheta [kPa]
  std::complex<Scalar> g{};              ///< displacement factor [kN/m]
};

template <class Scalar = double>
struct FieldSample {
  std::complex<Scalar> zeta{};
  std::complex<Scalar> z{};
  Scalar sigma_rho = 0, sigma_theta = 0, tau_rhotheta = 0;
  Scalar sigma_x = 0, sigma_y = 0, tau_xy = 0;
  /// Displacement [m] after restore_time; in a plane snapshot this pair holds g itself.
  Scalar u = 0, v = 0;
  std::optional<Scalar> t;
};

template <class Scalar = double>
class RingExpansion {
 public:
  using C = std::complex<Scalar>;

  RingExpansion(const PlaneSolution<Scalar>& sol, Scalar rho, FilterMode mode)
      : params_(sol.params), N_(sol.series.N), rho_(rho) {
    const Scalar al = sol.params.alpha;
    if (rho < al - Scalar(kAnnulusGuard) || rho > 1 + Scalar(kAnnulusGuard))
      throw DomainError("plane_fields: rho outside [alpha, 1]");
    rho_ = std::clamp(rho, al, Scalar(1));
    filtered_ = filter_enabled(mode, rho_);

    const int N = N_;
    const auto& A = sol.series.A;
    const auto& B = sol.series.B;
    const Scalar kap = sol.material.kappa();
    const GeometricCoeffs<Scalar> e{rho_};
    const bool has_kernel = rho_ < 1;
    const Scalar log_rho = std::log(rho_);
    auto rpow = [&](int k) { return std::exp(static_cast<Scalar>(k) * log_rho); };

    lo_ = -N;
    sum_coef_.assign(static_cast<std::size_t>(2 * N + 2), C(0));
    shear_coef_.assign(static_cast<std::size_t>(2 * N + 2), C(0));
    g_coef_.assign(static_cast<std::size_t>(2 * N + 2), C(0));
    const C i(0, 1);

    for (int k = -N; k <= N; ++k) {
      C kernel(0), g_kernel(0);
      if (has_kernel) {
        // sum_l e_l A_{l-k-1} rho^{l-k-2}  with j = l - k - 1 in [-N, N]
        for (int j = std::max(-N, -k - 2); j <= N; ++j) kernel += e(j + k + 1) * A[j] * rpow(j - 1);
        // sum_l e_l A_{l-k} rho^{l-k}  with j = l - k in [-N, N]
        for (int j = std::max(-N, -k - 1); j <= N; ++j) g_kernel += e(j + k) * A[j] * rpow(j);
      }
      slot(sum_coef_, k) = A[k] * rpow(k);
      slot(shear_coef_, k) = A[k] * rpow(k) - B[k] * rpow(-k - 2) + static_cast<Scalar>(k + 1) * kernel;
      slot(g_coef_, k) -= i * g_kernel;
    }
    g_const_ = i * (kap * A[-1] - B[-1]) * log_rho;
    for (int k = -N + 1; k <= N + 1; ++k) {
      if (k == 0) continue;
      const C a_prev = A[k - 1], b_prev = B[k - 1];
      slot(g_coef_, k) += i * (kap * a_prev * rpow(k) + b_prev * rpow(-k)) / static_cast<Scalar>(k);
      g_const_ -= i * (kap * a_prev + b_prev) / static_cast<Scalar>(k) * factor(k);
    }
  }

  Scalar rho() const { return rho_; }
  bool filtered() const { return filtered_; }

  PlaneFields<Scalar> at(Scalar theta) const {
    const C zeta = std::polar(rho_, theta);
    const C zp = backward_map_deriv(zeta, params_);
    C s1(0), s2(0), g(0);
    for (int k = lo_; k <= N_ + 1; ++k) {
      const C w = std::polar(factor(k), static_cast<Scalar>(k) * theta);
      s1 += slot(sum_coef_, k) * w;
      s2 += slot(shear_coef_, k) * w;
      g += slot(g_coef_, k) * w;
    }
    const C iz = C(0, 1) / zp;
    return {4 * std::real(iz * s1), iz * s2, g + g_const_};
  }

 private:
  Scalar factor(int k) const { return filtered_ ? lanczos<Scalar>(k, N_) : Scalar(1); }
  C& slot(std::vector<C>& v, int k) { return v[static_cast<std::size_t>(k - lo_)]; }
  const C& slot(const std::vector<C>& v, int k) const { return v[static_cast<std::size_t>(k - lo_)]; }

  MappingParams<Scalar> params_;
  int N_;
  Scalar rho_;
  bool filtered_ = false;
  int lo_ = 0;
  std::vector<C> sum_coef_, shear_coef_, g_coef_;
  C g_const_{};
};

/// Single-point evaluation; builds the ring expansion for |zeta|.
template <class Scalar>
PlaneFields<Scalar> plane_fields(std::complex<Scalar> zeta, const PlaneSolution<Scalar>& sol, FilterMode mode) {
  const RingExpansion<Scalar> ring(sol, std::abs(zeta), mode);
  return ring.at(std::arg(zeta));
}

/// Unit-modulus factor taking sigma_theta - sigma_rho + 2i tau to sigma_y - sigma_x + 2i tau_xy.
template <class Scalar>
std::complex<Scalar> rotation_factor(std::complex<Scalar> zeta, const MappingParams<Scalar>& p) {
  if (std::abs(zeta) == Scalar(0)) throw DomainError("rotation_factor: zeta = 0 is outside the annulus");
  const auto zp = backward_map_deriv(zeta, p);
  return std::conj(zeta) / zeta * (std::conj(zp) / zp);
}

template <class Scalar>
FieldSample<Scalar> to_rectangular(FieldSample<Scalar> s, const MappingParams<Scalar>& p) {
  using C = std::complex<Scalar>;
  const Scalar trace = s.sigma_rho + s.sigma_theta;
  const C D = C(s.sigma_theta - s.sigma_rho, 2 * s.tau_rhotheta) * rotation_factor(s.zeta, p);
  s.sigma_y = (trace + D.real()) / 2;
  s.sigma_x = (trace - D.real()) / 2;
  s.tau_xy = D.imag() / 2;
  return s;
}

/// Plane snapshot at zeta; the displacement slot carries g.
template <class Scalar>
FieldSample<Scalar> plane_sample(std::complex<Scalar> zeta, const PlaneFields<Scalar>& pf,
                                 const MappingParams<Scalar>& p) {
  FieldSample<Scalar> s;
  s.zeta = zeta;
  s.z = backward_map(zeta, p);
  s.sigma_rho = pf.radial_shear.real();
  s.tau_rhotheta = pf.radial_shear.imag();
  s.sigma_theta = pf.stress_sum - s.sigma_rho;
  s.u = pf.g.real();
  s.v = pf.g.imag();
  return to_rectangular(s, p);
}

/// Stresses scaled by U(t), displacement g scaled by I(t)/2.
template <class Scalar>
FieldSample<Scalar> restore_time(FieldSample<Scalar> plane, const TimeWeights<Scalar>& w, Scalar t) {
  const std::size_t j = w.index_of(t);
  const Scalar U = w.U_vals[j];
  const Scalar half_I = w.I_vals[j] / 2;
  for (Scalar* c : {&plane.sigma_rho, &plane.sigma_theta, &plane.tau_rhotheta, &plane.sigma_x, &plane.sigma_y,
                    &plane.tau_xy})
    *c *= U;
  plane.u *= half_I;
  plane.v *= half_I;
  plane.t = w.grid[j];
  return plane;
}

/// Adds the initial geostatic field (k0 gamma y, gamma y, 0); curvilinear components follow
/// through the inverse rotation.
template <class Scalar>
FieldSample<Scalar> total_stress(FieldSample<Scalar> s, const MaterialParams<Scalar>& mat,
                                 const MappingParams<Scalar>& p) {
  using C = std::complex<Scalar>;
  const Scalar y = s.z.imag();
  s.sigma_x += mat.k0 * mat.gamma * y;
  s.sigma_y += mat.gamma * y;
  const Scalar trace = s.sigma_x + s.sigma_y;
  const C D = C(s.sigma_y - s.sigma_x, 2 * s.tau_xy) * std::conj(rotation_factor(s.zeta, p));
  s.sigma_theta = (trace + D.real()) / 2;
  s.sigma_rho = (trace - D.real()) / 2;
  s.tau_rhotheta = D.imag() / 2;
  return s;
}

/// Radial displacement at a periphery point of local angle theta (positive outward from the tunnel centre).
template <class Scalar>
Scalar radial_displacement(const FieldSample<Scalar>& s, Scalar theta) {
  return std::real(std::complex<Scalar>(s.u, s.v) * std::polar(Scalar(1), -theta));
}

}  // namespace qtunnel
