#pragma once

// Face-release coefficient U(t), Poynting-Thomson shear relaxation G(t), the
// creep kernel H(t) and the convolution weight I(t) = int_{t1}^{t} H(t - tau) U(tau) dtau.
//
// Units: kPa, kN, m, day.

#include <cmath>
#include <cstddef>
#include <vector>

#include "qtunnel/errors.hpp"

namespace qtunnel {

template <class Scalar = double>
struct MaterialParams {
  Scalar gamma;  ///< unit weight [kN/m^3]
  Scalar k0;     ///< lateral earth pressure coefficient
  Scalar nu;     ///< Poisson ratio
  Scalar G_inf;  ///< long-term shear modulus [kPa]
  Scalar G_E;    ///< spare shear modulus [kPa]
  Scalar eta_E;  ///< Maxwell viscosity [kPa day]

  /// Kolosov constant, plane strain.
  Scalar kappa() const { return 3 - 4 * nu; }
};

template <class Scalar = double>
struct ExcavationSchedule {
  Scalar V;  ///< excavation rate [m/day]
  Scalar t0, t1, t2, t3, t4;
  Scalar dtau;  ///< convolution step [day]
};

/// Coefficients of the two-branch face-release law for a given Poisson ratio.
template <class Scalar>
struct FaceLawCoeffs {
  Scalar U0, A_a, B_a, A_b, B_b;

  explicit FaceLawCoeffs(Scalar nu)
      : U0(Scalar(0.22) * nu + Scalar(0.19)),
        A_a(-U0),
        B_a(Scalar(0.73) * nu + Scalar(0.81)),
        A_b(1 - U0),
        B_b(Scalar(0.39) * nu + Scalar(0.65)) {}
};

/// U(t) on [t1, t4]. Exponential branch before the face passes (t < t2), algebraic after.
template <class Scalar>
Scalar equivalent_coefficient(Scalar t, const MaterialParams<Scalar>& mat,
                              const ExcavationSchedule<Scalar>& sched, Scalar R) {
  if (!(t >= sched.t1 && t <= sched.t4))
    throw DomainError("equivalent_coefficient: t outside [t1, t4]");
  const FaceLawCoeffs<Scalar> c(mat.nu);
  const Scalar X = sched.V / R * (t - sched.t2);
  if (t < sched.t2) return c.U0 + c.A_a * (1 - std::exp(c.B_a * X));
  const Scalar q = c.B_b / (c.B_b + X);
  return c.U0 + c.A_b * (1 - q * q);
}

template <class Scalar>
Scalar shear_modulus(Scalar t, const MaterialParams<Scalar>& mat, const ExcavationSchedule<Scalar>& sched) {
  if (!(t >= sched.t1)) throw DomainError("shear_modulus: t before t1");
  if (mat.G_E == Scalar(0)) return mat.G_inf;
  return mat.G_inf + mat.G_E * std::exp(-(mat.G_E / mat.eta_E) * (t - sched.t1));
}

/// Decay rate of the continuous creep kernel [1/day].
template <class Scalar>
Scalar creep_decay_rate(const MaterialParams<Scalar>& mat) {
  return mat.G_E / (mat.G_E + mat.G_inf) * (mat.G_inf / mat.eta_E);
}

/// Continuous part of H(dt) [1/(kPa day)]. The Dirac part delta(dt)/(G_E + G_inf)
/// is not included; convolution_weight adds it as U(t)/(G_E + G_inf).
template <class Scalar>
Scalar creep_kernel_continuous(Scalar dt, const MaterialParams<Scalar>& mat) {
  if (dt < 0) throw DomainError("creep_kernel_continuous: negative lag");
  const Scalar ratio = mat.G_E / (mat.G_E + mat.G_inf);
  return ratio * ratio / mat.eta_E * std::exp(-creep_decay_rate(mat) * dt);
}

/// Samples of U(t) and I(t) on a uniform grid covering [t1, t4].
template <class Scalar = double>
struct TimeWeights {
  std::vector<Scalar> grid;
  std::vector<Scalar> U_vals;
  std::vector<Scalar> I_vals;  ///< [1/kPa]

  std::size_t size() const { return grid.size(); }
  Scalar step() const { return grid.size() > 1 ? grid[1] - grid[0] : Scalar(0); }

  /// Grid index of t. Off-grid times are refused, never interpolated.
  std::size_t index_of(Scalar t) const {
    if (grid.empty()) throw DomainError("TimeWeights: empty grid");
    const Scalar h = step();
    const Scalar pos = h > 0 ? (t - grid.front()) / h : Scalar(0);
    const long j = std::lround(static_cast<double>(pos));
    if (j < 0 || static_cast<std::size_t>(j) >= grid.size() ||
        std::abs(grid[static_cast<std::size_t>(j)] - t) > Scalar(1e-9) * (h > 0 ? h : Scalar(1)))
      throw DomainError("TimeWeights: t is not on the time grid");
    return static_cast<std::size_t>(j);
  }
};

namespace detail {

/// Number of uniform steps covering `span` with step at most `dtau`.
template <class Scalar>
std::size_t step_count(Scalar span, Scalar dtau) {
  const double raw = static_cast<double>(span / dtau);
  auto n = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return n == 0 ? 1 : n;
}

/// Trapezoid of exp(-c (t_j - tau)) U(tau) over the prefix of `u`, one value per
/// sample, via S_{j+1} = e^{-c h} S_j + h/2 (e^{-c h} U_j + U_{j+1}).
template <class Scalar>
std::vector<Scalar> damped_prefix_trapezoid(const std::vector<Scalar>& u, Scalar h, Scalar c) {
  std::vector<Scalar> s(u.size(), Scalar(0));
  const Scalar decay = std::exp(-c * h);
  for (std::size_t j = 1; j < u.size(); ++j)
    s[j] = decay * s[j - 1] + h / 2 * (decay * u[j - 1] + u[j]);
  return s;
}

}  // namespace detail

template <class Scalar>
TimeWeights<Scalar> build_time_weights(const MaterialParams<Scalar>& mat, const ExcavationSchedule<Scalar>& sched,
                                       Scalar R) {
  const std::size_t n = detail::step_count(sched.t4 - sched.t1, sched.dtau);
  const Scalar h = (sched.t4 - sched.t1) / static_cast<Scalar>(n);
  TimeWeights<Scalar> w;
  w.grid.resize(n + 1);
  w.U_vals.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    w.grid[j] = j == n ? sched.t4 : sched.t1 + h * static_cast<Scalar>(j);
    w.U_vals[j] = equivalent_coefficient(w.grid[j], mat, sched, R);
  }
  const Scalar amplitude = creep_kernel_continuous(Scalar(0), mat);
  const Scalar instantaneous = 1 / (mat.G_E + mat.G_inf);
  const auto integral = detail::damped_prefix_trapezoid(w.U_vals, h, creep_decay_rate(mat));
  w.I_vals.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) w.I_vals[j] = amplitude * integral[j] + w.U_vals[j] * instantaneous;
  return w;
}

/// I(t) for a single t in [t1, t4], trapezoid with step at most dtau.
template <class Scalar>
Scalar convolution_weight(Scalar t, const MaterialParams<Scalar>& mat, const ExcavationSchedule<Scalar>& sched,
                          Scalar R) {
  if (!(t >= sched.t1 && t <= sched.t4)) throw DomainError("convolution_weight: t outside [t1, t4]");
  const Scalar U_t = equivalent_coefficient(t, mat, sched, R);
  if (t == sched.t1) return U_t / (mat.G_E + mat.G_inf);
  const std::size_t n = detail::step_count(t - sched.t1, sched.dtau);
  const Scalar h = (t - sched.t1) / static_cast<Scalar>(n);
  std::vector<Scalar> u(n + 1);
  for (std::size_t j = 0; j <= n; ++j)
    u[j] = equivalent_coefficient(j == n ? t : sched.t1 + h * static_cast<Scalar>(j), mat, sched, R);
  const auto integral = detail::damped_prefix_trapezoid(u, h, creep_decay_rate(mat));
  return creep_kernel_continuous(Scalar(0), mat) * integral.back() + U_t / (mat.G_E + mat.G_inf);
}

}  // namespace qtunnel
