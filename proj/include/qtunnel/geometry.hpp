#pragma once

// Tunnel geometry and the bidirectional conformal map between the remaining
// ground (lower half-plane minus the tunnel disk) and the annulus alpha <= |zeta| <= 1.
//
//   zeta(z) = (z + i a) / (z - i a)
//   z(zeta) = -i a (1 + zeta) / (1 - zeta)
//
// The ground surface maps onto |zeta| = 1 (x = +-inf onto zeta = 1, x = 0 onto
// zeta = -1) and the tunnel periphery onto |zeta| = alpha.

#include <cmath>
#include <complex>
#include <numbers>

#include "qtunnel/errors.hpp"

namespace qtunnel {

template <class Scalar = double>
struct TunnelGeometry {
  Scalar R;   ///< tunnel radius [m]
  Scalar H;   ///< depth of the tunnel centre [m]
  Scalar x0;  ///< half-width of the free surface segment [m]
};

template <class Scalar = double>
struct MappingParams {
  Scalar alpha;   ///< inner annulus radius
  Scalar a;       ///< mapping scale [m]
  Scalar theta0;  ///< joint points sit at exp(+-i theta0); the fixed arc is |arg zeta| < theta0
};

/// Slack on |zeta| range checks.
inline constexpr double kAnnulusGuard = 1e-9;

template <class Scalar>
MappingParams<Scalar> derive_mapping_params(const TunnelGeometry<Scalar>& g) {
  if (!(g.R > 0)) throw DomainError("tunnel radius must be positive");
  if (!(g.H > g.R)) throw DomainError("degenerate geometry: tunnel must lie strictly below the surface (H > R)");
  if (!(g.x0 > 0)) throw DomainError("free segment half-width x0 must be positive");
  using std::atan;
  using std::sqrt;
  const Scalar alpha = g.R / (g.H + sqrt(g.H * g.H - g.R * g.R));
  const Scalar a = g.H * (1 - alpha * alpha) / (1 + alpha * alpha);
  return {alpha, a, 2 * atan(a / g.x0)};
}

/// theta0 through the complex logarithm, -i Ln((x0 + i a)/(x0 - i a)); kept for cross-checking.
template <class Scalar>
Scalar theta0_log_form(Scalar x0, Scalar a) {
  using C = std::complex<Scalar>;
  const C i(0, 1);
  return std::real(-i * std::log((C(x0) + i * a) / (C(x0) - i * a)));
}

template <class Scalar>
std::complex<Scalar> forward_map(std::complex<Scalar> z, const MappingParams<Scalar>& p) {
  using C = std::complex<Scalar>;
  const C ia(0, p.a);
  const C den = z - ia;
  if (std::abs(den) == Scalar(0)) throw PoleError("forward_map: z = i a is a pole of the mapping");
  return (z + ia) / den;
}

template <class Scalar>
std::complex<Scalar> backward_map(std::complex<Scalar> zeta, const MappingParams<Scalar>& p) {
  using C = std::complex<Scalar>;
  const C den = Scalar(1) - zeta;
  if (std::abs(den) == Scalar(0)) throw PoleError("backward_map: zeta = 1 is the point at infinity");
  return C(0, -p.a) * (Scalar(1) + zeta) / den;
}

/// dz/dzeta = -2 i a / (1 - zeta)^2.
template <class Scalar>
std::complex<Scalar> backward_map_deriv(std::complex<Scalar> zeta, const MappingParams<Scalar>& p) {
  using C = std::complex<Scalar>;
  const C den = Scalar(1) - zeta;
  if (std::abs(den) == Scalar(0)) throw PoleError("backward_map_deriv: pole at zeta = 1");
  return C(0, -2 * p.a) / (den * den);
}

/// Second derivative, 4 (-i a) / (1 - zeta)^3.
template <class Scalar>
std::complex<Scalar> backward_map_deriv2(std::complex<Scalar> zeta, const MappingParams<Scalar>& p) {
  using C = std::complex<Scalar>;
  const C den = Scalar(1) - zeta;
  if (std::abs(den) == Scalar(0)) throw PoleError("backward_map_deriv2: pole at zeta = 1");
  return C(0, -4 * p.a) / (den * den * den);
}

template <class Scalar>
bool in_annulus(std::complex<Scalar> zeta, const MappingParams<Scalar>& p) {
  const Scalar r = std::abs(zeta);
  return r >= p.alpha - Scalar(kAnnulusGuard) && r <= Scalar(1) + Scalar(kAnnulusGuard);
}

/// Point on the tunnel periphery at local polar angle theta (measured from +x at the tunnel centre).
template <class Scalar>
std::complex<Scalar> periphery_point(const TunnelGeometry<Scalar>& g, Scalar theta) {
  return std::complex<Scalar>(0, -g.H) + std::polar(g.R, theta);
}

}  // namespace qtunnel
