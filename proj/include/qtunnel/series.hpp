#pragma once

// Series building blocks of the Riemann-Hilbert solution:
//   * X(zeta) = (zeta - e^{-i theta0})^{-1/2 - i lambda} (zeta - e^{i theta0})^{-1/2 + i lambda},
//     cut along the fixed arc |arg zeta| < theta0, expanded as sum alpha_k zeta^k inside the
//     unit circle and sum beta_k zeta^{-k} outside;
//   * e_l(rho), the Laurent coefficients of (z(sigma/rho) - z(rho sigma)) / conj(z'(rho sigma));
//   * E_k, Laurent coefficients of the tunnel-wall load -y (k0 y' - i x') on |zeta| = alpha.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "qtunnel/errors.hpp"
#include "qtunnel/geometry.hpp"

namespace qtunnel {

template <class Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <class Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Coefficients indexed by a signed integer k in [lo, lo + size). Reads outside the window are 0.
template <class Value>
struct OffsetSeries {
  Eigen::Matrix<Value, Eigen::Dynamic, 1> data;
  int lo = 0;

  OffsetSeries() = default;
  OffsetSeries(int first, int last) : data(Eigen::Matrix<Value, Eigen::Dynamic, 1>::Zero(last - first + 1)), lo(first) {}

  int hi() const { return lo + static_cast<int>(data.size()) - 1; }
  bool contains(int k) const { return k >= lo && k <= hi(); }
  Value operator[](int k) const { return contains(k) ? data(k - lo) : Value(0); }
  Value& at(int k) {
    if (!contains(k)) throw DomainError("OffsetSeries: index out of window");
    return data(k - lo);
  }
};

template <class Scalar = double>
struct TruncationConfig {
  int N = 200;           ///< f_n for -N <= n <= N
  int M = 500;           ///< E_k for -M <= k <= M
  int L_samples = 4096;  ///< circle samples for the discrete transform
  Scalar eps = Scalar(1e-16);
  int max_iterations = 500;
};

template <class Scalar = double>
struct BasisCoeffs {
  Scalar lambda;
  ComplexVector<Scalar> c;          ///< c_0..c_K
  ComplexVector<Scalar> d;          ///< d_0..d_K
  ComplexVector<Scalar> alpha_seq;  ///< alpha_0..alpha_K (inner Taylor coefficients of X)
  ComplexVector<Scalar> beta_seq;   ///< beta_0..beta_K, beta_0 = 0 (outer coefficients of X)

  int K() const { return static_cast<int>(alpha_seq.size()) - 1; }
};

template <class Scalar>
Scalar basis_lambda(Scalar kappa) {
  return std::log(kappa) / (2 * std::numbers::pi_v<Scalar>);
}

/// Basis coefficients up to order K, with c_k, d_k by the product recurrence and
/// alpha_k, beta_k by prefix convolution (O(K^2)).
template <class Scalar>
BasisCoeffs<Scalar> basis_coeffs(Scalar kappa, Scalar theta0, int K) {
  if (K < 1) throw DomainError("basis_coeffs: K must be >= 1");
  using C = std::complex<Scalar>;
  BasisCoeffs<Scalar> b;
  b.lambda = basis_lambda(kappa);
  b.c.resize(K + 1);
  b.d.resize(K + 1);
  b.c(0) = b.d(0) = C(Scalar(0.5), 0);
  const C up = std::polar(Scalar(1), theta0);
  const C down = std::polar(Scalar(1), -theta0);
  C cr(1, 0), dr(1, 0);
  for (int k = 1; k <= K; ++k) {
    const C factor = C(Scalar(0.5) - static_cast<Scalar>(k), -b.lambda) / static_cast<Scalar>(k);
    cr *= factor * up;
    dr *= factor * down;
    b.c(k) = cr;
    b.d(k) = dr;
  }

  // Cauchy product of a sequence with its conjugate, where the c_0 = 1/2 convention
  // makes the k = 0 entry c_0 + conj(c_0) = 1.
  auto self_conv = [](const ComplexVector<Scalar>& s, int k) {
    C acc = s(k) + std::conj(s(k));
    for (int l = 1; l <= k - 1; ++l) acc += s(l) * std::conj(s(k - l));
    return acc;
  };

  const Scalar head = -std::exp(-2 * b.lambda * theta0);
  b.alpha_seq.resize(K + 1);
  b.beta_seq.resize(K + 1);
  b.beta_seq(0) = C(0);
  for (int k = 0; k <= K; ++k) {
    const Scalar sign = (k % 2 == 0) ? Scalar(1) : Scalar(-1);
    b.alpha_seq(k) = head * sign * self_conv(b.c, k);
    if (k >= 1) b.beta_seq(k) = -sign * self_conv(b.d, k - 1);
  }
  return b;
}

/// Direct evaluation of X(zeta) on the sheet used by the series: cut on the fixed arc,
/// X ~ 1/zeta at infinity.
template <class Scalar>
std::complex<Scalar> basis_function(std::complex<Scalar> zeta, Scalar theta0, Scalar lambda) {
  using C = std::complex<Scalar>;
  const C w1 = std::polar(Scalar(1), -theta0);
  const C w2 = std::polar(Scalar(1), theta0);
  const C ratio = (zeta - w2) / (zeta - w1);
  // arg(ratio) in (theta0 - pi, theta0 + pi]: the fixed arc maps onto the ray arg = theta0 + pi.
  const Scalar arg = std::arg(ratio * std::conj(w2)) + theta0;
  const C log_ratio(std::log(std::abs(ratio)), arg);
  return std::exp(C(Scalar(-0.5), lambda) * log_ratio) / (zeta - w1);
}

/// |series(X) - X| at a probe off the unit circle: inner series for |probe| < 1, outer otherwise.
template <class Scalar>
Scalar product_series_check(const BasisCoeffs<Scalar>& b, Scalar theta0, std::complex<Scalar> probe) {
  using C = std::complex<Scalar>;
  const Scalar r = std::abs(probe);
  if (std::abs(r - 1) < Scalar(kAnnulusGuard))
    throw DomainError("product_series_check: probe on the unit circle is ambiguous");
  C sum(0);
  if (r < 1) {
    for (int k = b.K(); k >= 0; --k) sum = sum * probe + b.alpha_seq(k);
  } else {
    const C inv = Scalar(1) / probe;
    for (int k = b.K(); k >= 1; --k) sum = (sum + b.beta_seq(k)) * inv;
  }
  return std::abs(sum - basis_function(probe, theta0, b.lambda));
}

/// e_l(rho): zero for l <= -2, -(1 - rho^2) rho for l = -1, (1 - rho^2)^2 rho^l for l >= 0.
template <class Scalar = double>
struct GeometricCoeffs {
  Scalar rho;

  Scalar operator()(int l) const {
    if (l <= -2) return Scalar(0);
    const Scalar s = 1 - rho * rho;
    if (l == -1) return -s * rho;
    return s * s * std::pow(rho, static_cast<Scalar>(l));
  }

  /// Closed form of sum_{l > K} |e_l|.
  Scalar tail_sum(int K) const {
    const Scalar s = 1 - rho * rho;
    if (rho >= 1) return Scalar(0);
    return s * s * std::pow(rho, static_cast<Scalar>(K + 1)) / (1 - rho);
  }
};

template <class Scalar>
GeometricCoeffs<Scalar> geometric_coeffs(Scalar rho, const MappingParams<Scalar>& p) {
  if (rho < p.alpha - Scalar(kAnnulusGuard) || rho > 1 + Scalar(kAnnulusGuard))
    throw DomainError("geometric_coeffs: rho outside [alpha, 1]");
  return {rho};
}

/// Tunnel-wall load -y(alpha sigma) [k0 dy/dsigma - i dx/dsigma] from the closed-form
/// expansions of x, y on the inner circle.
template <class Scalar>
std::complex<Scalar> load_integrand(std::complex<Scalar> sigma, Scalar k0, const MappingParams<Scalar>& p) {
  using C = std::complex<Scalar>;
  const Scalar al = p.alpha, a = p.a;
  const C inner = Scalar(1) - al * sigma;
  const C outer = sigma - al;
  if (std::abs(outer) == Scalar(0) || std::abs(inner) == Scalar(0))
    throw PoleError("load_integrand: sample hits a pole of the wall parametrisation");
  const C y = -a / 2 * ((Scalar(1) + al * sigma) / inner + (sigma + al) / outer);
  const C dx = C(0, -a * al) * (Scalar(1) / (inner * inner) + Scalar(1) / (outer * outer));
  const C dy = -a * al * (Scalar(1) / (inner * inner) - Scalar(1) / (outer * outer));
  return -y * (k0 * dy - C(0, 1) * dx);
}

template <class Scalar = double>
struct LoadCoeffs {
  OffsetSeries<std::complex<Scalar>> E;  ///< E_{-M}..E_{M} [m^2]
  int L_samples = 0;
};

/// Discrete Fourier coefficients E_k = (1/L) sum_j f(sigma_j) sigma_j^{-k}, sigma_j = e^{2 pi i j / L}.
/// Direct sum with an exact root table and fixed summation order.
template <class Scalar>
LoadCoeffs<Scalar> load_coeffs(Scalar k0, const MappingParams<Scalar>& p, const TruncationConfig<Scalar>& trunc) {
  using C = std::complex<Scalar>;
  const int L = trunc.L_samples;
  const int M = trunc.M;
  if (L < 2 * (2 * M + 1)) throw DomainError("load_coeffs: L_samples must be >= 2(2M+1)");
  std::vector<C> roots(static_cast<std::size_t>(L));
  for (int j = 0; j < L; ++j)
    roots[static_cast<std::size_t>(j)] = std::polar(Scalar(1), 2 * std::numbers::pi_v<Scalar> * j / L);
  std::vector<C> samples(static_cast<std::size_t>(L));
  for (int j = 0; j < L; ++j) samples[static_cast<std::size_t>(j)] = load_integrand(roots[static_cast<std::size_t>(j)], k0, p);

  LoadCoeffs<Scalar> out;
  out.L_samples = L;
  out.E = OffsetSeries<C>(-M, M);
  for (int k = -M; k <= M; ++k) {
    C acc(0);
    const long long kk = ((static_cast<long long>(k) % L) + L) % L;
    for (int j = 0; j < L; ++j) {
      const auto idx = static_cast<std::size_t>((static_cast<long long>(j) * (L - kk)) % L);
      acc += samples[static_cast<std::size_t>(j)] * roots[idx];
    }
    out.E.at(k) = acc / static_cast<Scalar>(L);
  }
  return out;
}

}  // namespace qtunnel
