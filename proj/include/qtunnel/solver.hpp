#pragma once

// Iterative solution of the truncated Riemann-Hilbert system for the real
// coefficients f_n (-N <= n <= N) and the derived A_k, B_k.
//
// Both truncated systems keep the same matrices at every step:
//   (i)  unknowns f_{-n}, n = 1..N,   row k = 0..N-1, entry alpha_{n-k-1}
//   (ii) unknowns f_n,    n = 0..N,   row k = 0..N,   entry beta_{n-k+1}
// so they are factored once and only the right-hand sides change.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "qtunnel/errors.hpp"
#include "qtunnel/geometry.hpp"
#include "qtunnel/series.hpp"
#include "qtunnel/time_model.hpp"

namespace qtunnel {

template <class Scalar = double>
struct SolverDiagnostics {
  Scalar imag_residue = 0;        ///< max|Im f| / max|f| before the real projection
  Scalar single_valuedness = 0;   ///< |kappa A_{-1} + B_{-1}|
  Scalar resultant_residual = 0;  ///< |A_{-1} - B_{-1} - gamma E_{-1}|
  Scalar rcond_inner = 0;
  Scalar rcond_outer = 0;
};

template <class Scalar = double>
struct SeriesSolution {
  int N = 0;
  OffsetSeries<Scalar> f;
  OffsetSeries<std::complex<Scalar>> A;
  OffsetSeries<std::complex<Scalar>> B;
  int Q = 0;  ///< max|f^(Q+1)| <= eps
  std::vector<double> residual_history;  ///< max|f^(q)| for q = 0..Q+1
  SolverDiagnostics<Scalar> diagnostics;
};

/// A_k = sum_{n=-k}^{N} alpha_{n+k} f_{-n},  B_k = sum_{n=k+1}^{N} beta_{n-k} f_n,  -N <= k <= N.
template <class Scalar, class Value>
std::pair<OffsetSeries<std::complex<Scalar>>, OffsetSeries<std::complex<Scalar>>> ab_from_f(
    const OffsetSeries<Value>& f, const BasisCoeffs<Scalar>& basis, int N) {
  using C = std::complex<Scalar>;
  if (basis.K() < 2 * N) throw DomainError("ab_from_f: basis order too small for N");
  OffsetSeries<C> A(-N, N), B(-N, N);
  for (int k = -N; k <= N; ++k) {
    C acc(0);
    for (int n = std::max(-k, -N); n <= N; ++n) acc += basis.alpha_seq(n + k) * C(f[-n]);
    A.at(k) = acc;
    acc = C(0);
    for (int n = k + 1; n <= N; ++n) acc += basis.beta_seq(n - k) * C(f[n]);
    B.at(k) = acc;
  }
  return {A, B};
}

template <class Scalar = double>
class RhSystem {
 public:
  using C = std::complex<Scalar>;
  using Matrix = Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = ComplexVector<Scalar>;

  RhSystem(const BasisCoeffs<Scalar>& basis, const LoadCoeffs<Scalar>& loads, const MaterialParams<Scalar>& mat,
           const MappingParams<Scalar>& params, const TruncationConfig<Scalar>& trunc)
      : basis_(basis), loads_(loads), mat_(mat), params_(params), trunc_(trunc), N_(trunc.N) {
    if (N_ < 1) throw DomainError("RhSystem: N must be >= 1");
    if (basis.K() < 2 * N_ + 2) throw DomainError("RhSystem: basis order must be >= 2N+2");
    if (loads.E.lo > -(N_ + 1) || loads.E.hi() < N_) throw DomainError("RhSystem: load window does not cover -N-1..N");
    if (!(trunc.M > N_)) throw DomainError("RhSystem: M must exceed N");

    const Scalar tiny = Scalar(1e-300) > 0 ? Scalar(1e-300) : Scalar(0);
    if (std::abs(basis.alpha_seq(0)) <= tiny || std::abs(basis.beta_seq(1)) <= tiny)
      throw SolverError("RhSystem: singular truncated system (vanishing diagonal)");

    Matrix Ma = Matrix::Zero(N_, N_);
    for (int k = 0; k < N_; ++k)
      for (int n = k + 1; n <= N_; ++n) Ma(k, n - 1) = basis.alpha_seq(n - k - 1);
    Matrix Mb = Matrix::Zero(N_ + 1, N_ + 1);
    for (int k = 0; k <= N_; ++k)
      for (int n = std::max(0, k - 1); n <= N_; ++n) Mb(k, n) = basis.beta_seq(n - k + 1);
    Ma_ = Ma;
    Mb_ = Mb;
    lu_inner_.compute(Ma);
    lu_outer_.compute(Mb);
    rcond_inner_ = lu_inner_.rcond();
    rcond_outer_ = lu_outer_.rcond();
    if (!(rcond_inner_ > Scalar(0)) || !(rcond_outer_ > Scalar(0)))
      throw SolverError("RhSystem: truncated system is singular, rcond = " + std::to_string(double(rcond_inner_)) +
                        " / " + std::to_string(double(rcond_outer_)));

    // w_l = e_l(alpha) alpha^l for l = -1 .. 2N+1
    const GeometricCoeffs<Scalar> e{params.alpha};
    weights_.resize(2 * N_ + 3);
    for (int l = -1; l <= 2 * N_ + 1; ++l)
      weights_[static_cast<std::size_t>(l + 1)] = e(l) * std::pow(params.alpha, static_cast<Scalar>(l));
  }

  int N() const { return N_; }
  Scalar rcond_inner() const { return rcond_inner_; }
  Scalar rcond_outer() const { return rcond_outer_; }
  const Matrix& inner_matrix() const { return Ma_; }
  const Matrix& outer_matrix() const { return Mb_; }

  /// Right-hand sides of the zeroth-order systems.
  std::pair<Vector, Vector> zeroth_rhs() const {
    const Scalar g = mat_.gamma, kap = mat_.kappa(), al = params_.alpha;
    const auto& E = loads_.E;
    Vector ra(N_), rb(N_ + 1);
    ra(0) = g * E[-1] / (1 + kap);
    rb(0) = -kap * g * E[-1] / (1 + kap);
    Scalar pk = 1;
    for (int k = 1; k <= N_; ++k) {
      pk *= al;
      if (k < N_) ra(k) = g * pk * E[-k - 1];
      rb(k) = -g * pk * E[k - 1];
    }
    return {ra, rb};
  }

  /// Right-hand sides of the correction systems driven by (A, B) of the previous increment.
  std::pair<Vector, Vector> correction_rhs(const OffsetSeries<C>& A, const OffsetSeries<C>& B) const {
    const Scalar al = params_.alpha;
    Vector ra = Vector::Zero(N_), rb = Vector::Zero(N_ + 1);
    Scalar p2k = 1;
    for (int k = 1; k <= N_; ++k) {
      p2k *= al * al;
      if (k < N_) {
        C sum(0);
        for (int l = -1; l <= N_ - k; ++l) sum += weight(l) * A[l + k];
        ra(k) = p2k * B[-k - 1] + static_cast<Scalar>(k) * p2k * sum;
      }
      C sum(0);
      for (int l = -1; l <= N_ + k; ++l) sum += weight(l) * A[l - k];
      rb(k) = p2k * A[k - 1] + static_cast<Scalar>(k) * sum;
    }
    return {ra, rb};
  }

  /// Solves both systems and packs the result as f_{-N}..f_N.
  OffsetSeries<C> solve_rhs(const Vector& ra, const Vector& rb) const {
    const Vector fa = lu_inner_.solve(ra);
    const Vector fb = lu_outer_.solve(rb);
    OffsetSeries<C> f(-N_, N_);
    for (int n = 1; n <= N_; ++n) f.at(-n) = fa(n - 1);
    for (int n = 0; n <= N_; ++n) f.at(n) = fb(n);
    return f;
  }

  OffsetSeries<C> solve_zeroth() const {
    const auto [ra, rb] = zeroth_rhs();
    return solve_rhs(ra, rb);
  }

  /// Next increment f^(q+1) from f^(q).
  OffsetSeries<C> iterate(const OffsetSeries<C>& f_q) const {
    const auto [A, B] = ab_from_f(f_q, basis_, N_);
    const auto [ra, rb] = correction_rhs(A, B);
    return solve_rhs(ra, rb);
  }

  /// Residual of the full coupled system for an accumulated f: max over rows of
  /// |M f - zeroth_rhs - correction_rhs(A(f), B(f))|.
  Scalar coupled_residual(const OffsetSeries<C>& f) const {
    const auto [A, B] = ab_from_f(f, basis_, N_);
    auto [ra, rb] = zeroth_rhs();
    const auto [ca, cb] = correction_rhs(A, B);
    Vector fa(N_), fb(N_ + 1);
    for (int n = 1; n <= N_; ++n) fa(n - 1) = f[-n];
    for (int n = 0; n <= N_; ++n) fb(n) = f[n];
    const Vector res_a = Ma_ * fa - ra - ca;
    const Vector res_b = Mb_ * fb - rb - cb;
    return std::max(res_a.cwiseAbs().maxCoeff(), res_b.cwiseAbs().maxCoeff());
  }

  SeriesSolution<Scalar> solve() const {
    OffsetSeries<C> increment = solve_zeroth();
    OffsetSeries<C> total = increment;
    std::vector<double> history{static_cast<double>(max_abs(increment))};
    int q = 0;
    int rises = 0;
    while (true) {
      OffsetSeries<C> next = iterate(increment);
      const Scalar size = max_abs(next);
      history.push_back(static_cast<double>(size));
      if (size <= trunc_.eps) break;
      rises = history[history.size() - 1] > history[history.size() - 2] ? rises + 1 : 0;
      if (rises >= 5) throw SolverError("rh_solver: iteration diverges (5 consecutive increases)", history);
      ++q;
      if (q > trunc_.max_iterations)
        throw SolverError("rh_solver: no convergence within " + std::to_string(trunc_.max_iterations) + " iterations",
                          history);
      total.data += next.data;
      increment = std::move(next);
    }
    return finish(total, q, std::move(history));
  }

  const BasisCoeffs<Scalar>& basis() const { return basis_; }
  const LoadCoeffs<Scalar>& loads() const { return loads_; }

 private:
  Scalar weight(int l) const {
    if (l < -1 || l > 2 * N_ + 1) return Scalar(0);
    return weights_[static_cast<std::size_t>(l + 1)];
  }

  static Scalar max_abs(const OffsetSeries<C>& s) { return s.data.size() ? s.data.cwiseAbs().maxCoeff() : Scalar(0); }

  SeriesSolution<Scalar> finish(const OffsetSeries<C>& total, int Q, std::vector<double> history) const {
    SeriesSolution<Scalar> sol;
    sol.N = N_;
    sol.Q = Q;
    sol.residual_history = std::move(history);
    sol.f = OffsetSeries<Scalar>(-N_, N_);
    const Scalar scale = max_abs(total);
    Scalar max_imag = 0;
    for (int n = -N_; n <= N_; ++n) {
      sol.f.at(n) = total[n].real();
      max_imag = std::max(max_imag, std::abs(total[n].imag()));
    }
    auto [A, B] = ab_from_f(sol.f, basis_, N_);
    sol.A = std::move(A);
    sol.B = std::move(B);
    auto& d = sol.diagnostics;
    d.imag_residue = scale > 0 ? max_imag / scale : Scalar(0);
    d.single_valuedness = std::abs(mat_.kappa() * sol.A[-1] + sol.B[-1]);
    d.resultant_residual = std::abs(sol.A[-1] - sol.B[-1] - mat_.gamma * loads_.E[-1]);
    d.rcond_inner = rcond_inner_;
    d.rcond_outer = rcond_outer_;
    return sol;
  }

  BasisCoeffs<Scalar> basis_;
  LoadCoeffs<Scalar> loads_;
  MaterialParams<Scalar> mat_;
  MappingParams<Scalar> params_;
  TruncationConfig<Scalar> trunc_;
  int N_;
  Matrix Ma_, Mb_;
  Eigen::PartialPivLU<Matrix> lu_inner_, lu_outer_;
  Scalar rcond_inner_ = 0, rcond_outer_ = 0;
  std::vector<Scalar> weights_;
};

/// Everything the field evaluator needs from one plane-strain solve.
template <class Scalar = double>
struct PlaneSolution {
  TunnelGeometry<Scalar> geometry;
  MappingParams<Scalar> params;
  MaterialParams<Scalar> material;
  TruncationConfig<Scalar> truncation;
  BasisCoeffs<Scalar> basis;
  LoadCoeffs<Scalar> loads;
  SeriesSolution<Scalar> series;
};

template <class Scalar>
PlaneSolution<Scalar> solve_plane(const TunnelGeometry<Scalar>& geom, const MaterialParams<Scalar>& mat,
                                  const TruncationConfig<Scalar>& trunc) {
  PlaneSolution<Scalar> out;
  out.geometry = geom;
  out.material = mat;
  out.truncation = trunc;
  out.params = derive_mapping_params(geom);
  out.basis = basis_coeffs(mat.kappa(), out.params.theta0, 2 * trunc.N + 2);
  out.loads = load_coeffs(mat.k0, out.params, trunc);
  const RhSystem<Scalar> system(out.basis, out.loads, mat, out.params, trunc);
  out.series = system.solve();
  return out;
}

}  // namespace qtunnel
