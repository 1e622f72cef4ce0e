#pragma once

// Dense complex matrix kernel: one-sided Jacobi SVD, Schatten norms, polar
// decomposition and the two proximal maps used by the splitting solver.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "cstar/error.hpp"

namespace cstar {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Operator (C*, spectral) norm or trace (nuclear) norm.
enum class NormKind { Operator, Trace };

constexpr NormKind dual_of(NormKind kind) {
  return kind == NormKind::Operator ? NormKind::Trace : NormKind::Operator;
}

constexpr std::string_view to_string(NormKind kind) {
  return kind == NormKind::Operator ? "operator" : "trace";
}

inline NormKind parse_norm_kind(std::string_view text) {
  if (text == "operator") return NormKind::Operator;
  if (text == "trace") return NormKind::Trace;
  throw Error(ErrorCode::InvalidArgument, "unknown norm kind '" + std::string(text) + "'");
}

struct SvdConfig {
  /// Relative tolerance for reconstruction/orthogonality and for rank decisions.
  double tol_svd = 1e-11;
  /// Column-pair orthogonality threshold; <= 0 selects rows * machine epsilon.
  double rotation_tol = 0.0;
  int max_sweeps = 80;
};

struct SvdResult {
  Matrix U;      // rows x r, orthonormal columns
  RealVector S;  // r = min(rows, cols), nonincreasing
  Matrix V;      // cols x r, orthonormal columns

  /// max(rows, cols) * tol_svd * S[0]
  double rank_tol(const SvdConfig& cfg = {}) const {
    if (S.size() == 0) return 0.0;
    return static_cast<double>(std::max(U.rows(), V.rows())) * cfg.tol_svd * S(0);
  }

  std::size_t rank(double threshold) const {
    std::size_t r = 0;
    for (Index i = 0; i < S.size(); ++i) {
      if (S(i) > threshold) ++r;
    }
    return r;
  }
  std::size_t rank(const SvdConfig& cfg = {}) const { return rank(rank_tol(cfg)); }
};

struct PolarResult {
  Matrix v;     // partial isometry
  Matrix absx;  // (A^H A)^{1/2}
};

inline bool all_finite(const Matrix& a) {
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    }
  }
  return true;
}

inline void require_finite(const Matrix& a, std::string_view where) {
  if (!all_finite(a)) {
    throw Error(ErrorCode::NonFinite, std::string(where) + ": matrix has NaN/Inf entries");
  }
}

namespace detail {

// Fill columns [first, cols) of q with an orthonormal completion of the
// columns [0, first), drawing candidates from the standard basis.
inline void complete_orthonormal(Matrix& q, Index first) {
  const Index m = q.rows();
  Index next = first;
  for (Index e = 0; e < m && next < q.cols(); ++e) {
    Vector cand = Vector::Zero(m);
    cand(e) = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (Index j = 0; j < next; ++j) cand -= q.col(j) * q.col(j).dot(cand);
    }
    const double nrm = cand.norm();
    if (nrm > 1e-6) q.col(next++) = cand / nrm;
  }
}

}  // namespace detail

/// Thin SVD by one-sided (Hestenes) Jacobi. Deterministic for a fixed input:
/// column pairs are swept in cyclic order.
inline SvdResult svd(const Matrix& a, const SvdConfig& cfg = {}) {
  require_finite(a, "svd");
  if (a.rows() < a.cols()) {
    SvdResult t = svd(a.adjoint(), cfg);
    return {std::move(t.V), std::move(t.S), std::move(t.U)};
  }
  const Index m = a.rows();
  const Index n = a.cols();
  Matrix w = a;
  Matrix v = Matrix::Identity(n, n);
  const double eps = cfg.rotation_tol > 0.0
                         ? cfg.rotation_tol
                         : static_cast<double>(std::max<Index>(m, 1)) *
                               std::numeric_limits<double>::epsilon();
  // Pairs whose coupling is below rounding of the whole matrix carry no information.
  const double floor = eps * eps * a.squaredNorm();

  bool converged = n < 2;
  for (int sweep = 0; sweep < cfg.max_sweeps && !converged; ++sweep) {
    converged = true;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double alpha = w.col(p).squaredNorm();
        const double beta = w.col(q).squaredNorm();
        const Complex gamma = w.col(p).dot(w.col(q));
        const double g = std::abs(gamma);
        if (g <= floor || g <= eps * std::sqrt(alpha) * std::sqrt(beta)) continue;
        converged = false;
        const Complex phase_conj = std::conj(gamma / g);
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Index i = 0; i < m; ++i) {
          const Complex wp = w(i, p);
          const Complex wq = phase_conj * w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
        for (Index i = 0; i < n; ++i) {
          const Complex vp = v(i, p);
          const Complex vq = phase_conj * v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
  }
  if (!converged) {
    throw Error(ErrorCode::NoConvergence,
                "svd: Jacobi sweeps exhausted (max_sweeps=" + std::to_string(cfg.max_sweeps) + ")");
  }

  RealVector norms(n);
  for (Index j = 0; j < n; ++j) norms(j) = w.col(j).norm();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return norms(i) > norms(j); });

  SvdResult out{Matrix(m, n), RealVector(n), Matrix(n, n)};
  const double top = n > 0 ? norms(order[0]) : 0.0;
  const double negligible = static_cast<double>(m) * std::numeric_limits<double>::epsilon() * top;
  Index nonzero = 0;
  for (Index j = 0; j < n; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    out.S(j) = norms(src);
    out.V.col(j) = v.col(src);
    if (norms(src) > negligible && norms(src) > 0.0) {
      out.U.col(j) = w.col(src) / norms(src);
      nonzero = j + 1;
    }
  }
  detail::complete_orthonormal(out.U, nonzero);
  return out;
}

inline double schatten_norm(const RealVector& singular_values, NormKind kind) {
  if (singular_values.size() == 0) return 0.0;
  return kind == NormKind::Operator ? singular_values.maxCoeff() : singular_values.sum();
}

inline double schatten_norm(const Matrix& a, NormKind kind, const SvdConfig& cfg = {}) {
  return schatten_norm(svd(a, cfg).S, kind);
}

/// x = v * absx with v = U_r V_r^H on the numerical-rank-r singular subspace.
/// The zero matrix maps to v = 0, absx = 0.
inline PolarResult polar_decompose(const Matrix& a, const SvdConfig& cfg = {}) {
  const SvdResult d = svd(a, cfg);
  const auto r = static_cast<Index>(d.rank(cfg));
  PolarResult out;
  out.v = d.U.leftCols(r) * d.V.leftCols(r).adjoint();
  out.absx = d.V * d.S.cast<Complex>().asDiagonal() * d.V.adjoint();
  return out;
}

/// Euclidean projection onto {w : w >= 0, sum(w) = radius}.
inline RealVector project_simplex(const RealVector& values, double radius) {
  const Index n = values.size();
  if (n == 0) return values;
  std::vector<double> u(values.data(), values.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Index j = 0; j < n; ++j) {
    cumulative += u[static_cast<std::size_t>(j)];
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - candidate > 0.0) theta = candidate;
  }
  return (values.array() - theta).max(0.0).matrix();
}

/// Euclidean projection of a nonnegative vector onto {w >= 0, sum(w) <= radius}.
inline RealVector project_l1_ball_nonneg(const RealVector& values, double radius) {
  if (values.sum() <= radius) return values;
  return project_simplex(values, radius);
}

inline Matrix rebuild(const SvdResult& d, const RealVector& s) {
  return d.U * s.cast<Complex>().asDiagonal() * d.V.adjoint();
}

/// Frobenius-nearest point of {B : ||B||_1 <= radius}.
inline Matrix project_nuclear_ball(const Matrix& a, double radius, const SvdConfig& cfg = {}) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "project_nuclear_ball: radius must be > 0");
  const SvdResult d = svd(a, cfg);
  if (d.S.sum() <= radius) return a;
  return rebuild(d, project_simplex(d.S, radius));
}

/// Singular values after the proximal step of step * ||.||_kind.
inline RealVector prox_singular_values(const RealVector& s, NormKind kind, double step) {
  if (kind == NormKind::Trace) return (s.array() - step).max(0.0).matrix();
  // Moreau: prox_{t||.||_op}(A) = A - t * P_{nuclear ball}(A / t)
  return s - step * project_l1_ball_nonneg(s / step, 1.0);
}

/// argmin_P step * ||P||_kind + 1/2 ||P - A||_F^2
inline Matrix prox_schatten(const Matrix& a, NormKind kind, double step, const SvdConfig& cfg = {}) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "prox_schatten: step must be > 0");
  const SvdResult d = svd(a, cfg);
  return rebuild(d, prox_singular_values(d.S, kind, step));
}

/// Eigen-decomposition of a Hermitian matrix (the input is symmetrized first).
inline Eigen::SelfAdjointEigenSolver<Matrix> hermitian_eigen(const Matrix& h) {
  const Matrix sym = 0.5 * (h + h.adjoint());
  return Eigen::SelfAdjointEigenSolver<Matrix>(sym);
}

inline Complex trace_product(const Matrix& a, const Matrix& b) {
  // Tr(a b) without forming the product.
  Complex acc{0.0, 0.0};
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) acc += a(i, j) * b(j, i);
  }
  return acc;
}

}  // namespace cstar
