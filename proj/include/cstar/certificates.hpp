#pragma once

// Singer-form certificates (convex combinations of unitaries), trace-norm
// smoothness and Birkhoff-James orthogonality.

#include <cmath>
#include <numbers>
#include <vector>

#include "cstar/algebra.hpp"
#include "cstar/error.hpp"
#include "cstar/solver.hpp"

namespace cstar {

struct SingerCertificate {
  std::vector<double> weights;
  std::vector<AlgebraElement> unitaries;

  std::size_t size() const { return weights.size(); }

  /// sum_i lambda_i u_i
  AlgebraElement aggregate() const {
    AlgebraElement out = AlgebraElement::zero(unitaries.at(0).signature());
    for (std::size_t i = 0; i < weights.size(); ++i) out += Complex(weights[i], 0.0) * unitaries[i];
    return out;
  }
};

inline bool is_blockwise_unitary(const AlgebraElement& u, double tol = 1e-10) {
  for (const Matrix& b : u.blocks()) {
    if ((b.adjoint() * b - Matrix::Identity(b.rows(), b.cols())).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

/// Writes a contraction a as 1/2 (u1 + u2) with unitaries u = P D Q^H,
/// D = diag(exp(+-i arccos s)) from the SVD a = P diag(s) Q^H. An already
/// unitary a comes back as a single term.
inline SingerCertificate singer_decompose(const AlgebraElement& a) {
  constexpr double kContractionTol = 1e-10;
  if (norm(a, NormKind::Operator) > 1.0 + kContractionTol) {
    throw Error(ErrorCode::NotAContraction, "singer_decompose: operator norm exceeds 1");
  }
  if (is_blockwise_unitary(a)) return {{1.0}, {a}};
  std::vector<Matrix> plus;
  std::vector<Matrix> minus;
  for (const Matrix& b : a.blocks()) {
    const SvdResult d = svd(b);
    Vector phase(d.S.size());
    for (Index i = 0; i < d.S.size(); ++i) phase(i) = std::polar(1.0, std::acos(std::min(d.S(i), 1.0)));
    plus.push_back(d.U * phase.asDiagonal() * d.V.adjoint());
    minus.push_back(d.U * phase.conjugate().asDiagonal() * d.V.adjoint());
  }
  return {{0.5, 0.5},
          {AlgebraElement(a.signature(), std::move(plus)), AlgebraElement(a.signature(), std::move(minus))}};
}

struct SingerCheck {
  double value;           // Re sum_i lambda_i pairing(u_i, x)
  bool feasible;
  double phase_residual;  // |Im sum_i lambda_i pairing(u_i, x - v0)|
  double annihilation_residual;
};

/// Conditions checked in aggregate on A = sum_i lambda_i u_i:
/// Im pairing(A, x - v0) = 0 and pairing(A, y_j) = 0 for every j.
inline SingerCheck verify_singer(const AlgebraElement& x, const SubspaceBasis& v, const AlgebraElement& v0,
                                 const SingerCertificate& cert) {
  require_same(x.signature(), v.signature(), "verify_singer");
  require_same(x.signature(), v0.signature(), "verify_singer");
  if (cert.weights.empty() || cert.weights.size() != cert.unitaries.size()) {
    throw Error(ErrorCode::InvalidArgument, "verify_singer: weights and unitaries must pair up");
  }
  double total = 0.0;
  bool structurally_ok = cert.size() <= 2 * v.size() + 1;
  for (std::size_t i = 0; i < cert.size(); ++i) {
    require_same(x.signature(), cert.unitaries[i].signature(), "verify_singer");
    structurally_ok = structurally_ok && cert.weights[i] >= 0.0 && is_blockwise_unitary(cert.unitaries[i]);
    total += cert.weights[i];
  }
  structurally_ok = structurally_ok && std::abs(total - 1.0) <= 1e-12;

  const AlgebraElement agg = cert.aggregate();
  SingerCheck out{};
  out.phase_residual = std::abs(pairing(agg, x - v0).imag());
  out.annihilation_residual = max_pairing_residual(agg, v);
  out.value = pairing(agg, x).real();
  out.feasible = structurally_ok && out.phase_residual <= kFeasibilityTol &&
                 out.annihilation_residual <= kFeasibilityTol;
  return out;
}

struct SmoothnessResult {
  bool smooth;
  /// Some block's smallest singular value sits within 1e3 x of the rank threshold.
  bool borderline;
};

/// Smooth for the trace norm iff every block has full numerical rank; the
/// threshold is max(n) * tol_svd * (largest singular value of x).
inline SmoothnessResult is_smooth_trace(const AlgebraElement& x, const SvdConfig& cfg = {}) {
  const std::vector<SvdResult> svds = block_svds(x, cfg);
  double top = 0.0;
  std::size_t nmax = 1;
  for (const SvdResult& d : svds) {
    top = std::max(top, d.S(0));
    nmax = std::max<std::size_t>(nmax, static_cast<std::size_t>(d.S.size()));
  }
  if (top == 0.0) throw Error(ErrorCode::ZeroElement, "is_smooth_trace: x is zero");
  const double threshold = static_cast<double>(nmax) * cfg.tol_svd * top;
  SmoothnessResult out{true, false};
  for (const SvdResult& d : svds) {
    const double smallest = d.S(d.S.size() - 1);
    if (smallest <= threshold) out.smooth = false;
    if (smallest > threshold * 1e-3 && smallest <= threshold * 1e3) out.borderline = true;
  }
  return out;
}

/// Blocks (polar factor of x_i)^H: the unique trace-norm support functional
/// of a smooth x.
inline AlgebraElement polar_adjoint(const AlgebraElement& x, const SvdConfig& cfg = {}) {
  std::vector<Matrix> blocks;
  for (const Matrix& b : x.blocks()) blocks.push_back(polar_decompose(b, cfg).v.adjoint());
  return {x.signature(), std::move(blocks)};
}

/// For smooth x, 0 is a best trace-norm approximant out of V iff the polar
/// adjoint annihilates V.
inline bool check_zero_best_approx(const AlgebraElement& x, const SubspaceBasis& v) {
  require_same(x.signature(), v.signature(), "check_zero_best_approx");
  if (!is_smooth_trace(x).smooth) {
    throw Error(ErrorCode::NotSmooth, "check_zero_best_approx: criterion needs a full-rank x");
  }
  return max_pairing_residual(polar_adjoint(x), v) <= kFeasibilityTol;
}

/// x is Birkhoff-James orthogonal to V iff 0 is a best approximant.
inline bool bj_orthogonal(const AlgebraElement& x, const SubspaceBasis& v, NormKind kind,
                          const SolveOptions& opts = {}) {
  const DistanceReport report = solve_distance(x, v, kind, opts);
  return report.primal_value >= norm(x, kind) - opts.tol;
}

}  // namespace cstar
