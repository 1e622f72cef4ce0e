#pragma once

// dist(x, V) under the operator or trace norm by ADMM on the consensus form
//   minimize ||Z||  subject to  Z = x - sum_j c_j y_j,
// with dual certificates a in N_V whose pairing value lower-bounds the
// distance. The certificate gap is the stopping criterion.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cstar/algebra.hpp"
#include "cstar/error.hpp"
#include "cstar/matrix_core.hpp"

namespace cstar {

struct SolveOptions {
  double tol = 1e-6;            // duality-gap target (absolute)
  std::size_t max_iter = 20000;
  double penalty = 1.0;         // ADMM penalty on the normalized problem
  std::uint64_t seed = 0;
  std::size_t restarts = 3;     // random starts in addition to c0 = 0

  void validate() const {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "options: tol must be > 0");
    if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "options: max_iter must be >= 1");
    if (!(penalty > 0.0)) throw Error(ErrorCode::InvalidArgument, "options: penalty must be > 0");
  }
};

/// A witness a in N_V. For operator-distance problems the dual norm is the
/// trace norm of a, for trace-distance problems its operator norm.
struct DualCertificate {
  AlgebraElement witness;
  NormKind kind;
  double feasibility_residual;  // max_j |pairing(a, y_j)|
  double dual_norm;
  double value;                 // |pairing(a, x)|
};

struct DistanceReport {
  double primal_value;
  Vector best_coeffs;
  AlgebraElement best_approx;
  std::optional<DualCertificate> certificate;
  double gap;
  std::size_t iterations;
  bool converged;
};

struct CertificateCheck {
  double lower_bound;
  bool feasible;
  double value;
  double dual_norm;
  double feasibility_residual;
};

/// Acceptance thresholds for a certificate.
inline constexpr double kFeasibilityTol = 1e-8;
inline constexpr double kDualNormTol = 1e-8;

/// Recomputes everything from raw data; never consults solver state.
inline CertificateCheck verify_certificate(const AlgebraElement& x, const SubspaceBasis& v,
                                           const DualCertificate& cert) {
  require_same(x.signature(), v.signature(), "verify_certificate");
  require_same(x.signature(), cert.witness.signature(), "verify_certificate");
  CertificateCheck out{};
  out.dual_norm = norm(cert.witness, dual_of(cert.kind));
  out.feasibility_residual = max_pairing_residual(cert.witness, v);
  out.value = std::abs(pairing(cert.witness, x));
  out.feasible = out.feasibility_residual <= kFeasibilityTol && out.dual_norm <= 1.0 + kDualNormTol;
  out.lower_bound = out.value / std::max(out.dual_norm, 1.0);
  return out;
}

namespace detail {

/// Orthogonal projector onto N_V in vectorized form: v - Q Q^H v with Q an
/// orthonormal basis of span{vec(y_j^H)}.
class AnnihilatorProjector {
 public:
  explicit AnnihilatorProjector(const SubspaceBasis& v) {
    Matrix dirs(static_cast<Index>(v.signature().dimension()), static_cast<Index>(v.size()));
    for (std::size_t j = 0; j < v.size(); ++j) dirs.col(static_cast<Index>(j)) = v[j].adjoint().to_vector();
    q_ = svd(dirs).U;
  }

  Vector apply(const Vector& a) const { return a - q_ * (q_.adjoint() * a); }

  AlgebraElement apply(const AlgebraElement& a) const {
    return AlgebraElement::from_vector(a.signature(), apply(a.to_vector()));
  }

 private:
  Matrix q_;
};

struct Problem {
  const AlgebraElement& x;
  const SubspaceBasis& basis;
  NormKind kind;
  AnnihilatorProjector projector;
};

/// Project onto N_V, normalize to unit dual norm and fix the phase so that
/// pairing(a, residual) is real and nonnegative.
inline std::optional<DualCertificate> finalize_certificate(const Problem& prob, const AlgebraElement& candidate,
                                                           const AlgebraElement& residual) {
  AlgebraElement a = prob.projector.apply(candidate);
  const double dn = norm(a, dual_of(prob.kind));
  if (!(dn > 1e-300) || !std::isfinite(dn)) return std::nullopt;
  a *= Complex(1.0 / dn, 0.0);
  const Complex p = pairing(a, residual);
  if (std::abs(p) > 0.0) a *= std::conj(p) / std::abs(p);
  DualCertificate cert{a, prob.kind, 0.0, 0.0, 0.0};
  cert.feasibility_residual = max_pairing_residual(a, prob.basis);
  cert.dual_norm = norm(a, dual_of(prob.kind));
  cert.value = std::abs(pairing(a, prob.x));
  return cert;
}

inline double real_inner(const Vector& a, const Vector& b) { return a.dot(b).real(); }

// Gram-Schmidt in the real inner product Re<a, b>; drops dependent directions.
inline std::vector<Vector> real_orthonormalize(const std::vector<Vector>& dirs) {
  std::vector<Vector> out;
  for (const Vector& d : dirs) {
    Vector w = d;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& q : out) w -= real_inner(q, w) * q;
    }
    const double n = w.norm();
    const double scale = std::max(d.norm(), 1e-300);
    if (n > 1e-10 * scale) out.push_back(w / n);
  }
  return out;
}

struct FaceSearchLimits {
  int max_iter = 400;
  double stall = 1e-15;
};

// Operator-distance face: a_i = V1_i Z_i U1_i^H over the top singular cluster
// with Z_i Hermitian PSD and sum_i tr Z_i = 1. Dykstra between that
// spectraplex and the linear constraints pairing(a, y_j) = 0.
inline std::optional<AlgebraElement> operator_face_point(const AlgebraElement& r, const SubspaceBasis& basis,
                                                         double threshold,
                                                         const std::optional<AlgebraElement>& hint,
                                                         const FaceSearchLimits& limits = {}) {
  const std::vector<SvdResult> svds = block_svds(r);
  double sigma = 0.0;
  for (const SvdResult& d : svds) sigma = std::max(sigma, d.S(0));
  if (!(sigma > 0.0)) return std::nullopt;

  const std::size_t p = svds.size();
  std::vector<Index> sizes(p, 0);
  std::vector<Index> offsets(p, 0);
  Index total = 0;
  Index cluster = 0;
  for (std::size_t i = 0; i < p; ++i) {
    for (Index t = 0; t < svds[i].S.size(); ++t) {
      if (svds[i].S(t) >= sigma - threshold) ++sizes[i];
    }
    offsets[i] = total;
    total += sizes[i] * sizes[i];
    cluster += sizes[i];
  }

  auto block_of = [&](const Vector& z, std::size_t i) {
    const Index s = sizes[i];
    Matrix m(s, s);
    for (Index a = 0; a < s; ++a) {
      for (Index b = 0; b < s; ++b) m(a, b) = z(offsets[i] + a * s + b);
    }
    return m;
  };
  auto store = [&](Vector& z, std::size_t i, const Matrix& m) {
    const Index s = sizes[i];
    for (Index a = 0; a < s; ++a) {
      for (Index b = 0; b < s; ++b) z(offsets[i] + a * s + b) = m(a, b);
    }
  };

  // Real constraint directions: Re and Im of sum_i Tr(Z_i M_ji), M_ji = U1^H y_ji V1.
  std::vector<Vector> raw;
  for (const AlgebraElement& y : basis.elements()) {
    Vector re = Vector::Zero(total);
    Vector im = Vector::Zero(total);
    for (std::size_t i = 0; i < p; ++i) {
      if (sizes[i] == 0) continue;
      const Matrix m = svds[i].U.leftCols(sizes[i]).adjoint() * y.block(i) * svds[i].V.leftCols(sizes[i]);
      store(re, i, 0.5 * (m.adjoint() + m));
      store(im, i, (m.adjoint() - m) / Complex(0.0, 2.0));
    }
    raw.push_back(std::move(re));
    raw.push_back(std::move(im));
  }
  const std::vector<Vector> dirs = real_orthonormalize(raw);

  auto project_constraints = [&](const Vector& z) {
    Vector out = z;
    for (const Vector& d : dirs) out -= real_inner(d, out) * d;
    return out;
  };
  auto project_spectraplex = [&](const Vector& z) {
    std::vector<Eigen::SelfAdjointEigenSolver<Matrix>> eig;
    RealVector all(cluster);
    Index pos = 0;
    for (std::size_t i = 0; i < p; ++i) {
      if (sizes[i] == 0) {
        eig.emplace_back();
        continue;
      }
      eig.push_back(hermitian_eigen(block_of(z, i)));
      all.segment(pos, sizes[i]) = eig.back().eigenvalues();
      pos += sizes[i];
    }
    const RealVector lam = project_simplex(all, 1.0);
    Vector out(total);
    pos = 0;
    for (std::size_t i = 0; i < p; ++i) {
      if (sizes[i] == 0) continue;
      const Matrix& q = eig[i].eigenvectors();
      store(out, i, q * lam.segment(pos, sizes[i]).cast<Complex>().asDiagonal() * q.adjoint());
      pos += sizes[i];
    }
    return out;
  };

  Vector z(total);
  if (hint) {
    for (std::size_t i = 0; i < p; ++i) {
      if (sizes[i] == 0) continue;
      const Matrix m = svds[i].V.leftCols(sizes[i]).adjoint() * hint->block(i) * svds[i].U.leftCols(sizes[i]);
      store(z, i, 0.5 * (m + m.adjoint()));
    }
  } else {
    z.setZero();
    for (std::size_t i = 0; i < p; ++i) {
      store(z, i, Matrix::Identity(sizes[i], sizes[i]) / static_cast<double>(cluster));
    }
  }
  z = project_spectraplex(z);
  Vector corr = Vector::Zero(total);
  for (int it = 0; it < limits.max_iter; ++it) {
    const Vector y = project_constraints(z);
    const Vector next = project_spectraplex(y + corr);
    corr = y + corr - next;
    const double change = (next - z).norm();
    z = next;
    if (change <= limits.stall) break;
  }

  std::vector<Matrix> blocks;
  for (std::size_t i = 0; i < p; ++i) {
    const auto n = r.block(i).rows();
    if (sizes[i] == 0) {
      blocks.push_back(Matrix::Zero(n, n));
    } else {
      blocks.push_back(svds[i].V.leftCols(sizes[i]) * block_of(z, i) * svds[i].U.leftCols(sizes[i]).adjoint());
    }
  }
  return AlgebraElement(r.signature(), std::move(blocks));
}

// Trace-distance face: a_i = V_r U_r^H + Vp W_i Up^H with ||W_i|| <= 1 on the
// orthogonal complement of the singular supports. Dykstra between the
// affine constraints and the operator-norm ball.
inline std::optional<AlgebraElement> trace_face_point(const AlgebraElement& r, const SubspaceBasis& basis,
                                                      double threshold,
                                                      const std::optional<AlgebraElement>& hint,
                                                      const FaceSearchLimits& limits = {}) {
  const std::vector<SvdResult> svds = block_svds(r);
  double sigma = 0.0;
  for (const SvdResult& d : svds) sigma = std::max(sigma, d.S(0));
  if (!(sigma > 0.0)) return std::nullopt;

  const std::size_t p = svds.size();
  std::vector<Index> ranks(p), free_dims(p), offsets(p);
  std::vector<Matrix> fixed;
  Index total = 0;
  for (std::size_t i = 0; i < p; ++i) {
    const Index n = r.block(i).rows();
    ranks[i] = static_cast<Index>(svds[i].rank(threshold));
    free_dims[i] = n - ranks[i];
    offsets[i] = total;
    total += free_dims[i] * free_dims[i];
    fixed.push_back(svds[i].V.leftCols(ranks[i]) * svds[i].U.leftCols(ranks[i]).adjoint());
  }
  auto up = [&](std::size_t i) { return svds[i].U.rightCols(free_dims[i]); };
  auto vp = [&](std::size_t i) { return svds[i].V.rightCols(free_dims[i]); };
  auto assemble = [&](const Vector& w) {
    std::vector<Matrix> blocks;
    for (std::size_t i = 0; i < p; ++i) {
      const Index f = free_dims[i];
      Matrix wi(f, f);
      for (Index a = 0; a < f; ++a) {
        for (Index b = 0; b < f; ++b) wi(a, b) = w(offsets[i] + a * f + b);
      }
      blocks.push_back(fixed[i] + vp(i) * wi * up(i).adjoint());
    }
    return AlgebraElement(r.signature(), std::move(blocks));
  };
  if (total == 0) return assemble(Vector(0));

  // Constraint j: sum_i Tr(W_i G_ji) = -b_j with G_ji = Up^H y_ji Vp.
  const auto k = static_cast<Index>(basis.size());
  Matrix a(k, total);
  Vector b(k);
  for (Index j = 0; j < k; ++j) {
    const AlgebraElement& y = basis[static_cast<std::size_t>(j)];
    b(j) = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      b(j) += trace_product(fixed[i], y.block(i));
      const Index f = free_dims[i];
      if (f == 0) continue;
      const Matrix g = up(i).adjoint() * y.block(i) * vp(i);
      for (Index s = 0; s < f; ++s) {
        for (Index t = 0; t < f; ++t) a(j, offsets[i] + s * f + t) = g(t, s);
      }
    }
  }
  const SvdResult ad = svd(a);
  const double cut = ad.rank_tol();
  Matrix pinv = Matrix::Zero(total, k);
  for (Index t = 0; t < ad.S.size(); ++t) {
    if (ad.S(t) > cut) pinv += ad.V.col(t) * (ad.U.col(t).adjoint() / ad.S(t));
  }
  auto project_affine = [&](const Vector& w) -> Vector { return w - pinv * (a * w + b); };
  auto project_ball = [&](const Vector& w) {
    Vector out(total);
    for (std::size_t i = 0; i < p; ++i) {
      const Index f = free_dims[i];
      if (f == 0) continue;
      Matrix wi(f, f);
      for (Index s = 0; s < f; ++s) {
        for (Index t = 0; t < f; ++t) wi(s, t) = w(offsets[i] + s * f + t);
      }
      const SvdResult d = svd(wi);
      const Matrix clipped = rebuild(d, d.S.cwiseMin(1.0));
      for (Index s = 0; s < f; ++s) {
        for (Index t = 0; t < f; ++t) out(offsets[i] + s * f + t) = clipped(s, t);
      }
    }
    return out;
  };

  Vector w = Vector::Zero(total);
  if (hint) {
    for (std::size_t i = 0; i < p; ++i) {
      const Index f = free_dims[i];
      if (f == 0) continue;
      const Matrix wi = vp(i).adjoint() * hint->block(i) * up(i);
      for (Index s = 0; s < f; ++s) {
        for (Index t = 0; t < f; ++t) w(offsets[i] + s * f + t) = wi(s, t);
      }
    }
  }
  w = project_ball(w);
  Vector corr = Vector::Zero(total);
  for (int it = 0; it < limits.max_iter; ++it) {
    const Vector y = project_affine(w);
    const Vector next = project_ball(y + corr);
    corr = y + corr - next;
    const double change = (next - w).norm();
    w = next;
    if (change <= limits.stall) break;
  }
  return assemble(w);
}

/// Relative cluster/rank thresholds tried by the face search, smallest first.
inline std::vector<double> face_thresholds(const AlgebraSignature& sig) {
  std::size_t nmax = 1;
  for (std::size_t n : sig.block_dims()) nmax = std::max(nmax, n);
  return {static_cast<double>(nmax) * SvdConfig{}.tol_svd, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3};
}

/// Best certificate over all face thresholds; stops early once the gap
/// against `primal` drops to `target_gap`.
inline std::optional<DualCertificate> face_certificate(const Problem& prob, const AlgebraElement& residual,
                                                       double primal, double target_gap,
                                                       const std::optional<AlgebraElement>& hint) {
  double sigma = 0.0;
  for (const Matrix& blk : residual.blocks()) sigma = std::max(sigma, schatten_norm(blk, NormKind::Operator));
  if (!(sigma > 0.0)) return std::nullopt;
  std::optional<DualCertificate> best;
  for (double ratio : face_thresholds(residual.signature())) {
    const double threshold = ratio * sigma;
    const std::optional<AlgebraElement> point =
        prob.kind == NormKind::Operator ? operator_face_point(residual, prob.basis, threshold, hint)
                                        : trace_face_point(residual, prob.basis, threshold, hint);
    if (!point) continue;
    std::optional<DualCertificate> cert = finalize_certificate(prob, *point, residual);
    if (cert && (!best || cert->value > best->value)) best = std::move(cert);
    if (best && primal - best->value <= target_gap) break;
  }
  return best;
}

struct RunResult {
  Vector coeffs;  // original units
  double primal = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  bool residuals_ok = false;
};

}  // namespace detail

/// Searches the subdifferential face of norm(., kind) at x - best_approx for
/// a witness in N_V. Throws CertificateNotFound when no candidate survives.
inline DualCertificate extract_certificate(const AlgebraElement& x, const DistanceReport& report,
                                           const SubspaceBasis& v, NormKind kind,
                                           const std::optional<AlgebraElement>& hint = std::nullopt) {
  require_same(x.signature(), v.signature(), "extract_certificate");
  if (!(report.primal_value > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "extract_certificate: primal value must be > 0");
  }
  const detail::Problem prob{x, v, kind, detail::AnnihilatorProjector(v)};
  const AlgebraElement residual = x - report.best_approx;
  std::optional<DualCertificate> cert = detail::face_certificate(prob, residual, report.primal_value, 0.0, hint);
  if (!cert || cert->feasibility_residual > kFeasibilityTol) {
    throw Error(ErrorCode::CertificateNotFound,
                "extract_certificate: no feasible witness on the subdifferential face" +
                    (cert ? " (residual " + std::to_string(cert->feasibility_residual) + ")" : std::string()));
  }
  return *cert;
}

/// Minimizes norm(x - sum_j c_j y_j, kind). Never throws on non-convergence:
/// the best-so-far report comes back with converged = false.
inline DistanceReport solve_distance(const AlgebraElement& x, const SubspaceBasis& v, NormKind kind,
                                     const SolveOptions& opts = {}) {
  opts.validate();
  require_same(x.signature(), v.signature(), "solve_distance");
  const AlgebraSignature& sig = x.signature();
  const auto k = static_cast<Index>(v.size());

  const double scale = norm(x, kind);
  if (scale == 0.0) {
    return {0.0, Vector::Zero(k), AlgebraElement::zero(sig), std::nullopt, 0.0, 0, true};
  }

  const detail::Problem prob{x, v, kind, detail::AnnihilatorProjector(v)};
  const Matrix y = v.stacked();
  const Vector xh = x.to_vector() / scale;
  Matrix y_pinv;
  {
    const SvdResult d = svd(y);
    y_pinv = d.V * d.S.cwiseInverse().cast<Complex>().asDiagonal() * d.U.adjoint();
  }
  const double rho = opts.penalty;
  const double tol_scaled = opts.tol / scale;
  constexpr std::size_t kCheckEvery = 200;

  auto objective = [&](const Vector& coeffs) { return norm(x - v.combine(coeffs), kind); };

  std::optional<DualCertificate> best_cert;
  auto offer = [&](std::optional<DualCertificate> cert) {
    if (cert && cert->feasibility_residual <= kFeasibilityTol && (!best_cert || cert->value > best_cert->value)) {
      best_cert = std::move(cert);
    }
  };
  auto lower = [&]() { return best_cert ? best_cert->value : 0.0; };

  auto run = [&](const Vector& c0) {
    detail::RunResult res;
    Vector c = c0;
    Vector yc = y * c;
    Vector u = Vector::Zero(xh.size());
    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
      const AlgebraElement target = AlgebraElement::from_vector(sig, xh - yc - u);
      const Vector z = prox_norm(target, kind, 1.0 / rho).to_vector();
      const Vector c_prev = c;
      c = y_pinv * (xh - z - u);
      yc = y * c;
      const Vector r = z + yc - xh;
      u += r;
      res.iterations = it;
      if (it % kCheckEvery != 0 && it != opts.max_iter) continue;

      const double r_norm = r.norm();
      const double s_norm = rho * (y * (c - c_prev)).norm();
      const Vector coeffs = scale * c;
      const double primal = objective(coeffs);
      if (primal < res.primal) {
        res.primal = primal;
        res.coeffs = coeffs;
      }
      const AlgebraElement residual = x - v.combine(res.coeffs);
      // Scaled ADMM dual: -rho*u is a subgradient, so its adjoint pairs with Z.
      offer(detail::finalize_certificate(prob, AlgebraElement::from_vector(sig, -u).adjoint(), residual));
      if (res.primal - lower() > opts.tol) {
        std::optional<AlgebraElement> hint;
        if (best_cert) hint = best_cert->witness;
        offer(detail::face_certificate(prob, residual, res.primal, opts.tol / 10.0, hint));
      }
      res.residuals_ok = r_norm <= tol_scaled / 10.0 && s_norm <= tol_scaled / 10.0;
      if (res.residuals_ok && res.primal - lower() <= opts.tol) break;
    }
    return res;
  };

  std::vector<Vector> starts{Vector::Zero(k)};
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t s = 0; s < opts.restarts; ++s) {
    Vector c0(k);
    for (Index j = 0; j < k; ++j) {
      const double yn = norm(v[static_cast<std::size_t>(j)], kind);
      c0(j) = Complex(normal(rng), normal(rng)) / (std::sqrt(2.0) * yn);
    }
    starts.push_back(std::move(c0));
  }

  std::vector<detail::RunResult> runs;
  for (const Vector& c0 : starts) runs.push_back(run(c0));

  // Smallest ||c|| among converged runs, else the smallest primal value.
  const detail::RunResult* chosen = nullptr;
  for (const detail::RunResult& r : runs) {
    const bool ok = r.residuals_ok && r.primal - lower() <= opts.tol;
    if (ok && (!chosen || r.coeffs.norm() < chosen->coeffs.norm())) chosen = &r;
  }
  bool converged = chosen != nullptr;
  if (!chosen) {
    for (const detail::RunResult& r : runs) {
      if (!chosen || r.primal < chosen->primal) chosen = &r;
    }
  }
  DistanceReport report{chosen->primal, chosen->coeffs, v.combine(chosen->coeffs), best_cert,
                        chosen->primal - lower(), chosen->iterations, converged};
  return report;
}

struct GridSpec {
  std::size_t points_per_axis = 41;
  std::size_t refinements = 6;
};

/// Exhaustive grid over the 2k real coordinates of the coefficients in the
/// box |Re c_j|, |Im c_j| <= 2 norm(x) / min_j norm(y_j), followed by zoomed
/// grids around the incumbent. Every returned value is an attained
/// objective, so it never undercuts the true distance.
inline double brute_force_distance(const AlgebraElement& x, const SubspaceBasis& v, NormKind kind,
                                   const GridSpec& grid = {}) {
  require_same(x.signature(), v.signature(), "brute_force_distance");
  const std::size_t k = v.size();
  if (k > 2) throw Error(ErrorCode::TooManyDimensions, "brute_force_distance: needs k <= 2");
  if (grid.points_per_axis < 2) throw Error(ErrorCode::InvalidArgument, "brute_force_distance: grid too coarse");
  const std::size_t axes = 2 * k;
  double min_y = std::numeric_limits<double>::infinity();
  for (const AlgebraElement& y : v.elements()) min_y = std::min(min_y, norm(y, kind));
  const double radius = 2.0 * norm(x, kind) / min_y;

  std::vector<double> center(axes, 0.0);
  double half = radius;
  double best = norm(x, kind);
  std::vector<double> best_point(axes, 0.0);
  const std::size_t m = grid.points_per_axis;
  for (std::size_t level = 0; level <= grid.refinements; ++level) {
    const double step = 2.0 * half / static_cast<double>(m - 1);
    std::vector<std::size_t> idx(axes, 0);
    while (true) {
      Vector c(static_cast<Index>(k));
      std::vector<double> point(axes);
      for (std::size_t a = 0; a < axes; ++a) point[a] = center[a] - half + step * static_cast<double>(idx[a]);
      for (std::size_t j = 0; j < k; ++j) c(static_cast<Index>(j)) = Complex(point[2 * j], point[2 * j + 1]);
      const double val = norm(x - v.combine(c), kind);
      if (val < best) {
        best = val;
        best_point = point;
      }
      std::size_t a = 0;
      while (a < axes && ++idx[a] == m) idx[a++] = 0;
      if (a == axes) break;
    }
    center = best_point;
    half = 2.0 * step;
  }
  return best;
}

}  // namespace cstar
