#pragma once

// Operators on l2(N) of the form "finite head block + weighted unilateral
// shift + finitely many extra entries", their essential quantity
// Delta(x) = limsup |w_n|, and trace-norm distances through N x N truncation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "cstar/algebra.hpp"
#include "cstar/error.hpp"
#include "cstar/solver.hpp"

namespace cstar {

/// w_m = value for every m.
struct ConstantWeights {
  Complex value;
};
/// w_m = first * ratio^m.
struct GeometricWeights {
  Complex first;
  double ratio;
};
/// w_m = values[m] for m < values.size(), then tail.
struct ExplicitWeights {
  std::vector<Complex> values;
  Complex tail;
};
/// w_m = limit + scale / (m + 1).
struct HarmonicWeights {
  double limit;
  double scale;
};
/// Library-only escape hatch: a pure generator with declared limsup |w_m|
/// and tail sums sum_{m' >= m} |w_m'|.
struct CustomWeights {
  std::function<Complex(std::size_t)> weight;
  double limsup;
  std::function<double(std::size_t)> tail_sum;
};

using WeightRule = std::variant<ConstantWeights, GeometricWeights, ExplicitWeights, HarmonicWeights, CustomWeights>;

struct CouplingEntry {
  std::size_t row;
  std::size_t col;
  Complex value;
};

/// x = head (top-left d x d) + sum_{n >= shift_start} w_{n - shift_start} E_{n+1, n} + coupling.
class TailOperator {
 public:
  TailOperator(Matrix head, std::size_t shift_start, WeightRule weights, std::vector<CouplingEntry> coupling = {})
      : head_(std::move(head)), shift_start_(shift_start), weights_(std::move(weights)), coupling_(std::move(coupling)) {
    if (head_.rows() < 1 || head_.rows() != head_.cols()) {
      throw Error(ErrorCode::InvalidArgument, "tail operator: head must be square and nonempty");
    }
    require_finite(head_, "tail operator head");
    if (shift_start_ + 1 < head_dim()) {
      throw Error(ErrorCode::InvalidArgument, "tail operator: shift_start must be >= head dimension - 1");
    }
  }

  /// Finite-rank operator supported on the head block.
  static TailOperator finite(Matrix head) {
    const auto d = static_cast<std::size_t>(head.rows());
    return {std::move(head), d, ConstantWeights{0.0}};
  }

  const Matrix& head() const { return head_; }
  std::size_t head_dim() const { return static_cast<std::size_t>(head_.rows()); }
  std::size_t shift_start() const { return shift_start_; }
  const WeightRule& weights() const { return weights_; }
  const std::vector<CouplingEntry>& coupling() const { return coupling_; }

  /// Weight of the shift entry (n + 1, n); zero before shift_start.
  Complex weight(std::size_t n) const {
    if (n < shift_start_) return 0.0;
    const std::size_t m = n - shift_start_;
    return std::visit(
        [m](const auto& w) -> Complex {
          using T = std::decay_t<decltype(w)>;
          if constexpr (std::is_same_v<T, ConstantWeights>) {
            return w.value;
          } else if constexpr (std::is_same_v<T, GeometricWeights>) {
            return w.first * std::pow(w.ratio, static_cast<double>(m));
          } else if constexpr (std::is_same_v<T, ExplicitWeights>) {
            return m < w.values.size() ? w.values[m] : w.tail;
          } else if constexpr (std::is_same_v<T, HarmonicWeights>) {
            return w.limit + w.scale / static_cast<double>(m + 1);
          } else {
            return w.weight(m);
          }
        },
        weights_);
  }

  /// limsup_m |w_m|; unbounded weight rules raise UnsupportedForm.
  double limsup_weight() const {
    return std::visit(
        [](const auto& w) -> double {
          using T = std::decay_t<decltype(w)>;
          if constexpr (std::is_same_v<T, ConstantWeights>) {
            return std::abs(w.value);
          } else if constexpr (std::is_same_v<T, GeometricWeights>) {
            const double r = std::abs(w.ratio);
            if (w.first == Complex(0.0) || r < 1.0) return 0.0;
            if (r == 1.0) return std::abs(w.first);
            throw Error(ErrorCode::UnsupportedForm, "geometric weights with |ratio| > 1 are unbounded");
          } else if constexpr (std::is_same_v<T, ExplicitWeights>) {
            return std::abs(w.tail);
          } else if constexpr (std::is_same_v<T, HarmonicWeights>) {
            return std::abs(w.limit);
          } else {
            return w.limsup;
          }
        },
        weights_);
  }

  /// sum_{n >= from_n} |w_n| (infinite when not summable).
  double weight_tail_sum(std::size_t from_n) const {
    const std::size_t m = from_n > shift_start_ ? from_n - shift_start_ : 0;
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(
        [m](const auto& w) -> double {
          using T = std::decay_t<decltype(w)>;
          if constexpr (std::is_same_v<T, ConstantWeights>) {
            return w.value == Complex(0.0) ? 0.0 : inf;
          } else if constexpr (std::is_same_v<T, GeometricWeights>) {
            const double r = std::abs(w.ratio);
            if (w.first == Complex(0.0)) return 0.0;
            if (r >= 1.0) return inf;
            return std::abs(w.first) * std::pow(r, static_cast<double>(m)) / (1.0 - r);
          } else if constexpr (std::is_same_v<T, ExplicitWeights>) {
            double acc = w.tail == Complex(0.0) ? 0.0 : inf;
            for (std::size_t i = m; i < w.values.size(); ++i) acc += std::abs(w.values[i]);
            return acc;
          } else if constexpr (std::is_same_v<T, HarmonicWeights>) {
            return w.limit == 0.0 && w.scale == 0.0 ? 0.0 : inf;
          } else {
            return w.tail_sum(m);
          }
        },
        weights_);
  }

  /// Trace norm of x - P_N x P_N: shift entries leaving the corner are in
  /// distinct rows and columns, so their part is exact; coupling entries
  /// outside the corner are added by the triangle inequality.
  double trace_tail_bound(std::size_t n) const {
    double bound = weight_tail_sum(n == 0 ? 0 : n - 1);
    for (const CouplingEntry& e : coupling_) {
      if (e.row >= n || e.col >= n) bound += std::abs(e.value);
    }
    return bound;
  }

  Complex entry(std::size_t row, std::size_t col) const {
    Complex v = 0.0;
    if (row < head_dim() && col < head_dim()) v += head_(static_cast<Index>(row), static_cast<Index>(col));
    if (row == col + 1) v += weight(col);
    for (const CouplingEntry& e : coupling_) {
      if (e.row == row && e.col == col) v += e.value;
    }
    return v;
  }

  /// ||x zeta_n|| evaluated directly from the entries of column n.
  double basis_image_norm(std::size_t n) const {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < head_dim(); ++r) rows.push_back(r);
    rows.push_back(n + 1);
    for (const CouplingEntry& e : coupling_) {
      if (e.col == n) rows.push_back(e.row);
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    double acc = 0.0;
    for (std::size_t r : rows) acc += std::norm(entry(r, n));
    return std::sqrt(acc);
  }

  /// Smallest N with every nonzero entry inside the N x N corner, if finite.
  std::optional<std::size_t> support_size() const {
    if (weight_tail_sum(0) != 0.0) {
      // Nonzero weights: only an explicit list with a zero tail is finite.
      const auto* ex = std::get_if<ExplicitWeights>(&weights_);
      if (ex == nullptr || ex->tail != Complex(0.0)) return std::nullopt;
    }
    std::size_t n = head_dim();
    if (const auto* ex = std::get_if<ExplicitWeights>(&weights_)) {
      for (std::size_t m = 0; m < ex->values.size(); ++m) {
        if (ex->values[m] != Complex(0.0)) n = std::max(n, shift_start_ + m + 2);
      }
    }
    for (const CouplingEntry& e : coupling_) n = std::max({n, e.row + 1, e.col + 1});
    return n;
  }

 private:
  Matrix head_;
  std::size_t shift_start_;
  WeightRule weights_;
  std::vector<CouplingEntry> coupling_;
};

struct Truncation {
  std::size_t n;
  Matrix element;      // P_N x P_N
  double error_bound;  // >= ||x - P_N x P_N||_1, +inf when not trace class
};

/// Delta(x) = sup over weakly null unit sequences of limsup ||x zeta_n||.
/// Head and coupling are finite rank, so only the shift weights matter.
inline double delta_ess(const TailOperator& x) { return x.limsup_weight(); }

inline Truncation truncate(const TailOperator& x, std::size_t n) {
  if (n < x.head_dim()) {
    throw Error(ErrorCode::TooSmall, "truncate: N=" + std::to_string(n) + " is below the head dimension " +
                                         std::to_string(x.head_dim()));
  }
  Matrix m = Matrix::Zero(static_cast<Index>(n), static_cast<Index>(n));
  const auto d = static_cast<Index>(x.head_dim());
  m.topLeftCorner(d, d) = x.head();
  for (std::size_t col = x.shift_start(); col + 1 < n; ++col) {
    m(static_cast<Index>(col + 1), static_cast<Index>(col)) += x.weight(col);
  }
  for (const CouplingEntry& e : x.coupling()) {
    if (e.row < n && e.col < n) m(static_cast<Index>(e.row), static_cast<Index>(e.col)) += e.value;
  }
  return {n, std::move(m), x.trace_tail_bound(n)};
}

struct TruncatedProblem {
  Truncation x;
  AlgebraElement element;
  SubspaceBasis basis;
};

/// Truncates x and the (finitely supported) generators at a common N.
inline TruncatedProblem truncate_problem(const TailOperator& x, const std::vector<TailOperator>& generators,
                                         std::size_t n) {
  Truncation tx = truncate(x, n);
  const AlgebraSignature sig({n});
  std::vector<AlgebraElement> ys;
  for (const TailOperator& g : generators) {
    const std::optional<std::size_t> support = g.support_size();
    if (!support) throw Error(ErrorCode::InvalidArgument, "subspace generators must have finite support");
    if (*support > n) {
      throw Error(ErrorCode::TooSmall, "truncation N=" + std::to_string(n) + " cuts a subspace generator");
    }
    ys.emplace_back(sig, std::vector<Matrix>{truncate(g, n).element});
  }
  AlgebraElement element(sig, {tx.element});
  return {std::move(tx), std::move(element), SubspaceBasis(std::move(ys))};
}

/// Smallest N that holds every generator's support and x's head.
inline std::size_t minimal_truncation(const TailOperator& x, const std::vector<TailOperator>& generators) {
  std::size_t n = x.head_dim();
  for (const TailOperator& g : generators) {
    const std::optional<std::size_t> support = g.support_size();
    if (!support) throw Error(ErrorCode::InvalidArgument, "subspace generators must have finite support");
    n = std::max(n, *support);
  }
  return n;
}

struct TailDistance {
  double lo;
  double hi;
  std::size_t n;
  double error_bound;
  DistanceReport report;
  TruncatedProblem problem;
};

inline constexpr std::size_t kMaxTruncation = 512;

/// dist_1(x, V) enclosed by an interval: |dist_1(x,V) - dist_1(x_N,V)| is at
/// most ||x - x_N||_1, and the truncated problem is solved to tol/2.
inline TailDistance dist1_tail(const TailOperator& x, const std::vector<TailOperator>& generators, double tol,
                               SolveOptions opts = {}) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "dist1_tail: tol must be > 0");
  if (generators.empty()) throw Error(ErrorCode::InvalidArgument, "dist1_tail: needs at least one generator");
  std::size_t n = minimal_truncation(x, generators);
  while (x.trace_tail_bound(n) > tol / 2.0) {
    if (++n > kMaxTruncation) {
      throw Error(ErrorCode::NoFiniteN, "dist1_tail: tail bound stays above tol/2 up to N=" +
                                            std::to_string(kMaxTruncation));
    }
  }
  opts.tol = tol / 2.0;
  TruncatedProblem prob = truncate_problem(x, generators, n);
  DistanceReport report = solve_distance(prob.element, prob.basis, NormKind::Trace, opts);
  const double bound = prob.x.error_bound;
  double lo = 0.0;
  double hi = report.primal_value + bound + tol / 2.0;
  if (report.converged) {
    lo = report.primal_value - bound - tol / 2.0;
  } else if (report.certificate) {
    lo = report.certificate->value - bound;
  } else {
    lo = -bound;
  }
  return {std::max(lo, 0.0), hi, n, bound, std::move(report), std::move(prob)};
}

}  // namespace cstar
