#pragma once

// Finite-dimensional C*-algebras M_{n1} (+) ... (+) M_{np}: block elements,
// the operator / trace norms, the bilinear trace pairing and annihilators.

#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cstar/error.hpp"
#include "cstar/matrix_core.hpp"

namespace cstar {

class AlgebraSignature {
 public:
  AlgebraSignature() = default;
  explicit AlgebraSignature(std::vector<std::size_t> block_dims) : dims_(std::move(block_dims)) {
    if (dims_.empty()) throw Error(ErrorCode::InvalidArgument, "signature: needs at least one block");
    for (std::size_t n : dims_) {
      if (n == 0) throw Error(ErrorCode::InvalidArgument, "signature: block dimensions must be >= 1");
    }
  }

  const std::vector<std::size_t>& block_dims() const { return dims_; }
  std::size_t block_count() const { return dims_.size(); }
  std::size_t block_dim(std::size_t i) const { return dims_.at(i); }

  /// Complex dimension of the algebra, sum of n_i^2.
  std::size_t dimension() const {
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{0},
                           [](std::size_t acc, std::size_t n) { return acc + n * n; });
  }

  std::size_t offset(std::size_t block) const {
    std::size_t off = 0;
    for (std::size_t i = 0; i < block; ++i) off += dims_[i] * dims_[i];
    return off;
  }

  friend bool operator==(const AlgebraSignature&, const AlgebraSignature&) = default;

 private:
  std::vector<std::size_t> dims_;
};

inline void require_same(const AlgebraSignature& a, const AlgebraSignature& b, std::string_view where) {
  if (!(a == b)) throw Error(ErrorCode::SignatureMismatch, std::string(where) + ": signatures differ");
}

/// A point (x_1, ..., x_p) of the block algebra.
class AlgebraElement {
 public:
  AlgebraElement(AlgebraSignature signature, std::vector<Matrix> blocks)
      : signature_(std::move(signature)), blocks_(std::move(blocks)) {
    if (blocks_.size() != signature_.block_count()) {
      throw Error(ErrorCode::SignatureMismatch, "element: block count does not match signature");
    }
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const auto n = static_cast<Index>(signature_.block_dim(i));
      if (blocks_[i].rows() != n || blocks_[i].cols() != n) {
        throw Error(ErrorCode::SignatureMismatch,
                    "element: block " + std::to_string(i) + " is not " + std::to_string(n) + "x" +
                        std::to_string(n));
      }
      require_finite(blocks_[i], "element");
    }
  }

  static AlgebraElement zero(const AlgebraSignature& sig) {
    std::vector<Matrix> blocks;
    for (std::size_t n : sig.block_dims()) blocks.push_back(Matrix::Zero(static_cast<Index>(n), static_cast<Index>(n)));
    return {sig, std::move(blocks)};
  }

  static AlgebraElement identity(const AlgebraSignature& sig) {
    std::vector<Matrix> blocks;
    for (std::size_t n : sig.block_dims()) {
      blocks.push_back(Matrix::Identity(static_cast<Index>(n), static_cast<Index>(n)));
    }
    return {sig, std::move(blocks)};
  }

  /// Inverse of to_vector(): blocks laid out consecutively, each row-major.
  static AlgebraElement from_vector(const AlgebraSignature& sig, const Vector& v) {
    if (static_cast<std::size_t>(v.size()) != sig.dimension()) {
      throw Error(ErrorCode::SignatureMismatch, "from_vector: length does not match signature");
    }
    std::vector<Matrix> blocks;
    Index pos = 0;
    for (std::size_t n_ : sig.block_dims()) {
      const auto n = static_cast<Index>(n_);
      Matrix b(n, n);
      for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < n; ++c) b(r, c) = v(pos++);
      }
      blocks.push_back(std::move(b));
    }
    return {sig, std::move(blocks)};
  }

  Vector to_vector() const {
    Vector v(static_cast<Index>(signature_.dimension()));
    Index pos = 0;
    for (const Matrix& b : blocks_) {
      for (Index r = 0; r < b.rows(); ++r) {
        for (Index c = 0; c < b.cols(); ++c) v(pos++) = b(r, c);
      }
    }
    return v;
  }

  const AlgebraSignature& signature() const { return signature_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& block(std::size_t i) const { return blocks_.at(i); }
  std::size_t block_count() const { return blocks_.size(); }

  AlgebraElement adjoint() const {
    std::vector<Matrix> out;
    for (const Matrix& b : blocks_) out.push_back(b.adjoint());
    return {signature_, std::move(out)};
  }

  AlgebraElement& operator+=(const AlgebraElement& o) {
    require_same(signature_, o.signature_, "operator+=");
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += o.blocks_[i];
    return *this;
  }
  AlgebraElement& operator-=(const AlgebraElement& o) {
    require_same(signature_, o.signature_, "operator-=");
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= o.blocks_[i];
    return *this;
  }
  AlgebraElement& operator*=(Complex s) {
    for (Matrix& b : blocks_) b *= s;
    return *this;
  }

  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
  friend AlgebraElement operator*(Complex s, AlgebraElement a) { return a *= s; }
  friend AlgebraElement operator*(AlgebraElement a, Complex s) { return a *= s; }

 private:
  AlgebraSignature signature_;
  std::vector<Matrix> blocks_;
};

/// Hermitian Frobenius inner product sum_i Tr(a_i^H b_i).
inline Complex frobenius_inner(const AlgebraElement& a, const AlgebraElement& b) {
  require_same(a.signature(), b.signature(), "frobenius_inner");
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.block_count(); ++i) acc += a.block(i).cwiseProduct(b.block(i).conjugate()).sum();
  return std::conj(acc);
}

inline double frobenius_norm(const AlgebraElement& a) {
  double acc = 0.0;
  for (const Matrix& b : a.blocks()) acc += b.squaredNorm();
  return std::sqrt(acc);
}

/// Operator norm is the max of block operator norms; trace norm the sum of
/// block trace norms.
inline double norm(const AlgebraElement& x, NormKind kind, const SvdConfig& cfg = {}) {
  double acc = 0.0;
  for (const Matrix& b : x.blocks()) {
    const double nb = schatten_norm(b, kind, cfg);
    acc = kind == NormKind::Operator ? std::max(acc, nb) : acc + nb;
  }
  return acc;
}

/// Bilinear trace pairing sum_i Tr(a_i x_i).
inline Complex pairing(const AlgebraElement& a, const AlgebraElement& x) {
  require_same(a.signature(), x.signature(), "pairing");
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.block_count(); ++i) acc += trace_product(a.block(i), x.block(i));
  return acc;
}

/// Per-block SVDs of an element; the singular values of the block-diagonal
/// matrix are the union of these.
inline std::vector<SvdResult> block_svds(const AlgebraElement& x, const SvdConfig& cfg = {}) {
  std::vector<SvdResult> out;
  out.reserve(x.block_count());
  for (const Matrix& b : x.blocks()) out.push_back(svd(b, cfg));
  return out;
}

/// Proximal map of step * norm(., kind) on the whole element. The operator
/// case couples the blocks through one joint l1-ball projection.
inline AlgebraElement prox_norm(const AlgebraElement& a, NormKind kind, double step, const SvdConfig& cfg = {}) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "prox_norm: step must be > 0");
  const std::vector<SvdResult> svds = block_svds(a, cfg);
  Index total = 0;
  for (const SvdResult& d : svds) total += d.S.size();
  RealVector all(total);
  Index pos = 0;
  for (const SvdResult& d : svds) {
    all.segment(pos, d.S.size()) = d.S;
    pos += d.S.size();
  }
  const RealVector shrunk = prox_singular_values(all, kind, step);
  std::vector<Matrix> blocks;
  pos = 0;
  for (const SvdResult& d : svds) {
    blocks.push_back(rebuild(d, shrunk.segment(pos, d.S.size())));
    pos += d.S.size();
  }
  return {a.signature(), std::move(blocks)};
}

/// Linearly independent generators y_1..y_k of a subspace V.
class SubspaceBasis {
 public:
  /// Independence threshold: smallest singular value of the stacked
  /// vectorizations must exceed this fraction of the largest.
  static constexpr double kIndependenceTol = 1e-8;

  explicit SubspaceBasis(std::vector<AlgebraElement> elements) : elements_(std::move(elements)) {
    if (elements_.empty()) throw Error(ErrorCode::InvalidArgument, "basis: needs at least one generator");
    for (const AlgebraElement& e : elements_) require_same(e.signature(), elements_.front().signature(), "basis");
    const RealVector s = svd(stacked()).S;
    if (s(0) == 0.0 || s(s.size() - 1) <= kIndependenceTol * s(0)) {
      throw Error(ErrorCode::DependentBasis, "basis: generators are numerically dependent");
    }
  }

  const AlgebraSignature& signature() const { return elements_.front().signature(); }
  const std::vector<AlgebraElement>& elements() const { return elements_; }
  const AlgebraElement& operator[](std::size_t j) const { return elements_.at(j); }
  std::size_t size() const { return elements_.size(); }

  /// D x k matrix whose column j is to_vector(y_j).
  Matrix stacked() const {
    Matrix m(static_cast<Index>(signature().dimension()), static_cast<Index>(elements_.size()));
    for (std::size_t j = 0; j < elements_.size(); ++j) m.col(static_cast<Index>(j)) = elements_[j].to_vector();
    return m;
  }

  /// sum_j c_j y_j
  AlgebraElement combine(const Vector& coeffs) const {
    if (static_cast<std::size_t>(coeffs.size()) != elements_.size()) {
      throw Error(ErrorCode::InvalidArgument, "combine: coefficient count does not match basis");
    }
    AlgebraElement out = AlgebraElement::zero(signature());
    for (std::size_t j = 0; j < elements_.size(); ++j) out += coeffs(static_cast<Index>(j)) * elements_[j];
    return out;
  }

 private:
  std::vector<AlgebraElement> elements_;
};

/// Orthonormal (Frobenius) basis of N_V = {a : pairing(a, y_j) = 0 for all j}.
struct AnnihilatorBasis {
  AlgebraSignature signature;
  std::vector<AlgebraElement> basis;
  /// Orthonormal basis of the complement of N_V, i.e. of span{y_j^H}.
  std::vector<AlgebraElement> constraint_directions;
};

inline double max_pairing_residual(const AlgebraElement& a, const SubspaceBasis& v) {
  double worst = 0.0;
  for (const AlgebraElement& y : v.elements()) worst = std::max(worst, std::abs(pairing(a, y)));
  return worst;
}

/// Null space of the k x D constraint matrix whose row j maps vec(a) to
/// pairing(a, y_j), computed from its SVD.
inline AnnihilatorBasis annihilator_basis(const SubspaceBasis& v, const SvdConfig& cfg = {}) {
  const AlgebraSignature& sig = v.signature();
  const auto dim = static_cast<Index>(sig.dimension());
  const auto k = static_cast<Index>(v.size());
  Matrix constraints(k, dim);
  for (Index j = 0; j < k; ++j) {
    // pairing(a, y) = sum a(r,c) y(c,r) = <vec(y^T), vec(a)> bilinearly
    constraints.row(j) = v[static_cast<std::size_t>(j)].adjoint().to_vector().conjugate().transpose();
  }
  const SvdResult d = svd(constraints, cfg);
  const std::size_t rank = d.rank(cfg);
  if (rank < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::DependentBasis, "annihilator_basis: constraint matrix is rank deficient");
  }
  // Row space of the constraints is span(V columns); N_V is its complement.
  Matrix q(dim, dim);
  q.leftCols(k) = d.V.leftCols(k);
  detail::complete_orthonormal(q, k);

  AnnihilatorBasis out{sig, {}, {}};
  for (Index j = 0; j < k; ++j) {
    // conj(row_j) spans the direction of vec(y_j^H); store as elements
    out.constraint_directions.push_back(AlgebraElement::from_vector(sig, q.col(j)));
  }
  for (Index j = k; j < dim; ++j) out.basis.push_back(AlgebraElement::from_vector(sig, q.col(j)));
  return out;
}

/// Frobenius-orthogonal projection onto span(N.basis).
inline AlgebraElement project_to_annihilator(const AlgebraElement& a, const AnnihilatorBasis& n) {
  require_same(a.signature(), n.signature, "project_to_annihilator");
  AlgebraElement out = a;
  for (const AlgebraElement& q : n.constraint_directions) out -= frobenius_inner(q, a) * q;
  return out;
}

}  // namespace cstar
