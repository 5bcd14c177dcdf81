#pragma once
//
// Finite tracial von Neumann algebras: direct sums of full matrix blocks with
// a weighted trace, operators on them, filtrations with trace preserving
// conditional expectations, and Hermitian spectral calculus.
//

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ncmart/config.hpp"

namespace ncmart {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

struct Block {
  int dim = 1;
  double weight = 1.0;
};

/// Direct sum of matrix blocks M_{d_1} ⊕ ... ⊕ M_{d_B} with trace
/// τ(x) = Σ_b w_b Tr(x_b).
class TracialAlgebra {
 public:
  TracialAlgebra() = default;

  explicit TracialAlgebra(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw std::invalid_argument("algebra: no blocks");
    offsets_.reserve(blocks_.size());
    for (const auto& b : blocks_) {
      if (b.dim < 1) throw std::invalid_argument("algebra: block dim must be positive");
      if (!(b.weight > 0.0) || !std::isfinite(b.weight))
        throw std::invalid_argument("algebra: block weight must be positive and finite");
      offsets_.push_back(total_dim_);
      total_dim_ += b.dim;
      unit_trace_ += b.weight * b.dim;
    }
  }

  static TracialAlgebra full_matrix(int dim, double weight = 1.0) {
    return TracialAlgebra({Block{dim, weight}});
  }

  /// ℓ_∞^n with point masses `weights` (the commutative model).
  static TracialAlgebra diagonal(const std::vector<double>& weights) {
    std::vector<Block> b;
    b.reserve(weights.size());
    for (double w : weights) b.push_back(Block{1, w});
    return TracialAlgebra(std::move(b));
  }

  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t num_blocks() const { return blocks_.size(); }
  int block_dim(std::size_t b) const { return blocks_[b].dim; }
  double weight(std::size_t b) const { return blocks_[b].weight; }
  int offset(std::size_t b) const { return offsets_[b]; }
  int total_dim() const { return total_dim_; }
  double unit_trace() const { return unit_trace_; }

  /// Block index owning a global coordinate.
  std::size_t block_of(int coord) const {
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), coord);
    return static_cast<std::size_t>(std::distance(offsets_.begin(), it)) - 1;
  }

  bool operator==(const TracialAlgebra& o) const {
    if (blocks_.size() != o.blocks_.size()) return false;
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      if (blocks_[i].dim != o.blocks_[i].dim || blocks_[i].weight != o.blocks_[i].weight)
        return false;
    return true;
  }

 private:
  std::vector<Block> blocks_;
  std::vector<int> offsets_;
  int total_dim_ = 0;
  double unit_trace_ = 0.0;
};

/// An element of a TracialAlgebra, stored block by block.
class Operator {
 public:
  Operator() = default;
  explicit Operator(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {}

  static Operator zero(const TracialAlgebra& A) {
    std::vector<Matrix> b;
    b.reserve(A.num_blocks());
    for (const auto& blk : A.blocks()) b.push_back(Matrix::Zero(blk.dim, blk.dim));
    return Operator(std::move(b));
  }
  static Operator identity(const TracialAlgebra& A) {
    std::vector<Matrix> b;
    b.reserve(A.num_blocks());
    for (const auto& blk : A.blocks()) b.push_back(Matrix::Identity(blk.dim, blk.dim));
    return Operator(std::move(b));
  }
  /// Diagonal operator from global diagonal entries.
  static Operator diagonal(const TracialAlgebra& A, const std::vector<cplx>& diag) {
    if (static_cast<int>(diag.size()) != A.total_dim())
      throw std::invalid_argument("Operator::diagonal: size mismatch");
    Operator x = zero(A);
    for (std::size_t b = 0; b < A.num_blocks(); ++b)
      for (int i = 0; i < A.block_dim(b); ++i) x.blocks_[b](i, i) = diag[A.offset(b) + i];
    return x;
  }
  static Operator diagonal(const TracialAlgebra& A, const std::vector<double>& diag) {
    return diagonal(A, std::vector<cplx>(diag.begin(), diag.end()));
  }

  std::size_t num_blocks() const { return blocks_.size(); }
  const Matrix& block(std::size_t b) const { return blocks_[b]; }
  Matrix& block(std::size_t b) { return blocks_[b]; }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  bool conforms(const TracialAlgebra& A) const {
    if (blocks_.size() != A.num_blocks()) return false;
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      if (blocks_[b].rows() != A.block_dim(b) || blocks_[b].cols() != A.block_dim(b)) return false;
    return true;
  }

  Operator adjoint() const {
    std::vector<Matrix> b;
    b.reserve(blocks_.size());
    for (const auto& m : blocks_) b.push_back(m.adjoint());
    return Operator(std::move(b));
  }

  Operator& operator+=(const Operator& o) {
    check_shape(o);
    for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] += o.blocks_[b];
    return *this;
  }
  Operator& operator-=(const Operator& o) {
    check_shape(o);
    for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] -= o.blocks_[b];
    return *this;
  }
  Operator& operator*=(cplx c) {
    for (auto& m : blocks_) m *= c;
    return *this;
  }

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(Operator a, cplx c) { return a *= c; }
  friend Operator operator*(cplx c, Operator a) { return a *= c; }
  friend Operator operator*(Operator a, double c) { return a *= cplx(c); }
  friend Operator operator*(double c, Operator a) { return a *= cplx(c); }
  friend Operator operator-(Operator a) { return a *= cplx(-1.0); }

  friend Operator operator*(const Operator& a, const Operator& b) {
    a.check_shape(b);
    std::vector<Matrix> r;
    r.reserve(a.blocks_.size());
    for (std::size_t i = 0; i < a.blocks_.size(); ++i) r.push_back(a.blocks_[i] * b.blocks_[i]);
    return Operator(std::move(r));
  }

 private:
  void check_shape(const Operator& o) const {
    if (o.blocks_.size() != blocks_.size())
      throw std::invalid_argument("Operator: block count mismatch");
    for (std::size_t b = 0; b < blocks_.size(); ++b)
      if (o.blocks_[b].rows() != blocks_[b].rows() || o.blocks_[b].cols() != blocks_[b].cols())
        throw std::invalid_argument("Operator: block shape mismatch");
  }

  std::vector<Matrix> blocks_;
};

inline void require_conforms(const TracialAlgebra& A, const Operator& x, const char* where) {
  if (!x.conforms(A)) throw std::invalid_argument(std::string(where) + ": operator does not conform to algebra");
}

/// |x|^2 = x* x.
inline Operator abs_sq(const Operator& x) { return x.adjoint() * x; }

/// τ(x), complex in general.
inline cplx trace_c(const TracialAlgebra& A, const Operator& x) {
  require_conforms(A, x, "trace");
  cplx s = 0.0;
  for (std::size_t b = 0; b < A.num_blocks(); ++b) s += A.weight(b) * x.block(b).trace();
  return s;
}
inline double trace(const TracialAlgebra& A, const Operator& x) { return trace_c(A, x).real(); }

/// Largest entry modulus; cheap distance measure for certificates.
inline double max_abs(const Operator& x) {
  double m = 0.0;
  for (const auto& b : x.blocks()) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline Operator hermitian_part(const Operator& x) {
  std::vector<Matrix> b;
  b.reserve(x.num_blocks());
  for (const auto& m : x.blocks()) b.push_back(hermitian_part(m));
  return Operator(std::move(b));
}

/// Eigen-decomposition of the Hermitian part of each block.
struct SpectralBlock {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;
};

inline std::vector<SpectralBlock> eigh(const Operator& x, bool with_vectors = true) {
  std::vector<SpectralBlock> out;
  out.reserve(x.num_blocks());
  for (const auto& m : x.blocks()) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m),
                                            with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::domain_error("eigh: eigensolver failed");
    out.push_back({es.eigenvalues(), with_vectors ? es.eigenvectors() : Matrix()});
  }
  return out;
}

/// Operator norm of a block: largest singular value.
inline double block_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1) return std::abs(m(0, 0));
  double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * scale) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

/// ‖x‖_∞ = max over blocks of the operator norm.
inline double norm_inf(const Operator& x) {
  double n = 0.0;
  for (const auto& m : x.blocks()) n = std::max(n, block_norm(m));
  return n;
}

/// ‖x − x*‖_∞ ≤ tol·‖x‖_∞.
inline bool is_hermitian(const Operator& x, double rel_tol = defaults::hermitian_tol) {
  double scale = norm_inf(x);
  double skew = 0.0;
  for (const auto& m : x.blocks()) skew = std::max(skew, block_norm(m - m.adjoint()));
  return skew <= rel_tol * std::max(scale, 1e-300) || skew == 0.0;
}

inline void require_hermitian(const Operator& x, const char* where) {
  if (!is_hermitian(x)) throw std::invalid_argument(std::string(where) + ": operator is not Hermitian");
}

/// Smallest eigenvalue of the Hermitian part over all blocks.
inline double min_eigenvalue(const Operator& x) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : eigh(x, false))
    if (s.values.size() > 0) m = std::min(m, s.values(0));
  return m;
}

/// Largest eigenvalue of the Hermitian part over all blocks.
inline double max_eigenvalue(const Operator& x) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& s : eigh(x, false))
    if (s.values.size() > 0) m = std::max(m, s.values(s.values.size() - 1));
  return m;
}

/// Functional calculus f(x) for Hermitian x. Throws if f is undefined
/// (non-finite) at an eigenvalue.
template <class F>
Operator calculus(const Operator& x, F&& f) {
  require_hermitian(x, "calculus");
  std::vector<Matrix> out;
  out.reserve(x.num_blocks());
  for (const auto& s : eigh(x)) {
    Eigen::VectorXd fv(s.values.size());
    for (Eigen::Index i = 0; i < s.values.size(); ++i) {
      fv(i) = f(s.values(i));
      if (!std::isfinite(fv(i)))
        throw std::domain_error("calculus: function undefined at eigenvalue " + std::to_string(s.values(i)));
    }
    out.push_back(s.vectors * fv.asDiagonal() * s.vectors.adjoint());
  }
  return Operator(std::move(out));
}

/// Square root of a positive operator; eigenvalues in [-tol, 0) are clamped.
inline Operator sqrt_psd(const Operator& x) {
  double tol = defaults::psd_tol * std::max(1.0, norm_inf(x));
  return calculus(x, [tol](double v) {
    if (v < -tol) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(std::max(v, 0.0));
  });
}

/// |x| = (x* x)^{1/2}.
inline Operator abs(const Operator& x) { return sqrt_psd(hermitian_part(abs_sq(x))); }

/// χ_[a,b](x) for Hermitian x; eigenvalues within `tol` of the interval are
/// included. Negative tol selects the default 1e-9·max(‖x‖_∞, |a|, |b|).
inline Operator spectral_projection(const Operator& x, double a, double b, double tol = -1.0) {
  require_hermitian(x, "spectral_projection");
  if (tol < 0.0) {
    double scale = std::max({norm_inf(x), std::abs(a), std::abs(b)});
    tol = defaults::spectral_tol * scale;
  }
  std::vector<Matrix> out;
  out.reserve(x.num_blocks());
  for (const auto& s : eigh(x)) {
    Matrix p = Matrix::Zero(s.vectors.rows(), s.vectors.cols());
    for (Eigen::Index i = 0; i < s.values.size(); ++i) {
      double v = s.values(i);
      if (v >= a - tol && v <= b + tol) p.noalias() += s.vectors.col(i) * s.vectors.col(i).adjoint();
    }
    out.push_back(std::move(p));
  }
  return Operator(std::move(out));
}

/// Nearest projection to an almost-projection: eigenvalues of the Hermitian
/// part snapped to {0,1}. Returns the projection and the perturbation
/// ‖p − round(p)‖_∞.
inline std::pair<Operator, double> round_projection(const Operator& p) {
  std::vector<Matrix> out;
  out.reserve(p.num_blocks());
  for (const auto& s : eigh(p)) {
    Matrix r = Matrix::Zero(s.vectors.rows(), s.vectors.cols());
    for (Eigen::Index i = 0; i < s.values.size(); ++i)
      if (s.values(i) > 0.5) r.noalias() += s.vectors.col(i) * s.vectors.col(i).adjoint();
    out.push_back(std::move(r));
  }
  Operator q(std::move(out));
  return {q, norm_inf(q - p)};
}

/// Singular values with their trace weights: (value, weight) per eigenvalue of
/// |x|. Exact |eigenvalues| for Hermitian input, SVD otherwise.
inline std::vector<std::pair<double, double>> weighted_singular_values(const TracialAlgebra& A, const Operator& x) {
  require_conforms(A, x, "singular values");
  std::vector<std::pair<double, double>> sv;
  sv.reserve(static_cast<std::size_t>(A.total_dim()));
  bool herm = is_hermitian(x, 1e-14);
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    const Matrix& m = x.block(b);
    double w = A.weight(b);
    if (m.rows() == 1) {
      sv.emplace_back(std::abs(m(0, 0)), w);
    } else if (herm) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) sv.emplace_back(std::abs(es.eigenvalues()(i)), w);
    } else {
      Eigen::JacobiSVD<Matrix> svd(m);
      for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) sv.emplace_back(svd.singularValues()(i), w);
    }
  }
  return sv;
}

/// ‖x‖_p^p = τ(|x|^p) for p > 0.
inline double schatten_pp(const TracialAlgebra& A, const Operator& x, double p) {
  if (!(p > 0)) throw std::invalid_argument("schatten: p must be positive");
  double s = 0.0;
  for (auto [v, w] : weighted_singular_values(A, x))
    if (v > 0) s += w * std::pow(v, p);
  return s;
}
inline double norm_p(const TracialAlgebra& A, const Operator& x, double p) {
  if (std::isinf(p)) return norm_inf(x);
  return std::pow(schatten_pp(A, x, p), 1.0 / p);
}

// ---------------------------------------------------------------------------
// Filtrations

enum class FiltrationKind { pinching, tensor, averaging };

inline const char* to_string(FiltrationKind k) {
  switch (k) {
    case FiltrationKind::pinching: return "pinching";
    case FiltrationKind::tensor: return "tensor";
    case FiltrationKind::averaging: return "averaging";
  }
  return "?";
}

/// Increasing chain M_1 ⊆ ... ⊆ M_N of subalgebras with trace preserving
/// conditional expectations E_n. Level 0 is an alias for level 1.
///
///  - pinching: P_n partitions the global coordinates; E_n zeroes entries
///    between different atoms. P_n refines P_{n+1}.
///  - tensor: single block of size d_1···d_N; E_n is the normalized partial
///    trace over the trailing factors d_{n+1}···d_N.
///  - averaging: P_n partitions the block indices (equal dims inside an
///    atom), P_{n+1} refines P_n; E_n replaces each block by the weighted
///    average over its atom.
///    With dim-1 blocks this is the classical conditional expectation.
class Filtration {
 public:
  Filtration() = default;

  static Filtration pinching(TracialAlgebra A, std::vector<std::vector<std::vector<int>>> partitions,
                             bool allow_truncated = false) {
    Filtration f;
    f.kind_ = FiltrationKind::pinching;
    f.algebra_ = std::move(A);
    f.partitions_ = std::move(partitions);
    f.allow_truncated_ = allow_truncated;
    f.levels_ = static_cast<int>(f.partitions_.size());
    f.atom_of_ = labels_from(f.partitions_, f.algebra_.total_dim(), "pinching");
    f.validate_nested();
    if (!allow_truncated) {
      const auto& last = f.atom_of_.back();
      for (std::size_t b = 0; b < f.algebra_.num_blocks(); ++b)
        for (int i = 1; i < f.algebra_.block_dim(b); ++i)
          if (last[f.algebra_.offset(b) + i] != last[f.algebra_.offset(b)])
            throw std::invalid_argument("pinching: last level must contain each block in one atom (M_N = M)");
    }
    return f;
  }

  static Filtration tensor(TracialAlgebra A, std::vector<int> dims) {
    Filtration f;
    f.kind_ = FiltrationKind::tensor;
    f.algebra_ = std::move(A);
    if (f.algebra_.num_blocks() != 1) throw std::invalid_argument("tensor: requires a single-block algebra");
    if (dims.empty()) throw std::invalid_argument("tensor: no factor dims");
    long prod = 1;
    for (int d : dims) {
      if (d < 1) throw std::invalid_argument("tensor: factor dims must be positive");
      prod *= d;
    }
    if (prod != f.algebra_.total_dim()) throw std::invalid_argument("tensor: factor dims do not multiply to total_dim");
    f.dims_ = std::move(dims);
    f.levels_ = static_cast<int>(f.dims_.size());
    return f;
  }

  static Filtration averaging(TracialAlgebra A, std::vector<std::vector<std::vector<int>>> partitions,
                              bool allow_truncated = false) {
    Filtration f;
    f.kind_ = FiltrationKind::averaging;
    f.algebra_ = std::move(A);
    f.partitions_ = std::move(partitions);
    f.allow_truncated_ = allow_truncated;
    f.levels_ = static_cast<int>(f.partitions_.size());
    f.atom_of_ = labels_from(f.partitions_, static_cast<int>(f.algebra_.num_blocks()), "averaging");
    f.validate_nested();
    for (const auto& level : f.partitions_)
      for (const auto& atom : level)
        for (int b : atom)
          if (f.algebra_.block_dim(b) != f.algebra_.block_dim(atom.front()))
            throw std::invalid_argument("averaging: blocks in one atom must share a dimension");
    if (!allow_truncated)
      for (const auto& atom : f.partitions_.back())
        if (atom.size() != 1) throw std::invalid_argument("averaging: last level must be singletons (M_N = M)");
    return f;
  }

  FiltrationKind kind() const { return kind_; }
  int levels() const { return levels_; }
  const TracialAlgebra& algebra() const { return algebra_; }
  const std::vector<std::vector<std::vector<int>>>& partitions() const { return partitions_; }
  const std::vector<int>& tensor_dims() const { return dims_; }
  bool allow_truncated() const { return allow_truncated_; }

  /// E_n(x); n ∈ [0, N] with E_0 := E_1.
  Operator expect(const Operator& x, int n) const {
    if (n < 0 || n > levels_) throw std::out_of_range("conditional_expectation: level out of range");
    require_conforms(algebra_, x, "conditional_expectation");
    if (n == 0) n = 1;
    switch (kind_) {
      case FiltrationKind::pinching: return expect_pinching(x, n);
      case FiltrationKind::tensor: return expect_tensor(x, n);
      case FiltrationKind::averaging: return expect_averaging(x, n);
    }
    return x;
  }

  /// Whether x ∈ M_n within an absolute tolerance.
  bool measurable(const Operator& x, int n, double tol) const { return max_abs(expect(x, n) - x) <= tol; }

 private:
  static std::vector<std::vector<int>> labels_from(const std::vector<std::vector<std::vector<int>>>& parts, int n,
                                                   const char* what) {
    if (parts.empty()) throw std::invalid_argument(std::string(what) + ": no levels");
    std::vector<std::vector<int>> labels;
    for (const auto& level : parts) {
      std::vector<int> lab(static_cast<std::size_t>(n), -1);
      int id = 0;
      for (const auto& atom : level) {
        if (atom.empty()) throw std::invalid_argument(std::string(what) + ": empty atom");
        for (int i : atom) {
          if (i < 0 || i >= n) throw std::invalid_argument(std::string(what) + ": index out of range");
          if (lab[i] != -1) throw std::invalid_argument(std::string(what) + ": atoms overlap");
          lab[i] = id;
        }
        ++id;
      }
      if (std::find(lab.begin(), lab.end(), -1) != lab.end())
        throw std::invalid_argument(std::string(what) + ": level does not cover all indices");
      labels.push_back(std::move(lab));
    }
    return labels;
  }

  // Pinching: P_n refines P_{n+1}. Averaging: P_{n+1} refines P_n.
  void validate_nested() const {
    for (std::size_t n = 0; n + 1 < atom_of_.size(); ++n) {
      bool up = kind_ == FiltrationKind::pinching;
      const auto& fine = up ? atom_of_[n] : atom_of_[n + 1];
      const auto& coarse = up ? atom_of_[n + 1] : atom_of_[n];
      std::vector<int> rep(fine.size(), -1);
      for (std::size_t i = 0; i < fine.size(); ++i) {
        int& r = rep[static_cast<std::size_t>(fine[i])];
        if (r == -1) r = coarse[i];
        else if (r != coarse[i]) throw std::invalid_argument("filtration: levels are not nested");
      }
    }
  }

  Operator expect_pinching(const Operator& x, int n) const {
    const auto& lab = atom_of_[static_cast<std::size_t>(n - 1)];
    Operator r = x;
    for (std::size_t b = 0; b < algebra_.num_blocks(); ++b) {
      int off = algebra_.offset(b);
      Matrix& m = r.block(b);
      for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
          if (lab[off + i] != lab[off + j]) m(i, j) = 0.0;
    }
    return r;
  }

  Operator expect_tensor(const Operator& x, int n) const {
    long head = 1;
    for (int i = 0; i < n; ++i) head *= dims_[static_cast<std::size_t>(i)];
    long tail = algebra_.total_dim() / head;
    if (tail == 1) return x;
    const Matrix& m = x.block(0);
    Matrix reduced = Matrix::Zero(head, head);
    for (long ia = 0; ia < head; ++ia)
      for (long ja = 0; ja < head; ++ja) {
        cplx s = 0.0;
        for (long k = 0; k < tail; ++k) s += m(ia * tail + k, ja * tail + k);
        reduced(ia, ja) = s / static_cast<double>(tail);
      }
    Matrix out = Matrix::Zero(m.rows(), m.cols());
    for (long ia = 0; ia < head; ++ia)
      for (long ja = 0; ja < head; ++ja)
        for (long k = 0; k < tail; ++k) out(ia * tail + k, ja * tail + k) = reduced(ia, ja);
    return Operator({out});
  }

  Operator expect_averaging(const Operator& x, int n) const {
    const auto& level = partitions_[static_cast<std::size_t>(n - 1)];
    Operator r = x;
    for (const auto& atom : level) {
      if (atom.size() == 1) continue;
      double wsum = 0.0;
      Matrix avg = Matrix::Zero(x.block(atom.front()).rows(), x.block(atom.front()).cols());
      for (int b : atom) {
        avg += algebra_.weight(b) * x.block(b);
        wsum += algebra_.weight(b);
      }
      avg /= wsum;
      for (int b : atom) r.block(b) = avg;
    }
    return r;
  }

  FiltrationKind kind_ = FiltrationKind::pinching;
  TracialAlgebra algebra_;
  std::vector<std::vector<std::vector<int>>> partitions_;
  std::vector<std::vector<int>> atom_of_;
  std::vector<int> dims_;
  int levels_ = 0;
  bool allow_truncated_ = false;
};

/// Free-function form of E_n.
inline Operator conditional_expectation(const Filtration& F, const Operator& x, int n) { return F.expect(x, n); }

}  // namespace ncmart
