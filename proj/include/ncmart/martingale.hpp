#pragma once
//
// Finite martingales x_n = E_n(x), adapted sequences, square functions, and
// the Hardy / bmo quasi-norms built on them.
//

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ncmart/algebra.hpp"
#include "ncmart/rearrangement.hpp"
#include "ncmart/symspaces.hpp"

namespace ncmart {

enum class SquareKind {
  S_c,         // Σ |d_k|²
  s_c,         // Σ E_{k-1}|d_k|²
  S_r,         // Σ |d_k*|²
  s_r,         // Σ E_{k-1}|d_k*|²
  Sc_seq,      // 𝒮_c: Σ |a_k|² on a plain sequence
  sigma_c,     // σ_c: Σ E_{k-1}|a_k|²
  sigma_c_plus // σ_c⁺: Σ E_k|a_k|²
};

inline const char* to_string(SquareKind k) {
  switch (k) {
    case SquareKind::S_c: return "S_c";
    case SquareKind::s_c: return "s_c";
    case SquareKind::S_r: return "S_r";
    case SquareKind::s_r: return "s_r";
    case SquareKind::Sc_seq: return "Sc_seq";
    case SquareKind::sigma_c: return "sigma_c";
    case SquareKind::sigma_c_plus: return "sigma_c_plus";
  }
  return "?";
}

inline constexpr int all_levels = std::numeric_limits<int>::max();

/// k-th summand of the chosen square function applied to d (1-based k).
inline Operator square_term(const Filtration& F, const Operator& d, int k, SquareKind kind) {
  switch (kind) {
    case SquareKind::S_c:
    case SquareKind::Sc_seq: return hermitian_part(abs_sq(d));
    case SquareKind::S_r: return hermitian_part(d * d.adjoint());
    case SquareKind::s_c:
    case SquareKind::sigma_c: return hermitian_part(F.expect(abs_sq(d), k - 1));
    case SquareKind::s_r: return hermitian_part(F.expect(d * d.adjoint(), k - 1));
    case SquareKind::sigma_c_plus: return hermitian_part(F.expect(abs_sq(d), k));
  }
  throw std::invalid_argument("square_term: unknown kind");
}

/// Partial sums w_k = Σ_{j≤k} term_j for k = 1..N (index k−1).
inline std::vector<Operator> partial_squares(const Filtration& F, const std::vector<Operator>& d, SquareKind kind) {
  if (static_cast<int>(d.size()) != F.levels())
    throw std::invalid_argument("partial_squares: sequence length must equal the number of levels");
  std::vector<Operator> out;
  out.reserve(d.size());
  Operator acc = Operator::zero(F.algebra());
  for (std::size_t k = 0; k < d.size(); ++k) {
    acc += square_term(F, d[k], static_cast<int>(k) + 1, kind);
    out.push_back(acc);
  }
  return out;
}

/// Σ_{k ≤ upto} term_k.
inline Operator square_sum(const Filtration& F, const std::vector<Operator>& d, SquareKind kind,
                           int upto = all_levels) {
  if (upto < 0) throw std::invalid_argument("square_function: negative level");
  int n = std::min<int>(upto, static_cast<int>(d.size()));
  Operator acc = Operator::zero(F.algebra());
  for (int k = 1; k <= n; ++k) acc += square_term(F, d[static_cast<std::size_t>(k - 1)], k, kind);
  return acc;
}

/// Adapted (or flagged general) sequence (a_n)_{n=1..N}.
class SequenceBundle {
 public:
  SequenceBundle(Filtration F, std::vector<Operator> a, bool adapted = true, double tol = 1e-10)
      : F_(std::move(F)), a_(std::move(a)), adapted_(adapted) {
    if (static_cast<int>(a_.size()) != F_.levels())
      throw std::invalid_argument("SequenceBundle: length must equal the number of levels");
    for (std::size_t k = 0; k < a_.size(); ++k) {
      require_conforms(F_.algebra(), a_[k], "SequenceBundle");
      if (adapted_) {
        double scale = std::max(1.0, max_abs(a_[k]));
        if (!F_.measurable(a_[k], static_cast<int>(k) + 1, tol * scale))
          throw std::invalid_argument("SequenceBundle: a_" + std::to_string(k + 1) + " is not M_" +
                                      std::to_string(k + 1) + "-measurable");
      }
    }
  }

  const Filtration& filtration() const { return F_; }
  const TracialAlgebra& algebra() const { return F_.algebra(); }
  const std::vector<Operator>& terms() const { return a_; }
  const Operator& term(int k) const { return a_.at(static_cast<std::size_t>(k - 1)); }
  int length() const { return static_cast<int>(a_.size()); }
  bool adapted() const { return adapted_; }

  Operator sum() const {
    Operator s = Operator::zero(algebra());
    for (const auto& a : a_) s += a;
    return s;
  }

 private:
  Filtration F_;
  std::vector<Operator> a_;
  bool adapted_;
};

/// Martingale generated by x: x_n = E_n(x), dx_n = x_n − x_{n−1}, x_0 = 0.
/// With a truncated filtration the terminal value is E_N(x).
class Martingale {
 public:
  Martingale(Filtration F, const Operator& x) : F_(std::move(F)) {
    require_conforms(F_.algebra(), x, "Martingale");
    int N = F_.levels();
    xn_.reserve(static_cast<std::size_t>(N) + 1);
    xn_.push_back(Operator::zero(F_.algebra()));
    for (int n = 1; n <= N; ++n) xn_.push_back(F_.expect(x, n));
    for (int n = 1; n <= N; ++n) dx_.push_back(xn_[n] - xn_[n - 1]);
    sc_partial_ = partial_squares(F_, dx_, SquareKind::s_c);
    Sc_partial_ = partial_squares(F_, dx_, SquareKind::S_c);
  }

  /// Martingale with prescribed differences (must be a martingale difference
  /// sequence; checked to tolerance).
  static Martingale from_differences(const Filtration& F, const std::vector<Operator>& d, double tol = 1e-9) {
    Operator x = Operator::zero(F.algebra());
    for (const auto& di : d) x += di;
    Martingale m(F, x);
    double scale = std::max(1.0, max_abs(x));
    for (std::size_t k = 0; k < d.size(); ++k)
      if (max_abs(m.dx_[k] - d[k]) > tol * scale)
        throw std::invalid_argument("Martingale::from_differences: not a martingale difference sequence");
    m.dx_ = d;
    m.sc_partial_ = partial_squares(F, m.dx_, SquareKind::s_c);
    m.Sc_partial_ = partial_squares(F, m.dx_, SquareKind::S_c);
    return m;
  }

  const Filtration& filtration() const { return F_; }
  const TracialAlgebra& algebra() const { return F_.algebra(); }
  int levels() const { return F_.levels(); }
  const Operator& terminal() const { return xn_.back(); }
  /// x_n for n = 0..N.
  const Operator& x(int n) const { return xn_.at(static_cast<std::size_t>(n)); }
  /// dx_n for n = 1..N.
  const Operator& dx(int n) const { return dx_.at(static_cast<std::size_t>(n - 1)); }
  const std::vector<Operator>& differences() const { return dx_; }
  /// s²_{c,k} for k = 1..N (k = 0 gives zero).
  Operator sc_sq(int k) const { return k == 0 ? Operator::zero(algebra()) : sc_partial_.at(static_cast<std::size_t>(k - 1)); }
  const std::vector<Operator>& sc_partials() const { return sc_partial_; }
  const std::vector<Operator>& Sc_partials() const { return Sc_partial_; }

 private:
  Filtration F_;
  std::vector<Operator> xn_;
  std::vector<Operator> dx_;
  std::vector<Operator> sc_partial_;
  std::vector<Operator> Sc_partial_;
};

/// Square of the square function (positive operator).
inline Operator square_function_sq(const Martingale& m, SquareKind kind, int upto = all_levels) {
  if (kind == SquareKind::Sc_seq || kind == SquareKind::sigma_c || kind == SquareKind::sigma_c_plus)
    return square_sum(m.filtration(), m.differences(), kind, upto);
  if (upto >= m.levels()) {
    if (kind == SquareKind::s_c) return m.sc_partials().back();
    if (kind == SquareKind::S_c) return m.Sc_partials().back();
  }
  return square_sum(m.filtration(), m.differences(), kind, upto);
}

inline Operator square_function_sq(const SequenceBundle& b, SquareKind kind, int upto = all_levels) {
  return square_sum(b.filtration(), b.terms(), kind, upto);
}

inline Operator square_function(const Martingale& m, SquareKind kind, int upto = all_levels) {
  return sqrt_psd(square_function_sq(m, kind, upto));
}
inline Operator square_function(const SequenceBundle& b, SquareKind kind, int upto = all_levels) {
  return sqrt_psd(square_function_sq(b, kind, upto));
}

/// μ(sqrt(w)) from the spectrum of a positive w, without forming the root.
inline StepFunction mu_sqrt(const TracialAlgebra& A, const Operator& w) {
  std::vector<std::pair<double, double>> sv;
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(w.block(b)), Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      sv.emplace_back(std::sqrt(std::max(0.0, es.eigenvalues()(i))), A.weight(b));
  }
  return StepFunction::from_pairs(std::move(sv));
}

enum class HardyKind { Hc, hc, hd, Hr, hr, hinf_c, Hinf_c };

inline const char* to_string(HardyKind k) {
  switch (k) {
    case HardyKind::Hc: return "Hc";
    case HardyKind::hc: return "hc";
    case HardyKind::hd: return "hd";
    case HardyKind::Hr: return "Hr";
    case HardyKind::hr: return "hr";
    case HardyKind::hinf_c: return "hinf_c";
    case HardyKind::Hinf_c: return "Hinf_c";
  }
  return "?";
}

/// μ(diag(dx_1, …, dx_N)) on the N-fold amplification.
inline StepFunction mu_diagonal(const TracialAlgebra& A, const std::vector<Operator>& d) {
  std::vector<StepFunction> parts;
  parts.reserve(d.size());
  for (const auto& di : d) parts.push_back(mu(di, A));
  return direct_sum(parts);
}

/// Rearrangement whose space norm defines the Hardy quasi-norm of `kind`.
inline StepFunction hardy_rearrangement(const Martingale& m, HardyKind kind) {
  switch (kind) {
    case HardyKind::Hc:
    case HardyKind::Hinf_c: return mu_sqrt(m.algebra(), square_function_sq(m, SquareKind::S_c));
    case HardyKind::hc:
    case HardyKind::hinf_c: return mu_sqrt(m.algebra(), square_function_sq(m, SquareKind::s_c));
    case HardyKind::Hr: return mu_sqrt(m.algebra(), square_function_sq(m, SquareKind::S_r));
    case HardyKind::hr: return mu_sqrt(m.algebra(), square_function_sq(m, SquareKind::s_r));
    case HardyKind::hd: return mu_diagonal(m.algebra(), m.differences());
  }
  throw std::invalid_argument("hardy_norm: unknown kind");
}

inline double hardy_norm(const Martingale& m, HardyKind kind, const SpaceSpec& spec = Lp{inf}) {
  StepFunction f = hardy_rearrangement(m, kind);
  if (kind == HardyKind::hinf_c || kind == HardyKind::Hinf_c) return f.sup();
  return norm(spec, f);
}

/// Norm of the square function of a sequence: ‖𝒮_c(a)‖, ‖σ_c(a)‖, ….
inline double sequence_norm(const SequenceBundle& b, SquareKind kind, const SpaceSpec& spec = Lp{inf}) {
  return norm(spec, mu_sqrt(b.algebra(), square_function_sq(b, kind)));
}

enum class BmoConvention {
  little,  // sup_{0≤n<N} ‖E_n|x − x_n|²‖^{1/2}, x_0 = 0, E_0 = E_1
  big      // sup_{1≤n≤N} ‖E_n|x − x_{n−1}|²‖^{1/2}
};

inline double bmo_c_norm(const Martingale& m, BmoConvention conv = BmoConvention::little) {
  const Filtration& F = m.filtration();
  const Operator& x = m.terminal();
  double best = 0.0;
  int N = m.levels();
  for (int n = 0; n <= N; ++n) {
    Operator d;
    if (conv == BmoConvention::little) {
      if (n == N) break;
      d = x - m.x(n);
    } else {
      if (n == 0) continue;
      d = x - m.x(n - 1);
    }
    Operator e = hermitian_part(F.expect(abs_sq(d), n));
    best = std::max(best, std::max(0.0, max_eigenvalue(e)));
  }
  return std::sqrt(best);
}

/// Result of a mixed Hardy evaluation; `upper_bound` marks an infimum
/// estimated from finitely many candidates.
struct MixedNorm {
  double value = 0.0;
  bool upper_bound = false;
  int best_candidate = -1;
};

enum class MixedSide { sum, intersection };

/// ‖x‖_{H_E^c ∩ H_E^r} = max, or min over candidates x = a + b of
/// ‖a‖_{H_E^c} + ‖b‖_{H_E^r}.
inline MixedNorm mixed_hardy_norm(const Martingale& m, MixedSide side, const SpaceSpec& spec,
                                  const std::vector<std::pair<Operator, Operator>>& candidates = {},
                                  double tol = 1e-9) {
  if (side == MixedSide::intersection)
    return {std::max(hardy_norm(m, HardyKind::Hc, spec), hardy_norm(m, HardyKind::Hr, spec)), false, -1};
  if (candidates.empty()) throw std::invalid_argument("mixed_hardy_norm: no candidate splittings");
  MixedNorm out{std::numeric_limits<double>::infinity(), true, -1};
  double scale = std::max(1.0, max_abs(m.terminal()));
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& [a, b] = candidates[i];
    if (max_abs(a + b - m.terminal()) > tol * scale)
      throw std::invalid_argument("mixed_hardy_norm: candidate does not sum to x");
    double v = hardy_norm(Martingale(m.filtration(), a), HardyKind::Hc, spec) +
               hardy_norm(Martingale(m.filtration(), b), HardyKind::Hr, spec);
    if (v < out.value) {
      out.value = v;
      out.best_candidate = static_cast<int>(i);
    }
  }
  return out;
}

}  // namespace ncmart
