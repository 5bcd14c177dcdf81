#pragma once
//
// Cuculescu projections q_k = q_{k−1}·χ_[0,λ²](q_{k−1} w_k q_{k−1}), the
// noncommutative stopping times, with numerical certificates of the four
// standard properties.
//

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncmart/algebra.hpp"
#include "ncmart/config.hpp"

namespace ncmart {

/// Where q_k is expected to live: M_{k−1} when w_k ∈ M_{k−1} (conditioned
/// square functions), M_k when w_k ∈ M_k (plain square functions).
enum class Measurability { predictable, adapted };

struct CuculescuCertificate {
  double tol = 0.0;           // absolute tolerance used
  double measurability = 0.0; // max_k ‖E(q_k) − q_k‖ (max entry)
  double commutation = 0.0;   // max_k ‖[q_k, q_{k−1} w_k q_{k−1}]‖
  double bounded = 0.0;       // max_k max(0, −λmin(λ² q_k − q_k w_k q_k))
  double stopped = 0.0;       // max(0, −λmin(Σ (Δq_k) w_k (Δq_k) − λ²(1 − q)))
  double idempotence = 0.0;   // max_k ‖q_k² − q_k‖
  double selfadjoint = 0.0;   // max_k ‖q_k* − q_k‖
  double nested = 0.0;        // max_k ‖q_N q_k − q_N‖
  double rounding = 0.0;      // largest orthonormality defect of the range bases

  bool properties_hold() const {
    return measurability <= tol && commutation <= tol && bounded <= tol && stopped <= tol;
  }
  bool projections_hold() const { return idempotence <= 1e-8 && selfadjoint <= 1e-10 && nested <= 1e-8; }
  bool ok() const { return properties_hold() && projections_hold(); }
};

struct CuculescuRun {
  std::vector<Operator> w;  // w_1..w_N
  double lambda_sq = 0.0;
  Measurability where = Measurability::predictable;
  std::vector<Operator> q;  // q_0..q_N, q_0 = 1
  Operator q_final;         // ∧ q_k = q_N
  CuculescuCertificate cert;

  int levels() const { return static_cast<int>(w.size()); }
};

namespace detail {

inline double spectral_gap_below(const Operator& h) { return std::max(0.0, -min_eigenvalue(hermitian_part(h))); }

inline void certify(const Filtration& F, CuculescuRun& run) {
  const int N = run.levels();
  const TracialAlgebra& A = F.algebra();
  double wmax = 0.0;
  for (const auto& wk : run.w) wmax = std::max(wmax, norm_inf(wk));
  auto& c = run.cert;
  c.tol = defaults::cuculescu_tol * (1.0 + run.lambda_sq + wmax);
  const Operator one = Operator::identity(A);
  Operator stopped_sum = Operator::zero(A);
  for (int k = 1; k <= N; ++k) {
    const Operator& qk = run.q[static_cast<std::size_t>(k)];
    const Operator& qprev = run.q[static_cast<std::size_t>(k - 1)];
    const Operator& wk = run.w[static_cast<std::size_t>(k - 1)];
    int level = run.where == Measurability::predictable ? k - 1 : k;
    c.measurability = std::max(c.measurability, max_abs(F.expect(qk, level) - qk));
    Operator h = qprev * wk * qprev;
    c.commutation = std::max(c.commutation, norm_inf(qk * h - h * qk));
    c.bounded = std::max(c.bounded, spectral_gap_below(run.lambda_sq * qk - qk * wk * qk));
    Operator dq = qprev - qk;
    stopped_sum += dq * wk * dq;
    c.idempotence = std::max(c.idempotence, norm_inf(qk * qk - qk));
    c.selfadjoint = std::max(c.selfadjoint, norm_inf(qk.adjoint() - qk));
  }
  for (int k = 0; k <= N; ++k)
    c.nested = std::max(c.nested, norm_inf(run.q_final * run.q[static_cast<std::size_t>(k)] - run.q_final));
  c.stopped = spectral_gap_below(stopped_sum - run.lambda_sq * (one - run.q_final));
}

}  // namespace detail

namespace detail {

/// The recursion proper on inputs already known to be positive, with
/// `wmax` ≥ max_k ‖w_k‖. Each q_k is carried as an orthonormal basis V of
/// its range per block; the step diagonalises V* w_k V, so every q_k is a
/// projection by construction.
inline CuculescuRun cuculescu_unchecked(const std::vector<Operator>& w, double lambda_sq, const Filtration& F,
                                        Measurability where, bool certify, double wmax) {
  const TracialAlgebra& A = F.algebra();
  CuculescuRun run;
  run.w = w;
  run.lambda_sq = lambda_sq;
  run.where = where;
  run.q.reserve(w.size() + 1);
  run.q.push_back(Operator::identity(A));
  const double scale = std::max({wmax, lambda_sq, 1e-300});
  const double tol = defaults::spectral_tol * scale;
  std::vector<Matrix> basis;
  for (std::size_t b = 0; b < A.num_blocks(); ++b) basis.push_back(Matrix::Identity(A.block_dim(b), A.block_dim(b)));
  for (std::size_t k = 0; k < w.size(); ++k) {
    Operator qk = Operator::zero(A);
    for (std::size_t b = 0; b < A.num_blocks(); ++b) {
      Matrix& V = basis[b];
      if (V.cols() == 0) continue;
      Matrix h = V.adjoint() * w[k].block(b) * V;
      Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(h));
      const auto& ev = es.eigenvalues();
      Eigen::Index keep = 0;
      while (keep < ev.size() && ev(keep) <= lambda_sq + tol) ++keep;
      if (keep == ev.size()) continue;  // q_k = q_{k−1} on this block
      V = V * es.eigenvectors().leftCols(keep);
      if (keep > 0) {
        double defect = (V.adjoint() * V - Matrix::Identity(keep, keep)).cwiseAbs().maxCoeff();
        run.cert.rounding = std::max(run.cert.rounding, defect);
      }
    }
    for (std::size_t b = 0; b < A.num_blocks(); ++b) qk.block(b) = basis[b] * basis[b].adjoint();
    run.q.push_back(std::move(qk));
  }
  run.q_final = run.q.back();
  if (certify) detail::certify(F, run);
  return run;
}

/// Largest eigenvalue of a positive operator, one eigenvalue solve per block.
inline double positive_norm(const Operator& w) {
  double m = 0.0;
  for (std::size_t b = 0; b < w.num_blocks(); ++b) {
    if (w.block(b).size() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(w.block(b)), Eigen::EigenvaluesOnly);
    m = std::max(m, es.eigenvalues().maxCoeff());
  }
  return m;
}

}  // namespace detail

/// Runs the recursion on w_1..w_N with threshold λ². Eigenvalues within
/// 1e-9·scale above λ² are kept (closed interval convention).
inline CuculescuRun cuculescu(const std::vector<Operator>& w, double lambda_sq, const Filtration& F,
                              Measurability where = Measurability::predictable, bool certify = true) {
  if (!(lambda_sq >= 0.0) || !std::isfinite(lambda_sq))
    throw std::invalid_argument("cuculescu: λ² must be finite and nonnegative");
  if (static_cast<int>(w.size()) != F.levels())
    throw std::invalid_argument("cuculescu: need one operator per filtration level");
  const TracialAlgebra& A = F.algebra();
  double wmax = 0.0;
  for (const auto& wk : w) {
    require_conforms(A, wk, "cuculescu");
    require_hermitian(wk, "cuculescu");
    double lo = 0.0, hi = 0.0;
    for (std::size_t b = 0; b < A.num_blocks(); ++b) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(wk.block(b)), Eigen::EigenvaluesOnly);
      lo = std::min(lo, es.eigenvalues().minCoeff());
      hi = std::max(hi, es.eigenvalues().cwiseAbs().maxCoeff());
    }
    wmax = std::max(wmax, hi);
    if (lo < -defaults::psd_tol * std::max(1.0, hi))
      throw std::invalid_argument("cuculescu: input operators must be positive");
  }
  return detail::cuculescu_unchecked(w, lambda_sq, F, where, certify, wmax);
}

}  // namespace ncmart
