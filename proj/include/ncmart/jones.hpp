#pragma once
//
// The two-step Cuculescu decomposition x = y + z for the couple
// (h_2^c, h_∞^c) and its sequence variants, the reference K-functional,
// certified K-curves and real interpolation quadrature.
//

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ncmart/algebra.hpp"
#include "ncmart/config.hpp"
#include "ncmart/cuculescu.hpp"
#include "ncmart/martingale.hpp"
#include "ncmart/parallel.hpp"
#include "ncmart/rearrangement.hpp"
#include "ncmart/symspaces.hpp"

namespace ncmart {

/// A sequence together with the square function that measures it:
///   martingale differences with s_c (q_k ∈ M_{k−1}),
///   a general sequence with σ_c (q_k ∈ M_{k−1}),
///   an adapted sequence with 𝒮_c (q_k ∈ M_k).
struct HardyInput {
  Filtration F;
  std::vector<Operator> d;
  SquareKind kind = SquareKind::s_c;
  Measurability where = Measurability::predictable;
  std::vector<Operator> w;  // partial squares w_1..w_N

  static HardyInput of(const Martingale& m) {
    return {m.filtration(), m.differences(), SquareKind::s_c, Measurability::predictable, m.sc_partials()};
  }
  static HardyInput of(const SequenceBundle& b, SquareKind kind) {
    if (kind == SquareKind::sigma_c)
      return {b.filtration(), b.terms(), kind, Measurability::predictable,
              partial_squares(b.filtration(), b.terms(), kind)};
    if (kind == SquareKind::Sc_seq) {
      if (!b.adapted()) throw std::invalid_argument("HardyInput: plain square function needs an adapted sequence");
      return {b.filtration(), b.terms(), kind, Measurability::adapted, partial_squares(b.filtration(), b.terms(), kind)};
    }
    throw std::invalid_argument("HardyInput: sequence kind must be sigma_c or Sc_seq");
  }

  const TracialAlgebra& algebra() const { return F.algebra(); }
  int levels() const { return F.levels(); }
  const Operator& square_total() const { return w.back(); }
  Operator sum() const {
    Operator s = Operator::zero(algebra());
    for (const auto& di : d) s += di;
    return s;
  }
  /// A sequence of the same type with new terms.
  HardyInput with_terms(std::vector<Operator> terms) const {
    HardyInput h{F, std::move(terms), kind, where, {}};
    h.w = partial_squares(F, h.d, kind);
    return h;
  }
};

/// ‖sqfn‖_{L_p}: (τ(w_N^{p/2}))^{1/p}; p = ∞ gives ‖w_N‖^{1/2}.
inline double sequence_norm(const HardyInput& in, double p) {
  if (std::isinf(p)) return std::sqrt(std::max(0.0, max_eigenvalue(in.square_total())));
  if (p == 2.0) return std::sqrt(std::max(0.0, trace(in.algebra(), in.square_total())));
  return norm(Lp{p}, mu_sqrt(in.algebra(), in.square_total()));
}

/// k_ref = (∫_0^{t^p} μ^p(sqfn))^{1/p}.
inline double k_ref(const HardyInput& in, double t, double p = 2.0) {
  if (!(p > 0.0)) throw std::invalid_argument("k_ref: p must be positive");
  if (!(t > 0.0)) throw std::invalid_argument("k_ref: t must be positive");
  return std::pow(integrate_power(mu_sqrt(in.algebra(), in.square_total()), p, std::pow(t, p)), 1.0 / p);
}
inline double k_ref(const Martingale& m, double t, double p = 2.0) { return k_ref(HardyInput::of(m), t, p); }

/// λ = ((2+ε)/t)·(∫_0^{t²} μ²(sqfn))^{1/2}.
inline double lambda_for(const HardyInput& in, double t, double eps = defaults::epsilon) {
  if (!(t > 0.0)) throw std::invalid_argument("lambda_for: t must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("lambda_for: ε must be positive");
  return (2.0 + eps) / t * k_ref(in, t, 2.0);
}

struct JonesCertificates {
  double z_norm = 0, z_bound = 0;
  double y_norm = 0, y_bound = 0;
  double trace_q = 0, trace_pi = 0, trace_bound = 0;
  double cost = 0, cost_bound = 0;
  double sum_residual = 0;
  bool z_ok = false, y_ok = false, trace_ok = false, cost_ok = false, sum_ok = false;
  bool increments_bounded = false, beta_submajorized = false, alpha_submajorized = false, z_submajorized = false;
  bool cuculescu_ok = false;

  bool all() const {
    return z_ok && y_ok && trace_ok && cost_ok && sum_ok && increments_bounded && beta_submajorized &&
           alpha_submajorized && z_submajorized && cuculescu_ok;
  }
};

struct JonesDecomposition {
  SquareKind kind = SquareKind::s_c;
  double t = 0, eps = 0, lambda = 0, p = 2.0;
  double kref = 0;  // set when certified
  CuculescuRun first, second;
  std::vector<Operator> dalpha, dy, dz;
  Operator y, z;
  Operator wy, wz;    // sqfn²(y), sqfn²(z)
  double norm_y = 0;  // ‖sqfn(y)‖_p
  double norm_z = 0;  // ‖sqfn(z)‖_∞
  double cost = 0;    // norm_y + t·norm_z
  bool certified = false;
  JonesCertificates cert;
};

namespace detail {

inline StepFunction mu_pos(const TracialAlgebra& A, const Operator& w) { return mu(hermitian_part(w), A); }

inline void certify_jones(const HardyInput& in, const HardyInput& alpha, JonesDecomposition& J) {
  const TracialAlgebra& A = in.algebra();
  const double slack = 1.0 + defaults::certificate_slack;
  const double tiny = 1e-13 * (1.0 + sequence_norm(in, inf) + sequence_norm(in, 2.0));
  auto& c = J.cert;
  c.z_norm = J.norm_z;
  c.z_bound = std::sqrt(2.0) * J.lambda;
  c.z_ok = c.z_norm <= c.z_bound * slack + tiny;
  c.y_norm = J.p == 2.0 ? J.norm_y : sequence_norm(in.with_terms(J.dy), 2.0);
  c.y_bound = defaults::y_constant() * J.kref;
  c.y_ok = c.y_norm <= c.y_bound * slack + tiny;
  double unit = A.unit_trace();
  c.trace_q = unit - trace(A, J.first.q_final);
  c.trace_pi = unit - trace(A, J.second.q_final);
  c.trace_bound = J.t * J.t;
  c.trace_ok = std::max(c.trace_q, c.trace_pi) <= c.trace_bound * slack + 1e-9;
  c.cost = c.y_norm + J.t * c.z_norm;
  c.cost_bound = defaults::jones_constant(J.eps) * J.kref;
  c.cost_ok = c.cost <= c.cost_bound * slack + tiny;
  Operator total = in.sum();
  c.sum_residual = max_abs(total - J.y - J.z);
  c.sum_ok = c.sum_residual <= 1e-10 * std::max(1.0, max_abs(total));

  // ‖term_k(dα)‖ ≤ λ², sqfn²(β) ≺≺ sqfn²(x), sqfn²(α) ≺≺ 4 sqfn²(x)
  double lam2 = J.lambda * J.lambda;
  double ltol = defaults::cuculescu_tol * (1.0 + lam2 + norm_inf(in.square_total()));
  c.increments_bounded = true;
  for (int k = 1; k <= in.levels(); ++k) {
    double v = max_eigenvalue(square_term(in.F, J.dalpha[static_cast<std::size_t>(k - 1)], k, in.kind));
    if (v > lam2 + ltol) c.increments_bounded = false;
  }
  std::vector<Operator> dbeta;
  for (int k = 1; k <= in.levels(); ++k)
    dbeta.push_back(in.d[static_cast<std::size_t>(k - 1)] * J.first.q[static_cast<std::size_t>(k - 1)]);
  StepFunction mx = mu_pos(A, in.square_total());
  StepFunction mbeta = mu_pos(A, square_sum(in.F, dbeta, in.kind));
  StepFunction malpha = mu_pos(A, alpha.square_total());
  c.beta_submajorized = submajorizes(mx, mbeta, 1e-8);
  c.alpha_submajorized = submajorizes(mx.scaled(4.0), malpha, 1e-8);
  c.z_submajorized = submajorizes(malpha, mu_pos(A, square_sum(in.F, J.dz, in.kind)), 1e-8);
  c.cuculescu_ok = J.first.cert.properties_hold() && J.second.cert.properties_hold();
}

}  // namespace detail

/// Runs the construction at an arbitrary λ ≥ 0. The result is always a valid
/// decomposition; certificates are attached only when `certify` is set.
inline JonesDecomposition jones_at(const HardyInput& in, double t, double lambda, double p = 2.0,
                                   bool certify = false, double eps = defaults::epsilon) {
  if (!(t > 0.0)) throw std::invalid_argument("jones_decompose: t must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("jones_decompose: λ must be nonnegative");
  JonesDecomposition J;
  J.kind = in.kind;
  J.t = t;
  J.eps = eps;
  J.lambda = lambda;
  J.p = p;
  const double lam2 = lambda * lambda;
  const int N = in.levels();
  // Partial squares increase, so ‖w_N‖ bounds every ‖w_k‖.
  J.first = detail::cuculescu_unchecked(in.w, lam2, in.F, in.where, certify,
                                        detail::positive_norm(in.square_total()));
  for (int k = 1; k <= N; ++k)
    J.dalpha.push_back(in.d[static_cast<std::size_t>(k - 1)] * J.first.q[static_cast<std::size_t>(k)]);
  HardyInput alpha = in.with_terms(J.dalpha);
  J.second = detail::cuculescu_unchecked(alpha.w, lam2, in.F, in.where, certify,
                                         detail::positive_norm(alpha.square_total()));
  J.y = Operator::zero(in.algebra());
  J.z = Operator::zero(in.algebra());
  for (int k = 1; k <= N; ++k) {
    Operator dz = J.dalpha[static_cast<std::size_t>(k - 1)] * J.second.q[static_cast<std::size_t>(k - 1)];
    Operator dy = in.d[static_cast<std::size_t>(k - 1)] - dz;
    J.z += dz;
    J.y += dy;
    J.dz.push_back(std::move(dz));
    J.dy.push_back(std::move(dy));
  }
  const TracialAlgebra& A = in.algebra();
  J.wy = square_sum(in.F, J.dy, in.kind);
  J.wz = square_sum(in.F, J.dz, in.kind);
  J.norm_y = p == 2.0 ? std::sqrt(std::max(0.0, trace(A, J.wy))) : norm(Lp{p}, mu_sqrt(A, J.wy));
  J.norm_z = std::sqrt(detail::positive_norm(J.wz));
  J.cost = J.norm_y + t * J.norm_z;
  if (certify) {
    J.kref = k_ref(in, t, 2.0);
    J.certified = true;
    detail::certify_jones(in, alpha, J);
  }
  return J;
}

/// The decomposition at λ = lambda_for(t, ε), with every certificate checked.
inline JonesDecomposition jones_decompose(const HardyInput& in, double t, double eps = defaults::epsilon) {
  if (!(eps > 0.0)) throw std::invalid_argument("jones_decompose: ε must be positive");
  return jones_at(in, t, lambda_for(in, t, eps), 2.0, true, eps);
}
inline JonesDecomposition jones_decompose(const Martingale& m, double t, double eps = defaults::epsilon) {
  return jones_decompose(HardyInput::of(m), t, eps);
}

// ---------------------------------------------------------------------------
// K-curves

struct KCurve {
  std::string couple;
  std::vector<double> t, lower, upper;
  std::vector<std::string> certificate_id;  // provenance of each upper value
  std::string lower_source;                 // what certifies lower

  std::size_t size() const { return t.size(); }
  double max_ratio() const {
    double r = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (lower[i] > 0.0) r = std::max(r, upper[i] / lower[i]);
    return r;
  }
};

/// A concrete splitting cost (a, b) = (‖x_0‖_{A0}, ‖x_1‖_{A1}).
struct SplitCost {
  double a = 0, b = 0;
  std::string id;
};

inline std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) throw std::invalid_argument("log_grid: invalid range");
  std::vector<double> g(static_cast<std::size_t>(points));
  if (points == 1) return {lo};
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, double(i) / (points - 1));
  return g;
}

struct KCurveOptions {
  int lambda_points = defaults::lambda_grid;  // geometric λ-grid λ0·2^{(j−c)/2}
  double eps = defaults::epsilon;
  int threads = 0;   // 0: NCMART_THREADS / hardware
  bool bmo = false;  // also measure ‖z‖_{bmo^c} (martingale kind only)
};

/// One decomposition x = y + z found by the search, kept in a form that
/// can be re-costed in any A_0 = h_E.
struct DecompositionSample {
  double t = 0, lambda = 0;
  StepFunction mu_y;  // μ(sqfn(y))
  double z_inf = 0;   // ‖sqfn(z)‖_∞
  double z_bmo = -1;  // ‖z‖_{bmo^c}; negative when not measured
  std::string id;
};

enum class EndpointA1 { h_inf, bmo };

/// What certifies lower(t).
///   k_ref:   (∫_0^{t^p} μ^p(sqfn))^{1/p}, times 2^{1−1/p} when p < 1 (A_0 = L_p only)
///   ambient: K(μ(sqfn), t; E, L_∞) by truncation, exact for Banach E; the
///            sqfn embedding is isometric on both endpoints
enum class LowerBound { k_ref, ambient };

struct HardyCouple {
  SpaceSpec A0 = Lp{2.0};
  EndpointA1 A1 = EndpointA1::h_inf;
  LowerBound lower = LowerBound::k_ref;
};

namespace detail {

/// upper(t) = min_j a_j + t·b_j: concave, nondecreasing, upper/t nonincreasing.
inline void fill_upper(KCurve& c, const std::vector<SplitCost>& costs) {
  c.upper.assign(c.t.size(), inf);
  c.certificate_id.assign(c.t.size(), "");
  for (std::size_t i = 0; i < c.t.size(); ++i)
    for (const auto& s : costs) {
      double v = s.a + c.t[i] * s.b;
      if (v < c.upper[i]) {
        c.upper[i] = v;
        c.certificate_id[i] = s.id;
      }
    }
}

inline void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("k_curve: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1])))
      throw std::invalid_argument("k_curve: grid must be positive and increasing");
}

inline double bmo_of_differences(const Filtration& F, const std::vector<Operator>& d) {
  return bmo_c_norm(Martingale::from_differences(F, d));
}

/// One-term inputs (x_1 ∈ M_1): the sqfn is |x_1| and the couple is the
/// function couple itself, so truncations u(|x_1| − s)_+ + u·min(|x_1|, s)
/// are admissible splits.
inline bool truncation_admissible(const HardyInput& in) {
  return in.levels() == 1 && (in.kind == SquareKind::s_c || in.kind == SquareKind::Sc_seq);
}

}  // namespace detail

inline double hardy_endpoint_A0(const HardyInput& in, const SpaceSpec& A0) {
  return norm(A0, mu_sqrt(in.algebra(), in.square_total()));
}

inline double hardy_endpoint_A1(const HardyInput& in, EndpointA1 A1) {
  if (A1 == EndpointA1::bmo) {
    if (in.kind != SquareKind::s_c) throw std::invalid_argument("k_curve: bmo endpoint needs a martingale");
    return detail::bmo_of_differences(in.F, in.d);
  }
  return sequence_norm(in, inf);
}

/// Default grid: 33 log points over [t*/10³, t*·10³], t* = ‖x‖_{A0}/‖x‖_{A1}.
inline std::vector<double> default_grid(double a0, double a1, int points = defaults::kcurve_points,
                                        double span = defaults::kcurve_span) {
  double ts = (a0 > 0.0 && a1 > 0.0) ? a0 / a1 : 1.0;
  return log_grid(ts / span, ts * span, points);
}

/// Jones decompositions at every grid t over the geometric λ-grid around
/// lambda_for(t) (λ0 itself always included), plus truncation splits for
/// one-term inputs. Grid points run in parallel; order is by index.
inline std::vector<DecompositionSample> sample_decompositions(const HardyInput& in, const std::vector<double>& grid,
                                                              const KCurveOptions& opt = {}) {
  detail::check_grid(grid);
  if (opt.bmo && in.kind != SquareKind::s_c) throw std::invalid_argument("k_curve: bmo endpoint needs a martingale");
  const TracialAlgebra& A = in.algebra();
  const int L = std::max(1, opt.lambda_points);
  const int center = (L - 1) / 2;
  std::vector<std::vector<DecompositionSample>> per_t(grid.size());
  parallel_for(
      grid.size(),
      [&](std::size_t i) {
        double t = grid[i];
        double lam0 = lambda_for(in, t, opt.eps);
        if (lam0 == 0.0) return;
        std::vector<double> lams;
        for (int j = 0; j < L; ++j) lams.push_back(lam0 * std::pow(2.0, 0.5 * (j - center)));
        if (L % 2 == 0) lams.push_back(lam0);
        for (std::size_t j = 0; j < lams.size(); ++j) {
          JonesDecomposition J = jones_at(in, t, lams[j], 2.0, false, opt.eps);
          DecompositionSample s{t, lams[j], mu_sqrt(A, J.wy), J.norm_z, -1.0,
                                "jones:t" + std::to_string(i) + ":l" + std::to_string(j)};
          if (opt.bmo) s.z_bmo = detail::bmo_of_differences(in.F, J.dz);
          per_t[i].push_back(std::move(s));
        }
      },
      opt.threads > 0 ? opt.threads : thread_count());
  std::vector<DecompositionSample> out;
  for (auto& v : per_t) out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  if (detail::truncation_admissible(in)) {
    StepFunction f = mu_sqrt(A, in.square_total());
    std::vector<double> levels;
    const auto& st = f.steps();
    for (std::size_t i = 0; i < st.size(); ++i) {
      levels.push_back(st[i].value);
      levels.push_back(0.5 * (st[i].value + (i + 1 < st.size() ? st[i + 1].value : 0.0)));
    }
    for (double t : grid) levels.push_back(truncation_min(Lp{2.0}, f, t).level);
    for (std::size_t i = 0; i < levels.size(); ++i) {
      double s = levels[i];
      // one-term bmo^c is ‖E_1|z|²‖^{1/2} = ‖z‖
      out.push_back({0.0, 0.0, positive_part_shift(f, s), std::min(s, f.sup()), opt.bmo ? std::min(s, f.sup()) : -1.0,
                     "truncation:" + std::to_string(i)});
    }
  }
  return out;
}

/// Certified bracket of K(x, t; h_E, A_1) from a sample set. lower as
/// selected by couple.lower (ambient for non-L_p spaces); with A_1 = bmo^c
/// the h_∞ lower bound is taken at t/√N, since ‖z‖_{h_∞^c} ≤ √N‖z‖_{bmo^c}.
/// upper is the lower envelope of all sample costs and the two trivial splits.
inline KCurve k_curve(const HardyInput& in, const HardyCouple& couple, const std::vector<double>& grid,
                      const std::vector<DecompositionSample>& samples) {
  detail::check_grid(grid);
  validate(couple.A0);
  const TracialAlgebra& A = in.algebra();
  StepFunction f = mu_sqrt(A, in.square_total());
  const bool bmo = couple.A1 == EndpointA1::bmo;
  KCurve c;
  c.couple = "h_" + describe(couple.A0) + "^c/" + (bmo ? "bmo^c" : "h_inf^c") + "[" + to_string(in.kind) + "]";
  c.t = grid;
  LowerBound lb = couple.lower;
  const Lp* lp = std::get_if<Lp>(&couple.A0);
  if (lb == LowerBound::k_ref && !lp) lb = LowerBound::ambient;
  if (lb == LowerBound::ambient && !is_normed(couple.A0))
    throw std::invalid_argument("k_curve: ambient lower bound needs a normed A0 space");
  const double shrink = bmo ? 1.0 / std::sqrt(static_cast<double>(in.levels())) : 1.0;
  c.lower_source = std::string(lb == LowerBound::k_ref ? "k_ref" : "ambient:truncation") + (bmo ? "@t/sqrtN" : "");
  for (double t : grid) {
    double u = t * shrink;
    if (lb == LowerBound::k_ref) {
      double p = lp->p;
      double factor = p < 1.0 ? std::pow(2.0, 1.0 - 1.0 / p) : 1.0;
      c.lower.push_back(std::isinf(p) ? u * f.sup() : factor * k_ref(in, u, p));
    } else {
      c.lower.push_back(truncation_k(couple.A0, f, u));
    }
  }
  std::vector<SplitCost> costs{{norm(couple.A0, f), 0.0, "endpoint:A0"},
                               {0.0, hardy_endpoint_A1(in, couple.A1), "endpoint:A1"}};
  for (const auto& s : samples) {
    double b = bmo ? s.z_bmo : s.z_inf;
    if (b < 0.0) throw std::invalid_argument("k_curve: samples lack bmo measurements");
    costs.push_back({norm(couple.A0, s.mu_y), b, s.id});
  }
  detail::fill_upper(c, costs);
  return c;
}

/// K(x, t; h_p^c, h_∞^c) bracket (or its sequence analogues) with
/// lower = k_ref.
inline KCurve k_curve(const HardyInput& in, double p, std::vector<double> grid = {}, const KCurveOptions& opt = {},
                      std::vector<DecompositionSample>* samples_out = nullptr) {
  if (!(p > 0.0)) throw std::invalid_argument("k_curve: p must be positive");
  if (grid.empty()) grid = default_grid(sequence_norm(in, p), sequence_norm(in, inf));
  auto samples = sample_decompositions(in, grid, opt);
  KCurve c = k_curve(in, HardyCouple{Lp{p}, EndpointA1::h_inf, LowerBound::k_ref}, grid, samples);
  if (samples_out) *samples_out = std::move(samples);
  return c;
}

inline KCurve k_curve(const Martingale& m, double p, std::vector<double> grid = {}, const KCurveOptions& opt = {}) {
  return k_curve(HardyInput::of(m), p, std::move(grid), opt);
}

// ---------------------------------------------------------------------------
// Function couples

/// Holmstedt: (∫_0^{t^α} μ^p)^{1/p} + t(∫_{t^α}^∞ μ^q)^{1/q}, 1/α = 1/p − 1/q;
/// for q = ∞ the second term is t·μ_{t^p}.
inline double holmstedt_k(const StepFunction& f, double t, double p, double q) {
  if (!(p > 0.0) || !(q > p)) throw std::invalid_argument("holmstedt_k: need 0 < p < q");
  if (!(t > 0.0)) throw std::invalid_argument("holmstedt_k: t must be positive");
  double inv_alpha = 1.0 / p - (std::isinf(q) ? 0.0 : 1.0 / q);
  double T = std::pow(t, 1.0 / inv_alpha);
  double first = std::pow(integrate_power(f, p, T), 1.0 / p);
  double second = std::isinf(q) ? t * f.at(T) : t * std::pow(tail_integral_power(f, q, T), 1.0 / q);
  return first + second;
}

/// C with holmstedt_k ≤ C·(‖g‖_p + t‖h‖_q) for every f = g + h, from
/// μ_{2u}(f) ≤ μ_u(g) + μ_u(h), Hölder on [0, T/2] and
/// μ_{T/2}(g) ≤ (2/T)^{1/p}‖g‖_p.
inline double holmstedt_constant(double p, double q) {
  auto quasi = [](double r) { return std::max(1.0, std::pow(2.0, 1.0 / r - 1.0)); };
  double inv_alpha = 1.0 / p - (std::isinf(q) ? 0.0 : 1.0 / q);
  double tail = std::isinf(q) ? 1.0 : std::pow(2.0, 1.0 / q) * quasi(q);
  return std::pow(2.0, 1.0 / p) * quasi(p) + tail * std::max(1.0, std::pow(2.0, inv_alpha));
}

/// min(f, s).
inline StepFunction truncate_at(const StepFunction& f, double s) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& st : f.steps()) pairs.emplace_back(std::min(st.value, s), st.length);
  return StepFunction::from_pairs(std::move(pairs), 0.0);
}

struct FunctionCouple {
  enum class Kind { LpLq, E_Linf } kind = Kind::E_Linf;
  double p = 1.0, q = inf;
  SpaceSpec E = Lp{1.0};

  static FunctionCouple lp_lq(double p, double q) { return {Kind::LpLq, p, q, Lp{p}}; }
  static FunctionCouple e_linf(SpaceSpec E) { return {Kind::E_Linf, 0.0, inf, std::move(E)}; }
};

/// K-curve of a step function for a function couple. (E, L_∞) is exact via
/// truncation; (L_p, L_q) brackets the truncation split cost from below by
/// Holmstedt's value over its universal constant.
inline KCurve k_curve(const StepFunction& f, const FunctionCouple& couple, std::vector<double> grid = {}) {
  if (couple.kind == FunctionCouple::Kind::LpLq && std::isinf(couple.q))
    return k_curve(f, FunctionCouple::e_linf(Lp{couple.p}), std::move(grid));
  KCurve c;
  if (couple.kind == FunctionCouple::Kind::E_Linf) {
    double a0 = norm(couple.E, f), a1 = f.sup();
    if (grid.empty()) grid = default_grid(a0, a1);
    detail::check_grid(grid);
    c.couple = describe(couple.E) + "/L_inf";
    c.lower_source = "exact:truncation";
    c.t = grid;
    for (double t : grid) {
      double k = truncation_k(couple.E, f, t);
      c.lower.push_back(k);
      c.upper.push_back(k);
      c.certificate_id.push_back("exact:truncation");
    }
    return c;
  }
  const double p = couple.p, q = couple.q;
  if (!(p > 0.0) || !(q > p)) throw std::invalid_argument("k_curve: need 0 < p < q");
  double a0 = norm(Lp{p}, f), a1 = norm(Lp{q}, f);
  if (grid.empty()) grid = default_grid(a0, a1);
  detail::check_grid(grid);
  c.couple = "L_" + std::to_string(p) + "/L_" + std::to_string(q);
  c.lower_source = "holmstedt/C";
  c.t = grid;
  std::vector<SplitCost> costs{{a0, 0.0, "endpoint:A0"}, {0.0, a1, "endpoint:A1"}};
  std::vector<double> levels;
  for (const auto& st : f.steps()) levels.push_back(st.value);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    double s = levels[i];
    costs.push_back({norm(Lp{p}, positive_part_shift(f, s)), norm(Lp{q}, truncate_at(f, s)),
                     "split:level" + std::to_string(i)});
    double s2 = i + 1 < levels.size() ? 0.5 * (levels[i] + levels[i + 1]) : 0.5 * levels[i];
    costs.push_back({norm(Lp{p}, positive_part_shift(f, s2)), norm(Lp{q}, truncate_at(f, s2)),
                     "split:mid" + std::to_string(i)});
  }
  detail::fill_upper(c, costs);
  double C = holmstedt_constant(p, q);
  for (double t : grid) c.lower.push_back(holmstedt_k(f, t, p, q) / C);
  return c;
}

// ---------------------------------------------------------------------------
// Real interpolation quadrature

struct Interval {
  double lo = 0, hi = 0;
};

namespace detail {

/// Piecewise power envelope through the samples, certified between grid
/// points from K nondecreasing and K/t nonincreasing: below the curve
/// (max(K_i, t·K_{i+1}/t_{i+1})) or above it (min(K_{i+1}, t·K_i/t_i)).
/// Tails: t·K_0/t_0 below the grid, K_n above it.
inline PiecewisePower envelope(const std::vector<double>& t, const std::vector<double>& K, bool upper) {
  std::vector<PowerPiece> pcs;
  const std::size_t n = t.size();
  pcs.push_back({0.0, t[0], K[0] / t[0], 1.0});
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double a = t[i], b = t[i + 1];
    double Ki = K[i], Kj = K[i + 1];
    if (!upper) {
      // constant Ki until t·Kj/b overtakes it
      double tc = Kj > 0.0 ? std::clamp(Ki * b / Kj, a, b) : b;
      if (tc > a) pcs.push_back({a, tc, Ki, 0.0});
      if (b > tc) pcs.push_back({tc, b, Kj / b, 1.0});
    } else {
      // linear t·Ki/a until it reaches Kj
      double tc = Ki > 0.0 ? std::clamp(Kj * a / Ki, a, b) : b;
      if (Ki > 0.0 && tc > a) pcs.push_back({a, tc, Ki / a, 1.0});
      else if (tc > a) pcs.push_back({a, tc, 0.0, 0.0});
      if (b > tc) pcs.push_back({tc, b, Kj, 0.0});
    }
  }
  pcs.push_back({t[n - 1], inf, K[n - 1], 0.0});
  return PiecewisePower(std::move(pcs));
}

inline void check_regimes(const std::vector<double>& t, const std::vector<double>& K, const char* which) {
  const std::size_t n = t.size();
  if (n < 2) throw std::domain_error("real_interp_norm: need at least two grid points");
  if (K[0] <= 0.0) return;  // x = 0
  double lin = (K[1] / t[1]) / (K[0] / t[0]);
  double flat = K[n - 1] / K[n - 2];
  if (std::abs(lin - 1.0) > defaults::tail_tol)
    throw std::domain_error(std::string("real_interp_norm: ") + which +
                            " curve is not linear at t_min; widen the grid");
  if (std::abs(flat - 1.0) > defaults::tail_tol)
    throw std::domain_error(std::string("real_interp_norm: ") + which + " curve is not flat at t_max; widen the grid");
}

}  // namespace detail

/// ‖x‖_{F;K} bracket from a K-curve: ‖t ↦ K(t)‖_{F_{ϱ,γ}} over the certified
/// envelopes of the lower and upper samples, with linear/constant tails.
inline Interval real_interp_norm(const KCurve& curve, const ParamSpace& F) {
  if (curve.t.size() < 2) throw std::invalid_argument("real_interp_norm: curve too short");
  detail::check_regimes(curve.t, curve.lower, "lower");
  detail::check_regimes(curve.t, curve.upper, "upper");
  Interval out;
  out.lo = F.norm(detail::envelope(curve.t, curve.lower, false));
  out.hi = F.norm(detail::envelope(curve.t, curve.upper, true));
  return out;
}

inline Interval real_interp_norm(const KCurve& curve, double theta, double gamma) {
  return real_interp_norm(curve, ParamSpace::power(theta, gamma));
}

/// Doubles the grid density until both ends move less than quad_rel_tol
/// (relative), capped at quad_max_points.
inline Interval real_interp_adaptive(const std::function<std::pair<double, double>(double)>& K, double tmin,
                                     double tmax, const ParamSpace& F, int start = defaults::kcurve_points,
                                     int* points_used = nullptr) {
  int n = std::max(3, start);
  Interval prev{-1.0, -1.0};
  for (;;) {
    KCurve c;
    c.t = log_grid(tmin, tmax, n);
    for (double t : c.t) {
      auto [lo, hi] = K(t);
      c.lower.push_back(lo);
      c.upper.push_back(hi);
    }
    Interval cur = real_interp_norm(c, F);
    bool done = prev.lo >= 0.0 && std::abs(cur.lo - prev.lo) <= defaults::quad_rel_tol * std::abs(cur.lo) &&
                std::abs(cur.hi - prev.hi) <= defaults::quad_rel_tol * std::abs(cur.hi);
    if (done || 2 * n - 1 > defaults::quad_max_points) {
      if (points_used) *points_used = n;
      return cur;
    }
    prev = cur;
    n = 2 * n - 1;
  }
}

}  // namespace ncmart
