#pragma once
//
// Verification harness: per-instance checks of the K-closedness sandwich,
// interpolation identities and the appendix inequalities, aggregated over
// seeds into ratio reports with asserted constants or trend guards.
//

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/binomial.hpp>

#include "ncmart/algebra.hpp"
#include "ncmart/config.hpp"
#include "ncmart/cuculescu.hpp"
#include "ncmart/jones.hpp"
#include "ncmart/martingale.hpp"
#include "ncmart/parallel.hpp"
#include "ncmart/random.hpp"
#include "ncmart/rearrangement.hpp"
#include "ncmart/symspaces.hpp"

namespace ncmart {

inline constexpr double no_constant = std::numeric_limits<double>::quiet_NaN();

/// One seed's contribution to a check.
struct SeedRow {
  std::uint64_t seed = 0;
  int dim = 0, levels = 0;
  std::string mode;
  double lhs = 0, rhs = 0;
  double ratio = 0;     // lhs/rhs; the upper end when bracketed
  double ratio_lo = 0;  // lower end of a bracketed ratio, else = ratio
  double constant = no_constant;
  bool exact = false;   // |ratio − constant| ≤ tol rather than ratio ≤ constant·(1 + tol)
  bool pass = true;
  std::string note;
};

struct TrendOptions {
  int batches = 10;
  double alpha = 0.05;
};

/// Pooled sign test on the increments of per-batch maxima between
/// consecutive dimensions. Growth is flagged when the two-sided p-value is
/// below alpha and increments outnumber decrements.
struct TrendResult {
  bool applied = false;
  int increments = 0, decrements = 0;
  double p_value = 1.0;
  bool growth = false;
  std::vector<std::pair<int, double>> per_dim_max;
};

struct RatioReport {
  std::string check;
  std::vector<SeedRow> rows;
  double max = 0, min = 0, median = 0;
  double constant = no_constant;  // asserted constant shared by the rows, if any
  double tol = 1e-9;
  bool guarded = true;            // trend guard applies when no constant is asserted
  std::optional<std::pair<double, double>> band;
  TrendResult trend;
  bool pass = true;      // every row within its constant, exactness and band
  bool trend_ok = true;  // no growth flagged, or the guard does not apply

  bool asserted() const { return !std::isnan(constant); }
};

/// Two-sided exact binomial (p = 1/2) p-value for k successes in n trials.
inline double sign_test_p(int k, int n) {
  if (n <= 0) return 1.0;
  boost::math::binomial_distribution<double> B(n, 0.5);
  double lo = boost::math::cdf(B, k);
  double hi = k == 0 ? 1.0 : boost::math::cdf(boost::math::complement(B, k - 1));
  return std::min(1.0, 2.0 * std::min(lo, hi));
}

inline TrendResult trend_test(const std::vector<SeedRow>& rows, const TrendOptions& opt = {}) {
  TrendResult r;
  std::set<int> dimset;
  std::set<std::uint64_t> seedset;
  for (const auto& row : rows) dimset.insert(row.dim), seedset.insert(row.seed);
  std::vector<int> dims(dimset.begin(), dimset.end());
  for (int d : dims) {
    double m = -inf;
    for (const auto& row : rows)
      if (row.dim == d) m = std::max(m, row.ratio);
    r.per_dim_max.emplace_back(d, m);
  }
  if (dims.size() < 2) return r;
  r.applied = true;
  std::vector<std::uint64_t> seeds(seedset.begin(), seedset.end());
  const int B = std::max(1, std::min<int>(opt.batches, static_cast<int>(seeds.size())));
  std::map<std::uint64_t, int> batch_of;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    batch_of[seeds[i]] = static_cast<int>(i * static_cast<std::size_t>(B) / seeds.size());
  std::vector<std::map<int, double>> maxima(static_cast<std::size_t>(B));
  for (const auto& row : rows) {
    auto& m = maxima[static_cast<std::size_t>(batch_of[row.seed])];
    auto it = m.find(row.dim);
    if (it == m.end()) m[row.dim] = row.ratio;
    else it->second = std::max(it->second, row.ratio);
  }
  for (const auto& m : maxima)
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
      auto a = m.find(dims[i]), b = m.find(dims[i + 1]);
      if (a == m.end() || b == m.end()) continue;
      double diff = b->second - a->second;
      if (std::abs(diff) <= 1e-12 * std::max(std::abs(a->second), std::abs(b->second))) continue;
      (diff > 0 ? r.increments : r.decrements)++;
    }
  r.p_value = sign_test_p(r.increments, r.increments + r.decrements);
  r.growth = r.p_value < opt.alpha && r.increments > r.decrements;
  return r;
}

inline void judge_row(SeedRow& row, double tol) {
  if (!row.pass) return;
  if (!std::isfinite(row.ratio) || !std::isfinite(row.ratio_lo)) {
    row.pass = false;
    if (row.note.empty()) row.note = "non-finite ratio";
    return;
  }
  if (std::isnan(row.constant)) return;
  if (row.exact) row.pass = std::abs(row.ratio - row.constant) <= tol * std::max(1.0, row.constant);
  else row.pass = row.ratio <= row.constant * (1.0 + tol);
}

/// Recomputes aggregates, row verdicts, band membership and the trend guard.
/// The guard is a separate verdict: pass concerns the rows only.
inline void finalize(RatioReport& r, const TrendOptions& trend = {}) {
  for (auto& row : r.rows) {
    judge_row(row, r.tol);
    if (r.band && row.pass && (row.ratio_lo < r.band->first || row.ratio > r.band->second)) {
      row.pass = false;
      row.note = "outside band";
    }
  }
  std::vector<double> v;
  for (const auto& row : r.rows) v.push_back(row.ratio);
  if (v.empty()) {
    r.max = r.min = r.median = 0.0;
  } else {
    std::sort(v.begin(), v.end());
    r.min = v.front();
    r.max = v.back();
    r.median = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  }
  r.pass = std::all_of(r.rows.begin(), r.rows.end(), [](const SeedRow& s) { return s.pass; });
  r.trend = trend_test(r.rows, trend);
  r.trend_ok = !(r.guarded && !r.asserted() && r.trend.growth);
}

/// Appends rows of reports with the same check name; order is preserved.
inline void merge_into(std::vector<RatioReport>& acc, const std::vector<RatioReport>& more) {
  for (const auto& r : more) {
    auto it = std::find_if(acc.begin(), acc.end(), [&](const RatioReport& a) { return a.check == r.check; });
    if (it == acc.end()) {
      acc.push_back(r);
    } else {
      it->rows.insert(it->rows.end(), r.rows.begin(), r.rows.end());
      if (std::isnan(it->constant)) it->constant = r.constant;
      it->guarded = it->guarded && r.guarded;
    }
  }
}

// ---------------------------------------------------------------------------
// Check options and instance-derived data

struct CheckOptions {
  double eps = defaults::epsilon;
  int lambda_points = 5;
  int grid_points = defaults::kcurve_points;
  double span = defaults::kcurve_span;
  double tol = 1e-9;
  double scale = 1.0;  // multiplies x and every derived sequence
  int threads = 1;     // per-instance parallelism (suites parallelize over seeds)
};

/// Independent stream for derived data of an instance.
inline Rng derived_rng(const Instance& inst, std::uint64_t stream) {
  return Rng(inst.spec.seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL * (stream + 1));
}

namespace stream {
inline constexpr std::uint64_t general = 1, adapted = 2, positive = 3, splits = 4;
}

inline std::vector<Operator> scaled(std::vector<Operator> v, double c) {
  if (c != 1.0)
    for (auto& a : v) a *= c;
  return v;
}

inline Martingale instance_martingale(const Instance& inst, const CheckOptions& opt) {
  Operator x = inst.x;
  if (opt.scale != 1.0) x *= opt.scale;
  return Martingale(inst.F, x);
}

inline SeedRow base_row(const Instance& inst) {
  SeedRow r;
  r.seed = inst.spec.seed;
  r.dim = inst.spec.dim;
  r.levels = inst.spec.levels;
  r.mode = to_string(inst.spec.mode);
  return r;
}

inline RatioReport single(std::string name, SeedRow row, double constant = no_constant, double tol = 1e-9) {
  RatioReport r;
  r.check = std::move(name);
  r.constant = constant;
  r.tol = tol;
  r.rows.push_back(std::move(row));
  return r;
}

inline void set_ratio(SeedRow& row, double lhs, double rhs) {
  row.lhs = lhs;
  row.rhs = rhs;
  if (rhs > 0.0) row.ratio = lhs / rhs;
  else row.ratio = lhs > 0.0 ? inf : 1.0;  // 0/0: both sides vanish
  row.ratio_lo = row.ratio;
}

inline std::string num_tag(double v) { return short_num(v); }

// ---------------------------------------------------------------------------
// K-closedness

enum class HardyVariant { martingale, conditioned, adapted };

inline const char* to_string(HardyVariant v) {
  switch (v) {
    case HardyVariant::martingale: return "martingale";
    case HardyVariant::conditioned: return "conditioned";
    case HardyVariant::adapted: return "adapted";
  }
  return "?";
}

inline HardyVariant parse_hardy_variant(const std::string& s) {
  if (s == "martingale") return HardyVariant::martingale;
  if (s == "conditioned") return HardyVariant::conditioned;
  if (s == "adapted") return HardyVariant::adapted;
  throw std::invalid_argument("unknown Hardy variant '" + s + "'");
}

/// The Hardy input of a variant: x itself, a general sequence with σ_c, or
/// an adapted sequence with 𝒮_c.
inline HardyInput hardy_input(const Instance& inst, HardyVariant v, const CheckOptions& opt) {
  switch (v) {
    case HardyVariant::martingale: return HardyInput::of(instance_martingale(inst, opt));
    case HardyVariant::conditioned: {
      Rng rng = derived_rng(inst, stream::general);
      SequenceBundle b(inst.F, scaled(random_sequence(inst.F, rng), opt.scale), false);
      return HardyInput::of(b, SquareKind::sigma_c);
    }
    case HardyVariant::adapted: {
      Rng rng = derived_rng(inst, stream::adapted);
      SequenceBundle b(inst.F, scaled(random_adapted(inst.F, rng), opt.scale), true);
      return HardyInput::of(b, SquareKind::Sc_seq);
    }
  }
  throw std::invalid_argument("hardy_input: unknown variant");
}

inline std::vector<double> hardy_grid(const HardyInput& in, const SpaceSpec& A0, EndpointA1 A1,
                                      const CheckOptions& opt, double span_factor = 1.0) {
  return default_grid(hardy_endpoint_A0(in, A0), hardy_endpoint_A1(in, A1), opt.grid_points, opt.span * span_factor);
}

/// sup_t upper/lower of the (h_p, h_∞) curve. Also verifies lower ≤ every
/// decomposition cost. Asserts the Jones constant at p = 2, and 2 for
/// one-term martingales (the function couple).
inline RatioReport check_k_closedness(const Instance& inst, double p, HardyVariant v = HardyVariant::martingale,
                                      const CheckOptions& opt = {}) {
  if (!(p > 0.0) || std::isinf(p)) throw std::invalid_argument("check_k_closedness: p must lie in (0, ∞)");
  HardyInput in = hardy_input(inst, v, opt);
  auto grid = hardy_grid(in, Lp{p}, EndpointA1::h_inf, opt);
  KCurveOptions ko{opt.lambda_points, opt.eps, opt.threads, false};
  std::vector<DecompositionSample> samples;
  KCurve c = k_curve(in, p, grid, ko, &samples);
  SeedRow row = base_row(inst);
  double worst = 0.0;
  std::size_t at = 0;
  bool zero = true;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.upper[i] > 0.0) zero = false;
    double r = c.lower[i] > 0.0 ? c.upper[i] / c.lower[i] : (c.upper[i] > 0.0 ? inf : 1.0);
    if (r > worst) worst = r, at = i;
  }
  if (zero) worst = 1.0;
  set_ratio(row, c.upper[at], c.lower[at]);
  row.ratio = row.ratio_lo = worst;
  // lower against every cost, including those not on the envelope
  double scale = 1e-8 * std::max(1.0, hardy_endpoint_A0(in, Lp{p}));
  for (std::size_t i = 0; i < c.size(); ++i)
    for (const auto& s : samples)
      if (c.lower[i] > norm(Lp{p}, s.mu_y) + c.t[i] * s.z_inf + scale) {
        row.pass = false;
        row.note = "lower bound exceeds a decomposition cost";
      }
  double C = no_constant;
  if (p == 2.0) {
    C = defaults::jones_constant(opt.eps);
    if (v == HardyVariant::martingale && in.levels() == 1) row.constant = 2.0;
    else row.constant = C;
  }
  return single("k_closedness[p=" + num_tag(p) + "," + to_string(v) + "]", std::move(row), C, opt.tol);
}

/// Every certificate of the Jones decomposition at `points` log-spaced t
/// over [t*/10², t*·10²]. ratio = max_t cost/k_ref.
inline RatioReport check_jones_certificates(const Instance& inst, HardyVariant v = HardyVariant::martingale,
                                           int points = 20, const CheckOptions& opt = {}) {
  HardyInput in = hardy_input(inst, v, opt);
  SeedRow row = base_row(inst);
  auto grid = default_grid(sequence_norm(in, 2.0), sequence_norm(in, inf), points, 1e2);
  double worst = 0.0;
  for (double t : grid) {
    JonesDecomposition J = jones_decompose(in, t, opt.eps);
    if (!J.cert.all()) {
      row.pass = false;
      row.note = "certificate failed at t=" + num_tag(t);
    }
    double r = J.kref > 0.0 ? J.cost / J.kref : (J.cost > 0.0 ? inf : 1.0);
    if (r >= worst) {
      worst = r;
      row.lhs = J.cost;
      row.rhs = J.kref;
    }
  }
  row.ratio = row.ratio_lo = worst;
  row.constant = defaults::jones_constant(opt.eps);
  return single("jones_certificates[" + std::string(to_string(v)) + "]", std::move(row), row.constant, opt.tol);
}

// ---------------------------------------------------------------------------
// Interpolation identities

enum class InterpFamilyKind { power, orlicz, gen_lorentz, bmo_power };

inline const char* to_string(InterpFamilyKind k) {
  switch (k) {
    case InterpFamilyKind::power: return "power";
    case InterpFamilyKind::orlicz: return "orlicz";
    case InterpFamilyKind::gen_lorentz: return "gen_lorentz";
    case InterpFamilyKind::bmo_power: return "bmo_power";
  }
  return "?";
}

inline InterpFamilyKind parse_interp_family(const std::string& s) {
  if (s == "power") return InterpFamilyKind::power;
  if (s == "orlicz") return InterpFamilyKind::orlicz;
  if (s == "gen_lorentz") return InterpFamilyKind::gen_lorentz;
  if (s == "bmo_power" || s == "bmo") return InterpFamilyKind::bmo_power;
  throw std::invalid_argument("unknown interpolation family '" + s + "'");
}

/// power:       (h_p, h_∞)_{θ,γ} = h_{r,γ}, 1/r = (1−θ)/p
/// orlicz:      (h_Φ, h_∞)_{θ,γ} = h_{Φ_0,γ}, Φ_0 = theta_transform(Φ, θ)
/// gen_lorentz: (h_{p,φ}, h_∞)_{ϱ,γ} = h_{γ,φ_0}, φ = t^a, ϱ = t^b, φ_0 = φ/ϱ(φ)
/// bmo_power:   (h_p, bmo)_{θ,γ} = h_{r,γ}
struct InterpFamily {
  InterpFamilyKind kind = InterpFamilyKind::power;
  double p = 2.0;
  std::vector<double> thetas{0.25, 0.5, 0.75};
  std::vector<double> gammas{1.0, 2.0, 4.0, inf};
  OrliczFunction phi = OrliczFunction::two_power(1.0, 2.0);
  double weight_exponent = 0.4;  // a in φ = t^a
  double rho_exponent = 0.5;     // b in ϱ = t^b

  SpaceSpec A0() const {
    switch (kind) {
      case InterpFamilyKind::orlicz: return Orlicz{phi};
      case InterpFamilyKind::gen_lorentz: return GenLorentz{WeightFunction::power(weight_exponent), p};
      default: return Lp{p};
    }
  }
  EndpointA1 A1() const { return kind == InterpFamilyKind::bmo_power ? EndpointA1::bmo : EndpointA1::h_inf; }
};

namespace detail {

struct InterpMember {
  std::string name;
  ParamSpace F;
  SpaceSpec target;
};

inline std::vector<InterpMember> interp_members(const InterpFamily& fam) {
  std::vector<InterpMember> out;
  const std::string fk = to_string(fam.kind);
  if (fam.kind == InterpFamilyKind::gen_lorentz) {
    double a = fam.weight_exponent, b = fam.rho_exponent;
    if (!(a > 0.0) || !(b > 0.0 && b < 1.0)) throw std::invalid_argument("interpolation: weights must be in Q(0,1)");
    for (double g : fam.gammas)
      out.push_back({"interp[" + fk + ",a=" + num_tag(a) + ",b=" + num_tag(b) + ",p=" + num_tag(fam.p) +
                         ",gamma=" + num_tag(g) + "]",
                     ParamSpace{PiecewisePower::power(b), g}, GenLorentz{WeightFunction::power(a * (1.0 - b)), g}});
    return out;
  }
  for (double th : fam.thetas)
    for (double g : fam.gammas) {
      ParamSpace F = ParamSpace::power(th, g);
      if (fam.kind == InterpFamilyKind::orlicz)
        out.push_back({"interp[" + fk + "," + fam.phi.name() + ",theta=" + num_tag(th) + ",gamma=" + num_tag(g) + "]",
                       F, OrliczLorentz{theta_transform(fam.phi, th), g}});
      else
        out.push_back({"interp[" + fk + ",p=" + num_tag(fam.p) + ",theta=" + num_tag(th) + ",gamma=" + num_tag(g) + "]",
                       F, Lorentz{fam.p / (1.0 - th), g}});
    }
  return out;
}

}  // namespace detail

/// For each member: the bracket of ‖x‖ in the interpolation space from the
/// certified K-curve, divided by the target-space norm of μ(s_c(x)). The
/// grid is widened (×10 span, up to three times) until both tail regimes
/// validate.
inline std::vector<RatioReport> check_interpolation_identity(const Instance& inst, const InterpFamily& fam,
                                                             const CheckOptions& opt = {}) {
  auto members = detail::interp_members(fam);
  Martingale m = instance_martingale(inst, opt);
  HardyInput in = HardyInput::of(m);
  const SpaceSpec A0 = fam.A0();
  const HardyCouple couple{A0, fam.A1(), LowerBound::ambient};
  KCurveOptions ko{opt.lambda_points, opt.eps, opt.threads, fam.A1() == EndpointA1::bmo};
  StepFunction f = mu_sqrt(m.algebra(), in.square_total());
  std::vector<RatioReport> out;
  std::string failure;
  std::optional<KCurve> curve;
  for (int attempt = 0; attempt < 4 && !curve; ++attempt) {
    auto grid = hardy_grid(in, A0, fam.A1(), opt, std::pow(10.0, attempt));
    KCurve c = k_curve(in, couple, grid, sample_decompositions(in, grid, ko));
    try {
      detail::check_regimes(c.t, c.lower, "lower");
      detail::check_regimes(c.t, c.upper, "upper");
      curve = std::move(c);
    } catch (const std::domain_error& e) {
      failure = e.what();
    }
  }
  for (const auto& mem : members) {
    SeedRow row = base_row(inst);
    if (!curve) {
      row.pass = false;
      row.note = failure;
      row.ratio = row.ratio_lo = inf;
    } else {
      Interval I = real_interp_norm(*curve, mem.F);
      double rhs = norm(mem.target, f);
      set_ratio(row, I.hi, rhs);
      row.ratio_lo = rhs > 0.0 ? I.lo / rhs : row.ratio;
    }
    out.push_back(single(mem.name, std::move(row), no_constant, opt.tol));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Appendix inequalities

enum class Flavor { norm, phi_moment };

inline const char* to_string(Flavor f) { return f == Flavor::norm ? "norm" : "phi_moment"; }
inline Flavor parse_flavor(const std::string& s) {
  if (s == "norm") return Flavor::norm;
  if (s == "phi_moment" || s == "phi") return Flavor::phi_moment;
  throw std::invalid_argument("unknown flavor '" + s + "'");
}

namespace detail {

inline double spec_norm_of(const SpaceSpec& spec, const TracialAlgebra& A, const Operator& x) {
  return norm(spec, mu(x, A));
}

inline double sqrt_norm_of(const SpaceSpec& spec, const TracialAlgebra& A, const Operator& w) {
  return norm(spec, mu_sqrt(A, w));
}

inline const OrliczFunction& require_orlicz(const SpaceSpec& spec, const char* who) {
  const auto* o = std::get_if<Orlicz>(&spec);
  if (!o) throw std::invalid_argument(std::string(who) + ": the Φ-moment flavor needs an Orlicz space");
  return o->phi;
}

/// E ∈ Int(L_a, L_b) for the families we can classify: L_p, convex or
/// concave Orlicz (by convexity/concavity indices), L_{p,q}.
inline bool in_int(const SpaceSpec& spec, double a, double b, bool open_a = false, bool open_b = false) {
  auto inside = [&](double lo, double hi) {
    bool ok_lo = open_a ? lo > a : lo >= a;
    bool ok_hi = open_b ? hi < b : hi <= b;
    return ok_lo && ok_hi;
  };
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Lp>) return inside(s.p, s.p);
        else if constexpr (std::is_same_v<T, Lorentz>) return inside(s.p, s.p) && a < s.p && s.p < b;
        else if constexpr (std::is_same_v<T, Orlicz>) return inside(s.phi.convexity(), s.phi.concavity());
        else return false;
      },
      spec);
}

inline Operator sum_of(const TracialAlgebra& A, const std::vector<Operator>& v) {
  Operator s = Operator::zero(A);
  for (const auto& a : v) s += a;
  return s;
}

}  // namespace detail

enum class DoobDirection { forward, reverse };

inline const char* to_string(DoobDirection d) { return d == DoobDirection::forward ? "forward" : "reverse"; }
inline DoobDirection parse_doob_direction(const std::string& s) {
  if (s == "forward") return DoobDirection::forward;
  if (s == "reverse") return DoobDirection::reverse;
  throw std::invalid_argument("unknown dual Doob direction '" + s + "'");
}

/// forward: ‖Σ E_k(x_k)‖_E / ‖Σ x_k‖_E, E ∈ Int(L_1, L_q);
/// reverse: ‖Σ a_k‖_E / ‖Σ E_k(a_k)‖_E, E ∈ Int(L_p, L_1), p < 1.
/// Φ-moment flavor uses τ[Φ(·)] in place of the norm. Inputs are g*g
/// positive with random rank. Exactness (ratio 1) is asserted forward at L_1.
inline RatioReport check_dual_doob(const Instance& inst, const SpaceSpec& spec, DoobDirection dir,
                                   Flavor flavor = Flavor::norm, const CheckOptions& opt = {}) {
  validate(spec);
  const bool fwd = dir == DoobDirection::forward;
  if (fwd) {
    if (!detail::in_int(spec, 1.0, inf, false, true) || (flavor == Flavor::norm && !is_normed(spec)))
      throw std::invalid_argument("check_dual_doob: forward needs E ∈ Int(L_1, L_q), q < ∞");
  } else if (!detail::in_int(spec, 0.0, 1.0, true, false)) {
    throw std::invalid_argument("check_dual_doob: reverse needs E ∈ Int(L_p, L_1), 0 < p < 1");
  }
  const Filtration& F = inst.F;
  const TracialAlgebra& A = F.algebra();
  Rng rng = derived_rng(inst, stream::positive);
  auto x = scaled(random_positive_sequence(F, rng), opt.scale);
  std::vector<Operator> ex;
  for (int k = 1; k <= F.levels(); ++k) ex.push_back(hermitian_part(F.expect(x[static_cast<std::size_t>(k - 1)], k)));
  Operator raw = hermitian_part(detail::sum_of(A, x)), cond = hermitian_part(detail::sum_of(A, ex));
  const Operator& top = fwd ? cond : raw;
  const Operator& bottom = fwd ? raw : cond;
  SeedRow row = base_row(inst);
  if (flavor == Flavor::norm) {
    set_ratio(row, detail::spec_norm_of(spec, A, top), detail::spec_norm_of(spec, A, bottom));
  } else {
    const auto& phi = detail::require_orlicz(spec, "check_dual_doob");
    set_ratio(row, orlicz_modular(phi, A, top), orlicz_modular(phi, A, bottom));
  }
  double C = no_constant;
  double tol = opt.tol;
  const auto* lp = std::get_if<Lp>(&spec);
  if (fwd && flavor == Flavor::norm && lp && lp->p == 1.0) {
    C = 1.0;
    row.constant = 1.0;
    row.exact = true;
    tol = 1e-10;
  }
  std::string name = "dual_doob[" + std::string(to_string(dir)) + "," + to_string(flavor) + "," + describe(spec) + "]";
  return single(std::move(name), std::move(row), C, tol);
}

enum class SteinKind { stein, lepingle_yor };

inline const char* to_string(SteinKind k) { return k == SteinKind::stein ? "stein" : "lepingle_yor"; }

/// stein:        ‖(Σ|E_n a_n|²)^{1/2}‖_E / ‖(Σ|a_n|²)^{1/2}‖_E, 1 < p < ∞
/// lepingle_yor: ‖(Σ|E_{n−1} ξ_n|²)^{1/2}‖_E / ‖(Σ|ξ_n|²)^{1/2}‖_E, ξ adapted
inline RatioReport check_stein_lepingle_yor(const Instance& inst, const SpaceSpec& spec, SteinKind which,
                                            Flavor flavor = Flavor::norm, const CheckOptions& opt = {}) {
  validate(spec);
  if (which == SteinKind::stein) {
    if (!detail::in_int(spec, 1.0, inf, true, true))
      throw std::invalid_argument("check_stein: needs 1 < p < ∞");
  } else if (!detail::in_int(spec, 1.0, inf, false, true)) {
    throw std::invalid_argument("check_lepingle_yor: needs E ∈ Int(L_1, L_q), q < ∞");
  }
  const Filtration& F = inst.F;
  const TracialAlgebra& A = F.algebra();
  std::vector<Operator> a;
  if (which == SteinKind::stein) {
    Rng rng = derived_rng(inst, stream::general);
    a = scaled(random_sequence(F, rng), opt.scale);
  } else {
    Rng rng = derived_rng(inst, stream::adapted);
    a = scaled(random_adapted(F, rng), opt.scale);
    SequenceBundle check(F, a, true);  // throws on adaptedness violation
  }
  Operator wt = Operator::zero(A), wa = Operator::zero(A);
  for (int n = 1; n <= F.levels(); ++n) {
    const Operator& an = a[static_cast<std::size_t>(n - 1)];
    Operator e = F.expect(an, which == SteinKind::stein ? n : n - 1);
    wt += abs_sq(e);
    wa += abs_sq(an);
  }
  wt = hermitian_part(wt);
  wa = hermitian_part(wa);
  SeedRow row = base_row(inst);
  if (flavor == Flavor::norm) {
    set_ratio(row, detail::sqrt_norm_of(spec, A, wt), detail::sqrt_norm_of(spec, A, wa));
  } else {
    const auto& phi = detail::require_orlicz(spec, "check_stein_lepingle_yor");
    set_ratio(row, orlicz_modular(phi, mu_sqrt(A, wt)), orlicz_modular(phi, mu_sqrt(A, wa)));
  }
  std::string name = std::string(to_string(which)) + "[" + to_string(flavor) + "," + describe(spec) + "]";
  return single(std::move(name), std::move(row), no_constant, opt.tol);
}

namespace detail {

/// Random splittings x = a + b: the two trivial ones, column/row parts of
/// Gaussian perturbations at three scales, and spectral cuts of |x|.
inline std::vector<std::pair<Operator, Operator>> random_splits(const Instance& inst, const Operator& x,
                                                                const CheckOptions& opt) {
  const TracialAlgebra& A = inst.F.algebra();
  std::vector<std::pair<Operator, Operator>> out{{x, Operator::zero(A)}, {Operator::zero(A), x}};
  Rng rng = derived_rng(inst, stream::splits);
  double sx = std::max(1e-300, norm_inf(x));
  for (double c : {0.1, 0.5, 1.0}) {
    Operator g = random_operator(A, rng);
    double sg = std::max(1e-300, norm_inf(g));
    g *= c * sx / sg;
    out.push_back({x - g, g});
  }
  Operator h = sqrt_psd(hermitian_part(abs_sq(x)));
  double top = max_eigenvalue(h);
  for (double frac : {0.25, 0.5, 0.75}) {
    Operator P = spectral_projection(h, -1.0, frac * top);
    out.push_back({x * P, x - x * P});
  }
  (void)opt;
  return out;
}

}  // namespace detail

/// ‖S_c(x)‖_F/‖s_c(x)‖_F and ‖x‖_F/‖s_c(x)‖_F for F ∈ Int(L_p, L_2), with
/// √(2/r) asserted at F = L_r; the Φ-moment form max{τΦ(S_c), τΦ(|x|)}/τΦ(s_c);
/// and, for F ∈ Int(L_1, L_2), the BG-1 ratio ‖x‖_F/(‖S_c(a)‖_F + ‖S_r(b)‖_F)
/// maximized over random splits x = a + b.
inline std::vector<RatioReport> check_hardy_inequalities(const Instance& inst, const SpaceSpec& spec,
                                                         Flavor flavor = Flavor::norm, const CheckOptions& opt = {}) {
  validate(spec);
  if (!detail::in_int(spec, 0.0, 2.0, true, false)) throw std::invalid_argument("check_hardy: needs F ∈ Int(L_p, L_2)");
  Martingale m = instance_martingale(inst, opt);
  const TracialAlgebra& A = m.algebra();
  const std::string tag = describe(spec);
  std::vector<RatioReport> out;
  if (flavor == Flavor::phi_moment) {
    const auto& phi = detail::require_orlicz(spec, "check_hardy");
    SeedRow row = base_row(inst);
    double lhs = std::max(orlicz_modular(phi, hardy_rearrangement(m, HardyKind::Hc)),
                          orlicz_modular(phi, A, m.terminal()));
    set_ratio(row, lhs, orlicz_modular(phi, hardy_rearrangement(m, HardyKind::hc)));
    out.push_back(single("hardy[phi_moment," + tag + "]", std::move(row), no_constant, opt.tol));
    return out;
  }
  double hc = hardy_norm(m, HardyKind::hc, spec);
  double C = no_constant;
  if (const auto* lp = std::get_if<Lp>(&spec)) C = std::sqrt(2.0 / lp->p);
  SeedRow r1 = base_row(inst), r2 = base_row(inst);
  set_ratio(r1, hardy_norm(m, HardyKind::Hc, spec), hc);
  set_ratio(r2, detail::spec_norm_of(spec, A, m.terminal()), hc);
  r1.constant = r2.constant = C;
  out.push_back(single("hardy[S_c/s_c," + tag + "]", std::move(r1), C, opt.tol));
  out.push_back(single("hardy[x/s_c," + tag + "]", std::move(r2), C, opt.tol));
  if (detail::in_int(spec, 1.0, 2.0)) {
    SeedRow r3 = base_row(inst);
    double xn = detail::spec_norm_of(spec, A, m.terminal());
    double worst = 0.0;
    for (const auto& [a, b] : detail::random_splits(inst, m.terminal(), opt)) {
      double den = hardy_norm(Martingale(m.filtration(), a), HardyKind::Hc, spec) +
                   hardy_norm(Martingale(m.filtration(), b), HardyKind::Hr, spec);
      double r = den > 0.0 ? xn / den : (xn > 0.0 ? inf : 1.0);
      if (r >= worst) worst = r, r3.lhs = xn, r3.rhs = den;
    }
    r3.ratio = r3.ratio_lo = worst;
    out.push_back(single("hardy[BG1," + tag + "]", std::move(r3), no_constant, opt.tol));
  }
  return out;
}

/// (a) ‖S_c(x)‖/‖s_c(x)‖, (b) ‖S_c(x)‖/‖x‖_{h^d}, and the reverse direction
/// reported as the best cost ratio (‖x_d‖_{h^d} + ‖x_c‖_{h^c})/‖S_c(x)‖ over
/// candidate splittings: trivial ones and jump/continuous cuts at Cuculescu
/// projections of the partial S_c² on a λ-grid. The reverse ratio is an
/// upper bound of the infimum and is not asserted.
inline std::vector<RatioReport> check_davis_inclusions(const Instance& inst, const SpaceSpec& spec,
                                                       const CheckOptions& opt = {}) {
  validate(spec);
  if (!detail::in_int(spec, 1.0, 2.0) || !is_normed(spec))
    throw std::invalid_argument("check_davis: needs E ∈ Int(L_1, L_2)");
  Martingale m = instance_martingale(inst, opt);
  const Filtration& F = m.filtration();
  const std::string tag = describe(spec);
  const double Sc = hardy_norm(m, HardyKind::Hc, spec);
  std::vector<RatioReport> out;
  double Ca = no_constant;
  if (const auto* lp = std::get_if<Lp>(&spec)) Ca = std::sqrt(2.0 / lp->p);
  SeedRow ra = base_row(inst), rb = base_row(inst), rr = base_row(inst);
  set_ratio(ra, Sc, hardy_norm(m, HardyKind::hc, spec));
  ra.constant = Ca;
  set_ratio(rb, Sc, hardy_norm(m, HardyKind::hd, spec));
  out.push_back(single("davis[a:S_c/s_c," + tag + "]", std::move(ra), Ca, opt.tol));
  out.push_back(single("davis[b:S_c/h_d," + tag + "]", std::move(rb), no_constant, opt.tol));

  const int N = m.levels();
  auto cost = [&](const std::vector<Operator>& dd) {
    std::vector<Operator> dc;
    for (int k = 0; k < N; ++k) dc.push_back(m.differences()[static_cast<std::size_t>(k)] - dd[static_cast<std::size_t>(k)]);
    return norm(spec, mu_diagonal(F.algebra(), dd)) +
           norm(spec, mu_sqrt(F.algebra(), square_sum(F, dc, SquareKind::s_c)));
  };
  double best = std::min(hardy_norm(m, HardyKind::hd, spec), hardy_norm(m, HardyKind::hc, spec));
  const auto& Sp = m.Sc_partials();
  double top = detail::positive_norm(Sp.back());
  for (int j = 0; j <= 8 && top > 0.0; ++j) {
    double lam2 = top * std::pow(2.0, -j);
    CuculescuRun run = detail::cuculescu_unchecked(Sp, lam2, F, Measurability::adapted, false, top);
    std::vector<Operator> dd;
    for (int k = 1; k <= N; ++k) {
      Operator jump = m.dx(k) * (run.q[static_cast<std::size_t>(k - 1)] - run.q[static_cast<std::size_t>(k)]);
      dd.push_back(jump - F.expect(jump, k - 1));
    }
    best = std::min(best, cost(dd));
  }
  set_ratio(rr, best, Sc);
  RatioReport rev = single("davis[reverse:best_split/S_c," + tag + "]", std::move(rr), no_constant, opt.tol);
  rev.guarded = false;
  out.push_back(std::move(rev));
  return out;
}

// ---------------------------------------------------------------------------
// Suites

/// One configured check. Fields not used by `name` are ignored.
struct CheckSpec {
  std::string name;  // k_closedness | jones_certificates | interpolation | dual_doob | stein | lepingle_yor | hardy | davis
  double p = 2.0;
  HardyVariant variant = HardyVariant::martingale;
  InterpFamily family;
  DoobDirection direction = DoobDirection::forward;
  Flavor flavor = Flavor::norm;
  SpaceSpec space = Lp{1.0};
  int points = 20;
  std::optional<std::pair<double, double>> band;
};

struct SuiteConfig {
  std::vector<std::uint64_t> seeds;
  std::vector<int> dims{4, 8, 16};
  std::vector<int> levels{2, 3, 4, 5, 6};
  std::vector<Mode> modes{Mode::noncommutative, Mode::dyadic};
  CheckOptions options;
  TrendOptions trend;
  std::vector<CheckSpec> checks;
  int threads = 0;  // 0: NCMART_THREADS / hardware
};

struct Report {
  std::vector<RatioReport> reports;
  bool pass = true;      // all rows of all reports
  bool trend_ok = true;  // no guarded report flags growth
  std::size_t instances = 0;
};

/// The instance used for (seed, dim): mode and levels cycle with the seed
/// so that every dimension sees the same mix.
inline InstanceSpec suite_instance(const SuiteConfig& cfg, std::uint64_t seed, int dim) {
  if (cfg.modes.empty() || cfg.levels.empty()) throw std::invalid_argument("suite: modes and levels must be non-empty");
  InstanceSpec s;
  s.seed = seed;
  s.dim = dim;
  s.mode = cfg.modes[seed % cfg.modes.size()];
  s.levels = cfg.levels[(seed / cfg.modes.size()) % cfg.levels.size()];
  return s;
}

inline std::vector<RatioReport> run_check(const Instance& inst, const CheckSpec& c, const CheckOptions& opt) {
  if (c.name == "k_closedness") return {check_k_closedness(inst, c.p, c.variant, opt)};
  if (c.name == "jones_certificates") return {check_jones_certificates(inst, c.variant, c.points, opt)};
  if (c.name == "interpolation") return check_interpolation_identity(inst, c.family, opt);
  if (c.name == "dual_doob") return {check_dual_doob(inst, c.space, c.direction, c.flavor, opt)};
  if (c.name == "stein") return {check_stein_lepingle_yor(inst, c.space, SteinKind::stein, c.flavor, opt)};
  if (c.name == "lepingle_yor") return {check_stein_lepingle_yor(inst, c.space, SteinKind::lepingle_yor, c.flavor, opt)};
  if (c.name == "hardy") return check_hardy_inequalities(inst, c.space, c.flavor, opt);
  if (c.name == "davis") return check_davis_inclusions(inst, c.space, opt);
  throw std::invalid_argument("unknown check '" + c.name + "'");
}

/// Runs every check on every (seed, dim) instance, seeds in parallel.
/// Aggregation is by index, so the report does not depend on scheduling.
inline Report run_suite(const SuiteConfig& cfg) {
  for (const auto& c : cfg.checks) {
    static const std::set<std::string> known{"k_closedness", "jones_certificates", "interpolation", "dual_doob",
                                             "stein",        "lepingle_yor",       "hardy",         "davis"};
    if (!known.count(c.name)) throw std::invalid_argument("unknown check '" + c.name + "'");
  }
  std::vector<InstanceSpec> specs;
  for (std::uint64_t seed : cfg.seeds)
    for (int d : cfg.dims) specs.push_back(suite_instance(cfg, seed, d));
  std::vector<std::vector<std::vector<RatioReport>>> results(specs.size());
  parallel_for(
      specs.size(),
      [&](std::size_t i) {
        Instance inst = generate(specs[i]);
        auto& res = results[i];
        for (const auto& c : cfg.checks) res.push_back(run_check(inst, c, cfg.options));
      },
      cfg.threads > 0 ? cfg.threads : thread_count());
  Report rep;
  rep.instances = specs.size();
  // check order first, then instance order
  for (std::size_t ci = 0; ci < cfg.checks.size(); ++ci)
    for (const auto& res : results) merge_into(rep.reports, res[ci]);
  for (auto& r : rep.reports) {
    for (const auto& c : cfg.checks)
      if (c.band && r.check.rfind("interp[", 0) == 0 && c.name == "interpolation" &&
          r.check.find(std::string(to_string(c.family.kind)) + ",") == 7)
        r.band = c.band;
    finalize(r, cfg.trend);
  }
  rep.pass = std::all_of(rep.reports.begin(), rep.reports.end(), [](const RatioReport& r) { return r.pass; });
  rep.trend_ok = std::all_of(rep.reports.begin(), rep.reports.end(), [](const RatioReport& r) { return r.trend_ok; });
  return rep;
}

}  // namespace ncmart
