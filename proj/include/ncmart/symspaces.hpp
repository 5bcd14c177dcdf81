#pragma once
//
// Symmetric quasi-norms on decreasing step functions: L_p, Lorentz L_{p,q},
// Orlicz L_Φ, the Orlicz-Lorentz L_{Φ,r}, generalized Lorentz Λ^r(φ), plus
// the parameter spaces F_{ϱ,q} and the (E, L_∞) truncation K-functional.
//

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ncmart/algebra.hpp"
#include "ncmart/config.hpp"
#include "ncmart/rearrangement.hpp"

namespace ncmart {

inline constexpr double inf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Piecewise power functions u ↦ c·u^e on consecutive intervals. All the
// integrals against du/u used below are closed form on such pieces.

struct PowerPiece {
  double lo, hi;  // [lo, hi), lo may be 0 and hi may be ∞
  double c, e;    // value c·u^e
};

namespace detail {

/// ∫_lo^hi c·u^e du/u, throwing on divergence.
inline double power_integral(double c, double e, double lo, double hi) {
  if (c == 0.0 || hi <= lo) return 0.0;
  if (std::abs(e) < 1e-14) {
    if (lo == 0.0 || std::isinf(hi)) throw std::domain_error("power_integral: divergent logarithmic integral");
    return c * std::log(hi / lo);
  }
  if (lo == 0.0) {
    if (e < 0.0) throw std::domain_error("power_integral: divergent at 0");
    if (std::isinf(hi)) throw std::domain_error("power_integral: divergent on (0, ∞)");
    return c * std::pow(hi, e) / e;
  }
  if (std::isinf(hi)) {
    if (e > 0.0) throw std::domain_error("power_integral: divergent at ∞");
    return -c * std::pow(lo, e) / e;
  }
  // lo^e·(exp(e·log(hi/lo)) − 1)/e, stable for small e
  return c * std::pow(lo, e) * std::expm1(e * std::log(hi / lo)) / e;
}

/// sup of c·u^e on [lo, hi] (closed), ∞ when unbounded.
inline double power_sup(double c, double e, double lo, double hi) {
  if (c == 0.0) return 0.0;
  if (e > 0.0) return std::isinf(hi) ? inf : c * std::pow(hi, e);
  if (e < 0.0) return lo == 0.0 ? inf : c * std::pow(lo, e);
  return c;
}

}  // namespace detail

class PiecewisePower {
 public:
  PiecewisePower() = default;
  explicit PiecewisePower(std::vector<PowerPiece> pieces) : pieces_(std::move(pieces)) {
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const auto& p = pieces_[i];
      if (!(p.hi > p.lo) || p.lo < 0.0 || p.c < 0.0 || !std::isfinite(p.c) || !std::isfinite(p.e))
        throw std::invalid_argument("PiecewisePower: invalid piece");
      if (i > 0 && pieces_[i - 1].hi != p.lo) throw std::invalid_argument("PiecewisePower: pieces not contiguous");
    }
  }

  /// c·u^e on (0, ∞).
  static PiecewisePower power(double e, double c = 1.0) { return PiecewisePower({{0.0, inf, c, e}}); }

  /// Log-log linear interpolation through (t_j, f_j), power extrapolation
  /// with the end slopes (flat if a single sample).
  static PiecewisePower loglog(const std::vector<double>& t, const std::vector<double>& f) {
    if (t.size() != f.size() || t.empty()) throw std::invalid_argument("loglog: size mismatch");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!(t[i] > 0.0) || !(f[i] > 0.0)) throw std::invalid_argument("loglog: samples must be positive");
      if (i > 0 && !(t[i] > t[i - 1])) throw std::invalid_argument("loglog: grid must be increasing");
    }
    std::vector<PowerPiece> pcs;
    if (t.size() == 1) return PiecewisePower({{0.0, inf, f[0], 0.0}});
    auto piece = [&](std::size_t i, double lo, double hi) {
      double e = std::log(f[i + 1] / f[i]) / std::log(t[i + 1] / t[i]);
      return PowerPiece{lo, hi, f[i] * std::pow(t[i], -e), e};
    };
    pcs.push_back(piece(0, 0.0, t[0]));
    for (std::size_t i = 0; i + 1 < t.size(); ++i) pcs.push_back(piece(i, t[i], t[i + 1]));
    pcs.push_back(piece(t.size() - 2, t.back(), inf));
    return PiecewisePower(std::move(pcs));
  }

  const std::vector<PowerPiece>& pieces() const { return pieces_; }
  double lo() const { return pieces_.empty() ? 0.0 : pieces_.front().lo; }
  double hi() const { return pieces_.empty() ? 0.0 : pieces_.back().hi; }

  double operator()(double u) const {
    for (const auto& p : pieces_)
      if (u >= p.lo && u < p.hi) return p.c * std::pow(u, p.e);
    if (!pieces_.empty() && u == pieces_.back().hi) return pieces_.back().c * std::pow(u, pieces_.back().e);
    throw std::out_of_range("PiecewisePower: argument outside the domain");
  }

  /// u ↦ u^α·f(u)^β.
  PiecewisePower transformed(double alpha, double beta) const {
    std::vector<PowerPiece> out = pieces_;
    for (auto& p : out) {
      p.c = std::pow(p.c, beta);
      p.e = alpha + beta * p.e;
    }
    return PiecewisePower(std::move(out));
  }

  /// Pointwise f^a·g^b over the common domain.
  static PiecewisePower combine(const PiecewisePower& f, double a, const PiecewisePower& g, double b) {
    double lo = std::max(f.lo(), g.lo()), hi = std::min(f.hi(), g.hi());
    std::vector<double> cuts{lo, hi};
    for (const auto& p : f.pieces_) cuts.push_back(p.lo), cuts.push_back(p.hi);
    for (const auto& p : g.pieces_) cuts.push_back(p.lo), cuts.push_back(p.hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<PowerPiece> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      double l = cuts[i], h = cuts[i + 1];
      if (l < lo || h > hi) continue;
      const PowerPiece& pf = f.piece_at(l, h);
      const PowerPiece& pg = g.piece_at(l, h);
      out.push_back({l, h, std::pow(pf.c, a) * std::pow(pg.c, b), a * pf.e + b * pg.e});
    }
    return PiecewisePower(std::move(out));
  }

  /// ∫_lo^hi f(u)^q du/u.
  double integral(double q, double lo, double hi) const {
    double acc = 0.0;
    for (const auto& p : pieces_) {
      double l = std::max(lo, p.lo), h = std::min(hi, p.hi);
      if (h > l) acc += detail::power_integral(std::pow(p.c, q), q * p.e, l, h);
    }
    return acc;
  }
  double integral(double q) const { return integral(q, lo(), hi()); }

  double sup(double lo, double hi) const {
    double s = 0.0;
    for (const auto& p : pieces_) {
      double l = std::max(lo, p.lo), h = std::min(hi, p.hi);
      if (h > l) s = std::max(s, detail::power_sup(p.c, p.e, l, h));
    }
    return s;
  }
  double sup() const { return sup(lo(), hi()); }

 private:
  const PowerPiece& piece_at(double l, double h) const {
    double mid = std::isinf(h) ? l + 1.0 : 0.5 * (l + h);
    for (const auto& p : pieces_)
      if (mid >= p.lo && mid < p.hi) return p;
    throw std::out_of_range("PiecewisePower: no piece");
  }

  std::vector<PowerPiece> pieces_;
};

/// Weight φ with declared class Q[a1, a2] bounds.
struct WeightFunction {
  PiecewisePower f;
  double a1 = 0.0, a2 = 1.0;

  static WeightFunction power(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("WeightFunction: exponent must be positive");
    return {PiecewisePower::power(a), a, a};
  }
  static WeightFunction sampled(const std::vector<double>& t, const std::vector<double>& v, double a1, double a2) {
    return {PiecewisePower::loglog(t, v), a1, a2};
  }
  double operator()(double t) const { return f(t); }

  /// t^{-a1}φ nondecreasing and t^{-a2}φ nonincreasing: each piece exponent
  /// lies in [a1, a2] (the interpolant is continuous).
  bool in_class(double tol = 1e-12) const {
    for (const auto& p : f.pieces())
      if (p.e < a1 - tol || p.e > a2 + tol) return false;
    return true;
  }
};

/// Shortest "%g" rendering; used in names only.
inline std::string short_num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Orlicz functions

enum class OrliczFamily { power, two_power, x_log };

/// Φ(t) = base(t^scale) with base one of
///   power:     t^p
///   two_power: (t^p + t^q)/2, p-convex and q-concave, Φ(1) = 1
///   x_log:     t·log(1 + t), 1-convex and 2-concave
struct OrliczFunction {
  OrliczFamily family = OrliczFamily::power;
  double p = 1.0, q = 1.0;
  double scale = 1.0;

  static OrliczFunction power(double p) {
    if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("Orlicz power: p must be positive and finite");
    return {OrliczFamily::power, p, p, 1.0};
  }
  static OrliczFunction two_power(double p, double q) {
    if (!(p > 0.0) || !(q >= p) || !std::isfinite(q))
      throw std::invalid_argument("Orlicz two_power: need 0 < p <= q < ∞");
    return {OrliczFamily::two_power, p, q, 1.0};
  }
  static OrliczFunction x_log() { return {OrliczFamily::x_log, 1.0, 2.0, 1.0}; }

  double convexity() const { return p * scale; }
  double concavity() const { return q * scale; }

  double base(double t) const {
    switch (family) {
      case OrliczFamily::power: return std::pow(t, p);
      case OrliczFamily::two_power: return 0.5 * (std::pow(t, p) + std::pow(t, q));
      case OrliczFamily::x_log: return t * std::log1p(t);
    }
    return 0.0;
  }

  double operator()(double t) const {
    if (t < 0.0) throw std::domain_error("Orlicz function: negative argument");
    if (t == 0.0) return 0.0;
    if (std::isinf(t)) return inf;
    return base(std::pow(t, scale));
  }

  double inverse(double u) const {
    if (u < 0.0) throw std::domain_error("Orlicz inverse: negative argument");
    if (u == 0.0) return 0.0;
    if (std::isinf(u)) return inf;
    double b = base_inverse(u);
    return scale == 1.0 ? b : std::pow(b, 1.0 / scale);
  }

  std::string name() const {
    std::string s;
    switch (family) {
      case OrliczFamily::power: s = "power(" + short_num(p) + ")"; break;
      case OrliczFamily::two_power: s = "two_power(" + short_num(p) + "," + short_num(q) + ")"; break;
      case OrliczFamily::x_log: s = "x_log"; break;
    }
    if (scale != 1.0) s += "∘t^" + short_num(scale);
    return s;
  }

 private:
  double base_inverse(double u) const {
    if (family == OrliczFamily::power) return std::pow(u, 1.0 / p);
    // bracket in log t
    double lo, hi;
    if (family == OrliczFamily::two_power) {
      double a = std::pow(u, 1.0 / p), b = std::pow(u, 1.0 / q);
      lo = std::log(std::min(a, b));
      hi = std::log(std::max(a, b));
    } else {
      // t·log(1+t) lies between t²/2 (t ≤ 1, loosely) and t²; bracket widely
      lo = std::log(std::min(std::sqrt(u), u / std::log1p(std::max(u, 1.0)))) - 1.0;
      hi = std::log(std::max(std::sqrt(2.0 * u), u)) + 1.0;
    }
    if (hi - lo < 1e-300) return std::exp(lo);
    auto g = [&](double lt) { return std::log(base(std::exp(lt))) - std::log(u); };
    std::uintmax_t iters = 300;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15; };
    auto r = boost::math::tools::bisect(g, lo, hi, tol, iters);
    return std::exp(0.5 * (r.first + r.second));
  }
};

/// Φ_0 with Φ_0^{-1} = (Φ^{-1})^{1−θ}, i.e. Φ_0(s) = Φ(s^{1/(1−θ)}).
inline OrliczFunction theta_transform(const OrliczFunction& phi, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta_transform: θ must lie in (0,1)");
  double s = 1.0 / (1.0 - theta);
  OrliczFunction out = phi;
  if (phi.family == OrliczFamily::power || phi.family == OrliczFamily::two_power) {
    out.p = phi.p * phi.scale * s;
    out.q = phi.q * phi.scale * s;
    out.scale = 1.0;
  } else {
    out.scale = phi.scale * s;
  }
  return out;
}

/// I_Φ(f) = Σ ℓ_i Φ(v_i).
inline double orlicz_modular(const OrliczFunction& phi, const StepFunction& f) {
  double s = 0.0;
  for (const auto& st : f.steps()) s += st.length * phi(st.value);
  return s;
}

/// τ[Φ(|x|)] = Σ over singular values of weight·Φ(value).
inline double orlicz_modular(const OrliczFunction& phi, const TracialAlgebra& A, const Operator& x) {
  double s = 0.0;
  for (auto [v, w] : weighted_singular_values(A, x)) s += w * phi(v);
  return s;
}

/// ‖χ_A‖_Φ = 1/Φ^{-1}(1/|A|).
inline double indicator_norm(const OrliczFunction& phi, double measure) {
  if (measure <= 0.0) return 0.0;
  return 1.0 / phi.inverse(1.0 / measure);
}

/// Luxemburg norm inf{c > 0 : I_Φ(f/c) ≤ 1}, by bisection in log c.
inline double luxemburg_norm(const OrliczFunction& phi, const StepFunction& f,
                             double rel_tol = defaults::orlicz_rel_tol, int max_iter = defaults::orlicz_max_iter) {
  if (f.empty()) return 0.0;
  double vmax = f.sup();
  double lo = std::log(vmax / phi.inverse(1.0 / f.steps().front().length));
  double hi = std::log(vmax / phi.inverse(1.0 / f.domain_total()));
  if (hi - lo <= rel_tol) return std::exp(0.5 * (lo + hi));
  auto g = [&](double lc) { return orlicz_modular(phi, f.scaled(std::exp(-lc))) - 1.0; };
  if (!(g(lo) >= 0.0 && g(hi) <= 0.0)) throw std::domain_error("luxemburg_norm: failed to bracket the root");
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  auto tol = [rel_tol](double a, double b) { return std::abs(b - a) <= rel_tol; };
  try {
    auto r = boost::math::tools::bisect(g, lo, hi, tol, iters);
    if (iters >= static_cast<std::uintmax_t>(max_iter) && std::abs(r.second - r.first) > rel_tol)
      throw std::domain_error("luxemburg_norm: bisection did not converge");
    return std::exp(0.5 * (r.first + r.second));
  } catch (const boost::math::evaluation_error&) {
    throw std::domain_error("luxemburg_norm: failed to bracket the root");
  }
}

// ---------------------------------------------------------------------------
// Space specifications

struct Lp {
  double p = 2.0;  // may be ∞
};
struct Lorentz {
  double p = 2.0, q = 2.0;
};
struct Orlicz {
  OrliczFunction phi;
};
struct OrliczLorentz {
  OrliczFunction phi;
  double r = 1.0;
};
struct GenLorentz {
  WeightFunction phi;
  double r = 1.0;
};

using SpaceSpec = std::variant<Lp, Lorentz, Orlicz, OrliczLorentz, GenLorentz>;

inline void validate(const SpaceSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Lp>) {
          if (!(s.p > 0.0)) throw std::invalid_argument("Lp: p must be positive");
        } else if constexpr (std::is_same_v<T, Lorentz>) {
          if (!(s.p > 0.0) || !(s.q > 0.0)) throw std::invalid_argument("Lorentz: p, q must be positive");
          if (std::isinf(s.p) && !std::isinf(s.q)) throw std::invalid_argument("Lorentz: p = ∞ needs q = ∞");
        } else if constexpr (std::is_same_v<T, OrliczLorentz>) {
          if (!(s.r > 0.0)) throw std::invalid_argument("OrliczLorentz: r must be positive");
        } else if constexpr (std::is_same_v<T, GenLorentz>) {
          if (!(s.r > 0.0)) throw std::invalid_argument("GenLorentz: r must be positive");
        }
      },
      spec);
}

inline std::string describe(const SpaceSpec& spec) {
  auto num = [](double v) { return short_num(v); };
  return std::visit(
      [&](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Lp>) return "L_" + num(s.p);
        else if constexpr (std::is_same_v<T, Lorentz>) return "L_{" + num(s.p) + "," + num(s.q) + "}";
        else if constexpr (std::is_same_v<T, Orlicz>) return "L_Phi[" + s.phi.name() + "]";
        else if constexpr (std::is_same_v<T, OrliczLorentz>) return "L_{Phi," + num(s.r) + "}[" + s.phi.name() + "]";
        else return "Lambda^" + num(s.r) + "(phi)";
      },
      spec);
}

namespace detail {

inline double norm_lp(double p, const StepFunction& f) {
  if (std::isinf(p)) return f.sup();
  return std::pow(integrate_power(f, p), 1.0 / p);
}

inline double norm_lorentz(double p, double q, const StepFunction& f) {
  if (std::isinf(p)) return f.sup();
  double prev = 0.0, acc = 0.0, best = 0.0;
  for (const auto& st : f.steps()) {
    double T = prev + st.length;
    if (std::isinf(q)) {
      best = std::max(best, st.value * std::pow(T, 1.0 / p));
    } else {
      acc += std::pow(st.value, q) * (std::pow(T, q / p) - std::pow(prev, q / p));
    }
    prev = T;
  }
  return std::isinf(q) ? best : std::pow(acc, 1.0 / q);
}

inline double norm_orlicz_lorentz(const OrliczFunction& phi, double r, const StepFunction& f) {
  const auto& st = f.steps();
  double T = 0.0, acc = 0.0, best = 0.0;
  for (std::size_t i = 0; i < st.size(); ++i) {
    T += st[i].length;
    double h = phi.inverse(1.0 / T);  // ‖χ_{f>s}‖_Φ = 1/h for s ∈ [v_{i+1}, v_i)
    if (std::isinf(r)) {
      best = std::max(best, st[i].value / h);
    } else {
      double next = i + 1 < st.size() ? st[i + 1].value : 0.0;
      acc += std::pow(h, -r) * (std::pow(st[i].value, r) - std::pow(next, r));
    }
  }
  return std::isinf(r) ? best : std::pow(acc, 1.0 / r);
}

inline double norm_gen_lorentz(const WeightFunction& phi, double r, const StepFunction& f) {
  double prev = 0.0, acc = 0.0, best = 0.0;
  for (const auto& st : f.steps()) {
    double T = prev + st.length;
    if (std::isinf(r)) best = std::max(best, st.value * phi.f.sup(prev, T));
    else acc += std::pow(st.value, r) * phi.f.integral(r, prev, T);
    prev = T;
  }
  return std::isinf(r) ? best : std::pow(acc, 1.0 / r);
}

}  // namespace detail

/// ‖f‖_spec in closed form (bisection for Orlicz).
inline double norm(const SpaceSpec& spec, const StepFunction& f) {
  validate(spec);
  if (f.empty()) return 0.0;
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Lp>) return detail::norm_lp(s.p, f);
        else if constexpr (std::is_same_v<T, Lorentz>) return detail::norm_lorentz(s.p, s.q, f);
        else if constexpr (std::is_same_v<T, Orlicz>) return luxemburg_norm(s.phi, f);
        else if constexpr (std::is_same_v<T, OrliczLorentz>) return detail::norm_orlicz_lorentz(s.phi, s.r, f);
        else return detail::norm_gen_lorentz(s.phi, s.r, f);
      },
      spec);
}

/// (f − s)_+ as a step function.
inline StepFunction positive_part_shift(const StepFunction& f, double s) {
  std::vector<Step> out;
  for (const auto& st : f.steps())
    if (st.value > s) out.push_back({st.value - s, st.length});
  return StepFunction(std::move(out));
}

/// Sufficient test for the formula defining ‖·‖_spec to be a norm (convex):
/// L_p with p ≥ 1, L_{p,q} with 1 ≤ q ≤ p, convex Orlicz, Λ^r(φ) with r ≥ 1
/// and φ^r(t)/t nonincreasing.
inline bool is_normed(const SpaceSpec& spec) {
  return std::visit(
      [](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Lp>) return s.p >= 1.0;
        else if constexpr (std::is_same_v<T, Lorentz>) return !std::isinf(s.q) && s.q >= 1.0 && s.q <= s.p;
        else if constexpr (std::is_same_v<T, Orlicz>) return s.phi.convexity() >= 1.0;
        else if constexpr (std::is_same_v<T, OrliczLorentz>) return false;
        else return !std::isinf(s.r) && s.r >= 1.0 && s.phi.a2 * s.r <= 1.0;
      },
      spec);
}

struct TruncationMin {
  double value = 0.0;  // K(f, t; E, L_∞)
  double level = 0.0;  // minimizing s
};

/// K(f, t; E, L_∞) = inf_{s ≥ 0} ‖(f − s)_+‖_E + t·s, minimized over the
/// step values and refined by Brent search between consecutive values.
/// Exact (to Brent tolerance) when the E-norm is convex, i.e. E is Banach.
inline TruncationMin truncation_min(const SpaceSpec& spec, const StepFunction& f, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("truncation_k: t must be positive");
  if (f.empty()) return {};
  auto cost = [&](double s) { return norm(spec, positive_part_shift(f, s)) + t * s; };
  std::vector<double> cand{0.0};
  for (const auto& st : f.steps()) cand.push_back(st.value);
  std::sort(cand.begin(), cand.end());
  TruncationMin best{inf, 0.0};
  for (double s : cand) {
    double v = cost(s);
    if (v < best.value) best = {v, s};
  }
  for (std::size_t i = 0; i + 1 < cand.size(); ++i) {
    std::uintmax_t it = 60;
    auto r = boost::math::tools::brent_find_minima(cost, cand[i], cand[i + 1], 40, it);
    if (r.second < best.value) best = {r.second, r.first};
  }
  return best;
}

inline double truncation_k(const SpaceSpec& spec, const StepFunction& f, double t) {
  return truncation_min(spec, f, t).value;
}

// ---------------------------------------------------------------------------
// Parameter spaces F_{ϱ,q}: ‖g‖ = (∫ (g/ϱ)^q dt/t)^{1/q}.

struct ParamSpace {
  PiecewisePower rho;
  double q = inf;

  static ParamSpace power(double theta, double q) {
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("ParamSpace: θ must lie in (0,1)");
    if (!(q > 0.0)) throw std::invalid_argument("ParamSpace: q must be positive");
    return {PiecewisePower::power(theta), q};
  }

  /// ‖g‖_{F_{ϱ,q}} for a piecewise power g on (0, ∞).
  double norm(const PiecewisePower& g) const {
    PiecewisePower h = PiecewisePower::combine(g, 1.0, rho, -1.0);
    if (std::isinf(q)) return h.sup();
    return std::pow(h.integral(q), 1.0 / q);
  }
};

/// ρ(t) = t‖χ_{(t,∞)}‖_F + ‖u·χ_{(0,t)}(u)‖_F for F = F_{ϱ,q}.
inline double rho_function(const ParamSpace& F, double t) {
  if (t < 0.0) throw std::invalid_argument("rho_function: negative t");
  if (t == 0.0) return 0.0;
  PiecewisePower inv = F.rho.transformed(0.0, -1.0);  // 1/ϱ
  PiecewisePower lin = F.rho.transformed(1.0, -1.0);  // u/ϱ
  double first, second;
  if (std::isinf(F.q)) {
    first = t * inv.sup(t, inf);
    second = lin.sup(0.0, t);
  } else {
    first = t * std::pow(inv.integral(F.q, t, inf), 1.0 / F.q);
    second = std::pow(lin.integral(F.q, 0.0, t), 1.0 / F.q);
  }
  if (!std::isfinite(first) || !std::isfinite(second)) throw std::domain_error("rho_function: divergent term");
  return first + second;
}

}  // namespace ncmart
