#pragma once
//
// Decreasing step functions on [0, τ(1)) and the generalized singular value
// function μ(x) of an operator.
//

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ncmart/algebra.hpp"
#include "ncmart/config.hpp"

namespace ncmart {

struct Step {
  double value = 0.0;
  double length = 0.0;
};

/// Decreasing right-continuous step function, zero beyond domain_total().
class StepFunction {
 public:
  StepFunction() = default;

  /// Takes steps already in canonical form (strictly decreasing values,
  /// positive lengths, positive values). Throws otherwise.
  explicit StepFunction(std::vector<Step> steps) : steps_(std::move(steps)) {
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      const Step& s = steps_[i];
      if (!(s.length > 0.0) || !std::isfinite(s.length))
        throw std::invalid_argument("StepFunction: lengths must be positive and finite");
      if (!(s.value >= 0.0) || !std::isfinite(s.value))
        throw std::invalid_argument("StepFunction: values must be finite and nonnegative");
      if (i > 0 && !(s.value < steps_[i - 1].value))
        throw std::invalid_argument("StepFunction: values must be strictly decreasing");
    }
    if (!steps_.empty() && steps_.back().value == 0.0) steps_.pop_back();
  }

  /// Canonicalizes arbitrary (value, length) pairs: sorts, drops zeros and
  /// merges values within merge_tol·max into a length-weighted average.
  static StepFunction from_pairs(std::vector<std::pair<double, double>> pairs,
                                 double rel_tol = defaults::merge_tol) {
    double vmax = 0.0;
    for (auto& [v, l] : pairs) {
      if (!std::isfinite(v) || !std::isfinite(l) || l < 0.0 || v < 0.0)
        throw std::invalid_argument("StepFunction: invalid (value, length) pair");
      vmax = std::max(vmax, v);
    }
    if (vmax == 0.0) return StepFunction();
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const double tol = rel_tol * vmax;
    std::vector<Step> out;
    double head = -1.0;  // first value of the current group
    double mass = 0.0, len = 0.0;
    auto flush = [&] {
      if (len > 0.0) {
        double v = mass / len;
        if (v > tol) out.push_back({v, len});
      }
      mass = len = 0.0;
    };
    for (auto [v, l] : pairs) {
      if (l == 0.0) continue;
      if (head < 0.0 || head - v > tol) {
        flush();
        head = v;
      }
      mass += v * l;
      len += l;
    }
    flush();
    // averaging can only tie neighbours when groups are within tol; enforce strictness
    std::vector<Step> strict;
    for (const auto& s : out) {
      if (!strict.empty() && !(s.value < strict.back().value)) {
        Step& b = strict.back();
        b.value = (b.value * b.length + s.value * s.length) / (b.length + s.length);
        b.length += s.length;
      } else {
        strict.push_back(s);
      }
    }
    StepFunction f;
    f.steps_ = std::move(strict);
    return f;
  }

  const std::vector<Step>& steps() const { return steps_; }
  bool empty() const { return steps_.empty(); }
  std::size_t size() const { return steps_.size(); }

  double domain_total() const {
    double s = 0.0;
    for (const auto& st : steps_) s += st.length;
    return s;
  }
  double sup() const { return steps_.empty() ? 0.0 : steps_.front().value; }

  /// μ_s: value on the step containing s (right-continuous), 0 past the support.
  double at(double s) const {
    if (s < 0.0) throw std::invalid_argument("StepFunction::at: negative argument");
    double acc = 0.0;
    for (const auto& st : steps_) {
      acc += st.length;
      if (s < acc) return st.value;
    }
    return 0.0;
  }

  /// Right endpoints T_i = Σ_{j≤i} ℓ_j.
  std::vector<double> breakpoints() const {
    std::vector<double> b;
    b.reserve(steps_.size());
    double acc = 0.0;
    for (const auto& st : steps_) b.push_back(acc += st.length);
    return b;
  }

  StepFunction scaled(double c) const {
    if (c < 0.0) throw std::invalid_argument("StepFunction::scaled: negative factor");
    if (c == 0.0) return StepFunction();
    StepFunction f = *this;
    for (auto& s : f.steps_) s.value *= c;
    return f;
  }

  /// s ↦ f(s)^p, still decreasing for p > 0.
  StepFunction pow(double p) const {
    if (!(p > 0.0)) throw std::invalid_argument("StepFunction::pow: p must be positive");
    StepFunction f = *this;
    for (auto& s : f.steps_) s.value = std::pow(s.value, p);
    return f;
  }

 private:
  std::vector<Step> steps_;
};

/// μ(x): eigenvalues of |x| with lengths given by their trace weights.
inline StepFunction mu(const Operator& x, const TracialAlgebra& A) {
  return StepFunction::from_pairs(weighted_singular_values(A, x));
}

/// Σ_i v_i^p·|step_i ∩ [0, upper]|.
inline double integrate_power(const StepFunction& f, double p,
                              double upper = std::numeric_limits<double>::infinity()) {
  if (!(p > 0.0)) throw std::invalid_argument("integrate_power: p must be positive");
  if (upper < 0.0) throw std::invalid_argument("integrate_power: negative upper limit");
  double acc = 0.0, start = 0.0;
  for (const auto& s : f.steps()) {
    if (start >= upper) break;
    double overlap = std::min(s.length, upper - start);
    acc += std::pow(s.value, p) * overlap;
    start += s.length;
  }
  return acc;
}

/// ∫_0^t f.
inline double partial_integral(const StepFunction& f, double t) { return integrate_power(f, 1.0, t); }

/// ∫_t^∞ f^p.
inline double tail_integral_power(const StepFunction& f, double p, double t) {
  if (!(p > 0.0)) throw std::invalid_argument("tail_integral_power: p must be positive");
  double acc = 0.0, start = 0.0;
  for (const auto& s : f.steps()) {
    double end = start + s.length;
    if (end > t) acc += std::pow(s.value, p) * (end - std::max(start, t));
    start = end;
  }
  return acc;
}

/// Distribution function d(s) = |{f > s}|.
inline double distribution(const StepFunction& f, double s) {
  double acc = 0.0;
  for (const auto& st : f.steps()) {
    if (st.value > s) acc += st.length;
    else break;
  }
  return acc;
}

/// Union of breakpoints of two step functions, sorted, unique.
inline std::vector<double> merged_breakpoints(const StepFunction& f, const StepFunction& g) {
  std::vector<double> b = f.breakpoints();
  auto gb = g.breakpoints();
  b.insert(b.end(), gb.begin(), gb.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

/// f ≺≺ g: ∫_0^t f ≤ ∫_0^t g at every breakpoint of either function.
inline bool submajorizes(const StepFunction& g, const StepFunction& f, double rel_tol = defaults::submaj_tol) {
  double scale = std::max({partial_integral(f, std::numeric_limits<double>::infinity()),
                           partial_integral(g, std::numeric_limits<double>::infinity()), 1e-300});
  for (double t : merged_breakpoints(f, g))
    if (partial_integral(f, t) > partial_integral(g, t) + rel_tol * scale) return false;
  return true;
}

/// Largest violation max_t (∫_0^t f − ∫_0^t g), ≤ 0 when f ≺≺ g.
inline double submajorization_gap(const StepFunction& g, const StepFunction& f) {
  double gap = -std::numeric_limits<double>::infinity();
  for (double t : merged_breakpoints(f, g)) gap = std::max(gap, partial_integral(f, t) - partial_integral(g, t));
  return std::isfinite(gap) ? gap : 0.0;
}

/// Pointwise sum f + g of two decreasing step functions.
inline StepFunction step_sum(const StepFunction& f, const StepFunction& g) {
  std::vector<std::pair<double, double>> pairs;
  double prev = 0.0;
  for (double b : merged_breakpoints(f, g)) {
    double mid = 0.5 * (prev + b);
    pairs.emplace_back(f.at(mid) + g.at(mid), b - prev);
    prev = b;
  }
  return StepFunction::from_pairs(std::move(pairs));
}

/// Rearrangement of the disjoint union (direct sum) of several functions.
inline StepFunction direct_sum(const std::vector<StepFunction>& fs) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& f : fs)
    for (const auto& s : f.steps()) pairs.emplace_back(s.value, s.length);
  return StepFunction::from_pairs(std::move(pairs));
}

}  // namespace ncmart
