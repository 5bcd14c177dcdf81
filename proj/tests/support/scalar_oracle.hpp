#pragma once
// Scalar reference pipeline for dyadic instances: plain arrays, no matrices.
// Atom sizes are rederived from (dim, levels); only the random streams are
// shared with the library so that both sides see the same data.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

#include "ncmart/random.hpp"

namespace oracle {

using cd = std::complex<double>;
using Vec = std::vector<double>;
using CVec = std::vector<cd>;

struct Dyadic {
  int D = 0, N = 0;
  std::vector<int> atom;  // atom size at level n (index n−1)

  Dyadic(int dim, int levels) : D(dim), N(levels) {
    int k = 0;
    while ((1 << k) < dim) ++k;
    for (int n = 1; n <= levels; ++n) {
      double frac = levels == 1 ? 0.0 : double(levels - n) / double(levels - 1);
      atom.push_back(1 << static_cast<int>(std::lround(k * frac)));
    }
  }

  /// E_n with E_0 = E_1.
  template <class T>
  std::vector<T> E(const std::vector<T>& f, int n) const {
    int s = atom[static_cast<std::size_t>(std::max(n, 1) - 1)];
    std::vector<T> out(f.size());
    for (int a = 0; a < D; a += s) {
      T m{};
      for (int i = a; i < a + s; ++i) m += f[static_cast<std::size_t>(i)];
      m /= double(s);
      for (int i = a; i < a + s; ++i) out[static_cast<std::size_t>(i)] = m;
    }
    return out;
  }

  std::vector<CVec> diffs(const CVec& x) const {
    std::vector<CVec> d;
    CVec prev(static_cast<std::size_t>(D), 0.0);
    for (int n = 1; n <= N; ++n) {
      CVec cur = E(x, n), dn(cur.size());
      for (int i = 0; i < D; ++i) dn[i] = cur[i] - prev[i];
      d.push_back(dn);
      prev = cur;
    }
    return d;
  }

  /// w_k = Σ_{j≤k} E_{j−1}|d_j|².
  std::vector<Vec> partial_sc(const std::vector<CVec>& d) const {
    std::vector<Vec> w;
    Vec acc(static_cast<std::size_t>(D), 0.0);
    for (int k = 1; k <= N; ++k) {
      Vec sq(static_cast<std::size_t>(D));
      for (int i = 0; i < D; ++i) sq[i] = std::norm(d[k - 1][i]);
      Vec e = E(sq, k - 1);
      for (int i = 0; i < D; ++i) acc[i] += e[i];
      w.push_back(acc);
    }
    return w;
  }

  /// (∫_0^{t²} μ²(√w))^{1/2} with unit point masses.
  double kref(const Vec& w, double t) const {
    Vec v = w;
    std::sort(v.begin(), v.end(), std::greater<>());
    double cut = t * t, acc = 0.0;
    for (int i = 0; i < D && cut > 0.0; ++i) {
      acc += v[i] * std::min(1.0, cut);
      cut -= 1.0;
    }
    return std::sqrt(acc);
  }

  /// Indicators q_0..q_N of the stopping recursion.
  std::vector<Vec> stopping(const std::vector<Vec>& w, double lam2) const {
    double wmax = *std::max_element(w.back().begin(), w.back().end());
    double tol = 1e-9 * std::max({wmax, lam2, 1e-300});
    std::vector<Vec> q{Vec(static_cast<std::size_t>(D), 1.0)};
    for (const auto& wk : w) {
      Vec next = q.back();
      for (int i = 0; i < D; ++i)
        if (wk[i] > lam2 + tol) next[i] = 0.0;
      q.push_back(next);
    }
    return q;
  }

  struct Split {
    CVec y, z;
    double norm_y = 0, norm_z = 0;
  };

  Split jones(const std::vector<CVec>& d, double lam) const {
    auto w = partial_sc(d);
    auto q = stopping(w, lam * lam);
    std::vector<CVec> da(d);
    for (int k = 0; k < N; ++k)
      for (int i = 0; i < D; ++i) da[k][i] *= q[k + 1][i];
    auto pi = stopping(partial_sc(da), lam * lam);
    std::vector<CVec> dz(da), dy(d);
    Split s{CVec(D, 0.0), CVec(D, 0.0)};
    for (int k = 0; k < N; ++k)
      for (int i = 0; i < D; ++i) {
        dz[k][i] = da[k][i] * pi[k][i];
        dy[k][i] = d[k][i] - dz[k][i];
        s.z[i] += dz[k][i];
        s.y[i] += dy[k][i];
      }
    Vec wy = partial_sc(dy).back(), wz = partial_sc(dz).back();
    s.norm_y = std::sqrt(std::accumulate(wy.begin(), wy.end(), 0.0));
    s.norm_z = std::sqrt(*std::max_element(wz.begin(), wz.end()));
    return s;
  }

  /// max_t upper/lower over the log grid around ‖·‖_2/‖·‖_∞ of s_c.
  double k_closedness_ratio(const CVec& x, int grid_points, double span, int lambda_points, double eps) const {
    auto d = diffs(x);
    Vec wN = partial_sc(d).back();
    double a0 = std::sqrt(std::accumulate(wN.begin(), wN.end(), 0.0));
    double a1 = std::sqrt(*std::max_element(wN.begin(), wN.end()));
    if (a0 == 0.0) return 1.0;
    double lo = a0 / a1 / span, hi = a0 / a1 * span, worst = 0.0;
    const int c = (lambda_points - 1) / 2;
    for (int g = 0; g < grid_points; ++g) {
      double t = lo * std::pow(hi / lo, double(g) / (grid_points - 1));
      double lower = kref(wN, t), upper = std::min(a0, t * a1);
      double lam0 = (2.0 + eps) / t * lower;
      std::vector<double> lams;
      for (int j = 0; j < lambda_points; ++j) lams.push_back(lam0 * std::pow(2.0, 0.5 * (j - c)));
      if (lambda_points % 2 == 0) lams.push_back(lam0);
      for (double lam : lams) {
        Split s = jones(d, lam);
        upper = std::min(upper, s.norm_y + t * s.norm_z);
      }
      worst = std::max(worst, upper / lower);
    }
    return worst;
  }
};

inline double l1(const Vec& f) {
  double s = 0.0;
  for (double v : f) s += std::abs(v);
  return s;
}
inline double l2(const Vec& f) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return std::sqrt(s);
}

/// Terminal x of a dyadic instance as a vector of diagonal entries.
inline CVec diagonal_of(const ncmart::Instance& inst) {
  CVec x;
  for (const auto& b : inst.x.blocks()) x.push_back(b(0, 0));
  return x;
}

/// Appendix ratios computed with the scalar pipeline on the instance streams.
struct Appendix {
  double dual_doob_l2 = 0, lepingle_yor_l1 = 0, hardy_sc_l1 = 0, hardy_x_l1 = 0, davis_b_l1 = 0;
};

inline Appendix appendix(const ncmart::Instance& inst) {
  Dyadic F(inst.spec.dim, inst.spec.levels);
  const int D = F.D, N = F.N;
  Appendix out;
  {
    ncmart::Rng rng = ncmart::derived_rng(inst, ncmart::stream::positive);
    Vec raw(D, 0.0), cond(D, 0.0);
    for (int n = 1; n <= N; ++n) {
      Vec a(D);
      for (int i = 0; i < D; ++i) {
        (void)rng.below(1);
        a[i] = std::norm(rng.cnormal());
      }
      Vec e = F.E(a, n);
      for (int i = 0; i < D; ++i) raw[i] += a[i], cond[i] += e[i];
    }
    out.dual_doob_l2 = l2(cond) / l2(raw);
  }
  {
    ncmart::Rng rng = ncmart::derived_rng(inst, ncmart::stream::adapted);
    Vec top(D, 0.0), bot(D, 0.0);
    for (int n = 1; n <= N; ++n) {
      CVec g(D);
      for (int i = 0; i < D; ++i) g[i] = rng.cnormal();
      CVec xi = F.E(g, n), prev = F.E(xi, n - 1);
      for (int i = 0; i < D; ++i) top[i] += std::norm(prev[i]), bot[i] += std::norm(xi[i]);
    }
    for (int i = 0; i < D; ++i) top[i] = std::sqrt(top[i]), bot[i] = std::sqrt(bot[i]);
    out.lepingle_yor_l1 = l1(top) / l1(bot);
  }
  CVec x = diagonal_of(inst);
  auto d = F.diffs(x);
  Vec wN = F.partial_sc(d).back(), Sc(D, 0.0), sc(D), ax(D);
  double hd = 0.0;
  for (const auto& dk : d)
    for (int i = 0; i < D; ++i) Sc[i] += std::norm(dk[i]), hd += std::abs(dk[i]);
  for (int i = 0; i < D; ++i) Sc[i] = std::sqrt(Sc[i]), sc[i] = std::sqrt(wN[i]), ax[i] = std::abs(x[i]);
  out.hardy_sc_l1 = l1(Sc) / l1(sc);
  out.hardy_x_l1 = l1(ax) / l1(sc);
  out.davis_b_l1 = l1(Sc) / hd;
  return out;
}

}  // namespace oracle
