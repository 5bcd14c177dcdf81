#pragma once
//
// Seeded instance generation. Everything is derived from std::mt19937_64
// raw output with explicit mappings, so instances are bit-identical across
// standard libraries.
//

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncmart/algebra.hpp"

namespace ncmart {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() { return eng_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  /// Uniform integer in [0, n).
  int below(int n) {
    if (n <= 0) throw std::invalid_argument("Rng::below: n must be positive");
    return static_cast<int>(uniform() * n);
  }
  /// Standard normal by Box-Muller (one value per call, pair cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do u1 = uniform();
    while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }
  /// Complex Gaussian with E|z|² = 1.
  cplx cnormal() {
    double re = normal(), im = normal();
    return {re / std::sqrt(2.0), im / std::sqrt(2.0)};
  }
  /// Independent child stream.
  Rng split() { return Rng(eng_() ^ 0x9E3779B97F4A7C15ULL); }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class Mode { noncommutative, dyadic };

inline const char* to_string(Mode m) { return m == Mode::dyadic ? "dyadic" : "noncommutative"; }

inline Mode parse_mode(const std::string& s) {
  if (s == "dyadic" || s == "commutative-dyadic" || s == "commutative") return Mode::dyadic;
  if (s == "noncommutative" || s == "nc") return Mode::noncommutative;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

struct InstanceSpec {
  int dim = 8;
  int levels = 3;
  Mode mode = Mode::noncommutative;
  std::uint64_t seed = 0;
};

struct Instance {
  InstanceSpec spec;
  Filtration F;
  Operator x;

  const TracialAlgebra& algebra() const { return F.algebra(); }
};

/// Complex Gaussian operator with entries of variance 1/dim per block.
inline Operator random_operator(const TracialAlgebra& A, Rng& rng) {
  Operator x = Operator::zero(A);
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    Matrix& m = x.block(b);
    double s = 1.0 / std::sqrt(static_cast<double>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = s * rng.cnormal();
  }
  return x;
}

inline Operator random_hermitian(const TracialAlgebra& A, Rng& rng) { return hermitian_part(random_operator(A, rng)); }

/// g* g with g of random rank (1..dim per block) unless full_rank is set.
inline Operator random_positive(const TracialAlgebra& A, Rng& rng, bool full_rank = false) {
  Operator p = Operator::zero(A);
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    int d = A.block_dim(b);
    int r = full_rank ? d : 1 + rng.below(d);
    Matrix g(r, d);
    double s = 1.0 / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < d; ++j) g(i, j) = s * rng.cnormal();
    p.block(b) = g.adjoint() * g;
  }
  return p;
}

namespace detail {

/// Random split of `total` into `parts` positive integers.
inline std::vector<int> random_composition(int total, int parts, Rng& rng) {
  parts = std::clamp(parts, 1, total);
  std::vector<int> cuts;
  std::vector<int> pool(static_cast<std::size_t>(total - 1));
  std::iota(pool.begin(), pool.end(), 1);
  for (int i = 0; i < parts - 1; ++i) {
    int j = i + rng.below(static_cast<int>(pool.size()) - i);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    cuts.push_back(pool[static_cast<std::size_t>(i)]);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> out;
  int prev = 0;
  for (int c : cuts) out.push_back(c - prev), prev = c;
  out.push_back(total - prev);
  return out;
}

inline std::vector<int> prime_factors(int n) {
  std::vector<int> f;
  for (int p = 2; p * p <= n; ++p)
    while (n % p == 0) f.push_back(p), n /= p;
  if (n > 1) f.push_back(n);
  return f;
}

/// Splits each atom of `coarse` into up to two contiguous pieces.
inline std::vector<std::vector<int>> refine(const std::vector<std::vector<int>>& coarse, Rng& rng) {
  std::vector<std::vector<int>> fine;
  for (const auto& atom : coarse) {
    if (atom.size() >= 2 && rng.uniform() < 0.7) {
      int cut = 1 + rng.below(static_cast<int>(atom.size()) - 1);
      fine.emplace_back(atom.begin(), atom.begin() + cut);
      fine.emplace_back(atom.begin() + cut, atom.end());
    } else {
      fine.push_back(atom);
    }
  }
  return fine;
}

inline Filtration random_pinching(int dim, int levels, Rng& rng) {
  int nblocks = 1 + rng.below(std::min(3, dim));
  auto dims = random_composition(dim, nblocks, rng);
  std::vector<Block> blocks;
  for (int d : dims) blocks.push_back({d, rng.uniform(0.5, 2.0)});
  TracialAlgebra A(blocks);
  std::vector<std::vector<std::vector<int>>> parts(static_cast<std::size_t>(levels));
  auto& top = parts.back();
  for (std::size_t b = 0; b < A.num_blocks(); ++b) {
    std::vector<int> atom(static_cast<std::size_t>(A.block_dim(b)));
    std::iota(atom.begin(), atom.end(), A.offset(b));
    top.push_back(atom);
  }
  for (int n = levels - 2; n >= 0; --n)
    parts[static_cast<std::size_t>(n)] = refine(parts[static_cast<std::size_t>(n + 1)], rng);
  return Filtration::pinching(std::move(A), std::move(parts));
}

inline Filtration random_tensor(int dim, int levels, Rng& rng) {
  std::vector<int> dims(static_cast<std::size_t>(levels), 1);
  for (int p : prime_factors(dim)) dims[static_cast<std::size_t>(rng.below(levels))] *= p;
  return Filtration::tensor(TracialAlgebra::full_matrix(dim, rng.uniform(0.5, 2.0)), dims);
}

/// dim one-dimensional blocks, unit weights; level n averages over blocks of
/// 2^{k_n} consecutive indices, k_n falling from log2(dim) at n = 1 to 0 at N.
inline Filtration dyadic(int dim, int levels) {
  int k = 0;
  while ((1 << k) < dim) ++k;
  if ((1 << k) != dim) throw std::invalid_argument("dyadic mode needs a power-of-two dimension");
  std::vector<std::vector<std::vector<int>>> parts;
  for (int n = 1; n <= levels; ++n) {
    int kn = static_cast<int>(std::lround(double(k) * (levels - n) / std::max(1, levels - 1)));
    int size = 1 << kn;
    std::vector<std::vector<int>> level;
    for (int s = 0; s < dim; s += size) {
      std::vector<int> atom(static_cast<std::size_t>(size));
      std::iota(atom.begin(), atom.end(), s);
      level.push_back(atom);
    }
    parts.push_back(level);
  }
  return Filtration::averaging(TracialAlgebra::diagonal(std::vector<double>(static_cast<std::size_t>(dim), 1.0)),
                               std::move(parts));
}

}  // namespace detail

inline Filtration random_filtration(const InstanceSpec& s, Rng& rng) {
  if (s.dim < 1 || s.dim > 4096) throw std::invalid_argument("instance: dim out of range");
  if (s.levels < 1) throw std::invalid_argument("instance: levels must be positive");
  if (s.mode == Mode::dyadic) return detail::dyadic(s.dim, s.levels);
  return rng.uniform() < 0.5 ? detail::random_pinching(s.dim, s.levels, rng)
                             : detail::random_tensor(s.dim, s.levels, rng);
}

/// Same seed, same instance, byte for byte.
inline Instance generate(const InstanceSpec& s) {
  Rng rng(s.seed);
  Filtration F = random_filtration(s, rng);
  Operator x = random_operator(F.algebra(), rng);
  return {s, std::move(F), std::move(x)};
}

/// Adapted sequence a_n = E_n(g_n).
inline std::vector<Operator> random_adapted(const Filtration& F, Rng& rng) {
  std::vector<Operator> a;
  for (int n = 1; n <= F.levels(); ++n) a.push_back(F.expect(random_operator(F.algebra(), rng), n));
  return a;
}

/// Unconstrained sequence (g_n).
inline std::vector<Operator> random_sequence(const Filtration& F, Rng& rng) {
  std::vector<Operator> a;
  for (int n = 1; n <= F.levels(); ++n) a.push_back(random_operator(F.algebra(), rng));
  return a;
}

inline std::vector<Operator> random_positive_sequence(const Filtration& F, Rng& rng) {
  std::vector<Operator> a;
  for (int n = 1; n <= F.levels(); ++n) a.push_back(random_positive(F.algebra(), rng));
  return a;
}

}  // namespace ncmart
