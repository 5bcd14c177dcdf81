#include "support/common.hpp"
#include "support/scalar_oracle.hpp"

using namespace ncmart;
using namespace testing_support;

TEST(CuculescuGolden, StoppingIndicators) {
  for (const auto& c : golden("cuculescu.json")["instances"]) {
    Instance inst = io::instance_from_json(c["instance"]);
    Martingale m(inst.F, inst.x);
    double tol = c["tol"].get<double>();
    for (const auto& cs : c["cases"]) {
      CuculescuRun run = cuculescu(m.sc_partials(), cs["lambda_sq"].get<double>(), inst.F);
      ASSERT_EQ(run.q.size(), cs["q"].size());
      for (std::size_t k = 0; k < run.q.size(); ++k) {
        auto q = diag_of(run.q[k]);
        for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(q[i].real(), cs["q"][k][i].get<double>(), tol);
      }
      EXPECT_TRUE(run.cert.ok());
    }
  }
}

TEST(CuculescuProperty, CertificatesAcrossCorpus) {
  for (std::uint64_t seed = 0; seed < 24; ++seed)
    for (int dim : {4, 8, 16}) {
      Instance inst = make(seed, dim, 2 + static_cast<int>(seed % 5), seed % 2 ? Mode::dyadic : Mode::noncommutative);
      Martingale m(inst.F, inst.x);
      double top = max_eigenvalue(m.sc_partials().back());
      for (double frac : {0.05, 0.3, 0.7, 1.5}) {
        CuculescuRun run = cuculescu(m.sc_partials(), frac * top, inst.F);
        EXPECT_TRUE(run.cert.ok()) << "seed " << seed << " dim " << dim << " frac " << frac;
        // q_N w_N q_N ≤ λ² q_N
        EXPECT_LE(max_eigenvalue(hermitian_part(run.q_final * m.sc_partials().back() * run.q_final)),
                  frac * top * (1.0 + 1e-8));
      }
    }
}

TEST(CuculescuProperty, AdaptedPlacement) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Instance inst = make(seed, 8, 3, Mode::noncommutative);
    Rng rng(seed);
    SequenceBundle b(inst.F, random_adapted(inst.F, rng), true);
    auto w = partial_squares(inst.F, b.terms(), SquareKind::Sc_seq);
    CuculescuRun run = cuculescu(w, 0.5 * max_eigenvalue(w.back()), inst.F, Measurability::adapted);
    EXPECT_TRUE(run.cert.ok());
  }
}

TEST(CuculescuProperty, ScalarOracleIndicators) {
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    for (int dim : {4, 8, 16, 32}) {
      Instance inst = make(seed, dim, 2 + static_cast<int>(seed % 5), Mode::dyadic);
      oracle::Dyadic D(dim, inst.spec.levels);
      auto w = D.partial_sc(D.diffs(oracle::diagonal_of(inst)));
      Martingale m(inst.F, inst.x);
      double top = *std::max_element(w.back().begin(), w.back().end());
      for (double frac : {0.2, 0.5, 0.9}) {
        auto q = D.stopping(w, frac * top);
        CuculescuRun run = cuculescu(m.sc_partials(), frac * top, inst.F, Measurability::predictable, false);
        for (std::size_t k = 0; k < q.size(); ++k) {
          auto lib = diag_of(run.q[k]);
          for (int i = 0; i < dim; ++i) EXPECT_NEAR(lib[i].real(), q[k][i], 1e-12);
        }
      }
    }
}

TEST(Cuculescu, Extremes) {
  Instance inst = make(3, 8, 3, Mode::noncommutative);
  Martingale m(inst.F, inst.x);
  double top = max_eigenvalue(m.sc_partials().back());
  CuculescuRun all = cuculescu(m.sc_partials(), 2.0 * top, inst.F);
  for (const auto& q : all.q) EXPECT_LE(max_abs(q - Operator::identity(inst.algebra())), 1e-12);
  EXPECT_THROW(cuculescu(m.sc_partials(), -1.0, inst.F), std::invalid_argument);
  std::vector<Operator> bad = m.sc_partials();
  bad[0] = -1.0 * bad.back();
  EXPECT_THROW(cuculescu(bad, 1.0, inst.F), std::invalid_argument);
}
