#include "support/common.hpp"
#include "support/scalar_oracle.hpp"

using namespace ncmart;
using namespace testing_support;

TEST(JonesGolden, DecompositionOfDyadicInstances) {
  for (const auto& c : golden("jones.json")["instances"]) {
    Instance inst = io::instance_from_json(c["instance"]);
    HardyInput in = HardyInput::of(Martingale(inst.F, inst.x));
    double tol = c["tol"].get<double>();
    for (const auto& cs : c["cases"]) {
      double t = cs["t"].get<double>(), eps = cs["epsilon"].get<double>();
      EXPECT_NEAR(k_ref(in, t), cs["kref"].get<double>(), tol);
      EXPECT_NEAR(lambda_for(in, t, eps), cs["lambda"].get<double>(), tol);
      JonesDecomposition J = jones_at(in, t, cs["lambda"].get<double>(), 2.0, true, eps);
      auto y = diag_of(J.y), z = diag_of(J.z);
      auto gy = cvec_of(cs["y"]), gz = cvec_of(cs["z"]);
      for (std::size_t i = 0; i < y.size(); ++i) {
        EXPECT_NEAR(std::abs(y[i] - gy[i]), 0.0, tol);
        EXPECT_NEAR(std::abs(z[i] - gz[i]), 0.0, tol);
      }
      EXPECT_NEAR(J.norm_y, cs["norm_y"].get<double>(), tol);
      EXPECT_NEAR(J.norm_z, cs["norm_z"].get<double>(), tol);
      EXPECT_TRUE(J.cert.all());
    }
  }
}

TEST(JonesGolden, FunctionCoupleL1L2) {
  auto g = golden("jones.json")["function_couple_l1_l2"];
  for (const auto& c : g["cases"]) {
    StepFunction f = steps_of(c["steps"]);
    double t = c["t"].get<double>(), best = c["split_inf"].get<double>();
    KCurve k = k_curve(f, FunctionCouple::lp_lq(1.0, 2.0), {t});
    EXPECT_LE(k.lower[0], best * (1.0 + 1e-12));
    EXPECT_LE(k.upper[0], best * (1.0 + 1e-3));
    EXPECT_GE(k.upper[0] * (1.0 + 1e-3), best * (1.0 - 1e-3) / holmstedt_constant(1.0, 2.0));
  }
}

TEST(JonesGolden, IndicatorInterpolation) {
  // (L_1, L_∞)_{θ,γ} on χ_[0,m]: the K-method norm is (θ(1−θ)γ)^{−1/γ} times the Lorentz norm
  auto g = golden("jones.json")["indicator_interpolation"];
  double tol = g["rel_tol"].get<double>();
  for (const auto& c : g["cases"]) {
    double m = c["measure"].get<double>(), theta = c["theta"].get<double>();
    double gamma = c["gamma"].is_string() ? inf : c["gamma"].get<double>();
    StepFunction chi({{1.0, m}});
    KCurve k = k_curve(chi, FunctionCouple::e_linf(Lp{1.0}), log_grid(m * 1e-4, m * 1e4, 2049));
    Interval I = real_interp_norm(k, theta, gamma);
    double want = c["k_method"].get<double>();
    EXPECT_LE(I.lo, want * (1.0 + 1e-12));
    EXPECT_GE(I.hi, want * (1.0 - 1e-12));
    EXPECT_LE(I.hi / I.lo - 1.0, tol);
    double r = 1.0 / (1.0 - theta);
    double lor = norm(Lorentz{r, gamma}, chi);
    EXPECT_NEAR(lor, c["lorentz_stieltjes"].get<double>(), 1e-12 * lor);
    double factor = std::isinf(gamma) ? 1.0 : std::pow(theta * (1.0 - theta) * gamma, -1.0 / gamma);
    EXPECT_NEAR(want, factor * lor, 1e-12 * want);
  }
}

TEST(JonesProperty, CertificatesOnCorpus) {
  for (std::uint64_t seed = 0; seed < 16; ++seed)
    for (int dim : {4, 8}) {
      Instance inst = make(seed, dim, 2 + static_cast<int>(seed % 5), seed % 2 ? Mode::dyadic : Mode::noncommutative);
      for (auto v : {HardyVariant::martingale, HardyVariant::conditioned, HardyVariant::adapted}) {
        HardyInput in = hardy_input(inst, v, CheckOptions{});
        for (double t : default_grid(sequence_norm(in, 2.0), sequence_norm(in, inf), 5, 1e2)) {
          JonesDecomposition J = jones_decompose(in, t);
          EXPECT_TRUE(J.cert.all()) << "seed " << seed << " dim " << dim << " variant " << to_string(v) << " t " << t;
          EXPECT_LE(max_abs(J.y + J.z - in.sum()), 1e-10);
          EXPECT_LE(J.cost, defaults::jones_constant() * J.kref * (1.0 + 1e-8));
        }
      }
    }
}

TEST(JonesProperty, ScalarOracleDecomposition) {
  for (std::uint64_t seed = 0; seed < 12; ++seed)
    for (int dim : {4, 16, 32}) {
      Instance inst = make(seed, dim, 2 + static_cast<int>(seed % 5), Mode::dyadic);
      oracle::Dyadic D(dim, inst.spec.levels);
      auto d = D.diffs(oracle::diagonal_of(inst));
      HardyInput in = HardyInput::of(Martingale(inst.F, inst.x));
      for (double t : {0.3, 1.0, 4.0}) {
        double lam = lambda_for(in, t);
        EXPECT_NEAR(k_ref(in, t), D.kref(D.partial_sc(d).back(), t), 1e-12);
        auto s = D.jones(d, lam);
        JonesDecomposition J = jones_at(in, t, lam);
        EXPECT_NEAR(J.norm_y, s.norm_y, 1e-9);
        EXPECT_NEAR(J.norm_z, s.norm_z, 1e-9);
        auto z = diag_of(J.z);
        for (int i = 0; i < dim; ++i) EXPECT_NEAR(std::abs(z[i] - s.z[i]), 0.0, 1e-9);
      }
    }
}

TEST(JonesProperty, KCurveBracketsAndShape) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Instance inst = make(seed, 8, 3, seed % 2 ? Mode::dyadic : Mode::noncommutative);
    Martingale m(inst.F, inst.x);
    KCurve c = k_curve(m, 2.0, {}, KCurveOptions{5});
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_LE(c.lower[i], c.upper[i] * (1.0 + 1e-12));
      EXPECT_LE(c.upper[i], defaults::jones_constant() * c.lower[i] * (1.0 + 1e-8));
      if (i > 0) {
        EXPECT_GE(c.upper[i], c.upper[i - 1] * (1.0 - 1e-12)) << "K nondecreasing";
        EXPECT_LE(c.upper[i] / c.t[i], c.upper[i - 1] / c.t[i - 1] * (1.0 + 1e-12)) << "K/t nonincreasing";
      }
    }
  }
}

TEST(Jones, InvalidArguments) {
  Instance inst = make(1, 4, 2, Mode::dyadic);
  HardyInput in = HardyInput::of(Martingale(inst.F, inst.x));
  EXPECT_THROW(lambda_for(in, 0.0), std::invalid_argument);
  EXPECT_THROW(lambda_for(in, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(k_ref(in, -1.0), std::invalid_argument);
}
