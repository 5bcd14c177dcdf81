#include "support/common.hpp"

using namespace ncmart;
using namespace testing_support;

namespace {

StepFunction random_step(Rng& rng, int n) {
  std::vector<std::pair<double, double>> pairs;
  for (int i = 0; i < n; ++i) pairs.emplace_back(rng.uniform(0.01, 5.0), rng.uniform(0.01, 2.0));
  return StepFunction::from_pairs(pairs);
}

}  // namespace

TEST(SymspacesGolden, LorentzWeakType) {
  auto g = golden("symspaces.json")["lorentz_q_inf"];
  for (const auto& c : g["cases"]) {
    double v = norm(Lorentz{c["p"].get<double>(), inf}, steps_of(c["steps"]));
    EXPECT_NEAR(v, c["expected"].get<double>(), g["rel_tol"].get<double>() * v);
  }
}

TEST(SymspacesGolden, OrliczModular) {
  auto g = golden("symspaces.json")["orlicz_modular"];
  TracialAlgebra A = io::algebra_from_json(g["blocks"]);
  Operator x({matrix_of(g["x"][0]), matrix_of(g["x"][1])});
  for (const auto& c : g["cases"]) {
    double v = orlicz_modular(io::orlicz_from_json(c["phi"]), A, x);
    EXPECT_NEAR(v, c["expected"].get<double>(), g["rel_tol"].get<double>() * v);
  }
}

TEST(SymspacesGolden, ThetaTransformInverse) {
  auto g = golden("symspaces.json")["theta_transform_inverse"];
  OrliczFunction phi0 = theta_transform(io::orlicz_from_json(g["phi"]), g["theta"].get<double>());
  for (const auto& c : g["cases"]) {
    double e = c["expected"].get<double>();
    EXPECT_NEAR(phi0.inverse(c["u"].get<double>()), e, g["rel_tol"].get<double>() * e);
  }
}

TEST(SymspacesGolden, TruncationL2Bracket) {
  auto g = golden("symspaces.json")["truncation_l2"];
  for (const auto& c : g["cases"]) {
    double k = truncation_k(Lp{2.0}, steps_of(c["steps"]), c["t"].get<double>());
    double r = c["kref"].get<double>();
    EXPECT_GE(k, r * (1.0 - 1e-9));
    EXPECT_LE(k, 2.0 * r * (1.0 + 1e-9));
  }
}

TEST(SymspacesGolden, ParamSpacePowerNorm) {
  auto g = golden("symspaces.json")["param_space_power"];
  for (const auto& c : g["cases"]) {
    double a = c["a"].get<double>(), b = c["b"].get<double>();
    PiecewisePower h({{0.0, 1.0, 1.0, a}, {1.0, inf, 1.0, b}});
    double v = ParamSpace::power(c["theta"].get<double>(), c["q"].get<double>()).norm(h);
    EXPECT_NEAR(v, c["expected"].get<double>(), g["rel_tol"].get<double>() * v);
  }
}

TEST(Symspaces, ClosedForms) {
  StepFunction chi({{1.0, 2.0}});
  EXPECT_NEAR(norm(Lp{2.0}, chi), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(norm(Lorentz{2.0, 1.0}, chi), std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(norm(Orlicz{OrliczFunction::power(3.0)}, chi), std::cbrt(2.0), 1e-9);
  EXPECT_NEAR(indicator_norm(OrliczFunction::power(3.0), 2.0), std::cbrt(2.0), 1e-12);
  // (L_Φ, r) at Φ = t^p is the Lorentz space L_{p,r}
  EXPECT_NEAR(norm(OrliczLorentz{OrliczFunction::power(2.0), 1.0}, chi), norm(Lorentz{2.0, 1.0}, chi), 1e-12);
  // Λ^r(t^{1/p}) is L_{p,r}
  StepFunction f({{3.0, 0.5}, {1.0, 1.5}});
  EXPECT_NEAR(norm(GenLorentz{WeightFunction::power(0.5), 2.0}, f), norm(Lorentz{2.0, 2.0}, f), 1e-12);
  EXPECT_THROW(validate(Lorentz{inf, 2.0}), std::invalid_argument);
  EXPECT_THROW(OrliczFunction::two_power(2.0, 1.0), std::invalid_argument);
}

TEST(SymspacesProperty, TruncationL1IsExact) {
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    StepFunction f = random_step(rng, 1 + rng.below(8));
    double t = std::exp(rng.uniform(-3.0, 3.0));
    double k = truncation_k(Lp{1.0}, f, t);
    EXPECT_NEAR(k, partial_integral(f, t), 1e-10 * std::max(1.0, k));
  }
}

TEST(SymspacesProperty, NormAxioms) {
  Rng rng(7);
  std::vector<SpaceSpec> specs{Lp{1.0},
                               Lp{2.5},
                               Lorentz{3.0, 2.0},
                               Orlicz{OrliczFunction::two_power(1.0, 2.0)},
                               Orlicz{OrliczFunction::x_log()},
                               GenLorentz{WeightFunction::power(0.4), 2.0}};
  for (int i = 0; i < 40; ++i) {
    StepFunction f = random_step(rng, 5), g = random_step(rng, 4);
    double c = rng.uniform(0.1, 10.0);
    for (const auto& s : specs) {
      double nf = norm(s, f);
      EXPECT_NEAR(norm(s, f.scaled(c)), c * nf, 1e-8 * c * nf) << describe(s);
      EXPECT_LE(norm(s, step_sum(f, g)), (nf + norm(s, g)) * (1.0 + 1e-8)) << describe(s);
    }
  }
}

TEST(SymspacesProperty, OrliczInverse) {
  for (auto phi : {OrliczFunction::power(1.5), OrliczFunction::two_power(1.0, 3.0), OrliczFunction::x_log(),
                   theta_transform(OrliczFunction::x_log(), 0.3)})
    for (double u : {1e-6, 1e-2, 0.5, 1.0, 7.0, 1e4}) EXPECT_NEAR(phi(phi.inverse(u)), u, 1e-9 * u) << phi.name();
}

TEST(Symspaces, RhoFunctionPower) {
  // ϱ = t^θ, q = ∞: ρ(t) = t·t^{−θ} + t^{1−θ} = 2t^{1−θ}
  ParamSpace F = ParamSpace::power(0.3, inf);
  for (double t : {0.01, 1.0, 5.0}) EXPECT_NEAR(rho_function(F, t), 2.0 * std::pow(t, 0.7), 1e-12);
}
