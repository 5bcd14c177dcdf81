#include "support/common.hpp"

using namespace ncmart;
using namespace testing_support;

TEST(RearrangementGolden, Nilpotent) {
  auto g = golden("rearrangement.json")["nilpotent"];
  TracialAlgebra A = TracialAlgebra::full_matrix(2);
  StepFunction f = mu(Operator({matrix_of(g["x"])}), A);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_NEAR(f.steps()[0].value, 1.0, 1e-14);
  EXPECT_NEAR(f.steps()[0].length, 1.0, 1e-14);
}

TEST(RearrangementGolden, IntegratePower) {
  auto g = golden("rearrangement.json")["integrate_power"];
  double tol = g["rel_tol"].get<double>();
  for (const auto& c : g["cases"]) {
    StepFunction f = steps_of(c["steps"]);
    double upper = c["upper"].is_string() ? inf : c["upper"].get<double>();
    double v = integrate_power(f, c["p"].get<double>(), upper);
    EXPECT_NEAR(v, c["expected"].get<double>(), tol * c["expected"].get<double>());
  }
}

TEST(Rearrangement, CanonicalForm) {
  StepFunction f = StepFunction::from_pairs({{1.0, 0.5}, {3.0, 1.0}, {1.0, 0.25}, {0.0, 4.0}});
  ASSERT_EQ(f.size(), 2u);
  EXPECT_DOUBLE_EQ(f.steps()[0].value, 3.0);
  EXPECT_DOUBLE_EQ(f.steps()[1].length, 0.75);
  EXPECT_DOUBLE_EQ(f.domain_total(), 1.75);
  EXPECT_DOUBLE_EQ(f.at(0.999), 3.0);
  EXPECT_DOUBLE_EQ(f.at(1.0), 1.0);
  EXPECT_DOUBLE_EQ(f.at(2.0), 0.0);
  EXPECT_THROW(StepFunction({{1.0, 1.0}, {2.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(StepFunction({{1.0, 0.0}}), std::invalid_argument);
}

TEST(Rearrangement, WeightsAndDirectSums) {
  TracialAlgebra A({{1, 0.25}, {2, 3.0}});
  Operator x = Operator::diagonal(A, std::vector<double>{-4.0, 1.0, 2.0});
  StepFunction f = mu(x, A);
  ASSERT_EQ(f.size(), 3u);
  EXPECT_DOUBLE_EQ(f.steps()[0].length, 0.25);
  EXPECT_DOUBLE_EQ(f.steps()[0].value, 4.0);
  StepFunction g = direct_sum({f, f});
  EXPECT_DOUBLE_EQ(g.domain_total(), 2.0 * f.domain_total());
  EXPECT_NEAR(integrate_power(g, 2.0), 2.0 * integrate_power(f, 2.0), 1e-12);
}

TEST(RearrangementProperty, UnitaryInvarianceAndSubmajorization) {
  Rng rng(11);
  TracialAlgebra A({{3, 0.5}, {2, 2.0}});
  for (int i = 0; i < 20; ++i) {
    Operator x = random_operator(A, rng);
    Operator h = random_hermitian(A, rng);
    // unitary from the Cayley transform of h
    std::vector<Matrix> ub;
    for (std::size_t b = 0; b < A.num_blocks(); ++b) {
      Matrix I = Matrix::Identity(A.block_dim(b), A.block_dim(b));
      Matrix ih = cplx(0, 1) * h.block(b);
      ub.push_back((I - ih) * (I + ih).inverse());
    }
    Operator U(ub);
    StepFunction a = mu(x, A), b = mu(U * x * U.adjoint(), A);
    for (double p : {0.5, 1.0, 2.0, 3.0}) EXPECT_NEAR(integrate_power(a, p), integrate_power(b, p), 1e-9);
    // μ(x + y) ≺≺ μ(x) + μ(y)
    Operator y = random_operator(A, rng);
    EXPECT_TRUE(submajorizes(step_sum(mu(x, A), mu(y, A)), mu(x + y, A)));
  }
}
