#include <cmath>

#include <gtest/gtest.h>

#include "dsbm/errors.hpp"
#include "dsbm/exponents.hpp"

using namespace dsbm;

namespace {

VarianceProfile example2() {
  Matrix s(4, 4);
  s << 0, 0, 1, 1, 1, 0, 0, 1, 1, 1, 0, 0, 0, 1, 0, 0;
  return VarianceProfile::from_variances(s);
}

const std::vector<double> kGrid{1e-4, 1e-5, 1e-6, 1e-7, 1e-8};

}  // namespace

TEST(Exponents, LinearSlopeIsExactOnLines) {
  EXPECT_NEAR(linear_slope({0, 1, 2, 3}, {1, 3.5, 6, 8.5}), 2.5, 1e-14);
  EXPECT_THROW(linear_slope({1.0}, {2.0}), InvalidInput);
}

TEST(Exponents, ExampleProfileHasExpectedStructure) {
  const ExponentProfile e = exponent_profile(example2(), kGrid);
  ASSERT_EQ(e.normal_form.blocks(), 4);
  EXPECT_EQ(e.mean_v.cols(), 5);
  EXPECT_EQ(e.slopes.cols(), 4);
  EXPECT_EQ(e.solutions.size(), kGrid.size());
  EXPECT_EQ(e.f_hat, Vector(e.slopes.col(3)));
  // The smallest LHD gap tracks kappa = 1/3.
  ASSERT_TRUE(e.delta.has_value());
  EXPECT_NEAR(*e.delta, 1.0 / 3.0, 0.03);
  EXPECT_NEAR(e.delta_hat, 1.0 / 3.0, 0.03);
  EXPECT_LT(min_max_defect(e).cwiseAbs().maxCoeff(), 0.05);
  EXPECT_LT(successor_slack(e), 0.05);
  for (const EdgeWeight& w : e.weights) {
    const int l = w.edge.from, k = w.edge.to;
    const double expected = e.f_hat(k) - e.f_hat(l) + (w.edge.lhd ? 0.0 : 1.0);
    EXPECT_NEAR(w.weight, expected, 1e-12);
  }
}

TEST(Exponents, SingleBlockHasNoLhdEdges) {
  const auto m = VarianceProfile::from_variances(Matrix::Constant(1, 1, 1.0));
  const ExponentProfile e = exponent_profile(m, kGrid);
  EXPECT_FALSE(e.delta.has_value());
  EXPECT_NEAR(e.f_hat(0), 0.0, 1e-6);
}

TEST(Exponents, GridValidation) {
  const auto m = example2();
  EXPECT_THROW(exponent_profile(m, {1e-4}), InvalidInput);
  EXPECT_THROW(exponent_profile(m, {1e-6, 1e-4}), InvalidInput);
  EXPECT_THROW(exponent_profile(m, {10.0, 1e-4}), InvalidInput);
}

TEST(Exponents, ScalingSlopesOfConstantProfile) {
  // S = J_3: <1 - v Sw> = tau / 3 exactly and <vw> = (3 - tau) / 9.
  const auto m = VarianceProfile::from_variances(Matrix::Constant(3, 3, 1.0));
  const ScalingSlopes s = scaling_check(m, {1e-2, 1e-3, 1e-4});
  EXPECT_NEAR(s.slope_one_minus, 1.0, 1e-9);
  EXPECT_NEAR(s.slope_vw, 0.0, 1e-3);
}

TEST(Exponents, FunctionalJDomainAndValue) {
  const auto m = VarianceProfile::from_variances(Matrix::Constant(1, 1, 2.0));
  Vector x(1);
  x << 1.0;
  // tau x / S^t x = 0.25 for tau = 0.5.
  EXPECT_NEAR(functional_J(m, 0.5, x), 0.25 - std::log(0.25), 1e-14);
  x << -1.0;
  EXPECT_THROW(functional_J(m, 0.5, x), DomainViolation);
  x << 1.0;
  EXPECT_THROW(functional_J(m, 3.0, x), DomainViolation);
}

TEST(Exponents, SolutionMinimisesJ) {
  const auto m = example2();
  const VariationalReport r = verify_variational(m, 0.05, 300, 7);
  EXPECT_EQ(r.trials, 300);
  EXPECT_EQ(r.violations, 0);
  EXPECT_NEAR(r.j_perron, r.perron_bound, 1e-10);
  EXPECT_LE(r.j_v, r.j_perron + 1e-10);
  EXPECT_GE(r.min_gap, -1e-10);
}
