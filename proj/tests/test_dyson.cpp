#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dsbm/acceptance.hpp"
#include "dsbm/dyson.hpp"
#include "dsbm/errors.hpp"

using namespace dsbm;
namespace acc = dsbm::acceptance;

namespace {

VarianceProfile constant_profile(int k, double s) {
  return VarianceProfile::from_variances(Matrix::Constant(k, k, s));
}

VarianceProfile example1() {
  Matrix s(4, 4);
  s << 0, 1, 1, 0, 0, 0, 1, 1, 1, 0, 0, 1, 1, 0, 0, 0;
  return VarianceProfile::from_variances(s);
}

// Defect of both equations, evaluated independently of the solver.
double equation_defect(const VarianceProfile& m, const DysonSolution& s) {
  const Matrix& S = m.variances();
  const Vector sw = S * s.w;
  const Vector stv = S.transpose() * s.v;
  double worst = 0.0;
  for (int i = 0; i < m.size(); ++i) {
    const double ev = s.eta + sw(i) + s.tau / (s.eta + stv(i));
    const double ew = s.eta + stv(i) + s.tau / (s.eta + sw(i));
    worst = std::max({worst, std::abs(s.v(i) * ev - 1.0), std::abs(s.w(i) * ew - 1.0)});
  }
  return worst;
}

}  // namespace

TEST(Dyson, ConstantProfileClosedForm) {
  // S = s J_K: v = w = sqrt(K s - tau) / (K s) for tau < K s.
  for (int k : {1, 3, 5}) {
    const double s = 0.25;
    const auto m = constant_profile(k, s);
    const DysonSolver solver(m);
    EXPECT_NEAR(solver.rho(), k * s, 1e-12);
    for (double tau : {1e-6, 0.01, 0.2, 0.9 * k * s}) {
      const DysonSolution sol = solver.solve({.tau = tau});
      const double expected = std::sqrt(k * s - tau) / (k * s);
      for (int i = 0; i < k; ++i) {
        EXPECT_NEAR(sol.v(i), expected, 1e-10 * expected) << "k=" << k << " tau=" << tau;
        EXPECT_NEAR(sol.w(i), expected, 1e-10 * expected);
      }
      EXPECT_LT(sol.residual, 1e-12);
    }
  }
}

TEST(Dyson, PositiveEtaScalarClosedForm) {
  // K = 1, s = 1: v = w solves 1/v = eta + v + tau / (eta + v).
  const auto m = constant_profile(1, 1.0);
  for (double eta : {0.01, 0.5, 2.0})
    for (double tau : {0.0, 0.3, 1.5}) {
      const DysonSolution sol = solve_dyson(m, {.tau = tau, .eta = eta});
      const double v = sol.v(0);
      EXPECT_NEAR(1.0 / v, eta + v + tau / (eta + v), 1e-10);
      EXPECT_NEAR(sol.v(0), sol.w(0), 1e-12);
      EXPECT_LT(equation_defect(m, sol), 1e-10);
    }
}

TEST(Dyson, IdentitiesOnExample) {
  const DysonSolver solver(example1());
  for (double tau : {1e-8, 1e-4, 1e-2, 0.5}) {
    const DysonSolution sol = solver.solve({.tau = tau});
    EXPECT_LT(equation_defect(solver.profile(), sol), 1e-10) << tau;
    EXPECT_LT(vw_symmetry_defect(solver.profile(), sol), 1e-10) << tau;
    EXPECT_LT(unit_identity_defect(solver.profile(), sol), 1e-10) << tau;
    EXPECT_NEAR(sol.v.mean(), sol.w.mean(), 1e-10 * sol.v.mean());
    EXPECT_GT(sol.v.minCoeff(), 0.0);
    const Vector direct =
        Vector::Ones(4) - Vector(sol.v.cwiseProduct(solver.profile().variances() * sol.w));
    EXPECT_LT((direct - one_minus_vsw(solver.profile(), sol)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Dyson, RandomAdmissibleProfilesSolve) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const DysonSolver solver(acc::random_admissible_profile(rng, 2 + trial % 6));
    for (double frac : {1e-3, 0.3, 0.8}) {
      const DysonSolution sol = solver.solve({.tau = frac * solver.rho()});
      EXPECT_LT(equation_defect(solver.profile(), sol), 1e-10);
      EXPECT_LT(vw_symmetry_defect(solver.profile(), sol), 1e-10);
    }
  }
}

TEST(Dyson, SolvePathReturnsOneSolutionPerGridPoint) {
  const DysonSolver solver(example1());
  const std::vector<double> taus{1e-2, 1e-4, 1e-6, 1e-8};
  const auto path = solver.solve_path(taus);
  ASSERT_EQ(path.size(), taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    EXPECT_DOUBLE_EQ(path[i].tau, taus[i]);
    EXPECT_LT(equation_defect(solver.profile(), path[i]), 1e-10);
  }
}

TEST(Dyson, WarmStartAgreesWithColdStart) {
  const DysonSolver solver(example1());
  const DysonSolution a = solver.solve({.tau = 1e-3});
  const DysonSolution b = solver.solve({.tau = 1.1e-3}, &a);
  const DysonSolution c = solver.solve({.tau = 1.1e-3});
  EXPECT_LT((b.v - c.v).cwiseAbs().maxCoeff(), 1e-9 * c.v.maxCoeff());
}

TEST(Dyson, RejectsInvalidParameters) {
  const DysonSolver solver(constant_profile(2, 0.5));
  EXPECT_THROW(solver.solve({.tau = 1.0}), TauOutOfRange);
  EXPECT_THROW(solver.solve({.tau = -1.0}), InvalidInput);
  EXPECT_THROW(solver.solve({.tau = 0.1, .eta = -1.0}), InvalidInput);
}
