#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dsbm/density.hpp"
#include "dsbm/errors.hpp"

using namespace dsbm;

namespace {

VarianceProfile rows(std::initializer_list<std::initializer_list<double>> r) {
  const int k = static_cast<int>(r.size());
  Matrix s(k, k);
  int i = 0;
  for (const auto& row : r) {
    int j = 0;
    for (double x : row) s(i, j++) = x;
    ++i;
  }
  return VarianceProfile::from_variances(s);
}

const VarianceProfile kExample1 = rows({{0, 1, 1, 0}, {0, 0, 1, 1}, {1, 0, 0, 1}, {1, 0, 0, 0}});
const VarianceProfile kExample3 = rows({{0, 0, 1, 1}, {0, 1, 1, 0}, {1, 1, 0, 0}, {1, 0, 0, 0}});

}  // namespace

TEST(Density, ConstantProfileIsUniformDisk) {
  // S = s J_K has <1 - v Sw> = tau / (K s), hence sigma = 1 / (pi K s) on the disk.
  for (int k : {1, 3}) {
    const double s = 0.5;
    const auto m = VarianceProfile::from_variances(Matrix::Constant(k, k, s));
    const double expected = 1.0 / (std::numbers::pi * k * s);
    for (double r : {0.05, 0.4, 1.0}) {
      if (r * r >= k * s) continue;
      const DensityEvaluation d = density_sigma(m, Complex(r, 0.3 * r));
      EXPECT_NEAR(d.sigma, expected, 1e-9 * expected) << k << " " << r;
      EXPECT_EQ(d.method, DensityMethod::LinearResponse);
    }
  }
}

TEST(Density, DependsOnModulusOnly) {
  const DysonSolver solver(kExample1);
  const double r = 0.4;
  const double a = density_sigma(solver, Complex(r, 0)).sigma;
  const double b = density_sigma(solver, std::polar(r, 1.3)).sigma;
  EXPECT_NEAR(a, b, 1e-10 * a);
}

TEST(Density, SolutionRouteMatchesSolverRoute) {
  const DysonSolver solver(kExample1);
  const DysonSolution sol = solver.solve({.tau = 0.09});
  EXPECT_NEAR(density_from_solution(kExample1, sol).sigma,
              density_sigma(solver, Complex(0.3, 0)).sigma, 1e-10);
}

TEST(Density, LinearResponseMatchesFiniteDifference) {
  // sigma = (1/pi) d/dtau <1 - v Sw>, checked by a central difference.
  const DysonSolver solver(kExample1);
  const double tau = 0.16, h = 1e-5;
  auto mean_one_minus = [&](double t) {
    return one_minus_vsw(kExample1, solver.solve({.tau = t})).mean();
  };
  const double fd = (mean_one_minus(tau + h) - mean_one_minus(tau - h)) / (2 * h) / std::numbers::pi;
  EXPECT_NEAR(density_sigma(solver, Complex(0.4, 0)).sigma, fd, 1e-6 * fd);
}

TEST(Density, IntegralOracleAgreesWithLinearResponse) {
  for (const auto* m : {&kExample1, &kExample3}) {
    const DysonSolver solver(*m);
    for (double frac : {0.3, 0.7}) {
      const Complex z = std::polar(frac * std::sqrt(solver.rho()), 0.4);
      const double lr = density_sigma(solver, z).sigma;
      const DensityEvaluation in = density_sigma_via_integral(*m, z);
      EXPECT_EQ(in.method, DensityMethod::IntegralLaplacian);
      EXPECT_NEAR(in.sigma, lr, 1e-4 * lr) << frac;
    }
  }
}

TEST(Density, QuadraticFormAgreesForSymmetricProfiles) {
  const DysonSolver solver(kExample3);
  for (double r : {0.2, 0.6}) {
    const double lr = density_sigma(solver, Complex(r, 0)).sigma;
    const DensityEvaluation qf = density_sigma_quadratic_form(solver, Complex(r, 0));
    EXPECT_EQ(qf.method, DensityMethod::QuadraticForm);
    EXPECT_NEAR(qf.sigma, lr, 1e-8 * lr);
  }
}

TEST(Density, FrHasUnitEigenvectorVhat) {
  const DysonSolver solver(kExample1);
  for (double tau : {1e-6, 1e-2, 0.3}) {
    const FrDiagnostics fr = fr_diagnostics(kExample1, solver.solve({.tau = tau}));
    EXPECT_LT(fr.fixed_point_defect, 1e-9);
    EXPECT_NEAR(fr.lambda_max, 1.0, 1e-9);
    EXPECT_GT(fr.lambda_min, -1.0);
  }
}

TEST(Density, OutsideBulkIsRejected) {
  const DysonSolver solver(kExample1);
  EXPECT_THROW(density_sigma(solver, Complex(std::sqrt(solver.rho()) * 1.01, 0)), TauOutOfRange);
  EXPECT_THROW(density_sigma(solver, Complex(0, 0)), InvalidInput);
}

TEST(Density, GridKeepsOrderAndFlagsOutOfBulk) {
  const double rho = DysonSolver(kExample1).rho();
  const std::vector<Complex> points{{0.2, 0}, {2 * std::sqrt(rho), 0}, {0, 0.5}};
  const auto grid = density_grid(kExample1, points, true, 2);
  ASSERT_EQ(grid.size(), 3u);
  EXPECT_EQ(grid[0].status, "ok");
  EXPECT_EQ(grid[1].status, "OutOfBulk");
  EXPECT_EQ(grid[2].status, "ok");
  EXPECT_EQ(grid[2].z, points[2]);
  ASSERT_TRUE(grid[0].value && grid[0].oracle);
  EXPECT_NEAR(grid[0].oracle->sigma, grid[0].value->sigma, 1e-4 * grid[0].value->sigma);
  const auto serial = density_grid(kExample1, points, false, 1);
  EXPECT_EQ(serial[2].value->sigma, grid[2].value->sigma);
}
