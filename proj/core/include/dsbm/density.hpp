#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "dsbm/dyson.hpp"
#include "dsbm/profile.hpp"

namespace dsbm {

using Complex = std::complex<double>;

enum class DensityMethod { LinearResponse, QuadraticForm, IntegralLaplacian };
const char* method_name(DensityMethod method);

// Spectral data of F_r = (D(v/vhat) S D(w/vhat) + transpose) / 2.
struct FrDiagnostics {
  double fixed_point_defect = 0.0;  // |F_r vhat - vhat|_2 / |vhat|_2
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

struct DensityEvaluation {
  Complex z;
  double sigma = 0.0;
  Vector vhat;  // sqrt(v Sw); empty for the integral method
  DensityMethod method = DensityMethod::LinearResponse;
  double residual = 0.0;  // Dyson residual, or the quadrature refinement change
  std::optional<FrDiagnostics> fr;
};

FrDiagnostics fr_diagnostics(const VarianceProfile& m, const DysonSolution& s);

// sigma = (1/pi) d/dtau <1 - v Sw>, from the linearised Dyson equation at
// eta = 0. Needs 0 < |z|^2 < rho(S). Throws TauOutOfRange, InvalidInput,
// SingularKernel, NonConvergence. `warm` seeds the solver.
DensityEvaluation density_sigma(const DysonSolver& solver, Complex z,
                                const DysonSolution* warm = nullptr);
DensityEvaluation density_sigma(const VarianceProfile& m, Complex z);
// Same, from an eta = 0 solution already at hand.
DensityEvaluation density_from_solution(const VarianceProfile& m, const DysonSolution& s);

// sigma = (1/pi) <sqrt(vw), (1 - K_r)^{-1} sqrt(vw)>. Agrees with density_sigma
// only for symmetric S. Throws SingularKernel when 1 - K_r is not positive definite.
DensityEvaluation density_sigma_quadratic_form(const DysonSolver& solver, Complex z,
                                               const DysonSolution* warm = nullptr);

struct IntegralOptions {
  double h = 0.0;            // Laplacian step; 0 tries 2e-3 |z|, then 1e-2 |z|, 3e-2 |z|
  int initial_panels = 8;
  int max_panels = 64;
  double rel_tol = 1e-7;     // change in sigma between panel doublings
};

// sigma = -(1/2pi) Laplacian_z of I(|z|^2), I(tau) = int_0^inf (<v(tau,eta)> - 1/(1+eta)) deta,
// by composite Gauss-Legendre quadrature (eta in [0,1] on geometric panels, the tail in
// u = 1/eta) and a 5-point stencil. Reliable for |z| >~ 1e-4 sqrt(rho); below that
// double precision cannot resolve the Laplacian. Throws QuadratureFailure.
DensityEvaluation density_sigma_via_integral(const VarianceProfile& m, Complex z,
                                             const IntegralOptions& options = {});

struct DensityRow {
  Complex z;
  std::string status;  // "ok", "OutOfBulk", or an error code
  std::optional<DensityEvaluation> value;
  std::optional<DensityEvaluation> oracle;
  std::string error;
  std::string oracle_error;  // oracle failures leave the primary value intact
};

// Evaluates every point concurrently; rows come back in input order.
std::vector<DensityRow> density_grid(const VarianceProfile& m, const std::vector<Complex>& points,
                                     bool with_oracle, unsigned threads = 0);

}  // namespace dsbm
