#pragma once

#include <vector>

#include "dsbm/profile.hpp"

namespace dsbm {

struct DysonParams {
  double tau = 0.0;  // |z|^2
  double eta = 0.0;
  double tol = 1e-12;
  int max_iter = 20000;
  double damping = 0.5;
};

struct DysonSolution {
  Vector v;
  Vector w;
  double tau = 0.0;
  double eta = 0.0;
  double residual = 0.0;  // max relative defect of both equations (and of <v> = <w> at eta = 0)
  int iterations = 0;
  bool normalized = false;
};

// Solver for 1/v = eta + Sw + tau/(eta + S^t v), 1/w = eta + S^t v + tau/(eta + Sw),
// with <v> = <w> imposed at eta = 0. Damped fixed-point iteration on (log v, log w)
// with per-step rescaling, finished by Gauss-Newton; eta-continuation as fallback.
class DysonSolver {
 public:
  explicit DysonSolver(VarianceProfile m);

  const VarianceProfile& profile() const noexcept { return m_; }
  double rho() const noexcept { return rho_; }

  // Throws TauOutOfRange (eta = 0, tau >= rho), InvalidInput, NonConvergence.
  DysonSolution solve(const DysonParams& p, const DysonSolution* warm = nullptr) const;

  // Solves at each tau of a decreasing grid (eta = 0), inserting geometric
  // continuation steps so every solve is warm-started from a nearby tau.
  std::vector<DysonSolution> solve_path(const std::vector<double>& taus, double tol = 1e-12) const;

 private:
  DysonSolution newton(const DysonParams& p, Vector x, Vector y, int iterations) const;
  DysonSolution continuation(const DysonParams& p) const;

  VarianceProfile m_;
  Matrix st_;
  double rho_;
};

DysonSolution solve_dyson(const VarianceProfile& m, const DysonParams& p);

// max_i |v_i (Sw)_i - w_i (S^t v)_i|
double vw_symmetry_defect(const VarianceProfile& m, const DysonSolution& s);
// max_i |1 - w_i (S^t v)_i - tau v_i / (S^t v)_i|, eta = 0 only
double unit_identity_defect(const VarianceProfile& m, const DysonSolution& s);

// tau v / (S^t v) = 1 - v Sw at eta = 0, without the cancellation.
Vector one_minus_vsw(const VarianceProfile& m, const DysonSolution& s);

}  // namespace dsbm
