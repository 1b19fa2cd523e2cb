#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dsbm/block_graph.hpp"
#include "dsbm/dyson.hpp"
#include "dsbm/profile.hpp"
#include "dsbm/structure.hpp"

namespace dsbm {

struct EdgeWeight {
  Edge edge;
  double weight = 0.0;  // f_k - f_l, plus 1 if the edge is PREC only
};

struct ExponentProfile {
  std::vector<double> tau_grid;          // decreasing
  Matrix mean_v;                         // L x |grid|: <v~_k>
  Matrix mean_w;                         // L x |grid|: <w~_k>
  Matrix ratio;                          // L x |grid|: -log<v~_k> / log tau
  Matrix slopes;                         // L x (|grid|-1): two-point exponent, column j at tau_grid[j+1]
  Vector f_hat;                          // slopes at the smallest pair
  std::optional<double> delta;           // min over LHD edges of f_k - f_l
  double delta_hat = 0.0;                // min edge weight
  std::vector<EdgeWeight> weights;
  NormalForm normal_form;
  BlockRelationGraph graph;
  std::vector<DysonSolution> solutions;  // one per grid point
};

// Throws InvalidInput unless the grid has >= 2 decreasing points below rho(S)/2.
ExponentProfile exponent_profile(const VarianceProfile& m, const std::vector<double>& tau_grid);

// Per block: f_k - (max{f_l : l LHD k, f_l - 1 : l PREC k} + min{f_l : k LHD l, f_l + 1 : k PREC l}) / 2.
Vector min_max_defect(const ExponentProfile& e);

// max over edges e = (l, k) of (min weight of an edge leaving k) - w_e.
double successor_slack(const ExponentProfile& e);

struct ScalingSlopes {
  double slope_one_minus = 0.0;  // log<1 - v Sw> vs log tau
  double slope_vw = 0.0;         // log<v w> vs log tau
};

// Least-squares slopes over the grid (any positive grid below rho).
// Throws NegativeArgument if 1 - v Sw <= 0 anywhere.
ScalingSlopes scaling_check(const VarianceProfile& m, const std::vector<double>& tau_grid);

// Least-squares slope of ys against xs.
double linear_slope(const std::vector<double>& xs, const std::vector<double>& ys);

// J(x) = <tau x / S^t x> - <log(tau x / S^t x)>. Throws DomainViolation unless
// 0 < x < S^t x / tau.
double functional_J(const VarianceProfile& m, double tau, const Vector& x);

struct VariationalReport {
  double j_v = 0.0;
  double j_perron = 0.0;
  double perron_bound = 0.0;  // tau/rho - log(tau/rho)
  double min_gap = 0.0;       // min over trials and the Perron vector of J(x) - J(v)
  int trials = 0;
  int violations = 0;         // J(v) > J(x) + 1e-10
};

VariationalReport verify_variational(const VarianceProfile& m, double tau, int trials,
                                     std::uint64_t seed);

}  // namespace dsbm
