#include "dsbm/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "dsbm/errors.hpp"

namespace dsbm {

ExponentProfile exponent_profile(const VarianceProfile& m, const std::vector<double>& tau_grid) {
  const DysonSolver solver(m);
  if (tau_grid.size() < 2) throw InvalidInput("exponent profile needs at least two grid points");
  for (std::size_t j = 0; j < tau_grid.size(); ++j) {
    if (!(tau_grid[j] > 0.0)) throw InvalidInput("tau grid must be positive");
    if (j > 0 && !(tau_grid[j] < tau_grid[j - 1])) throw InvalidInput("tau grid must be decreasing");
  }
  if (!(tau_grid.front() < 0.5 * solver.rho())) {
    throw InvalidInput("tau grid must lie below rho(S)/2");
  }

  ExponentProfile e;
  e.tau_grid = tau_grid;
  e.normal_form = normal_form(m);
  e.graph = build_block_graph(e.normal_form);
  e.solutions = solver.solve_path(tau_grid);

  const NormalForm& nf = e.normal_form;
  const int L = nf.blocks();
  const int n = static_cast<int>(tau_grid.size());
  e.mean_v = Matrix::Zero(L, n);
  e.mean_w = Matrix::Zero(L, n);
  for (int j = 0; j < n; ++j) {
    const DysonSolution& s = e.solutions[j];
    for (int a = 0; a < m.size(); ++a) {
      e.mean_v(nf.block_of[a], j) += s.v[nf.q1[a]];
      e.mean_w(nf.block_of[a], j) += s.w[nf.q2[a]];
    }
    for (int l = 0; l < L; ++l) {
      e.mean_v(l, j) /= nf.block_sizes[l];
      e.mean_w(l, j) /= nf.block_sizes[l];
    }
  }
  e.ratio.resize(L, n);
  e.slopes.resize(L, n - 1);
  for (int l = 0; l < L; ++l) {
    for (int j = 0; j < n; ++j) e.ratio(l, j) = -std::log(e.mean_v(l, j)) / std::log(tau_grid[j]);
    for (int j = 0; j + 1 < n; ++j) {
      e.slopes(l, j) = -(std::log(e.mean_v(l, j + 1)) - std::log(e.mean_v(l, j))) /
                       (std::log(tau_grid[j + 1]) - std::log(tau_grid[j]));
    }
  }
  e.f_hat = e.slopes.col(n - 2);

  e.delta_hat = std::numeric_limits<double>::infinity();
  for (const Edge& edge : e.graph.edges) {
    const double diff = e.f_hat[edge.to] - e.f_hat[edge.from];
    const double weight = edge.lhd ? diff : diff + 1.0;
    e.weights.push_back({edge, weight});
    e.delta_hat = std::min(e.delta_hat, weight);
    if (edge.lhd) e.delta = std::min(e.delta.value_or(diff), diff);
  }
  return e;
}

Vector min_max_defect(const ExponentProfile& e) {
  const int L = static_cast<int>(e.f_hat.size());
  const double inf = std::numeric_limits<double>::infinity();
  Vector upper = Vector::Constant(L, -inf), lower = Vector::Constant(L, inf);
  for (const Edge& edge : e.graph.edges) {
    const double fl = e.f_hat[edge.from], fk = e.f_hat[edge.to];
    if (edge.lhd) {
      upper[edge.to] = std::max(upper[edge.to], fl);
      lower[edge.from] = std::min(lower[edge.from], fk);
    }
    if (edge.prec) {
      upper[edge.to] = std::max(upper[edge.to], fl - 1.0);
      lower[edge.from] = std::min(lower[edge.from], fk + 1.0);
    }
  }
  return e.f_hat - 0.5 * (upper + lower);
}

double successor_slack(const ExponentProfile& e) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const EdgeWeight& ew : e.weights) {
    double best = std::numeric_limits<double>::infinity();
    for (const EdgeWeight& next : e.weights) {
      if (next.edge.from == ew.edge.to) best = std::min(best, next.weight);
    }
    worst = std::max(worst, best - ew.weight);
  }
  return worst;
}

double linear_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw InvalidInput("slope needs two or more points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw InvalidInput("slope needs distinct abscissae");
  return sxy / sxx;
}

ScalingSlopes scaling_check(const VarianceProfile& m, const std::vector<double>& tau_grid) {
  const DysonSolver solver(m);
  for (double tau : tau_grid) {
    if (!(tau > 0.0 && tau < solver.rho())) throw TauOutOfRange(tau, solver.rho());
  }
  const std::vector<DysonSolution> sols = solver.solve_path(tau_grid);
  std::vector<double> lt, l1, lvw;
  for (const DysonSolution& s : sols) {
    // Components far below roundoff legitimately evaluate to ~0 in the direct
    // form; only a defect beyond the identity tolerance flags a bad solve.
    const Vector direct = 1.0 - s.v.cwiseProduct(m.variances() * s.w).array();
    for (int i = 0; i < direct.size(); ++i) {
      if (!(direct[i] > -1e-10) || !(direct.mean() > 0.0)) {
        throw NegativeArgument("1 - v Sw <= 0 at tau = " + std::to_string(s.tau) + ", index " +
                               std::to_string(i + 1));
      }
    }
    lt.push_back(std::log(s.tau));
    l1.push_back(std::log(one_minus_vsw(m, s).mean()));
    lvw.push_back(std::log(s.v.cwiseProduct(s.w).mean()));
  }
  return {linear_slope(lt, l1), linear_slope(lt, lvw)};
}

double functional_J(const VarianceProfile& m, double tau, const Vector& x) {
  if (x.size() != m.size()) throw InvalidInput("J argument has wrong dimension");
  const Vector b = m.variances().transpose() * x;
  double lin = 0.0, log_sum = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double q = tau * x[i] / b[i];
    if (!(x[i] > 0.0) || !(q < 1.0) || !std::isfinite(q)) {
      throw DomainViolation("J requires 0 < x < S^t x / tau", static_cast<std::size_t>(i));
    }
    lin += q;
    log_sum += std::log(q);
  }
  return (lin - log_sum) / static_cast<double>(x.size());
}

VariationalReport verify_variational(const VarianceProfile& m, double tau, int trials,
                                     std::uint64_t seed) {
  constexpr double kSlack = 1e-10;
  const DysonSolver solver(m);
  if (!(tau > 0.0 && tau < solver.rho())) throw TauOutOfRange(tau, solver.rho());
  const DysonSolution s = solver.solve_path({tau}).back();
  const PerronPair perron = spectral_radius(m);

  VariationalReport r;
  r.j_v = functional_J(m, tau, s.v);
  r.j_perron = functional_J(m, tau, perron.eigenvector);
  r.perron_bound = tau / perron.rho - std::log(tau / perron.rho);
  r.min_gap = r.j_perron - r.j_v;
  if (r.j_v > r.j_perron + kSlack) ++r.violations;

  // Log-uniform candidates over six decades, kept only inside the domain of J.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> exponent(-3.0, 3.0);
  const long max_draws = 1000L * std::max(trials, 1);
  Vector x(m.size());
  for (long draw = 0; draw < max_draws && r.trials < trials; ++draw) {
    for (int i = 0; i < x.size(); ++i) x[i] = std::pow(10.0, exponent(rng));
    const Vector b = m.variances().transpose() * x;
    if (((tau * x.array()) >= b.array()).any()) continue;
    const double jx = functional_J(m, tau, x);
    ++r.trials;
    r.min_gap = std::min(r.min_gap, jx - r.j_v);
    if (r.j_v > jx + kSlack) ++r.violations;
  }
  return r;
}

}  // namespace dsbm
