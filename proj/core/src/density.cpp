#include "dsbm/density.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <thread>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>

#include "dsbm/errors.hpp"

namespace dsbm {

const char* method_name(DensityMethod method) {
  switch (method) {
    case DensityMethod::LinearResponse:
      return "LinearResponse";
    case DensityMethod::QuadraticForm:
      return "QuadraticForm";
    case DensityMethod::IntegralLaplacian:
      return "IntegralLaplacian";
  }
  return "Unknown";
}

namespace {

DysonSolution solve_at(const DysonSolver& solver, double tau, const DysonSolution* warm) {
  if (!(tau > 0.0)) throw InvalidInput("density is defined for z != 0 only");
  if (tau >= solver.rho()) throw TauOutOfRange(tau, solver.rho());
  if (warm) {
    DysonParams p;
    p.tau = tau;
    return solver.solve(p, warm);
  }
  return solver.solve_path({tau}).back();
}

struct Scaled {
  Vector b;      // S^t v
  Vector omega;  // tau v / S^t v = 1 - v Sw
  Vector vhat;   // sqrt(v Sw)
  Matrix f;      // D(v/vhat) S D(w/vhat)
};

Scaled scaled(const VarianceProfile& m, const DysonSolution& s) {
  Scaled out;
  out.b = m.variances().transpose() * s.v;
  out.omega = s.tau * s.v.cwiseQuotient(out.b).array();
  out.vhat = (1.0 - out.omega.array()).sqrt();
  out.f = s.v.cwiseQuotient(out.vhat).asDiagonal() * m.variances() *
          s.w.cwiseQuotient(out.vhat).asDiagonal();
  return out;
}

}  // namespace

FrDiagnostics fr_diagnostics(const VarianceProfile& m, const DysonSolution& s) {
  const Scaled sc = scaled(m, s);
  const Matrix fr = 0.5 * (sc.f + sc.f.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(fr, Eigen::EigenvaluesOnly);
  FrDiagnostics d;
  d.fixed_point_defect = (fr * sc.vhat - sc.vhat).norm() / sc.vhat.norm();
  d.lambda_min = es.eigenvalues().minCoeff();
  d.lambda_max = es.eigenvalues().maxCoeff();
  return d;
}

DensityEvaluation density_sigma(const DysonSolver& solver, Complex z, const DysonSolution* warm) {
  DensityEvaluation e = density_from_solution(solver.profile(), solve_at(solver, std::norm(z), warm));
  e.z = z;
  return e;
}

DensityEvaluation density_from_solution(const VarianceProfile& m, const DysonSolution& s) {
  if (s.eta != 0.0) throw InvalidInput("density needs an eta = 0 solution");
  const Scaled sc = scaled(m, s);
  const int k = m.size();

  // Linearise both equations in tau; unknowns X = vhat * dlog v, Y = vhat * dlog w
  // (up to the scaling symmetry, fixed by d<v> = d<w>).
  const Vector c = s.v.cwiseQuotient(sc.b);
  const Vector g = sc.vhat.cwiseProduct(c);
  const Matrix id = Matrix::Identity(k, k);
  const Vector one_minus = 1.0 - sc.omega.array();
  Matrix a = Matrix::Zero(2 * k + 1, 2 * k);
  a.topLeftCorner(k, k) = id - sc.omega.asDiagonal() * sc.f.transpose();
  a.block(0, k, k, k) = one_minus.asDiagonal() * sc.f;
  a.block(k, 0, k, k) = one_minus.asDiagonal() * sc.f.transpose();
  a.block(k, k, k, k) = id - sc.omega.asDiagonal() * sc.f;
  a.block(2 * k, 0, 1, k) = s.v.cwiseQuotient(sc.vhat).transpose();
  a.block(2 * k, k, 1, k) = -s.w.cwiseQuotient(sc.vhat).transpose();
  Vector rhs = Vector::Zero(2 * k + 1);
  rhs.head(k) = -g;
  rhs.segment(k, k) = -g;

  const Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr.rank() < 2 * k) throw SingularKernel("linearised Dyson system is rank deficient");
  const Vector x = qr.solve(rhs).head(k);

  const Vector terms =
      c.array() + sc.omega.cwiseQuotient(sc.vhat).array() * (x - sc.f.transpose() * x).array();
  DensityEvaluation e;
  e.z = Complex(std::sqrt(s.tau), 0.0);
  e.sigma = terms.mean() / std::numbers::pi;
  e.vhat = sc.vhat;
  e.method = DensityMethod::LinearResponse;
  e.residual = s.residual;
  e.fr = fr_diagnostics(m, s);
  return e;
}

DensityEvaluation density_sigma(const VarianceProfile& m, Complex z) {
  return density_sigma(DysonSolver(m), z);
}

DensityEvaluation density_sigma_quadratic_form(const DysonSolver& solver, Complex z,
                                               const DysonSolution* warm) {
  const VarianceProfile& m = solver.profile();
  const DysonSolution s = solve_at(solver, std::norm(z), warm);
  const Scaled sc = scaled(m, s);
  const Matrix fr = 0.5 * (sc.f + sc.f.transpose());
  const Eigen::SelfAdjointEigenSolver<Matrix> es(fr);
  const Vector lambda = es.eigenvalues();
  if ((1.0 + lambda.array()).minCoeff() <= 1e-14) throw SingularKernel("F_r has eigenvalue -1");
  const Vector g = 2.0 * lambda.array() / (1.0 + lambda.array());
  const Vector root_omega = sc.omega.array().sqrt();
  const Matrix kr = root_omega.asDiagonal() *
                    (es.eigenvectors() * g.asDiagonal() * es.eigenvectors().transpose()) *
                    root_omega.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Matrix> kes(kr, Eigen::EigenvaluesOnly);
  if (kes.eigenvalues().maxCoeff() >= 1.0 - 1e-8) {
    throw SingularKernel("1 - K_r is numerically singular");
  }
  const Vector u = s.v.cwiseProduct(s.w).array().sqrt();
  const Matrix id = Matrix::Identity(m.size(), m.size());
  const Vector sol = (id - kr).ldlt().solve(u);

  DensityEvaluation e;
  e.z = z;
  e.sigma = u.dot(sol) / m.size() / std::numbers::pi;
  e.vhat = sc.vhat;
  e.method = DensityMethod::QuadraticForm;
  e.residual = s.residual;
  e.fr = fr_diagnostics(m, s);
  return e;
}

namespace {

struct Node {
  double eta;
  double weight;
};

// Composite 20-point Gauss-Legendre: `panels` geometric panels on [0, 1] reaching
// down to eta_lo, and panels/2 uniform panels of u = 1/eta on (0, 1]. Sorted by
// decreasing eta.
std::vector<Node> quadrature_nodes(int panels, double eta_lo) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  std::vector<std::pair<double, double>> ref;  // nodes/weights on [-1, 1]
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    ref.push_back({abscissa[i], weights[i]});
    if (abscissa[i] != 0.0) ref.push_back({-abscissa[i], weights[i]});
  }
  std::vector<Node> nodes;
  auto add_panel = [&](double lo, double hi, bool tail) {
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (const auto& [x, wt] : ref) {
      const double t = mid + half * x;
      if (tail) {
        nodes.push_back({1.0 / t, half * wt / (t * t)});
      } else {
        nodes.push_back({t, half * wt});
      }
    }
  };
  std::vector<double> edges{0.0};
  const double decades = -std::log10(eta_lo);
  for (int i = 0; i < panels; ++i) edges.push_back(std::pow(10.0, decades * (i / (panels - 1.0) - 1.0)));
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) add_panel(edges[i], edges[i + 1], false);
  const int tail_panels = std::max(1, panels / 2);
  for (int i = 0; i < tail_panels; ++i) {
    add_panel(static_cast<double>(i) / tail_panels, static_cast<double>(i + 1) / tail_panels, true);
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.eta > b.eta; });
  return nodes;
}

double eta_integral(const DysonSolver& solver, double tau, const std::vector<Node>& nodes) {
  DysonParams p;
  p.tau = tau;
  p.tol = 1e-14;
  DysonSolution current;
  bool have = false;
  double total = 0.0;
  for (const Node& node : nodes) {
    p.eta = node.eta;
    current = solver.solve(p, have ? &current : nullptr);
    have = true;
    total += node.weight * (current.v.mean() - 1.0 / (1.0 + node.eta));
  }
  return total;
}

double laplacian_sigma(const DysonSolver& solver, Complex z, double h, int panels) {
  // The solution varies on eta-scales down to ~tau; the same nodes serve the whole stencil.
  const std::vector<Node> nodes = quadrature_nodes(panels, std::min(1e-6, 1e-2 * std::norm(z)));
  std::map<double, double> cache;
  auto integral = [&](Complex at) {
    const double tau = std::norm(at);
    auto it = cache.find(tau);
    if (it == cache.end()) it = cache.emplace(tau, eta_integral(solver, tau, nodes)).first;
    return it->second;
  };
  const Complex i(0.0, 1.0);
  const double lap = (integral(z + h) + integral(z - h) + integral(z + i * h) +
                      integral(z - i * h) - 4.0 * integral(z)) /
                     (h * h);
  return -lap / (2.0 * std::numbers::pi);
}

}  // namespace

DensityEvaluation density_sigma_via_integral(const VarianceProfile& m, Complex z,
                                             const IntegralOptions& options) {
  if (std::abs(z) == 0.0) throw InvalidInput("density is defined for z != 0 only");
  if (options.initial_panels < 2 || options.max_panels < options.initial_panels) {
    throw InvalidInput("invalid quadrature panel counts");
  }
  // Small steps keep the O(h^2) stencil error low but amplify quadrature noise by
  // 1/h^2; the automatic choice widens the step until the panel refinement settles.
  std::vector<double> steps{options.h};
  if (options.h <= 0.0) steps = {2e-3 * std::abs(z), 1e-2 * std::abs(z), 3e-2 * std::abs(z)};
  const DysonSolver solver(m);
  for (double h : steps) {
    int panels = options.initial_panels;
    double previous = laplacian_sigma(solver, z, h, panels);
    while (panels * 2 <= options.max_panels) {
      panels *= 2;
      const double current = laplacian_sigma(solver, z, h, panels);
      const double change = std::abs(current - previous);
      if (change <= options.rel_tol * std::abs(current) + 1e-12) {
        DensityEvaluation e;
        e.z = z;
        e.sigma = std::max(current, 0.0);
        e.method = DensityMethod::IntegralLaplacian;
        e.residual = change;
        return e;
      }
      previous = current;
    }
  }
  throw QuadratureFailure("eta integral did not settle up to " + std::to_string(options.max_panels) +
                          " panels");
}

std::vector<DensityRow> density_grid(const VarianceProfile& m, const std::vector<Complex>& points,
                                     bool with_oracle, unsigned threads) {
  const DysonSolver solver(m);
  std::vector<DensityRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      DensityRow& row = rows[i];
      row.z = points[i];
      try {
        if (std::norm(row.z) >= solver.rho()) {
          row.status = "OutOfBulk";
        } else {
          row.value = density_sigma(solver, row.z);
          row.status = "ok";
        }
      } catch (const Error& e) {
        row.status = e.code();
        row.error = e.what();
      }
      if (!with_oracle) continue;
      try {
        row.oracle = density_sigma_via_integral(m, row.z);
      } catch (const Error& e) {
        row.oracle_error = std::string(e.code()) + ": " + e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<std::size_t>(1, points.size()));
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  pool.clear();
  return rows;
}

}  // namespace dsbm
