#include "dsbm/dyson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "dsbm/errors.hpp"
#include "dsbm/structure.hpp"

namespace dsbm {

namespace {

constexpr double kNewtonSwitch = 1e-3;
constexpr int kStagnationWindow = 50;
constexpr int kNewtonSteps = 200;

double plain_spectral_radius(const VarianceProfile& m) {
  if (is_irreducible(zero_pattern(m))) return spectral_radius(m).rho;
  Eigen::EigenSolver<Matrix> es(m.variances(), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double max_abs(const Vector& r) {
  if (!r.allFinite()) return std::numeric_limits<double>::infinity();
  return r.lpNorm<Eigen::Infinity>();
}

}  // namespace

DysonSolver::DysonSolver(VarianceProfile m)
    : m_(std::move(m)), st_(m_.variances().transpose()), rho_(plain_spectral_radius(m_)) {}

namespace {

// Log-domain residual: F1 = x + log(eta + a + tau/(eta + b)), F2 likewise, with
// a = S e^y, b = S^t e^x; plus log<v> - log<w> at eta = 0.
struct System {
  const Matrix& s;
  const Matrix& st;
  double tau;
  double eta;

  int rows() const { return 2 * static_cast<int>(s.rows()) + (eta == 0.0 ? 1 : 0); }

  Vector residual(const Vector& x, const Vector& y) const {
    const int k = static_cast<int>(s.rows());
    const Vector v = x.array().exp(), w = y.array().exp();
    const Vector a = eta + (s * w).array();
    const Vector b = eta + (st * v).array();
    Vector f(rows());
    f.head(k) = x.array() + (a.array() + tau / b.array()).log();
    f.segment(k, k) = y.array() + (b.array() + tau / a.array()).log();
    if (eta == 0.0) f(2 * k) = std::log(v.mean()) - std::log(w.mean());
    return f;
  }

  Matrix jacobian(const Vector& x, const Vector& y) const {
    const int k = static_cast<int>(s.rows());
    const Vector v = x.array().exp(), w = y.array().exp();
    const Vector a = eta + (s * w).array();
    const Vector b = eta + (st * v).array();
    const Vector a1 = a.array() + tau / b.array();
    const Vector a2 = b.array() + tau / a.array();
    const Matrix da_dy = s * w.asDiagonal();   // d a_i / d y_j = s_ij w_j
    const Matrix db_dx = st * v.asDiagonal();  // d b_i / d x_j = s_ji v_j
    Matrix j = Matrix::Zero(rows(), 2 * k);
    const Vector c1 = (-tau / b.array().square()) / a1.array();
    const Vector c2 = (-tau / a.array().square()) / a2.array();
    j.topLeftCorner(k, k) = Matrix::Identity(k, k) + c1.asDiagonal() * db_dx;
    j.block(0, k, k, k) = a1.cwiseInverse().asDiagonal() * da_dy;
    j.block(k, 0, k, k) = a2.cwiseInverse().asDiagonal() * db_dx;
    j.block(k, k, k, k) = Matrix::Identity(k, k) + c2.asDiagonal() * da_dy;
    if (eta == 0.0) {
      j.block(2 * k, 0, 1, k) = (v / v.sum()).transpose();
      j.block(2 * k, k, 1, k) = (-w / w.sum()).transpose();
    }
    return j;
  }
};

DysonSolution pack(const Vector& x, const Vector& y, const DysonParams& p, double log_res,
                   int iterations) {
  DysonSolution s;
  s.v = x.array().exp();
  s.w = y.array().exp();
  if (p.eta == 0.0) {
    // Exact symmetry (v, w) -> (alpha v, w / alpha) at eta = 0.
    const double alpha = std::sqrt(s.w.mean() / s.v.mean());
    s.v *= alpha;
    s.w /= alpha;
    s.normalized = true;
  }
  s.tau = p.tau;
  s.eta = p.eta;
  s.residual = std::expm1(log_res);
  s.iterations = iterations;
  return s;
}

}  // namespace

DysonSolution DysonSolver::newton(const DysonParams& p, Vector x, Vector y, int iterations) const {
  const int k = m_.size();
  const System sys{m_.variances(), st_, p.tau, p.eta};
  Vector f = sys.residual(x, y);
  double r = max_abs(f);
  int polish = 0;
  for (int step = 0; step < kNewtonSteps; ++step) {
    if (r <= p.tol && ++polish > 2) break;
    const Matrix j = sys.jacobian(x, y);
    const Vector dz = j.colPivHouseholderQr().solve(-f);
    double t = 1.0;
    bool accepted = false;
    for (; t > 1e-10; t *= 0.5) {
      const Vector xn = x + t * dz.head(k), yn = y + t * dz.tail(k);
      const Vector fn = sys.residual(xn, yn);
      const double rn = max_abs(fn);
      if (rn < r) {
        x = xn;
        y = yn;
        f = fn;
        r = rn;
        accepted = true;
        break;
      }
    }
    ++iterations;
    if (!accepted) break;
  }
  if (!(r <= p.tol)) throw NonConvergence("Dyson equation Newton polish", std::expm1(r), iterations);
  return pack(x, y, p, r, iterations);
}

DysonSolution DysonSolver::continuation(const DysonParams& p) const {
  const int k = m_.size();
  Vector x = Vector::Zero(k), y = Vector::Zero(k);
  int iterations = 0;
  for (double eta = 1.0; eta > std::max(p.eta, 1e-14); eta *= 0.1) {
    DysonParams q = p;
    q.eta = eta;
    const DysonSolution s = newton(q, x, y, iterations);
    x = s.v.array().log();
    y = s.w.array().log();
    iterations = s.iterations;
  }
  return newton(p, x, y, iterations);
}

DysonSolution DysonSolver::solve(const DysonParams& p, const DysonSolution* warm) const {
  if (!(p.eta >= 0.0) || !std::isfinite(p.eta)) throw InvalidInput("eta must be nonnegative");
  if (!(p.tau >= 0.0) || !std::isfinite(p.tau)) throw InvalidInput("tau must be nonnegative");
  if (!(p.tol > 0.0) || p.max_iter <= 0 || !(p.damping > 0.0 && p.damping <= 1.0)) {
    throw InvalidInput("invalid solver parameters");
  }
  if (p.eta == 0.0) {
    if (p.tau == 0.0) throw InvalidInput("tau must be positive at eta = 0");
    if (p.tau >= rho_) throw TauOutOfRange(p.tau, rho_);
  }
  const int k = m_.size();
  const System sys{m_.variances(), st_, p.tau, p.eta};

  Vector x, y;
  if (warm && warm->v.size() == k && warm->w.size() == k) {
    x = warm->v.array().log();
    y = warm->w.array().log();
  } else {
    x = Vector::Constant(k, -std::log1p(p.eta));
    y = x;
  }

  double damping = p.damping;
  double r = max_abs(sys.residual(x, y));
  double window_start = r;
  int it = 0;
  for (; it < p.max_iter && r > kNewtonSwitch; ++it) {
    const Vector v = x.array().exp(), w = y.array().exp();
    const Vector a = p.eta + (m_.variances() * w).array();
    const Vector b = p.eta + (st_ * v).array();
    Vector xn = (1.0 - damping) * x.array() - damping * (a.array() + p.tau / b.array()).log();
    Vector yn = (1.0 - damping) * y.array() - damping * (b.array() + p.tau / a.array()).log();
    if (p.eta == 0.0) {
      const double log_alpha =
          0.5 * (std::log(yn.array().exp().mean()) - std::log(xn.array().exp().mean()));
      xn.array() += log_alpha;
      yn.array() -= log_alpha;
    }
    const double rn = max_abs(sys.residual(xn, yn));
    if (!std::isfinite(rn)) break;
    if (rn > r) damping = std::max(0.5 * damping, 0.01);
    x = std::move(xn);
    y = std::move(yn);
    r = rn;
    if ((it + 1) % kStagnationWindow == 0) {
      if (r > 0.99 * window_start) break;
      window_start = r;
    }
  }

  try {
    return newton(p, x, y, it);
  } catch (const NonConvergence&) {
    return continuation(p);
  }
}

std::vector<DysonSolution> DysonSolver::solve_path(const std::vector<double>& taus,
                                                   double tol) const {
  constexpr double kMaxLogStep = 0.5 * 2.302585092994046;  // half a decade
  std::vector<DysonSolution> out;
  out.reserve(taus.size());
  if (taus.empty()) return out;
  DysonParams p;
  p.tol = tol;
  p.tau = std::min(0.5 * rho_, taus.front());
  DysonSolution current = solve(p);
  for (double target : taus) {
    double log_gap = std::log(target / current.tau);
    while (std::abs(log_gap) > kMaxLogStep) {
      p.tau = current.tau * std::exp(std::copysign(kMaxLogStep, log_gap));
      current = solve(p, &current);
      log_gap = std::log(target / current.tau);
    }
    p.tau = target;
    current = solve(p, &current);
    out.push_back(current);
  }
  return out;
}

DysonSolution solve_dyson(const VarianceProfile& m, const DysonParams& p) {
  return DysonSolver(m).solve(p);
}

double vw_symmetry_defect(const VarianceProfile& m, const DysonSolution& s) {
  const Vector lhs = s.v.cwiseProduct(m.variances() * s.w);
  const Vector rhs = s.w.cwiseProduct(m.variances().transpose() * s.v);
  return (lhs - rhs).lpNorm<Eigen::Infinity>();
}

double unit_identity_defect(const VarianceProfile& m, const DysonSolution& s) {
  const Vector b = m.variances().transpose() * s.v;
  const Vector r = 1.0 - s.w.cwiseProduct(b).array() - s.tau * s.v.cwiseQuotient(b).array();
  return r.lpNorm<Eigen::Infinity>();
}

Vector one_minus_vsw(const VarianceProfile& m, const DysonSolution& s) {
  const Vector b = m.variances().transpose() * s.v;
  return s.tau * s.v.cwiseQuotient(b).array();
}

}  // namespace dsbm
