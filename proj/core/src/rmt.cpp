#include "dsbm/rmt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include <lapacke.h>
#include <boost/math/quadrature/gauss.hpp>
#include <json.hpp>

#include "dsbm/block_graph.hpp"
#include "dsbm/density.hpp"
#include "dsbm/dyson.hpp"
#include "dsbm/errors.hpp"
#include "dsbm/random.hpp"

extern "C" void openblas_set_num_threads(int num_threads);

namespace dsbm {

SBMSpec SBMSpec::from_profile(const VarianceProfile& m, int n, std::uint64_t seed) {
  if (!m.probabilities()) throw InvalidInput("simulation needs a probability matrix P");
  if (n <= 0) throw InvalidInput("batch size n must be positive");
  return SBMSpec{m.size(), n, *m.probabilities(), seed};
}

std::string SBMSpec::to_json() const {
  nlohmann::json p = nlohmann::json::array();
  for (int i = 0; i < K; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < K; ++j) row.push_back(P(i, j));
    p.push_back(row);
  }
  return nlohmann::json{{"K", K}, {"n", n}, {"N", N()}, {"P", p}, {"seed", seed}}.dump();
}

Matrix sample_adjacency(const SBMSpec& spec) {
  const int big = spec.N();
  Matrix a(big, big);
  for (int c = 0; c < big; ++c) {
    for (int r = 0; r < big; ++r) {
      const double p = spec.P(r / spec.n, c / spec.n);
      const std::uint64_t counter = static_cast<std::uint64_t>(r) * big + c;
      a(r, c) = counter_uniform(spec.seed, counter) < p ? 1.0 : 0.0;
    }
  }
  return a;
}

SpectralSample spectrum(const Matrix& a, int n) {
  static std::once_flag single_threaded;
  std::call_once(single_threaded, [] { openblas_set_num_threads(1); });

  const int big = static_cast<int>(a.rows());
  if (a.cols() != big) throw InvalidInput("spectrum needs a square matrix");
  if (big > kMaxSpectrumSize) {
    throw TooLarge("matrix size " + std::to_string(big) + " exceeds the dense cap of " +
                   std::to_string(kMaxSpectrumSize));
  }
  if (n <= 0) throw InvalidInput("batch size n must be positive");
  SpectralSample s;
  s.n = n;
  if (big == 0) return s;
  Matrix work = a / std::sqrt(static_cast<double>(n));
  std::vector<double> wr(big), wi(big);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', big, work.data(), big,
                                        wr.data(), wi.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw EigFailure("dgeev failed with info = " + std::to_string(info));
  for (int j = 0; j < big; ++j) {
    if (wi[j] > 0.0) {
      const double scale = std::max(1.0, std::hypot(wr[j], wi[j]));
      if (j + 1 >= big || std::abs(wr[j + 1] - wr[j]) > 1e-8 * scale ||
          std::abs(wi[j + 1] + wi[j]) > 1e-8 * scale) {
        throw EigFailure("eigenvalues are not in conjugate pairs");
      }
    }
    s.eigenvalues.emplace_back(wr[j], wi[j]);
  }
  s.outlier.assign(s.eigenvalues.size(), 0);
  return s;
}

void mark_outliers(SpectralSample& sample, double rho, double margin) {
  const double radius = std::sqrt(rho) * (1.0 + margin);
  sample.outlier.assign(sample.eigenvalues.size(), 0);
  sample.outlier_count = 0;
  for (std::size_t i = 0; i < sample.eigenvalues.size(); ++i) {
    if (std::abs(sample.eigenvalues[i]) > radius) {
      sample.outlier[i] = 1;
      ++sample.outlier_count;
    }
  }
}

std::uint64_t spectrum_digest(const SpectralSample& sample) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& z : sample.eigenvalues) {
    mix(z.real());
    mix(z.imag());
  }
  return h;
}

RadialCDF radial_cdf(const SpectralSample& sample, const std::vector<double>& t_grid) {
  std::vector<double> radii;
  for (std::size_t i = 0; i < sample.eigenvalues.size(); ++i) {
    if (sample.outlier.empty() || !sample.outlier[i]) radii.push_back(std::abs(sample.eigenvalues[i]));
  }
  std::sort(radii.begin(), radii.end());
  RadialCDF cdf{t_grid, {}};
  for (double t : t_grid) {
    const auto count = std::upper_bound(radii.begin(), radii.end(), t) - radii.begin();
    cdf.fraction.push_back(radii.empty() ? 0.0 : static_cast<double>(count) / radii.size());
  }
  return cdf;
}

std::vector<double> theoretical_radial_cdf(const VarianceProfile& m,
                                           const std::vector<double>& t_grid) {
  using Rule = boost::math::quadrature::gauss<double, 64>;
  const double kappa = kappa_of(m).kappa.to_double();
  const double power = std::max(1.0, 1.0 / (2.0 * kappa));
  const DysonSolver solver(m);
  const double edge = std::sqrt(solver.rho());

  // Nodes on [0, 1] by decreasing x, so each solve is warm-started by the previous one.
  std::vector<std::pair<double, double>> nodes;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    nodes.push_back({0.5 * (1.0 + abscissa[i]), 0.5 * weights[i]});
    if (abscissa[i] != 0.0) nodes.push_back({0.5 * (1.0 - abscissa[i]), 0.5 * weights[i]});
  }
  std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<double> out;
  for (double t : t_grid) {
    if (!(t > 0.0)) {
      out.push_back(0.0);
      continue;
    }
    const double top = std::min(t, edge);
    double total = 0.0;
    DysonSolution current;
    bool have = false;
    for (const auto& [x, wt] : nodes) {
      const double r = top * std::pow(x, power);
      DysonParams p;
      p.tau = r * r;
      current = have ? solver.solve(p, &current) : solver.solve_path({p.tau}).back();
      have = true;
      const double sigma = density_from_solution(m, current).sigma;
      const double dr = top * power * std::pow(x, power - 1.0);
      total += wt * 2.0 * std::numbers::pi * r * sigma * dr;
    }
    out.push_back(total);
  }
  return out;
}

std::vector<double> closed_form_radial_cdf(const VarianceProfile& m,
                                           const std::vector<double>& t_grid) {
  const DysonSolver solver(m);
  std::vector<double> out;
  for (double t : t_grid) {
    if (!(t > 0.0)) {
      out.push_back(0.0);
    } else if (t * t >= solver.rho()) {
      out.push_back(1.0);
    } else {
      out.push_back(one_minus_vsw(m, solver.solve_path({t * t}).back()).mean());
    }
  }
  return out;
}

double esd_vs_sigma(const SpectralSample& sample, const VarianceProfile& m,
                    const std::vector<double>& t_grid) {
  if (m.variances().maxCoeff() == 0.0) throw ZeroVariance("variance profile is identically zero");
  SpectralSample trimmed = sample;
  mark_outliers(trimmed, DysonSolver(m).rho());
  const RadialCDF empirical = radial_cdf(trimmed, t_grid);
  const std::vector<double> theory = theoretical_radial_cdf(m, t_grid);
  double sup = 0.0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    sup = std::max(sup, std::abs(empirical.fraction[i] - theory[i]));
  }
  return sup;
}

double cdf_loglog_slope(const RadialCDF& cdf, double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < cdf.t.size(); ++i) {
    if (cdf.t[i] < lo * (1 - 1e-12) || cdf.t[i] > hi * (1 + 1e-12) || !(cdf.fraction[i] > 0.0)) continue;
    const double x = std::log(cdf.t[i]), y = std::log(cdf.fraction[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 2) throw InvalidInput("slope window holds fewer than two populated points");
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

std::vector<TrialResult> run_trials(const VarianceProfile& m, int n,
                                    const std::vector<std::uint64_t>& seeds,
                                    const std::vector<double>& t_grid, unsigned threads) {
  if (m.variances().maxCoeff() == 0.0) throw ZeroVariance("variance profile is identically zero");
  if (static_cast<long>(n) * m.size() > kMaxSpectrumSize) {
    throw TooLarge("nK = " + std::to_string(static_cast<long>(n) * m.size()) +
                   " exceeds the dense cap of " + std::to_string(kMaxSpectrumSize));
  }
  const double rho = DysonSolver(m).rho();
  const std::vector<double> theory = theoretical_radial_cdf(m, t_grid);
  const double lo = 5.0 / std::sqrt(static_cast<double>(n)), hi = 0.3;
  std::vector<double> window;
  for (int i = 0; i < 10; ++i) window.push_back(lo + (hi - lo) * i / 9.0);

  std::vector<TrialResult> results(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        TrialResult& r = results[i];
        r.seed = seeds[i];
        const SBMSpec spec = SBMSpec::from_profile(m, n, seeds[i]);
        r.sample = spectrum(sample_adjacency(spec), n);
        r.sample.K = spec.K;
        r.sample.seed = spec.seed;
        mark_outliers(r.sample, rho);
        r.digest = spectrum_digest(r.sample);
        r.cdf = radial_cdf(r.sample, t_grid);
        r.theoretical = theory;
        for (std::size_t j = 0; j < t_grid.size(); ++j) {
          r.sup_distance = std::max(r.sup_distance, std::abs(r.cdf.fraction[j] - theory[j]));
        }
        // The window is empty when 5/sqrt(n) > 0.3 (n < 278).
        r.slope = lo < hi ? cdf_loglog_slope(radial_cdf(r.sample, window), lo, hi)
                          : std::numeric_limits<double>::quiet_NaN();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<std::size_t>(1, seeds.size()));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace dsbm
