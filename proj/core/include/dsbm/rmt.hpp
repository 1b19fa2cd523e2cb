#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "dsbm/profile.hpp"

namespace dsbm {

constexpr int kMaxSpectrumSize = 4000;

struct SBMSpec {
  int K = 0;
  int n = 0;  // batch size, N = nK
  Matrix P;   // K x K connection probabilities
  std::uint64_t seed = 0;

  int N() const noexcept { return n * K; }
  // Throws InvalidInput unless the profile carries probabilities.
  static SBMSpec from_profile(const VarianceProfile& m, int n, std::uint64_t seed);
  std::string to_json() const;
};

// Entry (i*n + alpha, j*n + beta) is Bernoulli(p_ij), drawn from the counter
// stream at index row * N + col.
Matrix sample_adjacency(const SBMSpec& spec);

struct SpectralSample {
  std::vector<std::complex<double>> eigenvalues;  // of A / sqrt(n)
  std::vector<char> outlier;                       // filled by mark_outliers
  int outlier_count = 0;
  int n = 0;
  int K = 0;
  std::uint64_t seed = 0;
};

// All eigenvalues of a / sqrt(n) (LAPACK dgeev), conjugate pairing checked.
// Throws TooLarge above kMaxSpectrumSize, EigFailure.
SpectralSample spectrum(const Matrix& a, int n);

// Flags |lambda| > sqrt(rho) (1 + margin).
void mark_outliers(SpectralSample& sample, double rho, double margin = 0.1);

// FNV-1a over the eigenvalue bit patterns.
std::uint64_t spectrum_digest(const SpectralSample& sample);

struct RadialCDF {
  std::vector<double> t;
  std::vector<double> fraction;  // of non-outlier eigenvalues with |lambda| <= t
};

RadialCDF radial_cdf(const SpectralSample& sample, const std::vector<double>& t_grid);

// int_{|z| <= t} sigma, integrating 2 pi r sigma(r) after r = t x^m, m = max(1, 1/(2 kappa)),
// with 64-point Gauss-Legendre; t is clipped to the bulk radius sqrt(rho).
std::vector<double> theoretical_radial_cdf(const VarianceProfile& m,
                                           const std::vector<double>& t_grid);

// Same mass from <1 - v Sw> at tau = t^2 (no quadrature).
std::vector<double> closed_form_radial_cdf(const VarianceProfile& m,
                                           const std::vector<double>& t_grid);

// sup over t_grid of |empirical - theoretical|. Throws ZeroVariance when S == 0.
double esd_vs_sigma(const SpectralSample& sample, const VarianceProfile& m,
                    const std::vector<double>& t_grid);

// Least-squares slope of log CDF against log t over the grid points in [lo, hi]
// with positive mass.
double cdf_loglog_slope(const RadialCDF& cdf, double lo, double hi);

struct TrialResult {
  std::uint64_t seed = 0;
  SpectralSample sample;
  RadialCDF cdf;
  std::vector<double> theoretical;
  double sup_distance = 0.0;
  double slope = 0.0;  // over [5/sqrt(n), 0.3]; NaN when that window is empty
  std::uint64_t digest = 0;
};

// Independent trials keyed by seed, evaluated concurrently, returned in seed order.
std::vector<TrialResult> run_trials(const VarianceProfile& m, int n,
                                    const std::vector<std::uint64_t>& seeds,
                                    const std::vector<double>& t_grid, unsigned threads = 0);

}  // namespace dsbm
