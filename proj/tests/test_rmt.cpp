#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dsbm/errors.hpp"
#include "dsbm/random.hpp"
#include "dsbm/rmt.hpp"

using namespace dsbm;

namespace {

SBMSpec spec_with(const Matrix& p, int n, std::uint64_t seed) {
  return SBMSpec{static_cast<int>(p.rows()), n, p, seed};
}

VarianceProfile example1_sbm() {
  Matrix p(4, 4);
  p << 0, 0.5, 0.5, 0, 0, 0, 0.5, 0.5, 0.5, 0, 0, 0.5, 0.5, 0, 0, 0;
  return VarianceProfile::from_probabilities(p);
}

}  // namespace

TEST(Random, CounterStreamIsDeterministicAndUniform) {
  EXPECT_EQ(counter_bits(5, 17), counter_bits(5, 17));
  EXPECT_NE(counter_bits(5, 17), counter_bits(6, 17));
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = counter_uniform(3, i);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Sampling, DegenerateProbabilities) {
  EXPECT_EQ(sample_adjacency(spec_with(Matrix::Ones(2, 2), 5, 1)), Matrix::Ones(10, 10));
  EXPECT_EQ(sample_adjacency(spec_with(Matrix::Zero(3, 3), 4, 1)), Matrix::Zero(12, 12));
}

TEST(Sampling, BlockCountsWithinBinomialBands) {
  Matrix p(2, 2);
  p << 0.1, 0.5, 0.9, 0.3;
  const int n = 150;
  const Matrix a = sample_adjacency(spec_with(p, n, 42));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double count = a.block(i * n, j * n, n, n).sum();
      const double trials = static_cast<double>(n) * n;
      const double mean = trials * p(i, j);
      const double sd = std::sqrt(trials * p(i, j) * (1 - p(i, j)));
      EXPECT_NEAR(count, mean, 5.0 * sd) << i << "," << j;
    }
}

TEST(Sampling, SameSeedSameMatrix) {
  Matrix p = Matrix::Constant(2, 2, 0.4);
  EXPECT_EQ(sample_adjacency(spec_with(p, 20, 9)), sample_adjacency(spec_with(p, 20, 9)));
  EXPECT_NE(sample_adjacency(spec_with(p, 20, 9)), sample_adjacency(spec_with(p, 20, 10)));
}

TEST(Sampling, SpecNeedsProbabilities) {
  const auto s = VarianceProfile::from_variances(Matrix::Ones(2, 2));
  EXPECT_THROW(SBMSpec::from_profile(s, 10, 1), InvalidInput);
  const SBMSpec spec = SBMSpec::from_profile(example1_sbm(), 10, 3);
  EXPECT_EQ(spec.N(), 40);
}

TEST(Spectrum, EigenvaluesComeInConjugatePairsAndMatchTrace) {
  const Matrix a = sample_adjacency(SBMSpec::from_profile(example1_sbm(), 50, 4));
  const SpectralSample s = spectrum(a, 50);
  ASSERT_EQ(s.eigenvalues.size(), 200u);
  std::complex<double> sum = 0.0;
  for (const auto& l : s.eigenvalues) sum += l;
  EXPECT_NEAR(sum.real(), a.trace() / std::sqrt(50.0), 1e-8);
  EXPECT_NEAR(sum.imag(), 0.0, 1e-8);
  for (const auto& l : s.eigenvalues) {
    if (l.imag() == 0.0) continue;
    bool paired = false;
    for (const auto& m : s.eigenvalues) paired |= std::abs(m - std::conj(l)) < 1e-8;
    EXPECT_TRUE(paired);
  }
}

TEST(Spectrum, DigestIsReproducible) {
  const auto m = example1_sbm();
  const SpectralSample a = spectrum(sample_adjacency(SBMSpec::from_profile(m, 60, 8)), 60);
  const SpectralSample b = spectrum(sample_adjacency(SBMSpec::from_profile(m, 60, 8)), 60);
  const SpectralSample c = spectrum(sample_adjacency(SBMSpec::from_profile(m, 60, 9)), 60);
  EXPECT_EQ(spectrum_digest(a), spectrum_digest(b));
  EXPECT_NE(spectrum_digest(a), spectrum_digest(c));
}

TEST(Spectrum, OutlierMarking) {
  SpectralSample s;
  s.eigenvalues = {{0.5, 0}, {1.05, 0}, {0, 1.2}, {3, 0}};
  mark_outliers(s, 1.0);
  EXPECT_EQ(s.outlier_count, 2);
  EXPECT_EQ(s.outlier, (std::vector<char>{0, 0, 1, 1}));
}

TEST(RadialCdf, SyntheticDiskIsQuadratic) {
  // Eigenvalues at radii sqrt(u) for a uniform u grid fill the unit disk uniformly.
  SpectralSample s;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double r = std::sqrt((i + 0.5) / n);
    s.eigenvalues.push_back(std::polar(r, 2.399963 * i));
  }
  mark_outliers(s, 1.0);
  const std::vector<double> t{0.1, 0.3, 0.5, 0.8, 1.0};
  const RadialCDF cdf = radial_cdf(s, t);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(cdf.fraction[i], t[i] * t[i], 1e-3);
  EXPECT_NEAR(cdf_loglog_slope(cdf, 0.1, 0.8), 2.0, 1e-2);
  EXPECT_THROW(cdf_loglog_slope(cdf, 0.2, 0.25), InvalidInput);
}

TEST(RadialCdf, TheoreticalMatchesClosedForm) {
  const auto single = VarianceProfile::from_variances(Matrix::Ones(1, 1));
  const std::vector<double> t{0.1, 0.5, 0.9, 1.5};
  const auto th = theoretical_radial_cdf(single, t);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(th[i], std::min(1.0, t[i] * t[i]), 1e-10);

  const auto m = example1_sbm();
  const std::vector<double> grid{0.02, 0.1, 0.3, 0.6};
  const auto a = theoretical_radial_cdf(m, grid);
  const auto b = closed_form_radial_cdf(m, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-6) << grid[i];
}

TEST(RadialCdf, ZeroProfileHasNoDensity) {
  SpectralSample s;
  s.eigenvalues = {{0, 0}};
  mark_outliers(s, 1.0);
  EXPECT_THROW(esd_vs_sigma(s, VarianceProfile::from_variances(Matrix::Zero(2, 2)), {0.5}), ZeroVariance);
}

TEST(Trials, CircularLawForHomogeneousModel) {
  const auto m = VarianceProfile::from_probabilities(Matrix::Constant(1, 1, 0.5));
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(0.5 * i / 20.0);
  const auto trials = run_trials(m, 600, {1, 2}, grid, 1);
  ASSERT_EQ(trials.size(), 2u);
  for (const TrialResult& r : trials) {
    EXPECT_LT(r.sup_distance, 0.05);
    EXPECT_LE(r.sample.outlier_count, 2);
    EXPECT_NEAR(r.slope, 2.0, 0.3);
    EXPECT_EQ(r.digest, spectrum_digest(r.sample));
  }
  EXPECT_EQ(trials[0].seed, 1u);
}

TEST(Trials, SmallBatchHasUndefinedSlope) {
  const auto trials = run_trials(example1_sbm(), 100, {3}, {0.1, 0.5}, 1);
  EXPECT_TRUE(std::isnan(trials[0].slope));
}

TEST(Trials, RejectsOversizedModels) {
  EXPECT_THROW(run_trials(example1_sbm(), 1001, {1}, {0.5}, 1), TooLarge);
}
