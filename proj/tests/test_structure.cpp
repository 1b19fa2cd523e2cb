#include <random>

#include <gtest/gtest.h>

#include "dsbm/acceptance.hpp"
#include "dsbm/errors.hpp"
#include "dsbm/structure.hpp"

using namespace dsbm;
namespace acc = dsbm::acceptance;

namespace {

VarianceProfile from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix s(rows.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j) s(i, j) = rows[i][j];
  return VarianceProfile::from_variances(s);
}

const VarianceProfile kExample1 = from_rows({{0, 1, 1, 0}, {0, 0, 1, 1}, {1, 0, 0, 1}, {1, 0, 0, 0}});

}  // namespace

TEST(Permutation, ComposeInverseAndMatrix) {
  const Permutation p({2, 0, 1});
  const Permutation q({1, 2, 0});
  EXPECT_EQ(p.compose(p.inverse()), Permutation::identity(3));
  EXPECT_EQ(p.compose(q)[0], p[q[0]]);
  const Matrix pm = p.to_matrix();
  Vector x(3);
  x << 10, 20, 30;
  const Vector px = pm * x;
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(px(i), x(p[i]));
  EXPECT_THROW(Permutation({0, 0, 1}), InvalidInput);
}

TEST(Structure, SupportAgreesWithPermutationEnumeration) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 1 + trial % 7;
    const auto m = acc::random_profile(rng, k, 0.15 + 0.1 * (trial % 6));
    const ZeroPattern z = zero_pattern(m);
    const SupportWitness w = has_support(z);
    EXPECT_TRUE(acc::valid_witness(z, w)) << "trial " << trial;
    EXPECT_EQ(std::holds_alternative<PositiveDiagonal>(w), acc::oracle_has_support(z))
        << "trial " << trial;
  }
}

TEST(Structure, IrreducibilityAndIndecomposabilityAgreeWithOracles) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 1 + trial % 7;
    const auto m = acc::random_profile(rng, k, 0.2 + 0.1 * (trial % 5));
    const ZeroPattern z = zero_pattern(m);
    EXPECT_EQ(is_irreducible(z), acc::oracle_irreducible(z)) << "trial " << trial;
    EXPECT_EQ(is_fully_indecomposable(z), acc::oracle_fully_indecomposable(z))
        << "trial " << trial;
  }
}

TEST(Structure, PrimitivityOfCycleAndCompleteGraph) {
  EXPECT_FALSE(is_primitive(ZeroPattern::from_rows({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}})));
  EXPECT_TRUE(is_primitive(ZeroPattern::from_rows({{1, 1, 0}, {0, 0, 1}, {1, 0, 0}})));
  EXPECT_FALSE(is_primitive(ZeroPattern::from_rows({{1, 0}, {0, 1}})));
}

TEST(Structure, NoSupportCarriesKoenigBlock) {
  const auto m = from_rows({{1, 1, 0}, {0, 0, 1}, {0, 0, 1}});
  try {
    normal_form(m);
    FAIL() << "expected NoSupport";
  } catch (const NoSupport& e) {
    EXPECT_EQ(e.rows().size() + e.cols().size(), 4u);
    for (int r : e.rows())
      for (int c : e.cols()) EXPECT_EQ(m(r, c), 0.0);
  }
}

TEST(Structure, NormalFormIsBlockTriangularWithIndecomposableBlocks) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 7;
    const auto m = acc::random_admissible_profile(rng, k);
    const NormalForm nf = normal_form(m);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        EXPECT_EQ(nf.s_tilde(a, b), m(nf.q1[a], nf.q2[b]));
        if (nf.block_of[a] > nf.block_of[b]) {
          EXPECT_EQ(nf.s_tilde(a, b), 0.0);
        }
      }
    for (int a = 0; a < k; ++a) EXPECT_GT(nf.s_tilde(a, a), 0.0);
    int total = 0;
    for (int l = 0; l < nf.blocks(); ++l) {
      EXPECT_TRUE(acc::oracle_fully_indecomposable(zero_pattern(nf.block(l, l))));
      total += nf.block_sizes[l];
    }
    EXPECT_EQ(total, k);
  }
}

TEST(Structure, ExampleNormalFormHasFourSingletonBlocks) {
  const NormalForm nf = normal_form(kExample1);
  EXPECT_EQ(nf.blocks(), 4);
  // Q1 S Q2^t equals the product of the permutation matrices with S.
  const Matrix st = nf.q1.to_matrix() * kExample1.variances() * nf.q2.to_matrix().transpose();
  EXPECT_EQ(st, nf.s_tilde);
}

TEST(Structure, SpectralRadiusMatchesEigenSolver) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = acc::random_admissible_profile(rng, 2 + trial % 6);
    const PerronPair pp = spectral_radius(m);
    Eigen::EigenSolver<Matrix> es(m.variances());
    const double oracle = es.eigenvalues().cwiseAbs().maxCoeff();
    EXPECT_NEAR(pp.rho, oracle, 1e-10 * oracle);
    const Vector residual = m.variances().transpose() * pp.eigenvector - pp.rho * pp.eigenvector;
    EXPECT_LT(residual.norm(), 1e-9);
    EXPECT_GT(pp.eigenvector.minCoeff(), 0.0);
    EXPECT_NEAR(pp.eigenvector.sum(), 1.0, 1e-12);
  }
  EXPECT_THROW(spectral_radius(from_rows({{1, 1}, {0, 1}})), NotIrreducible);
}

TEST(Structure, StrongComponents) {
  int count = 0;
  const auto comp =
      strong_components(ZeroPattern::from_rows({{0, 1, 0, 0}, {1, 0, 1, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}), &count);
  EXPECT_EQ(count, 2);
  EXPECT_EQ(comp[0], comp[1]);
  EXPECT_EQ(comp[2], comp[3]);
  EXPECT_NE(comp[0], comp[2]);
  // {2,3} is a sink of the condensation, reported first.
  EXPECT_EQ(comp[2], 0);
}
