#include <filesystem>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dsbm/acceptance.hpp"
#include "dsbm/block_graph.hpp"
#include "dsbm/errors.hpp"

using namespace dsbm;
namespace acc = dsbm::acceptance;

namespace {

// Random labelled digraph on L blocks; self-loops only carry PREC, as in
// graphs built from a normal form.
BlockRelationGraph random_graph(std::mt19937_64& rng, int L, double density) {
  std::bernoulli_distribution present(density);
  std::uniform_int_distribution<int> kind(0, 2);
  BlockRelationGraph g;
  g.L = L;
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < L; ++k) {
      if (!present(rng)) continue;
      Edge e{l, k, false, false};
      if (l == k) {
        e.prec = true;
      } else {
        const int t = kind(rng);
        e.lhd = t != 1;
        e.prec = t != 0;
      }
      g.edges.push_back(e);
    }
  return g;
}

void expect_valid_witness(const BlockRelationGraph& g, const KappaResult& r) {
  ASSERT_FALSE(r.witness.empty());
  EXPECT_EQ(static_cast<int>(r.witness.size()), r.length);
  int prec = 0;
  for (std::size_t i = 0; i < r.witness.size(); ++i) {
    const WitnessStep& s = r.witness[i];
    EXPECT_EQ(s.to, r.witness[(i + 1) % r.witness.size()].from);
    const Edge* e = g.find(s.from, s.to);
    ASSERT_NE(e, nullptr);
    EXPECT_TRUE(e->has(s.label));
    prec += traversal_cost(*e, s.label);
  }
  EXPECT_EQ(prec, r.prec_count);
  EXPECT_EQ(Rational(prec, r.length), r.kappa);
}

}  // namespace

TEST(BlockGraph, KarpAgreesWithExhaustiveSearch) {
  std::mt19937_64 rng(21);
  int checked = 0;
  while (checked < 200) {
    const int L = 1 + static_cast<int>(rng() % 8);
    const BlockRelationGraph g = random_graph(rng, L, 0.25 + 0.05 * (checked % 8));
    if (!check_strong_connectivity(g) || g.edges.empty()) continue;
    const KappaResult r = min_cycle_mean(g);
    EXPECT_EQ(r.kappa, brute_force_kappa(g)) << "graph " << checked;
    expect_valid_witness(g, r);
    ++checked;
  }
}

TEST(BlockGraph, TraversalCost) {
  const Edge both{0, 1, true, true};
  const Edge prec_only{0, 1, false, true};
  EXPECT_EQ(traversal_cost(both, Label::LHD), 0);
  EXPECT_EQ(traversal_cost(both, Label::PREC), 1);
  EXPECT_THROW(traversal_cost(prec_only, Label::LHD), LabelNotPresent);
  EXPECT_STREQ(label_name(Label::PREC), "PREC");
}

TEST(BlockGraph, RejectsDisconnectedAndOversizedGraphs) {
  BlockRelationGraph g;
  g.L = 2;
  g.edges = {{0, 1, true, false}};
  EXPECT_FALSE(check_strong_connectivity(g));
  EXPECT_THROW(min_cycle_mean(g), NotStronglyConnected);

  BlockRelationGraph big;
  big.L = 11;
  for (int l = 0; l < 11; ++l) big.edges.push_back({l, (l + 1) % 11, false, true});
  EXPECT_THROW(brute_force_kappa(big), TooLarge);
  EXPECT_EQ(min_cycle_mean(big).kappa, Rational(1));
}

TEST(BlockGraph, PureLhdCycleIsNotEnoughWithoutPrec) {
  // Cycle 0 -> 1 -> 2 -> 0 where one edge is PREC only: kappa = 1/3.
  BlockRelationGraph g;
  g.L = 3;
  g.edges = {{0, 1, true, false}, {1, 2, true, false}, {2, 0, false, true}};
  const KappaResult r = min_cycle_mean(g);
  EXPECT_EQ(r.kappa, Rational(1, 3));
  EXPECT_EQ(r.length, 3);
}

class GoldenFixtures : public ::testing::TestWithParam<const char*> {};

TEST_P(GoldenFixtures, KappaMatchesExpectation) {
  const acc::Fixture f =
      acc::load_fixture(std::filesystem::path(DSBM_FIXTURE_DIR) / (std::string(GetParam()) + ".json"));
  const KappaResult r = kappa_of(f.profile);
  EXPECT_EQ(r.kappa, f.kappa);
  EXPECT_EQ(r.c_ns, f.c_ns);
  EXPECT_EQ(r.c_ns, Rational(2) * r.kappa);
  const NormalForm nf = normal_form(f.profile);
  EXPECT_EQ(nf.blocks(), f.blocks);
  const BlockRelationGraph g = build_block_graph(nf);
  EXPECT_EQ(brute_force_kappa(g), r.kappa);
  expect_valid_witness(g, r);
}

INSTANTIATE_TEST_SUITE_P(Fixtures, GoldenFixtures,
                         ::testing::Values("example1", "example2", "example3", "single_block",
                                           "example1_sbm"));

TEST(BlockGraph, Example2GraphEdges) {
  const auto f = acc::load_fixture(std::filesystem::path(DSBM_FIXTURE_DIR) / "example2.json");
  const NormalForm nf = normal_form(f.profile);
  const BlockRelationGraph g = build_block_graph(nf);
  for (const Edge& e : g.edges) {
    EXPECT_TRUE(e.lhd || e.prec);
    if (e.from == e.to) {
      EXPECT_FALSE(e.lhd);
    }
    // LHD edges only point down the block-triangular order.
    if (e.lhd) {
      EXPECT_LT(e.from, e.to);
    }
  }
}

TEST(BlockGraph, KappaJsonIsOneBased) {
  const auto f = acc::load_fixture(std::filesystem::path(DSBM_FIXTURE_DIR) / "example1.json");
  const auto j = nlohmann::json::parse(kappa_to_json(kappa_of(f.profile)));
  EXPECT_EQ(j["kappa"], "1/2");
  EXPECT_EQ(j["c_ns"], "1/1");
  for (const auto& step : j["witness"]) {
    EXPECT_GE(step[0].get<int>(), 1);
    EXPECT_LE(step[1].get<int>(), 4);
  }
}

TEST(BlockGraph, KappaOfRejectsInadmissibleProfiles) {
  Matrix reducible(2, 2);
  reducible << 1, 1, 0, 1;
  EXPECT_THROW(kappa_of(VarianceProfile::from_variances(reducible)), NotIrreducible);
  Matrix empty_col(2, 2);
  empty_col << 1, 0, 1, 0;
  EXPECT_THROW(kappa_of(VarianceProfile::from_variances(empty_col)), NoSupport);
}

TEST(BlockGraph, AcyclicSingleBlockIsRejected) {
  BlockRelationGraph g;
  g.L = 1;
  EXPECT_THROW(min_cycle_mean(g), NotStronglyConnected);
  EXPECT_THROW(brute_force_kappa(g), NotStronglyConnected);
}
