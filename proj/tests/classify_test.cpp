#include "secstore/classify.hpp"

#include <gtest/gtest.h>

#include "support.hpp"

namespace secstore {
namespace {

using namespace testsupport;

ClassificationResult classify_graph(const StorageGraph& g) { return classify(g, analyze(g)); }

TEST(Classify, PathConflictIsSubExtremalWithWitness) {
  StorageGraph g = path_conflict_graph();
  ClassificationResult cls = classify_graph(g);
  EXPECT_EQ(cls.regime, Regime::SubExtremal);
  EXPECT_EQ(cls.capacity.str(), "unknown");
  ASSERT_EQ(cls.internal_witnesses.size(), 1u);
  EXPECT_EQ(cls.internal_witnesses[0].first, 1);
  EXPECT_EQ(edge_ref(g, cls.internal_witnesses[0].second), (EdgeRef{"V1", "V3"}));
}

TEST(Classify, DegenerateBridgeIsExtremal) {
  // The connecting path carries one demand set throughout, so its interior
  // nodes are degenerate and force no alignment: rate 1 is achievable, and
  // the whole-graph internal edge is not a witness against it.
  ClassificationResult cls = classify_graph(degenerate_bridge_graph());
  EXPECT_EQ(cls.regime, Regime::ExtremalOneOverM);
  EXPECT_EQ(cls.capacity.str(), "1");
}

TEST(Classify, AllDegenerateGraphIsKeyless) {
  ClassificationResult cls = classify_graph(all_degenerate_graph());
  EXPECT_EQ(cls.regime, Regime::Keyless);
  EXPECT_EQ(cls.capacity.str(), "unbounded");
}

TEST(Classify, CycleIsExtremalWithCapacityOne) {
  ClassificationResult cls = classify_graph(cycle4_graph());
  EXPECT_EQ(cls.regime, Regime::ExtremalOneOverM);
  EXPECT_EQ(cls.capacity.kind, ClaimedCapacity::Exact);
  EXPECT_EQ(cls.capacity.value, Rational(1, 1));
}

TEST(Classify, TwinPairsIsExtremalHalf) {
  ClassificationResult cls = classify_graph(twin_pairs_graph());
  EXPECT_EQ(cls.regime, Regime::ExtremalOneOverM);
  EXPECT_EQ(cls.capacity.str(), "1/2");
}

TEST(Classify, KeylessOverlapInstance) {
  EXPECT_EQ(classify_graph(keyless_overlap_graph()).regime, Regime::Keyless);
}

TEST(Classify, UncharacterizedWithWitnesses) {
  StorageGraph g = make_graph(
      3, 2, {{"X", "A", {1, 2}}, {"X", "B", {2, 3}}, {"A", "Y", {2, 3}}, {"B", "Z", {2, 3}}});
  ClassificationResult cls = classify_graph(g);
  EXPECT_EQ(cls.regime, Regime::Uncharacterized);
  EXPECT_EQ(cls.capacity.str(), "unknown");
  ASSERT_EQ(cls.nonempty_common_nodes.size(), 2u);
  EXPECT_EQ(g.nodes[cls.nonempty_common_nodes[0]], "X");
  EXPECT_EQ(g.nodes[cls.nonempty_common_nodes[1]], "A");
  ASSERT_FALSE(cls.union_violations.empty());
  EXPECT_EQ(edge_ref(g, cls.union_violations[0]), (EdgeRef{"X", "A"}));
}

TEST(Classify, KeylessWinsOverExtremalCondition) {
  // Both the keyless union condition and the rate-1 structural condition
  // hold here; the keyless guarantee (no key at all) is the stronger claim.
  StorageGraph g = make_graph(
      2, 1, {{"A", "B", {1}}, {"B", "C", {1}}, {"A", "D", {2}}, {"D", "E", {2}}});
  EXPECT_TRUE(rate_one_condition(g));
  EXPECT_TRUE(keyless_condition(g));
  EXPECT_EQ(classify_graph(g).regime, Regime::Keyless);
}

TEST(Classify, MatchesIndependentRateOneCondition) {
  // For M = 1 the regime must coincide with the independently reimplemented
  // structural condition, keyless precedence aside.
  SplitMix64 rng(55);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    StorageGraph g = random_valid_graph(rng);
    if (g.M != 1) continue;
    ++checked;
    bool extremal = classify_graph(g).regime == Regime::ExtremalOneOverM;
    EXPECT_EQ(extremal, rate_one_condition(g) && !keyless_condition(g)) << emit_graph(g);
  }
  for (uint64_t seed = 0; checked < 140 && seed < 400; ++seed) {
    auto g = random_extremal_graph(seed, 1, 10, 4);
    if (!g) continue;
    ++checked;
    EXPECT_TRUE(rate_one_condition(*g) && !keyless_condition(*g)) << emit_graph(*g);
  }
  EXPECT_GE(checked, 140);
}

TEST(Classify, KeylessRegimeMatchesUnionConditionOracle) {
  SplitMix64 rng(56);
  for (int trial = 0; trial < 300; ++trial) {
    StorageGraph g = random_valid_graph(rng);
    EXPECT_EQ(classify_graph(g).regime == Regime::Keyless, keyless_condition(g))
        << emit_graph(g);
  }
}

TEST(Classify, RegimeInvariantUnderRelabeling) {
  SplitMix64 rng(57);
  for (int trial = 0; trial < 80; ++trial) {
    StorageGraph g = random_valid_graph(rng);
    StorageGraph h = relabel(g, rng);
    EXPECT_EQ(classify_graph(g).regime, classify_graph(h).regime);
  }
}

TEST(Classify, SubExtremalAlwaysCarriesWitnesses) {
  SplitMix64 rng(58);
  for (int trial = 0; trial < 200; ++trial) {
    StorageGraph g = random_valid_graph(rng);
    ClassificationResult cls = classify_graph(g);
    if (cls.regime == Regime::SubExtremal) EXPECT_FALSE(cls.internal_witnesses.empty());
    if (cls.regime == Regime::ExtremalOneOverM && g.M == 1)
      EXPECT_EQ(cls.capacity.value, Rational(1, 1));
  }
}

TEST(Classify, RejectsMismatchedAnalysis) {
  StorageGraph g = cycle4_graph();
  StorageGraph other = make_graph(1, 1, {{"A", "B", {1}}});
  EXPECT_THROW(classify(g, analyze(other)), PreconditionError);
}

}  // namespace
}  // namespace secstore
