#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "tpoly/instances.hpp"
#include "tpoly/oracle.hpp"
#include "tpoly/walk.hpp"

using namespace tpoly;
using namespace tpoly::testing;

namespace {

struct WalkFixture : ::testing::Test {
  TransportationInstance inst = example_walk();
  FlowedTree origin = flows_on_tree(inst, walk_origin());
  FlowedTree final_tree = flows_on_tree(inst, walk_final());
  EdgeLabeling labeling = label_edges(inst, final_tree, 1);

  WalkState state(const FlowedTree& current, EdgeSet shaded, int sigma = 1) const {
    return WalkState{current, std::move(shaded), labeling, sigma, inst.supply_count(), inst.demand_count()};
  }
};

}  // namespace

TEST_F(WalkFixture, LabelsAlternateFromStarDemand) {
  EXPECT_EQ(labeling.at({2, 1}), Sign::Plus);
  EXPECT_EQ(labeling.at({2, 2}), Sign::Minus);
  EXPECT_EQ(labeling.at({1, 2}), Sign::Plus);
  EXPECT_EQ(labeling.at({1, 3}), Sign::Minus);

  // Every supply node has exactly one + edge: the one towards the star demand.
  for (int star = 1; star <= inst.demand_count(); ++star) {
    const auto l = label_edges(inst, final_tree, star);
    for (int i = 1; i <= inst.supply_count(); ++i) {
      int plus = 0;
      for (const auto& [e, s] : l.label) plus += (e.supply == i && s == Sign::Plus);
      EXPECT_EQ(plus, 1) << "star " << star << " supply " << i;
    }
  }
}

TEST_F(WalkFixture, GoldenSequence) {
  const auto trace = hirsch_walk(inst, origin, final_tree, WalkOptions{1, 1, true});
  ASSERT_EQ(trace.iterations.size(), 4u);
  EXPECT_EQ(trace.pivot_count, 3);

  const auto& it = trace.iterations;
  EXPECT_EQ(it[0].action, WalkAction::InsertAndShade);
  EXPECT_EQ(it[0].edge, (Edge{1, 3}));
  EXPECT_EQ(it[0].sign, Sign::Minus);
  EXPECT_EQ(it[0].leaving, (Edge{1, 2}));
  EXPECT_EQ(it[0].delta_prime, 2);
  EXPECT_EQ(it[0].next_sigma, 2);
  EXPECT_EQ(it[0].tree.flow, (std::map<Edge, Flow>{{{1, 1}, 2}, {{1, 3}, 1}, {{2, 2}, 2}, {{2, 3}, 1}}));

  EXPECT_EQ(it[1].action, WalkAction::ShadeOnly);
  EXPECT_EQ(it[1].sigma, 2);
  EXPECT_EQ(it[1].edge, (Edge{2, 2}));
  EXPECT_FALSE(it[1].leaving.has_value());
  EXPECT_EQ(it[1].delta_prime, 2);
  EXPECT_EQ(it[1].next_sigma, 2);

  EXPECT_EQ(it[2].action, WalkAction::InsertAndShade);
  EXPECT_EQ(it[2].edge, (Edge{2, 1}));
  EXPECT_EQ(it[2].sign, Sign::Plus);
  EXPECT_EQ(it[2].leaving, (Edge{2, 3}));
  EXPECT_EQ(it[2].delta_prime, 3);
  EXPECT_EQ(it[2].next_sigma, 1);

  EXPECT_EQ(it[3].action, WalkAction::InsertAndShade);
  EXPECT_EQ(it[3].sigma, 1);
  EXPECT_EQ(it[3].edge, (Edge{1, 2}));
  EXPECT_EQ(it[3].leaving, (Edge{1, 1}));
  EXPECT_EQ(it[3].delta_prime, 1);
  EXPECT_FALSE(it[3].next_sigma.has_value());
  EXPECT_EQ(it[3].tree, final_tree);

  for (const auto& step : it) {
    ASSERT_TRUE(step.diagnostics.has_value());
    EXPECT_TRUE(step.diagnostics->sin_before);
    EXPECT_TRUE(step.diagnostics->no_open_plus);
    EXPECT_TRUE(step.diagnostics->no_all_plus_demand);
  }
  EXPECT_EQ(it[0].diagnostics->uno_after, UnoResult::Holds);
  EXPECT_EQ(it[3].diagnostics->uno_after, UnoResult::Terminal);

  const auto seq = trace.vertex_sequence();
  ASSERT_EQ(seq.size(), 4u);
  EXPECT_EQ(seq.front(), origin);
  EXPECT_EQ(seq.back(), final_tree);
}

TEST_F(WalkFixture, OracleDistanceAndBound) {
  const auto g = build_skeleton(enumerate_vertices(inst));
  EXPECT_EQ(distance(g, origin, final_tree), 3);
  EXPECT_EQ(critical_pairs(inst).size(), 0u);
  EXPECT_EQ(inst.tree_size() - static_cast<int>(critical_pairs(inst).size()), 4);
}

TEST_F(WalkFixture, SameEndpointsNeedNoPivots) {
  for (int star = 1; star <= 3; ++star) {
    const auto trace = hirsch_walk(inst, origin, origin, WalkOptions{star, 1, true});
    EXPECT_EQ(trace.pivot_count, 0);
    for (const auto& it : trace.iterations) EXPECT_EQ(it.action, WalkAction::ShadeOnly);
  }
}

TEST_F(WalkFixture, ExhaustiveMinimumIsOracleDistance) {
  const auto r = hirsch_walk_exhaustive(inst, origin, final_tree, true);
  EXPECT_EQ(r.best_pivot_count, 3);
  EXPECT_EQ(r.pivot_counts[0][0], 3);
  for (const auto& row : r.pivot_counts)
    for (int c : row) EXPECT_LE(c, 4);
}

TEST_F(WalkFixture, RejectsBadInputs) {
  const auto bad = flows_on_tree(example_critical(), std::vector<Edge>{{2, 1}, {2, 2}, {2, 3}, {1, 1}});
  try {
    hirsch_walk(example_critical(), bad, flows_on_tree(example_critical(), critical_left()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonVertexInput);
  }
  try {
    hirsch_walk(inst, origin, final_tree, WalkOptions{4, 1, false});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndexOutOfRange);
  }
}

TEST_F(WalkFixture, UnoOnUnshadedStartIsSingletons) {
  const auto s = state(origin, {});
  const auto comps = well_connected_components(s);
  EXPECT_EQ(comps.size(), 5u);
  for (const auto& c : comps) {
    EXPECT_EQ(c.nodes.size(), 1u);
    EXPECT_EQ(c.open_nodes.size(), 1u);
  }
  EXPECT_EQ(check_uno(s), UnoResult::Holds);
  EXPECT_TRUE(check_sin(s, 1));
  EXPECT_TRUE(check_sin(s, 2));
}

TEST_F(WalkFixture, UnoAfterSecondIteration) {
  const auto trace = hirsch_walk(inst, origin, final_tree);
  const auto s = state(trace.iterations[1].tree, {{1, 3}, {2, 2}}, 2);
  const auto comps = well_connected_components(s);
  // d2 is closed (its only tree edge is shaded) and pulls s2 in.
  const WellConnectedComponent* joined = nullptr;
  for (const auto& c : comps)
    if (c.nodes.size() > 1) joined = &c;
  ASSERT_NE(joined, nullptr);
  EXPECT_EQ(joined->nodes, (std::vector<NodeRef>{{true, 2}, {false, 2}}));
  EXPECT_EQ(joined->open_nodes, (std::vector<NodeRef>{{true, 2}}));
  EXPECT_EQ(joined->edges, (std::vector<Edge>{{2, 2}}));
  EXPECT_EQ(comps.size(), 4u);
  EXPECT_EQ(check_uno(s), UnoResult::Holds);
  EXPECT_TRUE(check_sin(s, 2));
  EXPECT_EQ(find_new_supply(s, 2), 2);
}

TEST_F(WalkFixture, UnoDetectsTwoOpenNodes) {
  // Hand-built labels: both edges at d2 marked -, so d2 closes without
  // closing either supply and one component holds two open nodes.
  auto s = state(origin, {{1, 2}, {2, 2}});
  s.labeling.label = {{{1, 2}, Sign::Minus}, {{2, 2}, Sign::Minus}, {{1, 1}, Sign::Plus}, {{2, 3}, Sign::Plus}};
  EXPECT_EQ(check_uno(s), UnoResult::Violated);
}

TEST_F(WalkFixture, UnoTerminalWhenEverythingShaded) {
  const auto edges = walk_final();
  const auto s = state(final_tree, EdgeSet(edges.begin(), edges.end()));
  EXPECT_EQ(check_uno(s), UnoResult::Terminal);
}

TEST_F(WalkFixture, SinRejectsShadedPlusAtOddRank) {
  auto s = state(final_tree, {{1, 2}});
  EXPECT_EQ(odd_edges_from(s, 1), (std::vector<Edge>{{1, 2}, {1, 3}, {2, 1}}));
  EXPECT_FALSE(check_sin(s, 1));  // (1,2) is + at rank 1
  EXPECT_TRUE(check_sin(s, 2));   // (1,2) sits at rank 2 from s2

  s.shaded = {{1, 3}};
  EXPECT_TRUE(check_sin(s, 1));  // shaded - with d3 closed

  s.shaded = {{2, 2}};
  EXPECT_FALSE(check_sin(s, 2));  // shaded - but d2 still has unshaded (1,2)
}

TEST_F(WalkFixture, FindNewSupplyPrefersUnshadedEdges) {
  const auto s = state(origin, {{1, 2}});
  EXPECT_EQ(find_new_supply(s, 2), 2);  // (2,2) unshaded
  EXPECT_EQ(find_new_supply(s, 1), 1);
  const auto closed = state(final_tree, {{1, 2}, {2, 2}});
  EXPECT_EQ(find_new_supply(closed, 2), 2);  // - edge of F at d2
}

// Walks between every vertex pair of small random instances stay within the
// bound, never beat the oracle distance and pass all diagnostics.
TEST(WalkProperty, RandomInstances) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const int n1 = 2 + static_cast<int>(seed % 2), n2 = 2 + static_cast<int>(seed % 3);
    const auto inst = gen_random(seed, n1, n2, 20);
    const auto vertices = enumerate_vertices(inst);
    const auto g = build_skeleton(vertices);
    const int bound = inst.tree_size() - static_cast<int>(critical_pairs(inst).size());
    EXPECT_LE(diameter(g), bound);
    for (std::size_t a = 0; a < g.size(); ++a) {
      const auto dist = distances_from(g, a);
      for (std::size_t b = 0; b < g.size(); ++b) {
        const auto trace = hirsch_walk(inst, g.vertices[a], g.vertices[b], WalkOptions{1, 1, true});
        EXPECT_LE(trace.pivot_count, bound);
        EXPECT_GE(trace.pivot_count, dist[b]);
      }
    }
  }
}
