#include <gtest/gtest.h>

#include "support/brute_force.hpp"
#include "support/fixtures.hpp"
#include "tpoly/instances.hpp"
#include "tpoly/oracle.hpp"

using namespace tpoly;
using namespace tpoly::testing;

namespace {

std::set<FlowVector> as_set(const std::vector<Table>& tables) { return {tables.begin(), tables.end()}; }

std::set<FlowVector> as_set(const std::vector<FlowedTree>& trees) {
  std::set<FlowVector> out;
  for (const auto& t : trees) out.insert(support_flow(t));
  return out;
}

// Diameter by BFS over pivots from every vertex, independent of the skeleton.
int pivot_diameter(const TransportationInstance& inst, const std::vector<FlowedTree>& vertices) {
  int best = 0;
  for (const auto& v : vertices) {
    const auto dist = pivot_distances(v, [&](const FlowedTree& t) {
      std::vector<FlowedTree> out;
      for (auto& n : neighbors(inst, t)) out.push_back(std::move(n.tree));
      return out;
    });
    EXPECT_EQ(dist.size(), vertices.size());
    for (const auto& [key, d] : dist) best = std::max(best, d);
  }
  return best;
}

}  // namespace

TEST(SpanningTrees, CountsMatchFormula) {
  for (int n1 = 1; n1 <= 3; ++n1)
    for (int n2 = 1; n2 <= 4; ++n2) {
      TransportationInstance inst{std::vector<Flow>(n1, n2), std::vector<Flow>(n2, n1), {}};
      std::uint64_t count = 0;
      for_each_spanning_tree(inst, [&](const std::vector<Edge>&) { ++count; });
      EXPECT_EQ(static_cast<double>(count), complete_bipartite_tree_count(n1, n2)) << n1 << "x" << n2;
    }
}

TEST(SpanningTrees, BudgetExceeded) {
  const TransportationInstance inst{{1, 1, 1, 1}, {1, 1, 1, 1}, {}};
  try {
    for_each_spanning_tree(inst, [](const std::vector<Edge>&) {}, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BudgetExceeded);
  }
}

TEST(Vertices, MatchIntegerTables) {
  for (const auto& inst : {example_critical(), example_walk(), TransportationInstance{{4}, {1, 1, 2}, {}}}) {
    const auto vertices = enumerate_vertices(inst);
    EXPECT_EQ(as_set(vertices), as_set(vertices_by_tables(inst)));
  }
  EXPECT_EQ(enumerate_vertices(example_critical()).size(), 5u);
}

TEST(Vertices, DegenerateInstances) {
  const TransportationInstance deg{{2, 2}, {2, 2}, {}};
  try {
    enumerate_vertices(deg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateInstance);
  }
  const auto flows = enumerate_vertex_flows(deg);
  EXPECT_EQ(std::set<FlowVector>(flows.begin(), flows.end()), as_set(vertices_by_tables(deg)));
  EXPECT_EQ(flows.size(), 2u);
}

TEST(Vertices, Faces) {
  auto face = example_walk();
  face.forbidden = {{1, 1}, {2, 3}};
  const auto flows = enumerate_vertex_flows(face);
  EXPECT_EQ(std::set<FlowVector>(flows.begin(), flows.end()), as_set(vertices_by_tables(face)));
}

TEST(Skeleton, DegreeMatchesNeighbors) {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto inst = gen_random(seed, 3, 3, 30);
    const auto g = build_skeleton(enumerate_vertices(inst));
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto n = neighbors(inst, g.vertices[k]);
      ASSERT_EQ(g.adjacency[k].size(), n.size());
      for (const auto& nb : n) EXPECT_TRUE(g.adjacent(k, vertex_index(g, nb.tree)));
    }
    // The support-flow skeleton agrees on non-degenerate instances.
    std::vector<FlowVector> flows;
    for (const auto& v : g.vertices) flows.push_back(support_flow(v));
    const auto fg = build_flow_skeleton(inst.supply_count(), flows);
    EXPECT_EQ(fg.edge_count(), g.edge_count());
    EXPECT_EQ(diameter(fg), diameter(g));
    EXPECT_EQ(diameter(g), pivot_diameter(inst, g.vertices));
  }
}

TEST(Skeleton, Distances) {
  const auto inst = example_critical();
  const auto g = build_skeleton(enumerate_vertices(inst));
  const auto left = flows_on_tree(inst, critical_left());
  const auto right = flows_on_tree(inst, critical_right());
  EXPECT_EQ(distance(g, left, right), 1);
  EXPECT_EQ(distance(g, left, left), 0);
  EXPECT_EQ(diameter(g), pivot_diameter(inst, g.vertices));
  try {
    vertex_index(g, flows_on_tree(inst, std::vector<Edge>{{2, 1}, {2, 2}, {2, 3}, {1, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::VertexNotFound);
  }
}

TEST(Critical, Examples) {
  EXPECT_EQ(critical_pairs(example_critical()), (EdgeSet{{1, 1}}));
  EXPECT_TRUE(critical_pairs(example_walk()).empty());
  EXPECT_EQ(critical_pairs(TransportationInstance{{4}, {1, 1, 2}, {}}).size(), 3u);
}

TEST(Critical, ClosedFormMatchesTables) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int n1 = static_cast<int>(rng.uniform(1, 4));
    const int n2 = static_cast<int>(rng.uniform(1, 4));
    const Flow total = rng.uniform(std::max(n1, n2), 9);
    const TransportationInstance inst{random_composition(rng, total, n1), random_composition(rng, total, n2), {}};
    const auto expected = critical_by_tables(inst);
    EXPECT_EQ(critical_pairs_closed_form(inst), expected);
    EXPECT_EQ(critical_pairs_max_flow(inst), expected);
  }
}

TEST(Critical, FacesByMaxFlowMatchTables) {
  Rng rng(12);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n1 = static_cast<int>(rng.uniform(2, 3));
    const int n2 = static_cast<int>(rng.uniform(2, 4));
    const Flow total = rng.uniform(std::max(n1, n2), 9);
    TransportationInstance inst{random_composition(rng, total, n1), random_composition(rng, total, n2), {}};
    for (const Edge& e : inst.allowed_edges())
      if (rng.coin(1, 4)) inst.forbidden.insert(e);
    if (!validate_instance(inst).ok() || !face_is_feasible(inst)) continue;
    EXPECT_EQ(critical_pairs(inst), critical_by_tables(inst));
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Lattice, IntegerRank) {
  EXPECT_EQ(detail::integer_rank({{1, 2}, {2, 4}}), 1);
  EXPECT_EQ(detail::integer_rank({{1, 0, 0}, {0, 1, 0}, {1, 1, 0}}), 2);
  EXPECT_EQ(detail::integer_rank({}), 0);
  EXPECT_EQ(detail::integer_rank({{0, 0}}), 0);
}

TEST(Analyze, CriticalExample) {
  const auto a = analyze(example_critical());
  EXPECT_FALSE(a.face);
  EXPECT_TRUE(a.nondegenerate);
  EXPECT_EQ(a.mu, 1);
  EXPECT_EQ(a.walk_bound, 3);
  EXPECT_EQ(a.dimension, 2);
  EXPECT_EQ(a.facet_count, 5);
  EXPECT_EQ(a.hirsch_bound, 3);
  EXPECT_EQ(a.vertex_count, 5u);
  EXPECT_EQ(a.skeleton_edge_count, 5u);  // a pentagon
  EXPECT_EQ(a.diameter, 2);
}

TEST(Analyze, SingleRowHasOneVertex) {
  const auto a = analyze(TransportationInstance{{4}, {1, 1, 2}, {}});
  EXPECT_EQ(a.vertex_count, 1u);
  EXPECT_EQ(a.diameter, 0);
  EXPECT_EQ(a.dimension, 0);
  EXPECT_EQ(a.mu, 3);
  EXPECT_EQ(a.walk_bound, 0);
}

TEST(Analyze, WalkExample) {
  const auto inst = example_walk();
  const auto a = analyze(inst);
  EXPECT_EQ(a.vertex_count, vertices_by_tables(inst).size());
  EXPECT_EQ(a.diameter, pivot_diameter(inst, enumerate_vertices(inst)));
  EXPECT_LE(a.diameter, 4);
  EXPECT_EQ(a.dimension, 2);
  EXPECT_EQ(a.facet_count, 6);
}

TEST(Analyze, DegenerateAndFace) {
  const auto deg = analyze(TransportationInstance{{2, 2}, {2, 2}, {}});
  EXPECT_FALSE(deg.nondegenerate);
  EXPECT_EQ(deg.vertex_count, 2u);
  EXPECT_EQ(deg.dimension, 1);
  EXPECT_EQ(deg.facet_count, 2);
  EXPECT_EQ(deg.diameter, 1);

  auto face = example_walk();
  face.forbidden = {{1, 1}};
  const auto fa = analyze(face);
  EXPECT_TRUE(fa.face);
  EXPECT_EQ(fa.vertex_count, vertices_by_tables(face).size());
  EXPECT_LE(fa.diameter, fa.hirsch_bound);
}
