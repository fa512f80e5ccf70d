#include <gtest/gtest.h>

#include "support/brute_force.hpp"
#include "support/fixtures.hpp"
#include "tpoly/core.hpp"
#include "tpoly/instances.hpp"

using namespace tpoly;
using namespace tpoly::testing;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a tpoly::Error";
  return ErrorKind::Overflow;
}

void expect_margins(const TransportationInstance& inst, const FlowedTree& t) {
  std::vector<Flow> out(inst.supplies.size(), 0), in(inst.demands.size(), 0);
  for (const auto& [e, f] : t.flow) {
    out[e.supply - 1] += f;
    in[e.demand - 1] += f;
  }
  EXPECT_EQ(out, inst.supplies);
  EXPECT_EQ(in, inst.demands);
}

}  // namespace

TEST(Validate, AcceptsBalancedInstances) {
  EXPECT_TRUE(validate_instance(example_critical()).ok());
  EXPECT_TRUE(validate_instance(TransportationInstance{{1}, {1}, {}}).ok());
}

TEST(Validate, ReportsProblems) {
  auto unbalanced = validate_instance(TransportationInstance{{2, 2}, {3, 2}, {}});
  ASSERT_FALSE(unbalanced.ok());
  EXPECT_FALSE(unbalanced.balanced);
  EXPECT_EQ(unbalanced.problems.front().first, ErrorKind::Unbalanced);

  auto zero = validate_instance(TransportationInstance{{0, 2}, {1, 1}, {}});
  EXPECT_FALSE(zero.positive);
  EXPECT_EQ(zero.problems.front().first, ErrorKind::NonPositiveMargin);

  // Forbidding both edges at supply 1 isolates it.
  auto cut = validate_instance(TransportationInstance{{1, 1}, {1, 1}, {{1, 1}, {1, 2}}});
  EXPECT_FALSE(cut.connected);
  EXPECT_EQ(kind_of([&] { cut.throw_if_invalid(); }), ErrorKind::DisconnectedAllowedGraph);
}

TEST(Nondegenerate, Examples) {
  EXPECT_TRUE(check_nondegenerate(example_critical()));
  EXPECT_TRUE(check_nondegenerate(example_walk()));

  const auto deg = check_nondegenerate(TransportationInstance{{2, 2}, {2, 2}, {}});
  EXPECT_FALSE(deg.nondegenerate);
  EXPECT_TRUE(deg.exact);
  EXPECT_EQ(deg.supply_subset, std::vector<int>{1});
  EXPECT_EQ(deg.demand_subset, std::vector<int>{1});

  // Trivial sides have no proper non-empty subsets.
  EXPECT_TRUE(check_nondegenerate(TransportationInstance{{4}, {1, 1, 2}, {}}));
}

TEST(Nondegenerate, FaceResultIsFlaggedHeuristic) {
  TransportationInstance face = example_walk();
  face.forbidden = {{1, 1}};
  const auto r = check_nondegenerate(face);
  EXPECT_TRUE(r.nondegenerate);
  EXPECT_FALSE(r.exact);
}

TEST(Nondegenerate, AgreesWithSubsetEnumeration) {
  Rng rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int n1 = static_cast<int>(rng.uniform(1, 5));
    const int n2 = static_cast<int>(rng.uniform(1, 5));
    const Flow total = rng.uniform(std::max(n1, n2), 25);
    TransportationInstance inst{random_composition(rng, total, n1), random_composition(rng, total, n2), {}};
    const auto r = check_nondegenerate(inst);
    ASSERT_EQ(r.nondegenerate, nondegenerate_by_subsets(inst.supplies, inst.demands));
    if (!r.nondegenerate) {
      Flow su = 0, sv = 0;
      for (int i : r.supply_subset) su += inst.supplies[i - 1];
      for (int j : r.demand_subset) sv += inst.demands[j - 1];
      EXPECT_EQ(su, sv);
      EXPECT_LT(r.supply_subset.size(), inst.supplies.size());
      EXPECT_LT(r.demand_subset.size(), inst.demands.size());
    }
  }
}

TEST(FlowsOnTree, Examples) {
  const auto left = flows_on_tree(example_critical(), critical_left());
  EXPECT_EQ(left.flow, (std::map<Edge, Flow>{{{1, 1}, 4}, {{1, 2}, 1}, {{2, 2}, 1}, {{2, 3}, 2}}));

  const auto single = flows_on_tree(TransportationInstance{{5}, {5}, {}}, std::vector<Edge>{{1, 1}});
  EXPECT_EQ(single.flow_on({1, 1}), 5);

  const auto o = flows_on_tree(example_walk(), walk_origin());
  EXPECT_EQ(o.flow, (std::map<Edge, Flow>{{{1, 1}, 2}, {{1, 2}, 1}, {{2, 2}, 1}, {{2, 3}, 2}}));
}

TEST(FlowsOnTree, RejectsNonTrees) {
  const auto inst = example_critical();
  EXPECT_EQ(kind_of([&] { flows_on_tree(inst, std::vector<Edge>{{1, 1}, {1, 2}, {2, 2}}); }),
            ErrorKind::NotASpanningTree);
  EXPECT_EQ(kind_of([&] { flows_on_tree(inst, std::vector<Edge>{{1, 1}, {1, 2}, {2, 1}, {2, 2}}); }),
            ErrorKind::NotASpanningTree);  // 4-cycle, demand 3 isolated
  EXPECT_EQ(kind_of([&] { flows_on_tree(inst, std::vector<Edge>{{1, 1}, {1, 1}, {2, 2}, {2, 3}}); }),
            ErrorKind::NotASpanningTree);
  auto face = inst;
  face.forbidden = {{2, 3}};
  EXPECT_EQ(kind_of([&] { flows_on_tree(face, critical_left()); }), ErrorKind::UsesForbiddenEdge);
}

TEST(IsVertex, Examples) {
  const auto left = is_vertex(flows_on_tree(example_critical(), critical_left()));
  EXPECT_TRUE(left.feasible);
  EXPECT_TRUE(left.strictly_positive);

  // Supply 1 is a leaf on (1,1) so y11 = 5 and then y21 = 4 - 5 = -1.
  const auto bad = flows_on_tree(example_critical(), std::vector<Edge>{{2, 1}, {2, 2}, {2, 3}, {1, 1}});
  EXPECT_EQ(bad.flow_on({1, 1}), 5);
  EXPECT_EQ(bad.flow_on({2, 1}), -1);
  EXPECT_FALSE(is_vertex(bad));

  EXPECT_TRUE(is_vertex(flows_on_tree(TransportationInstance{{3}, {3}, {}}, std::vector<Edge>{{1, 1}})));
}

TEST(Pivot, CriticalExample) {
  const auto inst = example_critical();
  const auto r = pivot(inst, flows_on_tree(inst, critical_left()), Edge{2, 1});
  EXPECT_EQ(r.leaving, (Edge{2, 2}));
  EXPECT_EQ(r.tree.flow, (std::map<Edge, Flow>{{{1, 1}, 3}, {{1, 2}, 2}, {{2, 1}, 1}, {{2, 3}, 2}}));
  EXPECT_EQ(r.tree.edges(), critical_right());
}

TEST(Pivot, WalkExampleFirstStep) {
  const auto inst = example_walk();
  const auto r = pivot(inst, flows_on_tree(inst, walk_origin()), Edge{1, 3});
  EXPECT_EQ(r.leaving, (Edge{1, 2}));
  EXPECT_EQ(r.tree.flow, (std::map<Edge, Flow>{{{1, 1}, 2}, {{1, 3}, 1}, {{2, 2}, 2}, {{2, 3}, 1}}));
}

TEST(Pivot, Errors) {
  // u=(2,2), v=(1,2,1): every flow on this tree is 1, so both decreased edges tie.
  const TransportationInstance deg{{2, 2}, {1, 2, 1}, {}};
  const auto tree = flows_on_tree(deg, std::vector<Edge>{{1, 1}, {1, 2}, {2, 2}, {2, 3}});
  for (const auto& [e, f] : tree.flow) EXPECT_EQ(f, 1);
  EXPECT_EQ(kind_of([&] { pivot(deg, tree, Edge{2, 1}); }), ErrorKind::DegeneratePivot);

  const auto inst = example_critical();
  const auto left = flows_on_tree(inst, critical_left());
  EXPECT_EQ(kind_of([&] { pivot(inst, left, Edge{1, 1}); }), ErrorKind::EdgeAlreadyPresent);
  auto face = inst;
  face.forbidden = {{1, 3}};
  EXPECT_EQ(kind_of([&] { pivot(face, left, Edge{1, 3}); }), ErrorKind::ForbiddenEdge);
}

TEST(Neighbors, Examples) {
  const auto inst = example_critical();
  const auto left = neighbors(inst, flows_on_tree(inst, critical_left()));
  ASSERT_EQ(left.size(), 2u);
  EXPECT_EQ(left[0].enter, (Edge{1, 3}));
  EXPECT_EQ(left[1].enter, (Edge{2, 1}));

  EXPECT_TRUE(neighbors(TransportationInstance{{2}, {2}, {}}, flows_on_tree(TransportationInstance{{2}, {2}, {}},
                                                                             std::vector<Edge>{{1, 1}}))
                  .empty());

  const auto walk = example_walk();
  const auto from_o = neighbors(walk, flows_on_tree(walk, walk_origin()));
  ASSERT_EQ(from_o.size(), 2u);
  EXPECT_EQ(from_o[0].enter, (Edge{1, 3}));
  EXPECT_EQ(from_o[1].enter, (Edge{2, 1}));
}

// Margins are conserved by every pivot, the result matches a fresh leaf
// elimination, and pivoting back on the leaving edge restores the tree.
TEST(Pivot, PropertiesOnRandomInstances) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto inst = gen_random(seed, 2 + static_cast<int>(seed % 3), 2 + static_cast<int>(seed % 4), 40);
    // Reach some vertex: scan trees of the first supply-star shape via pivots from any feasible start.
    std::vector<Edge> star_tree;
    // Northwest-corner rule gives a vertex.
    {
      auto u = inst.supplies;
      auto v = inst.demands;
      int i = 0, j = 0;
      while (i < inst.supply_count() && j < inst.demand_count()) {
        star_tree.push_back(Edge{i + 1, j + 1});
        const Flow f = std::min(u[i], v[j]);
        u[i] -= f;
        v[j] -= f;
        if (u[i] == 0 && i + 1 < inst.supply_count()) ++i;
        else ++j;
      }
    }
    const auto start = flows_on_tree(inst, star_tree);
    ASSERT_TRUE(is_vertex(start).strictly_positive) << "seed " << seed;
    for (const auto& n : neighbors(inst, start)) {
      expect_margins(inst, n.tree);
      EXPECT_TRUE(is_vertex(n.tree).strictly_positive);
      EXPECT_EQ(flows_on_tree(inst, n.tree.edges()), n.tree);
      const auto back = pivot(inst, n.tree, n.leaving);
      EXPECT_EQ(back.leaving, n.enter);
      EXPECT_EQ(back.tree, start);
    }
  }
}
