#ifndef TPOLY_ORACLE_HPP
#define TPOLY_ORACLE_HPP

// Brute-force ground truth for small instances: every vertex, the 1-skeleton,
// exact distances and diameter, critical pairs, dimension and facet count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "tpoly/core.hpp"
#include "tpoly/max_flow.hpp"

namespace tpoly {

inline constexpr std::uint64_t kDefaultTreeBudget = 1'000'000;

/// Positive entries of a feasible flow.  General (possibly degenerate)
/// vertices are identified by this map.
using FlowVector = std::map<Edge, Flow>;

// ---------------------------------------------------------------------------
// Spanning trees

/// N1^(N2-1) * N2^(N1-1), the number of spanning trees of K_{N1,N2}
/// (saturating at the double range).
inline double complete_bipartite_tree_count(int n1, int n2) {
  return std::pow(static_cast<double>(n1), n2 - 1) * std::pow(static_cast<double>(n2), n1 - 1);
}

/// Calls `visit` with the edge list of every spanning tree of the allowed
/// graph.  Recursive include/exclude over the allowed edges; an edge is only
/// included if it closes no cycle and only excluded if the remaining edges can
/// still connect the graph.
inline void for_each_spanning_tree(const TransportationInstance& inst,
                                   const std::function<void(const std::vector<Edge>&)>& visit,
                                   std::uint64_t budget = kDefaultTreeBudget) {
  const int n1 = inst.supply_count();
  const int nodes = inst.node_count();
  if (inst.forbidden.empty() && complete_bipartite_tree_count(n1, inst.demand_count()) > static_cast<double>(budget))
    throw Error(ErrorKind::BudgetExceeded, std::to_string(n1) + "x" + std::to_string(inst.demand_count()) +
                                               " has more than " + std::to_string(budget) + " spanning trees");
  const auto edges = inst.allowed_edges();
  const int need = inst.tree_size();
  std::vector<Edge> chosen;
  std::uint64_t visited = 0;

  auto connectable = [&](std::size_t from) {
    detail::UnionFind uf(nodes);
    int components = nodes;
    for (const Edge& e : chosen)
      if (uf.unite(detail::supply_node(n1, e.supply), detail::demand_node(n1, e.demand))) --components;
    for (std::size_t k = from; k < edges.size(); ++k)
      if (uf.unite(detail::supply_node(n1, edges[k].supply), detail::demand_node(n1, edges[k].demand))) --components;
    return components == 1;
  };
  auto acyclic_with = [&](const Edge& extra) {
    detail::UnionFind uf(nodes);
    for (const Edge& e : chosen) uf.unite(detail::supply_node(n1, e.supply), detail::demand_node(n1, e.demand));
    return uf.unite(detail::supply_node(n1, extra.supply), detail::demand_node(n1, extra.demand));
  };

  std::function<void(std::size_t)> recurse = [&](std::size_t k) {
    if (static_cast<int>(chosen.size()) == need) {
      if (++visited > budget)
        throw Error(ErrorKind::BudgetExceeded, "more than " + std::to_string(budget) + " spanning trees");
      visit(chosen);
      return;
    }
    if (k == edges.size() || static_cast<int>(edges.size() - k) < need - static_cast<int>(chosen.size())) return;
    if (acyclic_with(edges[k])) {
      chosen.push_back(edges[k]);
      recurse(k + 1);
      chosen.pop_back();
    }
    if (connectable(k + 1)) recurse(k + 1);
  };
  if (connectable(0)) recurse(0);
}

// ---------------------------------------------------------------------------
// Vertices

/// All vertices of a non-degenerate instance: the spanning trees of the
/// allowed graph whose forced flows are strictly positive.
inline std::vector<FlowedTree> enumerate_vertices(const TransportationInstance& inst,
                                                  std::uint64_t budget = kDefaultTreeBudget) {
  validate_instance(inst).throw_if_invalid();
  std::vector<FlowedTree> out;
  for_each_spanning_tree(
      inst,
      [&](const std::vector<Edge>& edges) {
        auto tree = flows_on_tree(inst, edges);
        const auto check = is_vertex(tree);
        if (check.strictly_positive) {
          out.push_back(std::move(tree));
        } else if (check.feasible) {
          throw Error(ErrorKind::DegenerateInstance,
                      "tree " + detail::edge_list(edges) + " carries a zero flow");
        }
      },
      budget);
  return out;
}

inline FlowVector support_flow(const FlowedTree& tree) {
  FlowVector out;
  for (const auto& [e, f] : tree.flow)
    if (f != 0) out.emplace(e, f);
  return out;
}

/// All vertices of any (possibly degenerate) instance or face, as distinct
/// flow vectors.  Every vertex has a forest support that extends to a
/// spanning tree of the allowed graph, so scanning spanning trees with
/// non-negative forced flows finds each of them.
inline std::vector<FlowVector> enumerate_vertex_flows(const TransportationInstance& inst,
                                                      std::uint64_t budget = kDefaultTreeBudget) {
  validate_instance(inst).throw_if_invalid();
  std::set<FlowVector> found;
  for_each_spanning_tree(
      inst,
      [&](const std::vector<Edge>& edges) {
        const auto tree = flows_on_tree(inst, edges);
        if (is_vertex(tree).feasible) found.insert(support_flow(tree));
      },
      budget);
  return {found.begin(), found.end()};
}

// ---------------------------------------------------------------------------
// Skeletons

template <class Vertex>
struct Skeleton {
  std::vector<Vertex> vertices;
  std::vector<std::vector<std::size_t>> adjacency;

  std::size_t size() const { return vertices.size(); }
  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& row : adjacency) twice += row.size();
    return twice / 2;
  }
  bool adjacent(std::size_t a, std::size_t b) const {
    return std::binary_search(adjacency[a].begin(), adjacency[a].end(), b);
  }
};

using SkeletonGraph = Skeleton<FlowedTree>;
using FlowSkeleton = Skeleton<FlowVector>;

/// Two spanning-tree vertices are adjacent iff their edge sets differ in
/// exactly one edge.
inline SkeletonGraph build_skeleton(std::vector<FlowedTree> vertices) {
  SkeletonGraph g;
  g.vertices = std::move(vertices);
  g.adjacency.assign(g.vertices.size(), {});
  std::vector<std::vector<Edge>> keys;
  keys.reserve(g.vertices.size());
  for (const auto& v : g.vertices) keys.push_back(v.edges());
  for (std::size_t a = 0; a < keys.size(); ++a) {
    for (std::size_t b = a + 1; b < keys.size(); ++b) {
      if (keys[a].size() != keys[b].size()) continue;
      std::vector<Edge> common;
      std::set_intersection(keys[a].begin(), keys[a].end(), keys[b].begin(), keys[b].end(),
                            std::back_inserter(common));
      if (common.size() + 1 == keys[a].size()) {
        g.adjacency[a].push_back(b);
        g.adjacency[b].push_back(a);
      }
    }
  }
  for (auto& row : g.adjacency) std::sort(row.begin(), row.end());
  return g;
}

/// Cycle rank (edges - nodes + components) of the union of two supports.
/// The smallest face containing both vertices has exactly this dimension, so
/// the vertices are adjacent iff it equals one.
inline int union_cycle_rank(int n1, const FlowVector& a, const FlowVector& b) {
  std::set<Edge> edges;
  for (const auto& [e, f] : a) edges.insert(e);
  for (const auto& [e, f] : b) edges.insert(e);
  std::map<int, int> index;
  auto id = [&](int node) { return index.emplace(node, static_cast<int>(index.size())).first->second; };
  std::vector<std::pair<int, int>> pairs;
  for (const Edge& e : edges)
    pairs.emplace_back(id(detail::supply_node(n1, e.supply)), id(detail::demand_node(n1, e.demand)));
  detail::UnionFind uf(static_cast<int>(index.size()));
  int components = static_cast<int>(index.size());
  for (const auto& [s, d] : pairs)
    if (uf.unite(s, d)) --components;
  return static_cast<int>(edges.size()) - static_cast<int>(index.size()) + components;
}

inline FlowSkeleton build_flow_skeleton(int supply_count, std::vector<FlowVector> vertices) {
  FlowSkeleton g;
  g.vertices = std::move(vertices);
  g.adjacency.assign(g.vertices.size(), {});
  for (std::size_t a = 0; a < g.vertices.size(); ++a) {
    for (std::size_t b = a + 1; b < g.vertices.size(); ++b) {
      if (union_cycle_rank(supply_count, g.vertices[a], g.vertices[b]) != 1) continue;
      g.adjacency[a].push_back(b);
      g.adjacency[b].push_back(a);
    }
  }
  for (auto& row : g.adjacency) std::sort(row.begin(), row.end());
  return g;
}

inline std::size_t vertex_index(const SkeletonGraph& g, const FlowedTree& tree) {
  const auto key = tree.edge_set();
  for (std::size_t k = 0; k < g.vertices.size(); ++k)
    if (g.vertices[k].edge_set() == key) return k;
  throw Error(ErrorKind::VertexNotFound, "tree " + detail::edge_list(tree.edges()) + " is not a vertex");
}

/// BFS distances from `source`; unreachable vertices get -1.
template <class Vertex>
std::vector<int> distances_from(const Skeleton<Vertex>& g, std::size_t source) {
  if (source >= g.size()) throw Error(ErrorKind::VertexNotFound, "vertex " + std::to_string(source));
  std::vector<int> dist(g.size(), -1);
  std::queue<std::size_t> queue;
  dist[source] = 0;
  queue.push(source);
  while (!queue.empty()) {
    const auto x = queue.front();
    queue.pop();
    for (auto y : g.adjacency[x]) {
      if (dist[y] != -1) continue;
      dist[y] = dist[x] + 1;
      queue.push(y);
    }
  }
  return dist;
}

template <class Vertex>
int distance(const Skeleton<Vertex>& g, std::size_t a, std::size_t b) {
  if (b >= g.size()) throw Error(ErrorKind::VertexNotFound, "vertex " + std::to_string(b));
  return distances_from(g, a)[b];
}

inline int distance(const SkeletonGraph& g, const FlowedTree& a, const FlowedTree& b) {
  return distance(g, vertex_index(g, a), vertex_index(g, b));
}

/// Largest BFS distance over all vertex pairs; -1 for a disconnected graph.
template <class Vertex>
int diameter(const Skeleton<Vertex>& g) {
  int best = 0;
  for (std::size_t s = 0; s < g.size(); ++s) {
    for (int d : distances_from(g, s)) {
      if (d < 0) return -1;
      best = std::max(best, d);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Critical pairs

/// Full polytope only: the minimum of y_ij over TP(u,v) is
/// max(0, u_i + v_j - total), so (i,j) is critical iff u_i + v_j > total.
inline EdgeSet critical_pairs_closed_form(const TransportationInstance& inst) {
  const Flow total = inst.total_supply();
  EdgeSet out;
  for (int i = 1; i <= inst.supply_count(); ++i)
    for (int j = 1; j <= inst.demand_count(); ++j)
      if (inst.supplies[i - 1] + inst.demands[j - 1] > total) out.insert(Edge{i, j});
  return out;
}

/// True iff the instance (with `also_zero` forced to zero in addition to the
/// forbidden edges) has a feasible flow.
inline bool face_is_feasible(const TransportationInstance& inst, const std::optional<Edge>& also_zero = std::nullopt) {
  const int n1 = inst.supply_count();
  const int source = inst.node_count();
  const int sink = source + 1;
  MaxFlow<Flow> mf(inst.node_count() + 2);
  const Flow total = inst.total_supply();
  for (int i = 1; i <= n1; ++i) mf.add_arc(source, detail::supply_node(n1, i), inst.supplies[i - 1]);
  for (int j = 1; j <= inst.demand_count(); ++j) mf.add_arc(detail::demand_node(n1, j), sink, inst.demands[j - 1]);
  for (const Edge& e : inst.allowed_edges())
    if (!also_zero || e != *also_zero)
      mf.add_arc(detail::supply_node(n1, e.supply), detail::demand_node(n1, e.demand), total);
  return mf.run(source, sink) == total;
}

/// Any instance or face: an allowed edge is critical iff forcing it to zero
/// leaves no feasible flow.
inline EdgeSet critical_pairs_max_flow(const TransportationInstance& inst) {
  if (!face_is_feasible(inst)) throw Error(ErrorKind::InfeasibleFlow, "the face has no feasible flow");
  EdgeSet out;
  for (const Edge& e : inst.allowed_edges())
    if (!face_is_feasible(inst, e)) out.insert(e);
  return out;
}

inline EdgeSet critical_pairs(const TransportationInstance& inst) {
  validate_instance(inst).throw_if_invalid();
  return inst.is_face() ? critical_pairs_max_flow(inst) : critical_pairs_closed_form(inst);
}

// ---------------------------------------------------------------------------
// Dimension and facets from the vertex set

namespace detail {

inline std::int64_t checked(__int128 x) {
  if (x > std::numeric_limits<std::int64_t>::max() || x < std::numeric_limits<std::int64_t>::min())
    throw Error(ErrorKind::Overflow, "integer row reduction overflowed");
  return static_cast<std::int64_t>(x);
}

/// Rank of an integer matrix by fraction-free elimination, dividing every
/// row by its content after each step.
inline int integer_rank(std::vector<std::vector<std::int64_t>> rows) {
  int rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows.size()); ++c) {
    std::size_t pivot_row = rows.size();
    for (std::size_t r = rank; r < rows.size(); ++r)
      if (rows[r][c] != 0) {
        pivot_row = r;
        break;
      }
    if (pivot_row == rows.size()) continue;
    std::swap(rows[rank], rows[pivot_row]);
    const auto& p = rows[rank];
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      if (rows[r][c] == 0) continue;
      const std::int64_t a = p[c];
      const std::int64_t b = rows[r][c];
      std::int64_t content = 0;
      for (std::size_t k = 0; k < cols; ++k) {
        rows[r][k] = checked(static_cast<__int128>(a) * rows[r][k] - static_cast<__int128>(b) * p[k]);
        content = std::gcd(content, rows[r][k]);
      }
      if (content > 1)
        for (auto& x : rows[r]) x /= content;
    }
    ++rank;
  }
  return rank;
}

}  // namespace detail

/// Dimension of the affine hull of a set of flow vectors over `edges`.
inline int affine_dimension(const std::vector<FlowVector>& points, const std::vector<Edge>& edges) {
  if (points.empty()) return -1;
  std::vector<std::vector<std::int64_t>> rows;
  for (std::size_t k = 1; k < points.size(); ++k) {
    std::vector<std::int64_t> row;
    row.reserve(edges.size());
    for (const Edge& e : edges) {
      auto a = points[k].find(e);
      auto b = points[0].find(e);
      row.push_back((a == points[k].end() ? 0 : a->second) - (b == points[0].end() ? 0 : b->second));
    }
    rows.push_back(std::move(row));
  }
  return detail::integer_rank(std::move(rows));
}

struct FaceLattice {
  int dimension = 0;
  int facet_count = 0;
};

/// Every facet of {y >= 0, margins} lies in some hyperplane y_e = 0; it is a
/// facet iff the vertices on it span dimension d-1.  Distinct vertex sets
/// give distinct facets.
inline FaceLattice dimension_and_facets(const TransportationInstance& inst, const std::vector<FlowVector>& vertices) {
  const auto edges = inst.allowed_edges();
  FaceLattice out;
  out.dimension = affine_dimension(vertices, edges);
  if (out.dimension <= 0) return out;
  std::set<std::vector<std::size_t>> facets;
  for (const Edge& e : edges) {
    std::vector<std::size_t> on;
    std::vector<FlowVector> points;
    for (std::size_t k = 0; k < vertices.size(); ++k) {
      if (vertices[k].contains(e)) continue;
      on.push_back(k);
      points.push_back(vertices[k]);
    }
    if (on.empty() || on.size() == vertices.size()) continue;
    if (affine_dimension(points, edges) == out.dimension - 1) facets.insert(std::move(on));
  }
  out.facet_count = static_cast<int>(facets.size());
  return out;
}

// ---------------------------------------------------------------------------
// Analysis

struct InstanceAnalysis {
  bool face = false;
  bool nondegenerate = true;
  int mu = 0;
  EdgeSet critical;
  int dimension = 0;
  int facet_count = 0;
  int hirsch_bound = 0;  // facets - dimension
  int walk_bound = 0;    // N1 + N2 - 1 - mu
  int diameter = 0;
  std::size_t vertex_count = 0;
  std::size_t skeleton_edge_count = 0;
};

/// Enumerates the instance and assembles its combinatorial data.  A diameter
/// above the Hirsch bound, or closed forms that disagree with the enumerated
/// values, throw BoundViolation.
inline InstanceAnalysis analyze(const TransportationInstance& inst, std::uint64_t budget = kDefaultTreeBudget) {
  validate_instance(inst).throw_if_invalid();
  InstanceAnalysis a;
  a.face = inst.is_face();
  const auto nd = check_nondegenerate(inst);
  a.nondegenerate = nd.nondegenerate && nd.exact;
  a.critical = critical_pairs(inst);
  a.mu = static_cast<int>(a.critical.size());
  a.walk_bound = inst.tree_size() - a.mu;

  std::vector<FlowVector> flows;
  if (a.nondegenerate) {
    auto skeleton = build_skeleton(enumerate_vertices(inst, budget));
    a.diameter = diameter(skeleton);
    a.vertex_count = skeleton.size();
    a.skeleton_edge_count = skeleton.edge_count();
    for (const auto& v : skeleton.vertices) flows.push_back(support_flow(v));
  } else {
    flows = enumerate_vertex_flows(inst, budget);
    auto skeleton = build_flow_skeleton(inst.supply_count(), flows);
    a.diameter = diameter(skeleton);
    a.vertex_count = skeleton.size();
    a.skeleton_edge_count = skeleton.edge_count();
  }
  const auto lattice = dimension_and_facets(inst, flows);
  a.dimension = lattice.dimension;
  a.facet_count = lattice.facet_count;
  a.hirsch_bound = a.facet_count - a.dimension;

  if (a.diameter < 0) throw Error(ErrorKind::BoundViolation, "skeleton is disconnected");
  if (a.diameter > a.hirsch_bound)
    throw Error(ErrorKind::BoundViolation, "diameter " + std::to_string(a.diameter) + " exceeds facets - dimension = " +
                                               std::to_string(a.hirsch_bound));
  if (!a.face && a.diameter > a.walk_bound)
    throw Error(ErrorKind::BoundViolation, "diameter " + std::to_string(a.diameter) + " exceeds N1+N2-1-mu = " +
                                               std::to_string(a.walk_bound));
  if (a.nondegenerate && !a.face) {
    const int n1 = inst.supply_count();
    const int n2 = inst.demand_count();
    if (a.dimension != (n1 - 1) * (n2 - 1) || (a.dimension > 0 && a.facet_count != n1 * n2 - a.mu))
      throw Error(ErrorKind::BoundViolation, "enumerated dimension/facets (" + std::to_string(a.dimension) + "/" +
                                                 std::to_string(a.facet_count) + ") disagree with the closed forms");
  }
  return a;
}

}  // namespace tpoly

#endif
