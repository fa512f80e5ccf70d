#ifndef TPOLY_CORE_HPP
#define TPOLY_CORE_HPP

// Exact tree-flow engine for transportation polytopes and their faces.
//
// A transportation instance has N1 supply nodes with margins u and N2 demand
// nodes with margins v on the complete bipartite graph K_{N1,N2}.  Edges that
// are forbidden have their flow fixed at zero, which selects a face.  Vertices
// of non-degenerate instances are spanning trees; the flow on a spanning tree
// is forced by the margins and is computed here by leaf elimination, so every
// quantity stays an exact integer.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <ranges>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tpoly/error.hpp"

namespace tpoly {

using Flow = std::int64_t;

/// Edge {supply, demand} of K_{N1,N2}; both indices are 1-based.
struct Edge {
  int supply = 0;
  int demand = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using EdgeSet = std::set<Edge>;

inline std::string to_string(const Edge& e) {
  return "(" + std::to_string(e.supply) + "," + std::to_string(e.demand) + ")";
}

inline std::ostream& operator<<(std::ostream& os, const Edge& e) { return os << to_string(e); }

struct TransportationInstance {
  std::vector<Flow> supplies;
  std::vector<Flow> demands;
  EdgeSet forbidden;

  int supply_count() const { return static_cast<int>(supplies.size()); }
  int demand_count() const { return static_cast<int>(demands.size()); }
  int node_count() const { return supply_count() + demand_count(); }
  /// Number of edges in a spanning tree.
  int tree_size() const { return node_count() - 1; }

  Flow total_supply() const { return std::accumulate(supplies.begin(), supplies.end(), Flow{0}); }
  Flow total_demand() const { return std::accumulate(demands.begin(), demands.end(), Flow{0}); }

  bool in_range(const Edge& e) const {
    return e.supply >= 1 && e.supply <= supply_count() && e.demand >= 1 && e.demand <= demand_count();
  }
  bool allowed(const Edge& e) const { return in_range(e) && !forbidden.contains(e); }
  bool is_face() const { return !forbidden.empty(); }

  /// Allowed edges in lexicographic (supply, demand) order.
  std::vector<Edge> allowed_edges() const {
    std::vector<Edge> out;
    for (int i = 1; i <= supply_count(); ++i)
      for (int j = 1; j <= demand_count(); ++j)
        if (!forbidden.contains(Edge{i, j})) out.push_back(Edge{i, j});
    return out;
  }

  friend bool operator==(const TransportationInstance&, const TransportationInstance&) = default;
};

/// A spanning tree together with the flow the margins force on it.  Flows may
/// be negative when the tree is not a vertex; see is_vertex().
struct FlowedTree {
  std::map<Edge, Flow> flow;

  std::size_t size() const { return flow.size(); }
  bool contains(const Edge& e) const { return flow.contains(e); }
  Flow flow_on(const Edge& e) const {
    auto it = flow.find(e);
    return it == flow.end() ? Flow{0} : it->second;
  }
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(flow.size());
    for (const auto& [e, f] : flow) out.push_back(e);
    return out;
  }
  EdgeSet edge_set() const {
    EdgeSet out;
    for (const auto& [e, f] : flow) out.insert(e);
    return out;
  }

  friend bool operator==(const FlowedTree&, const FlowedTree&) = default;
};

namespace detail {

// Supply i -> node i-1, demand j -> node N1+j-1.
inline int supply_node(int /*n1*/, int supply) { return supply - 1; }
inline int demand_node(int n1, int demand) { return n1 + demand - 1; }

struct Incidence {
  int neighbor;
  Edge edge;
};

using Adjacency = std::vector<std::vector<Incidence>>;

template <class Range>
Adjacency adjacency_of(int n1, int n2, const Range& edges) {
  Adjacency adj(static_cast<std::size_t>(n1 + n2));
  for (const Edge& e : edges) {
    const int s = supply_node(n1, e.supply);
    const int d = demand_node(n1, e.demand);
    adj[s].push_back({d, e});
    adj[d].push_back({s, e});
  }
  return adj;
}

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<int> parent_;
};

/// Edges on the unique tree path between two nodes, in order from `from`.
inline std::vector<Edge> tree_path(const Adjacency& adj, int from, int to) {
  std::vector<int> parent(adj.size(), -1);
  std::vector<Edge> via(adj.size());
  std::queue<int> queue;
  parent[from] = from;
  queue.push(from);
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop();
    if (x == to) break;
    for (const auto& inc : adj[x]) {
      if (parent[inc.neighbor] != -1) continue;
      parent[inc.neighbor] = x;
      via[inc.neighbor] = inc.edge;
      queue.push(inc.neighbor);
    }
  }
  std::vector<Edge> path;
  if (parent[to] == -1) return path;
  for (int x = to; x != from; x = parent[x]) path.push_back(via[x]);
  std::reverse(path.begin(), path.end());
  return path;
}

inline std::string edge_list(const std::vector<Edge>& edges) {
  std::ostringstream os;
  for (std::size_t k = 0; k < edges.size(); ++k) os << (k ? " " : "") << edges[k];
  return os.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Validation

struct ValidationReport {
  bool balanced = true;
  bool positive = true;
  bool forbidden_in_range = true;
  bool connected = true;
  std::vector<std::pair<ErrorKind, std::string>> problems;

  bool ok() const { return problems.empty(); }

  void throw_if_invalid() const {
    if (!problems.empty()) throw Error(problems.front().first, problems.front().second);
  }
};

inline ValidationReport validate_instance(const TransportationInstance& inst) {
  ValidationReport report;
  if (inst.supplies.empty() || inst.demands.empty()) {
    report.positive = false;
    report.problems.emplace_back(ErrorKind::NonPositiveMargin, "instance needs at least one supply and one demand");
    return report;
  }
  for (std::size_t i = 0; i < inst.supplies.size(); ++i) {
    if (inst.supplies[i] <= 0) {
      report.positive = false;
      report.problems.emplace_back(ErrorKind::NonPositiveMargin,
                                   "supply " + std::to_string(i + 1) + " = " + std::to_string(inst.supplies[i]));
    }
  }
  for (std::size_t j = 0; j < inst.demands.size(); ++j) {
    if (inst.demands[j] <= 0) {
      report.positive = false;
      report.problems.emplace_back(ErrorKind::NonPositiveMargin,
                                   "demand " + std::to_string(j + 1) + " = " + std::to_string(inst.demands[j]));
    }
  }
  if (inst.total_supply() != inst.total_demand()) {
    report.balanced = false;
    report.problems.emplace_back(ErrorKind::Unbalanced, "total supply " + std::to_string(inst.total_supply()) +
                                                            " != total demand " + std::to_string(inst.total_demand()));
  }
  for (const Edge& e : inst.forbidden) {
    if (!inst.in_range(e)) {
      report.forbidden_in_range = false;
      report.problems.emplace_back(ErrorKind::IndexOutOfRange, "forbidden edge " + to_string(e) + " out of range");
    }
  }
  detail::UnionFind uf(inst.node_count());
  int components = inst.node_count();
  for (const Edge& e : inst.allowed_edges())
    if (uf.unite(detail::supply_node(inst.supply_count(), e.supply),
                 detail::demand_node(inst.supply_count(), e.demand)))
      --components;
  if (components != 1) {
    report.connected = false;
    report.problems.emplace_back(ErrorKind::DisconnectedAllowedGraph,
                                 "allowed graph has " + std::to_string(components) + " components");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Non-degeneracy

/// Proper non-empty subsets I of supplies and J of demands with equal sums
/// make the polytope degenerate.  `exact` is false for faces, where the same
/// subset-sum test is only a heuristic.
struct NondegeneracyCheck {
  bool nondegenerate = true;
  bool exact = true;
  std::vector<int> supply_subset;  // witness, 1-based, empty when non-degenerate
  std::vector<int> demand_subset;

  explicit operator bool() const { return nondegenerate; }
};

namespace detail {

// Every subset sum strictly between 0 and the total, with one subset reaching it.
inline std::map<Flow, std::vector<int>> proper_subset_sums(const std::vector<Flow>& values) {
  std::map<Flow, std::vector<int>> sums{{0, {}}};
  for (std::size_t k = 0; k < values.size(); ++k) {
    std::vector<std::pair<Flow, std::vector<int>>> added;
    for (const auto& [s, subset] : sums) {
      const Flow next = s + values[k];
      if (sums.contains(next)) continue;
      auto extended = subset;
      extended.push_back(static_cast<int>(k) + 1);
      added.emplace_back(next, std::move(extended));
    }
    for (auto& [s, subset] : added) sums.emplace(s, std::move(subset));
  }
  const Flow total = std::accumulate(values.begin(), values.end(), Flow{0});
  sums.erase(0);
  sums.erase(total);
  return sums;
}

}  // namespace detail

inline NondegeneracyCheck check_nondegenerate(const TransportationInstance& inst) {
  NondegeneracyCheck result;
  result.exact = !inst.is_face();
  const auto supply_sums = detail::proper_subset_sums(inst.supplies);
  const auto demand_sums = detail::proper_subset_sums(inst.demands);
  for (const auto& [s, subset] : supply_sums) {
    auto it = demand_sums.find(s);
    if (it == demand_sums.end()) continue;
    result.nondegenerate = false;
    result.supply_subset = subset;
    result.demand_subset = it->second;
    break;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Flows on trees

/// Unique flow on a spanning tree satisfying every margin equation.
template <std::ranges::input_range EdgeRange>
FlowedTree flows_on_tree(const TransportationInstance& inst, const EdgeRange& edges) {
  const int n1 = inst.supply_count();
  const int n2 = inst.demand_count();
  std::vector<Edge> list;
  for (const Edge& e : edges) {
    if (!inst.in_range(e)) throw Error(ErrorKind::IndexOutOfRange, "edge " + to_string(e) + " out of range");
    if (inst.forbidden.contains(e)) throw Error(ErrorKind::UsesForbiddenEdge, "edge " + to_string(e) + " is forbidden");
    list.push_back(e);
  }
  std::sort(list.begin(), list.end());
  if (std::adjacent_find(list.begin(), list.end()) != list.end())
    throw Error(ErrorKind::NotASpanningTree, "duplicate edge in " + detail::edge_list(list));
  if (static_cast<int>(list.size()) != inst.tree_size())
    throw Error(ErrorKind::NotASpanningTree, "expected " + std::to_string(inst.tree_size()) + " edges, got " +
                                                 std::to_string(list.size()));
  detail::UnionFind uf(n1 + n2);
  for (const Edge& e : list)
    if (!uf.unite(detail::supply_node(n1, e.supply), detail::demand_node(n1, e.demand)))
      throw Error(ErrorKind::NotASpanningTree, "edges contain a cycle: " + detail::edge_list(list));

  const auto adj = detail::adjacency_of(n1, n2, list);
  std::vector<Flow> residual(static_cast<std::size_t>(n1 + n2));
  std::copy(inst.supplies.begin(), inst.supplies.end(), residual.begin());
  std::copy(inst.demands.begin(), inst.demands.end(), residual.begin() + n1);
  std::vector<int> degree(residual.size());
  std::vector<bool> done(residual.size(), false);
  std::queue<int> leaves;
  for (std::size_t x = 0; x < adj.size(); ++x) {
    degree[x] = static_cast<int>(adj[x].size());
    if (degree[x] == 1) leaves.push(static_cast<int>(x));
  }

  FlowedTree tree;
  while (!leaves.empty()) {
    const int leaf = leaves.front();
    leaves.pop();
    if (done[leaf] || degree[leaf] != 1) continue;
    for (const auto& inc : adj[leaf]) {
      if (done[inc.neighbor]) continue;
      tree.flow[inc.edge] = residual[leaf];
      residual[inc.neighbor] -= residual[leaf];
      residual[leaf] = 0;
      done[leaf] = true;
      if (--degree[inc.neighbor] == 1) leaves.push(inc.neighbor);
      break;
    }
  }
  return tree;
}

struct VertexCheck {
  bool feasible = false;           // every tree flow >= 0
  bool strictly_positive = false;  // every tree flow > 0 (non-degenerate vertex)

  explicit operator bool() const { return feasible; }
};

inline VertexCheck is_vertex(const FlowedTree& tree) {
  VertexCheck check{true, true};
  for (const auto& [e, f] : tree.flow) {
    if (f < 0) check.feasible = false;
    if (f <= 0) check.strictly_positive = false;
  }
  return check;
}

// ---------------------------------------------------------------------------
// Pivots

struct PivotResult {
  FlowedTree tree;
  Edge leaving;
  Flow step = 0;
};

/// Inserts `enter`, shifts flow around the unique cycle (increase on `enter`,
/// alternating along the cycle) and drops the edge whose flow reaches zero.
inline PivotResult pivot(const TransportationInstance& inst, const FlowedTree& tree, const Edge& enter) {
  if (!inst.in_range(enter)) throw Error(ErrorKind::IndexOutOfRange, "edge " + to_string(enter) + " out of range");
  if (inst.forbidden.contains(enter)) throw Error(ErrorKind::ForbiddenEdge, "edge " + to_string(enter) + " is forbidden");
  if (tree.contains(enter))
    throw Error(ErrorKind::EdgeAlreadyPresent, "edge " + to_string(enter) + " already in tree");

  const int n1 = inst.supply_count();
  const auto adj = detail::adjacency_of(n1, inst.demand_count(), tree.edges());
  // Path from the entering edge's demand back to its supply; its first edge
  // is decreased, then signs alternate.  The path has odd length, so the last
  // edge (at the supply) is decreased as well.
  const auto path =
      detail::tree_path(adj, detail::demand_node(n1, enter.demand), detail::supply_node(n1, enter.supply));
  if (path.empty()) throw Error(ErrorKind::NotASpanningTree, "tree does not connect the endpoints of " + to_string(enter));

  std::optional<Flow> step;
  std::vector<Edge> argmin;
  for (std::size_t k = 0; k < path.size(); k += 2) {
    const Flow f = tree.flow_on(path[k]);
    if (!step || f < *step) {
      step = f;
      argmin = {path[k]};
    } else if (f == *step) {
      argmin.push_back(path[k]);
    }
  }
  if (argmin.size() != 1 || *step <= 0) {
    throw Error(ErrorKind::DegeneratePivot, "entering " + to_string(enter) + ": step " + std::to_string(*step) +
                                                " attained on " + detail::edge_list(argmin));
  }

  PivotResult result{tree, argmin.front(), *step};
  result.tree.flow[enter] = *step;
  for (std::size_t k = 0; k < path.size(); ++k) result.tree.flow[path[k]] += (k % 2 == 0) ? -*step : *step;
  result.tree.flow.erase(result.leaving);
  return result;
}

struct Neighbor {
  Edge enter;
  Edge leaving;
  FlowedTree tree;
};

/// One pivot per allowed non-tree edge, in lexicographic order of the
/// entering edge.
inline std::vector<Neighbor> neighbors(const TransportationInstance& inst, const FlowedTree& tree) {
  std::vector<Neighbor> out;
  for (const Edge& e : inst.allowed_edges()) {
    if (tree.contains(e)) continue;
    auto step = pivot(inst, tree, e);
    out.push_back(Neighbor{e, step.leaving, std::move(step.tree)});
  }
  return out;
}

}  // namespace tpoly

#endif
