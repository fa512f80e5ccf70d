#ifndef TPOLY_WALK_HPP
#define TPOLY_WALK_HPP

// Constructive walk between two vertices O and F of a non-degenerate
// transportation polytope (or a face of one).
//
// The edges of F are labelled + / - alternately along every path leaving a
// chosen demand node.  Each iteration shades one edge of F incident to the
// current supply node, inserting it by a pivot when it is not yet present.
// The - edges of a supply node are handled before its single + edge, and the
// next supply node is picked so that a shaded edge can never be the one that
// leaves.  Every F-edge is shaded exactly once, so the walk performs
// |F \ O| pivots in N1+N2-1 iterations.

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "tpoly/core.hpp"

namespace tpoly {

enum class Sign { Plus, Minus };

inline constexpr char sign_char(Sign s) { return s == Sign::Plus ? '+' : '-'; }

struct EdgeLabeling {
  int star_demand = 1;
  std::map<Edge, Sign> label;

  bool contains(const Edge& e) const { return label.contains(e); }
  Sign at(const Edge& e) const { return label.at(e); }
};

/// Breadth-first from the star demand over the edges of F; an edge at odd
/// depth is +, at even depth -.
inline EdgeLabeling label_edges(const TransportationInstance& inst, const FlowedTree& final_tree, int star_demand) {
  if (star_demand < 1 || star_demand > inst.demand_count())
    throw Error(ErrorKind::IndexOutOfRange, "star demand " + std::to_string(star_demand) + " out of range");
  const int n1 = inst.supply_count();
  const auto adj = detail::adjacency_of(n1, inst.demand_count(), final_tree.edges());
  EdgeLabeling labeling;
  labeling.star_demand = star_demand;
  std::vector<int> depth(adj.size(), -1);
  std::queue<int> queue;
  const int root = detail::demand_node(n1, star_demand);
  depth[root] = 0;
  queue.push(root);
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop();
    for (const auto& inc : adj[x]) {
      if (depth[inc.neighbor] != -1) continue;
      depth[inc.neighbor] = depth[x] + 1;
      labeling.label[inc.edge] = (depth[inc.neighbor] % 2 == 1) ? Sign::Plus : Sign::Minus;
      queue.push(inc.neighbor);
    }
  }
  if (labeling.label.size() != final_tree.size())
    throw Error(ErrorKind::NotASpanningTree, "final tree is not connected");
  return labeling;
}

/// Partially shaded current tree during a walk.
struct WalkState {
  FlowedTree current;
  EdgeSet shaded;
  EdgeLabeling labeling;
  int current_supply = 1;
  int supply_count = 0;
  int demand_count = 0;
};

// ---------------------------------------------------------------------------
// Well-connectedness

struct NodeRef {
  bool is_supply = true;
  int index = 0;  // 1-based

  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

inline std::string to_string(const NodeRef& n) { return (n.is_supply ? "s" : "d") + std::to_string(n.index); }

struct WellConnectedComponent {
  std::vector<NodeRef> nodes;
  std::vector<NodeRef> open_nodes;
  std::vector<Edge> edges;  // well-connected edges inside the component
};

namespace detail {

inline NodeRef node_ref(int n1, int node) {
  return node < n1 ? NodeRef{true, node + 1} : NodeRef{false, node - n1 + 1};
}

// A supply node is well-connected iff it carries a shaded + edge; a demand
// node iff no unshaded tree edge touches it.
inline std::vector<bool> well_connected_nodes(const WalkState& state) {
  const int n1 = state.supply_count;
  std::vector<bool> wc(static_cast<std::size_t>(n1 + state.demand_count), false);
  for (int j = 1; j <= state.demand_count; ++j) wc[demand_node(n1, j)] = true;
  for (const Edge& e : state.current.edges()) {
    const bool shaded = state.shaded.contains(e);
    if (!shaded) wc[demand_node(n1, e.demand)] = false;
    if (shaded && state.labeling.contains(e) && state.labeling.at(e) == Sign::Plus)
      wc[supply_node(n1, e.supply)] = true;
  }
  return wc;
}

}  // namespace detail

inline std::vector<WellConnectedComponent> well_connected_components(const WalkState& state) {
  const int n1 = state.supply_count;
  const int total = n1 + state.demand_count;
  const auto wc = detail::well_connected_nodes(state);
  detail::UnionFind uf(total);
  std::vector<Edge> wc_edges;
  for (const Edge& e : state.shaded) {
    if (!state.current.contains(e)) continue;
    const int s = detail::supply_node(n1, e.supply);
    const int d = detail::demand_node(n1, e.demand);
    if (!wc[s] && !wc[d]) continue;
    uf.unite(s, d);
    wc_edges.push_back(e);
  }
  std::map<int, WellConnectedComponent> by_root;
  for (int x = 0; x < total; ++x) {
    auto& comp = by_root[uf.find(x)];
    const NodeRef ref = detail::node_ref(n1, x);
    comp.nodes.push_back(ref);
    if (!wc[x]) comp.open_nodes.push_back(ref);
  }
  for (const Edge& e : wc_edges)
    by_root[uf.find(detail::supply_node(n1, e.supply))].edges.push_back(e);
  std::vector<WellConnectedComponent> out;
  for (auto& [root, comp] : by_root) out.push_back(std::move(comp));
  return out;
}

enum class UnoResult { Holds, Violated, Terminal };

inline std::string_view to_string(UnoResult r) {
  switch (r) {
    case UnoResult::Holds: return "holds";
    case UnoResult::Violated: return "violated";
    case UnoResult::Terminal: return "terminal";
  }
  return "?";
}

/// Unique open node per component.  A state with no open node at all is the
/// fully shaded final tree.
inline UnoResult check_uno(const WalkState& state) {
  const auto components = well_connected_components(state);
  bool all_closed = true;
  bool all_unique = true;
  for (const auto& c : components) {
    if (!c.open_nodes.empty()) all_closed = false;
    if (c.open_nodes.size() != 1) all_unique = false;
  }
  if (all_closed) return UnoResult::Terminal;
  return all_unique ? UnoResult::Holds : UnoResult::Violated;
}

/// Edges of the current tree at odd distance rank from `sigma` (the edges at
/// sigma have rank 1).
inline std::vector<Edge> odd_edges_from(const WalkState& state, int sigma) {
  const int n1 = state.supply_count;
  const auto adj = detail::adjacency_of(n1, state.demand_count, state.current.edges());
  std::vector<int> depth(adj.size(), -1);
  std::queue<int> queue;
  const int root = detail::supply_node(n1, sigma);
  depth[root] = 0;
  queue.push(root);
  std::vector<Edge> odd;
  while (!queue.empty()) {
    const int x = queue.front();
    queue.pop();
    for (const auto& inc : adj[x]) {
      if (depth[inc.neighbor] != -1) continue;
      depth[inc.neighbor] = depth[x] + 1;
      if (depth[inc.neighbor] % 2 == 1) odd.push_back(inc.edge);
      queue.push(inc.neighbor);
    }
  }
  std::sort(odd.begin(), odd.end());
  return odd;
}

/// Every odd edge seen from `sigma` is unshaded, or a shaded - edge whose
/// demand node is well-connected.
inline bool check_sin(const WalkState& state, int sigma) {
  if (sigma < 1 || sigma > state.supply_count)
    throw Error(ErrorKind::IndexOutOfRange, "supply " + std::to_string(sigma) + " out of range");
  const auto wc = detail::well_connected_nodes(state);
  for (const Edge& e : odd_edges_from(state, sigma)) {
    if (!state.shaded.contains(e)) continue;
    if (!state.labeling.contains(e) || state.labeling.at(e) != Sign::Minus) return false;
    if (!wc[detail::demand_node(state.supply_count, e.demand)]) return false;
  }
  return true;
}

/// No shaded + edge touches an open supply node, where "open" means some
/// F-edge at the node is missing from the tree or still unshaded.
inline bool check_no_open_plus(const WalkState& state) {
  for (const Edge& e : state.shaded) {
    if (state.labeling.at(e) != Sign::Plus) continue;
    for (const auto& [f, s] : state.labeling.label) {
      if (f.supply != e.supply) continue;
      if (!state.current.contains(f) || !state.shaded.contains(f)) return false;
    }
  }
  return true;
}

/// No demand node whose tree edges are all shaded + edges.
inline bool check_no_all_plus_demand(const WalkState& state) {
  std::vector<int> edges_at(static_cast<std::size_t>(state.demand_count + 1), 0);
  std::vector<int> shaded_plus_at(edges_at.size(), 0);
  for (const Edge& e : state.current.edges()) {
    ++edges_at[e.demand];
    if (state.shaded.contains(e) && state.labeling.at(e) == Sign::Plus) ++shaded_plus_at[e.demand];
  }
  for (int j = 1; j <= state.demand_count; ++j)
    if (edges_at[j] > 0 && edges_at[j] == shaded_plus_at[j]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Supply-node update

/// An unshaded tree edge at `delta_prime` gives the next supply node (lowest
/// supply index if several); otherwise the supply end of the - edge of F at
/// `delta_prime`.
inline int find_new_supply(const WalkState& state, int delta_prime) {
  std::optional<int> unshaded;
  for (const Edge& e : state.current.edges()) {
    if (e.demand != delta_prime || state.shaded.contains(e)) continue;
    if (!unshaded || e.supply < *unshaded) unshaded = e.supply;
  }
  if (unshaded) return *unshaded;
  for (const auto& [e, s] : state.labeling.label)
    if (e.demand == delta_prime && s == Sign::Minus) return e.supply;
  throw Error(ErrorKind::NoMinusEdge, "demand " + std::to_string(delta_prime) + " has no - edge in the final tree");
}

// ---------------------------------------------------------------------------
// The walk

enum class WalkAction { ShadeOnly, InsertAndShade };

inline std::string_view to_string(WalkAction a) {
  return a == WalkAction::ShadeOnly ? "shade" : "insert";
}

struct IterationDiagnostics {
  bool sin_before = true;        // SIN for the supply node used by the iteration
  UnoResult uno_after = UnoResult::Holds;
  bool no_open_plus = true;
  bool no_all_plus_demand = true;
};

struct WalkIteration {
  int index = 0;  // 1-based
  int sigma = 0;  // supply node the iteration worked on
  Edge edge;      // edge of F that was shaded
  Sign sign = Sign::Plus;
  WalkAction action = WalkAction::ShadeOnly;
  std::optional<Edge> leaving;
  int delta_prime = 0;
  std::optional<int> next_sigma;  // empty on the last iteration
  FlowedTree tree;                // tree after the iteration
  std::optional<IterationDiagnostics> diagnostics;
};

struct WalkTrace {
  TransportationInstance instance;
  FlowedTree origin;
  FlowedTree final_tree;
  EdgeLabeling labeling;
  int initial_supply = 1;
  std::vector<WalkIteration> iterations;
  int pivot_count = 0;

  /// The vertex sequence O, ..., F (shade-only iterations do not move).
  std::vector<FlowedTree> vertex_sequence() const {
    std::vector<FlowedTree> out{origin};
    for (const auto& it : iterations)
      if (it.action == WalkAction::InsertAndShade) out.push_back(it.tree);
    return out;
  }
};

struct WalkOptions {
  int star_demand = 1;
  int initial_supply = 1;
  bool verify = false;  // run UNO/SIN diagnostics after every iteration
};

namespace detail {

inline FlowedTree require_vertex(const TransportationInstance& inst, const FlowedTree& tree, const char* name) {
  FlowedTree recomputed;
  try {
    recomputed = flows_on_tree(inst, tree.edges());
  } catch (const Error& e) {
    throw Error(ErrorKind::NonVertexInput, std::string(name) + ": " + e.what());
  }
  if (!is_vertex(recomputed).strictly_positive)
    throw Error(ErrorKind::NonVertexInput,
                std::string(name) + " is not a non-degenerate vertex: " + edge_list(recomputed.edges()));
  return recomputed;
}

inline void fail_diagnostic(const WalkIteration& it, const std::string& what) {
  throw Error(ErrorKind::DiagnosticFailure, "iteration " + std::to_string(it.index) + ": " + what);
}

}  // namespace detail

inline WalkTrace hirsch_walk(const TransportationInstance& inst, const FlowedTree& origin,
                             const FlowedTree& final_tree, const WalkOptions& options = {}) {
  if (options.initial_supply < 1 || options.initial_supply > inst.supply_count())
    throw Error(ErrorKind::IndexOutOfRange, "initial supply " + std::to_string(options.initial_supply) + " out of range");

  WalkTrace trace;
  trace.instance = inst;
  trace.origin = detail::require_vertex(inst, origin, "origin");
  trace.final_tree = detail::require_vertex(inst, final_tree, "final tree");
  trace.labeling = label_edges(inst, trace.final_tree, options.star_demand);
  trace.initial_supply = options.initial_supply;

  WalkState state{trace.origin, {}, trace.labeling, options.initial_supply, inst.supply_count(), inst.demand_count()};
  const int star = options.star_demand;
  const int max_iterations = inst.tree_size();

  for (int index = 1;; ++index) {
    if (index > max_iterations)
      throw Error(ErrorKind::DiagnosticFailure, "walk did not stop after " + std::to_string(max_iterations) + " iterations");
    WalkIteration it;
    it.index = index;
    it.sigma = state.current_supply;
    if (options.verify) it.diagnostics = IterationDiagnostics{};
    if (it.diagnostics) {
      it.diagnostics->sin_before = check_sin(state, it.sigma);
      if (!it.diagnostics->sin_before) detail::fail_diagnostic(it, "SIN fails for supply " + std::to_string(it.sigma));
    }

    // All unshaded - edges first (lowest demand index), then the + edge.
    std::optional<Edge> chosen;
    for (const auto& [e, s] : trace.labeling.label) {
      if (e.supply != it.sigma || state.shaded.contains(e)) continue;
      if (s == Sign::Minus) {
        chosen = e;
        break;
      }
      if (!chosen) chosen = e;
    }
    if (!chosen)
      throw Error(ErrorKind::NoEdgeToShade, "supply " + std::to_string(it.sigma) + " has no unshaded edge of F");
    it.edge = *chosen;
    it.sign = trace.labeling.at(it.edge);

    if (state.current.contains(it.edge)) {
      it.action = WalkAction::ShadeOnly;
      it.delta_prime = it.edge.demand;
    } else {
      auto step = pivot(inst, state.current, it.edge);
      if (state.shaded.contains(step.leaving))
        throw Error(ErrorKind::ShadedEdgeDeleted, "iteration " + std::to_string(index) + ": inserting " +
                                                      to_string(it.edge) + " removes shaded " + to_string(step.leaving));
      it.action = WalkAction::InsertAndShade;
      it.leaving = step.leaving;
      it.delta_prime = step.leaving.demand;
      state.current = std::move(step.tree);
      ++trace.pivot_count;
    }
    state.shaded.insert(it.edge);
    it.tree = state.current;

    bool star_done = true;
    for (const Edge& e : state.current.edges())
      if (e.demand == star && !state.shaded.contains(e)) star_done = false;

    if (!star_done) {
      state.current_supply = find_new_supply(state, it.delta_prime);
      it.next_sigma = state.current_supply;
    }
    if (it.diagnostics) {
      auto& diag = *it.diagnostics;
      diag.uno_after = check_uno(state);
      diag.no_open_plus = check_no_open_plus(state);
      diag.no_all_plus_demand = star_done || check_no_all_plus_demand(state);
      const auto expected = star_done ? UnoResult::Terminal : UnoResult::Holds;
      if (diag.uno_after != expected)
        detail::fail_diagnostic(it, "UNO " + std::string(to_string(diag.uno_after)) + ", expected " +
                                        std::string(to_string(expected)));
      if (!diag.no_open_plus) detail::fail_diagnostic(it, "shaded + edge at an open supply node");
      if (!diag.no_all_plus_demand) detail::fail_diagnostic(it, "demand node with only shaded + edges");
    }
    trace.iterations.push_back(std::move(it));
    if (star_done) break;
  }

  if (state.current.edge_set() != trace.final_tree.edge_set() || state.shaded.size() != trace.final_tree.size())
    throw Error(ErrorKind::DiagnosticFailure, "walk stopped before reaching the final tree");
  return trace;
}

struct ExhaustiveWalkResult {
  int best_pivot_count = std::numeric_limits<int>::max();
  int best_star_demand = 1;
  int best_initial_supply = 1;
  // pivot_counts[star-1][supply-1]
  std::vector<std::vector<int>> pivot_counts;
};

/// Runs the walk for every (star demand, initial supply) choice.
inline ExhaustiveWalkResult hirsch_walk_exhaustive(const TransportationInstance& inst, const FlowedTree& origin,
                                                   const FlowedTree& final_tree, bool verify = false) {
  ExhaustiveWalkResult result;
  result.pivot_counts.assign(static_cast<std::size_t>(inst.demand_count()),
                             std::vector<int>(static_cast<std::size_t>(inst.supply_count()), 0));
  for (int star = 1; star <= inst.demand_count(); ++star) {
    for (int sigma = 1; sigma <= inst.supply_count(); ++sigma) {
      const auto trace = hirsch_walk(inst, origin, final_tree, WalkOptions{star, sigma, verify});
      result.pivot_counts[star - 1][sigma - 1] = trace.pivot_count;
      if (trace.pivot_count < result.best_pivot_count) {
        result.best_pivot_count = trace.pivot_count;
        result.best_star_demand = star;
        result.best_initial_supply = sigma;
      }
    }
  }
  return result;
}

}  // namespace tpoly

#endif
