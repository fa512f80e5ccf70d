#ifndef TPOLY_REDUCTION_HPP
#define TPOLY_REDUCTION_HPP

// Capacitated network-flow polytopes as faces of transportation polytopes.
//
// Every arc a = (i -> j) with capacity c_a becomes a demand node with margin
// c_a, joined only to the supply nodes i and j.  The supply margin of node i
// is its excess plus the capacities of the arcs entering it.  A network flow
// x maps to y_{i,a} = x_a and y_{j,a} = c_a - x_a.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tpoly/core.hpp"
#include "tpoly/oracle.hpp"

namespace tpoly {

struct Arc {
  int tail = 0;  // 1-based node index
  int head = 0;
  std::optional<Flow> capacity;  // empty means unbounded

  bool infinite() const { return !capacity.has_value(); }
  friend bool operator==(const Arc&, const Arc&) = default;
};

struct Network {
  std::vector<Flow> excess;  // b_1..b_n, sums to zero
  std::vector<Arc> arcs;
  std::vector<std::string> names;  // optional node names

  int node_count() const { return static_cast<int>(excess.size()); }
  int arc_count() const { return static_cast<int>(arcs.size()); }
  std::string node_name(int node) const {
    return names.size() == excess.size() ? names[node - 1] : std::to_string(node);
  }
  friend bool operator==(const Network&, const Network&) = default;
};

using NetworkFlow = std::vector<Flow>;  // one entry per arc

inline void validate_network(const Network& net) {
  if (net.excess.empty()) throw Error(ErrorKind::InvalidNetwork, "network has no nodes");
  if (!net.names.empty() && net.names.size() != net.excess.size())
    throw Error(ErrorKind::InvalidNetwork, "node name count does not match excess count");
  Flow sum = 0;
  for (Flow b : net.excess) sum += b;
  if (sum != 0) throw Error(ErrorKind::Unbalanced, "excesses sum to " + std::to_string(sum));
  for (int a = 0; a < net.arc_count(); ++a) {
    const Arc& arc = net.arcs[a];
    const std::string where = "arc " + std::to_string(a + 1);
    if (arc.tail < 1 || arc.tail > net.node_count() || arc.head < 1 || arc.head > net.node_count())
      throw Error(ErrorKind::IndexOutOfRange, where + " has an endpoint out of range");
    if (arc.tail == arc.head) throw Error(ErrorKind::InvalidNetwork, where + " is a self-loop");
    if (arc.capacity && *arc.capacity <= 0)
      throw Error(ErrorKind::InvalidNetwork, where + " has non-positive capacity");
  }
}

/// The flow polyhedron is bounded iff the unbounded arcs contain no directed
/// cycle.
inline bool check_bounded(const Network& net) {
  validate_network(net);
  const int n = net.node_count();
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n + 1));
  for (const Arc& arc : net.arcs)
    if (arc.infinite()) out[arc.tail].push_back(arc.head);
  enum class Mark { New, Active, Done };
  std::vector<Mark> mark(out.size(), Mark::New);
  std::function<bool(int)> has_cycle = [&](int x) {
    mark[x] = Mark::Active;
    for (int y : out[x]) {
      if (mark[y] == Mark::Active) return true;
      if (mark[y] == Mark::New && has_cycle(y)) return true;
    }
    mark[x] = Mark::Done;
    return false;
  };
  for (int x = 1; x <= n; ++x)
    if (mark[x] == Mark::New && has_cycle(x)) return false;
  return true;
}

/// 1 + (sum of positive excesses) + (sum of finite capacities); strictly
/// larger than any feasible arc flow of a bounded network.
inline Flow infinite_capacity_replacement(const Network& net) {
  Flow bound = 1;
  for (Flow b : net.excess) bound += std::max<Flow>(b, 0);
  for (const Arc& arc : net.arcs)
    if (arc.capacity) bound += *arc.capacity;
  return bound;
}

inline Network finite_capacitate(const Network& net) {
  if (!check_bounded(net)) throw Error(ErrorKind::UnboundedNetwork, "unbounded arcs contain a directed cycle");
  Network out = net;
  const Flow bound = infinite_capacity_replacement(net);
  for (Arc& arc : out.arcs)
    if (arc.infinite()) arc.capacity = bound;
  return out;
}

struct ReductionMap {
  Network source;                  // finite-capacitated network
  TransportationInstance target;   // N1 = n supplies, N2 = m demands
  std::vector<int> arc_to_demand;  // arc index (0-based) -> demand index (1-based)

  Edge tail_edge(int arc) const { return Edge{source.arcs[arc].tail, arc_to_demand[arc]}; }
  Edge head_edge(int arc) const { return Edge{source.arcs[arc].head, arc_to_demand[arc]}; }
  int bound() const { return source.node_count() + source.arc_count() - 1; }
};

inline ReductionMap reduce_to_transportation(const Network& input) {
  ReductionMap map;
  map.source = finite_capacitate(input);
  const Network& net = map.source;
  const int n = net.node_count();
  const int m = net.arc_count();
  if (m == 0) throw Error(ErrorKind::InvalidNetwork, "network has no arcs");

  map.target.supplies = net.excess;
  map.target.demands.resize(static_cast<std::size_t>(m));
  EdgeSet allowed;
  for (int a = 0; a < m; ++a) {
    const Arc& arc = net.arcs[a];
    map.arc_to_demand.push_back(a + 1);
    map.target.demands[a] = *arc.capacity;
    map.target.supplies[arc.head - 1] += *arc.capacity;
    allowed.insert(Edge{arc.tail, a + 1});
    allowed.insert(Edge{arc.head, a + 1});
  }
  for (int i = 1; i <= n; ++i) {
    if (map.target.supplies[i - 1] <= 0)
      throw Error(ErrorKind::NonPositiveMargin, "node " + net.node_name(i) + " gets supply margin " +
                                                    std::to_string(map.target.supplies[i - 1]));
    for (int j = 1; j <= m; ++j)
      if (!allowed.contains(Edge{i, j})) map.target.forbidden.insert(Edge{i, j});
  }
  return map;
}

/// True iff x satisfies 0 <= x <= c and out-flow minus in-flow equals the
/// excess at every node.
inline bool network_flow_feasible(const Network& net, const NetworkFlow& x) {
  if (static_cast<int>(x.size()) != net.arc_count()) return false;
  std::vector<Flow> balance(static_cast<std::size_t>(net.node_count()), 0);
  for (int a = 0; a < net.arc_count(); ++a) {
    const Arc& arc = net.arcs[a];
    if (x[a] < 0 || (arc.capacity && x[a] > *arc.capacity)) return false;
    balance[arc.tail - 1] += x[a];
    balance[arc.head - 1] -= x[a];
  }
  return balance == net.excess;
}

inline FlowVector map_flow_forward(const ReductionMap& map, const NetworkFlow& x) {
  if (!network_flow_feasible(map.source, x)) throw Error(ErrorKind::InfeasibleFlow, "network flow is infeasible");
  FlowVector y;
  for (int a = 0; a < map.source.arc_count(); ++a) {
    const Flow c = *map.source.arcs[a].capacity;
    if (x[a] != 0) y[map.tail_edge(a)] = x[a];
    if (c - x[a] != 0) y[map.head_edge(a)] = c - x[a];
  }
  return y;
}

/// Checks the margins, sign and forbidden-edge conditions of a face flow.
inline bool transportation_flow_feasible(const TransportationInstance& inst, const FlowVector& y) {
  std::vector<Flow> out(inst.supplies.size(), 0);
  std::vector<Flow> in(inst.demands.size(), 0);
  for (const auto& [e, f] : y) {
    if (!inst.allowed(e) || f < 0) return false;
    out[e.supply - 1] += f;
    in[e.demand - 1] += f;
  }
  return out == inst.supplies && in == inst.demands;
}

inline NetworkFlow map_flow_backward(const ReductionMap& map, const FlowVector& y) {
  if (!transportation_flow_feasible(map.target, y))
    throw Error(ErrorKind::InfeasibleFlow, "transportation flow is infeasible for the face");
  NetworkFlow x(static_cast<std::size_t>(map.source.arc_count()));
  for (int a = 0; a < map.source.arc_count(); ++a) {
    auto it = y.find(map.tail_edge(a));
    x[a] = it == y.end() ? 0 : it->second;
  }
  return x;
}

/// Vertices of the network polytope, obtained from the vertices of the
/// reduced face.
inline std::vector<NetworkFlow> enumerate_network_vertices(const ReductionMap& map,
                                                           std::uint64_t budget = kDefaultTreeBudget) {
  std::vector<NetworkFlow> out;
  for (const auto& y : enumerate_vertex_flows(map.target, budget)) out.push_back(map_flow_backward(map, y));
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Incidence-matrix identity

using IntMatrix = std::vector<std::vector<Flow>>;

namespace detail {

inline IntMatrix zeros(int rows, int cols) {
  return IntMatrix(static_cast<std::size_t>(rows), std::vector<Flow>(static_cast<std::size_t>(cols), 0));
}

inline IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  const int rows = static_cast<int>(a.size());
  const int inner = static_cast<int>(b.size());
  const int cols = inner == 0 ? 0 : static_cast<int>(b.front().size());
  IntMatrix c = zeros(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < inner; ++k)
      if (a[i][k] != 0)
        for (int j = 0; j < cols; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline void place(IntMatrix& dst, const IntMatrix& block, int row, int col) {
  for (std::size_t i = 0; i < block.size(); ++i)
    for (std::size_t j = 0; j < block[i].size(); ++j) dst[row + i][col + j] = block[i][j];
}

inline IntMatrix identity(int n, Flow scale = 1) {
  IntMatrix m = zeros(n, n);
  for (int i = 0; i < n; ++i) m[i][i] = scale;
  return m;
}

}  // namespace detail

/// Node-arc incidence matrix: +1 at the tail, -1 at the head.
inline IntMatrix incidence_matrix(const Network& net) {
  IntMatrix phi = detail::zeros(net.node_count(), net.arc_count());
  for (int a = 0; a < net.arc_count(); ++a) {
    phi[net.arcs[a].tail - 1][a] = 1;
    phi[net.arcs[a].head - 1][a] = -1;
  }
  return phi;
}

struct IncidenceIdentityReport {
  bool matrices_equal = false;
  bool excess_equal = false;
  IntMatrix product;           // [[I, T], [0, -I]] * [[Phi, 0], [I, I]]
  IntMatrix split_incidence;   // incidence matrix of the arc-split network
  std::vector<Flow> split_excess;

  explicit operator bool() const { return matrices_equal && excess_equal; }
};

/// Builds the incidence matrix of the arc-split network directly and compares
/// it with the block product, and the transformed right-hand side with the
/// margins of the reduction.
inline IncidenceIdentityReport verify_incidence_identity(const Network& input) {
  const Network net = finite_capacitate(input);
  const int n = net.node_count();
  const int m = net.arc_count();
  const IntMatrix phi = incidence_matrix(net);
  IntMatrix heads = detail::zeros(n, m);  // +1 at the head of each arc
  for (int a = 0; a < m; ++a) heads[net.arcs[a].head - 1][a] = 1;

  IntMatrix left = detail::zeros(n + m, n + m);
  detail::place(left, detail::identity(n), 0, 0);
  detail::place(left, heads, 0, n);
  detail::place(left, detail::identity(m, -1), n, n);

  IntMatrix extended = detail::zeros(n + m, 2 * m);
  detail::place(extended, phi, 0, 0);
  detail::place(extended, detail::identity(m), n, 0);
  detail::place(extended, detail::identity(m), n, m);

  IncidenceIdentityReport report;
  report.product = detail::multiply(left, extended);

  // Arc a splits into (tail -> new node a) and (head -> new node a).
  report.split_incidence = detail::zeros(n + m, 2 * m);
  for (int a = 0; a < m; ++a) {
    report.split_incidence[net.arcs[a].tail - 1][a] = 1;
    report.split_incidence[n + a][a] = -1;
    report.split_incidence[net.arcs[a].head - 1][m + a] = 1;
    report.split_incidence[n + a][m + a] = -1;
  }
  report.matrices_equal = report.product == report.split_incidence;

  IntMatrix rhs = detail::zeros(n + m, 1);
  for (int i = 0; i < n; ++i) rhs[i][0] = net.excess[i];
  for (int a = 0; a < m; ++a) rhs[n + a][0] = *net.arcs[a].capacity;
  const IntMatrix transformed = detail::multiply(left, rhs);
  for (const auto& row : transformed) report.split_excess.push_back(row[0]);

  std::vector<Flow> expected(net.excess);
  for (int a = 0; a < m; ++a) expected[net.arcs[a].head - 1] += *net.arcs[a].capacity;
  for (int a = 0; a < m; ++a) expected.push_back(-*net.arcs[a].capacity);
  report.excess_equal = report.split_excess == expected;
  return report;
}

}  // namespace tpoly

#endif
