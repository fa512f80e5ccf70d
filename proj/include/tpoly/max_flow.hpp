#ifndef TPOLY_MAX_FLOW_HPP
#define TPOLY_MAX_FLOW_HPP

#include <algorithm>
#include <limits>
#include <queue>
#include <vector>

namespace tpoly {

/// Dinic's algorithm on a small dense-ish graph.  Capacities are exact
/// integers; Cap must be a signed integral type.
template <class Cap>
class MaxFlow {
 public:
  explicit MaxFlow(int nodes) : graph_(static_cast<std::size_t>(nodes)) {}

  int add_arc(int from, int to, Cap capacity) {
    graph_[from].push_back({to, static_cast<int>(graph_[to].size()), capacity});
    graph_[to].push_back({from, static_cast<int>(graph_[from].size()) - 1, Cap{0}});
    return static_cast<int>(graph_[from].size()) - 1;
  }

  Cap run(int source, int sink) {
    Cap total{0};
    while (build_levels(source, sink)) {
      next_.assign(graph_.size(), 0);
      while (Cap pushed = push(source, sink, std::numeric_limits<Cap>::max())) total += pushed;
    }
    return total;
  }

 private:
  struct Arc {
    int to;
    int reverse;
    Cap residual;
  };

  bool build_levels(int source, int sink) {
    level_.assign(graph_.size(), -1);
    std::queue<int> queue;
    level_[source] = 0;
    queue.push(source);
    while (!queue.empty()) {
      const int x = queue.front();
      queue.pop();
      for (const Arc& a : graph_[x]) {
        if (a.residual <= 0 || level_[a.to] != -1) continue;
        level_[a.to] = level_[x] + 1;
        queue.push(a.to);
      }
    }
    return level_[sink] != -1;
  }

  Cap push(int x, int sink, Cap limit) {
    if (x == sink) return limit;
    for (int& k = next_[x]; k < static_cast<int>(graph_[x].size()); ++k) {
      Arc& a = graph_[x][k];
      if (a.residual <= 0 || level_[a.to] != level_[x] + 1) continue;
      if (Cap pushed = push(a.to, sink, std::min(limit, a.residual))) {
        a.residual -= pushed;
        graph_[a.to][a.reverse].residual += pushed;
        return pushed;
      }
    }
    return Cap{0};
  }

  std::vector<std::vector<Arc>> graph_;
  std::vector<int> level_;
  std::vector<int> next_;
};

}  // namespace tpoly

#endif
