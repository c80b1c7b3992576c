#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace smamicro {

/// Dinic max-flow on a directed graph with capacities of type `Cap`.
/// Traversal order is fixed by arc insertion order, so results are
/// deterministic. Residual capacities at or below `tolerance` count as
/// saturated.
template <typename Cap>
class MaxFlow {
 public:
  struct Arc {
    int to;
    int reverse;  ///< index of the paired arc in adjacency_[to]
    Cap capacity;
  };

  explicit MaxFlow(int num_vertices, Cap tolerance = Cap{0})
      : adjacency_(static_cast<std::size_t>(num_vertices)), tolerance_(tolerance) {}

  int num_vertices() const { return static_cast<int>(adjacency_.size()); }

  /// Adds arc from -> to with capacity `forward` and the reverse arc with
  /// capacity `backward`.
  void add_arc(int from, int to, Cap forward, Cap backward = Cap{0}) {
    if (forward < Cap{0} || backward < Cap{0}) throw std::invalid_argument("negative arc capacity");
    if (from == to) return;
    const int fi = static_cast<int>(adjacency_[from].size());
    const int ti = static_cast<int>(adjacency_[to].size());
    adjacency_[from].push_back({to, ti, forward});
    adjacency_[to].push_back({from, fi, backward});
  }

  Cap solve(int source, int sink) {
    Cap total{0};
    while (build_levels(source, sink)) {
      next_arc_.assign(adjacency_.size(), 0);
      while (true) {
        const Cap pushed = augment(source, sink, std::numeric_limits<Cap>::max());
        if (!(pushed > tolerance_)) break;
        total += pushed;
      }
    }
    return total;
  }

  /// Vertices reachable from `source` through arcs with positive residual.
  /// Valid after solve(); this is the minimal source side of a minimum cut.
  std::vector<bool> source_side(int source) const {
    std::vector<bool> seen(adjacency_.size(), false);
    std::vector<int> stack{source};
    seen[source] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const Arc& a : adjacency_[v]) {
        if (a.capacity > tolerance_ && !seen[a.to]) {
          seen[a.to] = true;
          stack.push_back(a.to);
        }
      }
    }
    return seen;
  }

  const std::vector<Arc>& arcs_from(int v) const { return adjacency_[v]; }
  bool has_residual(const Arc& a) const { return a.capacity > tolerance_; }

 private:
  bool build_levels(int source, int sink) {
    level_.assign(adjacency_.size(), -1);
    std::queue<int> queue;
    level_[source] = 0;
    queue.push(source);
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop();
      for (const Arc& a : adjacency_[v]) {
        if (a.capacity > tolerance_ && level_[a.to] < 0) {
          level_[a.to] = level_[v] + 1;
          queue.push(a.to);
        }
      }
    }
    return level_[sink] >= 0;
  }

  Cap augment(int v, int sink, Cap limit) {
    if (v == sink) return limit;
    for (std::size_t& i = next_arc_[v]; i < adjacency_[v].size(); ++i) {
      Arc& a = adjacency_[v][i];
      if (!(a.capacity > tolerance_) || level_[a.to] != level_[v] + 1) continue;
      const Cap pushed = augment(a.to, sink, std::min(limit, a.capacity));
      if (pushed > tolerance_) {
        a.capacity -= pushed;
        adjacency_[a.to][a.reverse].capacity += pushed;
        return pushed;
      }
    }
    return Cap{0};
  }

  std::vector<std::vector<Arc>> adjacency_;
  std::vector<int> level_;
  std::vector<std::size_t> next_arc_;
  Cap tolerance_;
};

}  // namespace smamicro
