#pragma once

// Integer maximum flow (level-graph augmenting paths) and maximum bipartite
// matching. Both are deterministic: arcs are scanned in insertion order and
// matching candidates in increasing index order.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace uac {

using Capacity = std::int64_t;

struct Arc {
  std::size_t from = 0;
  std::size_t to = 0;
  Capacity capacity = 0;
};

class FlowNetwork {
 public:
  FlowNetwork(std::size_t nodes, std::size_t source, std::size_t sink)
      : nodes_(nodes), source_(source), sink_(sink) {
    if (source >= nodes || sink >= nodes) throw std::invalid_argument("terminal out of range");
    if (source == sink) throw std::invalid_argument("source and sink coincide");
  }

  /// Returns the arc index.
  std::size_t add_arc(std::size_t from, std::size_t to, Capacity capacity) {
    if (from >= nodes_ || to >= nodes_) throw std::invalid_argument("arc endpoint out of range");
    if (capacity < 0) throw std::invalid_argument("negative capacity");
    arcs_.push_back({from, to, capacity});
    return arcs_.size() - 1;
  }

  std::size_t node_count() const { return nodes_; }
  std::size_t source() const { return source_; }
  std::size_t sink() const { return sink_; }
  const std::vector<Arc>& arcs() const { return arcs_; }

 private:
  std::size_t nodes_;
  std::size_t source_;
  std::size_t sink_;
  std::vector<Arc> arcs_;
};

struct FlowResult {
  Capacity value = 0;
  std::vector<Capacity> flow;  // per arc, same order as FlowNetwork::arcs()
};

inline FlowResult max_flow(const FlowNetwork& net) {
  const std::size_t n = net.node_count();
  const auto& arcs = net.arcs();
  // Residual edge 2i is arc i, 2i+1 its reverse.
  std::vector<std::size_t> head(2 * arcs.size());
  std::vector<Capacity> residual(2 * arcs.size());
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    head[2 * i] = arcs[i].to;
    head[2 * i + 1] = arcs[i].from;
    residual[2 * i] = arcs[i].capacity;
    residual[2 * i + 1] = 0;
    out[arcs[i].from].push_back(2 * i);
    out[arcs[i].to].push_back(2 * i + 1);
  }

  std::vector<int> level(n);
  std::vector<std::size_t> next(n);
  auto build_levels = [&] {
    std::fill(level.begin(), level.end(), -1);
    std::queue<std::size_t> queue;
    level[net.source()] = 0;
    queue.push(net.source());
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop();
      for (std::size_t e : out[u])
        if (residual[e] > 0 && level[head[e]] < 0) {
          level[head[e]] = level[u] + 1;
          queue.push(head[e]);
        }
    }
    return level[net.sink()] >= 0;
  };
  auto augment = [&](auto&& self, std::size_t u, Capacity limit) -> Capacity {
    if (u == net.sink()) return limit;
    for (; next[u] < out[u].size(); ++next[u]) {
      const std::size_t e = out[u][next[u]];
      const std::size_t v = head[e];
      if (residual[e] <= 0 || level[v] != level[u] + 1) continue;
      const Capacity pushed = self(self, v, std::min(limit, residual[e]));
      if (pushed > 0) {
        residual[e] -= pushed;
        residual[e ^ 1] += pushed;
        return pushed;
      }
    }
    return 0;
  };

  FlowResult result;
  while (build_levels()) {
    std::fill(next.begin(), next.end(), 0);
    while (const Capacity pushed =
               augment(augment, net.source(), std::numeric_limits<Capacity>::max()))
      result.value += pushed;
  }
  result.flow.resize(arcs.size());
  for (std::size_t i = 0; i < arcs.size(); ++i) result.flow[i] = residual[2 * i + 1];
  return result;
}

struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (left, right), sorted by left
  std::size_t size() const { return pairs.size(); }
};

/// Maximum-cardinality matching by repeated augmenting-path search (Kuhn).
inline Matching max_bipartite_matching(std::size_t left_size, std::size_t right_size,
                                       const std::vector<std::pair<std::size_t, std::size_t>>& allowed) {
  std::vector<std::vector<std::size_t>> adj(left_size);
  for (const auto& [l, r] : allowed) {
    if (l >= left_size || r >= right_size) throw std::invalid_argument("matching pair out of range");
    adj[l].push_back(r);
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }

  constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> match_right(right_size, kFree);
  std::vector<std::uint8_t> visited(right_size);
  auto try_augment = [&](auto&& self, std::size_t l) -> bool {
    for (std::size_t r : adj[l]) {
      if (visited[r]) continue;
      visited[r] = 1;
      if (match_right[r] == kFree || self(self, match_right[r])) {
        match_right[r] = l;
        return true;
      }
    }
    return false;
  };
  for (std::size_t l = 0; l < left_size; ++l) {
    std::fill(visited.begin(), visited.end(), 0);
    try_augment(try_augment, l);
  }

  Matching m;
  for (std::size_t r = 0; r < right_size; ++r)
    if (match_right[r] != kFree) m.pairs.emplace_back(match_right[r], r);
  std::sort(m.pairs.begin(), m.pairs.end());
  return m;
}

}  // namespace uac
