#pragma once

// Forbidden-state fixed point. A pair (x, y) survives a generation when the
// bipartite transport network between N(x) and N(y), restricted to pairs
// that are still allowed, can route 1/d(x) out of every left node and
// 1/d(y) into every right node. Pairs that fail are added to the next
// generation; the closure is empty of survivors exactly when no uniform
// avoidance coupling exists.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "uac/graph.hpp"
#include "uac/kernel.hpp"
#include "uac/maxflow.hpp"

namespace uac {

/// Set of ordered vertex pairs over a fixed vertex count.
class PairSet {
 public:
  PairSet() = default;
  explicit PairSet(std::size_t n) : n_(n), bits_(n * n, 0) {}

  static PairSet all(std::size_t n) {
    PairSet s(n);
    std::fill(s.bits_.begin(), s.bits_.end(), 1);
    s.count_ = n * n;
    return s;
  }

  std::size_t vertex_count() const { return n_; }
  std::size_t count() const { return count_; }
  bool full() const { return count_ == n_ * n_; }

  bool contains(VertexId x, VertexId y) const { return bits_[x * n_ + y] != 0; }
  bool contains(StatePair s) const { return contains(s.x, s.y); }

  void insert(VertexId x, VertexId y) {
    auto& b = bits_[x * n_ + y];
    if (!b) {
      b = 1;
      ++count_;
    }
  }

  bool is_subset_of(const PairSet& other) const {
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i] && !other.bits_[i]) return false;
    return true;
  }

  /// Pairs not in the set, in lexicographic order.
  std::vector<StatePair> complement_pairs() const {
    std::vector<StatePair> out;
    for (VertexId x = 0; x < n_; ++x)
      for (VertexId y = 0; y < n_; ++y)
        if (!contains(x, y)) out.push_back({x, y});
    return out;
  }

  friend bool operator==(const PairSet& a, const PairSet& b) {
    return a.n_ == b.n_ && a.bits_ == b.bits_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
  std::size_t count_ = 0;
};

/// F0: the diagonal plus every adjacent pair (loops included).
inline PairSet initial_forbidden(const Graph& g) {
  PairSet f(g.order());
  for (VertexId x = 0; x < g.order(); ++x) {
    f.insert(x, x);
    for (VertexId y : g.neighbors(x)) f.insert(x, y);
  }
  return f;
}

inline Capacity checked_lcm(Capacity a, Capacity b) {
  Capacity product = 0;
  if (__builtin_mul_overflow(a, b, &product))
    throw std::overflow_error("lcm of degrees exceeds 64-bit range");
  return std::lcm(a, b);
}

/// Flow network of the pair test. Node 0 is the source (x), nodes
/// 1..d(x) the left copies of N(x), then d(y) right copies of N(y), then
/// the sink (y). Arcs are added in lexicographic (from, to) order.
struct PairTestNetwork {
  FlowNetwork network{2, 0, 1};
  Capacity lcm = 0;
  std::vector<VertexId> left;
  std::vector<VertexId> right;
  struct MiddleArc {
    VertexId from;  // x' in N(x)
    VertexId to;    // y' in N(y)
    std::size_t arc;
  };
  std::vector<MiddleArc> middle;
};

inline PairTestNetwork pair_test_network(const Graph& g, const PairSet& forbidden, VertexId x,
                                         VertexId y) {
  PairTestNetwork t;
  const auto nx = g.neighbors(x);
  const auto ny = g.neighbors(y);
  t.left.assign(nx.begin(), nx.end());
  t.right.assign(ny.begin(), ny.end());
  const auto dx = static_cast<Capacity>(t.left.size());
  const auto dy = static_cast<Capacity>(t.right.size());
  const std::size_t sink = 1 + t.left.size() + t.right.size();
  t.network = FlowNetwork(sink + 1, 0, sink);
  if (dx == 0 || dy == 0) return t;
  t.lcm = checked_lcm(dx, dy);

  for (std::size_t i = 0; i < t.left.size(); ++i) t.network.add_arc(0, 1 + i, t.lcm / dx);
  for (std::size_t i = 0; i < t.left.size(); ++i)
    for (std::size_t j = 0; j < t.right.size(); ++j) {
      const VertexId a = t.left[i];
      const VertexId b = t.right[j];
      // No arc between the two copies of a common neighbor.
      if (a == b || forbidden.contains(a, b)) continue;
      const std::size_t arc = t.network.add_arc(1 + i, 1 + t.left.size() + j, dy);
      t.middle.push_back({a, b, arc});
    }
  for (std::size_t j = 0; j < t.right.size(); ++j)
    t.network.add_arc(1 + t.left.size() + j, sink, t.lcm / dy);
  return t;
}

struct PairTestResult {
  bool pass = false;
  PairTestNetwork network;
  FlowResult flow;

  Capacity flow_on(VertexId from, VertexId to) const {
    for (const auto& m : network.middle)
      if (m.from == from && m.to == to) return flow.flow[m.arc];
    return 0;
  }
};

inline PairTestResult pair_test(const Graph& g, const PairSet& forbidden, VertexId x, VertexId y) {
  PairTestResult r;
  r.network = pair_test_network(g, forbidden, x, y);
  r.flow = max_flow(r.network.network);
  r.pass = r.network.lcm > 0 && r.flow.value == r.network.lcm;
  return r;
}

/// One synchronous generation: every pair outside F is tested against F.
inline PairSet refine_once(const Graph& g, const PairSet& forbidden, unsigned workers = 1) {
  const auto candidates = forbidden.complement_pairs();
  std::vector<std::uint8_t> fails(candidates.size(), 0);
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      fails[i] = !pair_test(g, forbidden, candidates[i].x, candidates[i].y).pass;
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(candidates.size())));
  if (workers <= 1) {
    run(0, candidates.size());
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (candidates.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(candidates.size(), begin + chunk);
      if (begin < end) pool.emplace_back(run, begin, end);
    }
  }
  PairSet next = forbidden;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (fails[i]) next.insert(candidates[i].x, candidates[i].y);
  return next;
}

struct ClosureTrace {
  std::vector<PairSet> generations;  // F0, F1, ..., ending in two equal sets
  PairSet fixed_point;
  std::size_t rounds = 0;            // number of refinement passes
};

inline ClosureTrace forbidden_closure(const Graph& g, unsigned workers = 1) {
  ClosureTrace trace;
  trace.generations.push_back(initial_forbidden(g));
  for (;;) {
    PairSet next = refine_once(g, trace.generations.back(), workers);
    ++trace.rounds;
    const bool stable = next == trace.generations.back();
    trace.generations.push_back(std::move(next));
    if (stable) break;
  }
  trace.fixed_point = trace.generations.back();
  return trace;
}

struct Verdict {
  bool admits = false;
  std::optional<StatePair> witness;  // smallest surviving pair
};

inline Verdict verdict_from(const ClosureTrace& trace) {
  const auto survivors = trace.fixed_point.complement_pairs();
  if (survivors.empty()) return {};
  return {true, survivors.front()};
}

inline Verdict admits_uac(const Graph& g) {
  if (!is_connected(g)) throw NotConnectedError();
  return verdict_from(forbidden_closure(g));
}

/// Kernel read off the pair-test flows against the fixed point: from (x, y)
/// the chain moves to (x', y') with probability flow(x', y') / l. Restricted
/// to the states reachable from `start`.
inline JointKernel extract_uac_kernel(const Graph& g, const ClosureTrace& trace, StatePair start) {
  const PairSet& f = trace.fixed_point;
  if (start.x >= g.order() || start.y >= g.order() || f.contains(start))
    throw std::invalid_argument("start state " + to_string(start) + " is forbidden");
  auto graph = std::make_shared<const Graph>(g);
  return close_from(graph, start, [&](StatePair s) {
    const auto test = pair_test(g, f, s.x, s.y);
    if (!test.pass)
      throw std::logic_error("pair " + to_string(s) + " fails against the fixed point");
    std::vector<Transition> row;
    for (const auto& m : test.network.middle) {
      const Capacity amount = test.flow.flow[m.arc];
      if (amount > 0) row.push_back({{m.from, m.to}, make_rational(amount, test.network.lcm)});
    }
    return row;
  });
}

/// Minimum-entropy variant for regular graphs: X moves uniformly and Y
/// follows a perfect matching between N(x) and N(y) that avoids forbidden
/// pairs.
inline JointKernel minimum_entropy_kernel(const Graph& g, const ClosureTrace& trace,
                                          std::optional<StatePair> start = std::nullopt) {
  const auto k = regular_degree(g);
  if (!k) throw std::invalid_argument("minimum_entropy_kernel: graph is not regular");
  const PairSet& f = trace.fixed_point;
  const auto survivors = f.complement_pairs();
  if (survivors.empty()) throw std::invalid_argument("minimum_entropy_kernel: no surviving pair");
  const StatePair s0 = start.value_or(survivors.front());
  if (s0.x >= g.order() || s0.y >= g.order() || f.contains(s0))
    throw std::invalid_argument("start state " + to_string(s0) + " is forbidden");

  auto graph = std::make_shared<const Graph>(g);
  return close_from(graph, s0, [&](StatePair s) {
    const auto nx = g.neighbors(s.x);
    const auto ny = g.neighbors(s.y);
    std::vector<std::pair<std::size_t, std::size_t>> allowed;
    for (std::size_t i = 0; i < nx.size(); ++i)
      for (std::size_t j = 0; j < ny.size(); ++j)
        if (nx[i] != ny[j] && !f.contains(nx[i], ny[j])) allowed.emplace_back(i, j);
    const auto m = max_bipartite_matching(nx.size(), ny.size(), allowed);
    if (m.size() != *k)
      throw std::logic_error("no perfect matching for surviving pair " + to_string(s));
    std::vector<Transition> row;
    for (const auto& [i, j] : m.pairs)
      row.push_back({{nx[i], ny[j]}, make_rational(1, static_cast<std::int64_t>(*k))});
    return row;
  });
}

}  // namespace uac
