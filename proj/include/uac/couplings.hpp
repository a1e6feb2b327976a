#pragma once

// Explicit joint kernels for the named avoidance couplings, the two-stage
// (super-Markovian) composition, and a deliberately unfaithful avoidance
// process on a spider tree used as a negative control.

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uac/automorphism.hpp"
#include "uac/builders.hpp"
#include "uac/forbidden.hpp"
#include "uac/graph.hpp"
#include "uac/kernel.hpp"
#include "uac/maxflow.hpp"
#include "uac/rational.hpp"

namespace uac {

/// Raised when a construction's precondition does not hold; the message
/// names the failed condition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void require(bool condition, const std::string& what) {
  if (!condition) throw PreconditionError(what);
}

inline Rational frac(std::int64_t num, std::int64_t den) { return make_rational(num, den); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Cycle: both tokens take the same fair coin step.
// ---------------------------------------------------------------------------

inline JointKernel fixed_distance_cycle(std::size_t n, std::size_t d, VertexId start_x = 0) {
  detail::require(n >= 4, "fixed_distance_cycle: need n >= 4");
  detail::require(d >= 2 && d + 2 <= n, "fixed_distance_cycle: offset must leave tokens non-adjacent and distinct (2 <= d <= n-2)");
  detail::require(start_x < n, "fixed_distance_cycle: start out of range");
  const auto shift = [n](std::size_t v, std::size_t by) { return static_cast<VertexId>((v + by) % n); };
  return close_from(build::cycle(n), {start_x, shift(start_x, d)}, [&](StatePair s) {
    return std::vector<Transition>{{{shift(s.x, 1), shift(s.y, 1)}, detail::frac(1, 2)},
                                   {{shift(s.x, n - 1), shift(s.y, n - 1)}, detail::frac(1, 2)}};
  });
}

// ---------------------------------------------------------------------------
// Hypercube: flip the same random coordinate of both tokens.
// ---------------------------------------------------------------------------

inline JointKernel hypercube_flip(std::size_t dim, VertexId start_x = 0) {
  detail::require(dim >= 2, "hypercube_flip: need dim >= 2");
  const VertexId mask = (VertexId{1} << dim) - 1;
  detail::require(start_x <= mask, "hypercube_flip: start out of range");
  const auto p = detail::frac(1, static_cast<std::int64_t>(dim));
  return close_from(build::hypercube(dim), {start_x, start_x ^ mask}, [&](StatePair s) {
    std::vector<Transition> row;
    for (std::size_t i = 0; i < dim; ++i) {
      const VertexId bit = VertexId{1} << i;
      row.push_back({{s.x ^ bit, s.y ^ bit}, p});
    }
    return row;
  });
}

// ---------------------------------------------------------------------------
// Free automorphism: Y sits at phi(X).
// ---------------------------------------------------------------------------

inline JointKernel automorphism_coupling(const Graph& g, const VertexPermutation& phi,
                                         VertexId start_x = 0) {
  detail::require(validate_free_automorphism(g, phi),
                  "automorphism_coupling: map is not a free non-adjacent automorphism");
  detail::require(start_x < g.order(), "automorphism_coupling: start out of range");
  return close_from(g, {start_x, phi(start_x)}, [&](StatePair s) {
    std::vector<Transition> row;
    const auto p = detail::frac(1, static_cast<std::int64_t>(g.degree(s.x)));
    for (VertexId w : g.neighbors(s.x)) row.push_back({{w, phi(w)}, p});
    return row;
  });
}

// ---------------------------------------------------------------------------
// Bipartite graphs with minimum degree 2: both tokens on the same side,
// probabilities depend on the size of the common neighborhood.
// ---------------------------------------------------------------------------

inline std::vector<Transition> bipartite_row(const Graph& g, StatePair s) {
  const auto nx = g.neighbors(s.x);
  const auto ny = g.neighbors(s.y);
  const auto dx = static_cast<std::int64_t>(nx.size());
  const auto dy = static_cast<std::int64_t>(ny.size());
  const auto common = common_neighbors(g, s.x, s.y);
  const auto c = static_cast<std::int64_t>(common.size());
  auto in_common = [&](VertexId v) {
    return std::binary_search(common.begin(), common.end(), v);
  };

  std::vector<Transition> row;
  if (c == 0) {
    for (VertexId a : nx)
      for (VertexId b : ny) row.push_back({{a, b}, detail::frac(1, dx * dy)});
  } else if (c >= 2) {
    for (VertexId a : nx)
      for (VertexId b : ny) {
        if (a == b) continue;
        const bool both = in_common(a) && in_common(b);
        row.push_back({{a, b}, both ? detail::frac(c, dx * dy * (c - 1)) : detail::frac(1, dx * dy)});
      }
  } else {
    const VertexId z = common.front();
    for (VertexId a : nx)
      for (VertexId b : ny) {
        if (a == z && b == z) continue;
        if (a == z) row.push_back({{a, b}, detail::frac(1, dx * (dy - 1))});
        else if (b == z) row.push_back({{a, b}, detail::frac(1, dy * (dx - 1))});
        else
          row.push_back({{a, b}, detail::frac(1, dx * dy) -
                                     detail::frac(1, dx * dy * (dx - 1) * (dy - 1))});
      }
  }
  return row;
}

inline JointKernel bipartite_coupling(const Graph& g, std::optional<StatePair> start = std::nullopt) {
  detail::require(is_connected(g), "bipartite_coupling: graph is not connected");
  const auto sides = bipartition(g);
  detail::require(sides.has_value(), "bipartite_coupling: graph is not bipartite");
  for (VertexId v = 0; v < g.order(); ++v)
    detail::require(g.degree(v) >= 2, "bipartite_coupling: vertex " + std::to_string(v) + " has degree < 2");
  StatePair s0{};
  if (start) {
    s0 = *start;
  } else {
    // Smallest valid pair: vertex 0 with the next vertex on its side.
    VertexId y = 1;
    while (y < g.order() && sides->side[y] != Side::Left) ++y;
    detail::require(y < g.order(), "bipartite_coupling: no same-side pair");
    s0 = {0, y};
  }
  detail::require(s0.x < g.order() && s0.y < g.order() && s0.x != s0.y &&
                      sides->side[s0.x] == sides->side[s0.y],
                  "bipartite_coupling: start must be two distinct vertices on the same side");
  return close_from(g, s0, [&](StatePair s) { return bipartite_row(g, s); });
}

// ---------------------------------------------------------------------------
// Two-stage composition: X moves by f(x, y, x'), then Y by g(x', y, y').
// ---------------------------------------------------------------------------

struct HalfStep {
  using Key = std::array<VertexId, 3>;
  std::map<Key, Rational> f;   // (x_t, y_t, x_{t+1})
  std::map<Key, Rational> g;   // (x_{t+1}, y_t, y_{t+1})
  std::vector<StatePair> states;  // rows of f
  StatePair start;
};

/// Sums of f over x' per state and of g over y' per (x', y) must be one.
inline void validate_half_step(const HalfStep& h) {
  std::map<std::pair<VertexId, VertexId>, Rational> f_rows, g_rows;
  for (const auto& [k, p] : h.f) {
    if (p < 0) throw PreconditionError("half step: negative f entry");
    f_rows[{k[0], k[1]}] += p;
  }
  for (const auto& [k, p] : h.g) {
    if (p < 0) throw PreconditionError("half step: negative g entry");
    g_rows[{k[0], k[1]}] += p;
  }
  for (const auto& s : h.states) {
    const auto it = f_rows.find({s.x, s.y});
    if (it == f_rows.end() || it->second != 1)
      throw PreconditionError("half step: f row " + to_string(s) + " does not sum to 1");
  }
  for (const auto& [key, total] : g_rows)
    if (total != 1)
      throw PreconditionError("half step: g row (" + std::to_string(key.first) + "," +
                              std::to_string(key.second) + ") does not sum to 1");
  for (const auto& [k, p] : h.f)
    if (p > 0 && !g_rows.contains({k[2], k[1]}))
      throw PreconditionError("half step: no g row for X at " + std::to_string(k[2]) +
                              " with Y at " + std::to_string(k[1]));
}

inline JointKernel compose_super_markovian(const Graph& graph, const HalfStep& h) {
  validate_half_step(h);
  std::map<std::pair<VertexId, VertexId>, std::vector<std::pair<VertexId, Rational>>> g_rows;
  for (const auto& [k, p] : h.g)
    if (p > 0) g_rows[{k[0], k[1]}].emplace_back(k[2], p);
  std::map<StatePair, std::vector<Transition>> rows;
  for (const auto& s : h.states) rows[s];
  for (const auto& [k, fp] : h.f) {
    if (fp == 0) continue;
    const StatePair from{k[0], k[1]};
    for (const auto& [y_next, gp] : g_rows.at({k[2], k[1]}))
      rows[from].push_back({{k[2], y_next}, fp * gp});
  }
  std::vector<StatePair> states;
  std::vector<std::vector<Transition>> table;
  for (auto& [s, r] : rows) {
    states.push_back(s);
    table.push_back(std::move(r));
  }
  return JointKernel(graph, std::move(states), std::move(table), h.start);
}

struct ClusterCoupling {
  HalfStep half;
  JointKernel kernel;
};

/// K_{ab} split into b clusters of size a: cluster j = {ja, ..., ja+a-1}.
inline ClusterCoupling cluster_coupling_complete(std::size_t a, std::size_t b) {
  detail::require(a >= 2 && b >= 2, "cluster_coupling_complete: need a >= 2 and b >= 2");
  const std::size_t n = a * b;
  const auto A = static_cast<std::int64_t>(a);
  const auto B = static_cast<std::int64_t>(b);
  auto cluster = [a](VertexId v) { return v / a; };
  auto same = [&](VertexId u, VertexId v) { return u != v && cluster(u) == cluster(v); };
  auto apart = [&](VertexId u, VertexId v) { return cluster(u) != cluster(v); };

  HalfStep h;
  const Rational to_y_cluster = detail::frac(A * (B - 1), A * B - 1) * detail::frac(1, A - 1);
  const Rational stay_in_cluster = detail::frac(A - 1, A * B - 1) * detail::frac(1, A - 1);
  for (VertexId x = 0; x < n; ++x)
    for (VertexId y = 0; y < n; ++y) {
      if (!apart(x, y)) continue;
      h.states.push_back({x, y});
      for (VertexId xn = 0; xn < n; ++xn) {
        if (same(y, xn)) h.f[{x, y, xn}] = to_y_cluster;
        else if (same(x, xn)) h.f[{x, y, xn}] = stay_in_cluster;
      }
    }
  for (VertexId xn = 0; xn < n; ++xn)
    for (VertexId y = 0; y < n; ++y) {
      if (xn == y) continue;
      for (VertexId yn = 0; yn < n; ++yn) {
        if (same(y, xn) && apart(y, yn)) h.g[{xn, y, yn}] = detail::frac(1, A * (B - 1));
        else if (apart(y, xn) && same(y, yn)) h.g[{xn, y, yn}] = detail::frac(1, A - 1);
      }
    }
  h.start = h.states.front();
  auto kernel = compose_super_markovian(build::complete(n), h);
  return {std::move(h), std::move(kernel)};
}

// ---------------------------------------------------------------------------
// K3*: the next pair is uniform over the three pairs with X' != Y, Y' != X'
// and (X', Y') != (X, Y).
// ---------------------------------------------------------------------------

inline JointKernel k3_loops_coupling() {
  std::vector<StatePair> states;
  std::vector<std::vector<Transition>> rows;
  for (VertexId x = 0; x < 3; ++x)
    for (VertexId y = 0; y < 3; ++y) {
      if (x == y) continue;
      states.push_back({x, y});
      auto& row = rows.emplace_back();
      for (VertexId xn = 0; xn < 3; ++xn)
        for (VertexId yn = 0; yn < 3; ++yn)
          if (xn != y && yn != xn && !(xn == x && yn == y))
            row.push_back({{xn, yn}, detail::frac(1, 3)});
    }
  return JointKernel(build::complete_loops(3), std::move(states), std::move(rows), {0, 1});
}

// ---------------------------------------------------------------------------
// Regular graphs of degree n-2 or n-3: Y follows a fixed function of X's
// position in the complement.
// ---------------------------------------------------------------------------

/// Successor map used by the near-complete coupling: the unique complement
/// neighbor (degree n-2) or the clockwise complement neighbor (degree n-3),
/// with each complement cycle walked from its lowest vertex toward that
/// vertex's lower complement neighbor.
inline std::vector<VertexId> near_complete_partner(const Graph& g) {
  detail::require(!g.has_loops(), "near_complete_regular_coupling: graph has loops");
  detail::require(is_connected(g), "near_complete_regular_coupling: graph is not connected");
  const std::size_t n = g.order();
  const auto k = regular_degree(g);
  detail::require(k && n >= 3 && (*k + 2 == n || *k + 3 == n),
                  "near_complete_regular_coupling: graph must be regular of degree n-2 or n-3");
  const Graph co = complement(g);
  std::vector<VertexId> partner(n);
  if (*k + 2 == n) {
    for (VertexId v = 0; v < n; ++v) partner[v] = co.neighbors(v)[0];
    return partner;
  }
  std::vector<std::uint8_t> done(n, 0);
  for (VertexId first = 0; first < n; ++first) {
    if (done[first]) continue;
    VertexId prev = first;
    VertexId cur = co.neighbors(first)[0];
    partner[first] = cur;
    done[first] = 1;
    while (cur != first) {
      const auto nb = co.neighbors(cur);
      const VertexId next = nb[0] == prev ? nb[1] : nb[0];
      partner[cur] = next;
      done[cur] = 1;
      prev = cur;
      cur = next;
    }
  }
  return partner;
}

inline JointKernel near_complete_regular_coupling(const Graph& g, std::optional<VertexId> start_x = std::nullopt) {
  const auto partner = near_complete_partner(g);
  const VertexId x0 = start_x.value_or(0);
  detail::require(x0 < g.order(), "near_complete_regular_coupling: start out of range");
  return close_from(g, {x0, partner[x0]}, [&](StatePair s) {
    std::vector<Transition> row;
    const auto p = detail::frac(1, static_cast<std::int64_t>(g.degree(s.x)));
    for (VertexId w : g.neighbors(s.x)) row.push_back({{w, partner[w]}, p});
    return row;
  });
}

// ---------------------------------------------------------------------------
// Strongly regular graphs: per non-adjacent pair, Y follows a perfect
// matching of the complement bipartite graph between N(x) and N(y).
// ---------------------------------------------------------------------------

inline bool srg_condition(const SrgParams& p) {
  // max(lambda, mu) <= k/2  or  lambda < k/2, in integers.
  return 2 * std::max(p.lambda, p.mu) <= p.k || 2 * p.lambda < p.k;
}

inline JointKernel srg_matching_coupling(const Graph& g, std::optional<StatePair> start = std::nullopt) {
  const auto params = srg_parameters(g);
  detail::require(params.has_value(), "srg_matching_coupling: graph is not a connected non-complete strongly regular graph");
  detail::require(srg_condition(*params),
                  "srg_matching_coupling: parameters violate max(lambda,mu) <= k/2 or lambda < k/2");
  const std::size_t n = g.order();
  const auto k = static_cast<std::int64_t>(params->k);
  std::vector<StatePair> states;
  std::vector<std::vector<Transition>> rows;
  for (VertexId x = 0; x < n; ++x)
    for (VertexId y = 0; y < n; ++y) {
      if (x == y || g.adjacent(x, y)) continue;
      const auto nx = g.neighbors(x);
      const auto ny = g.neighbors(y);
      std::vector<std::pair<std::size_t, std::size_t>> allowed;
      for (std::size_t i = 0; i < nx.size(); ++i)
        for (std::size_t j = 0; j < ny.size(); ++j)
          if (nx[i] != ny[j] && !g.adjacent(nx[i], ny[j])) allowed.emplace_back(i, j);
      const auto m = max_bipartite_matching(nx.size(), ny.size(), allowed);
      if (static_cast<std::int64_t>(m.size()) != k)
        throw std::logic_error("srg_matching_coupling: no perfect matching for " + to_string(StatePair{x, y}));
      states.push_back({x, y});
      auto& row = rows.emplace_back();
      for (const auto& [i, j] : m.pairs) row.push_back({{nx[i], ny[j]}, detail::frac(1, k)});
    }
  const StatePair s0 = start.value_or(states.front());
  return JointKernel(g, std::move(states), std::move(rows), s0);
}

// ---------------------------------------------------------------------------
// Negative control: an avoidance process on the spider with three branches
// of length three whose tokens have the right stationary law but are not
// simple random walks.
// ---------------------------------------------------------------------------

/// Vertex id of branch `i` (1..3) at `depth` (1..3); depth 0 is the root.
inline VertexId spider_vertex(std::size_t branch, std::size_t depth) {
  return depth == 0 ? 0 : static_cast<VertexId>(3 * (branch - 1) + depth);
}

/// `split` is the probability that tokens at (i,1) and (j,2), i != j, swap
/// depths; the remainder sends them to the root and (j,3). With 3/4 the
/// watched token returns to (1,2) after (1,3), (1,2), (1,1) with probability
/// 3/4. Only 3/5 gives the walk's stationary law 1/6, 1/9, 1/18.
inline JointKernel tree_noncoupling_example(const Rational& split = make_rational(3, 4)) {
  detail::require(split > 0 && split < 1, "tree_noncoupling_example: split must lie in (0, 1)");
  auto branch = [](VertexId v) -> std::size_t { return v == 0 ? 0 : (v - 1) / 3 + 1; };
  auto depth = [](VertexId v) -> std::size_t { return v == 0 ? 0 : (v - 1) % 3 + 1; };
  auto at = spider_vertex;

  // Rule for the unordered configuration {p at u, q at v}, returned as
  // transitions of the ordered pair (u, v).
  auto ordered_row = [&](VertexId u, VertexId v) {
    std::vector<Transition> row;
    if (depth(u) == 0 && depth(v) == 3) {
      for (std::size_t j = 1; j <= 3; ++j)
        row.push_back({{at(j, 1), at(branch(v), 2)}, detail::frac(1, 3)});
    } else if (depth(u) == 1 && depth(v) == 2 && branch(u) == branch(v)) {
      row.push_back({{0, at(branch(v), 3)}, detail::frac(1, 1)});
    } else if (depth(u) == 1 && depth(v) == 2) {
      row.push_back({{at(branch(u), 2), at(branch(v), 1)}, split});
      row.push_back({{0, at(branch(v), 3)}, 1 - split});
    } else {
      throw std::logic_error("tree_noncoupling_example: unexpected configuration");
    }
    return row;
  };

  return close_from(build::spider(3, 3), {0, at(1, 3)}, [&](StatePair s) {
    if (depth(s.x) < depth(s.y)) return ordered_row(s.x, s.y);
    auto row = ordered_row(s.y, s.x);
    for (auto& t : row) std::swap(t.target.x, t.target.y);
    return row;
  });
}

}  // namespace uac
