#pragma once

// Canonical labelled instances of every graph family used by the couplings
// and the forbidden-state analysis, plus a name-based dispatcher for the CLI.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uac/graph.hpp"

namespace uac::build {

inline Graph cycle(std::size_t n) {
  if (n < 3) throw std::invalid_argument("cycle: need n >= 3");
  std::vector<Edge> edges;
  for (VertexId i = 0; i < n; ++i) edges.emplace_back(i, static_cast<VertexId>((i + 1) % n));
  return Graph(n, std::move(edges));
}

inline Graph path(std::size_t n) {
  if (n < 1) throw std::invalid_argument("path: need n >= 1");
  std::vector<Edge> edges;
  for (VertexId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(n, std::move(edges));
}

inline Graph complete(std::size_t n) {
  if (n < 1) throw std::invalid_argument("complete: need n >= 1");
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return Graph(n, std::move(edges));
}

/// K_n*: complete graph with a loop at every vertex.
inline Graph complete_loops(std::size_t n) {
  if (n < 1) throw std::invalid_argument("complete_loops: need n >= 1");
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u; v < n; ++v) edges.emplace_back(u, v);
  return Graph(n, std::move(edges), true);
}

/// Vertices are d-bit integers; bit i is coordinate i.
inline Graph hypercube(std::size_t d) {
  if (d < 1 || d > 16) throw std::invalid_argument("hypercube: need 1 <= d <= 16");
  const std::size_t n = std::size_t{1} << d;
  std::vector<Edge> edges;
  for (VertexId v = 0; v < n; ++v)
    for (std::size_t i = 0; i < d; ++i) {
      const VertexId w = v ^ (VertexId{1} << i);
      if (v < w) edges.emplace_back(v, w);
    }
  return Graph(n, std::move(edges));
}

/// Outer 5-cycle 0..4, inner pentagram 5..9, spokes i ~ i+5.
inline Graph petersen() {
  std::vector<Edge> edges;
  for (VertexId i = 0; i < 5; ++i) {
    edges.emplace_back(i, (i + 1) % 5);
    edges.emplace_back(5 + i, 5 + (i + 2) % 5);
    edges.emplace_back(i, 5 + i);
  }
  return Graph(10, std::move(edges));
}

/// The 12-vertex 4-regular graph on which the forbidden-state analysis
/// removes every pair. Figure labels 1..12 map to internal ids label-1.
inline Graph fig5() {
  static constexpr int kEdges[][2] = {
      {1, 3},  {1, 4},  {1, 5},  {1, 6},  {2, 7},   {2, 8},   {2, 9},   {2, 10},
      {3, 7},  {3, 8},  {3, 9},  {4, 7},  {4, 8},   {4, 11},  {5, 7},   {5, 8},
      {5, 12}, {6, 9},  {6, 10}, {6, 11}, {9, 12},  {10, 11}, {10, 12}, {11, 12}};
  std::vector<Edge> edges;
  for (const auto& e : kEdges)
    edges.emplace_back(static_cast<VertexId>(e[0] - 1), static_cast<VertexId>(e[1] - 1));
  return Graph(12, std::move(edges));
}

/// K_6 minus the perfect matching {0-3, 1-4, 2-5}.
inline Graph octahedron() {
  std::vector<Edge> edges;
  for (VertexId u = 0; u < 6; ++u)
    for (VertexId v = u + 1; v < 6; ++v)
      if (v != u + 3) edges.emplace_back(u, v);
  return Graph(6, std::move(edges));
}

inline bool is_prime(std::size_t q) {
  if (q < 2) return false;
  for (std::size_t d = 2; d * d <= q; ++d)
    if (q % d == 0) return false;
  return true;
}

/// Paley graph over GF(q), q prime with q = 1 (mod 4): i ~ j iff i - j is a
/// non-zero square.
inline Graph paley(std::size_t q) {
  if (!is_prime(q) || q % 4 != 1)
    throw std::invalid_argument("paley: q must be a prime congruent to 1 mod 4");
  std::vector<std::uint8_t> square(q, 0);
  for (std::size_t a = 1; a < q; ++a) square[(a * a) % q] = 1;
  std::vector<Edge> edges;
  for (VertexId u = 0; u < q; ++u)
    for (VertexId v = u + 1; v < q; ++v)
      if (square[(v - u) % q]) edges.emplace_back(u, v);
  return Graph(q, std::move(edges));
}

/// K_{1,k}: centre 0, leaves 1..k.
inline Graph star(std::size_t k) {
  if (k < 1) throw std::invalid_argument("star: need k >= 1");
  std::vector<Edge> edges;
  for (VertexId i = 1; i <= k; ++i) edges.emplace_back(0, i);
  return Graph(k + 1, std::move(edges));
}

/// K_{a,b}: left side 0..a-1, right side a..a+b-1.
inline Graph complete_bipartite(std::size_t a, std::size_t b) {
  if (a < 1 || b < 1) throw std::invalid_argument("complete_bipartite: need a, b >= 1");
  std::vector<Edge> edges;
  for (VertexId u = 0; u < a; ++u)
    for (VertexId v = 0; v < b; ++v) edges.emplace_back(u, static_cast<VertexId>(a + v));
  return Graph(a + b, std::move(edges));
}

/// Root 0 with `branches` paths of `length` vertices hanging off it. Vertex
/// (i, depth) for branch i in 1..branches and depth in 1..length has id
/// (i-1)*length + depth.
inline Graph spider(std::size_t branches, std::size_t length) {
  if (branches < 1 || length < 1) throw std::invalid_argument("spider: need positive sizes");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < branches; ++i) {
    VertexId prev = 0;
    for (std::size_t d = 1; d <= length; ++d) {
      const auto id = static_cast<VertexId>(i * length + d);
      edges.emplace_back(prev, id);
      prev = id;
    }
  }
  return Graph(1 + branches * length, std::move(edges));
}

/// Two copies of K_n (0..n-1 and n..2n-1) joined by the matching i ~ n+i.
inline Graph double_clique(std::size_t n) {
  if (n < 2) throw std::invalid_argument("double_clique: need n >= 2");
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      edges.emplace_back(u, v);
      edges.emplace_back(static_cast<VertexId>(n + u), static_cast<VertexId>(n + v));
    }
    edges.emplace_back(u, static_cast<VertexId>(n + u));
  }
  return Graph(2 * n, std::move(edges));
}

/// A 4-cycle 1-2-4-3 with pendant vertices 0 (on 1) and 5 (on 4): a graph
/// with degree-one vertices that still admits a uniform avoidance coupling.
inline Graph tailed_diamond() {
  return Graph(6, {{0, 1}, {1, 2}, {1, 3}, {2, 4}, {3, 4}, {4, 5}});
}

// Cayley graph of S_n generated by the adjacent transpositions (i i+1),
// acting on the right. Vertices are permutations in lexicographic order.

inline std::vector<std::vector<std::uint8_t>> permutations_of(std::size_t n) {
  std::vector<std::uint8_t> p(n);
  std::iota(p.begin(), p.end(), std::uint8_t{0});
  std::vector<std::vector<std::uint8_t>> all;
  do all.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return all;
}

inline Graph cayley_adjacent_transpositions(std::size_t n) {
  if (n < 2 || n > 7) throw std::invalid_argument("cayley: need 2 <= n <= 7");
  const auto perms = permutations_of(n);
  std::vector<Edge> edges;
  for (VertexId a = 0; a < perms.size(); ++a)
    for (std::size_t i = 0; i + 1 < n; ++i) {
      auto q = perms[a];
      std::swap(q[i], q[i + 1]);
      const auto b = static_cast<VertexId>(
          std::lower_bound(perms.begin(), perms.end(), q) - perms.begin());
      if (a < b) edges.emplace_back(a, b);
    }
  return Graph(perms.size(), std::move(edges));
}

/// Image table of g -> s1 s2 g (left multiplication) on the Cayley graph
/// above, where s_i swaps the values i-1 and i.
inline std::vector<VertexId> cayley_left_shift(std::size_t n) {
  if (n < 3) throw std::invalid_argument("cayley_left_shift: need n >= 3");
  const auto perms = permutations_of(n);
  std::vector<VertexId> image(perms.size());
  for (VertexId a = 0; a < perms.size(); ++a) {
    // Left multiplication relabels values: (s1 s2 g)(k) = s1(s2(g(k))),
    // which sends 0 -> 1, 1 -> 2, 2 -> 0.
    auto q = perms[a];
    for (auto& value : q)
      if (value <= 2) value = static_cast<std::uint8_t>((value + 1) % 3);
    image[a] = static_cast<VertexId>(
        std::lower_bound(perms.begin(), perms.end(), q) - perms.begin());
  }
  return image;
}

// ---------------------------------------------------------------------------
// Name-based dispatch ("cycle 9", "fig5", "complement-cycle 6", ...)
// ---------------------------------------------------------------------------

namespace detail {

inline std::size_t param(std::span<const std::string> args, std::size_t i,
                         const std::string& family) {
  if (i >= args.size())
    throw std::invalid_argument("builder '" + family + "' needs " + std::to_string(i + 1) +
                                " integer parameter(s)");
  std::size_t pos = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(args[i], &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != args[i].size() || args[i][0] == '-')
    throw std::invalid_argument("builder '" + family + "': bad parameter '" + args[i] + "'");
  return value;
}

}  // namespace detail

/// Names accepted by `from_spec`.
inline const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names = {
      "cycle",  "path",      "complete",         "complete-loops", "hypercube",
      "petersen", "fig5",    "octahedron",       "paley",          "star",
      "complete-bipartite",  "spider",           "double-clique",  "tailed-diamond",
      "cayley-sn",           "complement-cycle"};
  return names;
}

/// Builds a graph from a family name followed by its integer parameters.
inline Graph from_spec(std::span<const std::string> spec) {
  if (spec.empty()) throw std::invalid_argument("empty builder specification");
  const std::string& f = spec[0];
  const auto args = spec.subspan(1);
  auto expect = [&](std::size_t count) {
    if (args.size() != count)
      throw std::invalid_argument("builder '" + f + "' takes " + std::to_string(count) +
                                  " parameter(s)");
  };
  auto p = [&](std::size_t i) { return detail::param(args, i, f); };

  if (f == "cycle") { expect(1); return cycle(p(0)); }
  if (f == "path") { expect(1); return path(p(0)); }
  if (f == "complete") { expect(1); return complete(p(0)); }
  if (f == "complete-loops") { expect(1); return complete_loops(p(0)); }
  if (f == "hypercube") { expect(1); return hypercube(p(0)); }
  if (f == "petersen") { expect(0); return petersen(); }
  if (f == "fig5") { expect(0); return fig5(); }
  if (f == "octahedron") { expect(0); return octahedron(); }
  if (f == "paley") { expect(1); return paley(p(0)); }
  if (f == "star") { expect(1); return star(p(0)); }
  if (f == "complete-bipartite") { expect(2); return complete_bipartite(p(0), p(1)); }
  if (f == "spider") { expect(2); return spider(p(0), p(1)); }
  if (f == "double-clique") { expect(1); return double_clique(p(0)); }
  if (f == "tailed-diamond") { expect(0); return tailed_diamond(); }
  if (f == "cayley-sn") { expect(1); return cayley_adjacent_transpositions(p(0)); }
  if (f == "complement-cycle") { expect(1); return complement(cycle(p(0))); }
  throw std::invalid_argument("unknown graph family '" + f + "'");
}

}  // namespace uac::build
