#pragma once

// Test-only: all connected simple graphs on n vertices up to isomorphism,
// by canonical form = lexicographically smallest adjacency bitstring over
// all vertex permutations. Practical for n <= 7.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "uac/graph.hpp"

namespace oracle {

inline std::vector<std::pair<int, int>> vertex_pairs(int n) {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) out.emplace_back(u, v);
  return out;
}

inline uac::Graph graph_from_mask(int n, std::uint32_t mask) {
  std::vector<uac::Edge> edges;
  const auto pairs = vertex_pairs(n);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (mask >> i & 1u)
      edges.push_back({static_cast<uac::VertexId>(pairs[i].first),
                       static_cast<uac::VertexId>(pairs[i].second)});
  return uac::Graph(static_cast<std::size_t>(n), std::move(edges));
}

inline std::uint32_t canonical_mask(int n, std::uint32_t mask) {
  const auto pairs = vertex_pairs(n);
  std::vector<std::vector<int>> index(n, std::vector<int>(n, -1));
  for (std::size_t i = 0; i < pairs.size(); ++i)
    index[pairs[i].first][pairs[i].second] = index[pairs[i].second][pairs[i].first] =
        static_cast<int>(i);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::uint32_t best = ~0u;
  do {
    std::uint32_t image = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if (mask >> i & 1u) image |= 1u << index[perm[pairs[i].first]][perm[pairs[i].second]];
    best = std::min(best, image);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline std::vector<uac::Graph> connected_graphs(int n) {
  const auto m = vertex_pairs(n).size();
  std::set<std::uint32_t> seen;
  std::vector<uac::Graph> out;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    // Cheap filter before canonicalising: at least n-1 edges.
    if (std::popcount(mask) < n - 1) continue;
    const auto g = graph_from_mask(n, mask);
    if (!uac::is_connected(g)) continue;
    if (seen.insert(canonical_mask(n, mask)).second) out.push_back(g);
  }
  return out;
}

}  // namespace oracle
