#pragma once

// Test-only exponential decision procedure for uniform avoidance couplings.
//
// A coupling lives on some set S of ordered pairs (x, y) with x, y distinct
// and non-adjacent. From each (x, y) in S, token X must move to every
// neighbor with mass 1/d(x) and Y to every neighbor with mass 1/d(y), using
// only successor pairs in S (a common neighbor z never yields (z, z)). By
// Gale's supply-demand theorem such a transport exists iff every set A of
// X-neighbors satisfies |A| d(y) <= |N_S(A)| d(x), where N_S(A) is the set
// of Y-neighbors paired with A inside S. A coupling exists iff some
// nonempty S has every member satisfying that condition; this oracle tries
// every subset S.

#include <bit>
#include <cstdint>
#include <optional>
#include <vector>

#include "uac/graph.hpp"

namespace oracle {

struct BruteForceResult {
  bool admits = false;
  std::uint64_t witness_mask = 0;         // a self-sustaining subset, if any
  std::vector<std::pair<uac::VertexId, uac::VertexId>> candidates;
};

inline bool hall_condition(const uac::Graph& g, uac::VertexId x, uac::VertexId y,
                           const std::vector<std::vector<int>>& in_s) {
  const auto nx = g.neighbors(x);
  const auto ny = g.neighbors(y);
  const std::size_t dx = nx.size(), dy = ny.size();
  if (dx == 0 || dy == 0) return false;
  // Bitmask over N(y) reachable from each X-neighbor inside S.
  std::vector<std::uint32_t> reach(dx, 0);
  for (std::size_t i = 0; i < dx; ++i)
    for (std::size_t j = 0; j < dy; ++j)
      if (in_s[nx[i]][ny[j]]) reach[i] |= 1u << j;
  for (std::uint32_t a = 1; a < (1u << dx); ++a) {
    std::uint32_t covered = 0;
    for (std::size_t i = 0; i < dx; ++i)
      if (a >> i & 1u) covered |= reach[i];
    if (static_cast<std::size_t>(std::popcount(a)) * dy >
        static_cast<std::size_t>(std::popcount(covered)) * dx)
      return false;
  }
  return true;
}

/// Exhaustive over subsets of candidate pairs; the candidate count must be
/// at most 30.
inline BruteForceResult brute_force_admits(const uac::Graph& g) {
  BruteForceResult r;
  const std::size_t n = g.order();
  for (uac::VertexId x = 0; x < n; ++x)
    for (uac::VertexId y = 0; y < n; ++y)
      if (x != y && !g.adjacent(x, y)) r.candidates.emplace_back(x, y);
  const std::size_t c = r.candidates.size();
  if (c > 30) throw std::invalid_argument("brute_force_admits: too many candidate pairs");

  std::vector<std::vector<int>> in_s(n, std::vector<int>(n, 0));
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << c); ++mask) {
    for (std::size_t i = 0; i < c; ++i)
      in_s[r.candidates[i].first][r.candidates[i].second] = static_cast<int>(mask >> i & 1u);
    bool ok = true;
    for (std::size_t i = 0; i < c && ok; ++i)
      if (mask >> i & 1u) ok = hall_condition(g, r.candidates[i].first, r.candidates[i].second, in_s);
    if (ok) {
      r.admits = true;
      r.witness_mask = mask;
      return r;
    }
  }
  return r;
}

}  // namespace oracle
