#pragma once

// Free non-adjacent automorphisms: bijections phi preserving adjacency with
// phi(v) != v and phi(v) not adjacent to v for every vertex. Such a map lets
// one token shadow the other at phi of its position.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "uac/graph.hpp"

namespace uac {

class VertexPermutation {
 public:
  explicit VertexPermutation(std::vector<VertexId> image) : image_(std::move(image)) {
    std::vector<std::uint8_t> hit(image_.size(), 0);
    for (VertexId v : image_) {
      if (v >= image_.size() || hit[v])
        throw std::invalid_argument("vertex permutation is not a bijection");
      hit[v] = 1;
    }
  }

  std::size_t size() const { return image_.size(); }
  VertexId operator()(VertexId v) const { return image_.at(v); }
  const std::vector<VertexId>& image() const { return image_; }

 private:
  std::vector<VertexId> image_;
};

inline bool validate_free_automorphism(const Graph& g, const VertexPermutation& phi) {
  if (phi.size() != g.order()) return false;
  for (VertexId v = 0; v < g.order(); ++v) {
    if (phi(v) == v || g.adjacent(v, phi(v))) return false;
    // Preserving adjacency and non-adjacency is equivalent to mapping every
    // neighbor list onto the image's neighbor list.
    if (g.degree(v) != g.degree(phi(v))) return false;
    for (VertexId w : g.neighbors(v))
      if (!g.adjacent(phi(v), phi(w))) return false;
  }
  return true;
}

struct AutomorphismSearch {
  enum class Status { Found, NoneFound, CapExceeded };
  Status status = Status::NoneFound;
  std::optional<VertexPermutation> phi;
  std::size_t nodes = 0;
};

/// Backtracking over partial maps v -> phi(v) in vertex order, candidates in
/// increasing id. Stops with CapExceeded once `node_cap` tree nodes have
/// been expanded.
inline AutomorphismSearch find_free_automorphism(const Graph& g, std::size_t node_cap) {
  if (g.has_loops()) throw std::invalid_argument("find_free_automorphism: graph has loops");
  const std::size_t n = g.order();
  AutomorphismSearch out;
  std::vector<VertexId> image(n, 0);
  std::vector<std::uint8_t> used(n, 0);
  bool capped = false;

  auto consistent = [&](VertexId v, VertexId c) {
    if (c == v || used[c] || g.adjacent(v, c) || g.degree(v) != g.degree(c)) return false;
    for (VertexId u = 0; u < v; ++u)
      if (g.adjacent(u, v) != g.adjacent(image[u], c)) return false;
    return true;
  };

  auto search = [&](auto&& self, VertexId v) -> bool {
    if (v == n) return true;
    for (VertexId c = 0; c < n; ++c) {
      if (!consistent(v, c)) continue;
      if (out.nodes >= node_cap) {
        capped = true;
        return false;
      }
      ++out.nodes;
      image[v] = c;
      used[c] = 1;
      if (self(self, v + 1)) return true;
      used[c] = 0;
      if (capped) return false;
    }
    return false;
  };

  if (n > 0 && search(search, 0)) {
    out.status = AutomorphismSearch::Status::Found;
    out.phi = VertexPermutation(image);
  } else {
    out.status = capped ? AutomorphismSearch::Status::CapExceeded
                        : AutomorphismSearch::Status::NoneFound;
  }
  return out;
}

}  // namespace uac
