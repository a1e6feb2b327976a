#pragma once

// Undirected simple graphs (optionally with self-loops) and structural
// queries: bipartition, common neighborhoods, complements, strongly regular
// parameters.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace uac {

using VertexId = std::uint32_t;

/// Raised by operations whose precondition requires a connected graph.
class NotConnectedError : public std::invalid_argument {
 public:
  NotConnectedError() : std::invalid_argument("graph is not connected") {}
};

/// Unordered edge, stored normalized so that u <= v.
struct Edge {
  VertexId u = 0;
  VertexId v = 0;

  Edge() = default;
  Edge(VertexId a, VertexId b) : u(std::min(a, b)), v(std::max(a, b)) {}

  bool is_loop() const { return u == v; }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable undirected graph. A loop at v lists v once among its own
/// neighbors and adds exactly one to deg(v), so the simple random walk on
/// K_n* stays put with probability 1/n.
class Graph {
 public:
  Graph() = default;

  Graph(std::size_t n, std::vector<Edge> edges, bool loops_enabled = false)
      : n_(n), loops_enabled_(loops_enabled), edges_(std::move(edges)), adj_(n * n, 0),
        neighbors_(n) {
    std::sort(edges_.begin(), edges_.end());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      if (e.v >= n_)
        throw std::invalid_argument("edge endpoint " + std::to_string(e.v) + " out of range");
      if (e.is_loop() && !loops_enabled_) throw std::invalid_argument("loop not allowed");
      if (i > 0 && edges_[i - 1] == e)
        throw std::invalid_argument("duplicate edge " + std::to_string(e.u) + "-" +
                                    std::to_string(e.v));
      adj_[e.u * n_ + e.v] = 1;
      adj_[e.v * n_ + e.u] = 1;
    }
    for (VertexId v = 0; v < n_; ++v)
      for (VertexId w = 0; w < n_; ++w)
        if (adj_[v * n_ + w]) neighbors_[v].push_back(w);
  }

  std::size_t order() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool loops_enabled() const { return loops_enabled_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool has_loops() const {
    return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.is_loop(); });
  }

  bool adjacent(VertexId a, VertexId b) const { return adj_[a * n_ + b] != 0; }

  /// Sorted neighbor list.
  std::span<const VertexId> neighbors(VertexId v) const { return neighbors_.at(v); }
  std::size_t degree(VertexId v) const { return neighbors_.at(v).size(); }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.loops_enabled_ == b.loops_enabled_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_ = 0;
  bool loops_enabled_ = false;
  std::vector<Edge> edges_;
  std::vector<std::uint8_t> adj_;
  std::vector<std::vector<VertexId>> neighbors_;
};

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

/// Parse failure carrying the 1-based line number of the offending line
/// (0 when the problem is at end of input).
class GraphParseError : public std::runtime_error {
 public:
  GraphParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline bool parse_index(const std::string& token, std::uint64_t& out) {
  if (token.empty() || token.size() > 18) return false;
  out = 0;
  for (char c : token) {
    if (c < '0' || c > '9') return false;
    out = out * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return true;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

}  // namespace detail

/// Reads the edge-list format:
///
///     # comment
///     p <n> <m>        (or "p* <n> <m>" when loops are allowed)
///     e <u> <v>        (exactly m lines)
inline Graph parse_graph(std::istream& in) {
  std::size_t line_no = 0;
  bool have_header = false;
  bool loops = false;
  std::uint64_t n = 0, m = 0;
  std::vector<Edge> edges;
  std::vector<std::uint8_t> seen;

  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto tokens = detail::split_ws(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;

    if (!have_header) {
      if ((tokens[0] != "p" && tokens[0] != "p*") || tokens.size() != 3)
        throw GraphParseError(line_no, "expected header 'p <n> <m>' or 'p* <n> <m>'");
      if (!detail::parse_index(tokens[1], n) || !detail::parse_index(tokens[2], m))
        throw GraphParseError(line_no, "malformed vertex or edge count");
      if (n > 65536) throw GraphParseError(line_no, "vertex count too large");
      loops = tokens[0] == "p*";
      have_header = true;
      seen.assign(n * n, 0);
      continue;
    }

    if (tokens[0] != "e" || tokens.size() != 3)
      throw GraphParseError(line_no, "expected edge line 'e <u> <v>'");
    std::uint64_t u = 0, v = 0;
    if (!detail::parse_index(tokens[1], u) || !detail::parse_index(tokens[2], v))
      throw GraphParseError(line_no, "malformed endpoint");
    if (u >= n || v >= n) throw GraphParseError(line_no, "endpoint out of range");
    if (u == v && !loops) throw GraphParseError(line_no, "loop not allowed");
    if (seen[u * n + v]) throw GraphParseError(line_no, "duplicate edge");
    seen[u * n + v] = seen[v * n + u] = 1;
    if (edges.size() == m) throw GraphParseError(line_no, "more edges than declared");
    edges.emplace_back(static_cast<VertexId>(u), static_cast<VertexId>(v));
  }
  if (!have_header) throw GraphParseError(line_no, "missing header line");
  if (edges.size() != m)
    throw GraphParseError(line_no, "declared " + std::to_string(m) + " edges, found " +
                                       std::to_string(edges.size()));
  return Graph(n, std::move(edges), loops);
}

inline Graph parse_graph(const std::string& text) {
  std::istringstream in(text);
  return parse_graph(in);
}

inline std::string format_graph(const Graph& g) {
  std::ostringstream out;
  out << (g.loops_enabled() ? "p* " : "p ") << g.order() << ' ' << g.edge_count() << '\n';
  for (const Edge& e : g.edges()) out << "e " << e.u << ' ' << e.v << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Structural queries
// ---------------------------------------------------------------------------

inline bool is_connected(const Graph& g) {
  if (g.order() == 0) return true;
  std::vector<std::uint8_t> seen(g.order(), 0);
  std::vector<VertexId> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    for (VertexId w : g.neighbors(v))
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == g.order();
}

/// Common degree when every vertex has the same degree.
inline std::optional<std::size_t> regular_degree(const Graph& g) {
  if (g.order() == 0) return std::nullopt;
  const std::size_t k = g.degree(0);
  for (VertexId v = 1; v < g.order(); ++v)
    if (g.degree(v) != k) return std::nullopt;
  return k;
}

enum class Side : std::uint8_t { Left, Right };

struct Bipartition {
  std::vector<Side> side;
};

/// Breadth-first two-colouring with vertex 0 on the left. Returns nullopt
/// when an odd cycle (or a loop) exists.
inline std::optional<Bipartition> bipartition(const Graph& g) {
  if (!is_connected(g)) throw NotConnectedError();
  Bipartition result{std::vector<Side>(g.order(), Side::Left)};
  if (g.order() == 0) return result;
  std::vector<std::uint8_t> seen(g.order(), 0);
  std::queue<VertexId> queue;
  queue.push(0);
  seen[0] = 1;
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop();
    const Side other = result.side[v] == Side::Left ? Side::Right : Side::Left;
    for (VertexId w : g.neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        result.side[w] = other;
        queue.push(w);
      } else if (result.side[w] == result.side[v]) {
        return std::nullopt;
      }
    }
  }
  return result;
}

inline std::vector<VertexId> common_neighbors(const Graph& g, VertexId x, VertexId y) {
  std::vector<VertexId> out;
  const auto nx = g.neighbors(x);
  const auto ny = g.neighbors(y);
  std::set_intersection(nx.begin(), nx.end(), ny.begin(), ny.end(), std::back_inserter(out));
  return out;
}

inline Graph complement(const Graph& g) {
  if (g.has_loops()) throw std::invalid_argument("complement: graph has loops");
  std::vector<Edge> edges;
  for (VertexId u = 0; u < g.order(); ++u)
    for (VertexId v = u + 1; v < g.order(); ++v)
      if (!g.adjacent(u, v)) edges.emplace_back(u, v);
  return Graph(g.order(), std::move(edges), false);
}

struct SrgParams {
  std::size_t n = 0, k = 0, lambda = 0, mu = 0;
  friend bool operator==(const SrgParams&, const SrgParams&) = default;
};

/// Exhaustive pair scan. Complete, disconnected and looped graphs are
/// reported as not strongly regular.
inline std::optional<SrgParams> srg_parameters(const Graph& g) {
  const std::size_t n = g.order();
  if (n < 2 || g.has_loops() || !is_connected(g)) return std::nullopt;
  const auto k = regular_degree(g);
  if (!k || *k == n - 1) return std::nullopt;
  std::optional<std::size_t> lambda, mu;
  for (VertexId x = 0; x < n; ++x)
    for (VertexId y = x + 1; y < n; ++y) {
      const std::size_t c = common_neighbors(g, x, y).size();
      auto& slot = g.adjacent(x, y) ? lambda : mu;
      if (!slot) slot = c;
      else if (*slot != c) return std::nullopt;
    }
  return SrgParams{n, *k, lambda.value_or(0), mu.value_or(0)};
}

}  // namespace uac
