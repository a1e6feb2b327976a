#pragma once

// Joint transition kernels on ordered vertex pairs (token X position,
// token Y position) with exact rational probabilities.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uac/graph.hpp"
#include "uac/rational.hpp"

namespace uac {

struct StatePair {
  VertexId x = 0;
  VertexId y = 0;
  friend auto operator<=>(const StatePair&, const StatePair&) = default;
};

inline std::string to_string(const StatePair& s) {
  return "(" + std::to_string(s.x) + "," + std::to_string(s.y) + ")";
}

struct Transition {
  StatePair target;
  Rational probability;
};

/// Malformed kernel: row sums, dangling targets, unknown states.
class KernelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Markov chain on a finite set of ordered vertex pairs. Rows are sorted by
/// target, hold only positive entries and sum to exactly one; the state set
/// is closed under positive transitions.
class JointKernel {
 public:
  JointKernel(Graph graph, std::vector<StatePair> states,
              std::vector<std::vector<Transition>> rows, StatePair start)
      : JointKernel(std::make_shared<const Graph>(std::move(graph)), std::move(states),
                    std::move(rows), start) {}

  JointKernel(std::shared_ptr<const Graph> graph, std::vector<StatePair> states,
              std::vector<std::vector<Transition>> rows, StatePair start)
      : graph_(std::move(graph)), states_(std::move(states)), rows_(std::move(rows)) {
    const std::size_t n = graph_->order();
    if (rows_.size() != states_.size()) throw KernelError("row count differs from state count");
    index_.assign(n * n, kAbsent);
    for (std::size_t i = 0; i < states_.size(); ++i) {
      const StatePair s = states_[i];
      if (s.x >= n || s.y >= n) throw KernelError("state " + to_string(s) + " out of range");
      if (index_[s.x * n + s.y] != kAbsent) throw KernelError("duplicate state " + to_string(s));
      index_[s.x * n + s.y] = i;
    }
    for (std::size_t i = 0; i < states_.size(); ++i) {
      auto& row = rows_[i];
      std::sort(row.begin(), row.end(),
                [](const Transition& a, const Transition& b) { return a.target < b.target; });
      std::vector<Transition> merged;
      for (auto& t : row) {
        if (t.probability < 0)
          throw KernelError("negative probability from " + to_string(states_[i]));
        if (!merged.empty() && merged.back().target == t.target)
          merged.back().probability += t.probability;
        else
          merged.push_back(std::move(t));
      }
      std::erase_if(merged, [](const Transition& t) { return t.probability == 0; });
      Rational total = 0;
      for (const auto& t : merged) {
        if (!index_of(t.target))
          throw KernelError("transition " + to_string(states_[i]) + " -> " +
                            to_string(t.target) + " leaves the state set");
        total += t.probability;
      }
      if (total != 1)
        throw KernelError("row " + to_string(states_[i]) + " sums to " + uac::to_string(total));
      row = std::move(merged);
    }
    const auto s = index_of(start);
    if (!s) throw KernelError("start state " + to_string(start) + " not in state set");
    start_ = *s;
  }

  const Graph& graph() const { return *graph_; }
  std::shared_ptr<const Graph> graph_ptr() const { return graph_; }
  std::size_t size() const { return states_.size(); }
  const std::vector<StatePair>& states() const { return states_; }
  const StatePair& state(std::size_t i) const { return states_.at(i); }
  std::span<const Transition> row(std::size_t i) const { return rows_.at(i); }
  std::size_t start_index() const { return start_; }
  StatePair start() const { return states_[start_]; }

  std::optional<std::size_t> index_of(StatePair s) const {
    const std::size_t n = graph_->order();
    if (s.x >= n || s.y >= n) return std::nullopt;
    const std::size_t i = index_[s.x * n + s.y];
    if (i == kAbsent) return std::nullopt;
    return i;
  }

  /// T[from -> to]; zero for absent states or transitions.
  Rational probability(StatePair from, StatePair to) const {
    const auto i = index_of(from);
    if (!i) return 0;
    for (const auto& t : rows_[*i])
      if (t.target == to) return t.probability;
    return 0;
  }

 private:
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

  std::shared_ptr<const Graph> graph_;
  std::vector<StatePair> states_;
  std::vector<std::vector<Transition>> rows_;
  std::vector<std::size_t> index_;
  std::size_t start_ = 0;
};

using RowFunction = std::function<std::vector<Transition>(StatePair)>;

/// Builds the kernel on the states reachable from `start` under `row`.
/// States are stored in lexicographic order.
inline JointKernel close_from(std::shared_ptr<const Graph> graph, StatePair start,
                              const RowFunction& row) {
  std::map<StatePair, std::vector<Transition>> rows;
  std::deque<StatePair> frontier{start};
  rows.emplace(start, std::vector<Transition>{});
  while (!frontier.empty()) {
    const StatePair s = frontier.front();
    frontier.pop_front();
    auto r = row(s);
    for (const auto& t : r)
      if (t.probability != 0 && !rows.contains(t.target)) {
        rows.emplace(t.target, std::vector<Transition>{});
        frontier.push_back(t.target);
      }
    rows[s] = std::move(r);
  }
  std::vector<StatePair> states;
  std::vector<std::vector<Transition>> table;
  for (auto& [s, r] : rows) {
    states.push_back(s);
    table.push_back(std::move(r));
  }
  return JointKernel(std::move(graph), std::move(states), std::move(table), start);
}

inline JointKernel close_from(const Graph& graph, StatePair start, const RowFunction& row) {
  return close_from(std::make_shared<const Graph>(graph), start, row);
}

// ---------------------------------------------------------------------------
// Text format
//
//     # key: value          (free-form provenance header)
//     s <x> <y>              (first declared state is the start state)
//     t <x> <y> <x'> <y'> <num>/<den>
// ---------------------------------------------------------------------------

struct KernelFile {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<StatePair> states;
  std::vector<std::pair<StatePair, Transition>> transitions;

  std::optional<std::string> header_value(const std::string& key) const {
    for (const auto& [k, v] : header)
      if (k == key) return v;
    return std::nullopt;
  }
};

inline KernelFile parse_kernel_file(std::istream& in) {
  KernelFile file;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw KernelError("kernel line " + std::to_string(line_no) + ": " + what);
  };
  auto vertex = [&](const std::string& tok) {
    std::uint64_t v = 0;
    if (!detail::parse_index(tok, v) || v > 0xffffffffu) fail("malformed vertex '" + tok + "'");
    return static_cast<VertexId>(v);
  };
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      const std::string body = line.substr(first + 1);
      const auto colon = body.find(':');
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      if (colon != std::string::npos)
        file.header.emplace_back(trim(body.substr(0, colon)), trim(body.substr(colon + 1)));
      continue;
    }
    const auto tokens = detail::split_ws(line);
    if (tokens[0] == "s") {
      if (tokens.size() != 3) fail("expected 's <x> <y>'");
      file.states.push_back({vertex(tokens[1]), vertex(tokens[2])});
    } else if (tokens[0] == "t") {
      if (tokens.size() != 6) fail("expected 't <x> <y> <x'> <y'> <p>'");
      Rational p;
      try {
        p = parse_rational(tokens[5]);
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
      file.transitions.push_back({{vertex(tokens[1]), vertex(tokens[2])},
                                  {{vertex(tokens[3]), vertex(tokens[4])}, p}});
    } else {
      fail("unknown record '" + tokens[0] + "'");
    }
  }
  if (file.states.empty()) throw KernelError("kernel declares no states");
  return file;
}

inline KernelFile parse_kernel_file(const std::string& text) {
  std::istringstream in(text);
  return parse_kernel_file(in);
}

inline JointKernel kernel_from_file(const KernelFile& file, const Graph& graph) {
  std::map<StatePair, std::size_t> position;
  for (std::size_t i = 0; i < file.states.size(); ++i) position.emplace(file.states[i], i);
  std::vector<std::vector<Transition>> rows(file.states.size());
  for (const auto& [from, t] : file.transitions) {
    const auto it = position.find(from);
    if (it == position.end())
      throw KernelError("transition from undeclared state " + to_string(from));
    rows[it->second].push_back(t);
  }
  return JointKernel(graph, file.states, std::move(rows), file.states.front());
}

/// Serialises the kernel with the start state declared first.
inline std::string format_kernel(const JointKernel& k,
                                 const std::vector<std::pair<std::string, std::string>>& header = {}) {
  std::ostringstream out;
  for (const auto& [key, value] : header) out << "# " << key << ": " << value << '\n';
  out << "s " << k.start().x << ' ' << k.start().y << '\n';
  for (std::size_t i = 0; i < k.size(); ++i)
    if (i != k.start_index()) out << "s " << k.state(i).x << ' ' << k.state(i).y << '\n';
  for (std::size_t i = 0; i < k.size(); ++i)
    for (const auto& t : k.row(i))
      out << "t " << k.state(i).x << ' ' << k.state(i).y << ' ' << t.target.x << ' '
          << t.target.y << ' ' << to_string(t.probability) << '\n';
  return out.str();
}

/// 64-bit FNV-1a, used to fingerprint graphs and kernels in reports.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace uac
