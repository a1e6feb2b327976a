#pragma once

// Exact verification of joint kernels: stationary distribution, the two
// avoidance conditions, per-token uniformity, stationary marginals and a
// belief filter that decides whether one token, watched alone, is a simple
// random walk.

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uac/graph.hpp"
#include "uac/kernel.hpp"
#include "uac/rational.hpp"

namespace uac {

enum class Token { X, Y };

inline const char* to_string(Token t) { return t == Token::X ? "X" : "Y"; }

namespace detail {

inline VertexId observed(StatePair s, Token t) { return t == Token::X ? s.x : s.y; }
inline VertexId hidden(StatePair s, Token t) { return t == Token::X ? s.y : s.x; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Communicating classes
// ---------------------------------------------------------------------------

/// Strongly connected components of the positive-transition digraph (Tarjan).
inline std::vector<std::vector<std::size_t>> communicating_classes(const JointKernel& k) {
  const std::size_t n = k.size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<std::uint8_t> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> classes;
  int counter = 0;

  // Iterative Tarjan to stay clear of deep recursion on long chains.
  struct Frame {
    std::size_t v;
    std::size_t edge;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto row = k.row(f.v);
      if (f.edge < row.size()) {
        const std::size_t w = *k.index_of(row[f.edge++].target);
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      if (low[f.v] == index[f.v]) {
        std::vector<std::size_t> component;
        std::size_t w = 0;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          component.push_back(w);
        } while (w != f.v);
        std::sort(component.begin(), component.end());
        classes.push_back(std::move(component));
      }
      const std::size_t v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
  return classes;
}

/// Closed classes reachable from the start state, ordered by smallest member.
inline std::vector<std::vector<std::size_t>> closed_classes(const JointKernel& k) {
  const auto classes = communicating_classes(k);
  std::vector<std::size_t> class_of(k.size());
  for (std::size_t c = 0; c < classes.size(); ++c)
    for (std::size_t v : classes[c]) class_of[v] = c;

  std::vector<std::uint8_t> reach(k.size(), 0);
  std::vector<std::size_t> todo{k.start_index()};
  reach[k.start_index()] = 1;
  while (!todo.empty()) {
    const std::size_t v = todo.back();
    todo.pop_back();
    for (const auto& t : k.row(v)) {
      const std::size_t w = *k.index_of(t.target);
      if (!reach[w]) {
        reach[w] = 1;
        todo.push_back(w);
      }
    }
  }

  std::vector<std::vector<std::size_t>> out;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (!reach[classes[c].front()]) continue;
    bool closed = true;
    for (std::size_t v : classes[c])
      for (const auto& t : k.row(v))
        if (class_of[*k.index_of(t.target)] != c) closed = false;
    if (closed) out.push_back(classes[c]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Kernel restricted to one closed class; the start is its smallest state.
inline JointKernel restrict_to_class(const JointKernel& k, const std::vector<std::size_t>& cls) {
  std::vector<StatePair> states;
  std::vector<std::vector<Transition>> rows;
  for (std::size_t i : cls) {
    states.push_back(k.state(i));
    rows.emplace_back(k.row(i).begin(), k.row(i).end());
  }
  const StatePair start = states.front();
  return JointKernel(k.graph_ptr(), std::move(states), std::move(rows), start);
}

// ---------------------------------------------------------------------------
// Stationary distribution
// ---------------------------------------------------------------------------

class MultipleClosedClassesError : public std::runtime_error {
 public:
  explicit MultipleClosedClassesError(std::vector<std::vector<StatePair>> classes)
      : std::runtime_error("kernel has " + std::to_string(classes.size()) +
                           " closed classes reachable from the start state"),
        classes_(std::move(classes)) {}
  const std::vector<std::vector<StatePair>>& classes() const { return classes_; }

 private:
  std::vector<std::vector<StatePair>> classes_;
};

struct StationaryDist {
  enum class Method { Exact, Iterative };
  Method method = Method::Exact;
  std::vector<Rational> exact;  // per kernel state; empty when iterative
  std::vector<double> approx;   // per kernel state
  double residual = 0.0;        // L1 norm of pi T - pi

  bool positive(std::size_t i) const {
    return method == Method::Exact ? exact[i] > 0 : approx[i] > 1e-12;
  }
};

inline const char* to_string(StationaryDist::Method m) {
  return m == StationaryDist::Method::Exact ? "exact" : "iterative";
}

namespace detail {

/// Exact solve of pi T = pi, sum pi = 1 on one closed class.
inline std::vector<Rational> solve_stationary_exact(const JointKernel& k,
                                                    const std::vector<std::size_t>& cls) {
  const std::size_t m = cls.size();
  std::map<std::size_t, std::size_t> local;
  for (std::size_t i = 0; i < m; ++i) local[cls[i]] = i;
  // Row j of the system: sum_i pi_i T[i -> j] - pi_j = 0; the last row is
  // replaced by the normalisation.
  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m + 1, Rational(0)));
  for (std::size_t i = 0; i < m; ++i) {
    for (const auto& t : k.row(cls[i])) a[local.at(*k.index_of(t.target))][i] += t.probability;
    a[i][i] -= 1;
  }
  for (std::size_t i = 0; i < m; ++i) a[m - 1][i] = 1;
  a[m - 1][m] = 1;

  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    while (pivot < m && a[pivot][col] == 0) ++pivot;
    if (pivot == m) throw std::logic_error("singular stationary system");
    std::swap(a[pivot], a[col]);
    const Rational inv = 1 / a[col][col];
    for (std::size_t c = col; c <= m; ++c) a[col][c] *= inv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational factor = a[r][col];
      for (std::size_t c = col; c <= m; ++c)
        if (a[col][c] != 0) a[r][c] -= factor * a[col][c];
    }
  }
  std::vector<Rational> pi(m);
  for (std::size_t i = 0; i < m; ++i) pi[i] = a[i][m];
  return pi;
}

/// Power iteration on the lazy chain (I + T) / 2, which has the same
/// stationary law and converges for periodic chains too.
inline std::vector<double> solve_stationary_iterative(const JointKernel& k,
                                                      const std::vector<std::size_t>& cls,
                                                      double tolerance, double& residual) {
  std::map<std::size_t, std::size_t> local;
  for (std::size_t i = 0; i < cls.size(); ++i) local[cls[i]] = i;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(cls.size());
  for (std::size_t i = 0; i < cls.size(); ++i)
    for (const auto& t : k.row(cls[i]))
      rows[i].emplace_back(local.at(*k.index_of(t.target)), to_double(t.probability));
  std::vector<double> pi(cls.size(), 1.0 / static_cast<double>(cls.size())), next(cls.size());
  for (int iter = 0; iter < 10'000'000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < cls.size(); ++i)
      for (const auto& [j, p] : rows[i]) next[j] += pi[i] * p;
    residual = 0.0;
    for (std::size_t i = 0; i < cls.size(); ++i) residual += std::abs(next[i] - pi[i]);
    if (residual < tolerance) return pi;
    for (std::size_t i = 0; i < cls.size(); ++i) pi[i] = 0.5 * (pi[i] + next[i]);
  }
  return pi;
}

}  // namespace detail

/// Stationary law on the unique closed class reachable from the start (zero
/// on transient states). Exact for classes up to `exact_limit` states.
inline StationaryDist stationary_distribution(const JointKernel& k, std::size_t exact_limit = 3000,
                                              double tolerance = 1e-12) {
  const auto classes = closed_classes(k);
  if (classes.size() != 1) {
    std::vector<std::vector<StatePair>> listed;
    for (const auto& c : classes) {
      auto& l = listed.emplace_back();
      for (std::size_t i : c) l.push_back(k.state(i));
    }
    throw MultipleClosedClassesError(std::move(listed));
  }
  const auto& cls = classes.front();
  StationaryDist out;
  out.approx.assign(k.size(), 0.0);
  if (cls.size() <= exact_limit) {
    out.method = StationaryDist::Method::Exact;
    out.exact.assign(k.size(), Rational(0));
    const auto pi = detail::solve_stationary_exact(k, cls);
    for (std::size_t i = 0; i < cls.size(); ++i) {
      out.exact[cls[i]] = pi[i];
      out.approx[cls[i]] = to_double(pi[i]);
    }
  } else {
    out.method = StationaryDist::Method::Iterative;
    const auto pi = detail::solve_stationary_iterative(k, cls, tolerance, out.residual);
    for (std::size_t i = 0; i < cls.size(); ++i) out.approx[cls[i]] = pi[i];
  }
  return out;
}

/// Stationary mass of each token's position, indexed by vertex.
inline std::vector<Rational> token_marginal(const JointKernel& k, const StationaryDist& pi, Token t) {
  std::vector<Rational> out(k.graph().order(), Rational(0));
  for (std::size_t i = 0; i < k.size(); ++i)
    if (pi.method == StationaryDist::Method::Exact) out[detail::observed(k.state(i), t)] += pi.exact[i];
  return out;
}

// ---------------------------------------------------------------------------
// Avoidance
// ---------------------------------------------------------------------------

struct AvoidanceCheck {
  bool pass = true;
  std::string witness;  // empty on pass
};

/// Over the stationary support: no state (v, v), and no move of X onto the
/// cell Y currently occupies, i.e. T[(v,w) -> (w,u)] = 0.
inline AvoidanceCheck check_avoidance(const JointKernel& k, const StationaryDist& pi) {
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (!pi.positive(i)) continue;
    const StatePair s = k.state(i);
    if (s.x == s.y) return {false, "state " + to_string(s) + " has positive stationary mass"};
    for (const auto& t : k.row(i))
      if (t.target.x == s.y)
        return {false, "T[" + to_string(s) + "->" + to_string(t.target) + "] = " +
                           to_string(t.probability) + " moves X onto Y"};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Uniformity
// ---------------------------------------------------------------------------

struct UniformityWitness {
  StatePair state;
  Token token = Token::X;
  VertexId target = 0;
  Rational marginal;
  Rational expected;
};

inline std::string describe(const UniformityWitness& w) {
  return "from " + to_string(w.state) + " token " + to_string(w.token) + " -> " +
         std::to_string(w.target) + " has marginal " + to_string(w.marginal) + ", expected " +
         to_string(w.expected);
}

/// First token marginal in state i that differs from the simple random walk.
inline std::optional<UniformityWitness> uniformity_violation(const JointKernel& k, std::size_t i,
                                                             Token t) {
  const Graph& g = k.graph();
  const StatePair s = k.state(i);
  const VertexId v = detail::observed(s, t);
  std::map<VertexId, Rational> marginal;
  for (const auto& tr : k.row(i)) marginal[detail::observed(tr.target, t)] += tr.probability;
  const Rational expected = make_rational(1, static_cast<std::int64_t>(g.degree(v)));
  // Marginals sum to one, so any defect shows up as excess somewhere; report
  // that target first.
  for (const auto& [w, p] : marginal) {
    const Rational want = g.adjacent(v, w) ? expected : Rational(0);
    if (p > want) return UniformityWitness{s, t, w, p, want};
  }
  for (VertexId w : g.neighbors(v)) {
    const auto it = marginal.find(w);
    const Rational got = it == marginal.end() ? Rational(0) : it->second;
    if (got != expected) return UniformityWitness{s, t, w, got, expected};
  }
  return std::nullopt;
}

struct UniformityCheck {
  bool pass = true;
  std::optional<UniformityWitness> witness;
  std::vector<UniformityWitness> transient_warnings;
};

inline UniformityCheck check_uniformity(const JointKernel& k, const StationaryDist& pi) {
  UniformityCheck out;
  for (std::size_t i = 0; i < k.size(); ++i)
    for (Token t : {Token::X, Token::Y}) {
      const auto w = uniformity_violation(k, i, t);
      if (!w) continue;
      if (pi.positive(i)) {
        if (out.pass) out.witness = w;
        out.pass = false;
      } else {
        out.transient_warnings.push_back(*w);
      }
    }
  return out;
}

// ---------------------------------------------------------------------------
// Stationary marginals versus the simple random walk law deg(v) / sum deg.
// ---------------------------------------------------------------------------

inline std::vector<Rational> srw_stationary(const Graph& g) {
  std::int64_t total = 0;
  for (VertexId v = 0; v < g.order(); ++v) total += static_cast<std::int64_t>(g.degree(v));
  std::vector<Rational> out(g.order());
  for (VertexId v = 0; v < g.order(); ++v)
    out[v] = make_rational(static_cast<std::int64_t>(g.degree(v)), total);
  return out;
}

struct MarginalCheck {
  bool pass = true;
  std::string witness;
};

inline MarginalCheck check_marginal_stationary(const JointKernel& k, const StationaryDist& pi) {
  const auto target = srw_stationary(k.graph());
  for (Token t : {Token::X, Token::Y}) {
    if (pi.method == StationaryDist::Method::Exact) {
      const auto got = token_marginal(k, pi, t);
      for (VertexId v = 0; v < got.size(); ++v)
        if (got[v] != target[v])
          return {false, "token " + std::string(to_string(t)) + " at " + std::to_string(v) +
                             " has mass " + to_string(got[v]) + ", expected " + to_string(target[v])};
    } else {
      std::vector<double> got(k.graph().order(), 0.0);
      for (std::size_t i = 0; i < k.size(); ++i) got[detail::observed(k.state(i), t)] += pi.approx[i];
      for (VertexId v = 0; v < got.size(); ++v)
        if (std::abs(got[v] - to_double(target[v])) > 1e-9)
          return {false, "token " + std::string(to_string(t)) + " at " + std::to_string(v) +
                             " has mass " + std::to_string(got[v]) + ", expected " +
                             to_string(target[v])};
    }
  }
  return {};
}

/// True when every X move fixes the Y move: one positive target per X target.
inline bool deterministic_given_x(const JointKernel& k) {
  for (std::size_t i = 0; i < k.size(); ++i) {
    const auto row = k.row(i);
    for (std::size_t a = 1; a < row.size(); ++a)
      if (row[a].target.x == row[a - 1].target.x) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Belief filter
// ---------------------------------------------------------------------------

/// Observer's posterior over the hidden token given the watched token's
/// position history.
struct BeliefState {
  VertexId observed = 0;
  std::vector<std::pair<VertexId, Rational>> belief;  // sorted by hidden position, positive mass

  friend bool operator<(const BeliefState& a, const BeliefState& b) {
    if (a.observed != b.observed) return a.observed < b.observed;
    return std::lexicographical_compare(
        a.belief.begin(), a.belief.end(), b.belief.begin(), b.belief.end(),
        [](const auto& p, const auto& q) {
          return p.first != q.first ? p.first < q.first : p.second < q.second;
        });
  }
};

namespace detail {

/// Joint law of (next observed position, next hidden position) under a belief.
inline std::map<VertexId, std::map<VertexId, Rational>> belief_step(const JointKernel& k,
                                                                    const BeliefState& b, Token t) {
  std::map<VertexId, std::map<VertexId, Rational>> out;
  for (const auto& [h, p] : b.belief) {
    const StatePair s = t == Token::X ? StatePair{b.observed, h} : StatePair{h, b.observed};
    const auto i = k.index_of(s);
    if (!i) continue;
    for (const auto& tr : k.row(*i))
      out[observed(tr.target, t)][hidden(tr.target, t)] += p * tr.probability;
  }
  return out;
}

inline BeliefState condition(VertexId observed_next, const std::map<VertexId, Rational>& joint) {
  Rational total = 0;
  for (const auto& [h, p] : joint) total += p;
  BeliefState b{observed_next, {}};
  for (const auto& [h, p] : joint)
    if (p > 0) b.belief.emplace_back(h, p / total);
  return b;
}

/// Initial beliefs: pi(hidden | observed) for each observed position.
inline std::vector<BeliefState> stationary_beliefs(const JointKernel& k, const StationaryDist& pi,
                                                   Token t) {
  std::map<VertexId, std::map<VertexId, Rational>> joint;
  for (std::size_t i = 0; i < k.size(); ++i)
    if (pi.exact[i] > 0) joint[observed(k.state(i), t)][hidden(k.state(i), t)] += pi.exact[i];
  std::vector<BeliefState> out;
  for (const auto& [v, row] : joint) out.push_back(condition(v, row));
  return out;
}

}  // namespace detail

struct FilterResult {
  enum class Outcome { Faithful, Violation, Inconclusive };
  Outcome outcome = Outcome::Faithful;
  std::vector<VertexId> history;                 // observed positions, oldest first
  std::map<VertexId, Rational> predicted;        // next-step law after `history`
  std::size_t beliefs_explored = 0;
};

inline const char* to_string(FilterResult::Outcome o) {
  switch (o) {
    case FilterResult::Outcome::Faithful: return "faithful";
    case FilterResult::Outcome::Violation: return "violation";
    default: return "inconclusive";
  }
}

/// Decides whether the watched token, started from stationarity, moves as a
/// simple random walk no matter what it has been seen to do. Explores
/// distinct beliefs breadth first, so a returned violation has a shortest
/// history; gives up as inconclusive beyond `belief_cap` beliefs.
inline FilterResult filter_faithfulness(const JointKernel& k, const StationaryDist& pi, Token t,
                                        std::size_t belief_cap = 10'000) {
  FilterResult out;
  if (pi.method != StationaryDist::Method::Exact) {
    out.outcome = FilterResult::Outcome::Inconclusive;
    return out;
  }
  const Graph& g = k.graph();
  auto initial = detail::stationary_beliefs(k, pi, t);

  // When every supported state already has the walk's marginal for this
  // token, every belief predicts correctly and the initial beliefs suffice.
  bool all_uniform = true;
  for (std::size_t i = 0; i < k.size() && all_uniform; ++i)
    if (pi.exact[i] > 0 && uniformity_violation(k, i, t)) all_uniform = false;
  if (all_uniform) {
    out.beliefs_explored = initial.size();
    return out;
  }

  std::map<BeliefState, std::size_t> seen;
  std::deque<std::pair<BeliefState, std::vector<VertexId>>> queue;
  for (auto& b : initial) {
    seen.emplace(b, seen.size());
    queue.emplace_back(b, std::vector<VertexId>{b.observed});
  }
  while (!queue.empty()) {
    auto [belief, history] = std::move(queue.front());
    queue.pop_front();
    const auto step = detail::belief_step(k, belief, t);

    std::map<VertexId, Rational> predicted;
    for (const auto& [w, row] : step)
      for (const auto& [h, p] : row) predicted[w] += p;
    const auto nb = g.neighbors(belief.observed);
    const Rational expected = make_rational(1, static_cast<std::int64_t>(nb.size()));
    bool ok = predicted.size() == nb.size();
    for (VertexId w : nb) {
      const auto it = predicted.find(w);
      ok = ok && it != predicted.end() && it->second == expected;
    }
    if (!ok) {
      out.outcome = FilterResult::Outcome::Violation;
      out.history = std::move(history);
      out.predicted = std::move(predicted);
      out.beliefs_explored = seen.size();
      return out;
    }
    for (const auto& [w, row] : step) {
      BeliefState next = detail::condition(w, row);
      if (seen.contains(next)) continue;
      if (seen.size() >= belief_cap) {
        out.outcome = FilterResult::Outcome::Inconclusive;
        out.beliefs_explored = seen.size();
        return out;
      }
      seen.emplace(next, seen.size());
      auto h = history;
      h.push_back(w);
      queue.emplace_back(std::move(next), std::move(h));
    }
  }
  out.beliefs_explored = seen.size();
  return out;
}

/// Next-step law of the watched token after observing `history` from
/// stationarity; nullopt when the history has probability zero.
inline std::optional<std::map<VertexId, Rational>> predict_after_history(
    const JointKernel& k, const StationaryDist& pi, Token t, const std::vector<VertexId>& history) {
  if (history.empty() || pi.method != StationaryDist::Method::Exact) return std::nullopt;
  std::optional<BeliefState> belief;
  for (auto& b : detail::stationary_beliefs(k, pi, t))
    if (b.observed == history.front()) belief = b;
  if (!belief) return std::nullopt;
  for (std::size_t i = 1; i < history.size(); ++i) {
    const auto step = detail::belief_step(k, *belief, t);
    const auto it = step.find(history[i]);
    if (it == step.end()) return std::nullopt;
    belief = detail::condition(history[i], it->second);
  }
  std::map<VertexId, Rational> predicted;
  for (const auto& [w, row] : detail::belief_step(k, *belief, t))
    for (const auto& [h, p] : row) predicted[w] += p;
  return predicted;
}

}  // namespace uac
