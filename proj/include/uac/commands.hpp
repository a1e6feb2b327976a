#pragma once

// Command implementations behind the `uac` executable. Each command takes a
// RunConfig and returns its report text plus any artifact (kernel file or
// trajectory); the executable only handles argument parsing and file I/O.
//
// Report schema: one "key: value" per line, keys stable across versions.
//   common    tool, version, command, config.<flag>, graph.source, graph.order,
//             graph.edges, graph.hash
//   decide    arc_order, generations, forbidden.<i> (one per generation),
//             survivors, verdict, witness
//   construct construction, kernel.states, kernel.start, kernel.hash
//   verify    kernel.hash, kernel.states, closed_classes, then per class c:
//             class.<c>.states, class.<c>.stationary, class.<c>.residual,
//             class.<c>.avoidance[.witness], class.<c>.uniformity[.witness],
//             class.<c>.uniformity.transient_warnings,
//             class.<c>.marginal[.witness], class.<c>.deterministic_given_x,
//             class.<c>.faithfulness.<X|Y>[.history|.predicted|.beliefs];
//             monte_carlo.collisions, monte_carlo.transition.p_min,
//             monte_carlo.history.<X|Y>.{tested,skipped,p_min,threshold,reject,worst};
//             result
//   simulate  steps, seed, collisions, occupancy.<X|Y>.<v>, trajectory.hash

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uac/automorphism.hpp"
#include "uac/builders.hpp"
#include "uac/couplings.hpp"
#include "uac/forbidden.hpp"
#include "uac/graph.hpp"
#include "uac/kernel.hpp"
#include "uac/simulation.hpp"
#include "uac/verifier.hpp"

namespace uac {

inline constexpr const char* kVersion = "1.0.0";

/// Invalid invocation or unusable input; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string graph_file;                   // --graph
  std::vector<std::string> builder;         // --builder name params...
  std::vector<std::string> construction;    // construct: name params...
  std::string kernel_file;                  // --kernel
  std::optional<StatePair> start;           // --start x y
  std::vector<VertexId> phi;                // --phi image list
  bool require_uniform = false;
  bool filter = false;
  bool monte_carlo = false;
  std::size_t steps = 1'000'000;
  std::optional<std::uint64_t> seed;
  std::size_t window = 3;
  double alpha = 0.01;
  std::size_t min_count = 50;
  std::size_t belief_cap = 10'000;
  unsigned workers = 1;
};

struct CommandResult {
  int exit_code = 0;
  std::string report;
  std::string artifact;  // kernel text (construct) or trajectory (simulate)
};

class Report {
 public:
  void add(const std::string& key, const std::string& value) {
    out_ << key << ": " << value << '\n';
  }
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }
  void add(const std::string& key, bool value) { add(key, value ? "true" : "false"); }
  template <typename T>
    requires std::is_integral_v<T>
  void add(const std::string& key, T value) {
    add(key, std::to_string(value));
  }
  void add_real(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", value);
    add(key, buf);
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

namespace detail {

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string join(const std::vector<std::string>& parts, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

inline std::string join_vertices(const std::vector<VertexId>& vs) {
  std::vector<std::string> parts;
  for (VertexId v : vs) parts.push_back(std::to_string(v));
  return join(parts);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct LoadedGraph {
  Graph graph;
  std::string source;  // "builder <spec>" or "file <path>"
};

inline LoadedGraph load_graph(const std::vector<std::string>& builder, const std::string& file) {
  if (!builder.empty() && !file.empty()) throw UsageError("give either --graph or --builder, not both");
  if (!builder.empty()) {
    try {
      return {build::from_spec(builder), "builder " + join(builder)};
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (!file.empty()) {
    try {
      return {parse_graph(read_file(file)), "file " + file};
    } catch (const GraphParseError& e) {
      throw UsageError(e.what());
    }
  }
  throw UsageError("no graph given (use --graph <file> or --builder <name> [params])");
}

inline void common_header(Report& r, const RunConfig& c) {
  r.add("tool", "uac");
  r.add("version", kVersion);
  r.add("command", c.command);
  if (!c.graph_file.empty()) r.add("config.graph", c.graph_file);
  if (!c.builder.empty()) r.add("config.builder", join(c.builder));
  if (!c.construction.empty()) r.add("config.construction", join(c.construction));
  if (!c.kernel_file.empty()) r.add("config.kernel", c.kernel_file);
  if (c.start) r.add("config.start", to_string(*c.start));
  if (!c.phi.empty()) r.add("config.phi", join_vertices(c.phi));
  if (c.command == "verify") {
    r.add("config.require_uniform", c.require_uniform);
    r.add("config.filter", c.filter);
    r.add("config.belief_cap", c.belief_cap);
    r.add("config.monte_carlo", c.monte_carlo);
  }
  if (c.command == "simulate" || (c.command == "verify" && c.monte_carlo)) {
    r.add("config.steps", c.steps);
    r.add("config.seed", c.seed ? std::to_string(*c.seed) : "none");
  }
  if (c.command == "verify" && c.monte_carlo) {
    r.add("config.window", c.window);
    r.add_real("config.alpha", c.alpha);
    r.add("config.min_count", c.min_count);
  }
  if (c.command == "decide") r.add("config.workers", c.workers);
}

inline void graph_header(Report& r, const LoadedGraph& g) {
  r.add("graph.source", g.source);
  r.add("graph.order", g.graph.order());
  r.add("graph.edges", g.graph.edge_count());
  r.add("graph.loops", g.graph.loops_enabled());
  r.add("graph.hash", hex64(fnv1a(format_graph(g.graph))));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// decide
// ---------------------------------------------------------------------------

inline CommandResult cmd_decide(const RunConfig& c) {
  Report r;
  detail::common_header(r, c);
  const auto g = detail::load_graph(c.builder, c.graph_file);
  detail::graph_header(r, g);
  if (!is_connected(g.graph)) throw UsageError("graph is not connected");
  const auto trace = forbidden_closure(g.graph, c.workers);
  const auto verdict = verdict_from(trace);
  r.add("arc_order", "lexicographic");
  r.add("generations", trace.rounds);
  for (std::size_t i = 0; i < trace.generations.size(); ++i)
    r.add("forbidden." + std::to_string(i), trace.generations[i].count());
  const std::size_t n = g.graph.order();
  r.add("survivors", n * n - trace.fixed_point.count());
  r.add("verdict", verdict.admits ? "admits" : "does-not-admit");
  r.add("witness", verdict.witness ? to_string(*verdict.witness) : "none");
  return {verdict.admits ? 0 : 1, r.str(), {}};
}

// ---------------------------------------------------------------------------
// construct
// ---------------------------------------------------------------------------

/// Names accepted by `construct`.
inline const std::vector<std::string>& construction_names() {
  static const std::vector<std::string> names = {
      "fixed-distance-cycle", "hypercube-flip", "automorphism", "bipartite",   "cluster",
      "k3-loops",             "near-complete",  "srg-matching", "tree-noncoupling",
      "extract",              "min-entropy"};
  return names;
}

inline CommandResult cmd_construct(const RunConfig& c) {
  if (c.construction.empty()) throw UsageError("construct needs a construction name");
  const std::string& name = c.construction[0];
  const std::vector<std::string> args(c.construction.begin() + 1, c.construction.end());
  auto p = [&](std::size_t i) { return build::detail::param(args, i, name); };
  auto expect = [&](std::size_t count) {
    if (args.size() != count)
      throw UsageError("construction '" + name + "' takes " + std::to_string(count) + " parameter(s)");
  };
  auto graph = [&] { return detail::load_graph(c.builder, c.graph_file); };

  std::optional<JointKernel> k;
  std::string graph_spec;  // recorded so `verify` can rebuild the graph
  try {
    if (name == "fixed-distance-cycle") {
      expect(2);
      k = fixed_distance_cycle(p(0), p(1), c.start ? c.start->x : 0);
      graph_spec = "builder cycle " + args[0];
    } else if (name == "hypercube-flip") {
      expect(1);
      k = hypercube_flip(p(0), c.start ? c.start->x : 0);
      graph_spec = "builder hypercube " + args[0];
    } else if (name == "cluster") {
      expect(2);
      k = cluster_coupling_complete(p(0), p(1)).kernel;
      graph_spec = "builder complete " + std::to_string(p(0) * p(1));
    } else if (name == "k3-loops") {
      expect(0);
      k = k3_loops_coupling();
      graph_spec = "builder complete-loops 3";
    } else if (name == "tree-noncoupling") {
      if (args.size() > 1) throw UsageError("construction 'tree-noncoupling' takes at most 1 parameter");
      k = args.empty() ? tree_noncoupling_example() : tree_noncoupling_example(parse_rational(args[0]));
      graph_spec = "builder spider 3 3";
    } else {
      expect(0);
      const auto g = graph();
      graph_spec = g.source;
      if (name == "automorphism") {
        std::optional<VertexPermutation> phi;
        if (!c.phi.empty()) {
          phi = VertexPermutation(c.phi);
        } else {
          const auto found = find_free_automorphism(g.graph, 1'000'000);
          if (!found.phi) throw PreconditionError("automorphism: no fixed-point-free automorphism found");
          phi = *found.phi;
        }
        k = automorphism_coupling(g.graph, *phi, c.start ? c.start->x : 0);
      } else if (name == "bipartite") {
        k = bipartite_coupling(g.graph, c.start);
      } else if (name == "near-complete") {
        k = near_complete_regular_coupling(g.graph, c.start ? std::optional<VertexId>(c.start->x)
                                                            : std::nullopt);
      } else if (name == "srg-matching") {
        k = srg_matching_coupling(g.graph, c.start);
      } else if (name == "extract" || name == "min-entropy") {
        if (!is_connected(g.graph)) throw UsageError("graph is not connected");
        const auto trace = forbidden_closure(g.graph);
        const auto verdict = verdict_from(trace);
        if (!verdict.admits) throw PreconditionError(name + ": graph admits no uniform avoidance coupling");
        k = name == "extract" ? extract_uac_kernel(g.graph, trace, c.start.value_or(*verdict.witness))
                              : minimum_entropy_kernel(g.graph, trace, c.start);
      } else {
        throw UsageError("unknown construction '" + name + "'");
      }
    }
  } catch (const std::invalid_argument& e) {
    // Precondition failures and bad parameters are both the caller's error.
    throw UsageError(e.what());
  }

  const std::string kernel_text_body = format_kernel(*k);
  const std::string kernel_hash = detail::hex64(fnv1a(kernel_text_body));
  std::vector<std::pair<std::string, std::string>> header = {
      {"format", "uac-kernel 1"},
      {"construction", detail::join(c.construction)},
      {"graph", graph_spec},
      {"graph-hash", detail::hex64(fnv1a(format_graph(k->graph())))},
      {"kernel-hash", kernel_hash},
  };
  Report r;
  detail::common_header(r, c);
  r.add("construction", name);
  r.add("graph.source", graph_spec);
  r.add("graph.hash", header[3].second);
  r.add("kernel.states", k->size());
  r.add("kernel.start", to_string(k->start()));
  r.add("kernel.hash", kernel_hash);
  return {0, r.str(), format_kernel(*k, header)};
}

// ---------------------------------------------------------------------------
// verify / simulate share kernel loading
// ---------------------------------------------------------------------------

namespace detail {

struct LoadedKernel {
  LoadedGraph graph;
  std::shared_ptr<JointKernel> kernel;
};

inline LoadedKernel load_kernel(const RunConfig& c) {
  if (c.kernel_file.empty()) throw UsageError(c.command + " needs --kernel <file>");
  KernelFile file;
  try {
    file = parse_kernel_file(read_file(c.kernel_file));
  } catch (const KernelError& e) {
    throw UsageError(e.what());
  }
  LoadedGraph g{Graph(1, {}), {}};
  if (!c.builder.empty() || !c.graph_file.empty()) {
    g = load_graph(c.builder, c.graph_file);
  } else {
    const auto spec = file.header_value("graph");
    if (!spec) throw UsageError("kernel names no graph; pass --graph or --builder");
    const auto words = split_ws(*spec);
    if (words.size() >= 2 && words[0] == "builder")
      g = load_graph({words.begin() + 1, words.end()}, {});
    else if (words.size() == 2 && words[0] == "file")
      g = load_graph({}, words[1]);
    else
      throw UsageError("unrecognised graph reference '" + *spec + "'");
  }
  if (const auto h = file.header_value("graph-hash"); h && *h != hex64(fnv1a(format_graph(g.graph))))
    throw UsageError("graph does not match the kernel's recorded graph hash");
  try {
    auto kernel = std::make_shared<JointKernel>(kernel_from_file(file, g.graph));
    return {std::move(g), std::move(kernel)};
  } catch (const KernelError& e) {
    throw UsageError(e.what());
  }
}

inline std::string format_distribution(const std::map<VertexId, Rational>& d) {
  std::vector<std::string> parts;
  for (const auto& [v, p] : d) parts.push_back(std::to_string(v) + "=" + to_string(p));
  return join(parts);
}

}  // namespace detail

inline CommandResult cmd_verify(const RunConfig& c) {
  Report r;
  detail::common_header(r, c);
  const auto loaded = detail::load_kernel(c);
  const JointKernel& k = *loaded.kernel;
  detail::graph_header(r, loaded.graph);
  r.add("kernel.hash", detail::hex64(fnv1a(format_kernel(k))));
  r.add("kernel.states", k.size());
  r.add("kernel.start", to_string(k.start()));

  bool ok = true;
  const auto classes = closed_classes(k);
  r.add("closed_classes", classes.size());
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const std::string pre = "class." + std::to_string(ci) + ".";
    const JointKernel sub = classes.size() == 1 && classes[0].size() == k.size()
                                ? k
                                : restrict_to_class(k, classes[ci]);
    r.add(pre + "states", sub.size());
    r.add(pre + "first", to_string(sub.state(0)));
    const auto pi = stationary_distribution(sub);
    r.add(pre + "stationary", to_string(pi.method));
    r.add_real(pre + "residual", pi.residual);

    const auto avoid = check_avoidance(sub, pi);
    r.add(pre + "avoidance", avoid.pass ? "pass" : "fail");
    if (!avoid.pass) r.add(pre + "avoidance.witness", avoid.witness);
    ok = ok && avoid.pass;

    const auto uni = check_uniformity(sub, pi);
    r.add(pre + "uniformity", uni.pass ? "pass" : "fail");
    if (uni.witness) r.add(pre + "uniformity.witness", describe(*uni.witness));
    r.add(pre + "uniformity.transient_warnings", uni.transient_warnings.size());
    if (c.require_uniform) ok = ok && uni.pass;

    const auto marg = check_marginal_stationary(sub, pi);
    r.add(pre + "marginal", marg.pass ? "pass" : "fail");
    if (!marg.pass) r.add(pre + "marginal.witness", marg.witness);
    ok = ok && marg.pass;
    r.add(pre + "deterministic_given_x", deterministic_given_x(sub));

    if (c.filter) {
      for (Token t : {Token::X, Token::Y}) {
        const std::string key = pre + "faithfulness." + to_string(t);
        const auto f = filter_faithfulness(sub, pi, t, c.belief_cap);
        r.add(key, to_string(f.outcome));
        r.add(key + ".beliefs", f.beliefs_explored);
        if (f.outcome == FilterResult::Outcome::Violation) {
          r.add(key + ".history", detail::join_vertices(f.history));
          r.add(key + ".history_length", f.history.size());
          r.add(key + ".predicted", detail::format_distribution(f.predicted));
        }
        ok = ok && f.outcome == FilterResult::Outcome::Faithful;
      }
    }
  }

  if (c.monte_carlo) {
    if (!c.seed) throw UsageError("--monte-carlo needs an explicit --seed");
    const auto traj = simulate(k, c.steps, *c.seed);
    r.add("monte_carlo.collisions", traj.collisions);
    ok = ok && traj.collisions == 0;
    const auto trans = transition_frequency_test(k, traj, c.alpha, c.min_count);
    r.add_real("monte_carlo.transition.p_min", trans.tested[trans.worst].p_value);
    r.add("monte_carlo.transition.reject", trans.reject);
    ok = ok && !trans.reject;
    for (Token t : {Token::X, Token::Y}) {
      const std::string key = std::string("monte_carlo.history.") + to_string(t) + ".";
      const auto h = history_frequency_test(traj, k.graph(), t, c.window, c.alpha, c.min_count);
      const auto& worst = h.tested[h.worst];
      r.add(key + "tested", h.tested.size());
      r.add(key + "skipped", h.skipped.size());
      r.add_real(key + "p_min", worst.p_value);
      r.add_real(key + "threshold", h.threshold);
      r.add(key + "reject", h.reject);
      if (h.reject) {
        std::vector<std::string> counts;
        for (const auto& [v, n] : worst.next) counts.push_back(std::to_string(v) + "=" + std::to_string(n));
        r.add(key + "worst", detail::join_vertices(worst.history) + " -> " + detail::join(counts));
      }
      ok = ok && !h.reject;
    }
  }
  r.add("result", ok ? "pass" : "fail");
  return {ok ? 0 : 1, r.str(), {}};
}

inline CommandResult cmd_simulate(const RunConfig& c) {
  if (!c.seed) throw UsageError("simulate needs an explicit --seed");
  Report r;
  detail::common_header(r, c);
  const auto loaded = detail::load_kernel(c);
  const JointKernel& k = *loaded.kernel;
  detail::graph_header(r, loaded.graph);
  r.add("kernel.hash", detail::hex64(fnv1a(format_kernel(k))));
  Trajectory traj;
  try {
    traj = simulate(k, c.steps, *c.seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::string text;
  text.reserve(traj.states.size() * 8);
  for (const auto& s : traj.states) text += std::to_string(s.x) + ' ' + std::to_string(s.y) + '\n';

  const std::size_t n = k.graph().order();
  std::vector<std::size_t> occ_x(n, 0), occ_y(n, 0);
  for (const auto& s : traj.states) {
    ++occ_x[s.x];
    ++occ_y[s.y];
  }
  r.add("steps", c.steps);
  r.add("seed", *c.seed);
  r.add("collisions", traj.collisions);
  const double total = static_cast<double>(traj.states.size());
  for (VertexId v = 0; v < n; ++v) r.add_real("occupancy.X." + std::to_string(v), occ_x[v] / total);
  for (VertexId v = 0; v < n; ++v) r.add_real("occupancy.Y." + std::to_string(v), occ_y[v] / total);
  r.add("trajectory.hash", detail::hex64(fnv1a(text)));
  return {traj.collisions == 0 ? 0 : 1, r.str(), std::move(text)};
}

/// Dispatches on `c.command`; usage and input errors become exit code 2 with
/// the message in the report.
inline CommandResult run_command(const RunConfig& c) {
  try {
    if (c.command == "decide") return cmd_decide(c);
    if (c.command == "construct") return cmd_construct(c);
    if (c.command == "verify") return cmd_verify(c);
    if (c.command == "simulate") return cmd_simulate(c);
    throw UsageError("unknown command '" + c.command + "'");
  } catch (const std::exception& e) {
    return {2, std::string("error: ") + e.what() + "\n", {}};
  }
}

}  // namespace uac
