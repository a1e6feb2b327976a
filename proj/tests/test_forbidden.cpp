#include <gtest/gtest.h>

#include <random>

#include "oracles/brute_force_uac.hpp"
#include "oracles/graph_enum.hpp"
#include "uac/builders.hpp"
#include "uac/forbidden.hpp"
#include "uac/verifier.hpp"

using namespace uac;

namespace {

Graph relabel(const Graph& g, const std::vector<VertexId>& sigma) {
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) edges.emplace_back(sigma[e.u], sigma[e.v]);
  return Graph(g.order(), std::move(edges), g.loops_enabled());
}

Graph random_connected_graph(std::mt19937_64& rng, std::size_t n, double p) {
  for (;;) {
    std::bernoulli_distribution edge(p);
    std::vector<Edge> edges;
    for (VertexId u = 0; u < n; ++u)
      for (VertexId v = u + 1; v < n; ++v)
        if (edge(rng)) edges.emplace_back(u, v);
    Graph g(n, std::move(edges));
    if (is_connected(g)) return g;
  }
}

std::vector<Graph> assorted_graphs() {
  return {build::cycle(5),        build::cycle(8),      build::path(5),
          build::star(3),         build::petersen(),    build::fig5(),
          build::octahedron(),    build::hypercube(3),  build::tailed_diamond(),
          build::spider(3, 3),    build::complete(4),   build::complete_bipartite(2, 3),
          build::double_clique(3), build::complete_loops(3)};
}

}  // namespace

TEST(InitialForbidden, Examples) {
  EXPECT_EQ(initial_forbidden(build::cycle(5)).count(), 15u);
  EXPECT_TRUE(initial_forbidden(build::complete(4)).full());
  const PairSet q2 = initial_forbidden(build::hypercube(2));
  EXPECT_EQ(q2.count(), 12u);
  EXPECT_EQ(q2.complement_pairs(), (std::vector<StatePair>{{0, 3}, {1, 2}, {2, 1}, {3, 0}}));
  EXPECT_TRUE(initial_forbidden(build::complete_loops(3)).full());
}

TEST(PairTest, CycleFiveGhostArc) {
  const Graph g = build::cycle(5);
  const auto r = pair_test(g, initial_forbidden(g), 0, 2);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.network.lcm, 2);
  // N(0) = {1, 4}, N(2) = {1, 3}: arcs 1->3, 4->1, 4->3; no arc 1->1.
  std::vector<std::pair<VertexId, VertexId>> arcs;
  for (const auto& m : r.network.middle) arcs.emplace_back(m.from, m.to);
  EXPECT_EQ(arcs, (std::vector<std::pair<VertexId, VertexId>>{{1, 3}, {4, 1}}));
  EXPECT_EQ(r.flow_on(4, 1), 1);
  EXPECT_EQ(r.flow_on(1, 3), 1);
}

TEST(PairTest, PathThreeHasNoMiddleArcs) {
  const Graph g = build::path(3);
  const auto r = pair_test(g, initial_forbidden(g), 0, 2);
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(r.network.middle.empty());
}

TEST(PairTest, Fig5PairOneTwoFailsAtFirstGeneration) {
  const Graph g = build::fig5();
  // Paper labels 1 and 2 are internal 0 and 1.
  EXPECT_FALSE(g.adjacent(0, 1));
  EXPECT_FALSE(pair_test(g, initial_forbidden(g), 0, 1).pass);
  EXPECT_FALSE(pair_test(g, initial_forbidden(g), 1, 0).pass);
}

TEST(PairTest, LcmOverflowIsRejected) {
  EXPECT_EQ(checked_lcm(4, 6), 12);
  EXPECT_THROW(checked_lcm(std::int64_t{1} << 40, (std::int64_t{1} << 40) - 1), std::overflow_error);
}

TEST(RefineOnce, Examples) {
  const Graph c9 = build::cycle(9);
  EXPECT_EQ(refine_once(c9, initial_forbidden(c9)), initial_forbidden(c9));

  const Graph s = build::star(3);
  const PairSet f1 = refine_once(s, initial_forbidden(s));
  for (VertexId a = 1; a <= 3; ++a)
    for (VertexId b = 1; b <= 3; ++b) EXPECT_TRUE(f1.contains(a, b));

  const Graph f = build::fig5();
  const PairSet f0 = initial_forbidden(f);
  const PairSet g1 = refine_once(f, f0);
  EXPECT_TRUE(f0.is_subset_of(g1));
  EXPECT_FALSE(g1 == f0);
  EXPECT_TRUE(g1.contains(0, 1));
}

TEST(RefineOnce, ParallelMatchesSerial) {
  for (const Graph& g : assorted_graphs()) {
    PairSet f = initial_forbidden(g);
    for (int i = 0; i < 4; ++i) {
      const PairSet serial = refine_once(g, f, 1);
      EXPECT_EQ(refine_once(g, f, 4), serial);
      f = serial;
    }
  }
}

TEST(Closure, Examples) {
  EXPECT_TRUE(forbidden_closure(build::path(8)).fixed_point.full());
  EXPECT_EQ(forbidden_closure(build::path(8)).fixed_point.count(), 64u);
  EXPECT_TRUE(forbidden_closure(build::complete(5)).fixed_point.full());
  const auto fig = forbidden_closure(build::fig5());
  EXPECT_EQ(fig.fixed_point.count(), 144u);
  EXPECT_TRUE(fig.generations[1].contains(0, 1));
  EXPECT_FALSE(fig.generations[0].contains(0, 1));
}

TEST(Closure, TraceShape) {
  for (const Graph& g : assorted_graphs()) {
    const auto t = forbidden_closure(g);
    ASSERT_GE(t.generations.size(), 2u);
    EXPECT_EQ(t.generations.size(), t.rounds + 1);
    EXPECT_EQ(t.generations.back(), t.generations[t.generations.size() - 2]);
    EXPECT_EQ(t.generations.front(), initial_forbidden(g));
    for (std::size_t i = 0; i + 2 < t.generations.size(); ++i) {
      EXPECT_TRUE(t.generations[i].is_subset_of(t.generations[i + 1]));
      EXPECT_FALSE(t.generations[i] == t.generations[i + 1]);
    }
    const std::size_t open = g.order() * g.order() - t.generations[0].count();
    EXPECT_LE(t.rounds, open + 1);
  }
}

TEST(Closure, Symmetric) {
  for (const Graph& g : assorted_graphs())
    for (const PairSet& f : forbidden_closure(g).generations)
      for (VertexId x = 0; x < g.order(); ++x)
        for (VertexId y = 0; y < g.order(); ++y) EXPECT_EQ(f.contains(x, y), f.contains(y, x));
}

TEST(Closure, EquivariantUnderRelabelling) {
  std::mt19937_64 rng(2024);
  for (const Graph& g : assorted_graphs()) {
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<VertexId> sigma(g.order());
      std::iota(sigma.begin(), sigma.end(), 0);
      std::shuffle(sigma.begin(), sigma.end(), rng);
      const auto a = forbidden_closure(g);
      const auto b = forbidden_closure(relabel(g, sigma));
      ASSERT_EQ(a.generations.size(), b.generations.size());
      for (std::size_t i = 0; i < a.generations.size(); ++i)
        for (VertexId x = 0; x < g.order(); ++x)
          for (VertexId y = 0; y < g.order(); ++y)
            EXPECT_EQ(a.generations[i].contains(x, y), b.generations[i].contains(sigma[x], sigma[y]));
    }
  }
}

TEST(Closure, CascadeFromFullyForbiddenVertex) {
  // Once every pair touching v is forbidden, every pair touching a neighbor
  // of v follows within two generations.
  std::mt19937_64 rng(5);
  std::vector<Graph> graphs = {build::star(3), build::star(5), build::spider(3, 3), build::path(7),
                               build::fig5()};
  for (int i = 0; i < 20; ++i) graphs.push_back(random_connected_graph(rng, 7, 0.3));
  for (const Graph& g : graphs) {
    const auto t = forbidden_closure(g);
    const std::size_t n = g.order();
    for (std::size_t i = 0; i < t.generations.size(); ++i)
      for (VertexId v = 0; v < n; ++v) {
        bool all = true;
        for (VertexId u = 0; u < n; ++u)
          all = all && t.generations[i].contains(v, u) && t.generations[i].contains(u, v);
        if (!all) continue;
        const PairSet& later = t.generations[std::min(i + 2, t.generations.size() - 1)];
        for (VertexId w : g.neighbors(v))
          for (VertexId u = 0; u < n; ++u) {
            EXPECT_TRUE(later.contains(w, u));
            EXPECT_TRUE(later.contains(u, w));
          }
      }
  }
}

TEST(AdmitsUac, Examples) {
  const auto c4 = admits_uac(build::cycle(4));
  EXPECT_TRUE(c4.admits);
  EXPECT_EQ(c4.witness, (StatePair{0, 2}));
  const auto p = forbidden_closure(build::petersen());
  EXPECT_EQ(p.fixed_point, initial_forbidden(build::petersen()));
  EXPECT_FALSE(admits_uac(build::fig5()).admits);
  EXPECT_FALSE(admits_uac(build::star(4)).admits);
  EXPECT_TRUE(admits_uac(build::tailed_diamond()).admits);
  EXPECT_THROW(admits_uac(Graph(4, {{0, 1}, {2, 3}})), NotConnectedError);
}

TEST(AdmitsUac, AgreesWithBruteForceUpToFiveVertices) {
  for (int n = 4; n <= 5; ++n)
    for (const Graph& g : oracle::connected_graphs(n))
      EXPECT_EQ(admits_uac(g).admits, oracle::brute_force_admits(g).admits) << format_graph(g);
}

TEST(AdmitsUac, GraphCounts) {
  EXPECT_EQ(oracle::connected_graphs(4).size(), 6u);
  EXPECT_EQ(oracle::connected_graphs(5).size(), 21u);
}

TEST(Extract, CycleSixForcedFlow) {
  const Graph g = build::cycle(6);
  const auto k = extract_uac_kernel(g, forbidden_closure(g), {0, 2});
  EXPECT_EQ(k.probability({0, 2}, {1, 3}), make_rational(1, 2));
  EXPECT_EQ(k.probability({0, 2}, {5, 1}), make_rational(1, 2));
  EXPECT_EQ(k.row(*k.index_of({0, 2})).size(), 2u);
}

TEST(Extract, HypercubeTwo) {
  const Graph g = build::hypercube(2);
  const auto k = extract_uac_kernel(g, forbidden_closure(g), {0, 3});
  const auto row = k.row(*k.index_of({0, 3}));
  ASSERT_EQ(row.size(), 2u);
  for (const auto& t : row) EXPECT_EQ(t.probability, make_rational(1, 2));
}

TEST(Extract, RejectsForbiddenStart) {
  const Graph g = build::cycle(6);
  EXPECT_THROW(extract_uac_kernel(g, forbidden_closure(g), {0, 1}), std::invalid_argument);
}

TEST(Extract, StructuralUniformityAndTargets) {
  for (const Graph& g : assorted_graphs()) {
    const auto t = forbidden_closure(g);
    for (const StatePair s : t.fixed_point.complement_pairs()) {
      const auto k = extract_uac_kernel(g, t, s);
      for (std::size_t i = 0; i < k.size(); ++i) {
        for (const auto& tr : k.row(i)) EXPECT_FALSE(t.fixed_point.contains(tr.target));
        EXPECT_FALSE(uniformity_violation(k, i, Token::X));
        EXPECT_FALSE(uniformity_violation(k, i, Token::Y));
      }
    }
  }
}

TEST(MinimumEntropy, CycleSevenIsFixedDistance) {
  const Graph g = build::cycle(7);
  const auto k = minimum_entropy_kernel(g, forbidden_closure(g), StatePair{0, 2});
  EXPECT_EQ(k.size(), 7u);
  for (std::size_t i = 0; i < k.size(); ++i) {
    const StatePair s = k.state(i);
    EXPECT_EQ((s.y + 7 - s.x) % 7, 2u);
    EXPECT_EQ(k.probability(s, {(s.x + 1) % 7, (s.y + 1) % 7}), make_rational(1, 2));
  }
}

TEST(MinimumEntropy, RegularGraphsAreDeterministicGivenX) {
  for (const Graph& g : {build::petersen(), build::octahedron(), build::paley(13), build::hypercube(3)}) {
    const auto t = forbidden_closure(g);
    const auto k = minimum_entropy_kernel(g, t);
    EXPECT_TRUE(deterministic_given_x(k));
    for (std::size_t i = 0; i < k.size(); ++i) {
      EXPECT_FALSE(uniformity_violation(k, i, Token::X));
      EXPECT_FALSE(uniformity_violation(k, i, Token::Y));
    }
  }
}

TEST(MinimumEntropy, OctahedronTracksNonNeighbor) {
  const Graph g = build::octahedron();
  const auto k = minimum_entropy_kernel(g, forbidden_closure(g), StatePair{0, 3});
  for (std::size_t i = 0; i < k.size(); ++i)
    for (const auto& tr : k.row(i)) EXPECT_EQ(tr.target.y, (tr.target.x + 3) % 6);
}

TEST(MinimumEntropy, Preconditions) {
  EXPECT_THROW(minimum_entropy_kernel(build::path(4), forbidden_closure(build::path(4))),
               std::invalid_argument);
  EXPECT_THROW(minimum_entropy_kernel(build::fig5(), forbidden_closure(build::fig5())),
               std::invalid_argument);
}
