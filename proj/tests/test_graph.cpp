#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>

#include "uac/automorphism.hpp"
#include "uac/builders.hpp"
#include "uac/graph.hpp"

using namespace uac;

namespace {

std::vector<VertexId> nb(const Graph& g, VertexId v) {
  return {g.neighbors(v).begin(), g.neighbors(v).end()};
}

}  // namespace

TEST(ParseGraph, Triangle) {
  const Graph g = parse_graph("p 3 3\ne 0 1\ne 1 2\ne 0 2\n");
  EXPECT_EQ(g, build::complete(3));
  EXPECT_FALSE(g.loops_enabled());
}

TEST(ParseGraph, LoopRejectedWithoutFlag) {
  try {
    parse_graph("p 2 1\ne 0 0\n");
    FAIL() << "expected a parse error";
  } catch (const GraphParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("loop not allowed"), std::string::npos);
  }
}

TEST(ParseGraph, LoopedTriangle) {
  const Graph g = parse_graph("p* 3 6\ne 0 0\ne 1 1\ne 2 2\ne 0 1\ne 1 2\ne 0 2\n");
  EXPECT_EQ(g, build::complete_loops(3));
  EXPECT_TRUE(g.has_loops());
  for (VertexId v = 0; v < 3; ++v) EXPECT_EQ(g.degree(v), 3u);
}

TEST(ParseGraph, Errors) {
  EXPECT_THROW(parse_graph("p 3 1\ne 0 3\n"), GraphParseError);        // out of range
  EXPECT_THROW(parse_graph("p 3 2\ne 0 1\ne 1 0\n"), GraphParseError); // duplicate
  EXPECT_THROW(parse_graph("p 3 2\ne 0 1\n"), GraphParseError);        // too few edges
  EXPECT_THROW(parse_graph("p 3 1\ne 0 1\ne 1 2\n"), GraphParseError); // too many edges
  EXPECT_THROW(parse_graph("e 0 1\n"), GraphParseError);               // no header
  EXPECT_THROW(parse_graph("p 3 1\nf 0 1\n"), GraphParseError);        // bad record
  EXPECT_THROW(parse_graph("p 3 1\ne 0 x\n"), GraphParseError);
  try {
    parse_graph("# comment\np 4 1\n\ne 0 9\n");
  } catch (const GraphParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(ParseGraph, RoundTrip) {
  for (const Graph& g : {build::petersen(), build::fig5(), build::complete_loops(4), build::path(2)})
    EXPECT_EQ(parse_graph(format_graph(g)), g);
}

TEST(Builders, Cycle4) {
  const Graph g = build::cycle(4);
  EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 1}, {0, 3}, {1, 2}, {2, 3}}));
  EXPECT_THROW(build::cycle(2), std::invalid_argument);
}

TEST(Builders, Fig5) {
  const Graph g = build::fig5();
  EXPECT_EQ(g.order(), 12u);
  EXPECT_EQ(g.edge_count(), 24u);
  EXPECT_EQ(regular_degree(g), 4u);
  // Paper label 1 is internal 0; its neighbors are labels 3, 4, 5, 6.
  EXPECT_EQ(nb(g, 0), (std::vector<VertexId>{2, 3, 4, 5}));
}

TEST(Builders, Hypercube3) {
  const Graph g = build::hypercube(3);
  EXPECT_EQ(g.order(), 8u);
  EXPECT_EQ(g.edge_count(), 12u);
  EXPECT_TRUE(bipartition(g).has_value());
}

TEST(Builders, Families) {
  EXPECT_EQ(regular_degree(build::petersen()), 3u);
  EXPECT_EQ(regular_degree(build::octahedron()), 4u);
  EXPECT_EQ(build::paley(13).edge_count(), 39u);
  EXPECT_THROW(build::paley(7), std::invalid_argument);
  EXPECT_THROW(build::paley(9), std::invalid_argument);
  EXPECT_EQ(build::paley(5), build::cycle(5));
  EXPECT_EQ(build::spider(3, 3).order(), 10u);
  EXPECT_EQ(build::double_clique(4).edge_count(), 16u);
  EXPECT_EQ(build::cayley_adjacent_transpositions(4).order(), 24u);
  EXPECT_EQ(regular_degree(build::cayley_adjacent_transpositions(4)), 3u);
}

TEST(Builders, FromSpec) {
  const std::vector<std::string> spec = {"complete-bipartite", "3", "3"};
  EXPECT_EQ(build::from_spec(spec), build::complete_bipartite(3, 3));
  const std::vector<std::string> bad = {"cycle", "-3"};
  EXPECT_THROW(build::from_spec(bad), std::invalid_argument);
  const std::vector<std::string> unknown = {"moebius", "3"};
  EXPECT_THROW(build::from_spec(unknown), std::invalid_argument);
  const std::map<std::string, std::vector<std::string>> sample = {
      {"cycle", {"5"}},       {"path", {"4"}},          {"complete", {"4"}},
      {"complete-loops", {"3"}}, {"hypercube", {"3"}},  {"petersen", {}},
      {"fig5", {}},           {"octahedron", {}},       {"paley", {"13"}},
      {"star", {"3"}},        {"complete-bipartite", {"2", "3"}},
      {"spider", {"3", "3"}}, {"double-clique", {"3"}}, {"tailed-diamond", {}},
      {"cayley-sn", {"3"}},   {"complement-cycle", {"6"}}};
  for (const auto& name : build::family_names()) {
    SCOPED_TRACE(name);
    ASSERT_TRUE(sample.contains(name));
    std::vector<std::string> spec{name};
    spec.insert(spec.end(), sample.at(name).begin(), sample.at(name).end());
    EXPECT_TRUE(is_connected(build::from_spec(spec)));
  }
  const std::vector<std::string> c6 = {"complement-cycle", "6"};
  EXPECT_EQ(build::from_spec(c6), complement(build::cycle(6)));
}

TEST(Neighbors, DegreesAndLists) {
  EXPECT_EQ(build::complete_loops(3).degree(0), 3u);
  EXPECT_EQ(nb(build::complete_loops(3), 1), (std::vector<VertexId>{0, 1, 2}));
  EXPECT_EQ(build::cycle(5).degree(2), 2u);
  EXPECT_EQ(nb(build::path(3), 1), (std::vector<VertexId>{0, 2}));
}

TEST(Neighbors, HandshakeOnLoopFreeGraphs) {
  for (const Graph& g : {build::petersen(), build::fig5(), build::paley(13), build::spider(3, 4)}) {
    std::size_t total = 0;
    for (VertexId v = 0; v < g.order(); ++v) total += g.degree(v);
    EXPECT_EQ(total, 2 * g.edge_count());
  }
}

TEST(Bipartition, Examples) {
  const auto c6 = bipartition(build::cycle(6));
  ASSERT_TRUE(c6);
  for (VertexId v = 0; v < 6; ++v) EXPECT_EQ(c6->side[v], v % 2 ? Side::Right : Side::Left);
  EXPECT_FALSE(bipartition(build::cycle(5)));
  EXPECT_FALSE(bipartition(build::complete_loops(3)));
  const auto q2 = bipartition(build::hypercube(2));
  ASSERT_TRUE(q2);
  for (VertexId v = 0; v < 4; ++v)
    EXPECT_EQ(q2->side[v], std::popcount(v) % 2 ? Side::Right : Side::Left);
  EXPECT_THROW(bipartition(Graph(3, {{0, 1}})), NotConnectedError);
}

TEST(Bipartition, TwoColoursEveryEdge) {
  for (const Graph& g : {build::hypercube(4), build::complete_bipartite(2, 5), build::spider(4, 3)}) {
    const auto b = bipartition(g);
    ASSERT_TRUE(b);
    for (const Edge& e : g.edges()) EXPECT_NE(b->side[e.u], b->side[e.v]);
  }
}

TEST(CommonNeighbors, Examples) {
  EXPECT_EQ(common_neighbors(build::cycle(6), 0, 2), (std::vector<VertexId>{1}));
  const Graph p = build::petersen();
  for (const Edge& e : p.edges()) EXPECT_TRUE(common_neighbors(p, e.u, e.v).empty());
  EXPECT_EQ(common_neighbors(build::complete(4), 0, 1), (std::vector<VertexId>{2, 3}));
}

TEST(Complement, Examples) {
  EXPECT_EQ(complement(build::complete(4)).edge_count(), 0u);
  EXPECT_EQ(complement(build::octahedron()).edges(), (std::vector<Edge>{{0, 3}, {1, 4}, {2, 5}}));
  for (const Graph& g : {build::petersen(), build::fig5(), build::path(7)})
    EXPECT_EQ(complement(complement(g)), g);
  EXPECT_THROW(complement(build::complete_loops(3)), std::invalid_argument);
}

TEST(Srg, Parameters) {
  EXPECT_EQ(srg_parameters(build::petersen()), (SrgParams{10, 3, 0, 1}));
  EXPECT_EQ(srg_parameters(build::paley(5)), (SrgParams{5, 2, 0, 1}));
  EXPECT_EQ(srg_parameters(build::paley(13)), (SrgParams{13, 6, 2, 3}));
  EXPECT_EQ(srg_parameters(build::octahedron()), (SrgParams{6, 4, 2, 4}));
  EXPECT_FALSE(srg_parameters(build::path(4)));
  EXPECT_FALSE(srg_parameters(build::complete(5)));
  EXPECT_FALSE(srg_parameters(build::fig5()));
}

TEST(Automorphism, Validation) {
  const Graph q3 = build::hypercube(3);
  std::vector<VertexId> flip(8);
  for (VertexId v = 0; v < 8; ++v) flip[v] = v ^ 7u;
  EXPECT_TRUE(validate_free_automorphism(q3, VertexPermutation(flip)));

  auto rotation = [](std::size_t n, std::size_t by) {
    std::vector<VertexId> img(n);
    for (VertexId v = 0; v < n; ++v) img[v] = static_cast<VertexId>((v + by) % n);
    return VertexPermutation(img);
  };
  EXPECT_FALSE(validate_free_automorphism(build::cycle(6), rotation(6, 1)));
  EXPECT_TRUE(validate_free_automorphism(build::cycle(6), rotation(6, 2)));
  // A rotation of the path is not even an automorphism.
  EXPECT_FALSE(validate_free_automorphism(build::path(4), rotation(4, 2)));
  EXPECT_THROW(VertexPermutation({0, 0, 1}), std::invalid_argument);
}

TEST(Automorphism, ValidMapsPreserveEdgeSet) {
  const Graph g = build::cayley_adjacent_transpositions(4);
  const VertexPermutation phi(build::cayley_left_shift(4));
  ASSERT_TRUE(validate_free_automorphism(g, phi));
  std::vector<Edge> mapped;
  for (const Edge& e : g.edges()) mapped.emplace_back(phi(e.u), phi(e.v));
  std::sort(mapped.begin(), mapped.end());
  EXPECT_EQ(mapped, g.edges());
}

TEST(Automorphism, Search) {
  const auto q2 = find_free_automorphism(build::hypercube(2), 1000);
  ASSERT_EQ(q2.status, AutomorphismSearch::Status::Found);
  EXPECT_TRUE(validate_free_automorphism(build::hypercube(2), *q2.phi));
  EXPECT_EQ(find_free_automorphism(build::path(4), 1000).status,
            AutomorphismSearch::Status::NoneFound);
  EXPECT_EQ(find_free_automorphism(build::complete(5), 1000).status,
            AutomorphismSearch::Status::NoneFound);
  EXPECT_EQ(find_free_automorphism(build::petersen(), 1).status,
            AutomorphismSearch::Status::CapExceeded);
  const auto oct = find_free_automorphism(build::octahedron(), 10000);
  ASSERT_TRUE(oct.phi);
  EXPECT_TRUE(validate_free_automorphism(build::octahedron(), *oct.phi));
}

TEST(Automorphism, SearchAgreesWithExhaustiveCheck) {
  // For small graphs, compare against trying all permutations.
  for (const Graph& g : {build::cycle(5), build::cycle(6), build::path(5), build::hypercube(2),
                         build::complete_bipartite(2, 3), build::tailed_diamond()}) {
    std::vector<VertexId> p(g.order());
    std::iota(p.begin(), p.end(), 0);
    bool exists = false;
    do exists = exists || validate_free_automorphism(g, VertexPermutation(p));
    while (std::next_permutation(p.begin(), p.end()));
    const auto found = find_free_automorphism(g, 1'000'000);
    EXPECT_EQ(found.status == AutomorphismSearch::Status::Found, exists);
  }
}
