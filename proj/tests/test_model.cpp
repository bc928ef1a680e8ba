#include <gtest/gtest.h>

#include <random>

#include "k4count/graph_io.hpp"
#include "k4count/counting.hpp"
#include "k4count/model.hpp"
#include "oracles.hpp"

using namespace k4c;

namespace {

ClassedGraph complete_blowup(const PatternGraph& h, const std::vector<std::size_t>& sizes) {
  std::vector<EdgeList> lists;
  for (auto [x, y] : h.edges()) {
    EdgeList l{x, y, {}};
    for (std::size_t a = 0; a < sizes[x]; ++a)
      for (std::size_t b = 0; b < sizes[y]; ++b) l.edges.emplace_back(a, b);
    lists.push_back(l);
  }
  return build_classed_graph(h, sizes, lists);
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an exception";
  return Errc::io_error;
}

}  // namespace

TEST(PatternGraph, NormalizesAndIndexesEdges) {
  PatternGraph h(3, {{2, 0}, {0, 1}});
  ASSERT_EQ(h.edges().size(), 2u);
  EXPECT_EQ(h.edges()[0], (VertexPair{0, 1}));
  EXPECT_EQ(h.edges()[1], (VertexPair{0, 2}));
  EXPECT_EQ(h.edge_index(2, 0), 1u);
  EXPECT_FALSE(h.has_edge(1, 2));
  EXPECT_EQ(h.degree(0), 2u);
}

TEST(PatternGraph, RejectsLoopsDuplicatesAndRange) {
  EXPECT_EQ(code_of([] { PatternGraph(3, {{1, 1}}); }), Errc::invalid_parameter);
  EXPECT_EQ(code_of([] { PatternGraph(3, {{0, 1}, {1, 0}}); }), Errc::duplicate_edge);
  EXPECT_EQ(code_of([] { PatternGraph(3, {{0, 3}}); }), Errc::index_out_of_range);
}

TEST(PatternGraph, NamedPatterns) {
  EXPECT_EQ(PatternGraph::from_name("K4")->edge_count(), 6u);
  auto k4e = *PatternGraph::from_name("K4e");
  EXPECT_EQ(k4e.edge_count(), 5u);
  EXPECT_FALSE(k4e.has_edge(0, 1));
  EXPECT_EQ(PatternGraph::from_name("C4")->edge_count(), 4u);
  EXPECT_FALSE(PatternGraph::from_name("Q7").has_value());
}

TEST(BuildClassedGraph, PerfectMatchingOnK2) {
  auto g = build_classed_graph(PatternGraph::complete(2), {2, 2}, {{0, 1, {{0, 0}, {1, 1}}}});
  EXPECT_EQ(g.edge_count(0, 1), 2u);
  EXPECT_TRUE(g.has_edge(0, 0, 1, 0));
  EXPECT_TRUE(g.has_edge(1, 1, 0, 1));
  EXPECT_FALSE(g.has_edge(0, 0, 1, 1));
}

TEST(BuildClassedGraph, SingletonTriangle) {
  auto g = build_classed_graph(PatternGraph::complete(3), {1, 1, 1},
                               {{0, 1, {{0, 0}}}, {0, 2, {{0, 0}}}, {1, 2, {{0, 0}}}});
  EXPECT_EQ(count_canonical(g, PatternGraph::complete(3)).total, 1);
}

TEST(BuildClassedGraph, Errors) {
  auto k2 = PatternGraph::complete(2);
  EXPECT_EQ(code_of([&] { build_classed_graph(k2, {3, 3}, {{0, 1, {{5, 0}}}}); }), Errc::index_out_of_range);
  EXPECT_EQ(code_of([&] { build_classed_graph(k2, {3, 3}, {{0, 1, {{1, 0}, {1, 0}}}}); }), Errc::duplicate_edge);
  PatternGraph path(3, {{0, 1}, {1, 2}});
  EXPECT_EQ(code_of([&] { build_classed_graph(path, {2, 2, 2}, {{0, 2, {{0, 0}}}}); }), Errc::edge_on_non_pattern_pair);
}

TEST(BuildClassedGraph, ReversedEdgeListOrientation) {
  auto g = build_classed_graph(PatternGraph::complete(2), {2, 3}, {{1, 0, {{2, 1}}}});
  EXPECT_TRUE(g.has_edge(0, 1, 1, 2));
  EXPECT_EQ(g.edges(1, 0), (std::vector<VertexPair>{{2, 1}}));
}

TEST(ClassedGraph, PopcountSumsMatchEdgeCountsBothDirections) {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 30; ++t) {
    auto g = oracle::random_blowup(PatternGraph::complete(4), {3, 5, 2, 7}, 0.4, gen);
    for (auto [x, y] : g.pattern().edges()) {
      std::size_t a = 0, b = 0;
      for (std::size_t v = 0; v < g.size(x); ++v) a += g.neighbors(x, v, y).count();
      for (std::size_t w = 0; w < g.size(y); ++w) b += g.neighbors(y, w, x).count();
      EXPECT_EQ(a, g.edge_count(x, y));
      EXPECT_EQ(b, g.edge_count(x, y));
    }
  }
}

TEST(GraphFile, RoundTripRandomGraphs) {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 25; ++t) {
    auto g = oracle::random_blowup(PatternGraph::k4_minus_e(), {1 + gen() % 5, 1 + gen() % 5, 1 + gen() % 5, 1 + gen() % 5},
                                   0.5, gen);
    auto text = serialize_graph_file(g);
    EXPECT_EQ(parse_graph_file(text), g);
    EXPECT_EQ(serialize_graph_file(parse_graph_file(text)), text);
  }
}

TEST(GraphFile, SectionsInAnyOrderWithComments) {
  const char* text =
      "# triangle\n"
      "classes 3\n"
      "sizes 1 2 1\n"
      "pattern 1 2\npattern 1 3\npattern 2 3\n"
      "edges 2 3   # X2-X3\n1 0\nend\n"
      "edges 1 3\nend\n"
      "edges 1 2\n0 1\nend\n";
  auto g = parse_graph_file(text);
  EXPECT_EQ(g.edge_count(0, 1), 1u);
  EXPECT_EQ(g.edge_count(0, 2), 0u);
  EXPECT_TRUE(g.has_edge(1, 1, 2, 0));
}

TEST(GraphFile, EmptyEdgeSection) {
  auto g = parse_graph_file("classes 2\nsizes 3 3\npattern 1 2\nedges 1 2\nend\n");
  EXPECT_EQ(g.edge_count(0, 1), 0u);
}

TEST(GraphFile, Errors) {
  EXPECT_EQ(code_of([] { parse_graph_file("classes 2\nsizes 2 2\npattern 1 2\nedges 1 2\n3 0\nend\n"); }),
            Errc::index_out_of_range);
  EXPECT_EQ(code_of([] { parse_graph_file("classes 2\nsizes 2 2\npattern 1 2\n"); }), Errc::syntax_error);
  EXPECT_EQ(code_of([] { parse_graph_file("classes 2\nsizes 2 2\npattern 1 2\nedges 1 2\n0 0\n"); }), Errc::syntax_error);
  EXPECT_EQ(code_of([] { parse_graph_file("classes 2\nsizes 2 x\n"); }), Errc::syntax_error);
  EXPECT_EQ(code_of([] { parse_graph_file("classes 3\nsizes 2 2 2\npattern 1 2\nedges 1 2\nend\nedges 1 3\nend\n"); }),
            Errc::edge_on_non_pattern_pair);
  try {
    parse_graph_file("classes 2\nsizes 2 2\npattern 1 2\nedges 1 2\n0 0 0\nend\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
  }
}

TEST(NeighborhoodRestriction, CompleteK4eKeepsFullClasses) {
  auto g = complete_blowup(PatternGraph::k4_minus_e(), {3, 4, 5, 2});
  auto r = neighborhood_restriction(g, 0, 1, {1}, {2, 3});
  EXPECT_EQ(r.graph.sizes(), (std::vector<std::size_t>{4, 5, 2}));
  EXPECT_EQ(r.graph.pattern(), PatternGraph::complete(3));
  EXPECT_EQ(r.classes, (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(r.graph.edge_count(0, 1), 20u);
  EXPECT_EQ(r.graph.edge_count(1, 2), 10u);
}

TEST(NeighborhoodRestriction, EmptyNeighbourhoodGivesEmptyClass) {
  auto g = build_classed_graph(PatternGraph::k4_minus_e(), {2, 2, 2, 2}, {{0, 3, {{0, 0}}}, {1, 2, {{0, 0}}}});
  auto r = neighborhood_restriction(g, 0, 0, {1}, {2, 3});
  EXPECT_EQ(r.graph.sizes(), (std::vector<std::size_t>{2, 0, 1}));
  EXPECT_EQ(r.vertices[2], (std::vector<std::size_t>{0}));
}

TEST(NeighborhoodRestriction, AnchorNotAdjacent) {
  auto g = complete_blowup(PatternGraph::k4_minus_e(), {2, 2, 2, 2});
  EXPECT_EQ(code_of([&] { neighborhood_restriction(g, 0, 0, {2}, {1}); }), Errc::anchor_not_adjacent);
}

TEST(NeighborhoodRestriction, TrianglesEqualK4eCopiesThroughAnchor) {
  std::mt19937_64 gen(23);
  auto k4e = PatternGraph::k4_minus_e();
  for (int t = 0; t < 40; ++t) {
    auto g = oracle::random_blowup(k4e, {4, 4, 4, 4}, 0.5, gen);
    std::vector<std::uint64_t> through(4, 0);
    oracle::for_each_copy(g, k4e, [&](const std::vector<std::size_t>& c) { ++through[c[0]]; });
    for (std::size_t v = 0; v < 4; ++v) {
      auto r = neighborhood_restriction(g, 0, v, {1}, {2, 3});
      EXPECT_EQ(oracle::count_copies(r.graph, PatternGraph::complete(3)), through[v]);
    }
  }
}

TEST(NeighborhoodRestriction, PreservesAdjacency) {
  std::mt19937_64 gen(29);
  auto g = oracle::random_blowup(PatternGraph::k4_minus_e(), {5, 5, 5, 5}, 0.5, gen);
  auto r = neighborhood_restriction(g, 0, 2, {1}, {2, 3});
  for (auto [x, y] : r.graph.pattern().edges()) {
    auto ox = r.classes[x], oy = r.classes[y];
    for (std::size_t a = 0; a < r.graph.size(x); ++a)
      for (std::size_t b = 0; b < r.graph.size(y); ++b)
        EXPECT_EQ(r.graph.has_edge(x, a, y, b), g.has_edge(ox, r.vertices[x][a], oy, r.vertices[y][b]));
  }
}

TEST(DensityMatrix, SymmetricAndRangeChecked) {
  DensityMatrix d(3, Rational(1, 2));
  d.set(0, 2, Rational(1, 3));
  EXPECT_EQ(d.at(2, 0), Rational(1, 3));
  EXPECT_EQ(code_of([&] { d.set(0, 1, Rational(0)); }), Errc::invalid_parameter);
  EXPECT_EQ(code_of([&] { d.set(0, 1, Rational(3, 2)); }), Errc::invalid_parameter);
}

TEST(Rational, ParseRejectsDecimals) {
  EXPECT_EQ(Rational::parse("2/4"), Rational(1, 2));
  EXPECT_EQ(Rational::parse("3"), Rational(3));
  EXPECT_EQ(code_of([] { Rational::parse("0.5"); }), Errc::invalid_parameter);
  EXPECT_EQ(code_of([] { Rational::parse("1/0"); }), Errc::invalid_parameter);
  EXPECT_EQ(code_of([] { Rational::parse(""); }), Errc::invalid_parameter);
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
}
