#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "k4count/counting.hpp"
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

std::vector<std::size_t> random_sizes(std::mt19937_64& gen, std::size_t ell, std::size_t max_size) {
  std::uniform_int_distribution<std::size_t> d(1, max_size);
  std::vector<std::size_t> s(ell);
  for (auto& x : s) x = d(gen);
  return s;
}

}  // namespace

TEST(CountCanonical, CompleteBlowups) {
  EXPECT_EQ(count_canonical(complete_blowup(PatternGraph::complete(3), {2, 2, 2}), PatternGraph::complete(3)).total, 8);
  EXPECT_EQ(count_canonical(complete_blowup(PatternGraph::complete(4), {2, 2, 2, 2}), PatternGraph::complete(4)).total, 16);
  EXPECT_EQ(count_canonical(complete_blowup(PatternGraph::complete(4), {3, 1, 2, 5}), PatternGraph::complete(4)).total, 30);
}

TEST(CountCanonical, SubpatternOfHostPattern) {
  auto g = complete_blowup(PatternGraph::complete(4), {2, 3, 2, 2});
  EXPECT_EQ(count_canonical(g, PatternGraph::k4_minus_e()).total, 24);
  try {
    count_canonical(complete_blowup(PatternGraph::k4_minus_e(), {2, 2, 2, 2}), PatternGraph::complete(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::pattern_mismatch);
  }
}

TEST(CountCanonical, MatchesBruteForce) {
  std::mt19937_64 gen(61);
  const PatternGraph patterns[] = {PatternGraph::complete(3), PatternGraph::complete(4), PatternGraph::k4_minus_e(),
                                   PatternGraph::cycle(4)};
  for (int t = 0; t < 120; ++t) {
    const auto& h = patterns[t % 4];
    auto g = oracle::random_blowup(h, random_sizes(gen, h.ell(), 6), 0.3 + 0.1 * (t % 5), gen);
    EXPECT_EQ(count_canonical(g, h).total, oracle::count_copies(g, h));
  }
}

TEST(CountCanonical, BreakdownsMatchBruteForceAndSum) {
  std::mt19937_64 gen(67);
  for (int t = 0; t < 80; ++t) {
    auto h = t % 2 ? PatternGraph::complete(4) : PatternGraph::complete(3);
    auto g = oracle::random_blowup(h, random_sizes(gen, h.ell(), 6), 0.6, gen);
    CountOptions opt;
    opt.per_vertex = opt.per_edge = true;
    auto c = count_canonical(g, h, opt);
    std::vector<std::vector<std::uint64_t>> pv(h.ell());
    std::vector<std::vector<std::uint64_t>> pe(h.edge_count());
    for (std::size_t x = 0; x < h.ell(); ++x) pv[x].assign(g.size(x), 0);
    for (std::size_t r = 0; r < h.edge_count(); ++r) pe[r].assign(g.size(h.edges()[r].first) * g.size(h.edges()[r].second), 0);
    oracle::for_each_copy(g, h, [&](const std::vector<std::size_t>& tup) {
      for (std::size_t x = 0; x < h.ell(); ++x) ++pv[x][tup[x]];
      for (std::size_t r = 0; r < h.edge_count(); ++r) {
        auto [x, y] = h.edges()[r];
        ++pe[r][tup[x] * g.size(y) + tup[y]];
      }
    });
    EXPECT_EQ(c.per_vertex, pv);
    EXPECT_EQ(c.per_edge, pe);
    for (std::size_t x = 0; x < h.ell(); ++x) {
      BigInt s = 0;
      for (auto v : c.per_vertex[x]) s += v;
      EXPECT_EQ(s, c.total);
    }
    for (std::size_t r = 0; r < h.edge_count(); ++r) {
      BigInt s = 0;
      for (auto v : c.per_edge[r]) s += v;
      EXPECT_EQ(s, c.total);
    }
  }
}

TEST(DegVertexAndEdge, CompleteK3) {
  auto h = PatternGraph::complete(3);
  auto g = complete_blowup(h, {2, 2, 2});
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t v = 0; v < 2; ++v) EXPECT_EQ(deg_vertex(g, h, x, v), 4);
  for (auto [x, y] : h.edges())
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b) EXPECT_EQ(deg_edge(g, h, x, y, a, b), 2);
}

TEST(DegVertexAndEdge, MatchBruteForceAndSumToTotal) {
  std::mt19937_64 gen(71);
  for (int t = 0; t < 60; ++t) {
    auto h = t % 2 ? PatternGraph::complete(4) : PatternGraph::complete(3);
    auto g = oracle::random_blowup(h, random_sizes(gen, h.ell(), 5), 0.6, gen);
    auto total = count_canonical(g, h).total;
    for (std::size_t x = 0; x < h.ell(); ++x) {
      BigInt s = 0;
      for (std::size_t v = 0; v < g.size(x); ++v) {
        std::uint64_t brute = 0;
        oracle::for_each_copy(g, h, [&](const std::vector<std::size_t>& tup) { brute += tup[x] == v; });
        auto d = deg_vertex(g, h, x, v);
        EXPECT_EQ(d, brute);
        s += d;
      }
      EXPECT_EQ(s, total);
    }
    for (auto [x, y] : h.edges()) {
      BigInt s = 0;
      for (auto [a, b] : g.edges(x, y)) {
        std::uint64_t brute = 0;
        oracle::for_each_copy(g, h, [&](const std::vector<std::size_t>& tup) { brute += tup[x] == a && tup[y] == b; });
        auto d = deg_edge(g, h, x, y, a, b);
        EXPECT_EQ(d, brute);
        EXPECT_EQ(deg_edge_potential(g, h, x, y, a, b), d);
        s += d;
      }
      EXPECT_EQ(s, total);
    }
  }
}

TEST(DegVertexAndEdge, AbsentEdgeAndPotential) {
  auto h = PatternGraph::complete(3);
  auto full = complete_blowup(h, {2, 2, 2});
  auto lists = std::vector<EdgeList>{{0, 1, full.edges(0, 1)}, {0, 2, full.edges(0, 2)}, {1, 2, {{0, 0}}}};
  auto g = build_classed_graph(h, {2, 2, 2}, lists);
  try {
    deg_edge(g, h, 1, 2, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::edge_absent);
  }
  EXPECT_EQ(deg_edge_potential(g, h, 1, 2, 1, 1), 2);
  EXPECT_THROW(deg_vertex(g, h, 0, 2), Error);
}

TEST(ExpectedCount, Values) {
  auto k3 = PatternGraph::complete(3);
  EXPECT_EQ(expected_count_uniform(k3, 10, 50), BigRational(125));
  EXPECT_EQ(expected_count(k3, {2, 3, 4}, DensityMatrix(3)), BigRational(24));
  DensityMatrix d(4, Rational(1, 2));
  EXPECT_EQ(expected_count(PatternGraph::complete(4), {4, 4, 4, 4}, d), BigRational(4));
  // n^4 d^6 with d = m / n^2.
  EXPECT_EQ(expected_count_uniform(PatternGraph::complete(4), 6, 12), BigRational(BigInt(6 * 6 * 6 * 6), BigInt(729)));
}

TEST(IsBadInstance, CompleteIsNeverBad) {
  auto h = PatternGraph::complete(3);
  auto g = complete_blowup(h, {2, 2, 2});
  EXPECT_FALSE(is_bad_instance(g, h, Rational(1, 2)));
  EXPECT_FALSE(is_bad_instance(g, h, Rational(1, 1000)));
  EXPECT_FALSE(is_bad_instance(g, h, Rational(0)));
}

TEST(IsBadInstance, TriangleFreeIsBad) {
  auto h = PatternGraph::complete(3);
  auto g = build_classed_graph(h, {2, 2, 2}, {{0, 1, {{0, 0}, {1, 1}}}, {0, 2, {{0, 0}, {1, 1}}}, {1, 2, {{0, 1}, {1, 0}}}});
  ASSERT_EQ(count_canonical(g, h).total, 0);
  ASSERT_EQ(expected_count_empirical(g, h), BigRational(1));
  EXPECT_TRUE(is_bad_instance(g, h, Rational(1, 2)));
}

TEST(BadFamilyB3, CompleteAndIsolated) {
  auto h = PatternGraph::complete(3);
  EXPECT_FALSE(bad_family_B3(complete_blowup(h, {3, 3, 3}), Rational(1, 2), DensityMatrix(3)));
  auto full = complete_blowup(h, {3, 3, 3});
  std::vector<VertexPair> e01, e02;
  for (auto p : full.edges(0, 1))
    if (p.first != 0) e01.push_back(p);
  for (auto p : full.edges(0, 2))
    if (p.first != 0) e02.push_back(p);
  auto g = build_classed_graph(h, {3, 3, 3}, {{0, 1, e01}, {0, 2, e02}, {1, 2, full.edges(1, 2)}});
  EXPECT_TRUE(bad_family_B3(g, Rational(1, 3), DensityMatrix(3)));
  EXPECT_FALSE(bad_family_B3(g, Rational(1, 2), DensityMatrix(3)));
}

TEST(BadFamilyB3, MatchesPerVertexBruteForce) {
  std::mt19937_64 gen(73);
  auto h = PatternGraph::complete(3);
  for (int t = 0; t < 60; ++t) {
    auto g = oracle::random_blowup(h, {6, 6, 6}, 0.5, gen);
    const Rational delta(1 + t % 3, 4);
    DensityMatrix d(3, Rational(1, 2));
    std::vector<std::int64_t> per(6, 0);
    oracle::for_each_copy(g, h, [&](const std::vector<std::size_t>& tup) { ++per[tup[0]]; });
    // threshold (1-delta) * 36 / 8
    const Rational threshold = (Rational(1) - delta) * Rational(36, 8);
    std::int64_t low = 0;
    for (auto c : per) low += Rational(c) <= threshold;
    EXPECT_EQ(bad_family_B3(g, delta, d), Rational(low) >= delta * Rational(6));
  }
}

TEST(TwoDensity, KnownValues) {
  EXPECT_EQ(two_density(PatternGraph::complete(3)), Rational(2));
  EXPECT_EQ(two_density(PatternGraph::complete(4)), Rational(5, 2));
  EXPECT_EQ(two_density(PatternGraph::complete(5)), Rational(3));
  EXPECT_EQ(two_density(PatternGraph::cycle(4)), Rational(3, 2));
  EXPECT_EQ(two_density(PatternGraph::k4_minus_e()), Rational(2));
  EXPECT_THROW(two_density(PatternGraph::complete(2)), Error);
}

TEST(TwoDensity, Balance) {
  EXPECT_EQ(balance_class(PatternGraph::complete(3)), BalanceClass::strictly_balanced);
  EXPECT_EQ(balance_class(PatternGraph::complete(4)), BalanceClass::strictly_balanced);
  EXPECT_EQ(balance_class(PatternGraph::cycle(4)), BalanceClass::strictly_balanced);
  // K4 minus an edge attains 2 on its triangles too.
  EXPECT_EQ(balance_class(PatternGraph::k4_minus_e()), BalanceClass::balanced);
  // Triangle with a pendant edge: (4-1)/2 < 2.
  EXPECT_EQ(balance_class(PatternGraph(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}})), BalanceClass::neither);
}

TEST(TwoDensity, MonotoneUnderEdgeDeletion) {
  std::mt19937_64 gen(79);
  for (int t = 0; t < 200; ++t) {
    std::size_t ell = 3 + gen() % 4;
    std::vector<VertexPair> e;
    for (std::size_t x = 0; x < ell; ++x)
      for (std::size_t y = x + 1; y < ell; ++y)
        if (gen() % 3) e.emplace_back(x, y);
    if (e.empty()) continue;
    PatternGraph h(ell, e);
    auto [x, y] = e[gen() % e.size()];
    EXPECT_LE(two_density(h.without_edge(x, y)), two_density(h));
    if (ell > 3) {
      std::vector<VertexPair> sub;
      for (auto [a, b] : e)
        if (a < ell - 1 && b < ell - 1) sub.emplace_back(a, b);
      EXPECT_LE(two_density(PatternGraph(ell - 1, sub)), two_density(h));
    }
  }
}

TEST(EdgeThreshold, Values) {
  EXPECT_EQ(edge_threshold(PatternGraph::complete(4), 1024, Rational(1)), 65536);
  EXPECT_EQ(edge_threshold(PatternGraph::complete(3), 100, Rational(1)), 1000);
  EXPECT_EQ(edge_threshold(PatternGraph::complete(3), 100, Rational(2)), 2000);
  EXPECT_EQ(edge_threshold(PatternGraph::complete(4), 1024, Rational(1, 3)), 21846);
  // 24^{3/2} = 117.57...
  EXPECT_EQ(edge_threshold(PatternGraph::complete(3), 24, Rational(1)), 118);
}

TEST(ValidSequences, CountsAndBlocks) {
  EXPECT_EQ(valid_sequences(2).size(), 1u);
  EXPECT_EQ(valid_sequences(3).size(), 2u);
  EXPECT_EQ(valid_sequences(4).size(), 12u);
  EXPECT_EQ(valid_sequences(5).size(), 288u);
  EXPECT_THROW(valid_sequences(1), Error);
}

TEST(ValidSequences, MatchPermutationFilter) {
  for (std::size_t ell = 2; ell <= 4; ++ell) {
    auto edges = PatternGraph::complete(ell).edges();
    std::sort(edges.begin(), edges.end());
    std::set<std::vector<VertexPair>> expected;
    do {
      bool ok = true;
      std::size_t pos = 0;
      for (std::size_t k = 1; k < ell && ok; ++k)
        for (std::size_t i = 0; i < k; ++i, ++pos)
          if (edges[pos].second != k) ok = false;
      if (ok) expected.insert(edges);
    } while (std::next_permutation(edges.begin(), edges.end()));
    std::set<std::vector<VertexPair>> got;
    for (const auto& s : valid_sequences(ell)) {
      EXPECT_EQ(s.edges.size(), ell * (ell - 1) / 2);
      got.insert(s.edges);
    }
    EXPECT_EQ(got, expected) << "ell " << ell;
  }
}
