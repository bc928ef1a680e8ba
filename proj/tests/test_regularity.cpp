#include <gtest/gtest.h>

#include <random>

#include "k4count/regularity.hpp"
#include "k4count/sampling.hpp"
#include "oracles.hpp"

using namespace k4c;

namespace {

ClassedGraph matching(std::size_t n) {
  std::vector<VertexPair> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, i);
  return pair_graph(n, n, e);
}

ClassedGraph complete_pair(std::size_t n1, std::size_t n2) {
  std::vector<VertexPair> e;
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) e.emplace_back(i, j);
  return pair_graph(n1, n2, e);
}

// Re-derives the violation from density() alone.
bool witness_violates(const ClassedGraph& g, const RegularityCriterion& c, const Witness& w) {
  const Rational sub = density(g, 0, 1, w.side1, w.side2);
  if (sub != w.density) return false;
  const Rational n1(static_cast<std::int64_t>(g.size(0))), n2(static_cast<std::int64_t>(g.size(1)));
  const Rational k1(static_cast<std::int64_t>(w.side1.count())), k2(static_cast<std::int64_t>(w.side2.count()));
  if (k1 < c.epsilon * n1 || k2 < c.epsilon * n2) return false;
  if (c.lower) return sub < (Rational(1) - c.epsilon) * c.target;
  const Rational whole = g.pair_density(0, 1);
  Rational diff = sub - whole;
  if (diff < Rational(0)) diff = Rational(0) - diff;
  return diff > c.epsilon * whole;
}

const Rational kEps[] = {Rational(1, 4), Rational(1, 3), Rational(1, 2)};

}  // namespace

TEST(Density, Basics) {
  auto g = complete_pair(3, 4);
  EXPECT_EQ(density(g, 0, 1, Bitset(3, true), Bitset(4, true)), Rational(1));
  auto e = pair_graph(2, 2, {});
  EXPECT_EQ(density(e, 0, 1, Bitset(2, true), Bitset(2, true)), Rational(0));
  auto s = pair_graph(2, 2, {{0, 0}});
  EXPECT_EQ(density(s, 0, 1, Bitset(2, true), Bitset(2, true)), Rational(1, 4));
  try {
    density(s, 0, 1, Bitset(2), Bitset(2, true));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::empty_subset);
  }
}

TEST(ExactChecker, CompletePairIsRegular) {
  auto g = complete_pair(5, 7);
  for (auto eps : kEps) {
    EXPECT_EQ(check_eps_regular_exact(g, 0, 1, eps).kind, VerdictKind::certified_regular);
    EXPECT_EQ(check_lower_regular_exact(g, 0, 1, eps, Rational(1)).kind, VerdictKind::certified_regular);
  }
}

TEST(ExactChecker, EmptyPairIsRegular) {
  auto g = pair_graph(4, 3, {});
  EXPECT_EQ(check_eps_regular_exact(g, 0, 1, Rational(1, 3)).kind, VerdictKind::certified_regular);
}

TEST(ExactChecker, MatchingViolatesAtHalf) {
  auto g = matching(4);
  auto m = oracle::matrix_from_mask(4, 4, 0b1000'0100'0010'0001);
  ASSERT_FALSE(oracle::naive_regular(m, Rational(1, 2), false));
  auto v = check_eps_regular_exact(g, 0, 1, Rational(1, 2));
  ASSERT_EQ(v.kind, VerdictKind::witness_violation);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(v.witness->reference, Rational(1, 4));
  EXPECT_TRUE(witness_violates(g, RegularityCriterion::eps_regular(Rational(1, 2)), *v.witness));
}

TEST(ExactChecker, MatchingLowerViolation) {
  auto g = matching(4);
  auto m = oracle::matrix_from_mask(4, 4, 0b1000'0100'0010'0001);
  ASSERT_FALSE(oracle::naive_regular(m, Rational(1, 4), true, Rational(1, 4)));
  auto v = check_lower_regular_exact(g, 0, 1, Rational(1, 4), Rational(1, 4));
  ASSERT_EQ(v.kind, VerdictKind::witness_violation);
  EXPECT_TRUE(witness_violates(g, RegularityCriterion::lower_regular(Rational(1, 4), Rational(1, 4)), *v.witness));
}

TEST(ExactChecker, Errors) {
  auto big = complete_pair(15, 2);
  try {
    check_eps_regular_exact(big, 0, 1, Rational(1, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::side_too_large_for_exact);
  }
  auto empty_side = pair_graph(0, 3, {});
  try {
    check_eps_regular_exact(empty_side, 0, 1, Rational(1, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_side);
  }
}

TEST(ExactChecker, OracleEquivalenceAll3x3) {
  for (std::uint32_t mask = 0; mask < 512; ++mask) {
    auto m = oracle::matrix_from_mask(3, 3, mask);
    auto g = oracle::to_pair_graph(m);
    for (auto eps : kEps) {
      EXPECT_EQ(!check_eps_regular_exact(g, 0, 1, eps).violated(), oracle::naive_regular(m, eps, false))
          << "mask " << mask << " eps " << eps.str();
      for (auto d : {Rational(1, 4), Rational(1, 2)})
        EXPECT_EQ(!check_lower_regular_exact(g, 0, 1, eps, d).violated(), oracle::naive_regular(m, eps, true, d))
            << "mask " << mask << " eps " << eps.str() << " d " << d.str();
    }
  }
}

TEST(ExactChecker, OracleEquivalenceRandom4x4And3x5) {
  std::mt19937_64 gen(2024);
  for (int t = 0; t < 600; ++t) {
    auto m = t % 2 ? oracle::random_matrix(4, 4, 0.5, gen) : oracle::random_matrix(3, 5, 0.6, gen);
    auto g = oracle::to_pair_graph(m);
    for (auto eps : kEps) {
      EXPECT_EQ(!check_eps_regular_exact(g, 0, 1, eps).violated(), oracle::naive_regular(m, eps, false));
      EXPECT_EQ(!check_lower_regular_exact(g, 0, 1, eps, Rational(1, 2)).violated(),
                oracle::naive_regular(m, eps, true, Rational(1, 2)));
    }
  }
}

TEST(ExactChecker, WitnessesAreSound) {
  std::mt19937_64 gen(7);
  for (int t = 0; t < 200; ++t) {
    auto g = oracle::to_pair_graph(oracle::random_matrix(6, 7, 0.5, gen));
    for (auto eps : kEps) {
      auto c = RegularityCriterion::eps_regular(eps);
      auto v = check_regular_exact(g.view(0, 1), c);
      EXPECT_EQ(v.witness.has_value(), v.violated());
      if (v.violated()) {
        EXPECT_TRUE(witness_violates(g, c, *v.witness));
      }
      auto cl = RegularityCriterion::lower_regular(eps, Rational(1, 2));
      auto vl = check_regular_exact(g.view(0, 1), cl);
      if (vl.violated()) {
        EXPECT_TRUE(witness_violates(g, cl, *vl.witness));
      }
    }
  }
}

TEST(ExactChecker, MonotoneInEpsilon) {
  std::mt19937_64 gen(13);
  const Rational grid[] = {Rational(1, 5), Rational(1, 4), Rational(1, 3), Rational(1, 2), Rational(2, 3)};
  for (int t = 0; t < 150; ++t) {
    auto g = oracle::to_pair_graph(oracle::random_matrix(5, 6, 0.7, gen));
    bool seen_regular = false;
    for (auto eps : grid) {
      bool reg = !check_eps_regular_exact(g, 0, 1, eps).violated();
      if (seen_regular) {
        EXPECT_TRUE(reg);
      }
      seen_regular = seen_regular || reg;
    }
  }
}

TEST(ExactChecker, RegularImpliesLowerRegular) {
  std::mt19937_64 gen(17);
  for (int t = 0; t < 300; ++t) {
    auto g = oracle::to_pair_graph(oracle::random_matrix(4, 5, 0.7, gen));
    if (g.edge_count(0, 1) == 0) continue;
    for (auto eps : kEps)
      if (!check_eps_regular_exact(g, 0, 1, eps).violated()) {
        EXPECT_FALSE(check_lower_regular_exact(g, 0, 1, eps, g.pair_density(0, 1)).violated());
      }
  }
}

TEST(WitnessSearch, FindsMatchingViolation) {
  auto g = matching(4);
  auto v = witness_search(g.view(0, 1), RegularityCriterion::eps_regular(Rational(1, 2)), 20, RngSpec{1, 0});
  ASSERT_TRUE(v.violated());
  EXPECT_TRUE(witness_violates(g, RegularityCriterion::eps_regular(Rational(1, 2)), *v.witness));
}

TEST(WitnessSearch, NeverCertifiesAndCompleteHasNoWitness) {
  auto g = complete_pair(6, 6);
  auto v = witness_search(g.view(0, 1), RegularityCriterion::eps_regular(Rational(1, 4)), 50, RngSpec{3, 0});
  EXPECT_EQ(v.kind, VerdictKind::no_witness_found);
  EXPECT_FALSE(v.witness.has_value());
}

TEST(WitnessSearch, SoundAndAgreesWhenItFires) {
  std::mt19937_64 gen(19);
  for (int t = 0; t < 200; ++t) {
    auto g = oracle::to_pair_graph(oracle::random_matrix(6, 6, 0.5, gen));
    for (auto eps : kEps) {
      auto c = RegularityCriterion::eps_regular(eps);
      auto w = witness_search(g.view(0, 1), c, 8, RngSpec{static_cast<std::uint64_t>(t), 0});
      EXPECT_NE(w.kind, VerdictKind::certified_regular);
      if (w.violated()) {
        EXPECT_TRUE(witness_violates(g, c, *w.witness));
        EXPECT_TRUE(check_regular_exact(g.view(0, 1), c).violated());
      }
    }
  }
}

TEST(WitnessSearch, DeterministicPerRngSpec) {
  std::mt19937_64 gen(23);
  auto g = oracle::to_pair_graph(oracle::random_matrix(20, 20, 0.3, gen));
  auto c = RegularityCriterion::lower_regular(Rational(1, 4), Rational(1, 3));
  auto a = witness_search(g.view(0, 1), c, 30, RngSpec{99, 2});
  auto b = witness_search(g.view(0, 1), c, 30, RngSpec{99, 2});
  EXPECT_EQ(a.kind, b.kind);
  EXPECT_EQ(a.subsets_examined, b.subsets_examined);
  if (a.witness) {
    EXPECT_EQ(a.witness->side1, b.witness->side1);
  }
}

TEST(WitnessSearch, BudgetOneIsLegal) {
  auto g = matching(12);
  auto v = witness_search(g.view(0, 1), RegularityCriterion::eps_regular(Rational(1, 4)), 1, RngSpec{0, 0});
  EXPECT_NE(v.kind, VerdictKind::certified_regular);
  if (v.violated()) {
    EXPECT_TRUE(witness_violates(g, RegularityCriterion::eps_regular(Rational(1, 4)), *v.witness));
  }
}

TEST(CheckRegular, AutomaticDispatch) {
  auto small = matching(4);
  EXPECT_EQ(check_regular(small.view(0, 1), RegularityCriterion::eps_regular(Rational(1, 2)), CheckMode::automatic, 5,
                          RngSpec{})
                .kind,
            VerdictKind::witness_violation);
  auto large = complete_pair(16, 3);
  EXPECT_EQ(check_regular(large.view(0, 1), RegularityCriterion::eps_regular(Rational(1, 2)), CheckMode::automatic, 5,
                          RngSpec{})
                .kind,
            VerdictKind::no_witness_found);
  EXPECT_EQ(parse_check_mode("auto"), CheckMode::automatic);
  EXPECT_THROW(parse_check_mode("fast"), Error);
}

TEST(DegreeDeviation, CompletePair) {
  auto g = complete_pair(4, 5);
  auto r = degree_deviation_report(g.view(0, 1), Rational(1, 3), Rational(1), Bitset(5, true));
  EXPECT_EQ(r.count_below, 0u);
  EXPECT_EQ(r.count_above, 0u);
}

TEST(DegreeDeviation, MatchingHandCount) {
  // Each vertex has degree 1 into the full side; thresholds are 3/4 and 5/4.
  auto g = matching(4);
  auto r = degree_deviation_report(g.view(0, 1), Rational(1, 4), Rational(1, 4), Bitset(4, true));
  EXPECT_EQ(r.count_below, 0u);
  EXPECT_EQ(r.count_above, 0u);
  // With d = 1/2 the lower threshold is 3/2, so every vertex falls below.
  auto r2 = degree_deviation_report(g.view(0, 1), Rational(1, 4), Rational(1, 2), Bitset(4, true));
  EXPECT_EQ(r2.count_below, 4u);
  EXPECT_EQ(r2.count_above, 0u);
}

TEST(DegreeDeviation, SubsetTooSmall) {
  auto g = matching(4);
  try {
    degree_deviation_report(g.view(0, 1), Rational(1, 2), Rational(1, 4), Bitset::from_indices(4, {0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::subset_too_small);
  }
}

TEST(DegreeDeviation, BoundedOnCertifiedPairs) {
  std::mt19937_64 gen(31);
  int certified = 0;
  for (int t = 0; t < 400 && certified < 60; ++t) {
    auto g = oracle::to_pair_graph(oracle::random_matrix(8, 8, 0.75, gen));
    for (auto eps : {Rational(1, 4), Rational(1, 2)}) {
      if (check_eps_regular_exact(g, 0, 1, eps).violated()) continue;
      ++certified;
      auto r = degree_deviation_report(g.view(0, 1), eps, g.pair_density(0, 1), Bitset(8, true));
      auto cap = static_cast<std::size_t>(eps.num() * 8 / eps.den());
      EXPECT_LE(r.count_below, cap);
      EXPECT_LE(r.count_above, cap);
    }
  }
  EXPECT_GT(certified, 10);
}

TEST(Inheritance, FormulaValues) {
  EXPECT_EQ(inherited_regularity_params(Rational(1, 10), Rational(1, 2)), Rational(2, 9));
  EXPECT_EQ(inherited_regularity_params(Rational(1, 10), Rational(1)), Rational(2, 9));
  EXPECT_EQ(inherited_regularity_params(Rational(1, 10), Rational(1, 5)), Rational(1, 2));
  try {
    inherited_regularity_params(Rational(1, 10), Rational(1, 20));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::parameter_order_violation);
  }
}

TEST(Inheritance, SubSidesOfCertifiedPairs) {
  std::mt19937_64 gen(37);
  const Rational eps(1, 4), alpha(1, 2);
  const Rational eps2 = inherited_regularity_params(eps, alpha);
  int checked = 0;
  for (int t = 0; t < 3000 && checked < 200; ++t) {
    auto m = oracle::random_matrix(6, 6, 0.9, gen);
    auto g = oracle::to_pair_graph(m);
    if (check_eps_regular_exact(g, 0, 1, eps).violated()) continue;
    const Rational d = g.pair_density(0, 1);
    for (int s = 0; s < 10; ++s) {
      std::vector<std::size_t> keep1, keep2;
      while (keep1.size() < 3) {
        keep1.clear();
        for (std::size_t i = 0; i < 6; ++i)
          if (gen() % 2) keep1.push_back(i);
      }
      while (keep2.size() < 3) {
        keep2.clear();
        for (std::size_t i = 0; i < 6; ++i)
          if (gen() % 2) keep2.push_back(i);
      }
      std::vector<VertexPair> e;
      for (std::size_t a = 0; a < keep1.size(); ++a)
        for (std::size_t b = 0; b < keep2.size(); ++b)
          if (m[keep1[a]][keep2[b]]) e.emplace_back(a, b);
      auto sub = pair_graph(keep1.size(), keep2.size(), e);
      ++checked;
      EXPECT_FALSE(check_eps_regular_exact(sub, 0, 1, eps2).violated());
      auto sd = sub.pair_density(0, 1);
      EXPECT_GE(sd, (Rational(1) - eps) * d);
      EXPECT_LE(sd, (Rational(1) + eps) * d);
    }
  }
  EXPECT_GT(checked, 50);
}
