#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "k4count/bitset.hpp"
#include "k4count/error.hpp"
#include "k4count/model.hpp"
#include "k4count/rational.hpp"

namespace k4c {

/// Canonical copy count with optional breakdowns.
struct CopyCount {
  BigInt total = 0;
  /// per_vertex[x][v] = deg_H(v, G) for v in class x (filled on request).
  std::vector<std::vector<std::uint64_t>> per_vertex;
  /// per_edge[r][a * n_y + b] = deg_H((a,b), G) for pattern edge r = {x,y}
  /// of H, x < y (filled on request; zero for absent edges).
  std::vector<std::vector<std::uint64_t>> per_edge;
};

struct CountOptions {
  bool per_vertex = false;
  bool per_edge = false;
  /// Optional per-class candidate restriction (empty = no restriction).
  std::vector<std::optional<Bitset>> restrict_to;
};

namespace detail {

inline void require_subpattern(const ClassedGraph& g, const PatternGraph& h) {
  if (h.ell() != g.class_count())
    throw Error(Errc::pattern_mismatch, "pattern has " + std::to_string(h.ell()) + " vertices but graph has " +
                                            std::to_string(g.class_count()) + " classes");
  for (auto [x, y] : h.edges())
    if (!g.pattern().has_edge(x, y))
      throw Error(Errc::pattern_mismatch, "pattern edge {" + std::to_string(x + 1) + "," + std::to_string(y + 1) +
                                              "} has no edge set in the graph");
}

class CanonicalCounter {
 public:
  CanonicalCounter(const ClassedGraph& g, const PatternGraph& h, const CountOptions& opt) : g_(g), h_(h), opt_(opt) {
    const auto ell = h.ell();
    order_.resize(ell);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return h.degree(a) > h.degree(b); });
    earlier_.resize(ell);
    for (std::size_t i = 0; i < ell; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (h.has_edge(order_[i], order_[j])) earlier_[i].push_back(j);
    chosen_.assign(ell, 0);
    scratch_.resize(ell);
    start_.resize(ell);
    for (std::size_t i = 0; i < ell; ++i) {
      auto x = order_[i];
      if (x < opt.restrict_to.size() && opt.restrict_to[x]) {
        if (opt.restrict_to[x]->size() != g.size(x)) throw Error(Errc::index_out_of_range, "restriction length");
        start_[i] = *opt.restrict_to[x];
      } else {
        start_[i] = Bitset(g.size(x), true);
      }
    }
    // Counts below the first level must fit 64 bits.
    long double bound = 1;
    for (std::size_t i = 1; i < ell; ++i) bound *= static_cast<long double>(g.size(order_[i]));
    if (bound >= 1.8e19L) throw Error(Errc::domain_error, "instance too large for 64-bit partial counts");
  }

  CopyCount run() {
    CopyCount out;
    if (opt_.per_vertex) {
      out.per_vertex.resize(h_.ell());
      for (std::size_t x = 0; x < h_.ell(); ++x) out.per_vertex[x].assign(g_.size(x), 0);
    }
    if (opt_.per_edge) {
      out.per_edge.resize(h_.edge_count());
      for (std::size_t r = 0; r < h_.edge_count(); ++r) {
        auto [x, y] = h_.edges()[r];
        out.per_edge[r].assign(g_.size(x) * g_.size(y), 0);
      }
    }
    out_ = &out;
    if (h_.ell() == 0) {
      out.total = 1;
      return out;
    }
    const Bitset& first = start_[0];
    first.for_each([&](std::size_t v) {
      chosen_[0] = v;
      std::uint64_t sub = descend(1);
      credit(0, v, sub);
      out.total += sub;
    });
    return out;
  }

 private:
  bool breakdown() const noexcept { return opt_.per_vertex || opt_.per_edge; }

  void credit(std::size_t level, std::size_t v, std::uint64_t sub) {
    if (sub == 0) return;
    auto x = order_[level];
    if (opt_.per_vertex) out_->per_vertex[x][v] += sub;
    if (opt_.per_edge) {
      for (auto j : earlier_[level]) {
        auto w = order_[j];
        auto r = *h_.edge_index(x, w);
        auto [ex, ey] = h_.edges()[r];
        std::size_t a = ex == x ? v : chosen_[j];
        std::size_t b = ex == x ? chosen_[j] : v;
        out_->per_edge[r][a * g_.size(ey) + b] += sub;
      }
    }
  }

  std::uint64_t descend(std::size_t level) {
    if (level == h_.ell()) return 1;
    auto x = order_[level];
    Bitset& cand = scratch_[level];
    cand = start_[level];
    for (auto j : earlier_[level]) cand &= g_.neighbors(order_[j], chosen_[j], x);
    if (level + 1 == h_.ell() && !breakdown()) return cand.count();
    std::uint64_t total = 0;
    cand.for_each([&](std::size_t v) {
      chosen_[level] = v;
      std::uint64_t sub = descend(level + 1);
      if (breakdown()) credit(level, v, sub);
      total += sub;
    });
    return total;
  }

  const ClassedGraph& g_;
  const PatternGraph& h_;
  const CountOptions& opt_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<std::size_t>> earlier_;
  std::vector<std::size_t> chosen_;
  std::vector<Bitset> scratch_;
  std::vector<Bitset> start_;
  CopyCount* out_ = nullptr;
};

}  // namespace detail

/// Number of canonical copies of H in G (vertex x of H drawn from class x),
/// by backtracking over H's vertices in descending-degree order with
/// candidate sets maintained as bitset intersections.
inline CopyCount count_canonical(const ClassedGraph& g, const PatternGraph& h, const CountOptions& opt = {}) {
  detail::require_subpattern(g, h);
  return detail::CanonicalCounter(g, h, opt).run();
}

/// Canonical copies through vertex v of class x.
inline BigInt deg_vertex(const ClassedGraph& g, const PatternGraph& h, std::size_t x, std::size_t v) {
  detail::require_subpattern(g, h);
  if (v >= g.size(x)) throw Error(Errc::index_out_of_range, "vertex " + std::to_string(v) + " of class " + std::to_string(x + 1));
  CountOptions opt;
  opt.restrict_to.resize(h.ell());
  opt.restrict_to[x] = Bitset(g.size(x));
  opt.restrict_to[x]->set(v);
  return count_canonical(g, h, opt).total;
}

namespace detail {
inline BigInt count_through_pair(const ClassedGraph& g, const PatternGraph& h, std::size_t x, std::size_t y,
                                 std::size_t a, std::size_t b) {
  CountOptions opt;
  opt.restrict_to.resize(h.ell());
  opt.restrict_to[x] = Bitset(g.size(x));
  opt.restrict_to[x]->set(a);
  opt.restrict_to[y] = Bitset(g.size(y));
  opt.restrict_to[y]->set(b);
  return count_canonical(g, h, opt).total;
}
}  // namespace detail

/// Canonical copies containing the present edge (a,b), a in class x, b in class y.
/// {x,y} must be an edge of H.
inline BigInt deg_edge(const ClassedGraph& g, const PatternGraph& h, std::size_t x, std::size_t y, std::size_t a,
                       std::size_t b) {
  detail::require_subpattern(g, h);
  if (!h.has_edge(x, y)) throw Error(Errc::pattern_mismatch, "{x,y} is not an edge of the counted pattern");
  if (!g.has_edge(x, a, y, b))
    throw Error(Errc::edge_absent, "(" + std::to_string(a) + "," + std::to_string(b) + ") is not an edge");
  return detail::count_through_pair(g, h, x, y, a, b);
}

/// Copies the pair (a,b) would complete if it were an edge: canonical copies
/// of H - {x,y} through a and b. Equals deg_edge when the edge is present.
inline BigInt deg_edge_potential(const ClassedGraph& g, const PatternGraph& h, std::size_t x, std::size_t y,
                                 std::size_t a, std::size_t b) {
  detail::require_subpattern(g, h);
  if (!h.has_edge(x, y)) throw Error(Errc::pattern_mismatch, "{x,y} is not an edge of the counted pattern");
  if (a >= g.size(x) || b >= g.size(y)) throw Error(Errc::index_out_of_range, "edge endpoint outside its class");
  auto reduced = h.without_edge(x, y);
  return detail::count_through_pair(g, reduced, x, y, a, b);
}

/// prod_x n_x * prod_{xy in E(H)} D_xy.
inline BigRational expected_count(const PatternGraph& h, const std::vector<std::size_t>& sizes, const DensityMatrix& d) {
  if (sizes.size() != h.ell() || d.ell() != h.ell())
    throw Error(Errc::pattern_mismatch, "sizes / density matrix dimension differs from pattern");
  BigRational out = 1;
  for (auto n : sizes) out *= BigRational(BigInt(n));
  for (auto [x, y] : h.edges()) out *= d.at(x, y).to_big();
  return out;
}

/// n^{|V(H)|} (m/n^2)^{|E(H)|}.
inline BigRational expected_count_uniform(const PatternGraph& h, std::size_t n, std::size_t m) {
  if (n == 0) throw Error(Errc::invalid_parameter, "n must be positive");
  BigRational out = 1;
  for (std::size_t i = 0; i < h.ell(); ++i) out *= BigRational(BigInt(n));
  BigRational d(BigInt(m), BigInt(n) * n);
  for (std::size_t i = 0; i < h.edge_count(); ++i) out *= d;
  return out;
}

/// Expected count with the graph's own sizes and pair densities m_xy/(n_x n_y).
inline BigRational expected_count_empirical(const ClassedGraph& g, const PatternGraph& h) {
  detail::require_subpattern(g, h);
  BigRational out = 1;
  for (auto n : g.sizes()) out *= BigRational(BigInt(n));
  for (auto [x, y] : h.edges()) {
    auto denom = BigInt(g.size(x)) * g.size(y);
    if (denom == 0) return 0;
    out *= BigRational(BigInt(g.edge_count(x, y)), denom);
  }
  return out;
}

/// True iff G has fewer than (1 - delta) times the expected number of
/// canonical copies (strict), expectation taken from G's own densities.
inline bool is_bad_instance(const ClassedGraph& g, const PatternGraph& h, Rational delta) {
  auto expected = expected_count_empirical(g, h);
  auto count = count_canonical(g, h).total;
  return BigRational(count) < (BigRational(1) - delta.to_big()) * expected;
}

/// Membership in B_delta(3, n1, n2, n3, D): at least delta*n1 vertices of X1
/// lie in at most (1 - delta) n2 n3 D12 D13 D23 canonical triangles.
inline bool bad_family_B3(const ClassedGraph& g, Rational delta, const DensityMatrix& d) {
  if (g.class_count() != 3) throw Error(Errc::pattern_mismatch, "B3 membership needs a tripartite graph");
  if (d.ell() != 3) throw Error(Errc::pattern_mismatch, "B3 membership needs a 3x3 density matrix");
  auto k3 = PatternGraph::complete(3);
  CountOptions opt;
  opt.per_vertex = true;
  auto counts = count_canonical(g, k3, opt);
  BigRational threshold = (BigRational(1) - delta.to_big()) * BigRational(BigInt(g.size(1)) * g.size(2)) *
                          d.at(0, 1).to_big() * d.at(0, 2).to_big() * d.at(1, 2).to_big();
  std::size_t low = 0;
  for (auto c : counts.per_vertex[0])
    if (BigRational(BigInt(c)) <= threshold) ++low;
  return BigRational(BigInt(low)) >= delta.to_big() * BigRational(BigInt(g.size(0)));
}

/// m2(H) = max over subgraphs on >= 3 vertices of (e-1)/(v-2). For a fixed
/// vertex set the ratio grows with e, so induced subgraphs suffice.
inline Rational two_density(const PatternGraph& h) {
  const auto ell = h.ell();
  if (ell < 3) throw Error(Errc::too_few_vertices, "2-density needs at least 3 vertices");
  if (ell > 20) throw Error(Errc::invalid_parameter, "pattern too large for subset enumeration");
  std::optional<Rational> best;
  for (std::uint32_t s = 0; s < (std::uint32_t{1} << ell); ++s) {
    auto v = static_cast<std::size_t>(std::popcount(s));
    if (v < 3) continue;
    std::int64_t e = 0;
    for (auto [x, y] : h.edges())
      if ((s >> x & 1U) && (s >> y & 1U)) ++e;
    Rational r(e - 1, static_cast<std::int64_t>(v) - 2);
    if (!best || r > *best) best = r;
  }
  return *best;
}

enum class BalanceClass { strictly_balanced, balanced, neither };

inline const char* balance_name(BalanceClass b) {
  switch (b) {
    case BalanceClass::strictly_balanced: return "strictly-balanced";
    case BalanceClass::balanced: return "balanced";
    case BalanceClass::neither: return "neither";
  }
  return "?";
}

/// Balanced: H itself attains m2(H). Strictly balanced: every proper subgraph
/// on >= 3 vertices has a strictly smaller ratio. Removing an edge from the
/// full vertex set always lowers the ratio, so only proper vertex subsets
/// need checking beyond H itself.
inline BalanceClass balance_class(const PatternGraph& h) {
  auto m2 = two_density(h);
  const auto ell = h.ell();
  Rational own(static_cast<std::int64_t>(h.edge_count()) - 1, static_cast<std::int64_t>(ell) - 2);
  if (own != m2) return BalanceClass::neither;
  const std::uint32_t full = (std::uint32_t{1} << ell) - 1;
  for (std::uint32_t s = 0; s < full; ++s) {
    auto v = static_cast<std::size_t>(std::popcount(s));
    if (v < 3) continue;
    std::int64_t e = 0;
    for (auto [x, y] : h.edges())
      if ((s >> x & 1U) && (s >> y & 1U)) ++e;
    if (Rational(e - 1, static_cast<std::int64_t>(v) - 2) >= m2) return BalanceClass::balanced;
  }
  return BalanceClass::strictly_balanced;
}

namespace detail {
/// r with r^k == n, if it exists.
inline std::optional<BigInt> exact_root(std::uint64_t n, std::uint64_t k) {
  auto guess = static_cast<std::uint64_t>(std::llround(std::pow(static_cast<long double>(n), 1.0L / static_cast<long double>(k))));
  for (std::uint64_t r = guess > 0 ? guess - 1 : 0; r <= guess + 1; ++r) {
    BigInt p = boost::multiprecision::pow(BigInt(r), static_cast<unsigned>(k));
    if (p == n) return BigInt(r);
  }
  return std::nullopt;
}
}  // namespace detail

/// ceil(C * n^{2 - 1/m2(H)}). Exact when n is a perfect power matching the
/// exponent's denominator; otherwise the power is taken in long double.
inline BigInt edge_threshold(const PatternGraph& h, std::uint64_t n, Rational c) {
  auto m2 = two_density(h);
  if (m2 <= Rational(0)) throw Error(Errc::domain_error, "2-density must be positive for a threshold");
  if (c < Rational(0)) throw Error(Errc::invalid_parameter, "C must be non-negative");
  Rational exponent = Rational(2) - Rational(1) / m2;
  if (exponent.num() >= 0) {
    if (auto root = detail::exact_root(n, static_cast<std::uint64_t>(exponent.den()))) {
      BigInt power = boost::multiprecision::pow(*root, static_cast<unsigned>(exponent.num()));
      return ceil(c.to_big() * BigRational(power));
    }
  }
  long double value = static_cast<long double>(c.num()) / static_cast<long double>(c.den()) *
                      std::pow(static_cast<long double>(n), static_cast<long double>(exponent.num()) /
                                                                static_cast<long double>(exponent.den()));
  return BigInt(static_cast<std::uint64_t>(std::ceil(value)));
}

/// Ordering of E(K_ell) in which the edges joining v_{k+1} to v_1..v_k form
/// the k-th block. sigma[k-1] is the permutation of {0..k-1} giving the order
/// of the back-neighbours of vertex k (zero-based) within its block.
struct ValidSequence {
  std::size_t ell = 0;
  std::vector<VertexPair> edges;
  std::vector<std::vector<std::size_t>> sigma;
};

inline ValidSequence make_valid_sequence(std::size_t ell, std::vector<std::vector<std::size_t>> sigma) {
  ValidSequence s{ell, {}, std::move(sigma)};
  for (std::size_t k = 1; k < ell; ++k)
    for (auto i : s.sigma[k - 1]) s.edges.emplace_back(i, k);
  return s;
}

inline ValidSequence one_valid_sequence(std::size_t ell) {
  if (ell < 2) throw Error(Errc::invalid_parameter, "valid sequences need ell >= 2");
  std::vector<std::vector<std::size_t>> sigma;
  for (std::size_t k = 1; k < ell; ++k) {
    sigma.emplace_back(k);
    std::iota(sigma.back().begin(), sigma.back().end(), std::size_t{0});
  }
  return make_valid_sequence(ell, std::move(sigma));
}

/// All valid sequences, in lexicographic order of (sigma_1, ..., sigma_{ell-1}).
/// There are prod_{k=1}^{ell-1} k! of them.
inline std::vector<ValidSequence> valid_sequences(std::size_t ell) {
  auto base = one_valid_sequence(ell);
  std::vector<ValidSequence> out;
  std::vector<std::vector<std::size_t>> sigma = base.sigma;
  auto rec = [&](auto& self, std::size_t k) -> void {
    if (k == ell) {
      out.push_back(make_valid_sequence(ell, sigma));
      return;
    }
    std::iota(sigma[k - 1].begin(), sigma[k - 1].end(), std::size_t{0});
    do {
      self(self, k + 1);
    } while (std::next_permutation(sigma[k - 1].begin(), sigma[k - 1].end()));
  };
  rec(rec, 1);
  return out;
}

}  // namespace k4c
