#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "k4count/bitset.hpp"
#include "k4count/error.hpp"
#include "k4count/model.hpp"
#include "k4count/regularity.hpp"

namespace k4c {

/// Path-aux graph between X1 and Y = X2 x X3: (x1, (x2,x3)) is an edge iff
/// x1x2 and x1x3 are both edges of the source graph. Product vertices are
/// encoded as y = x2 * n3 + x3.
class AuxGraph {
 public:
  std::size_t n1() const noexcept { return n1_; }
  std::size_t n2() const noexcept { return n2_; }
  std::size_t n3() const noexcept { return n3_; }
  std::size_t product_size() const noexcept { return n2_ * n3_; }
  std::size_t edge_count() const noexcept { return edge_count_; }

  std::size_t encode(std::size_t x2, std::size_t x3) const noexcept { return x2 * n3_ + x3; }
  std::pair<std::size_t, std::size_t> decode(std::size_t y) const noexcept { return {y / n3_, y % n3_}; }

  const Bitset& neighbors_of_x1(std::size_t x1) const { return rows_.at(x1); }
  const Bitset& neighbors_of_y(std::size_t y) const { return cols_.at(y); }
  std::size_t degree(std::size_t x1) const { return rows_.at(x1).count(); }

  /// (X1, Y) as a bipartite pair for the regularity checkers.
  BipartiteView view() const noexcept { return {rows_, cols_, edge_count_}; }

  friend AuxGraph build_path_aux(const ClassedGraph&, std::size_t, std::size_t, std::size_t);

 private:
  std::size_t n1_ = 0, n2_ = 0, n3_ = 0, edge_count_ = 0;
  std::vector<Bitset> rows_;
  std::vector<Bitset> cols_;
};

/// Builds A(G) for anchor class a (X1) and classes b (X2), c (X3).
inline AuxGraph build_path_aux(const ClassedGraph& g, std::size_t anchor, std::size_t left, std::size_t right) {
  const auto& pat = g.pattern();
  if (anchor >= g.class_count() || left >= g.class_count() || right >= g.class_count())
    throw Error(Errc::index_out_of_range, "aux class index");
  if (left == right || anchor == left || anchor == right)
    throw Error(Errc::invalid_parameter, "aux classes must be distinct");
  if (!pat.has_edge(anchor, left) || !pat.has_edge(anchor, right))
    throw Error(Errc::missing_pattern_edge, "aux needs pattern edges {" + std::to_string(anchor + 1) + "," +
                                                std::to_string(left + 1) + "} and {" + std::to_string(anchor + 1) +
                                                "," + std::to_string(right + 1) + "}");
  AuxGraph a;
  a.n1_ = g.size(anchor);
  a.n2_ = g.size(left);
  a.n3_ = g.size(right);
  const std::size_t ny = a.n2_ * a.n3_;
  a.rows_.assign(a.n1_, Bitset(ny));
  a.cols_.assign(ny, Bitset(a.n1_));
  for (std::size_t x1 = 0; x1 < a.n1_; ++x1) {
    const auto& gb = g.neighbors(anchor, x1, left);
    const auto& gc = g.neighbors(anchor, x1, right);
    gb.for_each([&](std::size_t x2) {
      gc.for_each([&](std::size_t x3) {
        auto y = x2 * a.n3_ + x3;
        a.rows_[x1].set(y);
        a.cols_[y].set(x1);
        ++a.edge_count_;
      });
    });
  }
  return a;
}

/// Lower-regularity of (X1, Y) at (eps', d_target); d_target is normally
/// D_ab * D_ac. Exact mode needs n1 <= 14 and n2*n3 <= 14.
inline RegularityVerdict aux_lower_regularity(const AuxGraph& a, Rational eps_prime, Rational d_target, CheckMode mode,
                                              std::uint64_t budget, RngSpec rng) {
  return check_regular(a.view(), RegularityCriterion::lower_regular(eps_prime, d_target), mode, budget, rng);
}

/// X2-X3 edges of g as a set of product indices.
inline Bitset product_edge_set(const ClassedGraph& g, const AuxGraph& a, std::size_t left, std::size_t right) {
  Bitset out(a.product_size());
  for (auto [x2, x3] : g.edges(left, right)) out.set(a.encode(x2, x3));
  return out;
}

struct AuxTriangleCounts {
  std::vector<std::uint64_t> per_x1;
  std::uint64_t total = 0;
};

/// Per X1 vertex, |Γ_A(x1) ∩ edges23|: the number of triangles x1-x2-x3 whose
/// X2-X3 edge lies in `edges23`.
inline AuxTriangleCounts triangles_through_aux(const AuxGraph& a, const Bitset& edges23) {
  if (edges23.size() != a.product_size())
    throw Error(Errc::index_out_of_range, "edge set length " + std::to_string(edges23.size()) + " != |Y| = " +
                                              std::to_string(a.product_size()));
  AuxTriangleCounts out;
  out.per_x1.resize(a.n1());
  for (std::size_t x1 = 0; x1 < a.n1(); ++x1) {
    out.per_x1[x1] = a.neighbors_of_x1(x1).intersect_count(edges23);
    out.total += out.per_x1[x1];
  }
  return out;
}

inline AuxTriangleCounts triangles_through_aux(const AuxGraph& a, std::span<const std::size_t> edges23) {
  Bitset set(a.product_size());
  for (auto y : edges23) {
    if (y >= a.product_size()) throw Error(Errc::index_out_of_range, "product index " + std::to_string(y) + " >= |Y|");
    set.set(y);
  }
  return triangles_through_aux(a, set);
}

}  // namespace k4c
