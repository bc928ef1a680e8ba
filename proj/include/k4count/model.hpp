#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "k4count/bitset.hpp"
#include "k4count/error.hpp"
#include "k4count/rational.hpp"

namespace k4c {

using VertexPair = std::pair<std::size_t, std::size_t>;

/// Simple graph on vertices 0..ell-1 used as the template of a blow-up.
/// Edges are stored normalized (x < y) in lexicographic order; the position
/// of an edge in `edges()` is its rank.
class PatternGraph {
 public:
  PatternGraph() = default;

  PatternGraph(std::size_t ell, std::vector<VertexPair> edges) : ell_(ell) {
    for (auto& [x, y] : edges) {
      if (x >= ell || y >= ell)
        throw Error(Errc::index_out_of_range, "pattern edge {" + std::to_string(x + 1) + "," +
                                                  std::to_string(y + 1) + "} outside 1.." + std::to_string(ell));
      if (x == y) throw Error(Errc::invalid_parameter, "pattern loop at vertex " + std::to_string(x + 1));
      if (x > y) std::swap(x, y);
    }
    std::sort(edges.begin(), edges.end());
    if (auto it = std::adjacent_find(edges.begin(), edges.end()); it != edges.end())
      throw Error(Errc::duplicate_edge, "pattern edge {" + std::to_string(it->first + 1) + "," +
                                            std::to_string(it->second + 1) + "} listed twice");
    edges_ = std::move(edges);
    index_.assign(ell * ell, npos);
    for (std::size_t r = 0; r < edges_.size(); ++r) {
      auto [x, y] = edges_[r];
      index_[x * ell + y] = index_[y * ell + x] = r;
    }
  }

  static PatternGraph complete(std::size_t ell) {
    std::vector<VertexPair> e;
    for (std::size_t x = 0; x < ell; ++x)
      for (std::size_t y = x + 1; y < ell; ++y) e.emplace_back(x, y);
    return {ell, std::move(e)};
  }

  static PatternGraph cycle(std::size_t ell) {
    std::vector<VertexPair> e;
    for (std::size_t x = 0; x < ell; ++x) e.emplace_back(x, (x + 1) % ell);
    return {ell, std::move(e)};
  }

  /// K4 with the edge between vertices 1 and 2 (0 and 1 zero-based) removed.
  static PatternGraph k4_minus_e() { return complete(4).without_edge(0, 1); }

  /// "K3", "K4", "K4e", "K5", "C4" ...; nullopt for anything else.
  static std::optional<PatternGraph> from_name(const std::string& name) {
    if (name == "K4e" || name == "K4-e") return k4_minus_e();
    if (name.size() >= 2 && (name[0] == 'K' || name[0] == 'C')) {
      std::size_t ell = 0;
      for (std::size_t i = 1; i < name.size(); ++i) {
        if (name[i] < '0' || name[i] > '9') return std::nullopt;
        ell = ell * 10 + static_cast<std::size_t>(name[i] - '0');
      }
      if (ell < 1 || ell > 16) return std::nullopt;
      if (name[0] == 'K') return complete(ell);
      if (ell >= 3) return cycle(ell);
    }
    return std::nullopt;
  }

  PatternGraph without_edge(std::size_t x, std::size_t y) const {
    auto e = edges_;
    std::erase(e, VertexPair{std::min(x, y), std::max(x, y)});
    return {ell_, std::move(e)};
  }

  std::size_t ell() const noexcept { return ell_; }
  const std::vector<VertexPair>& edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::optional<std::size_t> edge_index(std::size_t x, std::size_t y) const noexcept {
    if (x >= ell_ || y >= ell_) return std::nullopt;
    auto r = index_[x * ell_ + y];
    if (r == npos) return std::nullopt;
    return r;
  }
  bool has_edge(std::size_t x, std::size_t y) const noexcept { return edge_index(x, y).has_value(); }

  std::size_t degree(std::size_t x) const noexcept {
    std::size_t d = 0;
    for (auto [a, b] : edges_) d += (a == x) + (b == x);
    return d;
  }

  friend bool operator==(const PatternGraph& a, const PatternGraph& b) {
    return a.ell_ == b.ell_ && a.edges_ == b.edges_;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t ell_ = 0;
  std::vector<VertexPair> edges_;
  std::vector<std::size_t> index_;
};

/// Read-only bipartite view (side 1 rows, side 2 columns) over adjacency
/// stored elsewhere. `rows[v]` is the neighbourhood of side-1 vertex v as a
/// bitset over side 2, `cols[w]` the converse.
struct BipartiteView {
  std::span<const Bitset> rows;
  std::span<const Bitset> cols;
  std::size_t edge_count = 0;

  std::size_t n1() const noexcept { return rows.size(); }
  std::size_t n2() const noexcept { return cols.size(); }
  BipartiteView transposed() const noexcept { return {cols, rows, edge_count}; }
};

/// Symmetric density matrix with exact entries in (0,1]. The diagonal is
/// unused and reads as 1.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(std::size_t ell, Rational fill = Rational(1)) : ell_(ell), d_(ell * ell, Rational(1)) {
    for (std::size_t x = 0; x < ell; ++x)
      for (std::size_t y = 0; y < ell; ++y)
        if (x != y) set(x, y, fill);
  }

  std::size_t ell() const noexcept { return ell_; }
  const Rational& at(std::size_t x, std::size_t y) const { return d_.at(x * ell_ + y); }

  void set(std::size_t x, std::size_t y, Rational v) {
    if (x >= ell_ || y >= ell_) throw Error(Errc::index_out_of_range, "density matrix index");
    if (x == y) return;
    if (v <= Rational(0) || v > Rational(1))
      throw Error(Errc::invalid_parameter, "density entry " + v.str() + " outside (0,1]");
    d_[x * ell_ + y] = d_[y * ell_ + x] = v;
  }

 private:
  std::size_t ell_ = 0;
  std::vector<Rational> d_;
};

/// Edge list for one pattern edge {x,y}: pairs (a,b) with a in class x and b in class y.
struct EdgeList {
  std::size_t x = 0;
  std::size_t y = 0;
  std::vector<VertexPair> edges;
};

/// Blow-up instance: disjoint vertex classes with per-pattern-edge bipartite
/// adjacency stored in both orientations. Immutable after construction.
class ClassedGraph {
 public:
  struct PairAdjacency {
    std::size_t x = 0, y = 0;  // x < y
    std::vector<Bitset> rows;  // n_x bitsets over class y
    std::vector<Bitset> cols;  // n_y bitsets over class x
    std::size_t edge_count = 0;
  };

  ClassedGraph() = default;

  const PatternGraph& pattern() const noexcept { return pattern_; }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
  std::size_t class_count() const noexcept { return sizes_.size(); }
  std::size_t size(std::size_t x) const { return sizes_.at(x); }

  const PairAdjacency& pair(std::size_t rank) const { return pairs_.at(rank); }
  const std::vector<PairAdjacency>& pairs() const noexcept { return pairs_; }

  std::size_t pair_rank(std::size_t x, std::size_t y) const {
    auto r = pattern_.edge_index(x, y);
    if (!r)
      throw Error(Errc::edge_on_non_pattern_pair,
                  "{" + std::to_string(x + 1) + "," + std::to_string(y + 1) + "} is not a pattern edge");
    return *r;
  }

  /// Γ_to(v) for vertex v of class `from`.
  const Bitset& neighbors(std::size_t from, std::size_t v, std::size_t to) const {
    const auto& p = pairs_[pair_rank(from, to)];
    const auto& side = from == p.x ? p.rows : p.cols;
    if (v >= side.size()) throw Error(Errc::index_out_of_range, "vertex " + std::to_string(v) + " of class " + std::to_string(from + 1));
    return side[v];
  }

  bool has_edge(std::size_t x, std::size_t a, std::size_t y, std::size_t b) const {
    const auto& nb = neighbors(x, a, y);
    if (b >= nb.size()) throw Error(Errc::index_out_of_range, "vertex " + std::to_string(b) + " of class " + std::to_string(y + 1));
    return nb.test(b);
  }

  std::size_t edge_count(std::size_t x, std::size_t y) const { return pairs_[pair_rank(x, y)].edge_count; }

  /// Edges of pair {x,y} oriented as (vertex in x, vertex in y), sorted.
  std::vector<VertexPair> edges(std::size_t x, std::size_t y) const {
    std::vector<VertexPair> out;
    const auto& p = pairs_[pair_rank(x, y)];
    for (std::size_t a = 0; a < p.rows.size(); ++a)
      p.rows[a].for_each([&](std::size_t b) { out.emplace_back(a, b); });
    if (x != p.x) {
      for (auto& e : out) std::swap(e.first, e.second);
      std::sort(out.begin(), out.end());
    }
    return out;
  }

  /// Side 1 = class x, side 2 = class y.
  BipartiteView view(std::size_t x, std::size_t y) const {
    const auto& p = pairs_[pair_rank(x, y)];
    BipartiteView v{p.rows, p.cols, p.edge_count};
    return x == p.x ? v : v.transposed();
  }

  /// Empirical density m_xy / (n_x n_y); zero for an empty class.
  Rational pair_density(std::size_t x, std::size_t y) const {
    auto denom = static_cast<Rational::int_type>(size(x) * size(y));
    if (denom == 0) return Rational(0);
    return Rational(static_cast<Rational::int_type>(edge_count(x, y)), denom);
  }

  friend bool operator==(const ClassedGraph& a, const ClassedGraph& b) {
    if (!(a.pattern_ == b.pattern_) || a.sizes_ != b.sizes_) return false;
    for (std::size_t r = 0; r < a.pairs_.size(); ++r)
      if (a.pairs_[r].rows != b.pairs_[r].rows) return false;
    return true;
  }

  friend ClassedGraph build_classed_graph(const PatternGraph&, const std::vector<std::size_t>&,
                                          const std::vector<EdgeList>&);

 private:
  PatternGraph pattern_;
  std::vector<std::size_t> sizes_;
  std::vector<PairAdjacency> pairs_;
};

/// Validates and assembles a blow-up. Pattern edges without an entry in
/// `edge_lists` get no edges.
inline ClassedGraph build_classed_graph(const PatternGraph& pattern, const std::vector<std::size_t>& sizes,
                                        const std::vector<EdgeList>& edge_lists) {
  if (sizes.size() != pattern.ell())
    throw Error(Errc::invalid_parameter, "expected " + std::to_string(pattern.ell()) + " class sizes, got " +
                                             std::to_string(sizes.size()));
  ClassedGraph g;
  g.pattern_ = pattern;
  g.sizes_ = sizes;
  g.pairs_.resize(pattern.edge_count());
  for (std::size_t r = 0; r < pattern.edge_count(); ++r) {
    auto [x, y] = pattern.edges()[r];
    auto& p = g.pairs_[r];
    p.x = x;
    p.y = y;
    p.rows.assign(sizes[x], Bitset(sizes[y]));
    p.cols.assign(sizes[y], Bitset(sizes[x]));
  }
  for (const auto& list : edge_lists) {
    if (list.x >= pattern.ell() || list.y >= pattern.ell())
      throw Error(Errc::index_out_of_range, "edge list class outside 1.." + std::to_string(pattern.ell()));
    auto rank = pattern.edge_index(list.x, list.y);
    if (!rank)
      throw Error(Errc::edge_on_non_pattern_pair, "edges given for {" + std::to_string(list.x + 1) + "," +
                                                     std::to_string(list.y + 1) + "} which is not a pattern edge");
    auto& p = g.pairs_[*rank];
    bool flipped = list.x != p.x;
    for (auto [a, b] : list.edges) {
      if (flipped) std::swap(a, b);
      if (a >= sizes[p.x] || b >= sizes[p.y])
        throw Error(Errc::index_out_of_range, "edge (" + std::to_string(flipped ? b : a) + "," +
                                                  std::to_string(flipped ? a : b) + ") outside classes of sizes " +
                                                  std::to_string(sizes[list.x]) + "x" + std::to_string(sizes[list.y]));
      if (p.rows[a].test(b))
        throw Error(Errc::duplicate_edge, "edge (" + std::to_string(flipped ? b : a) + "," +
                                              std::to_string(flipped ? a : b) + ") listed twice");
      p.rows[a].set(b);
      p.cols[b].set(a);
      ++p.edge_count;
    }
  }
  return g;
}

/// Output of `neighborhood_restriction`: the induced blow-up plus maps from
/// new class / vertex indices back to the source graph.
struct Restriction {
  ClassedGraph graph;
  std::vector<std::size_t> classes;                // new class -> source class
  std::vector<std::vector<std::size_t>> vertices;  // per new class: new index -> source index
};

/// Blow-up induced on `kept_full` (whole classes) and `kept_restricted`
/// (intersected with the anchor vertex's neighbourhood). Kept classes keep
/// their relative order; vertex indices are re-densified.
inline Restriction neighborhood_restriction(const ClassedGraph& g, std::size_t anchor_class, std::size_t anchor_vertex,
                                            const std::set<std::size_t>& kept_full,
                                            const std::set<std::size_t>& kept_restricted) {
  const auto ell = g.class_count();
  if (anchor_class >= ell) throw Error(Errc::index_out_of_range, "anchor class");
  if (anchor_vertex >= g.size(anchor_class)) throw Error(Errc::index_out_of_range, "anchor vertex");
  std::set<std::size_t> kept;
  for (auto c : kept_full) {
    if (c >= ell) throw Error(Errc::index_out_of_range, "kept class " + std::to_string(c + 1));
    kept.insert(c);
  }
  for (auto c : kept_restricted) {
    if (c >= ell) throw Error(Errc::index_out_of_range, "kept class " + std::to_string(c + 1));
    if (!kept.insert(c).second)
      throw Error(Errc::invalid_parameter, "class " + std::to_string(c + 1) + " both full and restricted");
    if (!g.pattern().has_edge(anchor_class, c))
      throw Error(Errc::anchor_not_adjacent,
                  "class " + std::to_string(c + 1) + " has no pattern edge to anchor class " + std::to_string(anchor_class + 1));
  }
  if (kept.contains(anchor_class)) throw Error(Errc::invalid_parameter, "anchor class must not be kept");

  Restriction out;
  out.classes.assign(kept.begin(), kept.end());
  std::vector<std::size_t> new_class(ell, static_cast<std::size_t>(-1));
  std::vector<std::vector<std::size_t>> old_to_new(ell);
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < out.classes.size(); ++i) {
    auto c = out.classes[i];
    new_class[c] = i;
    std::vector<std::size_t> verts;
    if (kept_restricted.contains(c)) {
      verts = g.neighbors(anchor_class, anchor_vertex, c).indices();
    } else {
      verts.resize(g.size(c));
      for (std::size_t v = 0; v < verts.size(); ++v) verts[v] = v;
    }
    old_to_new[c].assign(g.size(c), static_cast<std::size_t>(-1));
    for (std::size_t k = 0; k < verts.size(); ++k) old_to_new[c][verts[k]] = k;
    sizes.push_back(verts.size());
    out.vertices.push_back(std::move(verts));
  }

  std::vector<VertexPair> pattern_edges;
  std::vector<EdgeList> lists;
  for (auto [x, y] : g.pattern().edges()) {
    if (new_class[x] == static_cast<std::size_t>(-1) || new_class[y] == static_cast<std::size_t>(-1)) continue;
    pattern_edges.emplace_back(new_class[x], new_class[y]);
    EdgeList list{new_class[x], new_class[y], {}};
    for (std::size_t a = 0; a < out.vertices[new_class[x]].size(); ++a) {
      auto va = out.vertices[new_class[x]][a];
      g.neighbors(x, va, y).for_each([&](std::size_t vb) {
        auto b = old_to_new[y][vb];
        if (b != static_cast<std::size_t>(-1)) list.edges.emplace_back(a, b);
      });
    }
    lists.push_back(std::move(list));
  }
  out.graph = build_classed_graph(PatternGraph(out.classes.size(), std::move(pattern_edges)), sizes, lists);
  return out;
}

}  // namespace k4c
