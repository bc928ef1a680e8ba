#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "k4count/error.hpp"
#include "k4count/model.hpp"
#include "k4count/regularity.hpp"
#include "k4count/rng.hpp"

namespace k4c {

/// Child-stream offset used for regularity checks of attempt streams, so
/// that they never coincide with per-pair sampling streams (rank < offset).
inline constexpr std::uint64_t kCheckStreamBase = std::uint64_t{1} << 32;

/// Uniform m-subset of the n1 x n2 cell grid via a partial Fisher-Yates
/// shuffle of cell indices a * n2 + b. Returned sorted.
inline std::vector<VertexPair> sample_bipartite_exact_m(std::size_t n1, std::size_t n2, std::size_t m, RngSpec rng) {
  const std::size_t cells = n1 * n2;
  if (m > cells)
    throw Error(Errc::m_too_large, "m = " + std::to_string(m) + " exceeds n1*n2 = " + std::to_string(cells));
  CounterRng gen(rng);
  std::vector<std::size_t> idx(cells);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + gen.below(cells - i)]);
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  std::vector<VertexPair> out;
  out.reserve(m);
  for (auto c : idx) out.emplace_back(c / n2, c % n2);
  return out;
}

/// Uniform member of G(H, n_1..n_l, D) with |E_xy| = m_per_pair[rank of xy].
/// Pair r is drawn from stream rng.child(r).
inline ClassedGraph sample_blowup(const PatternGraph& h, const std::vector<std::size_t>& sizes,
                                  const std::vector<std::size_t>& m_per_pair, RngSpec rng) {
  if (sizes.size() != h.ell()) throw Error(Errc::invalid_parameter, "one size per pattern vertex required");
  if (m_per_pair.size() != h.edge_count())
    throw Error(Errc::invalid_parameter, "one edge count per pattern edge required (" + std::to_string(h.edge_count()) + ")");
  std::vector<EdgeList> lists;
  for (std::size_t r = 0; r < h.edge_count(); ++r) {
    auto [x, y] = h.edges()[r];
    lists.push_back({x, y, sample_bipartite_exact_m(sizes[x], sizes[y], m_per_pair[r], rng.child(r))});
  }
  return build_classed_graph(h, sizes, lists);
}

/// G(H, n, m): all classes of size n, m edges per pattern edge.
inline ClassedGraph sample_blowup_uniform(const PatternGraph& h, std::size_t n, std::size_t m, RngSpec rng) {
  return sample_blowup(h, std::vector<std::size_t>(h.ell(), n), std::vector<std::size_t>(h.edge_count(), m), rng);
}

enum class AcceptanceMode { certified, heuristic };

inline const char* acceptance_name(AcceptanceMode m) {
  return m == AcceptanceMode::certified ? "certified" : "heuristic";
}

/// Outcome of testing every pattern pair of a graph.
struct ScreenResult {
  bool accepted = true;
  AcceptanceMode mode = AcceptanceMode::certified;
  VerdictKind verdict = VerdictKind::certified_regular;  // first violation, else weakest acceptance
  std::size_t failed_pair = 0;                           // rank, meaningful when !accepted
};

/// Screen for every pair of g. With `lower`, pair r is tested for
/// (eps, target)-lower-regularity where target = `lower_target` if set,
/// else the pair's own density; otherwise for (eps)-regularity. Pairs with
/// an empty side fail the screen. Check streams: rng.child(kCheckStreamBase + r).
inline ScreenResult screen_pairs(const ClassedGraph& g, Rational eps, CheckMode mode, std::uint64_t budget, RngSpec rng,
                                 bool lower = false, std::optional<Rational> lower_target = std::nullopt) {
  ScreenResult out;
  for (std::size_t r = 0; r < g.pattern().edge_count(); ++r) {
    auto [x, y] = g.pattern().edges()[r];
    auto view = g.view(x, y);
    if (view.n1() == 0 || view.n2() == 0) {
      out.accepted = false;
      out.verdict = VerdictKind::witness_violation;
      out.failed_pair = r;
      return out;
    }
    auto crit = lower ? RegularityCriterion::lower_regular(eps, lower_target.value_or(pair_density(view)))
                      : RegularityCriterion::eps_regular(eps);
    auto v = check_regular(view, crit, mode, budget, rng.child(kCheckStreamBase + r));
    if (v.kind == VerdictKind::no_witness_found) {
      out.mode = AcceptanceMode::heuristic;
      out.verdict = VerdictKind::no_witness_found;
    }
    if (v.violated()) {
      out.accepted = false;
      out.verdict = VerdictKind::witness_violation;
      out.failed_pair = r;
      return out;
    }
  }
  return out;
}

struct RegularSample {
  ClassedGraph graph;  // accepted draw, or the last draw when !accepted
  std::size_t rejects = 0;
  bool accepted = false;
  AcceptanceMode mode = AcceptanceMode::certified;
};

/// Rejection sampling into G(H, n_1..n_l, D, eps). Attempt t draws from
/// rng.child(t). Never throws on exhaustion; see sample_regular_blowup.
inline RegularSample try_sample_regular_blowup(const PatternGraph& h, const std::vector<std::size_t>& sizes,
                                               const std::vector<std::size_t>& m_per_pair, Rational eps,
                                               CheckMode verify_mode, std::size_t max_rejects, RngSpec rng,
                                               std::uint64_t witness_budget = 8) {
  if (max_rejects < 1) throw Error(Errc::invalid_parameter, "max_rejects must be >= 1");
  RegularSample out;
  for (std::size_t t = 0; t < max_rejects; ++t) {
    auto attempt = rng.child(t);
    out.graph = sample_blowup(h, sizes, m_per_pair, attempt);
    auto screen = screen_pairs(out.graph, eps, verify_mode, witness_budget, attempt);
    if (screen.accepted) {
      out.accepted = true;
      out.mode = screen.mode;
      return out;
    }
    ++out.rejects;
  }
  return out;
}

inline RegularSample sample_regular_blowup(const PatternGraph& h, const std::vector<std::size_t>& sizes,
                                           const std::vector<std::size_t>& m_per_pair, Rational eps,
                                           CheckMode verify_mode, std::size_t max_rejects, RngSpec rng,
                                           std::uint64_t witness_budget = 8) {
  auto s = try_sample_regular_blowup(h, sizes, m_per_pair, eps, verify_mode, max_rejects, rng, witness_budget);
  if (!s.accepted)
    throw Error(Errc::rejection_exhausted, "no accepted draw after " + std::to_string(s.rejects) + " rejections");
  return s;
}

/// Single-pair blow-up (pattern K2) from an explicit edge list.
inline ClassedGraph pair_graph(std::size_t n1, std::size_t n2, const std::vector<VertexPair>& edges) {
  return build_classed_graph(PatternGraph::complete(2), {n1, n2}, {EdgeList{0, 1, edges}});
}

struct ExtractOptions {
  Rational c = Rational(1);  // lower bound m >= c * (n_x + n_y)
  bool verify = true;        // retry until the (2 eps)-exact check passes, when exact-feasible
};

struct Extraction {
  std::vector<VertexPair> edges;  // oriented (class x, class y), sorted
  std::size_t attempts = 0;
  bool verified = false;  // passed the exact (2 eps)-regularity check
};

/// Random m-edge subgraph of pair {x,y}. Attempt t draws from rng.child(t).
inline Extraction extract_m_subgraph(const ClassedGraph& g, std::size_t x, std::size_t y, std::size_t m, Rational eps,
                                     std::size_t max_retries, RngSpec rng, const ExtractOptions& opt = {}) {
  const auto nx = g.size(x), ny = g.size(y);
  const auto available = g.edge_count(x, y);
  if (BigRational(BigInt(m)) < opt.c.to_big() * BigRational(BigInt(nx + ny)) || m > available)
    throw Error(Errc::m_out_of_range, "m = " + std::to_string(m) + " outside [C(n_x+n_y), m_xy] = [" +
                                          opt.c.str() + "*" + std::to_string(nx + ny) + ", " + std::to_string(available) + "]");
  if (max_retries < 1) throw Error(Errc::invalid_parameter, "max_retries must be >= 1");
  const auto all = g.edges(x, y);
  const bool check = opt.verify && nx <= kExactSideLimit && ny <= kExactSideLimit && nx > 0 && ny > 0;
  Extraction out;
  for (std::size_t t = 0; t < max_retries; ++t) {
    ++out.attempts;
    auto pick = sample_bipartite_exact_m(1, all.size(), m, rng.child(t));
    out.edges.clear();
    for (auto [zero, i] : pick) out.edges.push_back(all[i]);
    std::sort(out.edges.begin(), out.edges.end());
    if (!check) return out;
    auto sub = pair_graph(nx, ny, out.edges);
    if (!check_eps_regular_exact(sub, 0, 1, Rational(2) * eps).violated()) {
      out.verified = true;
      return out;
    }
  }
  throw Error(Errc::retries_exhausted, "no (2eps)-regular " + std::to_string(m) + "-edge subgraph in " +
                                           std::to_string(max_retries) + " attempts");
}

/// Uniform k-subset of {0..n-1} as a bitset (partial Fisher-Yates).
inline Bitset sample_subset(std::size_t n, std::size_t k, RngSpec rng) {
  if (k > n) throw Error(Errc::invalid_parameter, "subset larger than ground set");
  Bitset out(n);
  for (auto [zero, i] : sample_bipartite_exact_m(1, n, k, rng)) out.set(i);
  return out;
}

}  // namespace k4c
