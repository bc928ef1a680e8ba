#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "k4count/bitset.hpp"
#include "k4count/error.hpp"
#include "k4count/model.hpp"
#include "k4count/rational.hpp"
#include "k4count/rng.hpp"

namespace k4c {

/// Largest side size accepted by the exhaustive checkers.
inline constexpr std::size_t kExactSideLimit = 14;

enum class VerdictKind { certified_regular, witness_violation, no_witness_found };

inline const char* verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::certified_regular: return "certified-regular";
    case VerdictKind::witness_violation: return "witness-violation";
    case VerdictKind::no_witness_found: return "no-witness-found";
  }
  return "?";
}

struct Witness {
  Bitset side1;
  Bitset side2;
  Rational density;    // d(V1', V2')
  Rational reference;  // d(V1, V2) for (eps)-regularity, the target d for lower-regularity
};

struct RegularityVerdict {
  VerdictKind kind = VerdictKind::no_witness_found;
  std::optional<Witness> witness;
  std::uint64_t subsets_examined = 0;

  bool violated() const noexcept { return kind == VerdictKind::witness_violation; }
};

/// Which inequality is being tested. `lower == false`: |d' - d| <= eps d with
/// d the pair density. `lower == true`: d' >= (1 - eps) target.
struct RegularityCriterion {
  Rational epsilon;
  bool lower = false;
  Rational target;  // used only when lower

  static RegularityCriterion eps_regular(Rational eps) { return {eps, false, Rational(0)}; }
  static RegularityCriterion lower_regular(Rational eps, Rational d) { return {eps, true, d}; }
};

namespace detail {

using wide = __int128;

/// Smallest k >= 1 with k >= eps * n.
inline std::size_t min_qualifying(const Rational& eps, std::size_t n) {
  if (eps.num() <= 0) return 1;
  wide need = (wide(eps.num()) * static_cast<wide>(n) + eps.den() - 1) / eps.den();
  return static_cast<std::size_t>(std::max<wide>(need, 1));
}

/// True iff a subpair with `e` edges between sets of sizes k1, k2 violates `c`
/// in a pair of sides n1, n2 carrying m edges.
inline bool violates_counts(const RegularityCriterion& c, std::size_t n1, std::size_t n2, std::size_t m,
                            std::size_t k1, std::size_t k2, std::size_t e) {
  const wide p = c.epsilon.num(), q = c.epsilon.den();
  const wide k = static_cast<wide>(k1) * static_cast<wide>(k2);
  if (c.lower) {
    // e/k < (1 - p/q) * a/b
    return wide(e) * q * c.target.den() < (q - p) * c.target.num() * k;
  }
  const wide big_n = static_cast<wide>(n1) * static_cast<wide>(n2);
  const wide big_m = static_cast<wide>(m);
  wide diff = wide(e) * big_n - big_m * k;
  if (diff < 0) diff = -diff;
  return q * diff > p * big_m * k;
}

inline void check_subsets(const BipartiteView& view, const Bitset& s1, const Bitset& s2) {
  if (s1.size() != view.n1() || s2.size() != view.n2())
    throw Error(Errc::index_out_of_range, "subset bit vector length does not match side size");
}

inline std::size_t subpair_edges(const BipartiteView& view, const Bitset& s1, const Bitset& s2) {
  std::size_t e = 0;
  s1.for_each([&](std::size_t v) { e += view.rows[v].intersect_count(s2); });
  return e;
}

inline void require_nonempty_sides(const BipartiteView& view) {
  if (view.n1() == 0 || view.n2() == 0) throw Error(Errc::empty_side, "regularity undefined for a pair with an empty side");
}

}  // namespace detail

/// |E(sub1, sub2)| / (|sub1| |sub2|), exactly.
inline Rational density(const BipartiteView& view, const Bitset& sub1, const Bitset& sub2) {
  detail::check_subsets(view, sub1, sub2);
  auto k1 = sub1.count(), k2 = sub2.count();
  if (k1 == 0 || k2 == 0) throw Error(Errc::empty_subset, "density of an empty subset");
  return Rational(static_cast<Rational::int_type>(detail::subpair_edges(view, sub1, sub2)),
                  static_cast<Rational::int_type>(k1 * k2));
}

inline Rational density(const ClassedGraph& g, std::size_t x, std::size_t y, const Bitset& sub1, const Bitset& sub2) {
  return density(g.view(x, y), sub1, sub2);
}

/// Density of the whole pair (zero if a side is empty).
inline Rational pair_density(const BipartiteView& view) {
  auto k = view.n1() * view.n2();
  if (k == 0) return Rational(0);
  return Rational(static_cast<Rational::int_type>(view.edge_count), static_cast<Rational::int_type>(k));
}

/// Re-checks a candidate subpair from scratch: qualifying sizes and a strict
/// violation of `c`.
inline bool is_violating_subpair(const BipartiteView& view, const RegularityCriterion& c, const Bitset& s1,
                                 const Bitset& s2) {
  detail::check_subsets(view, s1, s2);
  auto k1 = s1.count(), k2 = s2.count();
  if (k1 < detail::min_qualifying(c.epsilon, view.n1()) || k2 < detail::min_qualifying(c.epsilon, view.n2()))
    return false;
  return detail::violates_counts(c, view.n1(), view.n2(), view.edge_count, k1, k2, detail::subpair_edges(view, s1, s2));
}

inline Witness make_witness(const BipartiteView& view, const RegularityCriterion& c, Bitset s1, Bitset s2) {
  Witness w{std::move(s1), std::move(s2), Rational(0), c.lower ? c.target : pair_density(view)};
  w.density = density(view, w.side1, w.side2);
  return w;
}

/// Exhaustive decision procedure for both criteria. For every qualifying
/// subset S1 of the smaller side the extreme edge counts over qualifying
/// S2 of each size k2 are attained by the k2 vertices of lowest / highest
/// degree into S1, so only 2^min(n1,n2) subsets are enumerated.
/// `subsets_examined` counts (S1, |S2|) combinations.
inline RegularityVerdict check_regular_exact(const BipartiteView& view, const RegularityCriterion& c) {
  detail::require_nonempty_sides(view);
  if (view.n1() > kExactSideLimit || view.n2() > kExactSideLimit)
    throw Error(Errc::side_too_large_for_exact, "exact check needs both sides <= " + std::to_string(kExactSideLimit) +
                                                    ", got " + std::to_string(view.n1()) + "x" + std::to_string(view.n2()));
  if (c.epsilon < Rational(0)) throw Error(Errc::invalid_parameter, "epsilon must be non-negative");

  const bool swap_sides = view.n1() > view.n2();
  const BipartiteView v = swap_sides ? view.transposed() : view;
  const std::size_t n1 = v.n1(), n2 = v.n2(), m = v.edge_count;
  const std::size_t k1_min = detail::min_qualifying(c.epsilon, n1);
  const std::size_t k2_min = detail::min_qualifying(c.epsilon, n2);

  std::vector<std::uint32_t> col_mask(n2, 0);
  for (std::size_t w = 0; w < n2; ++w)
    v.cols[w].for_each([&](std::size_t u) { col_mask[w] |= std::uint32_t{1} << u; });

  RegularityVerdict out;
  out.kind = VerdictKind::certified_regular;
  std::vector<std::size_t> deg(n2), order(n2), prefix(n2 + 1);
  for (std::uint32_t s1 = 1; s1 < (std::uint32_t{1} << n1); ++s1) {
    const auto k1 = static_cast<std::size_t>(std::popcount(s1));
    if (k1 < k1_min) continue;
    for (std::size_t w = 0; w < n2; ++w) deg[w] = static_cast<std::size_t>(std::popcount(col_mask[w] & s1));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return deg[a] < deg[b]; });
    prefix[0] = 0;
    for (std::size_t i = 0; i < n2; ++i) prefix[i + 1] = prefix[i] + deg[order[i]];
    for (std::size_t k2 = k2_min; k2 <= n2; ++k2) {
      ++out.subsets_examined;
      const std::size_t e_min = prefix[k2];
      const std::size_t e_max = prefix[n2] - prefix[n2 - k2];
      std::optional<std::pair<std::size_t, std::size_t>> hit;  // [begin, end) in `order`
      if (detail::violates_counts(c, n1, n2, m, k1, k2, e_min))
        hit.emplace(0, k2);
      else if (!c.lower && detail::violates_counts(c, n1, n2, m, k1, k2, e_max))
        hit.emplace(n2 - k2, n2);
      if (!hit) continue;
      Bitset a = Bitset::from_mask(n1, s1), b(n2);
      for (std::size_t i = hit->first; i < hit->second; ++i) b.set(order[i]);
      if (swap_sides) std::swap(a, b);
      out.kind = VerdictKind::witness_violation;
      out.witness = make_witness(view, c, std::move(a), std::move(b));
      return out;
    }
  }
  return out;
}

inline RegularityVerdict check_eps_regular_exact(const BipartiteView& view, Rational eps) {
  return check_regular_exact(view, RegularityCriterion::eps_regular(eps));
}
inline RegularityVerdict check_lower_regular_exact(const BipartiteView& view, Rational eps, Rational d) {
  return check_regular_exact(view, RegularityCriterion::lower_regular(eps, d));
}
inline RegularityVerdict check_eps_regular_exact(const ClassedGraph& g, std::size_t x, std::size_t y, Rational eps) {
  return check_eps_regular_exact(g.view(x, y), eps);
}
inline RegularityVerdict check_lower_regular_exact(const ClassedGraph& g, std::size_t x, std::size_t y, Rational eps,
                                                   Rational d) {
  return check_lower_regular_exact(g.view(x, y), eps, d);
}

namespace detail {

/// Indices of the k entries with smallest (or largest) score, ties by index.
inline Bitset extreme_k(const std::vector<std::size_t>& score, std::size_t k, bool largest) {
  std::vector<std::size_t> order(score.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return largest ? score[a] > score[b] : score[a] < score[b];
  });
  Bitset out(score.size());
  for (std::size_t i = 0; i < k; ++i) out.set(order[i]);
  return out;
}

inline Bitset random_subset(std::size_t n, std::size_t k, CounterRng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  Bitset out(n);
  for (std::size_t i = 0; i < k; ++i) out.set(idx[i]);
  return out;
}

}  // namespace detail

/// Randomized falsifier for pairs beyond exhaustive reach. Each of `budget`
/// restarts draws qualifying sizes and random subsets, then alternately
/// replaces one side by the best response to the other (the k vertices with
/// the most / fewest neighbours in the opposite subset), which is the fixed
/// point of improving single-vertex swaps on that side. Restarts in
/// (eps)-regular mode alternate between pushing density up and down; lower
/// mode always pushes down. Sound but incomplete: never certifies.
inline RegularityVerdict witness_search(const BipartiteView& view, const RegularityCriterion& c, std::uint64_t budget,
                                        RngSpec rng_spec) {
  detail::require_nonempty_sides(view);
  if (budget < 1) throw Error(Errc::invalid_parameter, "witness search budget must be >= 1");
  if (c.epsilon < Rational(0)) throw Error(Errc::invalid_parameter, "epsilon must be non-negative");
  RegularityVerdict out;
  out.kind = VerdictKind::no_witness_found;
  const std::size_t n1 = view.n1(), n2 = view.n2();
  const std::size_t k1_min = detail::min_qualifying(c.epsilon, n1);
  const std::size_t k2_min = detail::min_qualifying(c.epsilon, n2);
  if (k1_min > n1 || k2_min > n2) return out;

  CounterRng rng(rng_spec);
  std::vector<std::size_t> score1(n1), score2(n2);
  for (std::uint64_t r = 0; r < budget; ++r) {
    const bool up = !c.lower && (r % 2 == 0);
    const std::size_t k1 = rng.between(k1_min, n1);
    const std::size_t k2 = rng.between(k2_min, n2);
    Bitset s1 = detail::random_subset(n1, k1, rng);
    Bitset s2 = detail::random_subset(n2, k2, rng);
    std::size_t e = detail::subpair_edges(view, s1, s2);
    for (int iter = 0; iter < 64; ++iter) {
      ++out.subsets_examined;
      if (detail::violates_counts(c, n1, n2, view.edge_count, k1, k2, e)) {
        out.kind = VerdictKind::witness_violation;
        out.witness = make_witness(view, c, std::move(s1), std::move(s2));
        return out;
      }
      for (std::size_t w = 0; w < n2; ++w) score2[w] = view.cols[w].intersect_count(s1);
      s2 = detail::extreme_k(score2, k2, up);
      for (std::size_t v = 0; v < n1; ++v) score1[v] = view.rows[v].intersect_count(s2);
      s1 = detail::extreme_k(score1, k1, up);
      std::size_t next = detail::subpair_edges(view, s1, s2);
      if (next == e && iter > 0) {
        ++out.subsets_examined;
        if (detail::violates_counts(c, n1, n2, view.edge_count, k1, k2, next)) {
          out.kind = VerdictKind::witness_violation;
          out.witness = make_witness(view, c, std::move(s1), std::move(s2));
          return out;
        }
        break;
      }
      e = next;
    }
  }
  return out;
}

enum class CheckMode { exact, witness, automatic };

inline const char* check_mode_name(CheckMode m) {
  switch (m) {
    case CheckMode::exact: return "exact";
    case CheckMode::witness: return "witness";
    case CheckMode::automatic: return "auto";
  }
  return "?";
}

inline CheckMode parse_check_mode(const std::string& s) {
  if (s == "exact") return CheckMode::exact;
  if (s == "witness") return CheckMode::witness;
  if (s == "auto") return CheckMode::automatic;
  throw Error(Errc::invalid_parameter, "unknown check mode '" + s + "' (exact|witness|auto)");
}

inline bool exact_feasible(const BipartiteView& view) {
  return view.n1() <= kExactSideLimit && view.n2() <= kExactSideLimit;
}

/// Exact when requested (or when `automatic` and both sides fit), else witness search.
inline RegularityVerdict check_regular(const BipartiteView& view, const RegularityCriterion& c, CheckMode mode,
                                       std::uint64_t budget, RngSpec rng) {
  if (mode == CheckMode::exact || (mode == CheckMode::automatic && exact_feasible(view)))
    return check_regular_exact(view, c);
  return witness_search(view, c, budget, rng);
}

struct DegreeDeviation {
  std::size_t count_below = 0;
  std::size_t count_above = 0;
};

/// Counts side-1 vertices whose degree into `sub2` falls below (1-eps) d |sub2|
/// or above (1+eps) d |sub2|.
inline DegreeDeviation degree_deviation_report(const BipartiteView& view, Rational eps, Rational d, const Bitset& sub2) {
  if (sub2.size() != view.n2()) throw Error(Errc::index_out_of_range, "subset length does not match side 2");
  const std::size_t k = sub2.count();
  if (k == 0 || k < detail::min_qualifying(eps, view.n2()))
    throw Error(Errc::subset_too_small, "|V2'| = " + std::to_string(k) + " is below eps*|V2|");
  const detail::wide p = eps.num(), q = eps.den(), a = d.num(), b = d.den();
  DegreeDeviation out;
  for (std::size_t v = 0; v < view.n1(); ++v) {
    const detail::wide deg = static_cast<detail::wide>(view.rows[v].intersect_count(sub2));
    // deg < (q-p)/q * a/b * k   and   deg > (q+p)/q * a/b * k
    if (deg * q * b < (q - p) * a * static_cast<detail::wide>(k)) ++out.count_below;
    if (deg * q * b > (q + p) * a * static_cast<detail::wide>(k)) ++out.count_above;
  }
  return out;
}

/// Regularity parameter inherited by a sub-side of relative size >= alpha:
/// max{eps/alpha, 2 eps/(1-eps)}.
inline Rational inherited_regularity_params(Rational eps, Rational alpha) {
  if (!(Rational(0) < eps)) throw Error(Errc::invalid_parameter, "epsilon must be positive");
  if (eps >= alpha) throw Error(Errc::parameter_order_violation, "need eps < alpha, got eps=" + eps.str() + " alpha=" + alpha.str());
  if (alpha > Rational(1)) throw Error(Errc::invalid_parameter, "alpha must be <= 1");
  return std::max(eps / alpha, Rational(2) * eps / (Rational(1) - eps));
}

}  // namespace k4c
