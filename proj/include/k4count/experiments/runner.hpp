#pragma once

#include <chrono>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "k4count/auxgraph.hpp"
#include "k4count/counting.hpp"
#include "k4count/experiments/config.hpp"
#include "k4count/graph_io.hpp"
#include "k4count/regularity.hpp"
#include "k4count/rng.hpp"
#include "k4count/sampling.hpp"

namespace k4c::exp {

/// One row of trials.csv. Optional fields are written as empty cells.
struct TrialRecord {
  Kind kind = Kind::counting;
  std::size_t cell_id = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::optional<Rational> epsilon, epsilon_prime, delta;
  std::size_t trial_index = 0;
  std::uint64_t derived_seed = 0;
  std::optional<bool> accepted_regular;
  std::optional<AcceptanceMode> acceptance_mode;
  std::optional<BigInt> copy_count;
  std::optional<BigRational> expected_count;
  bool bad_flag = false;
  std::optional<std::size_t> good_vertex_count;
  std::string verdict_kind;
  std::size_t retries = 0;
  double wall_ms = 0;
};

/// Graphs fixed once per run from fixture_seed(base_seed) and shared by all trials.
struct Fixtures {
  std::optional<ClassedGraph> aux_g1;           // pair (X1, X2)
  std::optional<ClassedGraph> heredity_pair;    // pair (V1, V2)
  std::vector<std::optional<ClassedGraph>> extraction_source;  // per cell
  json info = json::object();
};

inline CheckMode check_mode_for(Screen s) {
  switch (s) {
    case Screen::exact: return CheckMode::exact;
    case Screen::witness: return CheckMode::witness;
    default: return CheckMode::automatic;
  }
}

/// Trial stream: graph draws use child(0), checks use later children.
inline RngSpec trial_rng(const ExperimentConfig& c, const Cell& cell, std::size_t trial) {
  return RngSpec{trial_seed(c.seed, cell.id, trial), 0};
}

namespace detail {

inline std::size_t scaled(Rational d, std::size_t cells) {
  return round_half_up(d * Rational(static_cast<std::int64_t>(cells)));
}

// Draws pairs until `accept` holds; attempt t uses rng.child(t).
template <class Accept>
ClassedGraph sample_pair_until(std::size_t n1, std::size_t n2, std::size_t m, RngSpec rng, std::size_t max_attempts,
                               Accept&& accept, std::size_t& attempts) {
  for (std::size_t t = 0; t < max_attempts; ++t) {
    attempts = t + 1;
    auto g = pair_graph(n1, n2, sample_bipartite_exact_m(n1, n2, m, rng.child(t)));
    if (accept(g)) return g;
  }
  throw Error(Errc::rejection_exhausted, "fixture pair not accepted after " + std::to_string(max_attempts) + " draws");
}

inline constexpr std::size_t kFixtureAttempts = 10000;

}  // namespace detail

inline Fixtures prepare_fixtures(const ExperimentConfig& c, const std::vector<Cell>& cells) {
  Fixtures f;
  const RngSpec base{fixture_seed(c.seed), 0};
  const auto mode = check_mode_for(c.screen);
  switch (c.kind) {
    case Kind::aux_regularity: {
      const auto m1 = detail::scaled(*c.d1, c.n1 * c.n2);
      std::size_t attempts = 0;
      if (c.g1 == "complete") {
        std::vector<VertexPair> e;
        for (std::size_t a = 0; a < c.n1; ++a)
          for (std::size_t b = 0; b < c.n2; ++b) e.emplace_back(a, b);
        f.aux_g1 = pair_graph(c.n1, c.n2, e);
      } else if (c.g1 == "file") {
        auto g = load_graph(c.g1_file);
        if (g.class_count() != 2 || g.size(0) != c.n1 || g.size(1) != c.n2)
          throw Error(Errc::config_error, "g1_file must hold a 2-class graph of sizes n1, n2");
        f.aux_g1 = g;
      } else {
        const auto eps = c.epsilon.front();
        f.aux_g1 = detail::sample_pair_until(c.n1, c.n2, m1, base, detail::kFixtureAttempts, [&](const ClassedGraph& g) {
          return !check_regular(g.view(0, 1), RegularityCriterion::lower_regular(eps, *c.d1), mode, c.witness_budget,
                                base.child(kCheckStreamBase))
                      .violated();
        }, attempts);
      }
      f.info = {{"g1", c.g1}, {"g1_edges", f.aux_g1->edge_count(0, 1)}, {"g1_attempts", attempts}};
      break;
    }
    case Kind::heredity: {
      const auto m = detail::scaled(*c.d, c.n1 * c.n2);
      const auto eps = c.epsilon.front();
      const auto crit = c.lower_mode ? RegularityCriterion::lower_regular(eps, *c.d) : RegularityCriterion::eps_regular(eps);
      std::size_t attempts = 0;
      f.heredity_pair = detail::sample_pair_until(c.n1, c.n2, m, base, detail::kFixtureAttempts, [&](const ClassedGraph& g) {
        return !check_regular(g.view(0, 1), crit, mode, c.witness_budget, base.child(kCheckStreamBase)).violated();
      }, attempts);
      f.info = {{"pair_edges", m}, {"pair_attempts", attempts}, {"mode", c.lower_mode ? "lower" : "regular"},
                {"relaxation", c.lower_mode ? false : c.relaxation}};
      break;
    }
    case Kind::extraction: {
      f.extraction_source.resize(cells.size());
      json per_cell = json::array();
      for (const auto& cell : cells) {
        const auto n = cell.n;
        std::size_t attempts = 0;
        if (c.source == "complete") {
          std::vector<VertexPair> e;
          for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) e.emplace_back(a, b);
          f.extraction_source[cell.id] = pair_graph(n, n, e);
        } else {
          const RngSpec rng{fixture_seed(c.seed), 1 + cell.id};
          const auto eps = *cell.epsilon;
          f.extraction_source[cell.id] = detail::sample_pair_until(
              n, n, detail::scaled(*c.d, n * n), rng, detail::kFixtureAttempts,
              [&](const ClassedGraph& g) {
                return !check_regular(g.view(0, 1), RegularityCriterion::eps_regular(eps), mode, c.witness_budget,
                                      rng.child(kCheckStreamBase))
                            .violated();
              },
              attempts);
        }
        per_cell.push_back({{"cell_id", cell.id}, {"source_edges", f.extraction_source[cell.id]->edge_count(0, 1)},
                            {"attempts", attempts}});
      }
      f.info = {{"source", c.source}, {"cells", per_cell}};
      break;
    }
    default:
      break;
  }
  return f;
}

namespace detail {

inline void run_counting(const ExperimentConfig& c, const Cell& cell, RngSpec rng, TrialRecord& r) {
  const auto& h = c.pattern;
  ClassedGraph g;
  if (c.screen == Screen::none) {
    g = sample_blowup_uniform(h, cell.n, cell.m, rng.child(0));
  } else {
    auto s = try_sample_regular_blowup(h, std::vector<std::size_t>(h.ell(), cell.n),
                                       std::vector<std::size_t>(h.edge_count(), cell.m), *cell.epsilon,
                                       check_mode_for(c.screen), c.max_rejects, rng, c.witness_budget);
    g = std::move(s.graph);
    r.accepted_regular = s.accepted;
    r.acceptance_mode = s.mode;
    r.retries = s.rejects;
  }
  r.copy_count = count_canonical(g, h).total;
  r.expected_count = expected_count_uniform(h, cell.n, cell.m);
  r.bad_flag = BigRational(*r.copy_count) < (BigRational(1) - cell.delta->to_big()) * *r.expected_count;
  r.verdict_kind = r.accepted_regular ? (*r.accepted_regular ? "accepted" : "rejected") : "";
}

inline void run_aux(const ExperimentConfig& c, const Cell& cell, const Fixtures& f, RngSpec rng, TrialRecord& r) {
  const auto m2 = cell.m;
  PatternGraph path(3, {{0, 1}, {0, 2}});
  auto g2 = sample_bipartite_exact_m(c.n1, c.n3, m2, rng.child(0));
  auto g = build_classed_graph(path, {c.n1, c.n2, c.n3}, {{0, 1, f.aux_g1->edges(0, 1)}, {0, 2, g2}});
  const auto mode = check_mode_for(c.screen);
  if (c.screen != Screen::none) {
    auto v = check_regular(g.view(0, 2), RegularityCriterion::lower_regular(*cell.epsilon, *cell.d2), mode,
                           c.witness_budget, rng.child(1));
    r.accepted_regular = !v.violated();
    r.acceptance_mode = v.kind == VerdictKind::certified_regular ? AcceptanceMode::certified : AcceptanceMode::heuristic;
  }
  auto a = build_path_aux(g, 0, 1, 2);
  const Rational target = *c.d1 * *cell.d2;
  auto v = aux_lower_regularity(a, *cell.epsilon_prime, target, mode, c.witness_budget, rng.child(2));
  r.copy_count = BigInt(a.edge_count());
  r.expected_count = target.to_big() * BigRational(BigInt(c.n1 * c.n2 * c.n3));
  r.bad_flag = v.violated();
  r.verdict_kind = verdict_name(v.kind);
}

inline void run_heredity(const ExperimentConfig& c, const Cell& cell, const Fixtures& f, RngSpec rng, TrialRecord& r) {
  const auto& pair = *f.heredity_pair;
  auto q = sample_subset(c.n1, *cell.q, rng.child(0));
  std::vector<std::size_t> rows = q.indices();
  std::vector<VertexPair> e;
  for (std::size_t i = 0; i < rows.size(); ++i)
    pair.neighbors(0, rows[i], 1).for_each([&](std::size_t w) { e.emplace_back(i, w); });
  auto sub = pair_graph(rows.size(), c.n2, e);
  auto crit = c.lower_mode ? RegularityCriterion::lower_regular(*cell.epsilon_prime, *c.d)
                           : RegularityCriterion::eps_regular(*cell.epsilon_prime);
  auto v = check_regular(sub.view(0, 1), crit, check_mode_for(c.screen), c.witness_budget, rng.child(1));
  r.bad_flag = v.violated();
  r.verdict_kind = verdict_name(v.kind);
}

inline void run_neighborhood(const ExperimentConfig& c, const Cell& cell, RngSpec rng, TrialRecord& r) {
  const auto h = PatternGraph::k4_minus_e();
  const auto mode = check_mode_for(c.screen);
  ClassedGraph g;
  if (c.screen == Screen::none) {
    g = sample_blowup_uniform(h, cell.n, cell.m, rng.child(0));
  } else {
    auto s = try_sample_regular_blowup(h, std::vector<std::size_t>(4, cell.n), std::vector<std::size_t>(5, cell.m),
                                       *cell.epsilon, mode, c.max_rejects, rng, c.witness_budget);
    g = std::move(s.graph);
    r.accepted_regular = s.accepted;
    r.acceptance_mode = s.mode;
    r.retries = s.rejects;
  }
  const Rational ep = *cell.epsilon_prime, dp = *cell.d_prime;
  const Rational min_size = (Rational(1) - ep) * Rational(static_cast<std::int64_t>(cell.m), static_cast<std::int64_t>(cell.n));
  std::size_t good = 0;
  for (std::size_t v = 0; v < cell.n; ++v) {
    auto res = neighborhood_restriction(g, 0, v, {1}, {2, 3});
    const auto& rg = res.graph;
    if (Rational(static_cast<std::int64_t>(rg.size(1))) < min_size || Rational(static_cast<std::int64_t>(rg.size(2))) < min_size)
      continue;
    auto screen = screen_pairs(rg, ep, mode, c.witness_budget, rng.child(1 + v), true, dp);
    if (!screen.accepted) continue;
    if (bad_family_B3(rg, *cell.delta, DensityMatrix(3, dp))) continue;
    ++good;
  }
  r.good_vertex_count = good;
  r.bad_flag = Rational(static_cast<std::int64_t>(good)) < (Rational(1) - ep) * Rational(static_cast<std::int64_t>(cell.n));
  r.verdict_kind = r.bad_flag ? "few-good" : "enough-good";
}

inline void run_extraction(const ExperimentConfig& c, const Cell& cell, const Fixtures& f, RngSpec rng, TrialRecord& r) {
  const auto& src = *f.extraction_source[cell.id];
  ExtractOptions opt;
  opt.c = c.c;
  opt.verify = false;
  auto ex = extract_m_subgraph(src, 0, 1, cell.m, *cell.epsilon, 1, rng.child(0), opt);
  auto sub = pair_graph(src.size(0), src.size(1), ex.edges);
  auto v = check_regular(sub.view(0, 1), RegularityCriterion::eps_regular(Rational(2) * *cell.epsilon),
                         check_mode_for(c.screen), c.witness_budget, rng.child(1));
  r.bad_flag = v.violated();
  r.verdict_kind = verdict_name(v.kind);
  r.retries = ex.attempts - 1;
}

}  // namespace detail

/// Runs trial `trial` of `cell`. Pure given (config, fixtures, cell, trial).
inline TrialRecord run_trial(const ExperimentConfig& c, const Fixtures& f, const Cell& cell, std::size_t trial) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord r;
  r.kind = c.kind;
  r.cell_id = cell.id;
  r.n = cell.n;
  r.m = cell.m;
  r.epsilon = cell.epsilon;
  r.epsilon_prime = cell.epsilon_prime;
  r.delta = cell.delta;
  r.trial_index = trial;
  const auto rng = trial_rng(c, cell, trial);
  r.derived_seed = rng.base_seed;
  switch (c.kind) {
    case Kind::counting: detail::run_counting(c, cell, rng, r); break;
    case Kind::aux_regularity: detail::run_aux(c, cell, f, rng, r); break;
    case Kind::heredity: detail::run_heredity(c, cell, f, rng, r); break;
    case Kind::neighborhood: detail::run_neighborhood(c, cell, rng, r); break;
    case Kind::extraction: detail::run_extraction(c, cell, f, rng, r); break;
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<Cell> cells;
  Fixtures fixtures;
  std::vector<TrialRecord> records;  // cell-major, then trial index
  double total_wall_ms = 0;
};

/// Runs every non-skipped cell. Work is dealt to `workers` threads by index and
/// merged in (cell, trial) order, so output does not depend on the worker count.
inline ExperimentResult run_experiment(const ExperimentConfig& c, std::optional<std::size_t> workers = std::nullopt) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult out;
  out.config = c;
  out.cells = expand_cells(c);
  out.fixtures = prepare_fixtures(c, out.cells);
  if (c.kind == Kind::extraction)
    for (auto& cell : out.cells)
      if (!cell.skipped && cell.m > out.fixtures.extraction_source[cell.id]->edge_count(0, 1)) {
        cell.skipped = true;
        cell.skip_reason = "m above the source pair's edge count";
      }

  std::vector<std::pair<std::size_t, std::size_t>> work;
  for (const auto& cell : out.cells)
    if (!cell.skipped)
      for (std::size_t t = 0; t < c.trials; ++t) work.emplace_back(cell.id, t);
  out.records.resize(work.size());

  const std::size_t w = std::max<std::size_t>(1, std::min(workers.value_or(c.workers), std::max<std::size_t>(work.size(), 1)));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&](std::size_t id) {
    try {
      for (std::size_t i = id; i < work.size(); i += w)
        out.records[i] = run_trial(c, out.fixtures, out.cells[work[i].first], work[i].second);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (w == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t id = 0; id < w; ++id) pool.emplace_back(body, id);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  out.total_wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace k4c::exp
