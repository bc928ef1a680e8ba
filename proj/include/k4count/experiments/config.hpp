#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "k4count/counting.hpp"
#include "k4count/error.hpp"
#include "k4count/graph_io.hpp"
#include "k4count/model.hpp"
#include "k4count/rational.hpp"
#include "k4count/regularity.hpp"

namespace k4c::exp {

using json = nlohmann::ordered_json;

enum class Kind { counting, aux_regularity, heredity, neighborhood, extraction };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::counting: return "counting";
    case Kind::aux_regularity: return "aux-regularity";
    case Kind::heredity: return "heredity";
    case Kind::neighborhood: return "neighborhood";
    case Kind::extraction: return "extraction";
  }
  return "?";
}

inline Kind parse_kind(const std::string& s) {
  for (auto k : {Kind::counting, Kind::aux_regularity, Kind::heredity, Kind::neighborhood, Kind::extraction})
    if (s == kind_name(k)) return k;
  throw Error(Errc::config_error, "unknown experiment kind '" + s + "'");
}

/// Screening policy for regularity checks inside trials. `none` skips the
/// check and leaves accepted_regular empty.
enum class Screen { none, exact, witness, automatic };

/// One point of the parameter grid. Fields that a kind does not use stay unset.
struct Cell {
  std::size_t id = 0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::optional<Rational> epsilon, epsilon_prime, delta, d2, d_prime;
  std::optional<std::size_t> q;
  bool skipped = false;
  std::string skip_reason;
};

struct ExperimentConfig {
  Kind kind = Kind::counting;
  PatternGraph pattern;
  std::string pattern_label;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string output;
  bool timing = true;
  bool scatter = false;
  std::uint64_t witness_budget = 16;
  Screen screen = Screen::automatic;
  std::size_t max_rejects = 1;
  std::optional<Rational> beta;
  Rational c = Rational(1);

  // grids
  std::vector<std::size_t> n;
  std::vector<std::size_t> m;
  std::vector<Rational> m_threshold_multiples;
  std::vector<Rational> m_fraction;
  std::vector<Rational> epsilon, epsilon_prime, delta, d2, d_prime;
  std::vector<std::size_t> q;

  // scalars for the unequal-class kinds
  std::size_t n1 = 0, n2 = 0, n3 = 0;
  std::optional<Rational> d, d1;
  std::string g1 = "complete";  // complete | sampled | file
  std::string g1_file;
  bool lower_mode = true;  // heredity: lower-regular (true) or (eps)-regular
  bool relaxation = true;  // heredity regular mode: Q tested directly instead of its large sub-subsets
  std::string source = "complete";  // extraction: complete | sampled

  json echo;  // the document as read
};

namespace detail {

inline Rational json_rational(const json& v, const std::string& key) {
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_string()) {
    try {
      return Rational::parse(v.get<std::string>());
    } catch (const Error& e) {
      throw Error(Errc::config_error, key + ": " + e.what());
    }
  }
  throw Error(Errc::config_error, key + ": expected an integer or a \"p/q\" string (decimals are not accepted)");
}

inline std::vector<Rational> json_rationals(const json& v, const std::string& key) {
  std::vector<Rational> out;
  if (!v.is_array()) return {json_rational(v, key)};
  for (const auto& x : v) out.push_back(json_rational(x, key));
  return out;
}

inline std::size_t json_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
    throw Error(Errc::config_error, key + ": expected a non-negative integer");
  return v.get<std::size_t>();
}

inline std::vector<std::size_t> json_counts(const json& v, const std::string& key) {
  if (!v.is_array()) return {json_count(v, key)};
  std::vector<std::size_t> out;
  for (const auto& x : v) out.push_back(json_count(x, key));
  return out;
}

inline bool json_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw Error(Errc::config_error, key + ": expected true or false");
  return v.get<bool>();
}

inline std::string json_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw Error(Errc::config_error, key + ": expected a string");
  return v.get<std::string>();
}

inline void require_open_unit(const std::vector<Rational>& xs, const std::string& key) {
  for (auto x : xs)
    if (!(Rational(0) < x && x < Rational(1))) throw Error(Errc::config_error, key + " must lie in (0,1), got " + x.str());
}

inline void require_unit(const std::vector<Rational>& xs, const std::string& key) {
  for (auto x : xs)
    if (!(Rational(0) < x && x <= Rational(1))) throw Error(Errc::config_error, key + " must lie in (0,1], got " + x.str());
}

inline std::size_t round_half_up(Rational x) {
  // floor(x + 1/2) for x >= 0
  auto y = x + Rational(1, 2);
  return static_cast<std::size_t>(y.num() / y.den());
}

}  // namespace detail

/// Parses and validates a config document. `base_dir` resolves relative file paths.
inline ExperimentConfig parse_config(const json& doc, const std::string& base_dir = "") {
  if (!doc.is_object()) throw Error(Errc::config_error, "config must be a JSON object");
  static const std::set<std::string> known = {
      "kind", "pattern", "pattern_file", "trials", "seed", "workers", "output", "timing", "scatter",
      "witness_budget", "screen", "max_rejects", "beta", "C", "n", "m", "m_threshold_multiples", "m_fraction",
      "epsilon", "epsilon_prime", "delta", "d2", "d_prime", "q", "n1", "n2", "n3", "d", "d1", "g1", "g1_file",
      "mode", "relaxation", "source", "description"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known.contains(it.key())) throw Error(Errc::config_error, "unknown config key '" + it.key() + "'");
  if (!doc.contains("kind")) throw Error(Errc::config_error, "missing 'kind'");

  using namespace detail;
  auto resolve = [&](const std::string& p) { return p.empty() || p[0] == '/' || base_dir.empty() ? p : base_dir + "/" + p; };

  ExperimentConfig c;
  c.echo = doc;
  c.kind = parse_kind(json_string(doc["kind"], "kind"));
  if (doc.contains("pattern_file")) {
    c.pattern_label = json_string(doc["pattern_file"], "pattern_file");
    c.pattern = load_pattern(resolve(c.pattern_label));
  } else {
    c.pattern_label = doc.contains("pattern") ? json_string(doc["pattern"], "pattern") : "K3";
    auto p = PatternGraph::from_name(c.pattern_label);
    if (!p) throw Error(Errc::config_error, "unknown pattern '" + c.pattern_label + "'");
    c.pattern = *p;
  }
  if (doc.contains("trials")) c.trials = json_count(doc["trials"], "trials");
  if (c.trials < 1) throw Error(Errc::config_error, "trials must be >= 1");
  if (doc.contains("seed")) c.seed = doc["seed"].is_number_unsigned() ? doc["seed"].get<std::uint64_t>() : json_count(doc["seed"], "seed");
  if (doc.contains("workers")) c.workers = json_count(doc["workers"], "workers");
  if (c.workers < 1) throw Error(Errc::config_error, "workers must be >= 1");
  if (doc.contains("output")) c.output = json_string(doc["output"], "output");
  if (doc.contains("timing")) c.timing = json_bool(doc["timing"], "timing");
  if (doc.contains("scatter")) c.scatter = json_bool(doc["scatter"], "scatter");
  if (doc.contains("witness_budget")) c.witness_budget = json_count(doc["witness_budget"], "witness_budget");
  if (c.witness_budget < 1) throw Error(Errc::config_error, "witness_budget must be >= 1");
  if (doc.contains("screen")) {
    auto s = json_string(doc["screen"], "screen");
    if (s == "none") c.screen = Screen::none;
    else if (s == "exact") c.screen = Screen::exact;
    else if (s == "witness") c.screen = Screen::witness;
    else if (s == "auto") c.screen = Screen::automatic;
    else throw Error(Errc::config_error, "screen must be none|exact|witness|auto");
  }
  if (doc.contains("max_rejects")) c.max_rejects = json_count(doc["max_rejects"], "max_rejects");
  if (c.max_rejects < 1) throw Error(Errc::config_error, "max_rejects must be >= 1");
  if (doc.contains("beta")) {
    c.beta = json_rational(doc["beta"], "beta");
    require_open_unit({*c.beta}, "beta");
  }
  if (doc.contains("C")) c.c = json_rational(doc["C"], "C");
  if (c.c < Rational(0)) throw Error(Errc::config_error, "C must be non-negative");

  if (doc.contains("n")) c.n = json_counts(doc["n"], "n");
  if (doc.contains("m")) c.m = json_counts(doc["m"], "m");
  if (doc.contains("m_threshold_multiples"))
    c.m_threshold_multiples = json_rationals(doc["m_threshold_multiples"], "m_threshold_multiples");
  if (doc.contains("m_fraction")) c.m_fraction = json_rationals(doc["m_fraction"], "m_fraction");
  if (doc.contains("epsilon")) c.epsilon = json_rationals(doc["epsilon"], "epsilon");
  if (doc.contains("epsilon_prime")) c.epsilon_prime = json_rationals(doc["epsilon_prime"], "epsilon_prime");
  if (doc.contains("delta")) c.delta = json_rationals(doc["delta"], "delta");
  if (doc.contains("d2")) c.d2 = json_rationals(doc["d2"], "d2");
  if (doc.contains("d_prime")) c.d_prime = json_rationals(doc["d_prime"], "d_prime");
  if (doc.contains("q")) c.q = json_counts(doc["q"], "q");
  if (doc.contains("n1")) c.n1 = json_count(doc["n1"], "n1");
  if (doc.contains("n2")) c.n2 = json_count(doc["n2"], "n2");
  if (doc.contains("n3")) c.n3 = json_count(doc["n3"], "n3");
  if (doc.contains("d")) c.d = json_rational(doc["d"], "d");
  if (doc.contains("d1")) c.d1 = json_rational(doc["d1"], "d1");
  if (doc.contains("g1")) c.g1 = json_string(doc["g1"], "g1");
  if (doc.contains("g1_file")) c.g1_file = resolve(json_string(doc["g1_file"], "g1_file"));
  if (doc.contains("mode")) {
    auto s = json_string(doc["mode"], "mode");
    if (s != "lower" && s != "regular") throw Error(Errc::config_error, "mode must be lower|regular");
    c.lower_mode = s == "lower";
  }
  if (doc.contains("relaxation")) c.relaxation = json_bool(doc["relaxation"], "relaxation");
  if (doc.contains("source")) c.source = json_string(doc["source"], "source");

  require_open_unit(c.epsilon, "epsilon");
  require_open_unit(c.epsilon_prime, "epsilon_prime");
  require_open_unit(c.delta, "delta");
  require_unit(c.d2, "d2");
  require_unit(c.d_prime, "d_prime");
  require_unit(c.m_fraction, "m_fraction");
  if (c.d) require_unit({*c.d}, "d");
  if (c.d1) require_unit({*c.d1}, "d1");
  int m_forms = !c.m.empty() + !c.m_threshold_multiples.empty() + !c.m_fraction.empty();
  if (m_forms > 1) throw Error(Errc::config_error, "give only one of m, m_threshold_multiples, m_fraction");

  auto need = [&](bool ok, const std::string& what) {
    if (!ok) throw Error(Errc::config_error, std::string(kind_name(c.kind)) + " experiment needs " + what);
  };
  switch (c.kind) {
    case Kind::counting:
      need(!c.n.empty(), "a nonempty 'n' grid");
      need(m_forms == 1, "one of m, m_threshold_multiples, m_fraction");
      need(!c.delta.empty(), "a nonempty 'delta' grid");
      if (c.epsilon.empty()) c.epsilon = {Rational(1, 2)};
      break;
    case Kind::aux_regularity:
      need(c.n1 > 0 && c.n2 > 0 && c.n3 > 0, "positive n1, n2, n3");
      need(c.d1.has_value(), "'d1'");
      need(!c.d2.empty(), "a nonempty 'd2' grid");
      need(!c.epsilon_prime.empty(), "a nonempty 'epsilon_prime' grid");
      if (c.g1 != "complete" && c.g1 != "sampled" && c.g1 != "file")
        throw Error(Errc::config_error, "g1 must be complete|sampled|file");
      need(c.g1 != "file" || !c.g1_file.empty(), "'g1_file' when g1 = file");
      if (c.epsilon.empty()) c.epsilon = c.epsilon_prime;
      break;
    case Kind::heredity:
      need(c.n1 > 0 && c.n2 > 0, "positive n1, n2");
      need(c.d.has_value(), "'d'");
      need(!c.q.empty(), "a nonempty 'q' grid");
      need(!c.epsilon_prime.empty(), "a nonempty 'epsilon_prime' grid");
      for (auto q : c.q) {
        if (q == 0) throw Error(Errc::config_error, "q must be >= 1");
        if (q > c.n1) throw Error(Errc::q_too_large, "q = " + std::to_string(q) + " exceeds n1 = " + std::to_string(c.n1));
      }
      if (c.epsilon.empty()) c.epsilon = c.epsilon_prime;
      break;
    case Kind::neighborhood:
      need(c.pattern == PatternGraph::k4_minus_e(), "pattern K4e");
      need(!c.n.empty(), "a nonempty 'n' grid");
      need(m_forms == 1, "one of m, m_threshold_multiples, m_fraction");
      need(!c.epsilon_prime.empty(), "a nonempty 'epsilon_prime' grid");
      need(!c.delta.empty(), "a nonempty 'delta' grid");
      if (c.epsilon.empty()) c.epsilon = c.epsilon_prime;
      break;
    case Kind::extraction:
      need(!c.n.empty(), "a nonempty 'n' grid");
      need(m_forms == 1, "one of m, m_threshold_multiples, m_fraction");
      need(!c.epsilon.empty(), "a nonempty 'epsilon' grid");
      if (c.source != "complete" && c.source != "sampled") throw Error(Errc::config_error, "source must be complete|sampled");
      need(c.source != "sampled" || c.d.has_value(), "'d' when source = sampled");
      break;
  }
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  auto text = read_text_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::config_error, path + ": " + e.what());
  }
  auto slash = path.find_last_of('/');
  return parse_config(doc, slash == std::string::npos ? "" : path.substr(0, slash));
}

/// m values for one n. `pair_cells` is n_x * n_y for the pair being sampled.
inline std::vector<std::size_t> m_grid(const ExperimentConfig& c, std::size_t n, std::size_t pair_cells) {
  std::vector<std::size_t> out;
  if (!c.m.empty()) out = c.m;
  for (auto f : c.m_fraction) out.push_back(detail::round_half_up(f * Rational(static_cast<std::int64_t>(pair_cells))));
  if (!c.m_threshold_multiples.empty()) {
    auto t = edge_threshold(c.pattern, n, c.c);
    for (auto k : c.m_threshold_multiples) {
      auto v = ceil(k.to_big() * BigRational(t));
      out.push_back(static_cast<std::size_t>(v));
    }
  }
  for (auto m : out)
    if (m > pair_cells)
      throw Error(Errc::config_error, "m = " + std::to_string(m) + " exceeds the " + std::to_string(pair_cells) + " cells of a pair");
  return out;
}

/// Cartesian product of the kind's grids, in a fixed nesting order.
inline std::vector<Cell> expand_cells(const ExperimentConfig& c) {
  std::vector<Cell> cells;
  auto push = [&](Cell cell) {
    cell.id = cells.size();
    cells.push_back(std::move(cell));
  };
  switch (c.kind) {
    case Kind::counting:
      for (auto n : c.n)
        for (auto m : m_grid(c, n, n * n))
          for (auto eps : c.epsilon)
            for (auto delta : c.delta) {
              Cell cell;
              cell.n = n, cell.m = m, cell.epsilon = eps, cell.delta = delta;
              push(cell);
            }
      break;
    case Kind::aux_regularity:
      for (auto d2 : c.d2)
        for (auto ep : c.epsilon_prime) {
          Cell cell;
          cell.n = c.n1;
          cell.m = detail::round_half_up(d2 * Rational(static_cast<std::int64_t>(c.n1 * c.n3)));
          cell.d2 = d2, cell.epsilon_prime = ep;
          cell.epsilon = c.epsilon.front();
          if (cell.m == 0) throw Error(Errc::config_error, "d2 = " + d2.str() + " gives m2 = 0");
          push(cell);
        }
      break;
    case Kind::heredity:
      for (auto q : c.q)
        for (auto ep : c.epsilon_prime) {
          Cell cell;
          cell.n = c.n1;
          cell.m = detail::round_half_up(*c.d * Rational(static_cast<std::int64_t>(c.n1 * c.n2)));
          cell.q = q, cell.epsilon_prime = ep, cell.epsilon = c.epsilon.front();
          push(cell);
        }
      break;
    case Kind::neighborhood: {
      std::vector<Rational> dps = c.d_prime;
      for (auto n : c.n)
        for (auto m : m_grid(c, n, n * n))
          for (auto ep : c.epsilon_prime)
            for (auto delta : c.delta) {
              std::vector<Rational> grid = dps;
              if (grid.empty()) grid.push_back((Rational(1) - ep) * Rational(static_cast<std::int64_t>(m), static_cast<std::int64_t>(n * n)));
              for (auto dp : grid) {
                Cell cell;
                cell.n = n, cell.m = m, cell.epsilon_prime = ep, cell.delta = delta, cell.d_prime = dp;
                cell.epsilon = c.epsilon.front();
                push(cell);
              }
            }
      break;
    }
    case Kind::extraction:
      for (auto n : c.n)
        for (auto m : m_grid(c, n, n * n))
          for (auto eps : c.epsilon) {
            Cell cell;
            cell.n = n, cell.m = m, cell.epsilon = eps;
            if (BigRational(BigInt(m)) < c.c.to_big() * BigRational(BigInt(2 * n))) {
              cell.skipped = true;
              cell.skip_reason = "m below C*(n_x+n_y)";
            }
            push(cell);
          }
      break;
  }
  return cells;
}

}  // namespace k4c::exp
