#pragma once

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "k4count/experiments/config.hpp"
#include "k4count/experiments/runner.hpp"
#include "k4count/graph_io.hpp"
#include "k4count/rng.hpp"
#include "k4count/version.hpp"

namespace k4c::exp {

inline constexpr double kWilsonZ = 1.959963984540054;

struct Interval {
  double low = 0;
  double high = 1;
};

/// Wilson score interval at 95%. Zero trials give [0, 1].
inline Interval wilson(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {};
  const double n = static_cast<double>(trials), p = static_cast<double>(successes) / n, z2 = kWilsonZ * kWilsonZ;
  const double denom = 1 + z2 / n;
  const double centre = (p + z2 / (2 * n)) / denom;
  const double half = kWilsonZ * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

inline json fraction_json(std::size_t successes, std::size_t trials) {
  auto ci = wilson(successes, trials);
  return {{"value", trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0},
          {"successes", successes},
          {"trials", trials},
          {"wilson_low", ci.low},
          {"wilson_high", ci.high}};
}

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "experiment_kind", "cell_id", "n", "m", "epsilon", "epsilon_prime", "delta", "trial_index", "derived_seed",
      "accepted_regular", "acceptance_mode", "copy_count", "expected_count", "bad_flag", "good_vertex_count",
      "verdict_kind", "retries", "wall_ms"};
  return cols;
}

inline std::string trials_csv(const std::vector<TrialRecord>& records, bool timing) {
  std::ostringstream out;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  auto opt = [](const std::optional<Rational>& r) { return r ? r->str() : std::string(); };
  for (const auto& r : records) {
    out << kind_name(r.kind) << ',' << r.cell_id << ',' << r.n << ',' << r.m << ',' << opt(r.epsilon) << ','
        << opt(r.epsilon_prime) << ',' << opt(r.delta) << ',' << r.trial_index << ',' << r.derived_seed << ','
        << (r.accepted_regular ? (*r.accepted_regular ? "true" : "false") : "") << ','
        << (r.acceptance_mode ? acceptance_name(*r.acceptance_mode) : "") << ','
        << (r.copy_count ? r.copy_count->str() : "") << ',' << (r.expected_count ? to_string(*r.expected_count) : "")
        << ',' << (r.bad_flag ? "true" : "false") << ','
        << (r.good_vertex_count ? std::to_string(*r.good_vertex_count) : "") << ',' << r.verdict_kind << ','
        << r.retries << ',';
    if (timing) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

namespace detail {

inline json cell_params(const ExperimentConfig& c, const Cell& cell) {
  json p = {{"n", cell.n}, {"m", cell.m}};
  auto put = [&](const char* k, const std::optional<Rational>& v) {
    if (v) p[k] = v->str();
  };
  put("epsilon", cell.epsilon);
  put("epsilon_prime", cell.epsilon_prime);
  put("delta", cell.delta);
  put("d2", cell.d2);
  put("d_prime", cell.d_prime);
  if (cell.q) p["q"] = *cell.q;
  if (c.kind == Kind::aux_regularity) {
    p["n1"] = c.n1, p["n2"] = c.n2, p["n3"] = c.n3, p["d1"] = c.d1->str();
    p["target"] = (*c.d1 * *cell.d2).str();
  }
  if (c.kind == Kind::heredity) p["n1"] = c.n1, p["n2"] = c.n2, p["d"] = c.d->str();
  return p;
}

// Name of the failure-type fraction used for the cell-level interval and beta bookkeeping.
inline const char* primary_fraction(Kind k) {
  switch (k) {
    case Kind::counting: return "bad";
    case Kind::aux_regularity: return "failure";
    case Kind::heredity: return "failure";
    case Kind::neighborhood: return "failure";
    case Kind::extraction: return "failure";
  }
  return "bad";
}

inline json cell_summary(const ExperimentConfig& c, const Cell& cell, const std::vector<const TrialRecord*>& rs) {
  json s = {{"cell_id", cell.id}, {"params", cell_params(c, cell)}, {"trials", rs.size()}};
  if (cell.skipped) {
    s["skipped"] = true;
    s["skip_reason"] = cell.skip_reason;
  }
  const std::size_t t = rs.size();
  std::size_t bad = 0, accepted = 0, screened = 0, bad_accepted = 0, certified = 0;
  for (const auto* r : rs) {
    bad += r->bad_flag;
    if (r->accepted_regular) {
      ++screened;
      accepted += *r->accepted_regular;
      bad_accepted += *r->accepted_regular && r->bad_flag;
      certified += *r->accepted_regular && r->acceptance_mode == AcceptanceMode::certified;
    }
  }
  json fr = json::object();
  switch (c.kind) {
    case Kind::counting:
      fr["bad"] = fraction_json(bad, t);
      if (screened) {
        fr["accepted_regular"] = fraction_json(accepted, screened);
        fr["certified_regular"] = fraction_json(certified, screened);
        fr["bad_given_accepted"] = fraction_json(bad_accepted, accepted);
      }
      break;
    case Kind::aux_regularity:
      fr["failure"] = fraction_json(bad, t);
      if (screened) {
        fr["g2_lower_regular"] = fraction_json(accepted, screened);
        fr["failure_given_g2_regular"] = fraction_json(bad_accepted, accepted);
        fr["failure_given_g2_irregular"] = fraction_json(bad - bad_accepted, screened - accepted);
      }
      break;
    case Kind::neighborhood: {
      fr["failure"] = fraction_json(bad, t);
      fr["success"] = fraction_json(t - bad, t);
      std::size_t good = 0;
      std::vector<std::size_t> hist(cell.n + 1, 0);
      for (const auto* r : rs) {
        good += *r->good_vertex_count;
        ++hist[*r->good_vertex_count];
      }
      fr["good_vertex"] = fraction_json(good, t * cell.n);
      if (screened) fr["accepted_regular"] = fraction_json(accepted, screened);
      s["good_vertex_histogram"] = hist;
      break;
    }
    case Kind::heredity:
    case Kind::extraction:
      fr["failure"] = fraction_json(bad, t);
      fr["pass"] = fraction_json(t - bad, t);
      break;
  }
  if (c.kind == Kind::counting && t > 0) {
    BigInt sum = 0;
    for (const auto* r : rs) sum += *r->copy_count;
    s["mean_copy_count"] = to_string(BigRational(sum, BigInt(t)));
    s["expected_count"] = to_string(*rs.front()->expected_count);
  }
  s["fractions"] = fr;
  const auto& primary = fr[primary_fraction(c.kind)];
  s["primary"] = primary_fraction(c.kind);
  s["wilson_low"] = primary["wilson_low"];
  s["wilson_high"] = primary["wilson_high"];
  if (c.beta) {
    if (t == 0) {
      s["beta_skipped"] = true;
    } else {
      s["beta_pass"] = Rational(static_cast<std::int64_t>(bad), static_cast<std::int64_t>(t)) <= *c.beta;
    }
  }
  return s;
}

}  // namespace detail

inline json summary_json(const ExperimentResult& res) {
  const auto& c = res.config;
  std::vector<std::vector<const TrialRecord*>> by_cell(res.cells.size());
  for (const auto& r : res.records) by_cell[r.cell_id].push_back(&r);
  json cells = json::array();
  for (const auto& cell : res.cells) cells.push_back(detail::cell_summary(c, cell, by_cell[cell.id]));
  json s = {{"tool", "k4count"},
            {"version", kVersion},
            {"rng", kRngVersion},
            {"experiment_kind", kind_name(c.kind)},
            {"config", c.echo},
            {"fixture", res.fixtures.info},
            {"total_trials", res.records.size()},
            {"cells", cells}};
  s["total_wall_ms"] = c.timing ? json(std::round(res.total_wall_ms * 1000) / 1000) : json(nullptr);
  return s;
}

/// Line plot of each cell's primary fraction with its Wilson interval, one
/// point per cell in cell order.
inline std::string scatter_svg(const json& summary) {
  const auto& cells = summary["cells"];
  const double w = 480, h = 320, pad = 40;
  const std::size_t k = cells.size();
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  out << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad << "\" y2=\"" << h - pad
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << h - pad << "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < k; ++i) {
    const auto& cell = cells[i];
    const auto& f = cell["fractions"][cell["primary"].get<std::string>()];
    double x = pad + (k == 1 ? (w - 2 * pad) / 2 : (w - 2 * pad) * static_cast<double>(i) / static_cast<double>(k - 1));
    auto y = [&](double v) { return h - pad - (h - 2 * pad) * v; };
    out << "<line x1=\"" << x << "\" y1=\"" << y(f["wilson_low"].get<double>()) << "\" x2=\"" << x << "\" y2=\""
        << y(f["wilson_high"].get<double>()) << "\" stroke=\"gray\"/>\n";
    out << "<circle cx=\"" << x << "\" cy=\"" << y(f["value"].get<double>()) << "\" r=\"3\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

/// Writes trials.csv, summary.json and (if configured) scatter.svg into `dir`.
inline void write_report(const ExperimentResult& res, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + dir + ": " + ec.message());
  write_text_file(dir + "/trials.csv", trials_csv(res.records, res.config.timing));
  auto summary = summary_json(res);
  write_text_file(dir + "/summary.json", summary.dump(2) + "\n");
  if (res.config.scatter) write_text_file(dir + "/scatter.svg", scatter_svg(summary));
}

/// Drops the wall_ms column and total_wall_ms so two runs can be compared byte for byte.
inline std::string strip_timing_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.rfind(',');
    out << line.substr(0, pos) << '\n';
  }
  return out.str();
}

inline std::string strip_timing_summary(const std::string& text) {
  auto doc = json::parse(text);
  doc.erase("total_wall_ms");
  return doc.dump(2);
}

}  // namespace k4c::exp
