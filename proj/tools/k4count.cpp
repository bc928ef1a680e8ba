// k4count command-line front end. Class and vertex indices are 1-based on the
// command line and in output. Exit codes: 0 ok / regular, 10 violation found,
// 2 validation error, 3 I/O error.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "k4count/k4count.hpp"

using namespace k4c;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 10;
constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;

std::vector<std::size_t> parse_index_list(const std::string& text, const std::string& flag) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) throw Error(Errc::invalid_parameter, flag + ": bad number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

std::size_t class_index(std::size_t one_based, const ClassedGraph& g, const std::string& flag) {
  if (one_based < 1 || one_based > g.class_count())
    throw Error(Errc::index_out_of_range, flag + " must lie in 1.." + std::to_string(g.class_count()));
  return one_based - 1;
}

std::vector<std::size_t> one_based(const Bitset& b) {
  auto v = b.indices();
  for (auto& x : v) ++x;
  return v;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

PatternGraph pattern_arg(const std::string& s) {
  if (auto p = PatternGraph::from_name(s)) return *p;
  return load_pattern(s);
}

json verdict_json(const RegularityVerdict& v) {
  json j = {{"verdict", verdict_name(v.kind)}, {"subsets_examined", v.subsets_examined}};
  if (v.witness) {
    j["witness"] = {{"side1", one_based(v.witness->side1)},
                    {"side2", one_based(v.witness->side2)},
                    {"density", v.witness->density.str()},
                    {"reference", v.witness->reference.str()}};
  }
  return j;
}

void print_verdict(const RegularityVerdict& v) {
  std::cout << "verdict: " << verdict_name(v.kind) << "\n";
  std::cout << "subsets_examined: " << v.subsets_examined << "\n";
  if (v.witness) {
    std::cout << "witness_side1: " << join(one_based(v.witness->side1)) << "\n";
    std::cout << "witness_side2: " << join(one_based(v.witness->side2)) << "\n";
    std::cout << "witness_density: " << v.witness->density.str() << "\n";
    std::cout << "reference_density: " << v.witness->reference.str() << "\n";
  }
}

struct CheckFlags {
  std::string epsilon;
  bool lower = false;
  std::string density;
  std::string mode = "auto";
  std::uint64_t budget = 64;
  std::uint64_t seed = 0;
};

void add_check_flags(CLI::App* app, CheckFlags& f, bool epsilon_required) {
  auto* e = app->add_option("--epsilon", f.epsilon, "regularity parameter as p/q");
  if (epsilon_required) e->required();
  app->add_option("--mode", f.mode, "exact | witness | auto")->check(CLI::IsMember({"exact", "witness", "auto"}));
  app->add_option("--budget", f.budget, "witness search restarts");
  app->add_option("--seed", f.seed, "witness search seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularity checks, canonical subgraph counts and seeded experiments on blow-up graphs"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "print one JSON object per result");

  // check
  auto* check = app.add_subcommand("check", "test one pair for (eps)-regularity or (eps,d)-lower-regularity");
  std::string graph_path, pair_text;
  CheckFlags cf;
  check->add_option("--graph", graph_path, "graph file")->required();
  check->add_option("--pair", pair_text, "pattern edge as x,y")->required();
  add_check_flags(check, cf, true);
  check->add_flag("--lower", cf.lower, "test lower-regularity against --density");
  check->add_option("--density", cf.density, "target density d as p/q (with --lower)");
  check->add_flag("--json", as_json, "JSON output");

  // count
  auto* count = app.add_subcommand("count", "count canonical copies of a pattern");
  std::string pattern_text = "K4";
  bool per_vertex = false, per_edge = false;
  count->add_option("--graph", graph_path, "graph file")->required();
  count->add_option("--pattern", pattern_text, "K3 | K4 | K4e | K5 | C4 | pattern file");
  count->add_flag("--per-vertex", per_vertex, "print per-vertex copy degrees");
  count->add_flag("--per-edge", per_edge, "print per-edge copy degrees");
  count->add_flag("--json", as_json, "JSON output");

  // aux
  auto* aux = app.add_subcommand("aux", "build the path-aux graph between X_a and X_b x X_c");
  std::size_t anchor = 0, left = 0, right = 0;
  bool aux_check = false;
  CheckFlags af;
  aux->add_option("--graph", graph_path, "graph file")->required();
  aux->add_option("--anchor", anchor, "class a")->required();
  aux->add_option("--left", left, "class b")->required();
  aux->add_option("--right", right, "class c")->required();
  aux->add_flag("--check", aux_check, "test (eps', d)-lower-regularity of the aux graph");
  add_check_flags(aux, af, false);
  aux->add_option("--density", af.density, "target density as p/q (default d_ab * d_ac)");
  aux->add_flag("--json", as_json, "JSON output");

  // sample
  auto* sample = app.add_subcommand("sample", "draw a uniform blow-up with prescribed edge counts");
  std::string sizes_text, m_text, out_path, sample_eps;
  std::uint64_t sample_seed = 0, stream = 0;
  std::size_t max_rejects = 1000;
  std::string sample_mode = "auto";
  sample->add_option("--pattern", pattern_text, "K3 | K4 | K4e | K5 | C4 | pattern file")->required();
  sample->add_option("--sizes", sizes_text, "class sizes, comma separated (one value = all classes)")->required();
  sample->add_option("--m", m_text, "edges per pattern edge, comma separated (one value = all pairs)")->required();
  sample->add_option("--seed", sample_seed, "base seed");
  sample->add_option("--stream", stream, "stream id");
  sample->add_option("--epsilon", sample_eps, "reject until every pair passes the (eps)-regularity screen");
  sample->add_option("--max-rejects", max_rejects, "rejection limit with --epsilon");
  sample->add_option("--mode", sample_mode, "screen mode")->check(CLI::IsMember({"exact", "witness", "auto"}));
  sample->add_option("--out", out_path, "output graph file (default: stdout)");
  sample->add_flag("--json", as_json, "JSON output");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run a configured Monte-Carlo experiment");
  std::string config_path, out_dir;
  std::size_t workers = 0;
  experiment->add_option("--config", config_path, "JSON config")->required();
  experiment->add_option("--out", out_dir, "output directory (default: config 'output')");
  experiment->add_option("--workers", workers, "worker threads (default: config 'workers')");
  experiment->add_flag("--json", as_json, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*check) {
      auto g = load_graph(graph_path);
      auto ids = parse_index_list(pair_text, "--pair");
      if (ids.size() != 2) throw Error(Errc::invalid_parameter, "--pair needs x,y");
      auto x = class_index(ids[0], g, "--pair"), y = class_index(ids[1], g, "--pair");
      auto eps = Rational::parse(cf.epsilon);
      if (cf.lower && cf.density.empty()) throw Error(Errc::invalid_parameter, "--lower needs --density");
      auto crit = cf.lower ? RegularityCriterion::lower_regular(eps, Rational::parse(cf.density))
                           : RegularityCriterion::eps_regular(eps);
      auto v = check_regular(g.view(x, y), crit, parse_check_mode(cf.mode), cf.budget, RngSpec{cf.seed, 0});
      if (as_json) {
        std::cout << verdict_json(v).dump() << "\n";
      } else {
        print_verdict(v);
      }
      return v.violated() ? kExitViolation : kExitOk;
    }

    if (*count) {
      auto g = load_graph(graph_path);
      auto h = pattern_arg(pattern_text);
      CountOptions opt;
      opt.per_vertex = per_vertex;
      opt.per_edge = per_edge;
      auto c = count_canonical(g, h, opt);
      if (as_json) {
        json j = {{"pattern", pattern_text}, {"count", c.total.str()}};
        if (per_vertex) j["per_vertex"] = c.per_vertex;
        if (per_edge) {
          json pe = json::array();
          for (std::size_t r = 0; r < h.edge_count(); ++r) {
            auto [x, y] = h.edges()[r];
            json entries = json::array();
            for (auto [a, b] : g.edges(x, y)) entries.push_back({a + 1, b + 1, c.per_edge[r][a * g.size(y) + b]});
            pe.push_back({{"pair", {x + 1, y + 1}}, {"edges", entries}});
          }
          j["per_edge"] = pe;
        }
        std::cout << j.dump() << "\n";
      } else {
        std::cout << c.total.str() << "\n";
        if (per_vertex)
          for (std::size_t x = 0; x < h.ell(); ++x)
            for (std::size_t v = 0; v < g.size(x); ++v)
              std::cout << "vertex " << x + 1 << ":" << v + 1 << " " << c.per_vertex[x][v] << "\n";
        if (per_edge)
          for (std::size_t r = 0; r < h.edge_count(); ++r) {
            auto [x, y] = h.edges()[r];
            for (auto [a, b] : g.edges(x, y))
              std::cout << "edge " << x + 1 << ":" << a + 1 << " " << y + 1 << ":" << b + 1 << " "
                        << c.per_edge[r][a * g.size(y) + b] << "\n";
          }
      }
      return kExitOk;
    }

    if (*aux) {
      auto g = load_graph(graph_path);
      auto a = class_index(anchor, g, "--anchor"), b = class_index(left, g, "--left"), c = class_index(right, g, "--right");
      auto ag = build_path_aux(g, a, b, c);
      json j = {{"n1", ag.n1()}, {"n2", ag.n2()}, {"n3", ag.n3()}, {"product_size", ag.product_size()},
                {"edge_count", ag.edge_count()}};
      std::optional<AuxTriangleCounts> tri;
      if (g.pattern().has_edge(b, c)) {
        tri = triangles_through_aux(ag, product_edge_set(g, ag, b, c));
        j["triangles"] = tri->total;
      }
      std::optional<RegularityVerdict> v;
      if (aux_check) {
        if (af.epsilon.empty()) throw Error(Errc::invalid_parameter, "--check needs --epsilon");
        auto target = af.density.empty() ? g.pair_density(a, b) * g.pair_density(a, c) : Rational::parse(af.density);
        v = aux_lower_regularity(ag, Rational::parse(af.epsilon), target, parse_check_mode(af.mode), af.budget,
                                 RngSpec{af.seed, 0});
        j["target"] = target.str();
        j["check"] = verdict_json(*v);
      }
      if (as_json) {
        std::cout << j.dump() << "\n";
      } else {
        std::cout << "aux_sides: " << ag.n1() << " x " << ag.product_size() << "\n";
        std::cout << "edge_count: " << ag.edge_count() << "\n";
        if (tri) std::cout << "triangles: " << tri->total << "\n";
        if (v) {
          std::cout << "target_density: " << j["target"].get<std::string>() << "\n";
          print_verdict(*v);
        }
      }
      return v && v->violated() ? kExitViolation : kExitOk;
    }

    if (*sample) {
      auto h = pattern_arg(pattern_text);
      auto sizes = parse_index_list(sizes_text, "--sizes");
      auto ms = parse_index_list(m_text, "--m");
      if (sizes.size() == 1) sizes.assign(h.ell(), sizes[0]);
      if (ms.size() == 1) ms.assign(h.edge_count(), ms[0]);
      RngSpec rng{sample_seed, stream};
      ClassedGraph g;
      json j = json::object();
      if (sample_eps.empty()) {
        g = sample_blowup(h, sizes, ms, rng);
      } else {
        auto s = sample_regular_blowup(h, sizes, ms, Rational::parse(sample_eps), parse_check_mode(sample_mode), max_rejects, rng);
        g = std::move(s.graph);
        j["rejects"] = s.rejects;
        j["acceptance_mode"] = acceptance_name(s.mode);
      }
      auto text = serialize_graph_file(g);
      if (out_path.empty()) {
        std::cout << text;
      } else {
        write_text_file(out_path, text);
        j["out"] = out_path;
        if (as_json) std::cout << j.dump() << "\n";
      }
      return kExitOk;
    }

    if (*experiment) {
      auto cfg = exp::load_config(config_path);
      if (workers > 0) cfg.workers = workers;
      auto dir = out_dir.empty() ? cfg.output : out_dir;
      if (dir.empty()) throw Error(Errc::config_error, "no output directory (use --out or config 'output')");
      auto res = exp::run_experiment(cfg);
      exp::write_report(res, dir);
      if (as_json) {
        std::cout << json{{"out", dir}, {"cells", res.cells.size()}, {"trials", res.records.size()}}.dump() << "\n";
      } else {
        std::cout << "wrote " << dir << "/trials.csv and " << dir << "/summary.json (" << res.records.size()
                  << " trials, " << res.cells.size() << " cells)\n";
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "k4count: " << e.what() << "\n";
    return e.code() == Errc::io_error ? kExitIo : kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "k4count: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
