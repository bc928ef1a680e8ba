#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "k4count/error.hpp"
#include "k4count/model.hpp"

namespace k4c {

namespace detail {

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline std::size_t parse_count(const std::string& tok, std::size_t line_no) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw Error(Errc::syntax_error, "line " + std::to_string(line_no) + ": expected a non-negative integer, got '" + tok + "'");
  return v;
}

}  // namespace detail

/// Header lines of a graph file: class count, sizes and pattern edges
/// (pattern edges 0-based here, 1-based on disk).
struct GraphFileHeader {
  std::size_t ell = 0;
  std::vector<std::size_t> sizes;
  std::vector<VertexPair> pattern_edges;
};

/// Parses the line-oriented graph format:
///
///     classes <l>
///     sizes <n1> ... <nl>
///     pattern <x> <y>      (1-based, one per pattern edge)
///     edges <x> <y>        (section header)
///     <a> <b>              (0-based vertex indices)
///     end
///
/// '#' starts a comment. Every pattern edge needs exactly one edges section.
/// `require_edges = false` accepts a bare pattern header (used for pattern
/// files), in which case `sizes` may be omitted.
inline ClassedGraph parse_graph_file(std::string_view text, bool require_edges = true,
                                     GraphFileHeader* header_out = nullptr) {
  GraphFileHeader h;
  bool have_classes = false, have_sizes = false;
  struct Section {
    std::size_t x, y, line;
    std::vector<VertexPair> edges;
  };
  std::vector<Section> sections;
  std::optional<Section> open;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    auto syntax = [&](const std::string& msg) { return Error(Errc::syntax_error, "line " + std::to_string(line_no) + ": " + msg); };
    auto need = [&](std::size_t n) {
      if (tok.size() != n) throw syntax("'" + tok[0] + "' expects " + std::to_string(n - 1) + " argument(s)");
    };
    auto class_index = [&](const std::string& s) {
      auto c = detail::parse_count(s, line_no);
      if (c < 1 || c > h.ell) throw syntax("class " + s + " outside 1.." + std::to_string(h.ell));
      return c - 1;
    };

    if (open) {
      if (tok[0] == "end") {
        need(1);
        sections.push_back(std::move(*open));
        open.reset();
        continue;
      }
      if (tok.size() != 2) throw syntax("expected '<a> <b>' or 'end' inside edges section");
      open->edges.emplace_back(detail::parse_count(tok[0], line_no), detail::parse_count(tok[1], line_no));
      continue;
    }

    if (tok[0] == "classes") {
      need(2);
      if (have_classes) throw syntax("duplicate 'classes' line");
      h.ell = detail::parse_count(tok[1], line_no);
      if (h.ell == 0) throw syntax("class count must be positive");
      have_classes = true;
    } else if (!have_classes) {
      throw syntax("file must start with 'classes <l>'");
    } else if (tok[0] == "sizes") {
      need(h.ell + 1);
      if (have_sizes) throw syntax("duplicate 'sizes' line");
      for (std::size_t i = 1; i < tok.size(); ++i) h.sizes.push_back(detail::parse_count(tok[i], line_no));
      have_sizes = true;
    } else if (tok[0] == "pattern") {
      need(3);
      auto x = class_index(tok[1]), y = class_index(tok[2]);
      if (x >= y) throw syntax("pattern edge must satisfy x < y");
      h.pattern_edges.emplace_back(x, y);
    } else if (tok[0] == "edges") {
      need(3);
      open = Section{class_index(tok[1]), class_index(tok[2]), line_no, {}};
    } else {
      throw syntax("unknown directive '" + tok[0] + "'");
    }
  }
  if (open) throw Error(Errc::syntax_error, "line " + std::to_string(open->line) + ": edges section not closed by 'end'");
  if (!have_classes) throw Error(Errc::syntax_error, "line 1: missing 'classes' line");
  if (!have_sizes) {
    if (require_edges) throw Error(Errc::syntax_error, "line " + std::to_string(line_no) + ": missing 'sizes' line");
    h.sizes.assign(h.ell, 0);
  }

  PatternGraph pattern(h.ell, h.pattern_edges);
  std::vector<EdgeList> lists;
  std::vector<bool> seen(pattern.edge_count(), false);
  for (auto& s : sections) {
    auto rank = pattern.edge_index(s.x, s.y);
    if (!rank)
      throw Error(Errc::edge_on_non_pattern_pair, "line " + std::to_string(s.line) + ": {" + std::to_string(s.x + 1) +
                                                     "," + std::to_string(s.y + 1) + "} is not a pattern edge");
    if (seen[*rank]) throw Error(Errc::syntax_error, "line " + std::to_string(s.line) + ": second edges section for the same pair");
    seen[*rank] = true;
    lists.push_back(EdgeList{s.x, s.y, std::move(s.edges)});
  }
  if (require_edges) {
    for (std::size_t r = 0; r < seen.size(); ++r)
      if (!seen[r])
        throw Error(Errc::syntax_error, "missing edges section for pattern edge {" +
                                            std::to_string(pattern.edges()[r].first + 1) + "," +
                                            std::to_string(pattern.edges()[r].second + 1) + "}");
  }
  if (header_out) *header_out = h;
  return build_classed_graph(pattern, h.sizes, lists);
}

/// Canonical serialization: pattern and sections in rank order, edges sorted.
inline std::string serialize_graph_file(const ClassedGraph& g) {
  std::ostringstream out;
  out << "classes " << g.class_count() << "\nsizes";
  for (auto n : g.sizes()) out << ' ' << n;
  out << '\n';
  for (auto [x, y] : g.pattern().edges()) out << "pattern " << x + 1 << ' ' << y + 1 << '\n';
  for (auto [x, y] : g.pattern().edges()) {
    out << "edges " << x + 1 << ' ' << y + 1 << '\n';
    for (auto [a, b] : g.edges(x, y)) out << a << ' ' << b << '\n';
    out << "end\n";
  }
  return out.str();
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(Errc::io_error, "write failed for '" + path + "'");
}

inline ClassedGraph load_graph(const std::string& path) { return parse_graph_file(read_text_file(path)); }

/// Pattern from a graph-format file; only the header lines are required.
inline PatternGraph load_pattern(const std::string& path) {
  return parse_graph_file(read_text_file(path), false).pattern();
}

}  // namespace k4c
