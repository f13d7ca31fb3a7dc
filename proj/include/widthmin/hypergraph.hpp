#pragma once
// hypergraph.hpp -- hypergraphs over variable names, with PACE-style .gr
// serialization.  Hyperedges of arity other than two are carried in
// "c hyperedge ..." comment lines; their pairwise clique edges are emitted
// as ordinary edge lines so that any PACE treewidth solver can consume the
// file directly (a clique always ends up inside some bag, so a decomposition
// of the cliquified graph covers every hyperedge).

#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "formula.hpp"

namespace widthmin {

// Raised when an operation refuses to run because an input exceeds the
// bounds it is specified for (oracle budgets, solver thresholds).
struct bounds_error : std::runtime_error {
  explicit bounds_error(const std::string& msg)
      : std::runtime_error("bounds exceeded: " + msg) {}
};

struct hypergraph {
  var_set vertices;              // superset of every edge's elements
  std::set<var_set> edges;

  bool operator==(const hypergraph& o) const {
    return vertices == o.vertices && edges == o.edges;
  }
};

inline void add_edge(hypergraph& h, var_set e) {
  h.vertices.insert(e.begin(), e.end());
  h.edges.insert(std::move(e));
}

inline hypergraph mk_hypergraph(const std::vector<var_set>& edges) {
  hypergraph h;
  for (const auto& e : edges) add_edge(h, e);
  return h;
}

// ====================================================================
// Vertex indexing for serialization
// ====================================================================

namespace detail {

inline bool all_numeric(const var_set& vs) {
  for (const auto& v : vs) {
    if (v.empty()) return false;
    for (char c : v)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return !vs.empty();
}

}  // namespace detail

// Deterministic vertex order: numeric names sort numerically (so a parsed
// .gr reserializes with its original ids), otherwise lexicographically.
inline std::vector<std::string> vertex_order(const hypergraph& h) {
  std::vector<std::string> out(h.vertices.begin(), h.vertices.end());
  if (detail::all_numeric(h.vertices))
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return std::stol(a) != std::stol(b) ? std::stol(a) < std::stol(b)
                                          : a < b;
    });
  return out;  // std::set iteration is already lexicographic
}

// ====================================================================
// .gr output
// ====================================================================

inline std::string to_gr(const hypergraph& h) {
  std::vector<std::string> order = vertex_order(h);
  std::map<std::string, int> id;
  for (size_t i = 0; i < order.size(); ++i)
    id[order[i]] = static_cast<int>(i) + 1;

  std::set<std::pair<int, int>> pairs;
  std::vector<std::vector<int>> hyper;  // edges of arity != 2, as id lists
  for (const auto& e : h.edges) {
    std::vector<int> ids;
    for (const auto& v : e) ids.push_back(id[v]);
    std::sort(ids.begin(), ids.end());
    for (size_t i = 0; i < ids.size(); ++i)
      for (size_t j = i + 1; j < ids.size(); ++j)
        pairs.insert({ids[i], ids[j]});
    if (ids.size() != 2) hyper.push_back(std::move(ids));
  }
  std::sort(hyper.begin(), hyper.end());

  std::ostringstream os;
  for (size_t i = 0; i < order.size(); ++i)
    os << "c var " << (i + 1) << ' ' << order[i] << '\n';
  os << "p tw " << order.size() << ' ' << pairs.size() << '\n';
  for (const auto& [u, v] : pairs) os << u << ' ' << v << '\n';
  for (const auto& e : hyper) {
    os << "c hyperedge";
    for (int v : e) os << ' ' << v;
    os << '\n';
  }
  return os.str();
}

// ====================================================================
// .gr input
// ====================================================================

inline hypergraph parse_gr(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  long n = -1, m = -1, seen_edges = 0;
  std::map<int, std::string> names;
  std::vector<std::vector<int>> hyper;
  std::vector<std::pair<int, int>> pairs;

  auto checked_id = [&](long v) {
    if (v < 1 || (n >= 0 && v > n))
      throw parse_error("vertex id " + std::to_string(v) + " out of range",
                        lineno, 1);
    return static_cast<int>(v);
  };

  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") {
      std::string sub;
      if (!(ls >> sub)) continue;
      if (sub == "var") {
        long i;
        std::string name;
        if (ls >> i >> name) names[checked_id(i)] = name;
      } else if (sub == "hyperedge") {
        std::vector<int> e;
        long v;
        while (ls >> v) e.push_back(checked_id(v));
        hyper.push_back(std::move(e));
      }
      continue;  // any other comment is ignored
    }
    if (tok == "p") {
      std::string fmt;
      if (!(ls >> fmt >> n >> m) || fmt != "tw" || n < 0 || m < 0)
        throw parse_error("malformed problem line", lineno, 1);
      continue;
    }
    // edge line
    if (n < 0) throw parse_error("edge before the problem line", lineno, 1);
    long u, v;
    std::istringstream es(line);
    if (!(es >> u >> v))
      throw parse_error("malformed edge line '" + line + "'", lineno, 1);
    pairs.emplace_back(checked_id(u), checked_id(v));
    ++seen_edges;
  }
  if (n < 0) throw parse_error("missing problem line", lineno, 1);
  if (seen_edges != m)
    throw parse_error("expected " + std::to_string(m) + " edge lines, found " +
                          std::to_string(seen_edges),
                      lineno, 1);

  auto name_of = [&](int i) {
    auto it = names.find(i);
    return it != names.end() ? it->second : std::to_string(i);
  };
  hypergraph h;
  for (int i = 1; i <= n; ++i) h.vertices.insert(name_of(i));
  for (const auto& [u, v] : pairs)
    h.edges.insert(var_set{name_of(u), name_of(v)});
  for (const auto& e : hyper) {
    var_set vs;
    for (int i : e) vs.insert(name_of(i));
    h.edges.insert(std::move(vs));
  }
  return h;
}

}  // namespace widthmin
