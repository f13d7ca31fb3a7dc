#pragma once
// treewidth.hpp -- tree decompositions of hypergraphs: validation, an exact
// subset-DP solver over elimination orderings, a min-fill heuristic, and
// PACE-style .td serialization.
//
// Conventions.  A decomposition's width is (largest bag size - 1); the empty
// hypergraph gets a single empty bag and width 0 so the value stays
// nonnegative.  Hyperedges are cliquified for the elimination algorithms
// (any clique ends up inside some bag, so edge coverage carries over), but
// validation checks coverage against the original hyperedges.

#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hypergraph.hpp"

namespace widthmin {

struct tree_decomposition {
  std::map<int, var_set> bags;          // node id -> bag
  std::set<std::pair<int, int>> edges;  // tree edges, stored as (min,max)
};

inline int bagsize(const tree_decomposition& td) {
  size_t b = 0;
  for (const auto& [id, bag] : td.bags) b = std::max(b, bag.size());
  return static_cast<int>(b);
}

inline int td_width(const tree_decomposition& td) {
  return std::max(0, bagsize(td) - 1);
}

struct tw_result {
  int width = 0;
  tree_decomposition td;
};

// ====================================================================
// Validation
// ====================================================================

struct td_violation {
  std::string condition;  // "tree-shape" | "vertex-coverage" |
                          // "edge-coverage" | "connectivity"
  std::string detail;
};

namespace detail {

inline std::string var_set_to_string(const var_set& vs) {
  std::string s = "{";
  for (auto it = vs.begin(); it != vs.end(); ++it) {
    if (it != vs.begin()) s += ",";
    s += *it;
  }
  return s + "}";
}

}  // namespace detail

inline std::vector<td_violation> validate(const tree_decomposition& td,
                                          const hypergraph& h) {
  std::vector<td_violation> out;

  // tree shape: edges between existing nodes, connected, acyclic
  for (const auto& [u, v] : td.edges)
    if (!td.bags.count(u) || !td.bags.count(v))
      out.push_back({"tree-shape", "edge (" + std::to_string(u) + "," +
                                       std::to_string(v) +
                                       ") references a missing node"});
  if (!td.bags.empty()) {
    std::map<int, std::vector<int>> adj;
    for (const auto& [u, v] : td.edges) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    std::set<int> seen;
    std::vector<int> stack = {td.bags.begin()->first};
    seen.insert(stack.back());
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u])
        if (seen.insert(v).second) stack.push_back(v);
    }
    if (seen.size() != td.bags.size())
      out.push_back({"tree-shape", "the decomposition tree is disconnected"});
    else if (td.edges.size() != td.bags.size() - 1)
      out.push_back({"tree-shape", "the decomposition tree has a cycle"});
  }

  // vertex coverage
  for (const auto& v : h.vertices) {
    bool covered = false;
    for (const auto& [id, bag] : td.bags)
      if (bag.count(v)) {
        covered = true;
        break;
      }
    if (!covered)
      out.push_back({"vertex-coverage", "vertex '" + v + "' is in no bag"});
  }

  // edge coverage (the empty edge is a subset of any bag)
  for (const auto& e : h.edges) {
    bool covered = false;
    for (const auto& [id, bag] : td.bags)
      if (std::includes(bag.begin(), bag.end(), e.begin(), e.end())) {
        covered = true;
        break;
      }
    if (!covered && e.empty() && !td.bags.empty()) covered = true;
    if (!covered)
      out.push_back({"edge-coverage", "edge " + detail::var_set_to_string(e) +
                                          " fits in no bag"});
  }

  // connectivity: bags containing each vertex induce a subtree
  for (const auto& v : h.vertices) {
    std::set<int> holding;
    for (const auto& [id, bag] : td.bags)
      if (bag.count(v)) holding.insert(id);
    if (holding.size() <= 1) continue;
    std::map<int, std::vector<int>> adj;
    for (const auto& [a, b] : td.edges)
      if (holding.count(a) && holding.count(b)) {
        adj[a].push_back(b);
        adj[b].push_back(a);
      }
    std::set<int> seen;
    std::vector<int> stack = {*holding.begin()};
    seen.insert(stack.back());
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int w : adj[u])
        if (seen.insert(w).second) stack.push_back(w);
    }
    if (seen.size() != holding.size())
      out.push_back(
          {"connectivity", "the bags containing '" + v + "' are disconnected"});
  }
  return out;
}

// ====================================================================
// Shared elimination-to-decomposition construction
// ====================================================================

namespace detail {

// Simulates the elimination order on the cliquified graph: bag i is the
// eliminated vertex plus its current neighborhood, the neighborhood is
// filled into a clique, and bag i hangs off the bag of the first-eliminated
// neighbor (roots of separate components are chained afterwards).
inline tw_result td_from_elimination(const std::vector<std::string>& verts,
                                     std::vector<std::set<int>> adj,
                                     const std::vector<int>& elim) {
  int n = static_cast<int>(verts.size());
  tw_result res;
  if (n == 0) {
    res.td.bags[1] = {};
    res.width = 0;
    return res;
  }
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[elim[i]] = i;
  std::vector<bool> gone(n, false);
  std::vector<std::vector<int>> nbs(n);
  int maxdeg = 0;
  for (int i = 0; i < n; ++i) {
    int v = elim[i];
    std::vector<int> nb;
    for (int u : adj[v])
      if (!gone[u]) nb.push_back(u);
    maxdeg = std::max(maxdeg, static_cast<int>(nb.size()));
    var_set bag = {verts[v]};
    for (int u : nb) bag.insert(verts[u]);
    res.td.bags[i + 1] = std::move(bag);
    nbs[i] = nb;
    for (size_t a = 0; a < nb.size(); ++a)
      for (size_t b = a + 1; b < nb.size(); ++b) {
        adj[nb[a]].insert(nb[b]);
        adj[nb[b]].insert(nb[a]);
      }
    gone[v] = true;
  }
  std::vector<int> roots;
  for (int i = 0; i < n; ++i) {
    if (nbs[i].empty()) {
      roots.push_back(i + 1);
      continue;
    }
    int parent = n;
    for (int u : nbs[i]) parent = std::min(parent, pos[u]);
    res.td.edges.insert({std::min(i + 1, parent + 1),
                         std::max(i + 1, parent + 1)});
  }
  for (size_t i = 1; i < roots.size(); ++i)
    res.td.edges.insert({std::min(roots[i - 1], roots[i]),
                         std::max(roots[i - 1], roots[i])});
  res.width = maxdeg;
  return res;
}

inline std::vector<std::set<int>> cliquified_adjacency(
    const hypergraph& h, const std::vector<std::string>& verts) {
  std::map<std::string, int> id;
  for (size_t i = 0; i < verts.size(); ++i) id[verts[i]] = static_cast<int>(i);
  std::vector<std::set<int>> adj(verts.size());
  for (const auto& e : h.edges) {
    std::vector<int> ids;
    for (const auto& v : e) ids.push_back(id.at(v));
    for (size_t i = 0; i < ids.size(); ++i)
      for (size_t j = i + 1; j < ids.size(); ++j) {
        adj[ids[i]].insert(ids[j]);
        adj[ids[j]].insert(ids[i]);
      }
  }
  return adj;
}

}  // namespace detail

// ====================================================================
// Exact treewidth (subset DP over elimination orderings)
// ====================================================================

// Held-Karp style: f(S) is the best achievable maximum elimination degree
// when exactly S has been eliminated; the last vertex of the S-prefix is
// peeled off, and its degree at elimination time is the number of vertices
// outside S reachable from it through S.
inline tw_result exact_treewidth(const hypergraph& h, int threshold = 18) {
  int n = static_cast<int>(h.vertices.size());
  if (n > threshold)
    throw bounds_error("exact treewidth on " + std::to_string(n) +
                       " vertices (threshold " + std::to_string(threshold) +
                       "); use the heuristic or raise the threshold");
  if (n > 24)
    throw bounds_error("exact treewidth needs a 2^" + std::to_string(n) +
                       " table; 24 vertices is the hard cap");
  std::vector<std::string> verts = vertex_order(h);
  if (n == 0) {
    tw_result res;
    res.td.bags[1] = {};
    res.width = 0;
    return res;
  }

  std::vector<uint32_t> adj(n, 0);
  {
    auto sets = detail::cliquified_adjacency(h, verts);
    for (int v = 0; v < n; ++v)
      for (int u : sets[v]) adj[v] |= 1u << u;
  }
  const uint32_t full = n == 32 ? ~0u : (1u << n) - 1;

  // degree of v at elimination time, when exactly 'mask' was eliminated
  // before it: neighbors of the component of v inside 'mask'
  auto elim_degree = [&](uint32_t mask, int v) {
    uint32_t nb = adj[v];
    uint32_t inside = 0;
    uint32_t frontier = nb & mask & ~inside;
    while (frontier) {
      inside |= frontier;
      uint32_t grow = 0;
      for (uint32_t f = frontier; f;) {
        int u = std::countr_zero(f);
        f &= f - 1;
        grow |= adj[u];
      }
      nb |= grow;
      frontier = nb & mask & ~inside;
    }
    return std::popcount(nb & ~mask & ~(1u << v));
  };

  std::vector<uint8_t> f(static_cast<size_t>(full) + 1, 0);
  std::vector<int8_t> choice(static_cast<size_t>(full) + 1, -1);
  for (uint32_t mask = 1; mask <= full; ++mask) {
    int best = 255, best_v = -1;
    for (uint32_t m = mask; m;) {
      int v = std::countr_zero(m);
      m &= m - 1;
      uint32_t rest = mask & ~(1u << v);
      int cand = std::max<int>(f[rest], elim_degree(rest, v));
      if (cand < best) {
        best = cand;
        best_v = v;
      }
    }
    f[mask] = static_cast<uint8_t>(best);
    choice[mask] = static_cast<int8_t>(best_v);
  }

  std::vector<int> elim(n);
  uint32_t mask = full;
  for (int i = n - 1; i >= 0; --i) {
    int v = choice[mask];
    elim[i] = v;
    mask &= ~(1u << v);
  }
  tw_result res = detail::td_from_elimination(
      verts, detail::cliquified_adjacency(h, verts), elim);
  if (res.width != f[full])
    throw std::logic_error(
        "internal invariant violation: elimination width disagrees with DP");
  return res;
}

// ====================================================================
// Min-fill heuristic
// ====================================================================

// Greedy elimination picking the vertex whose elimination adds the fewest
// fill edges; ties go to the lower fill count and then the smaller vertex
// id.  Exact on chordal graphs (a zero-fill vertex always exists there).
inline tw_result heuristic_td(const hypergraph& h) {
  std::vector<std::string> verts = vertex_order(h);
  int n = static_cast<int>(verts.size());
  auto adj = detail::cliquified_adjacency(h, verts);
  auto work = adj;
  std::vector<bool> gone(n, false);
  std::vector<int> elim;
  for (int step = 0; step < n; ++step) {
    int best = -1;
    long best_fill = -1;
    for (int v = 0; v < n; ++v) {
      if (gone[v]) continue;
      std::vector<int> nb;
      for (int u : work[v])
        if (!gone[u]) nb.push_back(u);
      long fill = 0;
      for (size_t i = 0; i < nb.size(); ++i)
        for (size_t j = i + 1; j < nb.size(); ++j)
          if (!work[nb[i]].count(nb[j])) ++fill;
      if (best < 0 || fill < best_fill) {
        best = v;
        best_fill = fill;
      }
    }
    elim.push_back(best);
    std::vector<int> nb;
    for (int u : work[best])
      if (!gone[u]) nb.push_back(u);
    for (size_t i = 0; i < nb.size(); ++i)
      for (size_t j = i + 1; j < nb.size(); ++j) {
        work[nb[i]].insert(nb[j]);
        work[nb[j]].insert(nb[i]);
      }
    gone[best] = true;
  }
  return detail::td_from_elimination(verts, adj, elim);
}

// ====================================================================
// Normalization
// ====================================================================

// Repeatedly contracts tree edges whose endpoint bags are subset-related;
// the result has no adjacent subsumed bags, preserves validity and width,
// and keeps the surviving nodes' original ids.  The input must be a valid
// decomposition of h to begin with.
inline tree_decomposition normalize_td(const hypergraph& h,
                                       tree_decomposition td) {
  auto violations = validate(td, h);
  if (!violations.empty())
    throw std::invalid_argument("normalize_td: input decomposition is not " +
                                std::string("valid: ") +
                                violations.front().condition + " (" +
                                violations.front().detail + ")");
  for (;;) {
    bool merged = false;
    for (const auto& [u, v] : td.edges) {
      const var_set& bu = td.bags.at(u);
      const var_set& bv = td.bags.at(v);
      int dead = -1, keep = -1;
      if (std::includes(bv.begin(), bv.end(), bu.begin(), bu.end())) {
        dead = u;
        keep = v;
      } else if (std::includes(bu.begin(), bu.end(), bv.begin(), bv.end())) {
        dead = v;
        keep = u;
      } else {
        continue;
      }
      std::set<std::pair<int, int>> edges;
      for (const auto& [a, b] : td.edges) {
        int x = a == dead ? keep : a;
        int y = b == dead ? keep : b;
        if (x != y) edges.insert({std::min(x, y), std::max(x, y)});
      }
      td.edges = std::move(edges);
      td.bags.erase(dead);
      merged = true;
      break;
    }
    if (!merged) return td;
  }
}

// ====================================================================
// .td serialization (PACE style)
// ====================================================================

inline std::string to_td(const tree_decomposition& td, const hypergraph& h) {
  std::vector<std::string> order = vertex_order(h);
  std::map<std::string, int> vid;
  for (size_t i = 0; i < order.size(); ++i)
    vid[order[i]] = static_cast<int>(i) + 1;
  std::map<int, int> nid;  // original node id -> contiguous 1..k
  for (const auto& [id, bag] : td.bags)
    nid[id] = static_cast<int>(nid.size()) + 1;

  std::ostringstream os;
  for (size_t i = 0; i < order.size(); ++i)
    os << "c var " << (i + 1) << ' ' << order[i] << '\n';
  os << "s td " << td.bags.size() << ' ' << bagsize(td) << ' ' << order.size()
     << '\n';
  for (const auto& [id, bag] : td.bags) {
    os << "b " << nid[id];
    std::vector<int> ids;
    for (const auto& v : bag) ids.push_back(vid.at(v));
    std::sort(ids.begin(), ids.end());
    for (int v : ids) os << ' ' << v;
    os << '\n';
  }
  std::set<std::pair<int, int>> edges;
  for (const auto& [u, v] : td.edges)
    edges.insert({std::min(nid[u], nid[v]), std::max(nid[u], nid[v])});
  for (const auto& [u, v] : edges) os << u << ' ' << v << '\n';
  return os.str();
}

// Reads a .td; vertex indices resolve through the file's own "c var" lines
// when present, otherwise through h's vertex order.
inline tree_decomposition parse_td(const std::string& text,
                                   const hypergraph& h) {
  std::vector<std::string> order = vertex_order(h);
  std::map<int, std::string> names;
  for (size_t i = 0; i < order.size(); ++i)
    names[static_cast<int>(i) + 1] = order[i];

  tree_decomposition td;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool have_header = false;
  long nbags = -1;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok == "c") {
      std::string sub;
      long i;
      std::string name;
      if (ls >> sub >> i >> name && sub == "var") names[static_cast<int>(i)] = name;
      continue;
    }
    if (tok == "s") {
      std::string fmt;
      long bs, n;
      if (!(ls >> fmt >> nbags >> bs >> n) || fmt != "td")
        throw parse_error("malformed solution line", lineno, 1);
      have_header = true;
      continue;
    }
    if (!have_header)
      throw parse_error("content before the 's td' line", lineno, 1);
    if (tok == "b") {
      long id;
      if (!(ls >> id) || id < 1)
        throw parse_error("malformed bag line", lineno, 1);
      var_set bag;
      long v;
      while (ls >> v) {
        auto it = names.find(static_cast<int>(v));
        if (it == names.end())
          throw parse_error("unknown vertex index " + std::to_string(v),
                            lineno, 1);
        bag.insert(it->second);
      }
      td.bags[static_cast<int>(id)] = std::move(bag);
      continue;
    }
    long u = std::stol(tok), v;
    if (!(ls >> v)) throw parse_error("malformed tree edge line", lineno, 1);
    td.edges.insert({static_cast<int>(std::min(u, v)),
                     static_cast<int>(std::max(u, v))});
  }
  if (!have_header) throw parse_error("missing 's td' line", lineno, 1);
  if (nbags != static_cast<long>(td.bags.size()))
    throw parse_error("expected " + std::to_string(nbags) + " bags, found " +
                          std::to_string(td.bags.size()),
                      lineno, 1);
  return td;
}

}  // namespace widthmin
