#pragma once
// minimize.hpp -- the endgame: rebuilding each region along a tree
// decomposition of its hypergraph, the full minimization pipeline
// (normalize, then minimize region by region), and the decision procedure
// for inter-derivability of two formulas under the complete rule set.

#include <algorithm>
#include <climits>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "normalform.hpp"
#include "treewidth.hpp"

namespace widthmin {

enum class tw_mode { exact, heuristic };

inline std::string tw_mode_name(tw_mode m) {
  return m == tw_mode::exact ? "exact" : "heuristic";
}

// ====================================================================
// region_to_formula: tree decomposition -> holey formula
// ====================================================================

namespace detail {

// Recursive worker on the rooted decomposition.  Carries only what the
// construction needs: the holes still to be placed, the variables
// quantified at this level, and the current subtree root.
struct rtf_context {
  const association* assoc;
  const std::map<int, var_set>* bags;
  std::map<int, std::vector<int>> adj;
};

// Order a quantifier block: variables appear in order of the first hole
// (by hole id) that mentions them, name-lexicographic among equals;
// variables mentioned by no hole sink to the end.
inline std::vector<std::string> quantifier_block_order(
    const var_set& qs, const std::vector<int>& holes, const association& a) {
  std::vector<std::pair<std::pair<int, std::string>, std::string>> keyed;
  for (const std::string& v : qs) {
    int first = INT_MAX;
    for (int i : holes)
      if (a.at(i).count(v)) {
        first = std::min(first, i);
      }
    keyed.push_back({{first, v}, v});
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::string> out;
  for (auto& [k, v] : keyed) out.push_back(v);
  return out;
}

inline holey fold_quantifiers(const std::vector<std::string>& vars,
                              holey body) {
  for (auto it = vars.rbegin(); it != vars.rend(); ++it)
    body = mk_hquant(*it, std::move(body));
  return body;
}

inline holey fold_conjuncts(std::vector<std::pair<int, holey>> keyed) {
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  holey out = keyed.back().second;
  for (auto it = keyed.rbegin() + 1; it != keyed.rend(); ++it)
    out = mk_hconj(it->second, std::move(out));
  return out;
}

inline holey rtf_build(const rtf_context& cx, std::vector<int> holes,
                       const var_set& qs, int r, int parent, bool top,
                       const holey& original) {
  std::sort(holes.begin(), holes.end());

  // survey the subtree rooted at r: depth and branch (the child of r whose
  // subtree a node belongs to; r itself has branch -1)
  std::vector<int> order{r};
  std::map<int, int> depth{{r, 0}}, branch{{r, -1}};
  for (size_t head = 0; head < order.size(); ++head) {
    int u = order[head];
    auto it = cx.adj.find(u);
    if (it == cx.adj.end()) continue;
    for (int w : it->second) {
      if (w == parent || depth.count(w)) continue;
      depth[w] = depth[u] + 1;
      branch[w] = u == r ? w : branch[u];
      order.push_back(w);
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return std::pair(depth[x], x) < std::pair(depth[y], y);
  });

  // assign each hole to its shallowest covering bag (ties: smallest id)
  std::map<int, int> site;
  for (int i : holes) {
    const var_set& need = cx.assoc->at(i);
    for (int t : order) {
      const var_set& bag = cx.bags->at(t);
      if (std::includes(bag.begin(), bag.end(), need.begin(), need.end())) {
        site[i] = t;
        break;
      }
    }
    if (!site.count(i))
      throw std::logic_error(
          "internal invariant violation: hole image not covered in the "
          "decomposition subtree");
  }

  bool basic = true;
  for (int i : holes)
    if (site[i] != r) basic = false;

  if (basic) {
    // everything fits into the root bag; at the top level the input
    // already has the promised width, so return it structurally intact
    if (top) return original;
    std::vector<std::pair<int, holey>> parts;
    for (int i : holes) parts.push_back({i, mk_hole(i)});
    return fold_quantifiers(quantifier_block_order(qs, holes, *cx.assoc),
                            fold_conjuncts(std::move(parts)));
  }

  // group the displaced holes by the branch their bag lies in
  std::map<int, std::vector<int>> group;
  std::vector<int> here;
  for (int i : holes) {
    if (site[i] == r)
      here.push_back(i);
    else
      group[branch[site[i]]].push_back(i);
  }

  const var_set& rbag = cx.bags->at(r);
  var_set pushed;  // union of the child blocks' quantifier sets
  std::vector<std::pair<int, holey>> parts;
  for (int i : here) parts.push_back({i, mk_hole(i)});
  for (auto& [child, hs] : group) {
    var_set uj;
    for (int i : hs)
      for (const std::string& v : cx.assoc->at(i))
        if (!rbag.count(v)) uj.insert(v);
    for (const std::string& v : uj)
      if (!qs.count(v) || !pushed.insert(v).second)
        throw std::logic_error(
            "internal invariant violation: child quantifier blocks are not "
            "disjoint");
    parts.push_back({*std::min_element(hs.begin(), hs.end()),
                     rtf_build(cx, hs, uj, child, r, false, original)});
  }

  var_set u;
  for (const std::string& v : qs)
    if (!pushed.count(v)) u.insert(v);
  return fold_quantifiers(quantifier_block_order(u, holes, *cx.assoc),
                          fold_conjuncts(std::move(parts)));
}

}  // namespace detail

// Rebuilds the region skeleton along a tree decomposition of its
// hypergraph: same holes, same association, rearranged so that the width
// does not exceed the decomposition's bag size.  With a minimum width
// decomposition the rebuilt skeleton has minimum width over everything the
// structure-preserving rules can reach.
inline holey_formula region_to_formula(const holey_formula& h,
                                       const association& a,
                                       const tree_decomposition& td) {
  hypergraph hg = region_hypergraph(h, a);
  auto violations = validate(td, hg);
  if (!violations.empty())
    throw region_error("invalid decomposition: " +
                       violations.front().condition + " (" +
                       violations.front().detail + ")");

  var_set free = holey_free(h, a);
  int root = -1;
  for (const auto& [id, bag] : td.bags)
    if (std::includes(bag.begin(), bag.end(), free.begin(), free.end())) {
      root = id;
      break;
    }
  if (root < 0)
    throw std::logic_error(
        "internal invariant violation: no bag covers the free variables of "
        "a validated decomposition");

  detail::rtf_context cx;
  cx.assoc = &a;
  cx.bags = &td.bags;
  for (const auto& [x, y] : td.edges) {
    cx.adj[x].push_back(y);
    cx.adj[y].push_back(x);
  }

  std::vector<int> holes;
  holey_holes(h.root, holes);
  std::vector<std::string> qv;
  holey_qvars(h.root, qv);
  var_set qs(qv.begin(), qv.end());

  return holey_formula{
      h.pol, detail::rtf_build(cx, holes, qs, root, -1, true, h.root)};
}

// ====================================================================
// Region-wise minimization
// ====================================================================

struct region_report {
  int region_id = 0;        // preorder over the region tree, root is 1
  int hypergraph_size = 0;  // vertex count of the region hypergraph
  int tw = 0;               // width of the decomposition used
  tw_mode mode = tw_mode::exact;
};

struct minimize_report {
  int input_width = 0;
  int output_width = 0;
  trace normal_form_trace;
  std::vector<region_report> regions;
  tw_mode mode = tw_mode::exact;
};

namespace detail {

inline formula subst_holes(const holey& h, polarity pol,
                           const std::map<int, formula>& plug,
                           const association& a) {
  bool ea = pol == polarity::exists_and;
  switch (h->k) {
    case hnode::kind::hole: {
      const formula& sub = plug.at(h->hole);
      if (free_vars(sub) != a.at(h->hole))
        throw region_error("association mismatch at hole " +
                           std::to_string(h->hole));
      return sub;
    }
    case hnode::kind::conj:
      return mk_connective(ea ? fkind::conj : fkind::disj,
                           subst_holes(h->lhs, pol, plug, a),
                           subst_holes(h->rhs, pol, plug, a));
    case hnode::kind::quant:
      return mk_quant(ea ? fkind::exists : fkind::forall, h->qvar,
                      subst_holes(h->lhs, pol, plug, a));
  }
  throw std::logic_error("subst_holes: bad node kind");
}

inline formula minimize_region(const region_tree& t, tw_mode mode,
                               int exact_threshold,
                               std::vector<region_report>& reports,
                               int& next_id) {
  int id = next_id++;
  hypergraph hg = region_hypergraph(t.skeleton, t.assoc);
  tw_result tr = mode == tw_mode::exact ? exact_treewidth(hg, exact_threshold)
                                        : heuristic_td(hg);
  tree_decomposition td = normalize_td(hg, tr.td);
  holey_formula rebuilt = region_to_formula(t.skeleton, t.assoc, td);
  if (mode == tw_mode::heuristic &&
      holey_width(rebuilt, t.assoc) > holey_width(t.skeleton, t.assoc))
    rebuilt = t.skeleton;  // an overestimated width would be a regression
  reports.push_back({id, static_cast<int>(hg.vertices.size()), tr.width,
                     mode});

  std::map<int, formula> plug;
  for (const auto& [i, child] : t.children)
    plug[i] = child_is_atom(child)
                  ? std::get<formula>(child)
                  : minimize_region(
                        *std::get<std::shared_ptr<const region_tree>>(child),
                        mode, exact_threshold, reports, next_id);
  return subst_holes(rebuilt.root, rebuilt.pol, plug, t.assoc);
}

}  // namespace detail

// Minimum width representative of the structure-preserving class of f
// (exact mode; the heuristic gives an upper bound only).  Standardizes,
// splits into regions, and rebuilds every region along a tree
// decomposition, innermost regions last -- their internals do not affect
// the enclosing rebuild, only their free variables do.
inline formula minimize_T(const formula& f, tw_mode mode = tw_mode::exact,
                          int exact_threshold = 18,
                          std::vector<region_report>* reports = nullptr) {
  formula g = standardize(f);
  region_child rc = organize(g);
  std::vector<region_report> local;
  if (!child_is_atom(rc)) {
    int next_id = 1;
    g = detail::minimize_region(
        *std::get<std::shared_ptr<const region_tree>>(rc), mode,
        exact_threshold, local, next_id);
  } else {
    g = std::get<formula>(rc);
  }
  if (reports) *reports = std::move(local);
  return g;
}

struct minimize_result {
  formula result;
  minimize_report report;
};

// The two-phase pipeline: drive f to its Y-normal form, then minimize each
// region against its hypergraph's treewidth.  In exact mode the result has
// minimum width among everything derivable from f with the full rule set.
inline minimize_result minimize(const formula& f,
                                tw_mode mode = tw_mode::exact,
                                int exact_threshold = 18) {
  minimize_result out;
  out.report.input_width = width(f);
  out.report.mode = mode;
  normal_form_result nf = y_normal_form(f);
  out.report.normal_form_trace = std::move(nf.steps);
  out.result = minimize_T(nf.result, mode, exact_threshold,
                          &out.report.regions);
  out.report.output_width = width(out.result);
  return out;
}

// ====================================================================
// Rewrite equivalence
// ====================================================================

namespace detail {

// Canonical key of a standardized negation-free formula up to the
// structure-preserving rules plus renaming.  Bound variables are assigned
// "$<k>" tokens (unproducible by the parser, so no collision with rigid
// free names); within a region, quantifier order is immaterial, so tokens
// are chosen to minimize the sorted multiset of hole keys, enumerating
// permutations only among quantifiers with identical one-vs-rest
// signatures.
constexpr long kCanonPermutationCap = 40320;  // 8!

using canon_env = std::map<std::string, std::string>;

inline std::string canon_key(const formula& f, const canon_env& env);

inline std::string canon_atom_key(const atom_data& at, const canon_env& env) {
  std::string s = at.negated ? "!" : "";
  s += at.relation;
  s += '(';
  for (size_t i = 0; i < at.args.size(); ++i) {
    if (i) s += ',';
    auto it = env.find(at.args[i]);
    s += it != env.end() ? it->second : at.args[i];
  }
  s += ')';
  return s;
}

inline void canon_region_collect(const formula& f, fkind quant, fkind conn,
                                 std::vector<std::string>& qs,
                                 std::vector<formula>& holes) {
  if (f->kind == quant) {
    qs.push_back(f->qvar);
    canon_region_collect(f->lhs, quant, conn, qs, holes);
    return;
  }
  if (f->kind == conn) {
    canon_region_collect(f->lhs, quant, conn, qs, holes);
    canon_region_collect(f->rhs, quant, conn, qs, holes);
    return;
  }
  holes.push_back(f);
}

inline std::string canon_holes_key(const std::vector<formula>& holes,
                                   const canon_env& env) {
  std::vector<std::string> keys;
  for (const formula& h : holes) keys.push_back(canon_key(h, env));
  std::sort(keys.begin(), keys.end());
  std::string s = "{";
  for (size_t i = 0; i < keys.size(); ++i) {
    if (i) s += ';';
    s += keys[i];
  }
  s += '}';
  return s;
}

inline std::string canon_key(const formula& f, const canon_env& env) {
  if (f->kind == fkind::atom) return canon_atom_key(f->at, env);
  if (f->kind == fkind::negation)
    throw region_error("canonical form requires negation normal form");

  bool ea = f->kind == fkind::exists || f->kind == fkind::conj;
  fkind quant = ea ? fkind::exists : fkind::forall;
  fkind conn = ea ? fkind::conj : fkind::disj;
  std::vector<std::string> qs;
  std::vector<formula> holes;
  canon_region_collect(f, quant, conn, qs, holes);

  std::string head = (ea ? "E" : "A") + std::to_string(qs.size());
  if (qs.empty()) return head + canon_holes_key(holes, env);

  // one-vs-rest signature: how the holes see this quantifier in isolation
  std::map<std::string, std::vector<std::string>> groups;
  for (const std::string& x : qs) {
    canon_env probe = env;
    for (const std::string& y : qs) probe[y] = y == x ? "$x" : "$_";
    groups[canon_holes_key(holes, probe)].push_back(x);
  }

  // assign token blocks group by group in signature order; only groups
  // whose variable is actually mentioned need their permutations tried
  long combinations = 1;
  std::vector<std::vector<std::string>> perm_groups;
  for (auto& [sig, members] : groups) {
    std::sort(members.begin(), members.end());
    if (sig.find("$x") == std::string::npos || members.size() == 1) continue;
    for (size_t i = 2; i <= members.size(); ++i) {
      combinations *= static_cast<long>(i);
      if (combinations > kCanonPermutationCap)
        throw bounds_error(
            "canonical form needs more than " +
            std::to_string(kCanonPermutationCap) +
            " quantifier permutations; the region is too symmetric");
    }
    perm_groups.push_back(members);
  }

  size_t base = env.size();
  canon_env assigned = env;
  {
    size_t slot = base;
    for (auto& [sig, members] : groups)
      for (const std::string& x : members)
        assigned[x] = "$" + std::to_string(slot++);
  }

  std::string best;
  auto consider = [&]() {
    std::string cand = canon_holes_key(holes, assigned);
    if (best.empty() || cand < best) best = std::move(cand);
  };
  // odometer over the per-group permutations (identity included)
  std::vector<std::vector<std::string>> work = perm_groups;
  std::function<void(size_t)> enumerate = [&](size_t g) {
    if (g == work.size()) {
      consider();
      return;
    }
    std::vector<std::string>& members = work[g];
    std::sort(members.begin(), members.end());
    std::vector<std::string> tokens;
    for (const std::string& x : members) tokens.push_back(assigned[x]);
    do {
      for (size_t i = 0; i < members.size(); ++i)
        assigned[members[i]] = tokens[i];
      enumerate(g + 1);
    } while (std::next_permutation(members.begin(), members.end()));
    // restore the sorted order's assignment for the caller
    std::sort(members.begin(), members.end());
    for (size_t i = 0; i < members.size(); ++i)
      assigned[members[i]] = tokens[i];
  };
  enumerate(0);
  return head + best;
}

}  // namespace detail

// Canonical form deciding equivalence up to the structure-preserving rules
// plus renaming: two standardized formulas are inter-derivable under
// {A, C, O, Pdown, Pup, N} exactly when their keys are equal.
inline std::string canonical_T_key(const formula& f) {
  detail::canon_env env;
  for (const std::string& v : f->free) env[v] = v;
  return detail::canon_key(f, env);
}

// Decides whether f1 and f2 are inter-derivable under the full rule set:
// normal forms are unique per class up to the structure-preserving rules,
// so normalize both and compare canonical forms.
inline bool rewrite_equiv(const formula& f1, const formula& f2) {
  if (free_vars(f1) != free_vars(f2)) return false;
  formula n1 = y_normal_form(f1).result;
  formula n2 = y_normal_form(f2).result;
  return canonical_T_key(n1) == canonical_T_key(n2);
}

}  // namespace widthmin
