#pragma once
// oracles.hpp -- slow, independent reference implementations the test suite
// checks the real algorithms against: alpha-canonicalization, a bounded
// breadth-first closure of the rewriting relation, exhaustive structure
// enumeration, assignment-by-assignment evaluation, and factorial-search
// treewidth.  Everything here favors obviousness over speed and is bounded
// by explicit budgets (bounds_error beyond them).

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "eval.hpp"
#include "hypergraph.hpp"
#include "rules.hpp"

namespace widthmin {

// ====================================================================
// Alpha-canonicalization
// ====================================================================

namespace detail {

inline formula canon_alpha_rec(const formula& f,
                               std::map<std::string, std::string> env,
                               int& counter) {
  switch (f->kind) {
    case fkind::atom: {
      std::vector<std::string> args = f->at.args;
      for (auto& a : args) {
        auto it = env.find(a);
        if (it != env.end()) a = it->second;
      }
      return mk_atom(f->at.relation, std::move(args), f->at.negated);
    }
    case fkind::conj:
    case fkind::disj: {
      formula l = canon_alpha_rec(f->lhs, env, counter);
      formula r = canon_alpha_rec(f->rhs, env, counter);
      return mk_connective(f->kind, std::move(l), std::move(r));
    }
    case fkind::exists:
    case fkind::forall: {
      // '#' cannot occur in parsed variable names, so the canonical bound
      // names can never collide with (or capture) a free variable.
      std::string name = "#" + std::to_string(counter++);
      env[f->qvar] = name;
      return mk_quant(f->kind, std::move(name),
                      canon_alpha_rec(f->lhs, std::move(env), counter));
    }
    case fkind::negation:
      return mk_negation(canon_alpha_rec(f->lhs, std::move(env), counter));
  }
  throw std::logic_error("canonical_alpha: bad node kind");
}

}  // namespace detail

// Renames every bound variable to a canonical name determined by the
// quantifier's preorder position.  Two formulas are related by N steps alone
// exactly when their canonical forms are structurally equal.  Free variables
// keep their names.
inline formula canonical_alpha(const formula& f) {
  int counter = 0;
  return detail::canon_alpha_rec(f, {}, counter);
}

// ====================================================================
// Bounded rewrite closure
// ====================================================================

struct closure_bounds {
  long max_steps = 200000;    // states expanded
  int max_size = 200;         // node count per formula
  long max_frontier = 100000; // states stored
};

enum class closure_status { complete, exhausted };

struct closure_result {
  // canonical print -> canonical representative, everything reachable
  std::map<std::string, formula> visited;
  int min_width = -1;
  closure_status status = closure_status::complete;
  long expansions = 0;
};

// The rules explored by default: everything invertible in both directions
// plus forward M.  N never appears because states are kept alpha-canonical,
// which quotients exactly the N steps; Sup merges across differing bound
// names by a preparatory N step on the right operand.  The reversal of M
// (inventing a vacuous quantifier) is deliberately not explored -- the
// minimum width over the closure is unaffected, since removing a vacuous
// quantifier never raises any subformula's free-variable count.
inline const std::set<rule>& closure_default_rules() {
  static const std::set<rule> r = {
      rule::assoc_left, rule::assoc_right, rule::comm,      rule::reorder,
      rule::pushdown,   rule::pushup,      rule::splitdown, rule::splitup,
      rule::removal};
  return r;
}

namespace detail {

inline void all_paths_rec(const formula& f, path& cur,
                          std::vector<path>& out) {
  out.push_back(cur);
  if (f->lhs) {
    cur.push_back(0);
    all_paths_rec(f->lhs, cur, out);
    cur.pop_back();
  }
  if (f->rhs) {
    cur.push_back(1);
    all_paths_rec(f->rhs, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

inline std::vector<path> all_paths(const formula& f) {
  std::vector<path> out;
  path cur;
  detail::all_paths_rec(f, cur, out);
  return out;
}

// Breadth-first exploration of everything reachable by the given rules (in
// the directions they are stated), on alpha-canonical representatives.
inline closure_result rewrite_closure(
    const formula& f, const closure_bounds& bounds = {},
    const std::set<rule>& rules = closure_default_rules()) {
  closure_result res;
  std::vector<formula> queue;
  size_t head = 0;

  auto push = [&](const formula& g) {
    if (size(g) > bounds.max_size) {
      res.status = closure_status::exhausted;
      return;
    }
    formula c = canonical_alpha(g);
    std::string key = to_string(c);
    if (res.visited.count(key)) return;
    if (static_cast<long>(res.visited.size()) >= bounds.max_frontier) {
      res.status = closure_status::exhausted;
      return;
    }
    res.visited.emplace(std::move(key), c);
    queue.push_back(std::move(c));
  };

  push(f);
  while (head < queue.size()) {
    if (res.expansions >= bounds.max_steps) {
      res.status = closure_status::exhausted;
      break;
    }
    formula cur = queue[head++];
    ++res.expansions;
    for (const path& p : all_paths(cur)) {
      formula node = node_at(cur, p);
      for (rule r : rules) {
        switch (r) {
          case rule::pushup:
            for (side s : {side::left, side::right}) {
              rule_args a;
              a.which = s;
              if (applicable(cur, r, p, a)) push(apply(cur, r, p, a));
            }
            break;
          case rule::splitup: {
            if (!is_connective(node->kind)) break;
            rule_args a;
            a.which = side::left;
            if (applicable(cur, r, p, a)) {
              push(apply(cur, r, p, a));
            } else if (is_quantifier(node->lhs->kind) &&
                       node->rhs->kind == node->lhs->kind &&
                       detail::split_connective(node->lhs->kind) ==
                           node->kind) {
              // align the bound names with one N step, then merge
              rule_args n;
              n.target = node->lhs->qvar;
              path rp = p;
              rp.push_back(1);
              if (applicable(cur, rule::rename, rp, n))
                push(apply(apply(cur, rule::rename, rp, n), r, p, a));
            }
            break;
          }
          case rule::rename:
            break;  // quotiented away by canonicalization
          default:
            if (applicable(cur, r, p)) push(apply(cur, r, p));
        }
      }
    }
  }

  for (const auto& [key, g] : res.visited) {
    int w = width(g);
    if (res.min_width < 0 || w < res.min_width) res.min_width = w;
  }
  return res;
}

inline bool closure_contains(const closure_result& res, const formula& f) {
  return res.visited.count(to_string(canonical_alpha(f))) > 0;
}

// ====================================================================
// Structure enumeration and semantic equivalence
// ====================================================================

// Calls fn for every structure over vocab with domain sizes 1..max_domain;
// stops early if fn returns false.  Budget: sum over relations of
// domain^arity may not exceed 24 (the number of content bits enumerated).
inline void for_each_structure(const std::map<std::string, int>& vocab,
                               int max_domain,
                               const std::function<bool(const structure&)>& fn) {
  for (int domain = 1; domain <= max_domain; ++domain) {
    long bits = 0;
    for (const auto& [name, arity] : vocab) {
      long cells = 1;
      for (int i = 0; i < arity; ++i) cells *= domain;
      bits += cells;
    }
    if (bits > 24)
      throw bounds_error("structure enumeration needs " + std::to_string(bits) +
                         " content bits (> 24)");
    // all tuples per relation, in a fixed order
    std::vector<std::pair<std::string, std::vector<std::vector<int>>>> cells;
    for (const auto& [name, arity] : vocab) {
      std::vector<std::vector<int>> tuples;
      std::vector<int> t(arity, 0);
      for (;;) {
        tuples.push_back(t);
        int k = 0;
        while (k < arity && ++t[k] == domain) t[k++] = 0;
        if (k == arity) break;
      }
      cells.emplace_back(name, std::move(tuples));
    }
    for (long mask = 0; mask < (1L << bits); ++mask) {
      structure s;
      s.domain_size = domain;
      long bit = 0;
      for (const auto& [name, tuples] : cells) {
        auto& rel = s.relations[name];
        rel.first = vocab.at(name);
        for (const auto& t : tuples) {
          if (mask & (1L << bit)) rel.second.insert(t);
          ++bit;
        }
      }
      if (!fn(s)) return;
    }
  }
}

// True when f1 and f2 have the same satisfying assignments over every
// structure with domain size up to max_domain (free variables compared over
// the union schema).
inline bool semantically_equiv(const formula& f1, const formula& f2,
                               int max_domain) {
  std::map<std::string, int> vocab = vocabulary(f1);
  vocabulary_of(f2, vocab);  // also checks arity consistency across both
  bool equiv = true;
  for_each_structure(vocab, max_domain, [&](const structure& s) {
    assignment_relation r1 = evaluate(f1, s);
    assignment_relation r2 = evaluate(f2, s);
    std::vector<std::string> schema =
        detail::union_schema(r1.schema, r2.schema);
    if (!(detail::extend_schema(r1, schema, s.domain_size) ==
          detail::extend_schema(r2, schema, s.domain_size))) {
      equiv = false;
      return false;
    }
    return true;
  });
  return equiv;
}

// ====================================================================
// Assignment-by-assignment evaluation
// ====================================================================

namespace detail {

inline bool naive_truth(const formula& f, const structure& s,
                        std::map<std::string, int>& env) {
  switch (f->kind) {
    case fkind::atom: {
      auto it = s.relations.find(f->at.relation);
      if (it == s.relations.end())
        throw eval_error("unknown relation '" + f->at.relation + "'");
      std::vector<int> t;
      for (const auto& a : f->at.args) t.push_back(env.at(a));
      bool in = it->second.second.count(t) > 0;
      return f->at.negated ? !in : in;
    }
    case fkind::conj:
      return naive_truth(f->lhs, s, env) && naive_truth(f->rhs, s, env);
    case fkind::disj:
      return naive_truth(f->lhs, s, env) || naive_truth(f->rhs, s, env);
    case fkind::exists:
    case fkind::forall: {
      int saved = env.count(f->qvar) ? env[f->qvar] : -1;
      bool result = f->kind == fkind::forall;
      for (int d = 0; d < s.domain_size; ++d) {
        env[f->qvar] = d;
        bool b = naive_truth(f->lhs, s, env);
        if (f->kind == fkind::exists ? b : !b) {
          result = f->kind == fkind::exists;
          break;
        }
      }
      if (saved >= 0)
        env[f->qvar] = saved;
      else
        env.erase(f->qvar);
      return result;
    }
    case fkind::negation:
      throw eval_error("naive_evaluate requires negation normal form");
  }
  throw std::logic_error("naive_truth: bad node kind");
}

}  // namespace detail

// Tries every assignment explicitly.  Budget: domain^(#distinct variables)
// at most 3^6.
inline assignment_relation naive_evaluate(const formula& f,
                                          const structure& s) {
  std::set<std::string> names;
  collect_all_names(f, names);
  double cost = 1;
  for (size_t i = 0; i < names.size(); ++i) cost *= s.domain_size;
  if (cost > 729)
    throw bounds_error("naive evaluation over " +
                       std::to_string(names.size()) + " variables, domain " +
                       std::to_string(s.domain_size));

  assignment_relation out;
  out.schema.assign(f->free.begin(), f->free.end());
  std::vector<int> row(out.schema.size(), 0);
  for (;;) {
    std::map<std::string, int> env;
    for (size_t i = 0; i < out.schema.size(); ++i) env[out.schema[i]] = row[i];
    if (detail::naive_truth(f, s, env)) out.rows.insert(row);
    size_t k = 0;
    while (k < row.size() && ++row[k] == s.domain_size) row[k++] = 0;
    if (k == row.size()) break;
  }
  return out;
}

// ====================================================================
// Factorial-search treewidth
// ====================================================================

// Minimum over all elimination orderings of the maximum degree at
// elimination time, on the cliquified graph.  At most 8 vertices.
inline int brute_treewidth(const hypergraph& h) {
  int n = static_cast<int>(h.vertices.size());
  if (n > 8)
    throw bounds_error("brute-force treewidth on " + std::to_string(n) +
                       " vertices");
  if (n == 0) return 0;
  std::vector<std::string> verts(h.vertices.begin(), h.vertices.end());
  std::map<std::string, int> id;
  for (int i = 0; i < n; ++i) id[verts[i]] = i;
  std::vector<std::vector<bool>> base(n, std::vector<bool>(n, false));
  for (const auto& e : h.edges) {
    std::vector<int> ids;
    for (const auto& v : e) ids.push_back(id.at(v));
    for (size_t i = 0; i < ids.size(); ++i)
      for (size_t j = i + 1; j < ids.size(); ++j)
        base[ids[i]][ids[j]] = base[ids[j]][ids[i]] = true;
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  int best = n;  // upper bound; any ordering achieves at most n-1
  do {
    auto adj = base;
    std::vector<bool> gone(n, false);
    int w = 0;
    for (int v : order) {
      std::vector<int> nb;
      for (int u = 0; u < n; ++u)
        if (!gone[u] && u != v && adj[v][u]) nb.push_back(u);
      w = std::max(w, static_cast<int>(nb.size()));
      if (w >= best) break;  // cannot improve with this prefix
      for (size_t i = 0; i < nb.size(); ++i)
        for (size_t j = i + 1; j < nb.size(); ++j)
          adj[nb[i]][nb[j]] = adj[nb[j]][nb[i]] = true;
      gone[v] = true;
    }
    best = std::min(best, w);
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

}  // namespace widthmin
