#pragma once
// applicability.hpp -- deciding, in polynomial time, whether the
// width-reducing rules apply to some formula reachable by associativity,
// commutativity, and quantifier reordering alone, and producing a concrete
// replayable witness when they do.
//
// The searches exploit the region structure: A/C/O steps never move a
// quantifier past a hole of its region, so a pushdown is available somewhere
// in the A/C/O class iff, for some quantifier node, the chain of
// same-quantifier nodes below it ends on the matching connective and the
// flattened operand list of that connective contains an operand without the
// quantified variable.

#include <optional>
#include <set>
#include <vector>

#include "regions.hpp"
#include "rules.hpp"

namespace widthmin {

struct precondition_error : std::runtime_error {
  explicit precondition_error(const std::string& msg)
      : std::runtime_error("precondition violated: " + msg) {}
};

// A single step of system Y, applied after a preparatory A/C/O excursion:
//   replay(f, aco_trace) == intermediate, and
//   apply(intermediate, r, step_path) == result.
struct y_step_witness {
  formula intermediate;
  formula result;
  rule r = rule::removal;
  trace aco_trace;
  path step_path;
};

// ====================================================================
// Quantifier surveys
// ====================================================================

namespace detail {

inline void quantifier_paths_rec(const formula& f, path& cur, bool postorder,
                                 std::vector<path>& out) {
  if (!postorder && is_quantifier(f->kind)) out.push_back(cur);
  if (f->lhs) {
    cur.push_back(0);
    quantifier_paths_rec(f->lhs, cur, postorder, out);
    cur.pop_back();
  }
  if (f->rhs) {
    cur.push_back(1);
    quantifier_paths_rec(f->rhs, cur, postorder, out);
    cur.pop_back();
  }
  if (postorder && is_quantifier(f->kind)) out.push_back(cur);
}

}  // namespace detail

inline std::vector<path> quantifier_paths(const formula& f,
                                          bool postorder = false) {
  std::vector<path> out;
  path cur;
  detail::quantifier_paths_rec(f, cur, postorder, out);
  return out;
}

// Positions (in preorder) of quantifiers whose variable is not free in
// their child, i.e. exactly the positions where M applies.
inline std::vector<path> removable_quantifiers(const formula& f) {
  std::vector<path> out;
  for (const path& p : quantifier_paths(f)) {
    formula q = node_at(f, p);
    if (!q->lhs->free.count(q->qvar)) out.push_back(p);
  }
  return out;
}

// ====================================================================
// Pushdown up to A/C/O
// ====================================================================

// Looks for a quantifier that can reach its matching connective and push
// past an operand free of its variable, using only A/C/O preparation.
// Quantifiers are scanned in postorder (innermost first); the witness trace
// hoists the quantifier to the bottom of its same-quantifier chain with O
// steps, right-combs the connective chain with A steps, swaps the chosen
// operand block rightward with a single C, hoists the operand to the top
// with A steps, and ends on one Pdown.
//
// Precondition: no removable quantifier (run M to exhaustion first).
inline std::optional<y_step_witness> find_pushdown_aco(const formula& f) {
  if (!removable_quantifiers(f).empty())
    throw precondition_error(
        "find_pushdown_aco expects a formula without removable quantifiers");

  for (const path& qp : quantifier_paths(f, /*postorder=*/true)) {
    formula v = node_at(f, qp);
    const fkind qk = v->kind;
    const fkind conn = detail::push_connective(qk);
    const std::string& x = v->qvar;

    // walk the same-quantifier chain down to the first non-chain node w
    formula w = v->lhs;
    int chain = 1;
    while (w->kind == qk) {
      w = w->lhs;
      ++chain;
    }
    if (w->kind != conn) continue;  // w is a hole of the region: no pushdown

    std::vector<formula> ops;
    flatten_chain(w, conn, ops);
    int r = static_cast<int>(ops.size());
    int idx = -1;  // first operand without a free occurrence of x
    for (int i = 0; i < r; ++i)
      if (!ops[i]->free.count(x)) {
        idx = i;
        break;
      }
    if (idx < 0) continue;

    // Build the witness by actually replaying each step.
    y_step_witness wit;
    wit.r = rule::pushdown;
    formula g = f;
    auto step = [&](rule r_, const path& p_) {
      wit.aco_trace.push_back({r_, p_, {}});
      g = apply(g, r_, p_);
    };

    // O-hoists: bring Qx to the bottom of the chain, outermost swap first.
    path p = qp;
    for (int k = 0; k + 1 < chain; ++k) {
      step(rule::reorder, p);
      p.push_back(0);
    }

    // A right-rotations: right-comb the connective chain below Qx.
    path pos = p;
    pos.push_back(0);
    for (;;) {
      formula node = node_at(g, pos);
      if (node->kind != conn) break;
      while (node_at(g, pos)->lhs->kind == conn) step(rule::assoc_right, pos);
      pos.push_back(1);
    }

    // One C swaps the chosen operand behind the rest of its suffix...
    path chain_root = p;
    chain_root.push_back(0);
    int depth;  // depth (in right steps) at which the operand sits as rhs
    if (idx < r - 1) {
      path cpos = chain_root;
      for (int k = 0; k < idx; ++k) cpos.push_back(1);
      step(rule::comm, cpos);
      depth = idx;
    } else {
      depth = r - 2;  // the last operand is already the deepest rhs
    }
    // ...and A left-rotations float it to the top right.
    for (int d = depth; d > 0; --d) {
      path apos = chain_root;
      for (int k = 0; k < d - 1; ++k) apos.push_back(1);
      step(rule::assoc_left, apos);
    }

    wit.intermediate = g;
    wit.step_path = p;
    wit.result = apply(g, rule::pushdown, p);
    return wit;
  }
  return std::nullopt;
}

// ====================================================================
// Splitdown
// ====================================================================

// When no removal and no A/C/O-pushdown is available anywhere in the class,
// a splitdown is available in the class iff one is directly applicable, so
// the search is a plain preorder scan for a quantifier sitting on its
// matching connective.
inline std::optional<y_step_witness> find_splitdown(const formula& f) {
  if (!removable_quantifiers(f).empty())
    throw precondition_error(
        "find_splitdown expects a formula without removable quantifiers");
  for (const path& qp : quantifier_paths(f)) {
    formula v = node_at(f, qp);
    if (v->lhs->kind != detail::split_connective(v->kind)) continue;
    y_step_witness wit;
    wit.r = rule::splitdown;
    wit.intermediate = f;
    wit.step_path = qp;
    wit.result = apply(f, rule::splitdown, qp);
    return wit;
  }
  return std::nullopt;
}

// One step of system Y on the A/C/O class of f: removal first (preorder
// position), then pushdown up to A/C/O, then splitdown.
inline std::optional<y_step_witness> find_Y_step(const formula& f) {
  std::vector<path> removable = removable_quantifiers(f);
  if (!removable.empty()) {
    y_step_witness wit;
    wit.r = rule::removal;
    wit.intermediate = f;
    wit.step_path = removable.front();
    wit.result = apply(f, rule::removal, wit.step_path);
    return wit;
  }
  if (auto wit = find_pushdown_aco(f)) return wit;
  return find_splitdown(f);
}

// ====================================================================
// The T-invariant conjunct multiset
// ====================================================================

namespace detail {

inline std::multiset<var_set> mset_rec(const holey& h, const association& a) {
  switch (h->k) {
    case hnode::kind::hole: {
      auto it = a.find(h->hole);
      if (it == a.end())
        throw region_error("undefined hole " + std::to_string(h->hole));
      return {it->second};
    }
    case hnode::kind::conj: {
      std::multiset<var_set> l = mset_rec(h->lhs, a);
      std::multiset<var_set> r = mset_rec(h->rhs, a);
      l.insert(r.begin(), r.end());
      return l;
    }
    case hnode::kind::quant: {
      // contraction: merge every element containing the variable into one,
      // dropping the variable itself
      std::multiset<var_set> m = mset_rec(h->lhs, a);
      std::multiset<var_set> out;
      var_set merged;
      for (const auto& e : m) {
        if (e.count(h->qvar)) {
          merged.insert(e.begin(), e.end());
        } else {
          out.insert(e);
        }
      }
      merged.erase(h->qvar);
      out.insert(std::move(merged));
      return out;
    }
  }
  throw std::logic_error("mset_T: bad node kind");
}

}  // namespace detail

// The multiset of hole-variable sets after pushing every quantifier as a
// contraction: invariant under A, C, O, Pdown and Pup on the skeleton, and
// its size bounds the arity of any conjunction reachable with T steps.
inline std::multiset<var_set> mset_T(const holey_formula& hf,
                                     const association& a) {
  return detail::mset_rec(hf.root, a);
}

}  // namespace widthmin
