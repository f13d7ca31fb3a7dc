#pragma once
// normalform.hpp -- normalization under the width-reducing system
// {M, Pdown, Sdown} on A/C/O classes, together with the two potential
// functions that certify termination.
//
// y_potential drops by at least one on every step, so normalization of f
// finishes within size(f)^3 steps; the sharper yprime_potential is invariant
// under the whole structure-preserving toolbox {A, C, O, Pdown, Pup, N} and
// still drops on every Sdown and M, which makes it a useful probe for
// testing that the searches in applicability.hpp respect class boundaries.

#include <string>
#include <vector>

#include "applicability.hpp"

namespace widthmin {

// ====================================================================
// Potentials
// ====================================================================

namespace detail {

// returns the atom count of f, accumulating (atoms below q)^2 per quantifier
inline long long y_pot_rec(const formula& f, long long& pot) {
  if (f->kind == fkind::atom) return 1;
  long long atoms = 0;
  if (f->lhs) atoms += y_pot_rec(f->lhs, pot);
  if (f->rhs) atoms += y_pot_rec(f->rhs, pot);
  if (is_quantifier(f->kind)) pot += atoms * atoms;
  return atoms;
}

inline long long count_kind(const formula& f, fkind k) {
  long long n = f->kind == k ? 1 : 0;
  if (f->lhs) n += count_kind(f->lhs, k);
  if (f->rhs) n += count_kind(f->rhs, k);
  return n;
}

// Blocking test for the refined potential: walking upward from a forall
// node, conjunctions and existential quantifiers that bind an occurrence
// of their variable cannot be crossed (dually for exists nodes).
inline bool blocking(const formula& ancestor, fkind vkind) {
  if (vkind == fkind::forall) {
    if (ancestor->kind == fkind::conj) return true;
    return ancestor->kind == fkind::exists &&
           ancestor->lhs->free.count(ancestor->qvar) > 0;
  }
  if (ancestor->kind == fkind::disj) return true;
  return ancestor->kind == fkind::forall &&
         ancestor->lhs->free.count(ancestor->qvar) > 0;
}

inline long long yprime_rec(const formula& f,
                            std::vector<formula>& ancestors) {
  long long pot = 0;
  if (is_quantifier(f->kind)) {
    // climb to the non-blocked ancestor: the highest node reachable from
    // here through non-blocking nodes only
    formula star = f;
    for (auto it = ancestors.rbegin(); it != ancestors.rend(); ++it) {
      if (blocking(*it, f->kind)) break;
      star = *it;
    }
    fkind counted = f->kind == fkind::forall ? fkind::conj : fkind::disj;
    long long pbar = count_kind(star, counted);
    pot += 3 * pbar + (pbar == 0 ? 1 : 0);
  }
  ancestors.push_back(f);
  if (f->lhs) pot += yprime_rec(f->lhs, ancestors);
  if (f->rhs) pot += yprime_rec(f->rhs, ancestors);
  ancestors.pop_back();
  return pot;
}

}  // namespace detail

// Sum over quantifier-rooted subformula occurrences of (atom count)^2.
inline long long y_potential(const formula& f) {
  long long pot = 0;
  detail::y_pot_rec(f, pot);
  return pot;
}

// Sum over quantifier nodes v of 3*pbar(v) + mu(v), where pbar(v) counts
// the matching connective nodes (conjunctions for forall, disjunctions for
// exists) in the subtree of the non-blocked ancestor of v, and mu(v) = 1
// exactly when pbar(v) = 0.
inline long long yprime_potential(const formula& f) {
  std::vector<formula> ancestors;
  return detail::yprime_rec(f, ancestors);
}

// ====================================================================
// Normalization
// ====================================================================

// Potentials measured right after a normalization step (step_index counts
// from 1; renaming steps are not recorded since both potentials ignore
// names).
struct potential_report {
  long long y_potential = 0;
  long long yprime_potential = 0;
  int step_index = 0;
  rule r = rule::removal;
};

struct normal_form_result {
  formula result;
  trace steps;  // replayable: replay(input, steps) == result
  std::vector<potential_report> reports;
};

// Drives the formula to a state where no removal, no pushdown up to A/C/O,
// and no splitdown applies.  The input is standardized first through
// explicit renaming steps, and every splitdown is followed by a renaming of
// the duplicated quantifier so the formula stays standardized throughout.
//
// step_budget == 0 uses the size(f)^3 termination bound; exceeding it then
// means the potential argument was violated and raises logic_error.  A
// positive step_budget is a caller-imposed cap and exceeding it raises
// bounds_error.
inline normal_form_result y_normal_form(const formula& f,
                                        long long step_budget = 0) {
  normal_form_result out;
  formula g = f;

  fresh_namer fresh(g);

  // standardize through explicit N steps so the trace replays from f
  if (!is_standardized(g)) {
    for (const path& qp : quantifier_paths(g)) {
      rule_args args;
      args.target = fresh.next();
      g = apply(g, rule::rename, qp, args);
      out.steps.push_back({rule::rename, qp, args});
    }
  }

  long long n = static_cast<long long>(size(f));
  const long long bound = step_budget > 0 ? step_budget : n * n * n;
  long long pot = y_potential(g);
  int steps = 0;
  while (auto wit = find_Y_step(g)) {
    if (steps >= bound) {
      if (step_budget > 0)
        throw bounds_error("normalization exceeded the step budget of " +
                           std::to_string(step_budget));
      throw std::logic_error(
          "internal invariant violation: normalization exceeded the cubic "
          "step bound");
    }
    out.steps.insert(out.steps.end(), wit->aco_trace.begin(),
                     wit->aco_trace.end());
    out.steps.push_back({wit->r, wit->step_path, {}});
    g = wit->result;
    if (wit->r == rule::splitdown) {
      // the split duplicated its quantifier: rename the right copy
      path rp = wit->step_path;
      rp.push_back(1);
      rule_args args;
      args.target = fresh.next();
      g = apply(g, rule::rename, rp, args);
      out.steps.push_back({rule::rename, rp, args});
    }
    long long next = y_potential(g);
    if (next >= pot)
      throw std::logic_error(
          "internal invariant violation: y_potential did not decrease on a "
          "normalization step");
    pot = next;
    ++steps;
    out.reports.push_back({next, yprime_potential(g), steps, wit->r});
  }
  out.result = g;
  return out;
}

}  // namespace widthmin
