#pragma once
// rules.hpp -- the rewriting rules on positive formulas and their traces.
//
// The rules, at a node g of the formula (x..z variables, F.. formulas, Q a
// quantifier, * the connective of the node; A/C/O only relate formulas of
// the same shape class):
//
//   A_assoc_left   F1*(F2*F3)        ->  (F1*F2)*F3
//   A_assoc_right  (F1*F2)*F3        ->  F1*(F2*F3)
//   C              F1*F2             ->  F2*F1
//   O              Qx Qy F           ->  Qy Qx F          (same quantifier)
//   Pdown          Qx(F1*F2)         ->  (Qx F1)*F2       (x not free in F2)
//   Pup            (Qx F1)*F2        ->  Qx(F1*F2)        (x not free in F2)
//                  F1*(Qx F2)        ->  Qx(F1*F2)        (x not free in F1)
//   N              Qx F              ->  Qy F[x:=y]       (y nowhere in F)
//   Sdown          Qx(F1*F2)         ->  (Qx F1)*(Qx F2)
//   Sup            (Qx F1)*(Qx F2)   ->  Qx(F1*F2)
//   M              Qx F              ->  F                (x not free in F)
//
// Pdown/Pup pair exists with "&" and forall with "|"; Sdown/Sup pair exists
// with "|" and forall with "&".  Pup and Sup take a side argument naming the
// operand whose quantifier is lifted (for Sup both operands must carry the
// same quantifier, so the side does not change the result).  N uses the
// strengthened side condition "y occurs nowhere in F" (not merely "y not
// free in F"), which keeps the substitution capture-free by construction.

#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "formula.hpp"

namespace widthmin {

enum class rule {
  assoc_left,
  assoc_right,
  comm,
  reorder,
  pushdown,
  pushup,
  rename,
  splitdown,
  splitup,
  removal,
};

enum class side { left, right };

struct rule_args {
  std::optional<std::string> target;  // N: the new variable name
  std::optional<side> which;          // Pup/Sup: operand whose quantifier lifts

  bool operator==(const rule_args& o) const {
    return target == o.target && which == o.which;
  }
};

inline const char* rule_name(rule r) {
  switch (r) {
    case rule::assoc_left: return "A_assoc_left";
    case rule::assoc_right: return "A_assoc_right";
    case rule::comm: return "C";
    case rule::reorder: return "O";
    case rule::pushdown: return "Pdown";
    case rule::pushup: return "Pup";
    case rule::rename: return "N";
    case rule::splitdown: return "Sdown";
    case rule::splitup: return "Sup";
    case rule::removal: return "M";
  }
  return "?";
}

inline std::optional<rule> rule_from_name(const std::string& s) {
  for (rule r : {rule::assoc_left, rule::assoc_right, rule::comm,
                 rule::reorder, rule::pushdown, rule::pushup, rule::rename,
                 rule::splitdown, rule::splitup, rule::removal})
    if (s == rule_name(r)) return r;
  return std::nullopt;
}

struct rule_error : std::runtime_error {
  rule r;
  path at;
  std::string reason;
  rule_error(rule r_, path at_, std::string reason_)
      : std::runtime_error(std::string("rule ") + rule_name(r_) +
                           " not applicable at " + path_to_string(at_) + ": " +
                           reason_),
        r(r_),
        at(std::move(at_)),
        reason(std::move(reason_)) {}
};

struct trace_step {
  rule r;
  path at;
  rule_args args;

  bool operator==(const trace_step& o) const {
    return r == o.r && at == o.at && args == o.args;
  }
};

using trace = std::vector<trace_step>;

// ====================================================================
// Application
// ====================================================================

namespace detail {

// The connective that a quantifier pushes over (Pdown/Pup)...
inline fkind push_connective(fkind q) {
  return q == fkind::exists ? fkind::conj : fkind::disj;
}

// ...and the one it splits over (Sdown/Sup).
inline fkind split_connective(fkind q) {
  return q == fkind::exists ? fkind::disj : fkind::conj;
}

// Returns the rewritten node, or an error reason.  Works on the node only;
// the caller splices the result back into the surrounding formula.
inline std::variant<formula, std::string> apply_local(const formula& g, rule r,
                                                      const rule_args& args) {
  using res = std::variant<formula, std::string>;
  switch (r) {
    case rule::assoc_left: {
      if (!is_connective(g->kind)) return res{"node is not a connective"};
      if (g->rhs->kind != g->kind)
        return res{"right operand is not the same connective"};
      return res{mk_connective(g->kind,
                               mk_connective(g->kind, g->lhs, g->rhs->lhs),
                               g->rhs->rhs)};
    }
    case rule::assoc_right: {
      if (!is_connective(g->kind)) return res{"node is not a connective"};
      if (g->lhs->kind != g->kind)
        return res{"left operand is not the same connective"};
      return res{mk_connective(g->kind, g->lhs->lhs,
                               mk_connective(g->kind, g->lhs->rhs, g->rhs))};
    }
    case rule::comm: {
      if (!is_connective(g->kind)) return res{"node is not a connective"};
      return res{mk_connective(g->kind, g->rhs, g->lhs)};
    }
    case rule::reorder: {
      if (!is_quantifier(g->kind)) return res{"node is not a quantifier"};
      if (g->lhs->kind != g->kind)
        return res{"child is not the same quantifier"};
      return res{mk_quant(g->kind, g->lhs->qvar,
                          mk_quant(g->kind, g->qvar, g->lhs->lhs))};
    }
    case rule::pushdown: {
      if (!is_quantifier(g->kind)) return res{"node is not a quantifier"};
      fkind conn = push_connective(g->kind);
      if (g->lhs->kind != conn)
        return res{std::string("child is not ") +
                   (conn == fkind::conj ? "a conjunction" : "a disjunction")};
      const formula& f2 = g->lhs->rhs;
      if (f2->free.count(g->qvar))
        return res{"'" + g->qvar + "' is free in the right operand"};
      return res{mk_connective(conn, mk_quant(g->kind, g->qvar, g->lhs->lhs),
                               f2)};
    }
    case rule::pushup: {
      if (!is_connective(g->kind)) return res{"node is not a connective"};
      if (!args.which) return res{"missing side argument"};
      const formula& qi = *args.which == side::left ? g->lhs : g->rhs;
      const formula& other = *args.which == side::left ? g->rhs : g->lhs;
      if (!is_quantifier(qi->kind))
        return res{"selected operand is not quantified"};
      if (push_connective(qi->kind) != g->kind)
        return res{"quantifier and connective do not match"};
      if (other->free.count(qi->qvar))
        return res{"'" + qi->qvar + "' is free in the other operand"};
      formula body = *args.which == side::left
                         ? mk_connective(g->kind, qi->lhs, other)
                         : mk_connective(g->kind, other, qi->lhs);
      return res{mk_quant(qi->kind, qi->qvar, std::move(body))};
    }
    case rule::rename: {
      if (!is_quantifier(g->kind)) return res{"node is not a quantifier"};
      if (!args.target) return res{"missing target argument"};
      const std::string& y = *args.target;
      std::set<std::string> names;
      collect_all_names(g->lhs, names);
      if (names.count(y))
        return res{"'" + y + "' already occurs below the quantifier"};
      return res{mk_quant(g->kind, y, rename_free(g->lhs, g->qvar, y))};
    }
    case rule::splitdown: {
      if (!is_quantifier(g->kind)) return res{"node is not a quantifier"};
      fkind conn = split_connective(g->kind);
      if (g->lhs->kind != conn)
        return res{std::string("child is not ") +
                   (conn == fkind::conj ? "a conjunction" : "a disjunction")};
      return res{mk_connective(conn, mk_quant(g->kind, g->qvar, g->lhs->lhs),
                               mk_quant(g->kind, g->qvar, g->lhs->rhs))};
    }
    case rule::splitup: {
      if (!is_connective(g->kind)) return res{"node is not a connective"};
      if (!is_quantifier(g->lhs->kind) || g->rhs->kind != g->lhs->kind)
        return res{"both operands must carry the same quantifier"};
      if (split_connective(g->lhs->kind) != g->kind)
        return res{"quantifier and connective do not match"};
      if (g->lhs->qvar != g->rhs->qvar)
        return res{"operands quantify different variables"};
      return res{mk_quant(g->lhs->kind, g->lhs->qvar,
                          mk_connective(g->kind, g->lhs->lhs, g->rhs->lhs))};
    }
    case rule::removal: {
      if (!is_quantifier(g->kind)) return res{"node is not a quantifier"};
      if (g->lhs->free.count(g->qvar))
        return res{"'" + g->qvar + "' is free in the child"};
      return res{g->lhs};
    }
  }
  return res{"unknown rule"};
}

}  // namespace detail

inline formula apply(const formula& f, rule r, const path& p,
                     const rule_args& args = {}) {
  formula g = node_at(f, p);
  auto out = detail::apply_local(g, r, args);
  if (std::holds_alternative<std::string>(out))
    throw rule_error(r, p, std::get<std::string>(out));
  return replace_at(f, p, std::get<formula>(out));
}

inline bool applicable(const formula& f, rule r, const path& p,
                       const rule_args& args = {}) {
  formula g;
  try {
    g = node_at(f, p);
  } catch (const invalid_path&) {
    return false;
  }
  return std::holds_alternative<formula>(detail::apply_local(g, r, args));
}

inline formula replay(formula f, const trace& t) {
  for (const auto& step : t) f = apply(f, step.r, step.at, step.args);
  return f;
}

// ====================================================================
// Trace serialization: one step per line,
//   RULE path=[i,j,...] args=target:y | args=side:left
// ====================================================================

inline std::string to_string(const trace_step& s) {
  std::string out = std::string(rule_name(s.r)) + " path=" +
                    path_to_string(s.at);
  if (s.args.target) out += " args=target:" + *s.args.target;
  if (s.args.which)
    out += std::string(" args=side:") +
           (*s.args.which == side::left ? "left" : "right");
  return out;
}

inline std::string to_string(const trace& t) {
  std::string out;
  for (const auto& s : t) {
    out += to_string(s);
    out += '\n';
  }
  return out;
}

inline trace parse_trace(const std::string& text) {
  trace out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;  // blank line
    auto r = rule_from_name(word);
    if (!r) throw parse_error("unknown rule '" + word + "'", lineno, 1);
    trace_step step;
    step.r = *r;
    bool have_path = false;
    while (ls >> word) {
      if (word.rfind("path=", 0) == 0) {
        std::string body = word.substr(5);
        if (body.size() < 2 || body.front() != '[' || body.back() != ']')
          throw parse_error("malformed path '" + body + "'", lineno, 1);
        body = body.substr(1, body.size() - 2);
        std::istringstream ps(body);
        std::string item;
        while (std::getline(ps, item, ','))
          step.at.push_back(std::stoi(item));
        have_path = true;
      } else if (word.rfind("args=target:", 0) == 0) {
        step.args.target = word.substr(12);
      } else if (word == "args=side:left") {
        step.args.which = side::left;
      } else if (word == "args=side:right") {
        step.args.which = side::right;
      } else {
        throw parse_error("unexpected token '" + word + "'", lineno, 1);
      }
    }
    if (!have_path) throw parse_error("missing path", lineno, 1);
    out.push_back(std::move(step));
  }
  return out;
}

}  // namespace widthmin
