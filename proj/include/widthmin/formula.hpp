#pragma once
// formula.hpp -- positive first-order formulas: syntax tree, parser, printer,
// and basic structural measures (free variables, width, standardization).
//
// Concrete grammar ('&' binds tighter than '|', a quantifier's scope extends
// maximally to the right, n-ary chains associate to the right):
//
//   formula := quant | disj
//   quant   := ("exists" | "forall") var "." formula
//   disj    := conj ("|" conj)*
//   conj    := unit ("&" unit)*
//   unit    := atom | "(" formula ")" | "!" unit
//   atom    := relname "(" var ("," var)* ")"
//   relname := [A-Za-z][A-Za-z0-9_]*      (except the keywords)
//   var     := [a-z_][A-Za-z0-9_]*
//
// "!" on an arbitrary unit is only admitted by parse_nnf_input(); the plain
// parser accepts "!" directly on an atom, which denotes the opaque negated
// relation marker that nnf() produces.  Equality and constants are not part
// of the language; an argument that does not look like a variable is a parse
// error.

#include <algorithm>
#include <cassert>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace widthmin {

using var_set = std::set<std::string>;
using path = std::vector<int>;

// ====================================================================
// Errors
// ====================================================================

struct parse_error : std::runtime_error {
  int line, col;
  parse_error(const std::string& msg, int line_, int col_)
      : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                           std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
};

struct invalid_path : std::runtime_error {
  explicit invalid_path(const std::string& msg)
      : std::runtime_error("invalid path: " + msg) {}
};

// ====================================================================
// Syntax tree
// ====================================================================

enum class fkind { atom, conj, disj, exists, forall, negation };

struct atom_data {
  std::string relation;
  std::vector<std::string> args;
  bool negated = false;  // opaque marker, only meaningful to the evaluator

  bool operator==(const atom_data& o) const {
    return relation == o.relation && args == o.args && negated == o.negated;
  }
};

struct fnode;
using formula = std::shared_ptr<const fnode>;

// Immutable node; formulas share subtrees freely.  'negation' only occurs in
// trees returned by parse_nnf_input() and is eliminated by nnf().
struct fnode {
  fkind kind;
  atom_data at;      // kind == atom
  std::string qvar;  // kind == exists / forall
  formula lhs, rhs;  // connectives use both, quantifier/negation use lhs
  var_set free;      // cached free variables
};

inline formula mk_atom(std::string relation, std::vector<std::string> args,
                       bool negated = false) {
  auto n = std::make_shared<fnode>();
  n->kind = fkind::atom;
  n->at = atom_data{std::move(relation), std::move(args), negated};
  n->free = var_set(n->at.args.begin(), n->at.args.end());
  return n;
}

inline formula mk_connective(fkind k, formula l, formula r) {
  assert((k == fkind::conj || k == fkind::disj) && l && r);
  auto n = std::make_shared<fnode>();
  n->kind = k;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  n->free = n->lhs->free;
  n->free.insert(n->rhs->free.begin(), n->rhs->free.end());
  return n;
}

inline formula mk_conj(formula l, formula r) {
  return mk_connective(fkind::conj, std::move(l), std::move(r));
}

inline formula mk_disj(formula l, formula r) {
  return mk_connective(fkind::disj, std::move(l), std::move(r));
}

inline formula mk_quant(fkind k, std::string v, formula body) {
  assert((k == fkind::exists || k == fkind::forall) && body && !v.empty());
  auto n = std::make_shared<fnode>();
  n->kind = k;
  n->qvar = std::move(v);
  n->lhs = std::move(body);
  n->free = n->lhs->free;
  n->free.erase(n->qvar);
  return n;
}

inline formula mk_exists(std::string v, formula body) {
  return mk_quant(fkind::exists, std::move(v), std::move(body));
}

inline formula mk_forall(std::string v, formula body) {
  return mk_quant(fkind::forall, std::move(v), std::move(body));
}

inline formula mk_negation(formula body) {
  assert(body);
  auto n = std::make_shared<fnode>();
  n->kind = fkind::negation;
  n->lhs = std::move(body);
  n->free = n->lhs->free;
  return n;
}

inline bool is_quantifier(fkind k) {
  return k == fkind::exists || k == fkind::forall;
}

inline bool is_connective(fkind k) {
  return k == fkind::conj || k == fkind::disj;
}

// ====================================================================
// Structural equality / ordering helpers
// ====================================================================

inline bool equal(const formula& a, const formula& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case fkind::atom:
      return a->at == b->at;
    case fkind::conj:
    case fkind::disj:
      return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
    case fkind::exists:
    case fkind::forall:
      return a->qvar == b->qvar && equal(a->lhs, b->lhs);
    case fkind::negation:
      return equal(a->lhs, b->lhs);
  }
  return false;
}

// ====================================================================
// Measures and traversal
// ====================================================================

inline const var_set& free_vars(const formula& f) { return f->free; }

// Width: the maximum number of free variables over all subformula
// occurrences (the root and the atoms included).
inline int width(const formula& f) {
  int w = static_cast<int>(f->free.size());
  if (f->lhs) w = std::max(w, width(f->lhs));
  if (f->rhs) w = std::max(w, width(f->rhs));
  return w;
}

inline int size(const formula& f) {
  int n = 1;
  if (f->lhs) n += size(f->lhs);
  if (f->rhs) n += size(f->rhs);
  return n;
}

inline int count_atoms(const formula& f) {
  if (f->kind == fkind::atom) return 1;
  int n = 0;
  if (f->lhs) n += count_atoms(f->lhs);
  if (f->rhs) n += count_atoms(f->rhs);
  return n;
}

inline std::string path_to_string(const path& p) {
  std::string s = "[";
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(p[i]);
  }
  return s + "]";
}

// Child index 0 is the quantifier/negation child; connectives use 0 and 1.
inline formula node_at(const formula& f, const path& p) {
  formula cur = f;
  for (size_t i = 0; i < p.size(); ++i) {
    int c = p[i];
    switch (cur->kind) {
      case fkind::atom:
        throw invalid_path("descends into an atom at " + path_to_string(p));
      case fkind::exists:
      case fkind::forall:
      case fkind::negation:
        if (c != 0)
          throw invalid_path("child " + std::to_string(c) +
                             " of a unary node at " + path_to_string(p));
        cur = cur->lhs;
        break;
      case fkind::conj:
      case fkind::disj:
        if (c == 0)
          cur = cur->lhs;
        else if (c == 1)
          cur = cur->rhs;
        else
          throw invalid_path("child " + std::to_string(c) +
                             " of a binary node at " + path_to_string(p));
        break;
    }
  }
  return cur;
}

// Functional replacement: returns a formula equal to f except that the node
// at p is replaced by g.  Shares all untouched subtrees with f.
inline formula replace_at(const formula& f, const path& p, const formula& g,
                          size_t depth = 0) {
  if (depth == p.size()) return g;
  int c = p[depth];
  switch (f->kind) {
    case fkind::atom:
      throw invalid_path("descends into an atom at " + path_to_string(p));
    case fkind::exists:
    case fkind::forall:
      if (c != 0)
        throw invalid_path("child " + std::to_string(c) +
                           " of a unary node at " + path_to_string(p));
      return mk_quant(f->kind, f->qvar, replace_at(f->lhs, p, g, depth + 1));
    case fkind::negation:
      if (c != 0)
        throw invalid_path("child " + std::to_string(c) +
                           " of a unary node at " + path_to_string(p));
      return mk_negation(replace_at(f->lhs, p, g, depth + 1));
    case fkind::conj:
    case fkind::disj:
      if (c == 0)
        return mk_connective(f->kind, replace_at(f->lhs, p, g, depth + 1),
                             f->rhs);
      if (c == 1)
        return mk_connective(f->kind, f->lhs,
                             replace_at(f->rhs, p, g, depth + 1));
      throw invalid_path("child " + std::to_string(c) + " of a binary node at " +
                         path_to_string(p));
  }
  throw invalid_path("unreachable");
}

// Maximal chain of a connective, flattened left to right.  For any other
// kind the result is the singleton {f}.  The returned vector is the multiset
// of conjuncts (resp. disjuncts) of f.
inline void flatten_chain(const formula& f, fkind k,
                          std::vector<formula>& out) {
  if (f->kind == k) {
    flatten_chain(f->lhs, k, out);
    flatten_chain(f->rhs, k, out);
  } else {
    out.push_back(f);
  }
}

inline std::vector<formula> conjuncts(const formula& f) {
  std::vector<formula> out;
  flatten_chain(f, fkind::conj, out);
  return out;
}

inline std::vector<formula> disjuncts(const formula& f) {
  std::vector<formula> out;
  flatten_chain(f, fkind::disj, out);
  return out;
}

// ====================================================================
// Printing
// ====================================================================

namespace detail {

// Precedence levels: 0 formula, 1 disjunction chain, 2 conjunction chain,
// 3 unit.  A node parenthesizes itself when the context level exceeds its
// own.  Right operands keep their own level so right-leaning chains print
// flat; left operands are bumped so left-nested chains keep their parens.
inline void print_rec(std::ostream& os, const formula& f, int level) {
  switch (f->kind) {
    case fkind::atom: {
      if (f->at.negated) os << '!';
      os << f->at.relation << '(';
      for (size_t i = 0; i < f->at.args.size(); ++i) {
        if (i) os << ',';
        os << f->at.args[i];
      }
      os << ')';
      break;
    }
    case fkind::negation:
      os << '!';
      print_rec(os, f->lhs, 3);
      break;
    case fkind::exists:
    case fkind::forall: {
      bool paren = level > 0;
      if (paren) os << '(';
      os << (f->kind == fkind::exists ? "exists " : "forall ") << f->qvar
         << ". ";
      print_rec(os, f->lhs, 0);
      if (paren) os << ')';
      break;
    }
    case fkind::conj: {
      bool paren = level > 2;
      if (paren) os << '(';
      print_rec(os, f->lhs, 3);
      os << " & ";
      print_rec(os, f->rhs, 2);
      if (paren) os << ')';
      break;
    }
    case fkind::disj: {
      bool paren = level > 1;
      if (paren) os << '(';
      print_rec(os, f->lhs, 2);
      os << " | ";
      print_rec(os, f->rhs, 1);
      if (paren) os << ')';
      break;
    }
  }
}

}  // namespace detail

inline std::string to_string(const formula& f) {
  std::ostringstream os;
  detail::print_rec(os, f, 0);
  return os.str();
}

// ====================================================================
// Parsing
// ====================================================================

namespace detail {

struct token {
  enum kind { ident, lparen, rparen, comma, dot, amp, pipe, bang, end } k;
  std::string text;
  int line, col;
};

inline std::vector<token> lex(const std::string& src) {
  std::vector<token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](token::kind k, std::string text) {
    out.push_back(token{k, std::move(text), line, col});
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++col;
      ++i;
      continue;
    }
    if (c == '#') {  // comment to end of line
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) ||
              src[j] == '_'))
        ++j;
      push(token::ident, src.substr(i, j - i));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    switch (c) {
      case '(': push(token::lparen, "("); break;
      case ')': push(token::rparen, ")"); break;
      case ',': push(token::comma, ","); break;
      case '.': push(token::dot, "."); break;
      case '&': push(token::amp, "&"); break;
      case '|': push(token::pipe, "|"); break;
      case '!': push(token::bang, "!"); break;
      default:
        throw parse_error("unexpected character '" + std::string(1, c) + "'",
                          line, col);
    }
    ++col;
    ++i;
  }
  out.push_back(token{token::end, "", line, col});
  return out;
}

class parser {
 public:
  parser(const std::string& src, bool allow_negation)
      : toks_(lex(src)), allow_negation_(allow_negation) {}

  formula run() {
    formula f = parse_formula();
    if (peek().k != token::end)
      fail("trailing input starting with '" + peek().text + "'");
    return f;
  }

 private:
  std::vector<token> toks_;
  size_t pos_ = 0;
  bool allow_negation_;

  const token& peek() const { return toks_[pos_]; }
  token take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw parse_error(msg, peek().line, peek().col);
  }

  void expect(token::kind k, const char* what) {
    if (peek().k != k) fail(std::string("expected ") + what);
    ++pos_;
  }

  static bool is_keyword(const std::string& s) {
    return s == "exists" || s == "forall";
  }

  static bool looks_like_var(const std::string& s) {
    return !s.empty() &&
           (std::islower(static_cast<unsigned char>(s[0])) || s[0] == '_');
  }

  std::string parse_var() {
    if (peek().k != token::ident) fail("expected a variable");
    if (is_keyword(peek().text)) fail("keyword '" + peek().text +
                                      "' cannot be used as a variable");
    if (!looks_like_var(peek().text))
      fail("expected a variable, got '" + peek().text +
           "' (constants are not supported)");
    return take().text;
  }

  formula parse_formula() {
    if (peek().k == token::ident && is_keyword(peek().text)) {
      fkind k = take().text == "exists" ? fkind::exists : fkind::forall;
      std::string v = parse_var();
      expect(token::dot, "'.' after the quantified variable");
      return mk_quant(k, std::move(v), parse_formula());
    }
    return parse_disj();
  }

  formula parse_disj() {
    std::vector<formula> ops;
    ops.push_back(parse_conj());
    while (peek().k == token::pipe) {
      ++pos_;
      ops.push_back(parse_conj());
    }
    return fold_right(std::move(ops), fkind::disj);
  }

  formula parse_conj() {
    std::vector<formula> ops;
    ops.push_back(parse_unit());
    while (peek().k == token::amp) {
      ++pos_;
      ops.push_back(parse_unit());
    }
    return fold_right(std::move(ops), fkind::conj);
  }

  static formula fold_right(std::vector<formula> ops, fkind k) {
    formula acc = ops.back();
    for (size_t i = ops.size() - 1; i-- > 0;)
      acc = mk_connective(k, ops[i], acc);
    return acc;
  }

  formula parse_unit() {
    if (peek().k == token::bang) {
      ++pos_;
      if (allow_negation_) return mk_negation(parse_unit());
      // Outside NNF preprocessing '!' binds to an atom only and denotes the
      // opaque negated marker (so printed formulas reparse to themselves).
      formula a = parse_unit();
      if (a->kind != fkind::atom)
        fail("'!' applies to an atom here (general negation is only accepted "
             "as NNF input)");
      return mk_atom(a->at.relation, a->at.args, !a->at.negated);
    }
    if (peek().k == token::lparen) {
      ++pos_;
      formula f = parse_formula();
      expect(token::rparen, "')'");
      return f;
    }
    if (peek().k != token::ident) fail("expected an atom or '('");
    if (is_keyword(peek().text))
      fail("a quantifier must be parenthesized in operand position");
    std::string rel = take().text;
    expect(token::lparen, "'(' after the relation name");
    std::vector<std::string> args;
    args.push_back(parse_var());
    while (peek().k == token::comma) {
      ++pos_;
      args.push_back(parse_var());
    }
    expect(token::rparen, "')'");
    return mk_atom(std::move(rel), std::move(args));
  }
};

}  // namespace detail

// Parse a positive formula.  '!' is only accepted directly on atoms.
inline formula parse(const std::string& src) {
  return detail::parser(src, /*allow_negation=*/false).run();
}

// Parse a formula that may use '!' on arbitrary units; the result can
// contain fkind::negation nodes and is meant to be fed to nnf().
inline formula parse_nnf_input(const std::string& src) {
  return detail::parser(src, /*allow_negation=*/true).run();
}

// ====================================================================
// Negation normal form
// ====================================================================

namespace detail {

inline formula nnf_rec(const formula& f, bool neg) {
  switch (f->kind) {
    case fkind::atom:
      return neg ? mk_atom(f->at.relation, f->at.args, !f->at.negated)
                 : formula(f);
    case fkind::negation:
      return nnf_rec(f->lhs, !neg);
    case fkind::conj:
    case fkind::disj: {
      fkind k = f->kind;
      if (neg) k = (k == fkind::conj) ? fkind::disj : fkind::conj;
      return mk_connective(k, nnf_rec(f->lhs, neg), nnf_rec(f->rhs, neg));
    }
    case fkind::exists:
    case fkind::forall: {
      fkind k = f->kind;
      if (neg) k = (k == fkind::exists) ? fkind::forall : fkind::exists;
      return mk_quant(k, f->qvar, nnf_rec(f->lhs, neg));
    }
  }
  throw std::logic_error("nnf: bad node kind");
}

}  // namespace detail

// Push negations down to the atoms.  Negated atoms come out carrying the
// opaque marker; every other operation treats such atoms as ordinary atoms
// over a distinct relation symbol.
inline formula nnf(const formula& f) { return detail::nnf_rec(f, false); }

// ====================================================================
// Standardization
// ====================================================================

inline void collect_quantified(const formula& f, std::vector<std::string>& out) {
  if (is_quantifier(f->kind)) out.push_back(f->qvar);
  if (f->lhs) collect_quantified(f->lhs, out);
  if (f->rhs) collect_quantified(f->rhs, out);
}

inline void collect_all_names(const formula& f, std::set<std::string>& out) {
  if (f->kind == fkind::atom)
    out.insert(f->at.args.begin(), f->at.args.end());
  if (is_quantifier(f->kind)) out.insert(f->qvar);
  if (f->lhs) collect_all_names(f->lhs, out);
  if (f->rhs) collect_all_names(f->rhs, out);
}

// No variable quantified twice, and no quantified variable also free.
inline bool is_standardized(const formula& f) {
  std::vector<std::string> qs;
  collect_quantified(f, qs);
  std::set<std::string> seen;
  for (const auto& v : qs)
    if (!seen.insert(v).second) return false;
  for (const auto& v : f->free)
    if (seen.count(v)) return false;
  return true;
}

// Produces "_q0", "_q1", ... skipping anything already in use.
struct fresh_namer {
  std::set<std::string> used;
  int counter = 0;

  explicit fresh_namer(const formula& f) { collect_all_names(f, used); }
  fresh_namer() = default;

  std::string next() {
    for (;;) {
      std::string cand = "_q" + std::to_string(counter++);
      if (used.insert(cand).second) return cand;
    }
  }
};

namespace detail {

inline formula standardize_rec(const formula& f,
                               std::map<std::string, std::string> env,
                               fresh_namer& fresh) {
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
      // Sequence the recursion explicitly: fresh names are assigned in
      // preorder and argument evaluation order would not guarantee that.
      formula l = standardize_rec(f->lhs, env, fresh);
      formula r = standardize_rec(f->rhs, env, fresh);
      return mk_connective(f->kind, std::move(l), std::move(r));
    }
    case fkind::exists:
    case fkind::forall: {
      std::string name = fresh.next();
      env[f->qvar] = name;  // shadows any outer binding of the same variable
      return mk_quant(f->kind, std::move(name),
                      standardize_rec(f->lhs, std::move(env), fresh));
    }
    case fkind::negation:
      return mk_negation(standardize_rec(f->lhs, std::move(env), fresh));
  }
  throw std::logic_error("standardize: bad node kind");
}

}  // namespace detail

// Rename quantified variables apart so that no variable is quantified twice
// or occurs both free and quantified.  Standardized inputs are returned
// unchanged; otherwise every quantifier receives a fresh "_q<k>" name, in
// preorder, with one counter per call.  Each renaming is a legal N step, so
// the result lies in the rewriting class of f.
inline formula standardize(const formula& f) {
  if (is_standardized(f)) return f;
  fresh_namer fresh(f);
  return detail::standardize_rec(f, {}, fresh);
}

// Replace the free occurrences of 'from' by 'to'.  The caller must ensure
// that 'to' is not captured (the rewrite rules use this only with names that
// do not occur in f at all).
inline formula rename_free(const formula& f, const std::string& from,
                           const std::string& to) {
  if (!f->free.count(from)) return f;
  switch (f->kind) {
    case fkind::atom: {
      std::vector<std::string> args = f->at.args;
      for (auto& a : args)
        if (a == from) a = to;
      return mk_atom(f->at.relation, std::move(args), f->at.negated);
    }
    case fkind::conj:
    case fkind::disj:
      return mk_connective(f->kind, rename_free(f->lhs, from, to),
                           rename_free(f->rhs, from, to));
    case fkind::exists:
    case fkind::forall:
      return mk_quant(f->kind, f->qvar, rename_free(f->lhs, from, to));
    case fkind::negation:
      return mk_negation(rename_free(f->lhs, from, to));
  }
  throw std::logic_error("rename_free: bad node kind");
}

}  // namespace widthmin
