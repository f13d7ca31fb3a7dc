#pragma once
// eval.hpp -- finite structures and bottom-up relational evaluation.
//
// Structure text format ('#' starts a comment, blank lines ignored):
//
//   domain 3
//   E 2
//   0 1
//   1 2
//   T 1
//   0
//
// One "domain <n>" line first (universe {0..n-1}, n >= 1), then one block
// per relation: a "<name> <arity>" header followed by one tuple per line.
//
// evaluate() computes, for every subformula bottom-up, the set of satisfying
// assignments of its free variables; the intermediate relation schemas are
// therefore exactly as wide as the formula, which is what makes low-width
// equivalents cheap to evaluate.  Conjunction is a natural join, disjunction
// pads both sides to the union schema, quantifiers project or divide.

#include <algorithm>
#include <iterator>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "formula.hpp"

namespace widthmin {

struct eval_error : std::runtime_error {
  explicit eval_error(const std::string& msg)
      : std::runtime_error("evaluation error: " + msg) {}
};

struct structure {
  int domain_size = 0;  // universe is {0, ..., domain_size-1}
  // relation name -> (arity, tuples)
  std::map<std::string, std::pair<int, std::set<std::vector<int>>>> relations;
};

struct assignment_relation {
  std::vector<std::string> schema;  // sorted variable names
  std::set<std::vector<int>> rows;  // one value per schema position

  bool operator==(const assignment_relation& o) const {
    return schema == o.schema && rows == o.rows;
  }
};

// relation name -> arity as used in a formula; rejects inconsistent use
inline void vocabulary_of(const formula& f, std::map<std::string, int>& out) {
  if (f->kind == fkind::atom) {
    auto [it, fresh] =
        out.emplace(f->at.relation, static_cast<int>(f->at.args.size()));
    if (!fresh && it->second != static_cast<int>(f->at.args.size()))
      throw eval_error("relation '" + f->at.relation +
                       "' used with arities " + std::to_string(it->second) +
                       " and " + std::to_string(f->at.args.size()));
    return;
  }
  if (f->lhs) vocabulary_of(f->lhs, out);
  if (f->rhs) vocabulary_of(f->rhs, out);
}

inline std::map<std::string, int> vocabulary(const formula& f) {
  std::map<std::string, int> out;
  vocabulary_of(f, out);
  return out;
}

// ====================================================================
// Structure parsing
// ====================================================================

inline structure parse_structure(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  structure s;
  bool have_domain = false;
  std::string cur_rel;
  int cur_arity = 0;

  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;

    if (!have_domain) {
      long n;
      if (first != "domain" || !(ls >> n) || n < 1)
        throw parse_error("expected 'domain <n>' with n >= 1", lineno, 1);
      s.domain_size = static_cast<int>(n);
      have_domain = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(first[0]))) {
      long arity;
      if (!(ls >> arity) || arity < 1)
        throw parse_error("expected '<relation> <arity>' with arity >= 1",
                          lineno, 1);
      if (s.relations.count(first))
        throw parse_error("relation '" + first + "' declared twice", lineno, 1);
      s.relations[first] = {static_cast<int>(arity), {}};
      cur_rel = first;
      cur_arity = static_cast<int>(arity);
      continue;
    }
    // tuple line
    if (cur_rel.empty())
      throw parse_error("tuple before any relation header", lineno, 1);
    std::vector<int> tup;
    std::istringstream ts(line);
    long v;
    while (ts >> v) {
      if (v < 0 || v >= s.domain_size)
        throw parse_error("value " + std::to_string(v) +
                              " outside the domain of size " +
                              std::to_string(s.domain_size),
                          lineno, 1);
      tup.push_back(static_cast<int>(v));
    }
    if (static_cast<int>(tup.size()) != cur_arity)
      throw parse_error("tuple of length " + std::to_string(tup.size()) +
                            " for relation '" + cur_rel + "' of arity " +
                            std::to_string(cur_arity),
                        lineno, 1);
    s.relations[cur_rel].second.insert(std::move(tup));
  }
  if (!have_domain) throw parse_error("missing 'domain <n>' line", lineno, 1);
  return s;
}

inline std::string to_string(const structure& s) {
  std::ostringstream os;
  os << "domain " << s.domain_size << '\n';
  for (const auto& [name, rel] : s.relations) {
    os << name << ' ' << rel.first << '\n';
    for (const auto& t : rel.second) {
      for (size_t i = 0; i < t.size(); ++i) os << (i ? " " : "") << t[i];
      os << '\n';
    }
  }
  return os.str();
}

// ====================================================================
// Evaluation
// ====================================================================

namespace detail {

// Pad r to the (sorted) superset schema by crossing with the domain.
inline assignment_relation extend_schema(const assignment_relation& r,
                                         const std::vector<std::string>& schema,
                                         int domain) {
  if (r.schema == schema) return r;
  assignment_relation out;
  out.schema = schema;
  // position of each output column in r's schema, or -1 if new
  std::vector<int> src(schema.size(), -1);
  for (size_t i = 0; i < schema.size(); ++i) {
    auto it = std::find(r.schema.begin(), r.schema.end(), schema[i]);
    if (it != r.schema.end())
      src[i] = static_cast<int>(it - r.schema.begin());
  }
  std::vector<size_t> free_cols;
  for (size_t i = 0; i < schema.size(); ++i)
    if (src[i] < 0) free_cols.push_back(i);
  for (const auto& row : r.rows) {
    std::vector<int> base(schema.size(), 0);
    for (size_t i = 0; i < schema.size(); ++i)
      if (src[i] >= 0) base[i] = row[src[i]];
    // odometer over the new columns
    std::vector<int> idx(free_cols.size(), 0);
    for (;;) {
      for (size_t k = 0; k < free_cols.size(); ++k) base[free_cols[k]] = idx[k];
      out.rows.insert(base);
      size_t k = 0;
      while (k < idx.size() && ++idx[k] == domain) idx[k++] = 0;
      if (k == idx.size() && !idx.empty()) break;
      if (idx.empty()) break;
    }
  }
  return out;
}

inline std::vector<std::string> union_schema(const std::vector<std::string>& a,
                                             const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

inline assignment_relation eval_atom(const formula& f, const structure& s) {
  auto it = s.relations.find(f->at.relation);
  if (it == s.relations.end())
    throw eval_error("unknown relation '" + f->at.relation + "'");
  const auto& [arity, tuples] = it->second;
  if (arity != static_cast<int>(f->at.args.size()))
    throw eval_error("relation '" + f->at.relation + "' has arity " +
                     std::to_string(arity) + ", atom has " +
                     std::to_string(f->at.args.size()) + " arguments");

  assignment_relation out;
  out.schema.assign(f->free.begin(), f->free.end());
  std::map<std::string, int> col;
  for (size_t i = 0; i < out.schema.size(); ++i)
    col[out.schema[i]] = static_cast<int>(i);

  auto admit = [&](const std::vector<int>& t) {
    std::vector<int> row(out.schema.size(), -1);
    for (size_t i = 0; i < t.size(); ++i) {
      int c = col[f->at.args[i]];
      if (row[c] >= 0 && row[c] != t[i]) return;  // repeated variable mismatch
      row[c] = t[i];
    }
    out.rows.insert(std::move(row));
  };

  if (!f->at.negated) {
    for (const auto& t : tuples) admit(t);
  } else {
    // complement relative to domain^arity
    std::vector<int> t(arity, 0);
    for (;;) {
      if (!tuples.count(t)) admit(t);
      int k = 0;
      while (k < arity && ++t[k] == s.domain_size) t[k++] = 0;
      if (k == arity) break;
    }
  }
  return out;
}

inline assignment_relation eval_rec(const formula& f, const structure& s) {
  switch (f->kind) {
    case fkind::atom:
      return eval_atom(f, s);
    case fkind::negation:
      throw eval_error("evaluate requires negation normal form");
    case fkind::conj: {
      assignment_relation l = eval_rec(f->lhs, s);
      assignment_relation r = eval_rec(f->rhs, s);
      assignment_relation out;
      out.schema = union_schema(l.schema, r.schema);
      // hash-join on the shared columns
      std::vector<int> l_pos(out.schema.size(), -1), r_pos(out.schema.size(), -1);
      for (size_t i = 0; i < out.schema.size(); ++i) {
        auto li = std::find(l.schema.begin(), l.schema.end(), out.schema[i]);
        if (li != l.schema.end()) l_pos[i] = static_cast<int>(li - l.schema.begin());
        auto ri = std::find(r.schema.begin(), r.schema.end(), out.schema[i]);
        if (ri != r.schema.end()) r_pos[i] = static_cast<int>(ri - r.schema.begin());
      }
      std::vector<std::pair<int, int>> shared;  // (l column, r column)
      for (size_t i = 0; i < out.schema.size(); ++i)
        if (l_pos[i] >= 0 && r_pos[i] >= 0) shared.emplace_back(l_pos[i], r_pos[i]);
      std::map<std::vector<int>, std::vector<const std::vector<int>*>> index;
      for (const auto& row : r.rows) {
        std::vector<int> key;
        for (auto [lc, rc] : shared) key.push_back(row[rc]);
        index[key].push_back(&row);
      }
      for (const auto& lrow : l.rows) {
        std::vector<int> key;
        for (auto [lc, rc] : shared) key.push_back(lrow[lc]);
        auto hit = index.find(key);
        if (hit == index.end()) continue;
        for (const auto* rrow : hit->second) {
          std::vector<int> row(out.schema.size());
          for (size_t i = 0; i < out.schema.size(); ++i)
            row[i] = l_pos[i] >= 0 ? lrow[l_pos[i]] : (*rrow)[r_pos[i]];
          out.rows.insert(std::move(row));
        }
      }
      return out;
    }
    case fkind::disj: {
      assignment_relation l = eval_rec(f->lhs, s);
      assignment_relation r = eval_rec(f->rhs, s);
      std::vector<std::string> schema = union_schema(l.schema, r.schema);
      assignment_relation out = extend_schema(l, schema, s.domain_size);
      assignment_relation rx = extend_schema(r, schema, s.domain_size);
      out.rows.insert(rx.rows.begin(), rx.rows.end());
      return out;
    }
    case fkind::exists:
    case fkind::forall: {
      assignment_relation body = eval_rec(f->lhs, s);
      auto it = std::find(body.schema.begin(), body.schema.end(), f->qvar);
      if (it == body.schema.end()) return body;  // vacuous over a nonempty universe
      size_t col = it - body.schema.begin();
      assignment_relation out;
      out.schema = body.schema;
      out.schema.erase(out.schema.begin() + col);
      if (f->kind == fkind::exists) {
        for (const auto& row : body.rows) {
          std::vector<int> r = row;
          r.erase(r.begin() + col);
          out.rows.insert(std::move(r));
        }
      } else {
        // relational division: keep reduced rows with every domain value present
        std::map<std::vector<int>, int> count;
        for (const auto& row : body.rows) {
          std::vector<int> r = row;
          r.erase(r.begin() + col);
          ++count[std::move(r)];  // distinct rows, so x-values are distinct
        }
        for (auto& [r, c] : count)
          if (c == s.domain_size) out.rows.insert(r);
      }
      return out;
    }
  }
  throw std::logic_error("eval: bad node kind");
}

}  // namespace detail

// The set of assignments of free_vars(f) that satisfy f in s.  Every
// intermediate relation ranges over the free variables of the respective
// subformula, so memory and time track the width of f.
inline assignment_relation evaluate(const formula& f, const structure& s) {
  if (s.domain_size < 1) throw eval_error("empty universe");
  // validate the vocabulary up front for a decent error message
  for (const auto& [name, arity] : vocabulary(f)) {
    auto it = s.relations.find(name);
    if (it == s.relations.end())
      throw eval_error("unknown relation '" + name + "'");
    if (it->second.first != arity)
      throw eval_error("relation '" + name + "' has arity " +
                       std::to_string(it->second.first) + ", formula uses " +
                       std::to_string(arity));
  }
  return detail::eval_rec(f, s);
}

inline bool holds(const formula& f, const structure& s) {
  if (!f->free.empty())
    throw eval_error("holds requires a sentence, but '" +
                     *f->free.begin() + "' is free");
  return !evaluate(f, s).rows.empty();
}

}  // namespace widthmin
