#pragma once
// regions.hpp -- organized formulas.  A region is a maximal single-polarity
// subtree: quantifiers and connectives drawn from {exists, &} or dually from
// {forall, |}.  The region's shape is a holey formula (leaves are numbered
// holes), an association maps each hole to the free variables of the subtree
// plugged into it, and the subtrees themselves are atoms or regions of the
// opposite polarity, recursively.
//
// Holey formulas are stored in a canonical {exists, &} orientation plus a
// polarity flag, so flipping polarity is a constant-time toggle and every
// algorithm has a single code path.

#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "formula.hpp"
#include "hypergraph.hpp"

namespace widthmin {

struct region_error : std::runtime_error {
  explicit region_error(const std::string& msg)
      : std::runtime_error("region error: " + msg) {}
};

enum class polarity { exists_and, forall_or };

inline polarity dual(polarity p) {
  return p == polarity::exists_and ? polarity::forall_or
                                   : polarity::exists_and;
}

// ====================================================================
// Holey formulas
// ====================================================================

struct hnode;
using holey = std::shared_ptr<const hnode>;

// Canonical orientation: 'quant' reads as exists and 'conj' as '&' under
// polarity exists_and, as forall and '|' under forall_or.
struct hnode {
  enum class kind { hole, conj, quant } k;
  int hole = 0;       // kind::hole, positive and unique within the formula
  std::string qvar;   // kind::quant
  holey lhs, rhs;     // conj: both; quant: lhs
};

inline holey mk_hole(int id) {
  auto n = std::make_shared<hnode>();
  n->k = hnode::kind::hole;
  n->hole = id;
  return n;
}

inline holey mk_hconj(holey l, holey r) {
  auto n = std::make_shared<hnode>();
  n->k = hnode::kind::conj;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

inline holey mk_hquant(std::string v, holey body) {
  auto n = std::make_shared<hnode>();
  n->k = hnode::kind::quant;
  n->qvar = std::move(v);
  n->lhs = std::move(body);
  return n;
}

struct holey_formula {
  polarity pol = polarity::exists_and;
  holey root;
};

using association = std::map<int, var_set>;

inline void holey_holes(const holey& h, std::vector<int>& out) {
  if (h->k == hnode::kind::hole) {
    out.push_back(h->hole);
    return;
  }
  if (h->lhs) holey_holes(h->lhs, out);
  if (h->rhs) holey_holes(h->rhs, out);
}

inline void holey_qvars(const holey& h, std::vector<std::string>& out) {
  if (h->k == hnode::kind::quant) out.push_back(h->qvar);
  if (h->lhs) holey_qvars(h->lhs, out);
  if (h->rhs) holey_qvars(h->rhs, out);
}

// Free variables of the skeleton under the association.
inline var_set holey_free(const holey& h, const association& a) {
  switch (h->k) {
    case hnode::kind::hole: {
      auto it = a.find(h->hole);
      if (it == a.end())
        throw region_error("undefined hole " + std::to_string(h->hole));
      return it->second;
    }
    case hnode::kind::conj: {
      var_set l = holey_free(h->lhs, a);
      var_set r = holey_free(h->rhs, a);
      l.insert(r.begin(), r.end());
      return l;
    }
    case hnode::kind::quant: {
      var_set f = holey_free(h->lhs, a);
      f.erase(h->qvar);
      return f;
    }
  }
  throw std::logic_error("holey_free: bad node kind");
}

inline var_set holey_free(const holey_formula& hf, const association& a) {
  return holey_free(hf.root, a);
}

// Width of the skeleton under the association: the maximum free-variable
// count over the holey subformulas, the holes contributing their images.
inline int holey_width(const holey& h, const association& a) {
  int w = static_cast<int>(holey_free(h, a).size());
  if (h->lhs) w = std::max(w, holey_width(h->lhs, a));
  if (h->rhs) w = std::max(w, holey_width(h->rhs, a));
  return w;
}

inline int holey_width(const holey_formula& hf, const association& a) {
  return holey_width(hf.root, a);
}

namespace detail {

inline void print_holey(std::ostream& os, const holey& h, polarity pol,
                        int level) {
  switch (h->k) {
    case hnode::kind::hole:
      os << '<' << h->hole << '>';
      break;
    case hnode::kind::quant: {
      bool paren = level > 0;
      if (paren) os << '(';
      os << (pol == polarity::exists_and ? "exists " : "forall ") << h->qvar
         << ". ";
      print_holey(os, h->lhs, pol, 0);
      if (paren) os << ')';
      break;
    }
    case hnode::kind::conj: {
      bool paren = level > 2;
      if (paren) os << '(';
      print_holey(os, h->lhs, pol, 3);
      os << (pol == polarity::exists_and ? " & " : " | ");
      print_holey(os, h->rhs, pol, 2);
      if (paren) os << ')';
      break;
    }
  }
}

}  // namespace detail

inline std::string to_string(const holey_formula& hf) {
  std::ostringstream os;
  detail::print_holey(os, hf.root, hf.pol, 0);
  return os.str();
}

// ====================================================================
// Region trees
// ====================================================================

struct region_tree;
using region_child =
    std::variant<formula, std::shared_ptr<const region_tree>>;

struct region_tree {
  holey_formula skeleton;
  association assoc;                   // hole -> free variables of its child
  std::map<int, region_child> children;
};

inline bool child_is_atom(const region_child& c) {
  return std::holds_alternative<formula>(c);
}

// ====================================================================
// organize: formula -> region tree
// ====================================================================

namespace detail {

struct organize_state {
  polarity pol;
  int next_hole = 1;  // holes numbered from 1 in preorder
  association assoc;
  std::map<int, region_child> children;
};

inline region_child organize_impl(const formula& f);

inline holey organize_rec(const formula& f, organize_state& st) {
  bool ea = st.pol == polarity::exists_and;
  fkind quant = ea ? fkind::exists : fkind::forall;
  fkind conn = ea ? fkind::conj : fkind::disj;
  if (f->kind == quant)
    return mk_hquant(f->qvar, organize_rec(f->lhs, st));
  if (f->kind == conn) {
    // explicit sequencing keeps the preorder hole numbering deterministic
    holey l = organize_rec(f->lhs, st);
    holey r = organize_rec(f->rhs, st);
    return mk_hconj(std::move(l), std::move(r));
  }
  int id = st.next_hole++;
  st.assoc[id] = f->free;
  if (f->kind == fkind::atom)
    st.children.emplace(id, region_child{f});
  else
    st.children.emplace(id, organize_impl(f));
  return mk_hole(id);
}

inline region_child organize_impl(const formula& f) {
  if (f->kind == fkind::atom) return region_child{f};
  if (f->kind == fkind::negation)
    throw region_error("organize requires negation normal form");
  organize_state st;
  st.pol = (f->kind == fkind::exists || f->kind == fkind::conj)
               ? polarity::exists_and
               : polarity::forall_or;
  holey root = organize_rec(f, st);
  auto t = std::make_shared<region_tree>();
  t->skeleton = holey_formula{st.pol, std::move(root)};
  t->assoc = std::move(st.assoc);
  t->children = std::move(st.children);
  return region_child{std::shared_ptr<const region_tree>(std::move(t))};
}

}  // namespace detail

// Splits f into its region tree.  The root region's polarity follows the
// root operation; each hole holds an atom or a region whose root operation
// has the opposite polarity, so polarities alternate down the tree.
inline region_child organize(const formula& f) {
  return detail::organize_impl(f);
}

// ====================================================================
// reassemble: region tree -> formula
// ====================================================================

namespace detail {

inline formula reassemble_rec(const holey& h, const region_tree& t);

inline formula reassemble_child(const region_child& c) {
  if (child_is_atom(c)) return std::get<formula>(c);
  const auto& sub = *std::get<std::shared_ptr<const region_tree>>(c);
  if (sub.skeleton.root->k == hnode::kind::hole)
    throw region_error("atomic skeleton: a region must be non-atomic");
  return reassemble_rec(sub.skeleton.root, sub);
}

inline formula reassemble_rec(const holey& h, const region_tree& t) {
  bool ea = t.skeleton.pol == polarity::exists_and;
  switch (h->k) {
    case hnode::kind::hole: {
      auto ci = t.children.find(h->hole);
      auto ai = t.assoc.find(h->hole);
      if (ci == t.children.end() || ai == t.assoc.end())
        throw region_error("undefined hole " + std::to_string(h->hole));
      formula sub = reassemble_child(ci->second);
      if (free_vars(sub) != ai->second)
        throw region_error("association mismatch at hole " +
                           std::to_string(h->hole));
      return sub;
    }
    case hnode::kind::conj:
      return mk_connective(ea ? fkind::conj : fkind::disj,
                           reassemble_rec(h->lhs, t),
                           reassemble_rec(h->rhs, t));
    case hnode::kind::quant:
      return mk_quant(ea ? fkind::exists : fkind::forall, h->qvar,
                      reassemble_rec(h->lhs, t));
  }
  throw std::logic_error("reassemble: bad node kind");
}

}  // namespace detail

inline formula reassemble(const region_tree& t) {
  if (t.skeleton.root->k == hnode::kind::hole)
    throw region_error("atomic skeleton: a region must be non-atomic");
  return detail::reassemble_rec(t.skeleton.root, t);
}

inline formula reassemble(const region_child& c) {
  return detail::reassemble_child(c);
}

// ====================================================================
// Region hypergraph
// ====================================================================

// Vertices: every variable of some hole image.  Edges: one per hole image
// plus one for the free variables of the region.
inline hypergraph region_hypergraph(const holey_formula& hf,
                                    const association& a,
                                    const var_set& free) {
  hypergraph h;
  std::vector<int> holes;
  holey_holes(hf.root, holes);
  for (int i : holes) {
    auto it = a.find(i);
    if (it == a.end())
      throw region_error("undefined hole " + std::to_string(i));
    add_edge(h, it->second);
  }
  add_edge(h, free);
  return h;
}

inline hypergraph region_hypergraph(const holey_formula& hf,
                                    const association& a) {
  return region_hypergraph(hf, a, holey_free(hf, a));
}

}  // namespace widthmin
