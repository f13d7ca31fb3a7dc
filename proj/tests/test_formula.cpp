#include <catch2/catch_amalgamated.hpp>

#include "widthmin/formula.hpp"

using namespace widthmin;

TEST_CASE("parsing and printing round-trip", "[formula]") {
  // to_string(parse(s)) is a fixpoint: parse it again and print it again.
  for (const char* src : {
           "R(x,y)",
           "!R(x,y)",
           "R(x) & S(y)",
           "R(x) | S(y)",
           "R(x) & S(y) & T(z)",
           "R(x) & S(y) | T(z)",
           "R(x) & (S(y) | T(z))",
           "(R(x) | S(y)) & T(z)",
           "exists x. R(x)",
           "forall x. exists y. E(x,y)",
           "exists x. R(x) & S(x)",
           "(exists x. R(x)) & S(y)",
           "forall z. (forall y. T(y,z)) | (exists x. E(x,z))",
       }) {
    formula f = parse(src);
    std::string printed = to_string(f);
    REQUIRE(printed == src);
    REQUIRE(equal(parse(printed), f));
  }
}

TEST_CASE("conjunction binds tighter than disjunction", "[formula]") {
  formula f = parse("R(x) & S(y) | T(z)");
  REQUIRE(f->kind == fkind::disj);
  REQUIRE(f->lhs->kind == fkind::conj);

  formula g = parse("R(x) | S(y) & T(z)");
  REQUIRE(g->kind == fkind::disj);
  REQUIRE(g->rhs->kind == fkind::conj);
}

TEST_CASE("connective chains fold to the right", "[formula]") {
  formula f = parse("R(x) & S(y) & T(z)");
  REQUIRE(f->kind == fkind::conj);
  REQUIRE(f->lhs->kind == fkind::atom);
  REQUIRE(f->rhs->kind == fkind::conj);
}

TEST_CASE("quantifier bodies extend to the right", "[formula]") {
  formula f = parse("exists x. R(x) & S(x)");
  REQUIRE(f->kind == fkind::exists);
  REQUIRE(f->lhs->kind == fkind::conj);
}

TEST_CASE("quantifiers in operand position need parentheses", "[formula]") {
  REQUIRE_THROWS_AS(parse("R(x) & exists y. S(y)"), parse_error);
  REQUIRE_NOTHROW(parse("R(x) & (exists y. S(y))"));
  REQUIRE_THROWS_AS(parse("(forall y. T(y,z)) | exists x. E(x,z)"),
                    parse_error);
}

TEST_CASE("parse errors carry a position and a reason", "[formula]") {
  REQUIRE_THROWS_AS(parse(""), parse_error);
  REQUIRE_THROWS_AS(parse("R(x"), parse_error);
  REQUIRE_THROWS_AS(parse("R(x,)"), parse_error);
  REQUIRE_THROWS_AS(parse("R(x)) "), parse_error);
  REQUIRE_THROWS_AS(parse("R(x) &"), parse_error);
  REQUIRE_THROWS_AS(parse("exists . R(x)"), parse_error);
  REQUIRE_THROWS_AS(parse("R(x) S(y)"), parse_error);
  try {
    parse("R(x)\n& ");
    FAIL("expected a parse error");
  } catch (const parse_error& e) {
    REQUIRE(e.line == 2);
  }
}

TEST_CASE("comments and whitespace are ignored", "[formula]") {
  formula f = parse("# leading comment\n  R(x)   &\n S(y) # trailing\n");
  REQUIRE(equal(f, parse("R(x) & S(y)")));
}

TEST_CASE("plain parser restricts negation to atoms", "[formula]") {
  REQUIRE(parse("!R(x)")->at.negated);
  REQUIRE_THROWS_AS(parse("!(R(x) & S(y))"), parse_error);
  REQUIRE_THROWS_AS(parse("!exists x. R(x)"), parse_error);
}

TEST_CASE("negation normal form pushes negation to the atoms", "[formula]") {
  // De Morgan over both connectives and both quantifiers, plus double
  // negation elimination.
  formula f = nnf(parse_nnf_input("!(R(x) & S(y))"));
  REQUIRE(equal(f, parse("!R(x) | !S(y)")));

  formula g = nnf(parse_nnf_input("!(R(x) | S(y))"));
  REQUIRE(equal(g, parse("!R(x) & !S(y)")));

  formula h = nnf(parse_nnf_input("!(exists x. R(x))"));
  REQUIRE(equal(h, parse("forall x. !R(x)")));

  formula k = nnf(parse_nnf_input("!(forall x. !R(x))"));
  REQUIRE(equal(k, parse("exists x. R(x)")));

  formula d = nnf(parse_nnf_input("!(!R(x))"));
  REQUIRE(equal(d, parse("R(x)")));
}

TEST_CASE("free variables", "[formula]") {
  REQUIRE(parse("R(x,y)")->free == var_set{"x", "y"});
  REQUIRE(parse("exists x. R(x,y)")->free == var_set{"y"});
  REQUIRE(parse("exists x. R(x) & S(y)")->free == var_set{"y"});
  REQUIRE(parse("(exists x. R(x)) & S(x)")->free == var_set{"x"});
  REQUIRE(parse("forall y. forall z. exists v1. exists v3. exists v2. "
                "T(y,z) | E(v1,v2) & (E(v2,v3) & E(v3,z))")
              ->free.empty());
}

TEST_CASE("width is the largest free-variable set over all occurrences",
          "[formula]") {
  REQUIRE(width(parse("R(x,y)")) == 2);
  REQUIRE(width(parse("R(x,x)")) == 1);
  REQUIRE(width(parse("exists x. exists y. exists t. R(x,t) & S(t,y)")) == 3);
  REQUIRE(width(parse("exists t. (exists x. R(x,t)) & (exists y. S(t,y))")) ==
          2);
  REQUIRE(width(parse("forall y. forall z. exists v1. exists v3. exists v2. "
                      "T(y,z) | E(v1,v2) & (E(v2,v3) & E(v3,z))")) == 5);
  REQUIRE(width(parse("forall z. (forall y. T(y,z)) | (exists v3. ((exists "
                      "v2. (exists v1. E(v1,v2)) & E(v2,v3)) & E(v3,z)))")) ==
          2);
}

TEST_CASE("size and atom count", "[formula]") {
  formula f = parse("exists x. R(x) & S(x)");
  REQUIRE(size(f) == 4);
  REQUIRE(count_atoms(f) == 2);
  REQUIRE(size(parse("R(x)")) == 1);
}

TEST_CASE("node access and replacement by path", "[formula]") {
  formula f = parse("exists x. R(x) & S(y)");
  REQUIRE(node_at(f, {})->kind == fkind::exists);
  REQUIRE(node_at(f, {0})->kind == fkind::conj);
  REQUIRE(node_at(f, {0, 1})->at.relation == "S");

  formula g = replace_at(f, {0, 1}, parse("T(z)"));
  REQUIRE(equal(g, parse("exists x. R(x) & T(z)")));
  // replacement recomputes the cached free-variable sets along the spine
  REQUIRE(g->free == var_set{"z"});

  REQUIRE_THROWS_AS(node_at(f, {0, 1, 0}), invalid_path);
  REQUIRE_THROWS_AS(node_at(f, {1}), invalid_path);
  REQUIRE_THROWS_AS(replace_at(f, {2}, parse("T(z)")), invalid_path);
}

TEST_CASE("chain flattening", "[formula]") {
  formula f = parse("R(x) & (S(y) & T(z)) & U(w)");
  std::vector<formula> out = conjuncts(f);
  REQUIRE(out.size() == 4);
  REQUIRE(out[0]->at.relation == "R");
  REQUIRE(out[3]->at.relation == "U");

  REQUIRE(disjuncts(parse("R(x)")).size() == 1);
  REQUIRE(disjuncts(parse("R(x) | S(y)")).size() == 2);
}

TEST_CASE("standardized formulas", "[formula]") {
  REQUIRE(is_standardized(parse("exists x. R(x,y)")));
  REQUIRE(is_standardized(
      parse("forall y. forall z. exists v1. exists v3. exists v2. "
            "T(y,z) | E(v1,v2) & (E(v2,v3) & E(v3,z))")));
  // the same variable quantified twice
  REQUIRE_FALSE(is_standardized(parse("(exists x. R(x)) & (exists x. S(x))")));
  // a quantified variable that is also free elsewhere
  REQUIRE_FALSE(is_standardized(
      parse("(exists w. E(u,w) & E(w,v)) & (exists u. E(v,u) & E(u,w))")));
  // shadowing
  REQUIRE_FALSE(is_standardized(parse("exists x. (exists x. R(x))")));
}

TEST_CASE("standardize renames apart and preserves shape", "[formula]") {
  formula f =
      parse("(exists w. E(u,w) & E(w,v)) & (exists u. E(v,u) & E(u,w))");
  formula g = standardize(f);
  REQUIRE(is_standardized(g));
  REQUIRE(g->free == f->free);
  REQUIRE(width(g) == width(f));
  REQUIRE(size(g) == size(f));
  // already-standardized input comes back untouched
  formula h = parse("exists x. R(x,y)");
  REQUIRE(equal(standardize(h), h));
}

TEST_CASE("fresh names skip everything already in use", "[formula]") {
  formula f = parse("exists _q0. R(_q0,_q2)");
  fresh_namer fresh(f);
  REQUIRE(fresh.next() == "_q1");
  REQUIRE(fresh.next() == "_q3");
  REQUIRE(fresh.next() == "_q4");
}

TEST_CASE("renaming a free variable stops at rebinding", "[formula]") {
  formula f = parse("R(x) & (exists x. S(x))");
  formula g = rename_free(f, "x", "z");
  REQUIRE(equal(g, parse("R(z) & (exists x. S(x))")));
  REQUIRE(equal(rename_free(parse("R(y)"), "x", "z"), parse("R(y)")));
}

TEST_CASE("name collection", "[formula]") {
  formula f = parse("exists x. R(x,y) & (forall z. S(z))");
  std::vector<std::string> quantified;
  collect_quantified(f, quantified);
  REQUIRE(quantified == std::vector<std::string>{"x", "z"});
  std::set<std::string> names;
  collect_all_names(f, names);
  REQUIRE(names == std::set<std::string>{"x", "y", "z"});
}
