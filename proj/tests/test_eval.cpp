#include <catch2/catch_amalgamated.hpp>

#include <widthmin/eval.hpp>
#include <widthmin/oracles.hpp>

#include "generators.hpp"

using namespace widthmin;

namespace {

const char* kCycle5 =
    "# directed 5-cycle\n"
    "domain 5\n"
    "E 2\n"
    "0 1\n"
    "1 2\n"
    "2 3\n"
    "3 4\n"
    "4 0\n";

std::set<std::vector<int>> rows_of(const char* formula_text,
                                   const structure& s) {
  return evaluate(nnf(parse_nnf_input(formula_text)), s).rows;
}

}  // namespace

TEST_CASE("structure parsing round-trips through printing") {
  structure s = parse_structure(kCycle5);
  REQUIRE(s.domain_size == 5);
  REQUIRE(s.relations.at("E").first == 2);
  REQUIRE(s.relations.at("E").second.size() == 5);
  REQUIRE(s.relations.at("E").second.count({4, 0}) == 1);

  structure t = parse_structure(to_string(s));
  REQUIRE(t.domain_size == s.domain_size);
  REQUIRE(t.relations == s.relations);
}

TEST_CASE("structure parsing rejects malformed input") {
  REQUIRE_THROWS_AS(parse_structure(""), parse_error);
  REQUIRE_THROWS_AS(parse_structure("E 2\n0 1\n"), parse_error);
  REQUIRE_THROWS_AS(parse_structure("domain 0\n"), parse_error);
  REQUIRE_THROWS_AS(parse_structure("domain 2\nE 2\n0 5\n"), parse_error);
  REQUIRE_THROWS_AS(parse_structure("domain 2\nE 2\n0\n"), parse_error);
  REQUIRE_THROWS_AS(parse_structure("domain 2\nE 1\nE 2\n"), parse_error);
  REQUIRE_THROWS_AS(parse_structure("domain 2\n0 1\n"), parse_error);
  REQUIRE_THROWS_AS(parse_structure("domain 2\nE 0\n"), parse_error);

  // comments and blank lines are fine anywhere
  REQUIRE_NOTHROW(parse_structure("# intro\n\ndomain 1\n\nR 1 # unary\n0\n"));
}

TEST_CASE("sentences evaluate to an empty-schema relation") {
  structure cycle = parse_structure(kCycle5);
  formula two_step = parse("exists x. exists y. exists z. E(x,y) & E(y,z)");

  assignment_relation r = evaluate(two_step, cycle);
  REQUIRE(r.schema.empty());
  REQUIRE(r.rows == std::set<std::vector<int>>{{}});
  REQUIRE(holds(two_step, cycle));

  structure chain = parse_structure("domain 2\nE 2\n0 1\n");
  REQUIRE(evaluate(two_step, chain).rows.empty());
  REQUIRE_FALSE(holds(two_step, chain));
}

TEST_CASE("open formulas list their satisfying assignments") {
  structure cycle = parse_structure(kCycle5);

  assignment_relation edges = evaluate(parse("E(x,y)"), cycle);
  REQUIRE(edges.schema == std::vector<std::string>{"x", "y"});
  REQUIRE(edges.rows.size() == 5);
  REQUIRE(edges.rows.count({0, 1}) == 1);
  REQUIRE(edges.rows.count({1, 0}) == 0);

  // join on the shared middle variable: consecutive edge pairs
  assignment_relation paths = evaluate(parse("E(x,y) & E(y,z)"), cycle);
  REQUIRE(paths.schema == std::vector<std::string>{"x", "y", "z"});
  REQUIRE(paths.rows.size() == 5);
  REQUIRE(paths.rows.count({0, 1, 2}) == 1);

  // projection drops the joined column
  assignment_relation ends =
      evaluate(parse("exists y. E(x,y) & E(y,z)"), cycle);
  REQUIRE(ends.schema == std::vector<std::string>{"x", "z"});
  REQUIRE(ends.rows.count({0, 2}) == 1);
}

TEST_CASE("universal quantification divides by the domain") {
  structure s = parse_structure("domain 2\nE 2\n0 0\n1 0\n");
  assignment_relation sinks = evaluate(parse("forall x. E(x,y)"), s);
  REQUIRE(sinks.schema == std::vector<std::string>{"y"});
  REQUIRE(sinks.rows == std::set<std::vector<int>>{{0}});

  REQUIRE(holds(parse("forall x. exists y. E(x,y)"), s));
  REQUIRE_FALSE(holds(parse("exists y. forall x. E(y,x)"), s));
}

TEST_CASE("disjunction pads both sides to the union schema") {
  structure s = parse_structure("domain 2\nR 1\n0\nS 1\n1\n");
  std::set<std::vector<int>> rows = rows_of("R(x) | S(y)", s);
  REQUIRE(rows == std::set<std::vector<int>>{{0, 0}, {0, 1}, {1, 1}});
}

TEST_CASE("negated atoms evaluate to the complement") {
  structure s = parse_structure("domain 2\nE 2\n0 1\n");
  std::set<std::vector<int>> rows = rows_of("!E(x,y)", s);
  REQUIRE(rows == std::set<std::vector<int>>{{0, 0}, {1, 0}, {1, 1}});
}

TEST_CASE("repeated variables in an atom force equal columns") {
  structure s = parse_structure("domain 3\nE 2\n0 0\n0 1\n1 1\n");
  std::set<std::vector<int>> rows = rows_of("E(x,x)", s);
  REQUIRE(rows == std::set<std::vector<int>>{{0}, {1}});
}

TEST_CASE("a quantifier over an absent variable is the identity") {
  structure cycle = parse_structure(kCycle5);
  REQUIRE(evaluate(parse("exists u. E(x,y)"), cycle) ==
          evaluate(parse("E(x,y)"), cycle));
  REQUIRE(evaluate(parse("forall u. E(x,y)"), cycle) ==
          evaluate(parse("E(x,y)"), cycle));
}

TEST_CASE("evaluation validates the vocabulary") {
  structure s = parse_structure("domain 2\nE 2\n0 1\n");
  REQUIRE_THROWS_AS(evaluate(parse("F(x)"), s), eval_error);
  REQUIRE_THROWS_AS(evaluate(parse("E(x)"), s), eval_error);
  REQUIRE_THROWS_AS(evaluate(parse("E(x) & E(x,y)"), s), eval_error);
  REQUIRE_THROWS_AS(vocabulary(parse("E(x) & E(x,y)")), eval_error);
  REQUIRE_THROWS_AS(holds(parse("E(x,y)"), s), eval_error);
  REQUIRE_THROWS_AS(evaluate(parse_nnf_input("!(E(x,y) & E(y,x))"), s),
                    eval_error);

  structure empty;  // not producible by the parser
  REQUIRE_THROWS_AS(evaluate(parse("E(x,y)"), empty), eval_error);

  REQUIRE(vocabulary(parse("E(x,y) & (exists z. T(z) | E(z,x))")) ==
          std::map<std::string, int>{{"E", 2}, {"T", 1}});
}

TEST_CASE("relational evaluation agrees with assignment enumeration") {
  testgen::rng_t rng(0xe5a1a9a1457ull);
  testgen::gen_options o;
  o.max_atoms = 4;
  o.num_vars = 3;
  o.num_rels = 2;
  o.max_arity = 2;
  o.allow_negation = true;
  for (int trial = 0; trial < 100; ++trial) {
    formula f = testgen::random_formula(rng, o);
    int domain = 1 + testgen::pick(rng, 3);
    structure s = testgen::random_structure(rng, f, domain);
    REQUIRE(evaluate(f, s) == naive_evaluate(f, s));
  }
}
