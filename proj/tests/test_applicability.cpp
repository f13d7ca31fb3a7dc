#include <catch2/catch_amalgamated.hpp>

#include "widthmin/applicability.hpp"
#include "widthmin/oracles.hpp"

using namespace widthmin;

namespace {

// Every witness must satisfy its stated contract: the A/C/O excursion
// reproduces the intermediate form, and the recorded step turns that into
// the result.
void check_contract(const formula& f, const y_step_witness& w) {
  REQUIRE(equal(replay(f, w.aco_trace), w.intermediate));
  REQUIRE(equal(apply(w.intermediate, w.r, w.step_path), w.result));
}

}  // namespace

TEST_CASE("quantifier surveys", "[applicability]") {
  formula f = parse("exists a. (forall b. R(b)) & (exists c. S(c))");
  REQUIRE(quantifier_paths(f) ==
          std::vector<path>{{}, {0, 0}, {0, 1}});
  REQUIRE(quantifier_paths(f, true) ==
          std::vector<path>{{0, 0}, {0, 1}, {}});
  REQUIRE(quantifier_paths(parse("R(x)")).empty());
}

TEST_CASE("removable quantifiers", "[applicability]") {
  REQUIRE(removable_quantifiers(parse("exists x. R(x)")).empty());
  REQUIRE(removable_quantifiers(parse("exists x. R(y)")) ==
          std::vector<path>{{}});
  formula f = parse("exists a. (exists b. R(a)) & (forall c. S(c))");
  REQUIRE(removable_quantifiers(f) == std::vector<path>{{0, 0}});
}

TEST_CASE("pushdown without preparation", "[applicability]") {
  formula f = parse("exists x. S(x) & R(y)");
  auto w = find_pushdown_aco(f);
  REQUIRE(w);
  REQUIRE(w->r == rule::pushdown);
  REQUIRE(w->aco_trace.empty());
  REQUIRE(to_string(w->result) == "(exists x. S(x)) & R(y)");
  check_contract(f, *w);
}

TEST_CASE("pushdown after one commutation", "[applicability]") {
  // the x-free operand sits on the left and has to move right first
  formula f = parse("exists x. R(y) & S(x)");
  auto w = find_pushdown_aco(f);
  REQUIRE(w);
  REQUIRE(to_string(w->aco_trace) == "C path=[0]\n");
  REQUIRE(to_string(w->result) == "(exists x. S(x)) & R(y)");
  check_contract(f, *w);
}

TEST_CASE("pushdown below a same-kind chain", "[applicability]") {
  // exists y must first sink below exists x to reach the conjunction
  formula f = parse("exists y. exists x. E(x,y) & T(x)");
  auto w = find_pushdown_aco(f);
  REQUIRE(w);
  REQUIRE(to_string(w->aco_trace) == "O path=[]\n");
  REQUIRE(w->step_path == path{0});
  REQUIRE(to_string(w->result) == "exists x. (exists y. E(x,y)) & T(x)");
  check_contract(f, *w);
}

TEST_CASE("pushdown extracts an operand from the middle of a chain",
          "[applicability]") {
  formula f = parse("exists x. R(x) & (S(y) & T(x))");
  auto w = find_pushdown_aco(f);
  REQUIRE(w);
  REQUIRE(to_string(w->aco_trace) ==
          "C path=[0,1]\n"
          "A_assoc_left path=[0]\n");
  REQUIRE(to_string(w->result) == "(exists x. R(x) & T(x)) & S(y)");
  check_contract(f, *w);
}

TEST_CASE("pushdown right-combs a left-nested chain", "[applicability]") {
  formula f = parse("(exists x. (R(x) & S(y)) & T(x))");
  auto w = find_pushdown_aco(f);
  REQUIRE(w);
  REQUIRE(to_string(w->result) == "(exists x. R(x) & T(x)) & S(y)");
  check_contract(f, *w);
}

TEST_CASE("pushdown reports inapplicability", "[applicability]") {
  REQUIRE_FALSE(find_pushdown_aco(parse("exists x. R(x) & S(x)")));
  REQUIRE_FALSE(find_pushdown_aco(parse("exists x. exists y. E(x,y)")));
  REQUIRE_FALSE(find_pushdown_aco(parse("R(x) & S(y)")));
  // a forall cannot push over a conjunction
  REQUIRE_FALSE(find_pushdown_aco(parse("forall x. R(x) & S(y)")));
}

TEST_CASE("pushdown and splitdown insist on M running first",
          "[applicability]") {
  formula f = parse("exists x. R(y) & S(y)");
  REQUIRE_THROWS_AS(find_pushdown_aco(f), precondition_error);
  REQUIRE_THROWS_AS(find_splitdown(f), precondition_error);
}

TEST_CASE("splitdown finds the first quantifier on its split connective",
          "[applicability]") {
  formula f = parse("exists x. R(x) | S(x)");
  auto w = find_splitdown(f);
  REQUIRE(w);
  REQUIRE(w->r == rule::splitdown);
  REQUIRE(w->aco_trace.empty());
  REQUIRE(to_string(w->result) == "(exists x. R(x)) | (exists x. S(x))");
  check_contract(f, *w);

  auto v = find_splitdown(parse("forall x. R(x) & S(x)"));
  REQUIRE(v);
  REQUIRE(to_string(v->result) == "(forall x. R(x)) & (forall x. S(x))");

  REQUIRE_FALSE(find_splitdown(parse("exists x. R(x) & S(x)")));
  REQUIRE_FALSE(find_splitdown(parse("forall x. R(x) | S(x)")));
}

TEST_CASE("the Y step selector prefers M, then pushdown, then splitdown",
          "[applicability]") {
  // a removable quantifier wins over everything
  formula f =
      parse("(exists u. R(y)) & (exists x. S(x) | T(x))");
  auto w = find_Y_step(f);
  REQUIRE(w);
  REQUIRE(w->r == rule::removal);
  REQUIRE(w->step_path == path{0});
  REQUIRE(to_string(w->result) == "R(y) & (exists x. S(x) | T(x))");
  check_contract(f, *w);

  // pushdown wins over splitdown
  formula g =
      parse("(exists x. R(x) & S(y)) & (exists z. U(z) | V(z))");
  auto wg = find_Y_step(g);
  REQUIRE(wg);
  REQUIRE(wg->r == rule::pushdown);
  check_contract(g, *wg);

  // splitdown is the last resort
  formula h = parse("exists x. R(x) | S(x)");
  auto wh = find_Y_step(h);
  REQUIRE(wh);
  REQUIRE(wh->r == rule::splitdown);

  // nothing applies on a normal form
  REQUIRE_FALSE(find_Y_step(parse("(exists x. R(x)) & (exists y. S(y))")));
  REQUIRE_FALSE(find_Y_step(parse("R(x)")));
}

TEST_CASE("the region multiset is invariant under A/C/O", "[applicability]") {
  formula f = parse("exists x. exists y. exists t. R(x,t) & S(t,y)");
  formula g = parse("exists y. exists x. exists t. S(t,y) & R(x,t)");
  auto rf = organize(f);
  auto rg = organize(g);
  const auto& tf = *std::get<std::shared_ptr<const region_tree>>(rf);
  const auto& tg = *std::get<std::shared_ptr<const region_tree>>(rg);
  REQUIRE(mset_T(tf.skeleton, tf.assoc) == mset_T(tg.skeleton, tg.assoc));

  // pushing a quantifier down changes neither region nor multiset
  formula h = parse("exists t. (exists x. R(x,t)) & (exists y. S(t,y))");
  auto rh = organize(h);
  const auto& th = *std::get<std::shared_ptr<const region_tree>>(rh);
  REQUIRE(mset_T(tf.skeleton, tf.assoc) == mset_T(th.skeleton, th.assoc));

  // a disconnected conjunction merges into two blocks, not one
  formula k = parse("exists x. exists y. R(x) & S(y)");
  auto rk = organize(k);
  const auto& tk = *std::get<std::shared_ptr<const region_tree>>(rk);
  REQUIRE(mset_T(tf.skeleton, tf.assoc) != mset_T(tk.skeleton, tk.assoc));
}
