// acceptance -- end-to-end checks of the documented guarantees, one line of
// output per criterion.  Exit status 0 only if every criterion passes.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <widthmin/minimize.hpp>
#include <widthmin/oracles.hpp>

#include "generators.hpp"

using namespace widthmin;

namespace {

int failures = 0;

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

// Runs one criterion; the body returns an empty string on success or a
// reason on failure.  A time limit of 0 means "no limit".
void criterion(int n, const std::string& label, double limit_ms,
               const std::function<std::string()>& body) {
  double start = now_ms();
  std::string reason;
  try {
    reason = body();
  } catch (const std::exception& e) {
    reason = std::string("unexpected exception: ") + e.what();
  }
  double elapsed = now_ms() - start;
  if (reason.empty() && limit_ms > 0 && elapsed > limit_ms) {
    std::ostringstream os;
    os << "took " << elapsed << " ms, limit " << limit_ms << " ms";
    reason = os.str();
  }
  if (reason.empty()) {
    std::printf("[PASS] criterion %d: %s (%.1f ms)\n", n, label.c_str(),
                elapsed);
  } else {
    std::printf("[FAIL] criterion %d: %s -- %s\n", n, label.c_str(),
                reason.c_str());
    ++failures;
  }
  std::fflush(stdout);
}

const char* kRole = "exists x. exists y. exists t. R(x,t) & S(t,y)";
const char* kPhi0 =
    "forall y. forall z. exists v1. exists v3. exists v2. "
    "T(y,z) | E(v1,v2) & (E(v2,v3) & E(v3,z))";
const char* kPhi5 =
    "forall z. (forall y. T(y,z)) | "
    "(exists v3. ((exists v2. (exists v1. E(v1,v2)) & E(v2,v3)) & E(v3,z)))";

formula adler(int n) {
  auto xi = [](int i) { return "x" + std::to_string(i); };
  formula body = mk_atom("E" + std::to_string(n), {xi(n), "y"});
  for (int i = n - 1; i >= 1; --i)
    body = mk_conj(mk_atom("E" + std::to_string(i), {xi(i), "y"}), body);
  formula f = mk_forall("y", body);
  for (int i = n; i >= 1; --i) f = mk_exists(xi(i), f);
  return f;
}

void atom_edges(const formula& f, hypergraph& h) {
  if (f->kind == fkind::atom) {
    add_edge(h, var_set(f->at.args.begin(), f->at.args.end()));
    return;
  }
  if (f->lhs) atom_edges(f->lhs, h);
  if (f->rhs) atom_edges(f->rhs, h);
}

int count_quantifiers(const formula& f) {
  int n = is_quantifier(f->kind) ? 1 : 0;
  if (f->lhs) n += count_quantifiers(f->lhs);
  if (f->rhs) n += count_quantifiers(f->rhs);
  return n;
}

std::string check_width(const formula& f, int want, const char* what) {
  minimize_result r = minimize(f);
  if (width(r.result) != want) {
    std::ostringstream os;
    os << what << " minimized to width " << width(r.result) << ", expected "
       << want;
    return os.str();
  }
  return "";
}

double time_eval_ms(const formula& f, const structure& s) {
  double t0 = now_ms();
  assignment_relation r = evaluate(f, s);
  double once = now_ms() - t0;
  (void)r;
  if (once >= 30.0) return once;
  int reps = static_cast<int>(30.0 / (once < 0.01 ? 0.01 : once)) + 1;
  t0 = now_ms();
  for (int i = 0; i < reps; ++i) evaluate(f, s);
  return (now_ms() - t0) / reps;
}

}  // namespace

int main() {
  // 1. the reordering example reaches width 2
  criterion(1, "reordering example minimizes to width 2", 100, [] {
    formula role = parse(kRole);
    if (width(role) != 3) return std::string("input width is not 3");
    return check_width(role, 2, "role chain");
  });

  // 2. the guarded family collapses from width n+1 to 2 for n = 1..8
  criterion(2, "guarded family minimizes to width 2 for n=1..8", 1000, [] {
    for (int n = 1; n <= 8; ++n) {
      formula f = adler(n);
      if (width(f) != n + 1)
        return "input width of member " + std::to_string(n) + " is not " +
               std::to_string(n + 1);
      std::string bad =
          check_width(f, 2, ("member " + std::to_string(n)).c_str());
      if (!bad.empty()) return bad;
    }
    return std::string();
  });

  // 3. the worked example: width 2 and rewrite equivalence of the pair
  criterion(3, "worked example minimizes to width 2 and pair is equivalent",
            500, [] {
              std::string bad = check_width(parse(kPhi0), 2, "phi0");
              if (!bad.empty()) return bad;
              if (!rewrite_equiv(parse(kPhi0), parse(kPhi5)))
                return std::string("rewrite_equiv(phi0, phi5) is false");
              return std::string();
            });

  // 4. on {exists,and}-sentences the output width is exactly treewidth+1
  criterion(4, "exists/and sentences minimize to treewidth+1", 30000, [] {
    testgen::rng_t rng(0x4c3a11b85eedull);
    for (int trial = 0; trial < 50; ++trial) {
      formula f = testgen::random_ea_sentence(rng, 8, 6);
      hypergraph h;
      atom_edges(f, h);
      tw_result tw = exact_treewidth(h);
      if (tw.width != brute_treewidth(h))
        return "trial " + std::to_string(trial) +
               ": exact and brute-force treewidth disagree on " +
               to_string(f);
      minimize_result m = minimize(f);
      if (width(m.result) != tw.width + 1)
        return "trial " + std::to_string(trial) + ": " + to_string(f) +
               " minimized to width " + std::to_string(width(m.result)) +
               ", treewidth+1 is " + std::to_string(tw.width + 1);
    }
    return std::string();
  });

  // 5. minimization is semantics-preserving
  criterion(5, "minimize preserves semantics on random formulas", 300000, [] {
    testgen::rng_t rng(0x50d4e55c8ec2ull);
    testgen::gen_options o;
    o.max_atoms = 4;
    o.num_vars = 4;
    o.num_rels = 2;
    o.max_arity = 2;
    for (int trial = 0; trial < 200; ++trial) {
      formula f = testgen::random_formula(rng, o);
      minimize_result m = minimize(f);
      if (!semantically_equiv(f, m.result, 2))
        return "trial " + std::to_string(trial) + ": " + to_string(f) +
               " is not equivalent to " + to_string(m.result);
    }
    return std::string();
  });

  // 6. on tiny formulas the pipeline matches the exhaustive closure minimum
  criterion(6, "minimized width matches the closure minimum", 600000, [] {
    testgen::rng_t rng(0xc105e0f7ca5eull);
    testgen::gen_options o;
    o.max_atoms = 3;
    o.num_vars = 3;
    o.num_rels = 2;
    o.max_arity = 2;
    int accepted = 0, attempts = 0;
    while (accepted < 100) {
      if (++attempts > 5000)
        return std::string("could not find 100 formulas with a complete "
                           "closure in 5000 attempts");
      formula f = testgen::random_formula(rng, o);
      if (count_quantifiers(f) > 3) continue;
      closure_result res = rewrite_closure(f);
      if (res.status != closure_status::complete) continue;
      ++accepted;
      minimize_result m = minimize(f);
      if (width(m.result) != res.min_width)
        return to_string(f) + " minimized to width " +
               std::to_string(width(m.result)) + ", closure minimum is " +
               std::to_string(res.min_width);
    }
    return std::string();
  });

  // 7. termination certificates: the potentials behave as promised
  criterion(7, "potentials certify termination (0 violations)", 0, [] {
    testgen::rng_t rng(0x7e2a1c0de5eedull);
    testgen::gen_options o;
    o.max_atoms = 5;
    o.num_vars = 4;
    o.num_rels = 3;

    // every normalization strictly decreases y at each step, within the
    // cubic step bound
    for (int trial = 0; trial < 1000; ++trial) {
      formula f = testgen::random_formula(rng, o);
      long long cube = 1;
      for (int i = 0; i < 3; ++i) cube *= size(f);
      normal_form_result nf = y_normal_form(f);
      if (static_cast<long long>(nf.reports.size()) > cube)
        return to_string(f) + " took " + std::to_string(nf.reports.size()) +
               " steps, bound " + std::to_string(cube);
      long long prev = y_potential(standardize(f));
      for (const potential_report& rep : nf.reports) {
        if (rep.y_potential >= prev)
          return "y did not strictly decrease at step " +
                 std::to_string(rep.step_index) + " of " + to_string(f);
        prev = rep.y_potential;
      }
    }

    // y' is invariant under the structural rules and strictly decreases
    // under splitdown and removal
    const std::set<rule> t_rules = {
        rule::assoc_left, rule::assoc_right, rule::comm,  rule::reorder,
        rule::pushdown,   rule::pushup,      rule::rename};
    const std::set<rule> y_rules = {rule::splitdown, rule::removal};
    long t_applications = 0;
    while (t_applications < 1000) {
      formula f = standardize(testgen::random_formula(rng, o));
      for (int step = 0; step < 12; ++step) {
        long long yp = yprime_potential(f);
        for (const testgen::rule_candidate& c :
             testgen::applicable_steps(f, y_rules)) {
          formula g = apply(f, c.r, c.at, c.args);
          if (yprime_potential(g) >= yp)
            return std::string("y' did not decrease under ") +
                   rule_name(c.r) + " (" + std::to_string(yp) + " -> " +
                   std::to_string(yprime_potential(g)) + ") on " +
                   to_string(f);
        }
        std::vector<testgen::rule_candidate> ts =
            testgen::applicable_steps(f, t_rules);
        if (ts.empty()) break;
        const testgen::rule_candidate& c =
            ts[testgen::pick(rng, static_cast<int>(ts.size()))];
        formula g = apply(f, c.r, c.at, c.args);
        if (yprime_potential(g) != yp)
          return std::string("y' changed under ") + rule_name(c.r) + " on " +
                 to_string(f);
        ++t_applications;
        f = g;
      }
    }
    return std::string();
  });

  // 8. normal forms of structural shuffles are rewrite-equivalent
  criterion(8, "normal forms absorb structural shuffles (0 violations)", 0,
            [] {
              testgen::rng_t rng(0x5affe15eedull);
              testgen::gen_options o;
              o.max_atoms = 4;
              o.num_vars = 4;
              o.num_rels = 2;
              const std::set<rule> aco = {rule::assoc_left,
                                          rule::assoc_right, rule::comm,
                                          rule::reorder};
              for (int trial = 0; trial < 100; ++trial) {
                formula f = testgen::random_formula(rng, o);
                formula g = testgen::random_walk(f, rng, 8, aco);
                if (!rewrite_equiv(f, g))
                  return "a shuffle of " + to_string(f) +
                         " normalized differently";
              }
              return std::string();
            });

  // 9. the relational evaluator matches assignment enumeration
  criterion(9, "evaluator agrees with assignment enumeration", 0, [] {
    testgen::rng_t rng(0x9a7e5e7e5eedull);
    testgen::gen_options o;
    o.max_atoms = 4;
    o.num_vars = 3;
    o.num_rels = 2;
    o.max_arity = 2;
    o.allow_negation = true;
    for (int trial = 0; trial < 500; ++trial) {
      formula f = testgen::random_formula(rng, o);
      int domain = 1 + testgen::pick(rng, 3);
      structure s = testgen::random_structure(rng, f, domain);
      if (!(evaluate(f, s) == naive_evaluate(f, s)))
        return "divergence on " + to_string(f) + " over a domain of " +
               std::to_string(domain);
    }
    return std::string();
  });

  // 10. the payoff: width 2 evaluates at least 10x faster than width 5
  criterion(10, "width reduction yields a 10x evaluation speedup", 60000, [] {
    formula before = parse(kPhi0);
    formula after = minimize(before).result;
    if (width(before) != 5 || width(after) != 2)
      return std::string("unexpected widths");

    structure s;
    s.domain_size = 10;
    s.relations["T"] = {2, {}};
    auto& e = s.relations["E"];
    e.first = 2;
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j)
        if (i != j) e.second.insert({i, j});

    if (!(evaluate(before, s) == evaluate(after, s)))
      return std::string("verdicts disagree on the benchmark structure");
    double t_before = time_eval_ms(before, s);
    double t_after = time_eval_ms(after, s);
    double speedup = t_before / (t_after > 0 ? t_after : 1e-9);
    if (speedup < 10.0) {
      std::ostringstream os;
      os << "speedup " << speedup << " (" << t_before << " ms vs " << t_after
         << " ms)";
      return os.str();
    }
    return std::string();
  });

  if (failures == 0) {
    std::printf("all 10 criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", failures);
  return 1;
}
