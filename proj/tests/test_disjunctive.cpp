#include <catch2/catch_amalgamated.hpp>

#include "mucalc/disjunctive.hpp"
#include "mucalc/mcgame.hpp"
#include "generators.hpp"

using namespace mucalc;

namespace {

// bounded-model equivalence over all structures with <= max_states states;
// judged by the independent denotational evaluator
bool equivalent_bounded(const Formula& a, const Formula& b, int max_states) {
  std::set<std::string> props;
  collect_props(a.root, props);
  collect_props(b.root, props);
  std::set<std::string> acts(a.alphabet.begin(), a.alphabet.end());
  acts.insert(b.alphabet.begin(), b.alphabet.end());
  bool same = true;
  enumerate_lts(max_states, {props.begin(), props.end()}, {acts.begin(), acts.end()},
                [&](const Lts& m) {
                  if (testgen::denote(m, a) != testgen::denote(m, b)) same = false;
                  return same;
                });
  return same;
}

bool admits_21(const Formula& g) {
  auto info = analyze(g.root);
  auto p1 = compute_assignment_floor(g.root, info, 1);
  return !p1.has_binders || p1.high <= 2;
}

} // namespace

TEST_CASE("is_disjunctive base cases") {
  REQUIRE(is_disjunctive(parse_formula("tt")).first);
  REQUIRE(is_disjunctive(parse_formula("ff")).first);
  REQUIRE(is_disjunctive(parse_formula("P & ~Q")).first);
  REQUIRE(is_disjunctive(parse_formula("P | Q")).first);
  REQUIRE_FALSE(is_disjunctive(parse_formula("<a>P & <a>Q")).first);
  // sugar-expanded Odd-choice formula
  auto f = parse_formula("(P & ~Q) & <a>S & <a>R & [a](S | R)");
  REQUIRE(is_disjunctive(f).first);
  // the box disjunct set must match the diamonds
  REQUIRE_FALSE(is_disjunctive(parse_formula("<a>S & [a](S | R)")).first);
  REQUIRE(is_disjunctive(parse_formula("[a]ff")).first);
  REQUIRE(is_disjunctive(parse_formula("mu X. (B & [a]ff) | (A & <a>X & [a]X)")).first);
  // conjunction of modal formulas outside the odd-choice shape
  auto bad = is_disjunctive(parse_formula("[a]P & [a]Q"));
  REQUIRE_FALSE(bad.first);
  REQUIRE(bad.second != nullptr);
}

TEST_CASE("next_choices on handmade formulas") {
  // f itself an odd-choice: single zero-step trace
  auto f = parse_formula("A & <a>S & [a]S");
  FormulaSystem sys(f);
  auto steps = next_choices(sys, f.root.get(), {"A"});
  REQUIRE(steps.size() == 1);
  REQUIRE(steps[0].source == f.root.get());
  REQUIRE(steps[0].target == f.root.get());
  REQUIRE(steps[0].max_priority == -1);
  // A not in P: no respecting targets
  REQUIRE(next_choices(sys, f.root.get(), {}).empty());

  // one unfolding through a mu-variable sees its priority
  auto g = parse_formula("mu X. (A & <a>X & [a]X) | (B & [a]ff)");
  FormulaSystem gs(g);
  auto info = analyze(g.root);
  const FNode* body = g.root->l.get();
  // from the binder body with P = {A, B}: both disjuncts respect P
  auto st = next_choices(gs, g.root.get(), {"A", "B"});
  REQUIRE(st.size() == 2);
  for (auto& s : st) REQUIRE(s.max_priority == -1);
  // from the variable occurrence, the trace crosses priority 1
  const FNode* var = nullptr;
  for_each_node(g.root, [&](const FPtr& n) {
    if (n->kind == FKind::Var) var = n.get();
  });
  auto sv = next_choices(gs, var, {"A", "B"});
  REQUIRE(sv.size() == 2);
  for (auto& s : sv) REQUIRE(s.max_priority == 1);
  (void)body;
  (void)info;
}

TEST_CASE("to_disjunctive is stable on disjunctive input") {
  auto f = parse_formula("mu X. (B & [a]ff) | (A & <a>X & [a]X)");
  auto d = to_disjunctive(f);
  REQUIRE(is_disjunctive(d).first);
  REQUIRE(d == f);
}

TEST_CASE("to_disjunctive on a conjunction of diamonds") {
  auto f = parse_formula("<a>P & <a>Q");
  auto d = to_disjunctive(f);
  REQUIRE(is_disjunctive(d).first);
  REQUIRE(equivalent_bounded(f, d, 3));
}

TEST_CASE("to_disjunctive keeps the diamond example in Pi2") {
  auto f = parse_formula("nu Y. mu X. (A & <.>X) | (B & <.>Y)");
  auto d = to_disjunctive(f);
  REQUIRE(is_disjunctive(d).first);
  REQUIRE(admits_21(d));
  REQUIRE(equivalent_bounded(f, d, 3));
}

TEST_CASE("to_disjunctive of the box example and its negation") {
  auto f = parse_formula("nu Y. mu X. (A & [.]X) | (B & <.>Y)");
  auto d = to_disjunctive(f);
  REQUIRE(is_disjunctive(d).first);
  REQUIRE(admits_21(d));
  REQUIRE(equivalent_bounded(f, d, 3));

  // the negation is Sigma2: exercises the Safra route
  auto nf = negate(f);
  auto nd = to_disjunctive(nf);
  REQUIRE(is_disjunctive(nd).first);
  REQUIRE(equivalent_bounded(nf, nd, 3));
}

TEST_CASE("random corpus: outputs are disjunctive") {
  int done = 0;
  for (uint64_t seed = 0; done < 500; ++seed) {
    testgen::FormulaGenOpts o;
    o.max_depth = 3;
    auto f = testgen::gen_formula(seed, o);
    Formula d;
    try {
      d = to_disjunctive(f);
    } catch (const std::runtime_error&) {
      continue; // resource cap hit; not a correctness failure
    }
    CAPTURE(seed, serialize(f));
    REQUIRE(is_disjunctive(d).first);
    ++done;
  }
}

TEST_CASE("random corpus: bounded-model equivalence") {
  int done = 0;
  for (uint64_t seed = 0; done < 60; ++seed) {
    testgen::FormulaGenOpts o;
    o.max_depth = 3;
    o.props = {"P"};
    auto f = testgen::gen_formula(seed, o);
    Formula d;
    try {
      d = to_disjunctive(f);
    } catch (const std::runtime_error&) {
      continue;
    }
    if (formula_size(d.root) > 20000) continue; // affordable checks only
    CAPTURE(seed, serialize(f), serialize(d));
    REQUIRE(equivalent_bounded(f, d, 3));
    ++done;
  }
}

TEST_CASE("random Pi2 corpus keeps index {2,1} or lower") {
  int done = 0;
  for (uint64_t seed = 1000; done < 120; ++seed) {
    testgen::FormulaGenOpts o;
    o.max_depth = 4;
    auto f = testgen::gen_formula(seed, o);
    if (!admits_21(f)) continue;
    Formula d;
    try {
      d = to_disjunctive(f);
    } catch (const std::runtime_error&) {
      continue;
    }
    CAPTURE(seed, serialize(f));
    REQUIRE(admits_21(d));
    ++done;
  }
}
