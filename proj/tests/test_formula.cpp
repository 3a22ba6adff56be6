#include <random>

#include "doctest.h"
#include "msgw/formula.hpp"
#include "msgw/measure.hpp"
#include "support.hpp"

using namespace msgw;
using namespace msgw::testing;

TEST_CASE("parsing the worked sentences") {
  auto sch = order_schema();
  auto f = parse_formula("EX x1 . (EX x2 . x2<x1 & EX x2 . x1<x2)", sch);
  CHECK(structurally_equal(f, three_quant_sep()));

  auto g = parse_formula(
      "ALL x1 . EX x2 . EX x3 . ((x1<x2 & x2<x3) | (x2<x3 & x3<x1))", sch);
  CHECK(structurally_equal(g, phi3_forall()));
  PrenexForm pf = split_prenex(g);
  REQUIRE(pf.prefix.size() == 3);
  CHECK(pf.prefix[0].first);       // forall
  CHECK(!pf.prefix[1].first);      // exists
  CHECK(!pf.prefix[2].first);
}

TEST_CASE("prefix-form atoms over other schemas") {
  auto sch = rg_schema();
  auto f = parse_formula("EX x1 . (R(x1) & !G(x1))", sch);
  CHECK(evaluate(f, PebbledStructure(rg_B())));
  CHECK(!evaluate(f, PebbledStructure(rg_C())));
  CHECK(print_formula(f) == "EX x1 . (R(x1) & !G(x1))");
  CHECK_THROWS_AS(parse_formula("EX x1 . R(x1,x1)", sch), error);  // arity
  CHECK_THROWS_AS(parse_formula("EX x1 . x1<x1", sch), error);     // no "<" here
}

TEST_CASE("parse errors") {
  auto sch = order_schema();
  CHECK_THROWS_WITH_AS(parse_formula("EX x1 .", sch), doctest::Contains("syntax error"),
                       error);
  CHECK_THROWS_AS(parse_formula("R(x1)", sch), error);            // unknown relation
  CHECK_THROWS_AS(parse_formula("EX x1 . x1<c", sch), error);     // unknown constant
  CHECK_THROWS_AS(parse_formula("EX x1 . x1<x2 & x2<x1", sch), error);  // bin needs parens
}

TEST_CASE("print/parse round trips") {
  auto sch = order_schema();
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    auto f = random_formula(rng, 3, 3);
    std::string text = print_formula(f);
    auto g = parse_formula(text, sch);
    CHECK(structurally_equal(f, g));
    CHECK(print_formula(g) == text);  // printing is a fixed point
  }
}

TEST_CASE("evaluation of the worked sentences") {
  PebbledStructure lo2(LO(2)), lo3(LO(3)), lo4(LO(4)), rt3(RT3()), rt4(RT4());

  CHECK(evaluate(phi3_forall(), lo4));
  CHECK(!evaluate(phi3_forall(), lo3));

  CHECK(evaluate(phi3_exists(), rt4));
  CHECK(evaluate(phi3_exists(), lo4));
  CHECK(!evaluate(phi3_exists(), rt3));
  CHECK(!evaluate(phi3_exists(), lo3));

  CHECK(evaluate(psi3_forall(), rt4));
  CHECK(evaluate(psi3_forall(), lo4));
  CHECK(!evaluate(psi3_forall(), lo3));

  CHECK(evaluate(three_quant_sep(), lo3));
  CHECK(!evaluate(three_quant_sep(), lo2));

  // x1=x1 holds under any assignment of x1.
  auto triv = mk_eq(Term::variable(1), Term::variable(1));
  for (int e = 0; e < 3; ++e) CHECK(evaluate(triv, lo3.with(1, e)));

  // Unbound free variables are reported by index.
  CHECK_THROWS_WITH_AS(evaluate(mk_atom("<", {Term::variable(2), Term::variable(1)}), lo3.with(1, 0)),
                       doctest::Contains("x2"), error);
}

TEST_CASE("negation flips evaluation") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    auto f = random_formula(rng, 3, 2);
    auto s = random_structure(rng, 4);
    PebbledStructure ps(s);
    ps.assignment.set(1, 0);
    ps.assignment.set(2, s->size() - 1);
    CHECK(evaluate(mk_not(f), ps) == !evaluate(f, ps));
  }
}

TEST_CASE("prenex conversion preserves evaluation and quantifier count") {
  std::mt19937_64 rng(17);
  int done = 0;
  while (done < 500) {
    auto f = random_formula(rng, 4, 2);
    if (!is_sentence(f)) continue;
    ++done;
    auto g = to_prenex(f);
    CHECK(is_prenex(g));
    CHECK(apply_measure(measure_qcount(), f) == apply_measure(measure_qcount(), g));
    for (int n = 1; n <= 4; ++n) {
      PebbledStructure ps(LO(n));
      CHECK(evaluate(f, ps) == evaluate(g, ps));
    }
    auto s = random_structure(rng, 4);
    CHECK(evaluate(f, PebbledStructure(s)) == evaluate(g, PebbledStructure(s)));
  }
}

TEST_CASE("separating sentences") {
  std::vector<PebbledStructure> lo3 = {PebbledStructure(LO(3))};
  std::vector<PebbledStructure> lo2 = {PebbledStructure(LO(2))};
  CHECK(is_separating(three_quant_sep(), lo3, lo2));
  CHECK(!is_separating(three_quant_sep(), lo2, lo3));  // separation is directional

  std::vector<PebbledStructure> left = {PebbledStructure(RT4()), PebbledStructure(LO(4))};
  CHECK(is_separating(psi3_forall(), left, lo3));

  // Domain inconsistency is rejected.
  std::vector<PebbledStructure> bad = {PebbledStructure(LO(3)).with(1, 0)};
  CHECK_THROWS_AS(is_separating(three_quant_sep(), bad, lo2), error);
}

TEST_CASE("measures fold over the tree") {
  CHECK(apply_measure(measure_qcount(), phi3_forall()) == 3);
  CHECK(apply_measure(measure_qcount(), phi3_exists()) == 3);
  CHECK(apply_measure(measure_qcount(), three_quant_sep()) == 3);
  CHECK(apply_measure(measure_qrank(), three_quant_sep()) == 2);
  auto atom = mk_atom("<", {Term::variable(1), Term::variable(2)});
  CHECK(apply_measure(measure_qcount(), atom) == 0);
  CHECK(apply_measure(measure_qrank(), atom) == 0);
  CHECK(apply_measure(measure_fsize(), atom) == 1);
  // size: two quantifiers, one conjunction, two atoms.
  auto f = mk_exists(1, mk_and(mk_exists(2, atom), atom));
  CHECK(apply_measure(measure_fsize(), f) == 5);
}

TEST_CASE("measures agree with direct recursions") {
  std::function<int(const FormulaPtr&)> count = [&](const FormulaPtr& f) -> int {
    switch (f->kind) {
      case Conn::Atom: return 0;
      case Conn::Not: return count(f->child);
      case Conn::And:
      case Conn::Or: return count(f->lhs) + count(f->rhs);
      default: return 1 + count(f->child);
    }
  };
  std::function<int(const FormulaPtr&)> depth = [&](const FormulaPtr& f) -> int {
    switch (f->kind) {
      case Conn::Atom: return 0;
      case Conn::Not: return depth(f->child);
      case Conn::And:
      case Conn::Or: return std::max(depth(f->lhs), depth(f->rhs));
      default: return 1 + depth(f->child);
    }
  };
  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    auto f = random_formula(rng, 4, 3);
    CHECK(apply_measure(measure_qcount(), f) == count(f));
    CHECK(apply_measure(measure_qrank(), f) == depth(f));
  }
}

TEST_CASE("measure preimages map forward") {
  for (const MeasureSpec* m : {&measure_qcount(), &measure_qrank(), &measure_fsize()}) {
    for (int r = 0; r <= 10; ++r) {
      for (int v : m->inv_exists(r)) CHECK(m->h_exists(v) == r);
      for (int v : m->inv_forall(r)) CHECK(m->h_forall(v) == r);
      for (int v : m->inv_not(r)) CHECK(m->h_not(v) == r);
      for (auto [a, b] : m->inv_or(r)) CHECK(m->h_or(a, b) == r);
      for (auto [a, b] : m->inv_and(r)) CHECK(m->h_and(a, b) == r);
    }
  }
}
