#ifndef MSGW_TESTS_SUPPORT_HPP
#define MSGW_TESTS_SUPPORT_HPP

#include <random>
#include <vector>

#include "msgw/core.hpp"
#include "msgw/formula.hpp"

namespace msgw::testing {

inline StructurePtr LO(int n) { return gen_linear_order(n); }
inline StructurePtr RT3() { return gen_rt3(); }
inline StructurePtr RT4() { return gen_rt4(); }

// Example with two unary predicates: A = {R(a1), G(a2)}, B = {R(b)}, C = {G(c)}.
inline SchemaPtr rg_schema() {
  static SchemaPtr s = std::make_shared<Schema>(
      std::vector<RelationDecl>{{"R", 1}, {"G", 1}}, std::vector<std::string>{});
  return s;
}

inline StructurePtr rg_A() {
  static StructurePtr p = [] {
    auto s = std::make_shared<Structure>(rg_schema(), 2, "A");
    s->add_tuple("R", {0});
    s->add_tuple("G", {1});
    s->finalize();
    return StructurePtr(s);
  }();
  return p;
}

inline StructurePtr rg_B() {
  static StructurePtr p = [] {
    auto s = std::make_shared<Structure>(rg_schema(), 1, "B");
    s->add_tuple("R", {0});
    s->finalize();
    return StructurePtr(s);
  }();
  return p;
}

inline StructurePtr rg_C() {
  static StructurePtr p = [] {
    auto s = std::make_shared<Structure>(rg_schema(), 1, "C");
    s->add_tuple("G", {0});
    s->finalize();
    return StructurePtr(s);
  }();
  return p;
}

// The worked sentences over the order schema.

// ALL x1 . EX x2 . EX x3 . ((x1<x2 & x2<x3) | (x2<x3 & x3<x1))
inline FormulaPtr phi3_forall() {
  auto v = [](int i) { return Term::variable(i); };
  auto lt = [&](int a, int b) { return mk_atom("<", {v(a), v(b)}); };
  return mk_forall(1, mk_exists(2, mk_exists(3,
      mk_or(mk_and(lt(1, 2), lt(2, 3)), mk_and(lt(2, 3), lt(3, 1))))));
}

// EX x1 . ALL x2 . EX x3 . ((x2<x1 -> x1<x3) & (x1<x2 -> (x3!=x2 & x1<x3))
//                           & (x2=x1 -> x3<x1))
inline FormulaPtr phi3_exists() {
  auto v = [](int i) { return Term::variable(i); };
  auto lt = [&](int a, int b) { return mk_atom("<", {v(a), v(b)}); };
  auto imp = [](FormulaPtr a, FormulaPtr b) { return mk_or(mk_not(a), b); };
  FormulaPtr c1 = imp(lt(2, 1), lt(1, 3));
  FormulaPtr c2 = imp(lt(1, 2), mk_and(mk_not(mk_eq(v(3), v(2))), lt(1, 3)));
  FormulaPtr c3 = imp(mk_eq(v(2), v(1)), lt(3, 1));
  return mk_exists(1, mk_forall(2, mk_exists(3, mk_and(mk_and(c1, c2), c3))));
}

// ALL x1 . EX x2 . EX x3 . (x1<x2<x3 | x2<x3<x1 | (inc(x1,x2) & inc(x1,x3) & x2!=x3))
inline FormulaPtr psi3_forall() {
  auto v = [](int i) { return Term::variable(i); };
  auto lt = [&](int a, int b) { return mk_atom("<", {v(a), v(b)}); };
  auto inc = [&](int a, int b) {
    return mk_and(mk_and(mk_not(lt(a, b)), mk_not(lt(b, a))), mk_not(mk_eq(v(a), v(b))));
  };
  FormulaPtr d1 = mk_and(lt(1, 2), lt(2, 3));
  FormulaPtr d2 = mk_and(lt(2, 3), lt(3, 1));
  FormulaPtr d3 = mk_and(mk_and(inc(1, 2), inc(1, 3)), mk_not(mk_eq(v(2), v(3))));
  return mk_forall(1, mk_exists(2, mk_exists(3, mk_or(mk_or(d1, d2), d3))));
}

// EX x1 . (EX x2 . x2<x1 & EX x2 . x1<x2) -- the three-quantifier separator.
inline FormulaPtr three_quant_sep() {
  auto v = [](int i) { return Term::variable(i); };
  auto lt = [&](Term a, Term b) { return mk_atom("<", {a, b}); };
  return mk_exists(1, mk_and(mk_exists(2, lt(v(2), v(1))), mk_exists(2, lt(v(1), v(2)))));
}

// Random quantifier-free-or-quantified formulas over the order schema with
// variables x1..xk, for round-trip and transformation tests.
inline FormulaPtr random_formula(std::mt19937_64& rng, int depth, int k) {
  auto v = [&](int i) { return Term::variable(i); };
  std::uniform_int_distribution<int> var(1, k);
  if (depth == 0) {
    std::uniform_int_distribution<int> pick(0, 1);
    if (pick(rng))
      return mk_atom("<", {v(var(rng)), v(var(rng))});
    return mk_eq(v(var(rng)), v(var(rng)));
  }
  std::uniform_int_distribution<int> pick(0, 4);
  switch (pick(rng)) {
    case 0: return mk_not(random_formula(rng, depth - 1, k));
    case 1: return mk_and(random_formula(rng, depth - 1, k), random_formula(rng, depth - 1, k));
    case 2: return mk_or(random_formula(rng, depth - 1, k), random_formula(rng, depth - 1, k));
    case 3: return mk_exists(var(rng), random_formula(rng, depth - 1, k));
    default: return mk_forall(var(rng), random_formula(rng, depth - 1, k));
  }
}

// Random structure over the order schema (arbitrary binary relation).
inline StructurePtr random_structure(std::mt19937_64& rng, int max_size) {
  std::uniform_int_distribution<int> size(1, max_size);
  int n = size(rng);
  auto s = std::make_shared<Structure>(order_schema(), n);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (bit(rng)) s->add_tuple("<", {i, j});
  s->finalize();
  return s;
}

}  // namespace msgw::testing

#endif
