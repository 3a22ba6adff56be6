// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs the worked instances exactly; game outcomes admit zero
// tolerance.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "msgw/games.hpp"
#include "msgw/io.hpp"
#include "msgw/synth.hpp"
#include "msgw/types.hpp"

using namespace msgw;

namespace {

int failures = 0;

void report(int criterion, const std::string& what, bool ok, double ms) {
  std::ostringstream os;
  os << (ok ? "PASS" : "FAIL") << " criterion " << criterion << " [" << static_cast<int>(ms)
     << " ms]: " << what;
  std::cout << os.str() << std::endl;
  if (!ok) ++failures;
}

template <typename F>
void criterion(int number, const std::string& what, F body) {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  std::string note;
  try {
    ok = body();
  } catch (const std::exception& e) {
    note = std::string(" (exception: ") + e.what() + ")";
  }
  auto t1 = std::chrono::steady_clock::now();
  report(number, what + note, ok, std::chrono::duration<double, std::milli>(t1 - t0).count());
}

std::vector<StructurePtr> S(std::initializer_list<StructurePtr> xs) { return xs; }

std::vector<PebbledStructure> P(const std::vector<StructurePtr>& xs) {
  std::vector<PebbledStructure> out;
  for (const auto& s : xs) out.emplace_back(s);
  return out;
}

// The worked sentences over the order schema.
FormulaPtr phi3_forall() {
  return parse_formula("ALL x1 . EX x2 . EX x3 . ((x1<x2 & x2<x3) | (x2<x3 & x3<x1))",
                       order_schema());
}

FormulaPtr phi3_exists() {
  return parse_formula(
      "EX x1 . ALL x2 . EX x3 . (((!x2<x1 | x1<x3) & (!x1<x2 | (!x3=x2 & x1<x3))) & "
      "(!x2=x1 | x3<x1))",
      order_schema());
}

FormulaPtr psi3_forall() {
  return parse_formula(
      "ALL x1 . EX x2 . EX x3 . ((x1<x2 & x2<x3) | ((x2<x3 & x3<x1) | "
      "((((!x1<x2 & !x2<x1) & !x1=x2) & ((!x1<x3 & !x3<x1) & !x1=x3)) & !x2=x3)))",
      order_schema());
}

FormulaPtr three_quant_sep() {
  return parse_formula("EX x1 . (EX x2 . x2<x1 & EX x2 . x1<x2)", order_schema());
}

StructurePtr random_order_structure(std::mt19937_64& rng, int max_size) {
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

SchemaPtr rg_schema() {
  static SchemaPtr s = std::make_shared<Schema>(
      std::vector<RelationDecl>{{"R", 1}, {"G", 1}}, std::vector<std::string>{});
  return s;
}

StructurePtr rg(const std::string& name, int size, std::vector<int> reds,
                std::vector<int> greens) {
  auto s = std::make_shared<Structure>(rg_schema(), size, name);
  for (int e : reds) s->add_tuple("R", {e});
  for (int e : greens) s->add_tuple("G", {e});
  s->finalize();
  return s;
}

}  // namespace

int main() {
  auto LO2 = gen_linear_order(2), LO3 = gen_linear_order(3), LO4 = gen_linear_order(4);
  auto RT3 = gen_rt3(), RT4 = gen_rt4();
  auto A = rg("A", 2, {0}, {1});
  auto B = rg("B", 1, {0}, {});
  auto C = rg("C", 1, {}, {0});

  criterion(1, "two quantifiers fail, three suffice on LO(3) vs LO(2)", [&] {
    return decide_ms(S({LO3}), S({LO2}), 2).winner == Player::Duplicator &&
           decide_ms(S({LO3}), S({LO2}), 3).winner == Player::Spoiler;
  });

  criterion(2, "one-round game on the two-unary-predicate example", [&] {
    return decide_ms(S({A}), S({B}), 1).winner == Player::Spoiler &&
           decide_ms(S({A}), S({C}), 1).winner == Player::Spoiler &&
           decide_ms(S({A}), S({B, C}), 1).winner == Player::Duplicator;
  });

  criterion(3, "no-duplication game matches the copying game at desk scale", [&] {
    bool main_instance =
        decide_ms_no_duplication({{LO3, 9}}, {{LO2, 4}}, 2).winner == Player::Duplicator &&
        decide_ms(S({LO3}), S({LO2}), 2).winner == Player::Duplicator;
    if (!main_instance) return false;
    // Sweep: all structures of size <= 2 over one binary relation, plus
    // seeded size-3 samples, with n^r copies per side.
    std::vector<StructurePtr> pool;
    for (int n = 1; n <= 2; ++n)
      for (int bits = 0; bits < (1 << (n * n)); ++bits) {
        auto s = std::make_shared<Structure>(order_schema(), n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            if ((bits >> (i * n + j)) & 1) s->add_tuple("<", {i, j});
        s->finalize();
        pool.push_back(s);
      }
    std::vector<std::pair<StructurePtr, StructurePtr>> pairs;
    for (const auto& a : pool)
      for (const auto& b : pool) pairs.emplace_back(a, b);
    std::mt19937_64 rng(2026);
    for (int i = 0; i < 50; ++i)
      pairs.emplace_back(random_order_structure(rng, 3), random_order_structure(rng, 3));
    for (const auto& [a, b] : pairs)
      for (int r = 1; r <= 2; ++r) {
        int ca = 1, cb = 1;
        for (int t = 0; t < r; ++t) {
          ca *= a->size();
          cb *= b->size();
        }
        if (decide_ms(S({a}), S({b}), r).winner !=
            decide_ms_no_duplication({{a, ca}}, {{b, cb}}, r).winner)
          return false;
      }
    return true;
  });

  criterion(4, "mixed trees/orders: Spoiler wins, but only on top", [&] {
    auto left = S({RT4, LO4});
    auto right = S({RT3, LO3});
    return decide_ms(left, right, 3).winner == Player::Spoiler &&
           decide_ms_no_on_top(left, right, 3, OnTopPolicy::ForbidBoth).winner ==
               Player::Duplicator;
  });

  criterion(5, "pure rooted trees: Spoiler wins without playing on top", [&] {
    return decide_ms_no_on_top(S({RT4}), S({RT3}), 3, OnTopPolicy::ForbidBoth).winner ==
           Player::Spoiler;
  });

  criterion(6, "sentence-driven traces and replication verdicts", [&] {
    auto tr1 = follow_sentence(phi3_forall(), S({LO4}), S({LO3}));
    auto tr2 = follow_sentence(psi3_forall(), S({RT4, LO4}), S({LO3}));
    bool traces = tr1.spoiler_won && tr1.on_top_moves == 0 && tr2.spoiler_won &&
                  tr2.on_top_moves == 0;
    bool verdicts =
        classify_sentence(phi3_forall()).verdict == Replication::NonReplicating &&
        classify_negation(phi3_forall()).verdict == Replication::NonReplicating &&
        classify_sentence(phi3_exists()).verdict == Replication::NonReplicating &&
        classify_negation(phi3_exists()).verdict == Replication::Replicating;
    return traces && verdicts;
  });

  criterion(7, "repebbling loses, hereditary wins on LO(3) vs LO(2) at (3,2)", [&] {
    return decide_ms_repebbling(S({LO3}), S({LO2}), 3, 2).winner == Player::Duplicator &&
           decide_ms_hereditary(S({LO3}), S({LO2}), 3, 2).winner == Player::Spoiler;
  });

  criterion(8, "hereditary game does not capture quantifiers-with-variables", [&] {
    return decide_qvt(S({LO4}), S({LO3}), 3, 2).winner == Player::Duplicator &&
           decide_ms_hereditary(S({LO4}), S({LO3}), 3, 2).winner == Player::Spoiler;
  });

  criterion(9, "tree game certificate on LO(3) vs LO(2) at (3,2)", [&] {
    auto d = decide_qvt(S({LO3}), S({LO2}), 3, 2);
    if (d.winner != Player::Spoiler || !d.certificate) return false;
    auto f = d.certificate->formula;
    auto known = three_quant_sep();
    for (int n = 2; n <= 5; ++n) {
      PebbledStructure ps(gen_linear_order(n));
      if (evaluate(f, ps) != evaluate(known, ps)) return false;
    }
    return true;
  });

  criterion(10, "rank game finds a rank-3 two-variable separator for LO(4) vs LO(3)", [&] {
    auto d = decide_sg(P(S({LO4})), P(S({LO3})), 3, 2, measure_qrank());
    if (d.winner != Player::Spoiler || !d.certificate) return false;
    auto f = d.certificate->formula;
    if (!is_separating(f, P(S({LO4})), P(S({LO3})))) return false;
    if (apply_measure(measure_qrank(), f) != 3) return false;
    std::set<int> used;
    std::function<void(const FormulaPtr&)> vars = [&](const FormulaPtr& g) {
      switch (g->kind) {
        case Conn::Atom:
          for (const auto& t : g->args)
            if (t.is_var) used.insert(t.var);
          break;
        case Conn::Not: vars(g->child); break;
        case Conn::And:
        case Conn::Or: vars(g->lhs); vars(g->rhs); break;
        case Conn::Exists:
        case Conn::Forall: used.insert(g->var); vars(g->child); break;
      }
    };
    vars(f);
    for (int v : used)
      if (v > 2) return false;
    return true;
  });

  criterion(11, "rank game agrees with the pebble-bounded EF game pairwise", [&] {
    std::vector<StructurePtr> pool = {LO2, LO3, LO4, RT3, RT4};
    for (const auto& a : pool)
      for (const auto& b : pool) {
        if (a == b) continue;
        for (int r = 1; r <= 3; ++r)
          for (int k = 1; k <= 3; ++k) {
            Budget budget;
            budget.node_cap = 200'000'000;
            auto sg = decide_sg(P(S({a})), P(S({b})), r, k, measure_qrank(), SgMode::AtMost,
                                false, budget);
            auto ef = decide_ef_rk(a, b, r, k, budget);
            if (sg.winner != ef.winner) {
              std::cerr << "  disagreement at " << a->name() << " vs " << b->name()
                        << " r=" << r << " k=" << k << "\n";
              return false;
            }
          }
      }
    return true;
  });

  criterion(12, "property suites: certificates, invariants, oracles, prefixes", [&] {
    // Certificate soundness on every Spoiler outcome above.
    struct CertInst {
      std::vector<StructurePtr> a, b;
      int r, k;
      const MeasureSpec* m;
    };
    for (const auto& ci : std::vector<CertInst>{
             {S({LO3}), S({LO2}), 3, 2, &measure_qcount()},
             {S({LO4}), S({LO3}), 3, 2, &measure_qrank()},
             {S({LO4}), S({LO3}), 3, 3, &measure_qcount()},
             {S({RT4, LO4}), S({LO3}), 3, 3, &measure_qcount()},
         }) {
      auto d = decide_sg(P(ci.a), P(ci.b), ci.r, ci.k, *ci.m);
      if (d.winner != Player::Spoiler || !d.certificate) return false;
      auto f = extract_formula(*d.certificate);
      if (!is_separating(f, P(ci.a), P(ci.b))) return false;
      if (apply_measure(*ci.m, f) != ci.r) return false;
      for (int v : free_vars(f))
        if (v > ci.k) return false;
    }

    // Monotonicity and side swap on the worked instances.
    struct Inst {
      std::vector<StructurePtr> a, b;
      int r;
    };
    for (const auto& inst : std::vector<Inst>{{S({LO3}), S({LO2}), 2},
                                              {S({LO4}), S({LO3}), 3},
                                              {S({A}), S({B, C}), 1},
                                              {S({RT4, LO4}), S({RT3, LO3}), 3}}) {
      auto one = decide_ms(inst.a, inst.b, inst.r).winner;
      if (one != decide_ms(inst.b, inst.a, inst.r).winner) return false;
      if (one == Player::Spoiler &&
          decide_ms(inst.a, inst.b, inst.r + 1).winner != Player::Spoiler)
        return false;
    }

    // Sentence-driven wins without on-top also win the restricted game.
    if (decide_ms_no_on_top(S({LO4}), S({LO3}), 3, OnTopPolicy::ForbidBoth).winner !=
        Player::Spoiler)
      return false;
    if (decide_ms_no_on_top(S({RT4, LO4}), S({LO3}), 3, OnTopPolicy::ForbidBoth).winner !=
        Player::Spoiler)
      return false;

    // Oracle agreement, 200 seeded tiny instances per measure.
    std::mt19937_64 rng(424242);
    for (const MeasureSpec* m : {&measure_qcount(), &measure_qrank(), &measure_fsize()}) {
      for (int i = 0; i < 200; ++i) {
        auto a = random_order_structure(rng, 3);
        auto b = random_order_structure(rng, 2);
        int r = m == &measure_fsize() ? 1 + static_cast<int>(rng() % 4)
                                      : static_cast<int>(rng() % 3);
        int k = 1 + static_cast<int>(rng() % 2);
        Budget budget;
        budget.node_cap = 60'000'000;
        Player fast = decide_sg(P(S({a})), P(S({b})), r, k, *m, SgMode::AtMost, false,
                                budget)
                          .winner;
        Player naive = naive_oracle_sg(P(S({a})), P(S({b})), r, k, *m, SgMode::AtMost, budget);
        if (fast != naive) {
          std::cerr << "  oracle mismatch, measure " << m->name << " seed-index " << i << "\n";
          return false;
        }
      }
    }

    // Three-alternation prefixes cannot have both polarities non-replicating.
    auto sch = order_schema();
    std::vector<RType> types;
    for (const auto& t : enumerate_types(sch, 3))
      if (type_order_consistent(sch, 3, t)) types.push_back(t);
    for (int prefix = 0; prefix < 8; ++prefix) {
      bool qs[3] = {static_cast<bool>(prefix & 1), static_cast<bool>(prefix & 2),
                    static_cast<bool>(prefix & 4)};
      bool has_eae = false;
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          for (int l = j + 1; l < 3; ++l)
            if (!qs[i] && qs[j] && !qs[l]) has_eae = true;
      for (int iter = 0; iter < 40; ++iter) {
        FormulaPtr matrix;
        for (const auto& t : types)
          if (rng() % 3 == 0) {
            auto tf = type_formula(sch, 3, t);
            matrix = matrix ? mk_or(matrix, tf) : tf;
          }
        if (!matrix) continue;
        FormulaPtr f = qs[2] ? mk_forall(3, matrix) : mk_exists(3, matrix);
        f = qs[1] ? mk_forall(2, f) : mk_exists(2, f);
        f = qs[0] ? mk_forall(1, f) : mk_exists(1, f);
        bool both = classify_sentence(f).verdict == Replication::NonReplicating &&
                    classify_negation(f).verdict == Replication::NonReplicating;
        if (both && has_eae) return false;
      }
    }
    return true;
  });

  criterion(13, "minimal measures on the worked instances", [&] {
    auto a = min_measure(S({LO3}), S({LO2}), 2, measure_qcount(), 5);
    auto b = min_measure(S({LO3}), S({LO2}), 2, measure_qrank(), 5);
    auto c = min_measure(S({LO4}), S({LO3}), 3, measure_qcount(), 5);
    return a && a->value == 3 && b && b->value == 2 && c && c->value == 3;
  });

  if (failures == 0) {
    std::cout << "all criteria passed" << std::endl;
    return 0;
  }
  std::cout << failures << " criteria failed" << std::endl;
  return 1;
}
