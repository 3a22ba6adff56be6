#include <functional>
#include <random>
#include <set>

#include "doctest.h"
#include "msgw/synth.hpp"
#include "support.hpp"

using namespace msgw;
using namespace msgw::testing;

namespace {

std::vector<StructurePtr> S(std::initializer_list<StructurePtr> xs) { return xs; }

std::vector<PebbledStructure> P(std::initializer_list<StructurePtr> xs) {
  std::vector<PebbledStructure> out;
  for (const auto& s : xs) out.emplace_back(s);
  return out;
}

std::vector<PebbledStructure> wrap(const std::vector<StructurePtr>& xs) {
  std::vector<PebbledStructure> out;
  for (const auto& s : xs) out.emplace_back(s);
  return out;
}

void check_certificate(const SgDecision& d, const std::vector<StructurePtr>& A,
                       const std::vector<StructurePtr>& B, const MeasureSpec& m, int r, int k) {
  REQUIRE(d.certificate.has_value());
  const Certificate& cert = *d.certificate;
  auto f = extract_formula(cert);
  CHECK(structurally_equal(f, cert.formula));
  CHECK(is_separating(f, wrap(A), wrap(B)));
  CHECK(apply_measure(m, f) == r);
  for (int v : free_vars(f)) CHECK(v <= k);
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
      case Conn::Forall:
        used.insert(g->var);
        vars(g->child);
        break;
    }
  };
  vars(f);
  for (int v : used) CHECK(v <= k);
}

}  // namespace

TEST_CASE("qvt on the small linear orders") {
  auto d = decide_qvt(S({LO(3)}), S({LO(2)}), 3, 2);
  CHECK(d.winner == Player::Spoiler);
  check_certificate(d, S({LO(3)}), S({LO(2)}), measure_qcount(), 3, 2);

  CHECK(decide_qvt(S({LO(4)}), S({LO(3)}), 3, 2).winner == Player::Duplicator);
  CHECK(decide_qvt(S({LO(3)}), S({LO(2)}), 2, 2).winner == Player::Duplicator);
}

TEST_CASE("qvt certificate is equivalent to the known separator") {
  auto d = decide_qvt(S({LO(3)}), S({LO(2)}), 3, 2);
  REQUIRE(d.certificate.has_value());
  auto f = d.certificate->formula;
  auto known = three_quant_sep();
  for (int n = 2; n <= 5; ++n) {
    PebbledStructure ps(LO(n));
    CHECK(evaluate(f, ps) == evaluate(known, ps));
  }
}

TEST_CASE("rank-measure game finds the two-variable rank-3 separator") {
  auto d = decide_sg(P({LO(4)}), P({LO(3)}), 3, 2, measure_qrank());
  CHECK(d.winner == Player::Spoiler);
  REQUIRE(d.certificate.has_value());
  auto f = d.certificate->formula;
  CHECK(is_separating(f, P({LO(4)}), P({LO(3)})));
  CHECK(apply_measure(measure_qrank(), f) == 3);
  for (const auto& node : {d.certificate->root}) CHECK(node->counter == 3);
}

TEST_CASE("ms equivalence: quantifier-count game with k = r") {
  struct Inst {
    std::vector<StructurePtr> a, b;
    int r;
    Player expect;
  };
  std::vector<Inst> insts = {
      {S({LO(3)}), S({LO(2)}), 2, Player::Duplicator},
      {S({LO(3)}), S({LO(2)}), 3, Player::Spoiler},
      {S({rg_A()}), S({rg_B(), rg_C()}), 1, Player::Duplicator},
      {S({rg_A()}), S({rg_B()}), 1, Player::Spoiler},
      {S({LO(4)}), S({LO(3)}), 3, Player::Spoiler},
  };
  for (const auto& i : insts) {
    CHECK(decide_ms(i.a, i.b, i.r).winner == i.expect);
    CHECK(decide_qvt(i.a, i.b, i.r, i.r).winner == i.expect);
  }
}

TEST_CASE("ms equivalence fuzz: the engines validate each other") {
  // An r-quantifier separating sentence exists iff one with at most r
  // variables does, so the copying game and the budgeted tree game with
  // k = r must agree everywhere.
  std::mt19937_64 rng(97);
  int done = 0;
  while (done < 80) {
    auto a = random_structure(rng, 3);
    auto b = random_structure(rng, 2);
    int r = 1 + static_cast<int>(rng() % 3);
    Budget budget;
    budget.node_cap = 60'000'000;
    Player ms = decide_ms(S({a}), S({b}), r, budget).winner;
    Player qvt = decide_sg(P({a}), P({b}), r, r, measure_qcount(), SgMode::AtMost, false,
                           budget)
                     .winner;
    CHECK(ms == qvt);
    ++done;
  }
  // Two-structure sides couple the placements on both routes.
  for (int iter = 0; iter < 20; ++iter) {
    auto a = random_structure(rng, 2);
    auto b = random_structure(rng, 2);
    auto c = random_structure(rng, 2);
    for (int r = 1; r <= 2; ++r) {
      Budget budget;
      budget.node_cap = 60'000'000;
      Player ms = decide_ms(S({a, c}), S({b}), r, budget).winner;
      Player qvt = decide_sg(P({a, c}), P({b}), r, r, measure_qcount(), SgMode::AtMost,
                             false, budget)
                       .winner;
      CHECK(ms == qvt);
      Player ms2 = decide_ms(S({a}), S({b, c}), r, budget).winner;
      Player qvt2 = decide_sg(P({a}), P({b, c}), r, r, measure_qcount(), SgMode::AtMost,
                              false, budget)
                        .winner;
      CHECK(ms2 == qvt2);
    }
  }
}

TEST_CASE("known sentences give completeness spot-checks") {
  // Feeding each sentence's own parameters must be a Spoiler win.
  CHECK(decide_qvt(S({LO(4)}), S({LO(3)}), 3, 3).winner == Player::Spoiler);
  CHECK(decide_qvt(S({RT4(), LO(4)}), S({LO(3)}), 3, 3).winner == Player::Spoiler);
  CHECK(decide_qvt(S({LO(3)}), S({LO(2)}), 3, 2).winner == Player::Spoiler);
}

TEST_CASE("rank game agrees with the pairwise pebble-bounded EF game") {
  std::vector<StructurePtr> pool = {LO(2), LO(3), LO(4), RT3(), RT4()};
  for (const auto& a : pool)
    for (const auto& b : pool) {
      if (a == b) continue;
      for (int r = 1; r <= 2; ++r)
        for (int k = 1; k <= 2; ++k) {
          auto sg = decide_sg(P({a}), P({b}), r, k, measure_qrank(), SgMode::AtMost, false);
          auto ef = decide_ef_rk(a, b, r, k);
          CHECK(sg.winner == ef.winner);
        }
    }
}

TEST_CASE("pebble-game correspondence for the always-useful rank measure") {
  // Spoiler's unbounded-round pebble win appears at some finite rank.
  CHECK(decide_pebble(LO(3), LO(2), 2).winner == Player::Spoiler);
  bool found = false;
  for (int r = 1; r <= 4 && !found; ++r)
    found = decide_sg(P({LO(3)}), P({LO(2)}), r, 2, measure_qrank(), SgMode::AtMost, false)
                .winner == Player::Spoiler;
  CHECK(found);
}

TEST_CASE("minimal measures") {
  auto q32 = min_measure(S({LO(3)}), S({LO(2)}), 2, measure_qcount(), 5);
  REQUIRE(q32.has_value());
  CHECK(q32->value == 3);

  auto q33 = min_measure(S({LO(3)}), S({LO(2)}), 3, measure_qcount(), 5);
  REQUIRE(q33.has_value());
  CHECK(q33->value == 3);

  auto r32 = min_measure(S({LO(3)}), S({LO(2)}), 2, measure_qrank(), 5);
  REQUIRE(r32.has_value());
  CHECK(r32->value == 2);

  auto none = min_measure(S({LO(2)}), S({LO(2)}), 2, measure_qcount(), 4);
  CHECK(!none.has_value());
}

TEST_CASE("exact mode certificates carry the exact cost") {
  auto d = decide_sg(P({LO(3)}), P({LO(2)}), 3, 2, measure_qcount(), SgMode::Exact);
  CHECK(d.winner == Player::Spoiler);
  REQUIRE(d.certificate.has_value());
  CHECK(apply_measure(measure_qcount(), d.certificate->formula) == 3);

  // Exact and at-most agree on the padding-friendly built-ins here.
  for (int r = 0; r <= 3; ++r) {
    auto ex = decide_sg(P({LO(3)}), P({LO(2)}), r, 2, measure_qcount(), SgMode::Exact, false);
    auto am = decide_sg(P({LO(3)}), P({LO(2)}), r, 2, measure_qcount(), SgMode::AtMost, false);
    if (am.winner == Player::Spoiler && r >= 1) CHECK(ex.winner == Player::Spoiler);
  }
}

TEST_CASE("solver is deterministic") {
  auto one = decide_qvt(S({LO(3)}), S({LO(2)}), 3, 2);
  auto two = decide_qvt(S({LO(3)}), S({LO(2)}), 3, 2);
  REQUIRE(one.certificate.has_value());
  REQUIRE(two.certificate.has_value());
  CHECK(print_formula(one.certificate->formula) == print_formula(two.certificate->formula));
}

TEST_CASE("oracle agreement on seeded tiny instances") {
  std::mt19937_64 rng(71);
  const MeasureSpec* measures[] = {&measure_qcount(), &measure_qrank(), &measure_fsize()};
  for (const MeasureSpec* m : measures) {
    int done = 0;
    while (done < 60) {
      auto a = random_structure(rng, 3);
      auto b = random_structure(rng, 2);
      int r = m == &measure_fsize() ? 1 + static_cast<int>(rng() % 4)
                                    : static_cast<int>(rng() % 3);
      int k = 1 + static_cast<int>(rng() % 2);
      Budget budget;
      budget.node_cap = 40'000'000;
      Player fast =
          decide_sg(P({a}), P({b}), r, k, *m, SgMode::AtMost, false, budget).winner;
      Player naive = naive_oracle_sg(P({a}), P({b}), r, k, *m, SgMode::AtMost, budget);
      CHECK(fast == naive);
      ++done;
    }
  }
}

TEST_CASE("oracle agreement in exact mode") {
  std::mt19937_64 rng(73);
  for (int done = 0; done < 25; ++done) {
    auto a = random_structure(rng, 2);
    auto b = random_structure(rng, 2);
    int r = static_cast<int>(rng() % 3);
    Budget budget;
    budget.node_cap = 40'000'000;
    Player fast =
        decide_sg(P({a}), P({b}), r, 2, measure_qcount(), SgMode::Exact, false, budget).winner;
    Player naive = naive_oracle_sg(P({a}), P({b}), r, 2, measure_qcount(), SgMode::Exact, budget);
    CHECK(fast == naive);
  }
}

TEST_CASE("oracle agrees on the known instances") {
  CHECK(naive_oracle_sg(P({LO(3)}), P({LO(2)}), 3, 2, measure_qcount()) == Player::Spoiler);
  CHECK(naive_oracle_sg(P({LO(2)}), P({LO(2)}), 2, 2, measure_qcount()) == Player::Duplicator);
  CHECK(naive_oracle_sg(P({rg_A()}), P({rg_B(), rg_C()}), 1, 1, measure_qcount()) ==
        Player::Duplicator);
  CHECK(decide_sg(P({rg_A()}), P({rg_B(), rg_C()}), 1, 1, measure_qcount()).winner ==
        Player::Duplicator);
}

TEST_CASE("domain consistency is enforced") {
  std::vector<PebbledStructure> bad = {PebbledStructure(LO(3)).with(1, 0)};
  std::vector<PebbledStructure> plain = {PebbledStructure(LO(2))};
  CHECK_THROWS_AS(decide_sg(bad, plain, 2, 2, measure_qcount()), error);
  // Pebbled inputs above the variable budget are rejected.
  std::vector<PebbledStructure> high = {PebbledStructure(LO(3)).with(3, 0)};
  std::vector<PebbledStructure> high2 = {PebbledStructure(LO(2)).with(3, 0)};
  CHECK_THROWS_AS(decide_sg(high, high2, 2, 2, measure_qcount()), error);
}

TEST_CASE("syntactic game over a schema with constants") {
  auto sch = std::make_shared<Schema>(std::vector<RelationDecl>{{"<", 2}},
                                      std::vector<std::string>{"bot"});
  auto mk = [&](int bot) {
    auto s = std::make_shared<Structure>(sch, 2, "LO2bot" + std::to_string(bot));
    s->add_tuple("<", {0, 1});
    s->set_constant("bot", bot);
    s->finalize();
    return StructurePtr(s);
  };
  auto d = decide_sg(P({mk(0)}), P({mk(1)}), 1, 1, measure_qcount());
  CHECK(d.winner == Player::Spoiler);
  REQUIRE(d.certificate.has_value());
  CHECK(is_separating(d.certificate->formula, P({mk(0)}), P({mk(1)})));
  CHECK(naive_oracle_sg(P({mk(0)}), P({mk(1)}), 1, 1, measure_qcount()) == Player::Spoiler);
  // Constants alone can close: bot<bot separates a looped constant from a
  // plain one with no quantifiers at all.
  auto loop = [&](int bot) {
    auto s = std::make_shared<Structure>(sch, 2);
    s->add_tuple("<", {0, 1});
    s->add_tuple("<", {bot, bot});
    s->set_constant("bot", bot);
    s->finalize();
    return StructurePtr(s);
  };
  auto z = decide_sg(P({loop(0)}), P({mk(0)}), 0, 1, measure_qcount());
  CHECK(z.winner == Player::Spoiler);
  REQUIRE(z.certificate.has_value());
  CHECK(is_separating(z.certificate->formula, P({loop(0)}), P({mk(0)})));
  CHECK(apply_measure(measure_qcount(), z.certificate->formula) == 0);
}

TEST_CASE("pebbled starting positions work") {
  // Separating formula with a free variable: left pebble on the top element,
  // right pebble on the bottom of a two-element order.
  std::vector<PebbledStructure> A = {PebbledStructure(LO(2)).with(1, 1)};
  std::vector<PebbledStructure> B = {PebbledStructure(LO(2)).with(1, 0)};
  auto d = decide_sg(A, B, 1, 2, measure_qcount());
  CHECK(d.winner == Player::Spoiler);
  REQUIRE(d.certificate.has_value());
  CHECK(is_separating(d.certificate->formula, A, B));
}
