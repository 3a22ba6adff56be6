#include "msgw/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "internal.hpp"

namespace msgw {

using detail::IPS;
using detail::ISide;
using detail::Registry;
using detail::append_key;
using detail::sort_dedup;

namespace {

// Atomic formulas over a pebbled color set and the schema's constants, in a
// fixed order: equalities (trivial ones included, they close empty-side
// nodes), then relation atoms. Terms are the sorted colors then constants.
std::vector<FormulaPtr> close_atoms(const SchemaPtr& schema, const std::vector<int>& colors) {
  std::vector<Term> terms;
  for (int c : colors) terms.push_back(Term::variable(c));
  for (const auto& c : schema->constants()) terms.push_back(Term::constant(c));
  std::vector<FormulaPtr> atoms;
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = i; j < terms.size(); ++j) atoms.push_back(mk_eq(terms[i], terms[j]));
  for (const auto& rd : schema->relations()) {
    if (terms.empty()) continue;
    std::vector<std::size_t> idx(static_cast<std::size_t>(rd.arity), 0);
    while (true) {
      std::vector<Term> args;
      for (auto t : idx) args.push_back(terms[t]);
      atoms.push_back(mk_atom(rd.name, std::move(args)));
      int i = rd.arity - 1;
      while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == terms.size()) {
        idx[static_cast<std::size_t>(i)] = 0;
        --i;
      }
      if (i < 0) break;
    }
  }
  return atoms;
}

struct MoveRec {
  enum Kind { None, Close, PebbleLeft, PebbleRight, SplitLeft, SplitRight, Swap, AnalyticQF };
  Kind kind = None;
  int color = 0;
  std::vector<int> elems;      // pebble placements, in side order
  bool analytic_child = false; // pebble child evaluated as a budget-0 leaf
  std::uint64_t subset = 0;    // split part 1 (bits over the split side)
  int r1 = 0, r2 = 0;          // child counters (r1 alone for pebble/swap)
  FormulaPtr atom;             // close witness
};

struct MemoEntry {
  bool spoiler = false;
  MoveRec move;
};

class SgSolver {
 public:
  Registry reg;
  const MeasureSpec* m = nullptr;
  SgMode mode = SgMode::AtMost;
  int k = 1;
  std::uint64_t cap = 0, nodes = 0;
  SchemaPtr schema;

  std::unordered_map<std::string, MemoEntry> memo;
  std::unordered_set<std::string> path;
  std::unordered_map<std::string, std::string> sig_cache;

  void charge(std::uint64_t n = 1) {
    nodes += n;
    if (nodes > cap) throw budget_error("search budget exceeded (node cap)");
  }

  static std::string node_key(const ISide& L, const ISide& R, int counter) {
    std::string key = std::to_string(counter);
    key += '|';
    append_key(key, L);
    key += '|';
    append_key(key, R);
    return key;
  }

  std::vector<int> node_colors(const ISide& L, const ISide& R) const {
    // Domain consistency: every structure carries the same color set.
    const IPS* any = !L.empty() ? &L.front() : (!R.empty() ? &R.front() : nullptr);
    if (!any) return {};
    return any->a.colors();
  }

  bool eval_atom(const FormulaPtr& atom, const IPS& ps) const {
    const Structure& s = reg.at(ps.sid);
    int vals[8];
    int n = static_cast<int>(atom->args.size());
    for (int i = 0; i < n; ++i) {
      const Term& t = atom->args[static_cast<std::size_t>(i)];
      vals[i] = t.is_var ? ps.a.get(t.var) : s.constant_value(s.schema()->constant_index(t.cname));
    }
    if (atom->rel == "=") return vals[0] == vals[1];
    return s.holds(s.schema()->relation_index(atom->rel), vals, n);
  }

  // Quantifier-free type signature of one pebbled structure over its own
  // colors and the constants.
  const std::string& sig(const IPS& ps) {
    std::string ck;
    ck += static_cast<char>('A' + ps.sid);
    for (auto v : ps.a.raw()) ck += static_cast<char>(v + 2);
    auto it = sig_cache.find(ck);
    if (it != sig_cache.end()) return it->second;
    auto atoms = close_atoms(schema, ps.a.colors());
    std::string s;
    s.reserve(atoms.size());
    for (const auto& a : atoms) s += eval_atom(a, ps) ? '1' : '0';
    return sig_cache.emplace(std::move(ck), std::move(s)).first->second;
  }

  // Budget-0 positions under quantifier-count-like measures admit a direct
  // evaluation: Spoiler can still spend splits, swaps and closes freely, so
  // he wins exactly when some quantifier-free formula separates, i.e. when
  // no left structure shares its atom valuation with a right structure.
  bool analytic_zero(const ISide& L, const ISide& R) {
    auto colors = node_colors(L, R);
    if (colors.empty() && schema->constants().empty() && schema->relations().empty())
      return false;
    if (close_atoms(schema, colors).empty()) return false;  // no formulas exist
    std::unordered_set<std::string> sigs;
    for (const auto& l : L) sigs.insert(sig(l));
    for (const auto& r : R)
      if (sigs.count(sig(r))) return false;
    return true;
  }

  ISide expand(const ISide& side, int color) const {
    ISide out;
    for (const auto& ps : side) {
      int n = reg.at(ps.sid).size();
      for (int e = 0; e < n; ++e) {
        IPS q = ps;
        q.a.set(color, e);
        out.push_back(q);
      }
    }
    sort_dedup(out);
    return out;
  }

  // Returns (spoiler-wins, absolute). A result that leaned on a repeated
  // position along the current path is only valid path-locally and must not
  // be memoized when false.
  std::pair<bool, bool> win(const ISide& L, const ISide& R, int counter) {
    if (counter < 0) return {false, true};
    if (m->qf_complete_at_zero && counter == 0) {
      charge();
      bool s = analytic_zero(L, R);
      std::string key = node_key(L, R, 0);
      MemoEntry e;
      e.spoiler = s;
      e.move.kind = MoveRec::AnalyticQF;
      memo.emplace(std::move(key), e);
      return {s, true};
    }

    std::string key = node_key(L, R, counter);
    if (auto it = memo.find(key); it != memo.end()) return {it->second.spoiler, true};
    if (path.count(key)) return {false, false};  // a closed tree never repeats a position
    path.insert(key);
    charge();

    bool pure = true;
    MoveRec winning;
    bool won = try_moves(L, R, counter, pure, winning);

    path.erase(key);
    if (won) {
      MemoEntry e;
      e.spoiler = true;
      e.move = winning;
      memo.emplace(std::move(key), e);
      return {true, true};
    }
    if (pure) memo.emplace(std::move(key), MemoEntry{});
    return {false, pure};
  }

 private:
  bool cost_ok(int cost, int counter) const {
    return mode == SgMode::Exact ? cost == counter : cost <= counter;
  }

  bool try_moves(const ISide& L, const ISide& R, int counter, bool& pure, MoveRec& out) {
    // Close.
    auto colors = node_colors(L, R);
    for (const auto& atom : close_atoms(schema, colors)) {
      if (!cost_ok(m->h_atomic(*atom), counter)) continue;
      bool sep = true;
      for (const auto& l : L)
        if (!eval_atom(atom, l)) {
          sep = false;
          break;
        }
      if (sep)
        for (const auto& r : R)
          if (eval_atom(atom, r)) {
            sep = false;
            break;
          }
      if (sep) {
        out.kind = MoveRec::Close;
        out.atom = atom;
        return true;
      }
    }

    // Pebble moves.
    for (int side = 0; side < 2; ++side) {
      const ISide& T = side == 0 ? L : R;
      const ISide& U = side == 0 ? R : L;
      auto invs = side == 0 ? m->inv_exists(counter) : m->inv_forall(counter);
      std::sort(invs.begin(), invs.end());
      for (int r2 : invs) {
        if (r2 < 0) continue;
        for (int c = 1; c <= k; ++c) {
          ISide U1 = expand(U, c);
          if (r2 == 0 && m->qf_complete_at_zero) {
            // The child is a budget-0 leaf, so placements on distinct
            // structures are independent.
            std::vector<int> chosen;
            std::unordered_set<std::string> usigs;
            for (const auto& u : U1) usigs.insert(sig(u));
            std::vector<int> child_colors = node_colors(T, U);
            if (std::find(child_colors.begin(), child_colors.end(), c) == child_colors.end()) {
              child_colors.push_back(c);
              std::sort(child_colors.begin(), child_colors.end());
            }
            bool ok = !close_atoms(schema, child_colors).empty();
            for (const auto& t : T) {
              if (!ok) break;
              int pick = -1;
              for (int e = 0; e < reg.at(t.sid).size(); ++e) {
                IPS te = t;
                te.a.set(c, e);
                if (!usigs.count(sig(te))) {
                  pick = e;
                  break;
                }
              }
              if (pick < 0) ok = false;
              chosen.push_back(pick);
            }
            charge();
            if (ok) {
              out.kind = side == 0 ? MoveRec::PebbleLeft : MoveRec::PebbleRight;
              out.color = c;
              out.elems = chosen;
              out.r1 = 0;
              out.analytic_child = true;
              return true;
            }
            continue;
          }

          // A separating formula for a superset side separates every subset,
          // so if even the full expansion of T wins, any placement does.
          {
            ISide Tall = expand(T, c);
            auto [w, p] = side == 0 ? win(Tall, U1, r2) : win(U1, Tall, r2);
            pure = pure && p;
            if (w) {
              out.kind = side == 0 ? MoveRec::PebbleLeft : MoveRec::PebbleRight;
              out.color = c;
              out.elems.assign(T.size(), 0);
              out.r1 = r2;
              out.analytic_child = false;
              return true;
            }
          }

          // Conversely a winning placement must win on each structure alone;
          // filter candidates per structure before walking the product.
          std::vector<std::vector<int>> cand(T.size());
          bool feasible = true;
          for (std::size_t i = 0; i < T.size() && feasible; ++i) {
            for (int e = 0; e < reg.at(T[i].sid).size(); ++e) {
              IPS te = T[i];
              te.a.set(c, e);
              auto [w, p] = side == 0 ? win({te}, U1, r2) : win(U1, {te}, r2);
              pure = pure && p;
              if (w) cand[i].push_back(e);
            }
            if (cand[i].empty()) feasible = false;
          }
          if (!feasible) continue;

          std::vector<std::size_t> idx(T.size(), 0);
          while (true) {
            charge();
            ISide T1 = T;
            std::vector<int> elems;
            for (std::size_t i = 0; i < T.size(); ++i) {
              T1[i].a.set(c, cand[i][idx[i]]);
              elems.push_back(cand[i][idx[i]]);
            }
            sort_dedup(T1);
            auto [w, p] = side == 0 ? win(T1, U1, r2) : win(U1, T1, r2);
            pure = pure && p;
            if (w) {
              out.kind = side == 0 ? MoveRec::PebbleLeft : MoveRec::PebbleRight;
              out.color = c;
              out.elems = elems;
              out.r1 = r2;
              return true;
            }
            std::size_t i = T.size();
            while (i > 0 && ++idx[i - 1] == cand[i - 1].size()) idx[--i] = 0;
            if (i == 0) break;
          }
        }
      }
    }

    // Split moves.
    for (int side = 0; side < 2; ++side) {
      const ISide& S = side == 0 ? L : R;
      const ISide& O = side == 0 ? R : L;
      auto pairs = side == 0 ? m->inv_or(counter) : m->inv_and(counter);
      bool full_pair = false;
      for (auto [a, b] : pairs)
        if (a == counter && b == counter) full_pair = true;
      bool all_below = true;
      for (auto [a, b] : pairs)
        if (a > counter || b > counter) all_below = false;

      if (mode == SgMode::AtMost && m->budget_monotone && full_pair && all_below &&
          S.size() >= 2) {
        // Every split is dominated by the (counter, counter) split, and that
        // one wins exactly when each singleton of this side wins; Spoiler can
        // realize it by peeling structures one at a time.
        bool ok = true;
        for (const auto& s : S) {
          auto [w, p] = side == 0 ? win({s}, O, counter) : win(O, {s}, counter);
          pure = pure && p;
          if (!w) {
            ok = false;
            break;
          }
        }
        if (ok) {
          out.kind = side == 0 ? MoveRec::SplitLeft : MoveRec::SplitRight;
          out.subset = 1;  // peel the first structure
          out.r1 = counter;
          out.r2 = counter;
          return true;
        }
        continue;
      }

      for (auto [r1, r2] : pairs) {
        if (r1 < 0 || r2 < 0) continue;

        // A budget-0 part under a quantifier-count-like measure has a
        // per-structure value, so only the maximal such part needs a try:
        // shrinking it only grows the other part, which never helps.
        if (m->qf_complete_at_zero && (r1 == 0 || r2 == 0) && r1 != r2) {
          ISide part0, rest;
          for (const auto& s : S) {
            auto [w, p] = side == 0 ? win({s}, O, 0) : win(O, {s}, 0);
            pure = pure && p;
            (w ? part0 : rest).push_back(s);
          }
          int rbig = r1 == 0 ? r2 : r1;
          charge();
          auto [w, p] = side == 0 ? win(rest, O, rbig) : win(O, rest, rbig);
          pure = pure && p;
          if (w) {
            std::uint64_t bits = 0;
            for (std::size_t i = 0; i < S.size(); ++i) {
              auto [wi, pi] = side == 0 ? win({S[i]}, O, 0) : win(O, {S[i]}, 0);
              pure = pure && pi;
              bool in_part1 = r1 == 0 ? wi : !wi;
              if (in_part1) bits |= std::uint64_t{1} << i;
            }
            out.kind = side == 0 ? MoveRec::SplitLeft : MoveRec::SplitRight;
            out.subset = bits;
            out.r1 = r1;
            out.r2 = r2;
            return true;
          }
          continue;
        }

        // Part 1 may only contain structures that win alone at r1, and must
        // contain every structure that fails alone at r2.
        if (S.size() > 63) throw budget_error("split enumeration too large");
        std::uint64_t w1mask = 0, w2mask = 0;
        for (std::size_t i = 0; i < S.size(); ++i) {
          auto [a, pa] = side == 0 ? win({S[i]}, O, r1) : win(O, {S[i]}, r1);
          pure = pure && pa;
          if (a) w1mask |= std::uint64_t{1} << i;
          auto [b, pb] = side == 0 ? win({S[i]}, O, r2) : win(O, {S[i]}, r2);
          pure = pure && pb;
          if (b) w2mask |= std::uint64_t{1} << i;
        }
        std::uint64_t all = S.size() >= 64 ? ~std::uint64_t{0}
                                           : (std::uint64_t{1} << S.size()) - 1;
        std::uint64_t forced = all & ~w2mask;
        if (forced & ~w1mask) continue;
        std::uint64_t free = w1mask & w2mask;
        std::vector<int> free_idx;
        for (std::size_t i = 0; i < S.size(); ++i)
          if (free & (std::uint64_t{1} << i)) free_idx.push_back(static_cast<int>(i));
        if (free_idx.size() > 20) throw budget_error("split enumeration too large");
        for (std::uint64_t fb = 0; fb < (std::uint64_t{1} << free_idx.size()); ++fb) {
          charge();
          std::uint64_t bits = forced;
          for (std::size_t j = 0; j < free_idx.size(); ++j)
            if ((fb >> j) & 1) bits |= std::uint64_t{1} << free_idx[j];
          ISide part1, part2;
          for (std::size_t i = 0; i < S.size(); ++i)
            ((bits >> i) & 1 ? part1 : part2).push_back(S[i]);
          auto [w1, p1] = side == 0 ? win(part1, O, r1) : win(O, part1, r1);
          pure = pure && p1;
          if (!w1) continue;
          auto [w2, p2] = side == 0 ? win(part2, O, r2) : win(O, part2, r2);
          pure = pure && p2;
          if (w2) {
            out.kind = side == 0 ? MoveRec::SplitLeft : MoveRec::SplitRight;
            out.subset = bits;
            out.r1 = r1;
            out.r2 = r2;
            return true;
          }
        }
      }
    }

    // Swap.
    for (int r1 : m->inv_not(counter)) {
      if (r1 < 0) continue;
      auto [w, p] = win(R, L, r1);
      pure = pure && p;
      if (w) {
        out.kind = MoveRec::Swap;
        out.r1 = r1;
        return true;
      }
    }
    return false;
  }
};

// Builds the closed subtree realizing a quantifier-free separation at
// budget 0 (splits, swaps and closes are all free there). Returns the node
// and its formula.
struct QfBuilder {
  SgSolver& sv;

  std::vector<PebbledStructure> to_public(const ISide& side) const {
    std::vector<PebbledStructure> out;
    for (const auto& ps : side) out.emplace_back(sv.reg.ptr(ps.sid), ps.a);
    return out;
  }

  std::pair<SgNodePtr, FormulaPtr> build(const ISide& L, const ISide& R) {
    auto node = std::make_shared<SgNode>();
    node->left = to_public(L);
    node->right = to_public(R);
    node->counter = 0;

    auto colors = sv.node_colors(L, R);
    auto atoms = close_atoms(sv.schema, colors);
    if (atoms.empty()) throw error("internal: no atoms at a closing position");

    auto value = [&](const FormulaPtr& a, const ISide& side, bool want) {
      for (const auto& ps : side)
        if (sv.eval_atom(a, ps) != want) return false;
      return true;
    };

    // A single atom that separates as-is, or separates after a swap.
    for (const auto& a : atoms)
      if (value(a, L, true) && value(a, R, false)) {
        node->move = "close";
        node->close_atom = a;
        return {node, a};
      }
    for (const auto& a : atoms)
      if (value(a, L, false) && value(a, R, true)) {
        auto child = std::make_shared<SgNode>();
        child->left = node->right;
        child->right = node->left;
        child->counter = 0;
        child->move = "close";
        child->close_atom = a;
        node->move = "swap";
        node->children = {child};
        return {node, mk_not(a)};
      }

    // Split on an atom that is mixed on one side.
    for (const auto& a : atoms) {
      ISide pos, neg;
      for (const auto& ps : L) (sv.eval_atom(a, ps) ? pos : neg).push_back(ps);
      if (!pos.empty() && !neg.empty()) {
        auto [n1, f1] = build(pos, R);
        auto [n2, f2] = build(neg, R);
        node->move = "split-left";
        node->children = {n1, n2};
        return {node, mk_or(f1, f2)};
      }
    }
    for (const auto& a : atoms) {
      ISide pos, neg;
      for (const auto& ps : R) (sv.eval_atom(a, ps) ? pos : neg).push_back(ps);
      if (!pos.empty() && !neg.empty()) {
        auto [n1, f1] = build(L, pos);
        auto [n2, f2] = build(L, neg);
        node->move = "split-right";
        node->children = {n1, n2};
        return {node, mk_and(f1, f2)};
      }
    }
    throw error("internal: budget-0 position not separable during certificate build");
  }
};

// Certificate reconstruction from the memo's winning moves.
struct CertBuilder {
  SgSolver& sv;

  std::pair<SgNodePtr, FormulaPtr> build(const ISide& L, const ISide& R, int counter) {
    std::string key = SgSolver::node_key(L, R, counter);
    auto it = sv.memo.find(key);
    if (it == sv.memo.end() || !it->second.spoiler) {
      auto [w, p] = sv.win(L, R, counter);
      (void)p;
      if (!w) throw error("internal: losing position reached in certificate build");
      it = sv.memo.find(key);
    }
    const MoveRec& mv = it->second.move;

    auto node = std::make_shared<SgNode>();
    QfBuilder qf{sv};
    node->left = qf.to_public(L);
    node->right = qf.to_public(R);
    node->counter = counter;

    switch (mv.kind) {
      case MoveRec::AnalyticQF:
        return qf.build(L, R);
      case MoveRec::Close:
        node->move = "close";
        node->close_atom = mv.atom;
        return {node, mv.atom};
      case MoveRec::PebbleLeft:
      case MoveRec::PebbleRight: {
        bool left_side = mv.kind == MoveRec::PebbleLeft;
        const ISide& T = left_side ? L : R;
        const ISide& U = left_side ? R : L;
        ISide T1 = T;
        for (std::size_t i = 0; i < T.size(); ++i)
          T1[i].a.set(mv.color, mv.elems[i]);
        sort_dedup(T1);
        ISide U1 = sv.expand(U, mv.color);
        std::pair<SgNodePtr, FormulaPtr> child;
        if (mv.analytic_child)
          child = left_side ? qf.build(T1, U1) : qf.build(U1, T1);
        else
          child = left_side ? build(T1, U1, mv.r1) : build(U1, T1, mv.r1);
        node->move = left_side ? "pebble-left" : "pebble-right";
        node->color = mv.color;
        node->children = {child.first};
        FormulaPtr f = left_side ? mk_exists(mv.color, child.second)
                                 : mk_forall(mv.color, child.second);
        return {node, f};
      }
      case MoveRec::SplitLeft:
      case MoveRec::SplitRight: {
        bool left_side = mv.kind == MoveRec::SplitLeft;
        const ISide& S = left_side ? L : R;
        ISide part1, part2;
        for (std::size_t i = 0; i < S.size(); ++i)
          ((mv.subset >> i) & 1 ? part1 : part2).push_back(S[i]);
        auto c1 = left_side ? build(part1, R, mv.r1) : build(L, part1, mv.r1);
        auto c2 = left_side ? build(part2, R, mv.r2) : build(L, part2, mv.r2);
        node->move = left_side ? "split-left" : "split-right";
        node->children = {c1.first, c2.first};
        FormulaPtr f = left_side ? mk_or(c1.second, c2.second) : mk_and(c1.second, c2.second);
        return {node, f};
      }
      case MoveRec::Swap: {
        auto c = build(R, L, mv.r1);
        node->move = "swap";
        node->children = {c.first};
        return {node, mk_not(c.second)};
      }
      case MoveRec::None:
        break;
    }
    throw error("internal: malformed certificate move");
  }
};

void check_domain_consistent(const std::vector<PebbledStructure>& A,
                             const std::vector<PebbledStructure>& B, int k) {
  const PebbledStructure* first = !A.empty() ? &A.front() : (!B.empty() ? &B.front() : nullptr);
  if (!first) throw error("both sides empty");
  auto dom = first->assignment.colors();
  for (int c : dom)
    if (c > k) throw error("pebbled color x" + std::to_string(c) + " above the variable budget");
  for (const auto* side : {&A, &B})
    for (const auto& ps : *side)
      if (ps.assignment.colors() != dom) throw error("sides are not domain-consistent");
}

}  // namespace

FormulaPtr extract_formula(const Certificate& cert) {
  // Walk the closed tree; its shape is the parse tree of the formula.
  std::function<FormulaPtr(const SgNodePtr&)> walk = [&](const SgNodePtr& n) -> FormulaPtr {
    if (n->move == "close") return n->close_atom;
    if (n->move == "swap") return mk_not(walk(n->children.at(0)));
    if (n->move == "pebble-left") return mk_exists(n->color, walk(n->children.at(0)));
    if (n->move == "pebble-right") return mk_forall(n->color, walk(n->children.at(0)));
    if (n->move == "split-left") return mk_or(walk(n->children.at(0)), walk(n->children.at(1)));
    if (n->move == "split-right") return mk_and(walk(n->children.at(0)), walk(n->children.at(1)));
    throw error("open leaf encountered in certificate tree");
  };
  return walk(cert.root);
}

SgDecision decide_sg(const std::vector<PebbledStructure>& A,
                     const std::vector<PebbledStructure>& B, int r, int k, const MeasureSpec& m,
                     SgMode mode, bool want_certificate, Budget budget) {
  if (A.empty() && B.empty()) throw error("both sides empty");
  if (r < 0) throw error("measure budget must be >= 0");
  if (k < 1 || k > kMaxColors) throw error("variable budget out of range");
  check_domain_consistent(A, B, k);

  SgSolver sv;
  sv.m = &m;
  sv.mode = mode;
  sv.k = k;
  sv.cap = budget.node_cap;
  ISide L, R;
  for (const auto& ps : A) L.push_back({sv.reg.add(ps.structure), ps.assignment});
  for (const auto& ps : B) R.push_back({sv.reg.add(ps.structure), ps.assignment});
  sv.schema = sv.reg.structures.front()->schema();
  sort_dedup(L);
  sort_dedup(R);

  SgDecision d;
  auto [w, p] = sv.win(L, R, r);
  (void)p;
  d.winner = w ? Player::Spoiler : Player::Duplicator;
  d.nodes = sv.nodes;
  if (w && want_certificate) {
    CertBuilder cb{sv};
    auto [root, formula] = cb.build(L, R, r);
    Certificate cert;
    cert.root = root;
    cert.formula = formula;
    cert.measure_value = apply_measure(m, formula);
    cert.k = k;
    d.certificate = std::move(cert);
  }
  return d;
}

SgDecision decide_qvt(const std::vector<StructurePtr>& A, const std::vector<StructurePtr>& B,
                      int r, int k, SgMode mode, Budget budget) {
  std::vector<PebbledStructure> pa, pb;
  for (const auto& s : A) pa.emplace_back(s);
  for (const auto& s : B) pb.emplace_back(s);
  return decide_sg(pa, pb, r, k, measure_qcount(), mode, true, budget);
}

std::optional<MinMeasureResult> min_measure(const std::vector<StructurePtr>& A,
                                            const std::vector<StructurePtr>& B, int k,
                                            const MeasureSpec& m, int r_max, Budget budget) {
  std::vector<PebbledStructure> pa, pb;
  for (const auto& s : A) pa.emplace_back(s);
  for (const auto& s : B) pb.emplace_back(s);
  std::uint64_t nodes = 0;
  for (int r = 0; r <= r_max; ++r) {
    SgDecision d;
    try {
      d = decide_sg(pa, pb, r, k, m, SgMode::AtMost, true, budget);
    } catch (const budget_error& e) {
      throw budget_error(std::string(e.what()) + " (while testing measure value " +
                         std::to_string(r) + ")");
    }
    nodes += d.nodes;
    if (d.winner == Player::Spoiler) {
      MinMeasureResult res;
      res.value = r;
      res.certificate = *d.certificate;
      res.nodes = nodes;
      return res;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Naive reference: direct recursion over the same rules, no memoization, no
// canonical collapse, no search shortcuts. Sides are plain lists; only a
// path-repeat check (needed for termination) and the budget-0 reading of the
// quantifier-count-like measures are applied.

namespace {

struct NaiveOracle {
  const MeasureSpec* m;
  SgMode mode;
  int k;
  std::uint64_t cap, nodes = 0;
  SchemaPtr schema;

  using Side = std::vector<PebbledStructure>;

  void charge() {
    if (++nodes > cap) throw budget_error("oracle budget exceeded");
  }

  // Configurations are sets of pebbled structures; drop literal duplicates.
  static void dedup(Side& side) {
    Side out;
    for (const auto& ps : side) {
      bool seen = false;
      for (const auto& q : out)
        if (q.structure == ps.structure && q.assignment == ps.assignment) seen = true;
      if (!seen) out.push_back(ps);
    }
    side = std::move(out);
  }

  std::string cfg_key(const Side& L, const Side& R, int counter) const {
    // Order-insensitive comparison key for the path-repeat check.
    auto one = [](const Side& s) {
      std::vector<std::string> parts;
      for (const auto& ps : s) {
        std::string t;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%p:", static_cast<const void*>(ps.structure.get()));
        t += buf;
        for (auto v : ps.assignment.raw()) t += static_cast<char>(v + 2);
        parts.push_back(t);
      }
      std::sort(parts.begin(), parts.end());
      std::string out;
      for (auto& p : parts) {
        out += p;
        out += ';';
      }
      return out;
    };
    return std::to_string(counter) + "|" + one(L) + "|" + one(R);
  }

  std::vector<int> colors_of(const Side& L, const Side& R) const {
    if (!L.empty()) return L.front().assignment.colors();
    if (!R.empty()) return R.front().assignment.colors();
    return {};
  }

  bool separable_qf(const Side& L, const Side& R) const {
    auto atoms = close_atoms(schema, colors_of(L, R));
    if (atoms.empty()) return false;
    auto sig = [&](const PebbledStructure& ps) {
      std::string s;
      for (const auto& a : atoms) s += evaluate(a, ps) ? '1' : '0';
      return s;
    };
    std::vector<std::string> ls;
    for (const auto& l : L) ls.push_back(sig(l));
    for (const auto& r : R)
      if (std::find(ls.begin(), ls.end(), sig(r)) != ls.end()) return false;
    return true;
  }

  bool win(const Side& L, const Side& R, int counter, std::vector<std::string>& trail) {
    if (counter < 0) return false;
    charge();
    if (m->qf_complete_at_zero && counter == 0) return separable_qf(L, R);
    std::string key = cfg_key(L, R, counter);
    if (std::find(trail.begin(), trail.end(), key) != trail.end()) return false;
    trail.push_back(key);
    bool res = moves(L, R, counter, trail);
    trail.pop_back();
    return res;
  }

  bool moves(const Side& L, const Side& R, int counter, std::vector<std::string>& trail) {
    // Close.
    for (const auto& atom : close_atoms(schema, colors_of(L, R))) {
      int cost = m->h_atomic(*atom);
      if (mode == SgMode::Exact ? cost != counter : cost > counter) continue;
      bool sep = true;
      for (const auto& l : L)
        if (!evaluate(atom, l)) sep = false;
      for (const auto& r : R)
        if (evaluate(atom, r)) sep = false;
      if (sep) return true;
    }
    // Pebble moves.
    for (int side = 0; side < 2; ++side) {
      const Side& T = side == 0 ? L : R;
      const Side& U = side == 0 ? R : L;
      for (int r2 : side == 0 ? m->inv_exists(counter) : m->inv_forall(counter)) {
        if (r2 < 0) continue;
        for (int c = 1; c <= k; ++c) {
          Side U1;
          for (const auto& u : U)
            for (const auto& q : oblivious_responses(u, c)) U1.push_back(q);
          dedup(U1);
          std::vector<std::size_t> idx(T.size(), 0);
          while (true) {
            charge();
            Side T1;
            for (std::size_t i = 0; i < T.size(); ++i)
              T1.push_back(T[i].with(c, static_cast<int>(idx[i])));
            dedup(T1);
            bool w = side == 0 ? win(T1, U1, r2, trail) : win(U1, T1, r2, trail);
            if (w) return true;
            std::size_t i = T.size();
            while (i > 0 &&
                   ++idx[i - 1] == static_cast<std::size_t>(T[i - 1].structure->size()))
              idx[--i] = 0;
            if (i == 0) break;
          }
        }
      }
    }
    // Splits.
    for (int side = 0; side < 2; ++side) {
      const Side& S = side == 0 ? L : R;
      const Side& O = side == 0 ? R : L;
      if (S.size() > 16) throw budget_error("oracle split too large");
      for (auto [r1, r2] : side == 0 ? m->inv_or(counter) : m->inv_and(counter)) {
        if (r1 < 0 || r2 < 0) continue;
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << S.size()); ++bits) {
          Side p1, p2;
          for (std::size_t i = 0; i < S.size(); ++i)
            ((bits >> i) & 1 ? p1 : p2).push_back(S[i]);
          bool w1 = side == 0 ? win(p1, O, r1, trail) : win(O, p1, r1, trail);
          if (!w1) continue;
          bool w2 = side == 0 ? win(p2, O, r2, trail) : win(O, p2, r2, trail);
          if (w2) return true;
        }
      }
    }
    // Swap.
    for (int r1 : m->inv_not(counter)) {
      if (r1 < 0) continue;
      if (win(R, L, r1, trail)) return true;
    }
    return false;
  }
};

}  // namespace

Player naive_oracle_sg(const std::vector<PebbledStructure>& A,
                       const std::vector<PebbledStructure>& B, int r, int k,
                       const MeasureSpec& m, SgMode mode, Budget budget) {
  int total = 0;
  for (const auto& ps : A) total += ps.structure->size();
  for (const auto& ps : B) total += ps.structure->size();
  if (total > 8 || r > 6) throw error("naive oracle is limited to tiny inputs");
  check_domain_consistent(A, B, k);
  NaiveOracle oracle;
  oracle.m = &m;
  oracle.mode = mode;
  oracle.k = k;
  oracle.cap = budget.node_cap;
  oracle.schema = (!A.empty() ? A.front() : B.front()).structure->schema();
  std::vector<std::string> trail;
  return oracle.win(A, B, r, trail) ? Player::Spoiler : Player::Duplicator;
}

}  // namespace msgw
