#include "msgw/games.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>

#include "internal.hpp"

namespace msgw {

using detail::IPS;
using detail::ISide;
using detail::MsBase;
using detail::append_key;
using detail::sort_dedup;

namespace {

// ---------------------------------------------------------------------------
// The plain MS game and its no-on-top variants. One fresh color per round.

class MsEngine : public MsBase {
 public:
  OnTopPolicy policy = OnTopPolicy::Unrestricted;
  std::unordered_map<std::string, bool> memo;

  bool forbid_left() const {
    return policy == OnTopPolicy::ForbidLeft || policy == OnTopPolicy::ForbidBoth;
  }
  bool forbid_right() const {
    return policy == OnTopPolicy::ForbidRight || policy == OnTopPolicy::ForbidBoth;
  }

  // Spoiler to move; a matching pair exists; `color` is this round's color.
  bool win(const ISide& L, const ISide& R, int rounds_left, int color) {
    if (rounds_left <= 0) return false;
    charge();
    std::string key;
    key += static_cast<char>('0' + rounds_left);
    key += '|';
    append_key(key, L);
    key += '|';
    append_key(key, R);
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    bool result;
    if (rounds_left == 1)
      result = final_round(L, R, color);
    else if (rounds_left == 2)
      result = two_level(L, R, color);
    else
      result = generic(L, R, rounds_left, color);
    memo.emplace(std::move(key), result);
    return result;
  }

 private:
  // One round left: Spoiler wins iff on some side he can pick, per structure,
  // an element whose placement kills every pair against the full oblivious
  // response on the other side. Placements on distinct structures are
  // independent here, so no product enumeration is needed.
  bool final_round(const ISide& L, const ISide& R, int color) {
    charge();
    for (int s = 0; s < 2; ++s) {
      const ISide& T = s == 0 ? L : R;
      const ISide& U = s == 0 ? R : L;
      bool forbid = s == 0 ? forbid_left() : forbid_right();
      ISide U1 = expand(U, color);
      bool ok = true;
      for (const auto& t : T) {
        bool found = false;
        for (int e : candidates(t, forbid)) {
          IPS te = t;
          te.a.set(color, e);
          bool kills = true;
          for (const auto& u : U1)
            if (match(te, u)) {
              kills = false;
              break;
            }
          if (kills) {
            found = true;
            break;
          }
        }
        if (!found) {
          ok = false;
          break;
        }
      }
      if (ok) return true;
    }
    return false;
  }

  // Two rounds left. For a fixed side choice, Duplicator's expansion of the
  // other side does not depend on Spoiler's placements, so the three ways the
  // successor can be winning (no pair survives; the final round replayed on
  // the same side; the final round played on the expanded side) all reduce to
  // per-structure tables, and the placement product is walked with pruning.
  bool two_level(const ISide& L, const ISide& R, int color) {
    int c2 = color + 1;
    for (int s = 0; s < 2; ++s) {
      const ISide& T = s == 0 ? L : R;
      const ISide& U = s == 0 ? R : L;
      bool forbid_t = s == 0 ? forbid_left() : forbid_right();
      bool forbid_u = s == 0 ? forbid_right() : forbid_left();

      int m = static_cast<int>(T.size());
      std::vector<std::vector<int>> cand(static_cast<std::size_t>(m));
      bool playable = true;
      for (int i = 0; i < m; ++i) {
        cand[static_cast<std::size_t>(i)] = candidates(T[static_cast<std::size_t>(i)], forbid_t);
        if (cand[static_cast<std::size_t>(i)].empty()) playable = false;
      }
      if (!playable) continue;

      ISide U1 = expand(U, color);
      ISide U2 = expand(U1, c2);
      int nu = static_cast<int>(U1.size());

      // dead[i][e]: T_i+e matches nothing in U1.
      // lwin[i][e]: some second placement on T_i+e kills all of U2.
      std::vector<std::vector<std::uint8_t>> dead(static_cast<std::size_t>(m));
      std::vector<std::vector<std::uint8_t>> lwin(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) {
        const auto& cs = cand[static_cast<std::size_t>(i)];
        dead[static_cast<std::size_t>(i)].resize(cs.size());
        lwin[static_cast<std::size_t>(i)].resize(cs.size());
        for (std::size_t ei = 0; ei < cs.size(); ++ei) {
          IPS te = T[static_cast<std::size_t>(i)];
          te.a.set(color, cs[ei]);
          bool d = true;
          for (const auto& u : U1)
            if (match(te, u)) {
              d = false;
              break;
            }
          dead[static_cast<std::size_t>(i)][ei] = d;
          bool lw = false;
          for (int a2 : candidates(te, forbid_t)) {
            IPS tea = te;
            tea.a.set(c2, a2);
            bool kills = true;
            for (const auto& u : U2)
              if (match(tea, u)) {
                kills = false;
                break;
              }
            if (kills) {
              lw = true;
              break;
            }
          }
          lwin[static_cast<std::size_t>(i)][ei] = lw;
        }
      }

      // For the final round played on U1: allow[u][b] as bits over (i, e):
      // placing c2 on u at b kills every extension of T_i+e.
      struct UMove {
        int u;  // index into U1
        std::vector<std::uint64_t> bits;  // per structure i: element bitmask
      };
      std::vector<std::vector<UMove>> umoves(static_cast<std::size_t>(nu));
      for (int uj = 0; uj < nu; ++uj) {
        for (int b : candidates(U1[static_cast<std::size_t>(uj)], forbid_u)) {
          IPS ub = U1[static_cast<std::size_t>(uj)];
          ub.a.set(c2, b);
          UMove mv;
          mv.u = uj;
          mv.bits.assign(static_cast<std::size_t>(m), 0);
          bool any = false;
          for (int i = 0; i < m; ++i) {
            const auto& cs = cand[static_cast<std::size_t>(i)];
            for (std::size_t ei = 0; ei < cs.size(); ++ei) {
              IPS te = T[static_cast<std::size_t>(i)];
              te.a.set(color, cs[ei]);
              bool kills = true;
              int n = reg.at(te.sid).size();
              for (int a2 = 0; a2 < n; ++a2) {  // Duplicator is unrestricted
                IPS tea = te;
                tea.a.set(c2, a2);
                if (match(tea, ub)) {
                  kills = false;
                  break;
                }
              }
              if (kills) {
                mv.bits[static_cast<std::size_t>(i)] |= std::uint64_t{1} << ei;
                any = true;
              }
            }
          }
          if (any) umoves[static_cast<std::size_t>(uj)].push_back(std::move(mv));
        }
      }

      // The three ways a placement vector can win are independent, and the
      // first two decompose per structure.
      bool dead_ok = true, lwin_ok = true;
      for (int i = 0; i < m && (dead_ok || lwin_ok); ++i) {
        bool d = false, lw = false;
        for (std::size_t ei = 0; ei < cand[static_cast<std::size_t>(i)].size(); ++ei) {
          d = d || dead[static_cast<std::size_t>(i)][ei];
          lw = lw || lwin[static_cast<std::size_t>(i)][ei];
        }
        dead_ok = dead_ok && d;
        lwin_ok = lwin_ok && lw;
      }
      if (dead_ok || lwin_ok) return true;

      // The coverage disjunct couples the placements: pick one umove per
      // opponent structure so that some placement vector lies in all of
      // them. Solved as a small cover search with forward checking and
      // most-constrained-first ordering.
      std::vector<std::uint64_t> alive(static_cast<std::size_t>(nu));
      for (int uj = 0; uj < nu; ++uj)
        alive[static_cast<std::size_t>(uj)] =
            umoves[static_cast<std::size_t>(uj)].size() >= 64
                ? ~std::uint64_t{0}
                : (std::uint64_t{1} << umoves[static_cast<std::size_t>(uj)].size()) - 1;
      std::vector<std::uint64_t> chosen(static_cast<std::size_t>(m), 0);  // 0 = open
      if (dfs_cover(m, umoves, alive, chosen)) return true;
    }
    return false;
  }

  // chosen[i] == 0 marks an undecided structure; otherwise it is a one-bit
  // mask naming the committed candidate element.
  template <typename UMoves>
  bool dfs_cover(int m, const UMoves& umoves, const std::vector<std::uint64_t>& alive,
                 std::vector<std::uint64_t> chosen) {
    charge();
    // Forward check: per undecided structure, the candidate elements still
    // admitted by every opponent's alive moves.
    std::vector<std::uint64_t> viable(static_cast<std::size_t>(m), ~std::uint64_t{0});
    for (std::size_t uj = 0; uj < alive.size(); ++uj) {
      const auto& mvs = umoves[uj];
      for (int i = 0; i < m; ++i) {
        std::uint64_t reach = 0;
        for (std::size_t b = 0; b < mvs.size(); ++b)
          if (alive[uj] & (std::uint64_t{1} << b)) reach |= mvs[b].bits[static_cast<std::size_t>(i)];
        viable[static_cast<std::size_t>(i)] &= reach;
      }
    }
    int best = -1;
    int best_count = 1 << 20;
    for (int i = 0; i < m; ++i) {
      std::uint64_t v = chosen[static_cast<std::size_t>(i)]
                            ? (viable[static_cast<std::size_t>(i)] & chosen[static_cast<std::size_t>(i)])
                            : viable[static_cast<std::size_t>(i)];
      if (!v) return false;
      if (!chosen[static_cast<std::size_t>(i)]) {
        int count = std::popcount(v);
        if (count < best_count) {
          best_count = count;
          best = i;
        }
      }
      viable[static_cast<std::size_t>(i)] = v;
    }
    if (best < 0) return true;  // every structure committed and consistent

    std::uint64_t options = viable[static_cast<std::size_t>(best)];
    while (options) {
      std::uint64_t bit = options & (~options + 1);
      options ^= bit;
      std::vector<std::uint64_t> next_alive(alive.size());
      bool ok = true;
      for (std::size_t uj = 0; uj < alive.size() && ok; ++uj) {
        const auto& mvs = umoves[uj];
        std::uint64_t keep = 0;
        for (std::size_t b = 0; b < mvs.size(); ++b)
          if (alive[uj] & (std::uint64_t{1} << b))
            if (mvs[b].bits[static_cast<std::size_t>(best)] & bit) keep |= std::uint64_t{1} << b;
        next_alive[uj] = keep;
        if (!keep) ok = false;
      }
      if (!ok) continue;
      auto next_chosen = chosen;
      next_chosen[static_cast<std::size_t>(best)] = bit;
      if (dfs_cover(m, umoves, next_alive, std::move(next_chosen))) return true;
    }
    return false;
  }

  // Straight placement-product recursion; `only_side` < 0 tries both sides.
  bool generic(const ISide& L, const ISide& R, int rounds_left, int color) {
    return generic_for_side(L, R, rounds_left, color, -1);
  }

  bool generic_for_side(const ISide& L, const ISide& R, int rounds_left, int color,
                        int only_side) {
    for (int s = 0; s < 2; ++s) {
      if (only_side >= 0 && s != only_side) continue;
      const ISide& T = s == 0 ? L : R;
      const ISide& U = s == 0 ? R : L;
      bool forbid = s == 0 ? forbid_left() : forbid_right();

      std::vector<std::vector<int>> cand;
      bool playable = true;
      for (const auto& t : T) {
        cand.push_back(candidates(t, forbid));
        if (cand.back().empty()) playable = false;
      }
      if (!playable) continue;
      ISide U1 = expand(U, color);

      // A separating sentence for a superset side separates every subset: if
      // even all placements at once win, the first placement vector does.
      // Worth a try only when the placement product is large.
      std::uint64_t product = 1;
      for (const auto& c : cand) product = std::min<std::uint64_t>(product * c.size(), 1 << 20);
      std::uint64_t flat = 0;
      for (const auto& c : cand) flat += c.size();
      if (product > 64 && flat <= 80) {
        ISide Tall;
        for (std::size_t i = 0; i < T.size(); ++i)
          for (int e : cand[i]) {
            IPS q = T[i];
            q.a.set(color, e);
            Tall.push_back(q);
          }
        sort_dedup(Tall);
        const ISide& nl = s == 0 ? Tall : U1;
        const ISide& nr = s == 0 ? U1 : Tall;
        if (!has_match(nl, nr) || win(nl, nr, rounds_left - 1, color + 1)) {
          ISide T1 = T;
          for (std::size_t i = 0; i < T.size(); ++i) T1[i].a.set(color, cand[i].front());
          sort_dedup(T1);
          const ISide& fl = s == 0 ? T1 : U1;
          const ISide& fr = s == 0 ? U1 : T1;
          if (!has_match(fl, fr) || win(fl, fr, rounds_left - 1, color + 1)) return true;
        }
      }

      // And a winning vector must win on each structure alone.
      for (std::size_t i = 0; i < T.size(); ++i) {
        std::vector<int> keep;
        for (int e : cand[i]) {
          IPS q = T[i];
          q.a.set(color, e);
          ISide single = {q};
          const ISide& nl = s == 0 ? single : U1;
          const ISide& nr = s == 0 ? U1 : single;
          if (!has_match(nl, nr) || win(nl, nr, rounds_left - 1, color + 1)) keep.push_back(e);
        }
        cand[i] = std::move(keep);
        if (cand[i].empty()) {
          playable = false;
          break;
        }
      }
      if (!playable) continue;

      std::vector<std::size_t> idx(T.size(), 0);
      while (true) {
        charge();
        ISide T1 = T;
        for (std::size_t i = 0; i < T.size(); ++i)
          T1[i].a.set(color, cand[i][idx[i]]);
        sort_dedup(T1);
        const ISide& nl = s == 0 ? T1 : U1;
        const ISide& nr = s == 0 ? U1 : T1;
        if (!has_match(nl, nr)) return true;
        if (win(nl, nr, rounds_left - 1, color + 1)) return true;

        std::size_t i = T.size();
        while (i > 0 && ++idx[i - 1] == cand[i - 1].size()) idx[--i] = 0;
        if (i == 0) break;
      }
    }
    return false;
  }
};

Decision run_ms(const std::vector<StructurePtr>& A, const std::vector<StructurePtr>& B, int r,
                OnTopPolicy policy, Budget budget) {
  if (A.empty() || B.empty()) throw error("both sides must be nonempty");
  if (r < 0) throw error("round count must be >= 0");
  if (r > kMaxColors) throw error("round count above supported limit");
  MsEngine eng;
  eng.policy = policy;
  eng.cap = budget.node_cap;
  ISide L, R;
  for (const auto& s : A) L.push_back({eng.reg.add(s), {}});
  for (const auto& s : B) R.push_back({eng.reg.add(s), {}});
  sort_dedup(L);
  sort_dedup(R);
  Decision d;
  if (!eng.has_match(L, R))
    d.winner = Player::Spoiler;  // Spoiler wins the 0-round game outright
  else
    d.winner = eng.win(L, R, r, 1) ? Player::Spoiler : Player::Duplicator;
  d.nodes = eng.nodes;
  return d;
}

}  // namespace

Decision decide_ms(const std::vector<StructurePtr>& A, const std::vector<StructurePtr>& B,
                   int r, Budget budget) {
  return run_ms(A, B, r, OnTopPolicy::Unrestricted, budget);
}

Decision decide_ms_no_on_top(const std::vector<StructurePtr>& A,
                             const std::vector<StructurePtr>& B, int r, OnTopPolicy policy,
                             Budget budget) {
  if (policy == OnTopPolicy::Unrestricted)
    throw error("decide_ms_no_on_top: pick a restricting policy (or call decide_ms)");
  return run_ms(A, B, r, policy, budget);
}

// ---------------------------------------------------------------------------
// MS game with repebbling (k colors, reuse picks the old pebble up).

namespace {

class RepebbleEngine : public MsBase {
 public:
  int k = 1;
  std::unordered_map<std::string, bool> memo;

  bool win(const ISide& L, const ISide& R, int rounds_left) {
    if (rounds_left <= 0) return false;
    charge();
    std::string key;
    key += static_cast<char>('0' + rounds_left);
    key += '|';
    append_key(key, L);
    key += '|';
    append_key(key, R);
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    bool result = false;
    for (int c = 1; c <= k && !result; ++c) {
      for (int s = 0; s < 2 && !result; ++s) {
        const ISide& T = s == 0 ? L : R;
        const ISide& U = s == 0 ? R : L;
        ISide U1 = expand(U, c);

        if (rounds_left == 1) {
          // Placements decompose per structure on the last round.
          bool ok = true;
          for (const auto& t : T) {
            bool found = false;
            for (int e = 0; e < reg.at(t.sid).size(); ++e) {
              IPS te = t;
              te.a.set(c, e);
              bool kills = true;
              for (const auto& u : U1)
                if (match(te, u)) {
                  kills = false;
                  break;
                }
              if (kills) {
                found = true;
                break;
              }
            }
            if (!found) {
              ok = false;
              break;
            }
          }
          result = ok;
          continue;
        }

        std::vector<std::size_t> idx(T.size(), 0);
        while (true) {
          charge();
          ISide T1 = T;
          for (std::size_t i = 0; i < T.size(); ++i)
            T1[i].a.set(c, static_cast<int>(idx[i]));
          sort_dedup(T1);
          const ISide& nl = s == 0 ? T1 : U1;
          const ISide& nr = s == 0 ? U1 : T1;
          if (!has_match(nl, nr) || win(nl, nr, rounds_left - 1)) {
            result = true;
            break;
          }
          std::size_t i = T.size();
          while (i > 0 &&
                 ++idx[i - 1] == static_cast<std::size_t>(reg.at(T[i - 1].sid).size()))
            idx[--i] = 0;
          if (i == 0) break;
        }
      }
    }
    memo.emplace(std::move(key), result);
    return result;
  }
};

}  // namespace

Decision decide_ms_repebbling(const std::vector<StructurePtr>& A,
                              const std::vector<StructurePtr>& B, int r, int k, Budget budget) {
  if (A.empty() || B.empty()) throw error("both sides must be nonempty");
  if (k < 1 || k > kMaxColors) throw error("color count out of range");
  if (r < 0) throw error("round count must be >= 0");
  RepebbleEngine eng;
  eng.k = k;
  eng.cap = budget.node_cap;
  ISide L, R;
  for (const auto& s : A) L.push_back({eng.reg.add(s), {}});
  for (const auto& s : B) R.push_back({eng.reg.add(s), {}});
  sort_dedup(L);
  sort_dedup(R);
  Decision d;
  if (!eng.has_match(L, R))
    d.winner = Player::Spoiler;
  else
    d.winner = eng.win(L, R, r) ? Player::Spoiler : Player::Duplicator;
  d.nodes = eng.nodes;
  return d;
}

// ---------------------------------------------------------------------------
// Hereditary MS game with repebbling: positions carry the bipartite relation
// of lineage pairs that have matched at every round so far.

namespace {

struct HState {
  ISide left, right;
  std::vector<std::uint64_t> row;  // per left instance: bits over right
};

class HereditaryEngine : public MsBase {
 public:
  int k = 1;
  std::unordered_map<std::string, bool> memo;

  bool edges_empty(const HState& st) const {
    for (auto r : st.row)
      if (r) return false;
    return true;
  }

  // Drop edge-less instances, merge literal twins, order deterministically.
  void normalize(HState& st) const {
    for (int pass = 0; pass < 2; ++pass) {
      // Drop left instances with empty rows and unreferenced right instances.
      std::uint64_t used = 0;
      for (auto r : st.row) used |= r;
      std::vector<int> rmap(st.right.size(), -1);
      ISide nright;
      for (std::size_t j = 0; j < st.right.size(); ++j)
        if (used & (std::uint64_t{1} << j)) {
          rmap[j] = static_cast<int>(nright.size());
          nright.push_back(st.right[j]);
        }
      ISide nleft;
      std::vector<std::uint64_t> nrow;
      for (std::size_t i = 0; i < st.left.size(); ++i) {
        if (!st.row[i]) continue;
        std::uint64_t bits = 0;
        for (std::size_t j = 0; j < st.right.size(); ++j)
          if (st.row[i] & (std::uint64_t{1} << j)) bits |= std::uint64_t{1} << rmap[j];
        nleft.push_back(st.left[i]);
        nrow.push_back(bits);
      }
      st.left = std::move(nleft);
      st.right = std::move(nright);
      st.row = std::move(nrow);

      // Sort right by content, then columns; recompute rows accordingly.
      std::vector<int> rorder(st.right.size());
      for (std::size_t j = 0; j < rorder.size(); ++j) rorder[j] = static_cast<int>(j);
      std::vector<std::uint64_t> col(st.right.size(), 0);
      for (std::size_t i = 0; i < st.left.size(); ++i)
        for (std::size_t j = 0; j < st.right.size(); ++j)
          if (st.row[i] & (std::uint64_t{1} << j)) col[j] |= std::uint64_t{1} << i;
      std::sort(rorder.begin(), rorder.end(), [&](int a, int b) {
        const IPS& pa = st.right[static_cast<std::size_t>(a)];
        const IPS& pb = st.right[static_cast<std::size_t>(b)];
        if (!(pa == pb)) return pa < pb;
        return col[static_cast<std::size_t>(a)] < col[static_cast<std::size_t>(b)];
      });
      ISide r2;
      std::vector<int> rinv(st.right.size());
      for (std::size_t j = 0; j < rorder.size(); ++j) {
        rinv[static_cast<std::size_t>(rorder[j])] = static_cast<int>(j);
        r2.push_back(st.right[static_cast<std::size_t>(rorder[j])]);
      }
      for (auto& r : st.row) {
        std::uint64_t bits = 0;
        for (std::size_t j = 0; j < st.right.size(); ++j)
          if (r & (std::uint64_t{1} << j)) bits |= std::uint64_t{1} << rinv[j];
        r = bits;
      }
      st.right = std::move(r2);

      // Merge identical right twins: same content and same column. The side
      // is sorted by (content, column), so twins are adjacent.
      {
        std::vector<std::uint64_t> ncol(st.right.size(), 0);
        for (std::size_t i = 0; i < st.left.size(); ++i)
          for (std::size_t j = 0; j < st.right.size(); ++j)
            if (st.row[i] & (std::uint64_t{1} << j)) ncol[j] |= std::uint64_t{1} << i;
        ISide r3;
        std::vector<int> rmap2(st.right.size(), -1);
        for (std::size_t j = 0; j < st.right.size(); ++j) {
          if (j > 0 && st.right[j] == st.right[j - 1] && ncol[j] == ncol[j - 1]) {
            rmap2[j] = rmap2[j - 1];
          } else {
            rmap2[j] = static_cast<int>(r3.size());
            r3.push_back(st.right[j]);
          }
        }
        for (auto& r : st.row) {
          std::uint64_t bits = 0;
          for (std::size_t j = 0; j < st.right.size(); ++j)
            if (r & (std::uint64_t{1} << j)) bits |= std::uint64_t{1} << rmap2[j];
          r = bits;
        }
        st.right = std::move(r3);
      }

      // Sort left by (content, row) and merge identical twins.
      std::vector<int> lorder(st.left.size());
      for (std::size_t i = 0; i < lorder.size(); ++i) lorder[i] = static_cast<int>(i);
      std::sort(lorder.begin(), lorder.end(), [&](int a, int b) {
        const IPS& pa = st.left[static_cast<std::size_t>(a)];
        const IPS& pb = st.left[static_cast<std::size_t>(b)];
        if (!(pa == pb)) return pa < pb;
        return st.row[static_cast<std::size_t>(a)] < st.row[static_cast<std::size_t>(b)];
      });
      ISide l2;
      std::vector<std::uint64_t> row2;
      for (int oi : lorder) {
        const IPS& ps = st.left[static_cast<std::size_t>(oi)];
        std::uint64_t r = st.row[static_cast<std::size_t>(oi)];
        if (!l2.empty() && l2.back() == ps && row2.back() == r) continue;
        l2.push_back(ps);
        row2.push_back(r);
      }
      st.left = std::move(l2);
      st.row = std::move(row2);
    }
  }

  std::string key_of(const HState& st, int rounds_left) const {
    std::string key;
    key += static_cast<char>('0' + rounds_left);
    key += '|';
    append_key(key, st.left);
    key += '#';
    for (auto r : st.row) {
      key += std::to_string(r);
      key += ',';
    }
    key += '|';
    append_key(key, st.right);
    return key;
  }

  bool win(HState st, int rounds_left) {
    if (edges_empty(st)) return true;
    if (rounds_left <= 0) return false;
    charge();
    normalize(st);
    if (st.left.size() > 64 || st.right.size() > 64)
      throw budget_error("hereditary game state too large");
    std::string key = key_of(st, rounds_left);
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    bool result = false;
    for (int c = 1; c <= k && !result; ++c) {
      for (int s = 0; s < 2 && !result; ++s) {
        // Spoiler places one pebble per instance on side s; Duplicator
        // expands every instance of the other side.
        const ISide& T = s == 0 ? st.left : st.right;
        std::vector<std::size_t> idx(T.size(), 0);
        while (true) {
          charge();
          HState next = successor(st, s, c, idx);
          if (win(std::move(next), rounds_left - 1)) {
            result = true;
            break;
          }
          std::size_t i = T.size();
          while (i > 0 &&
                 ++idx[i - 1] == static_cast<std::size_t>(reg.at(T[i - 1].sid).size()))
            idx[--i] = 0;
          if (i == 0) break;
        }
      }
    }
    memo.emplace(std::move(key), result);
    return result;
  }

 private:
  HState successor(const HState& st, int side, int color,
                   const std::vector<std::size_t>& idx) const {
    HState next;
    if (side == 0) {
      // Spoiler left: one child per left instance; right instances fan out.
      ISide l2;
      for (std::size_t i = 0; i < st.left.size(); ++i) {
        IPS ps = st.left[i];
        ps.a.set(color, static_cast<int>(idx[i]));
        l2.push_back(ps);
      }
      std::vector<std::pair<std::size_t, IPS>> r2;  // (parent index, child)
      for (std::size_t j = 0; j < st.right.size(); ++j)
        for (int b = 0; b < reg.at(st.right[j].sid).size(); ++b) {
          IPS ps = st.right[j];
          ps.a.set(color, b);
          r2.emplace_back(j, ps);
        }
      next.left = l2;
      for (auto& rc : r2) next.right.push_back(rc.second);
      next.row.assign(next.left.size(), 0);
      for (std::size_t i = 0; i < next.left.size(); ++i)
        for (std::size_t j2 = 0; j2 < r2.size(); ++j2) {
          std::size_t pj = r2[j2].first;
          if ((st.row[i] & (std::uint64_t{1} << pj)) && match(next.left[i], r2[j2].second))
            next.row[i] |= std::uint64_t{1} << j2;
        }
    } else {
      // Spoiler right: left instances fan out; one child per right instance.
      std::vector<std::pair<std::size_t, IPS>> l2;
      for (std::size_t i = 0; i < st.left.size(); ++i)
        for (int b = 0; b < reg.at(st.left[i].sid).size(); ++b) {
          IPS ps = st.left[i];
          ps.a.set(color, b);
          l2.emplace_back(i, ps);
        }
      ISide r2;
      for (std::size_t j = 0; j < st.right.size(); ++j) {
        IPS ps = st.right[j];
        ps.a.set(color, static_cast<int>(idx[j]));
        r2.push_back(ps);
      }
      for (auto& lc : l2) next.left.push_back(lc.second);
      next.right = r2;
      next.row.assign(next.left.size(), 0);
      for (std::size_t i2 = 0; i2 < l2.size(); ++i2) {
        std::size_t pi = l2[i2].first;
        for (std::size_t j = 0; j < r2.size(); ++j)
          if ((st.row[pi] & (std::uint64_t{1} << j)) && match(l2[i2].second, r2[j]))
            next.row[i2] |= std::uint64_t{1} << j;
      }
    }
    return next;
  }
};

}  // namespace

Decision decide_ms_hereditary(const std::vector<StructurePtr>& A,
                              const std::vector<StructurePtr>& B, int r, int k, Budget budget) {
  if (A.empty() || B.empty()) throw error("both sides must be nonempty");
  if (k < 1 || k > kMaxColors) throw error("color count out of range");
  if (r < 0) throw error("round count must be >= 0");
  HereditaryEngine eng;
  eng.k = k;
  eng.cap = budget.node_cap;
  HState st;
  for (const auto& s : A) st.left.push_back({eng.reg.add(s), {}});
  for (const auto& s : B) st.right.push_back({eng.reg.add(s), {}});
  sort_dedup(st.left);
  sort_dedup(st.right);
  st.row.assign(st.left.size(), 0);
  for (std::size_t i = 0; i < st.left.size(); ++i)
    for (std::size_t j = 0; j < st.right.size(); ++j)
      if (eng.match(st.left[i], st.right[j])) st.row[i] |= std::uint64_t{1} << j;
  Decision d;
  d.winner = eng.win(std::move(st), r) ? Player::Spoiler : Player::Duplicator;
  d.nodes = eng.nodes;
  return d;
}

// ---------------------------------------------------------------------------
// MS game without duplication: multisets with explicit multiplicities and an
// adversarial Duplicator (she is no longer oblivious-optimal without copies).

namespace {

struct MGroup {
  IPS ps;
  int cnt = 1;
  bool operator<(const MGroup& o) const {
    if (!(ps == o.ps)) return ps < o.ps;
    return cnt < o.cnt;
  }
};

using MSide = std::vector<MGroup>;

class NoDupEngine : public MsBase {
 public:
  std::unordered_map<std::string, bool> memo;

  static void normalize(MSide& side) {
    std::sort(side.begin(), side.end());
    MSide out;
    for (const auto& g : side) {
      if (!out.empty() && out.back().ps == g.ps)
        out.back().cnt += g.cnt;
      else
        out.push_back(g);
    }
    side = std::move(out);
  }

  bool msides_match(const MSide& L, const MSide& R) const {
    for (const auto& l : L)
      for (const auto& r : R)
        if (match(l.ps, r.ps)) return true;
    return false;
  }

  // All ways to distribute `cnt` copies over placements 0..n-1.
  static void compositions(int cnt, int n, std::vector<int>& cur,
                           std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == n - 1) {
      int used = 0;
      for (int v : cur) used += v;
      cur.push_back(cnt - used);
      out.push_back(cur);
      cur.pop_back();
      return;
    }
    int used = 0;
    for (int v : cur) used += v;
    for (int take = 0; take <= cnt - used; ++take) {
      cur.push_back(take);
      compositions(cnt, n, cur, out);
      cur.pop_back();
    }
  }

  // Enumerates one side's move: each group distributes its copies.
  void side_moves(const MSide& side, int color, std::vector<MSide>& out) const {
    std::vector<std::vector<std::vector<int>>> per_group;
    for (const auto& g : side) {
      std::vector<std::vector<int>> comps;
      std::vector<int> cur;
      compositions(g.cnt, reg.at(g.ps.sid).size(), cur, comps);
      per_group.push_back(std::move(comps));
    }
    std::vector<std::size_t> idx(side.size(), 0);
    while (true) {
      MSide next;
      for (std::size_t gi = 0; gi < side.size(); ++gi) {
        const auto& comp = per_group[gi][idx[gi]];
        for (std::size_t e = 0; e < comp.size(); ++e)
          if (comp[e] > 0) {
            MGroup g2;
            g2.ps = side[gi].ps;
            g2.ps.a.set(color, static_cast<int>(e));
            g2.cnt = comp[e];
            next.push_back(g2);
          }
      }
      normalize(next);
      out.push_back(std::move(next));
      std::size_t i = side.size();
      while (i > 0 && ++idx[i - 1] == per_group[i - 1].size()) idx[--i] = 0;
      if (i == 0) break;
    }
  }

  bool win(const MSide& L, const MSide& R, int rounds_left, int color) {
    if (rounds_left <= 0) return false;
    charge();
    std::string key;
    key += static_cast<char>('0' + rounds_left);
    key += '|';
    for (const auto& g : L) {
      key += static_cast<char>('A' + g.ps.sid);
      for (auto v : g.ps.a.raw()) key += static_cast<char>(v + 2);
      key += '*' + std::to_string(g.cnt) + ';';
    }
    key += '|';
    for (const auto& g : R) {
      key += static_cast<char>('A' + g.ps.sid);
      for (auto v : g.ps.a.raw()) key += static_cast<char>(v + 2);
      key += '*' + std::to_string(g.cnt) + ';';
    }
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    bool result = false;
    for (int s = 0; s < 2 && !result; ++s) {
      const MSide& T = s == 0 ? L : R;
      const MSide& U = s == 0 ? R : L;
      std::vector<MSide> smoves, dmoves;
      side_moves(T, color, smoves);
      side_moves(U, color, dmoves);
      for (const auto& T1 : smoves) {
        bool spoiler_wins_move = true;
        for (const auto& U1 : dmoves) {
          charge();
          const MSide& nl = s == 0 ? T1 : U1;
          const MSide& nr = s == 0 ? U1 : T1;
          if (!msides_match(nl, nr)) continue;  // this response loses for her
          if (rounds_left == 1 || !win(nl, nr, rounds_left - 1, color + 1)) {
            spoiler_wins_move = false;  // she found a surviving response
            break;
          }
        }
        if (spoiler_wins_move) {
          result = true;
          break;
        }
      }
    }
    memo.emplace(std::move(key), result);
    return result;
  }
};

}  // namespace

Decision decide_ms_no_duplication(const std::vector<Weighted>& A, const std::vector<Weighted>& B,
                                  int r, Budget budget) {
  if (A.empty() || B.empty()) throw error("both sides must be nonempty");
  if (r < 0) throw error("round count must be >= 0");
  NoDupEngine eng;
  eng.cap = budget.node_cap;
  MSide L, R;
  for (const auto& w : A) {
    if (w.count < 1) throw error("multiplicities must be >= 1");
    L.push_back({{eng.reg.add(w.structure), {}}, w.count});
  }
  for (const auto& w : B) {
    if (w.count < 1) throw error("multiplicities must be >= 1");
    R.push_back({{eng.reg.add(w.structure), {}}, w.count});
  }
  NoDupEngine::normalize(L);
  NoDupEngine::normalize(R);
  Decision d;
  if (!eng.msides_match(L, R))
    d.winner = Player::Spoiler;
  else
    d.winner = eng.win(L, R, r, 1) ? Player::Spoiler : Player::Duplicator;
  d.nodes = eng.nodes;
  return d;
}

// ---------------------------------------------------------------------------
// Reference engine: full adversarial Duplicator in the copying game.

namespace {

class AdvEngine : public MsBase {
 public:
  std::unordered_map<std::string, bool> memo;

  bool win(const ISide& L, const ISide& R, int rounds_left, int color) {
    if (rounds_left <= 0) return false;
    charge();
    std::string key;
    key += static_cast<char>('0' + rounds_left);
    key += '|';
    append_key(key, L);
    key += '|';
    append_key(key, R);
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    bool result = false;
    for (int s = 0; s < 2 && !result; ++s) {
      const ISide& T = s == 0 ? L : R;
      const ISide& U = s == 0 ? R : L;
      std::vector<std::size_t> idx(T.size(), 0);
      while (true) {
        ISide T1 = T;
        for (std::size_t i = 0; i < T.size(); ++i)
          T1[i].a.set(color, static_cast<int>(idx[i]));
        sort_dedup(T1);
        // Duplicator answers with any nonempty placement subset per structure.
        if (!duplicator_survives(T1, U, s, rounds_left, color)) {
          result = true;
          break;
        }
        std::size_t i = T.size();
        while (i > 0 &&
               ++idx[i - 1] == static_cast<std::size_t>(reg.at(T[i - 1].sid).size()))
          idx[--i] = 0;
        if (i == 0) break;
      }
    }
    memo.emplace(std::move(key), result);
    return result;
  }

 private:
  bool duplicator_survives(const ISide& T1, const ISide& U, int side, int rounds_left,
                           int color) {
    // Enumerate, per U-structure, a nonempty subset of placements.
    std::vector<std::vector<IPS>> options;
    for (const auto& u : U) {
      std::vector<IPS> exts;
      for (int e = 0; e < reg.at(u.sid).size(); ++e) {
        IPS q = u;
        q.a.set(color, e);
        exts.push_back(q);
      }
      options.push_back(std::move(exts));
    }
    std::vector<std::uint32_t> mask(U.size(), 1);
    while (true) {
      charge();
      ISide U1;
      for (std::size_t i = 0; i < U.size(); ++i)
        for (std::size_t b = 0; b < options[i].size(); ++b)
          if (mask[i] & (1u << b)) U1.push_back(options[i][b]);
      sort_dedup(U1);
      const ISide& nl = side == 0 ? T1 : U1;
      const ISide& nr = side == 0 ? U1 : T1;
      if (has_match(nl, nr) && (rounds_left == 1 || !win(nl, nr, rounds_left - 1, color + 1)))
        return true;
      std::size_t i = U.size();
      while (i > 0) {
        std::uint32_t limit = (1u << options[i - 1].size()) - 1;
        if (++mask[i - 1] <= limit) break;
        mask[i - 1] = 1;
        --i;
      }
      if (i == 0) break;
    }
    return false;
  }
};

}  // namespace

Decision decide_ms_adversarial_dup(const std::vector<StructurePtr>& A,
                                   const std::vector<StructurePtr>& B, int r, Budget budget) {
  if (A.empty() || B.empty()) throw error("both sides must be nonempty");
  int total = 0;
  for (const auto& s : A) total += s->size();
  for (const auto& s : B) total += s->size();
  if (total > 8 || r > 3) throw error("adversarial reference engine is limited to tiny instances");
  AdvEngine eng;
  eng.cap = budget.node_cap;
  ISide L, R;
  for (const auto& s : A) L.push_back({eng.reg.add(s), {}});
  for (const auto& s : B) R.push_back({eng.reg.add(s), {}});
  sort_dedup(L);
  sort_dedup(R);
  Decision d;
  if (!eng.has_match(L, R))
    d.winner = Player::Spoiler;
  else
    d.winner = eng.win(L, R, r, 1) ? Player::Spoiler : Player::Duplicator;
  d.nodes = eng.nodes;
  return d;
}

// ---------------------------------------------------------------------------
// Classical EF games on a pair of structures.

namespace {

class EfEngine {
 public:
  StructurePtr A, B;
  std::uint64_t cap = 0, nodes = 0;
  std::unordered_map<std::string, bool> memo;

  void charge() {
    if (++nodes > cap) throw budget_error("search budget exceeded (node cap)");
  }

  bool match(const Assignment& a, const Assignment& b) const {
    return matching_pair_raw(*A, a, *B, b);
  }

  // Fresh color per round when k == 0, else Spoiler picks one of k colors.
  bool win(const Assignment& a, const Assignment& b, int rounds_left, int next_color, int k) {
    if (rounds_left <= 0) return false;
    charge();
    std::string key;
    key += static_cast<char>('0' + rounds_left);
    for (auto v : a.raw()) key += static_cast<char>(v + 2);
    for (auto v : b.raw()) key += static_cast<char>(v + 2);
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    bool result = false;
    int c_lo = k == 0 ? next_color : 1;
    int c_hi = k == 0 ? next_color : k;
    for (int c = c_lo; c <= c_hi && !result; ++c) {
      for (int side = 0; side < 2 && !result; ++side) {
        const Structure& S = side == 0 ? *A : *B;
        const Structure& O = side == 0 ? *B : *A;
        for (int e = 0; e < S.size() && !result; ++e) {
          bool all_bad = true;
          for (int f = 0; f < O.size(); ++f) {
            Assignment a2 = a, b2 = b;
            (side == 0 ? a2 : b2).set(c, e);
            (side == 0 ? b2 : a2).set(c, f);
            if (match(a2, b2) && !win(a2, b2, rounds_left - 1, next_color + 1, k)) {
              all_bad = false;
              break;
            }
          }
          if (all_bad) result = true;
        }
      }
    }
    memo.emplace(std::move(key), result);
    return result;
  }
};

}  // namespace

Decision decide_ef(const StructurePtr& A, const StructurePtr& B, int r, Budget budget) {
  if (!(*A->schema() == *B->schema())) throw error("structures must share a schema");
  if (r < 0 || r > kMaxColors) throw error("round count out of range");
  EfEngine eng;
  eng.A = A;
  eng.B = B;
  eng.cap = budget.node_cap;
  Decision d;
  Assignment a, b;
  if (!eng.match(a, b))
    d.winner = Player::Spoiler;
  else
    d.winner = eng.win(a, b, r, 1, 0) ? Player::Spoiler : Player::Duplicator;
  d.nodes = eng.nodes;
  return d;
}

Decision decide_ef_rk(const StructurePtr& A, const StructurePtr& B, int r, int k, Budget budget) {
  if (!(*A->schema() == *B->schema())) throw error("structures must share a schema");
  if (r < 0) throw error("round count out of range");
  if (k < 1 || k > kMaxColors) throw error("color count out of range");
  EfEngine eng;
  eng.A = A;
  eng.B = B;
  eng.cap = budget.node_cap;
  Decision d;
  Assignment a, b;
  if (!eng.match(a, b))
    d.winner = Player::Spoiler;
  else
    d.winner = eng.win(a, b, r, 1, k) ? Player::Spoiler : Player::Duplicator;
  d.nodes = eng.nodes;
  return d;
}

Decision decide_pebble(const StructurePtr& A, const StructurePtr& B, int k, Budget budget) {
  if (!(*A->schema() == *B->schema())) throw error("structures must share a schema");
  if (k < 1 || k > kMaxColors) throw error("color count out of range");

  // Enumerate all matching position pairs with pebbles among colors 1..k.
  std::vector<std::pair<Assignment, Assignment>> positions;
  std::vector<std::pair<Assignment, Assignment>> frontier{{Assignment{}, Assignment{}}};
  for (int c = 1; c <= k; ++c) {
    std::vector<std::pair<Assignment, Assignment>> next;
    for (const auto& [a, b] : frontier) {
      next.emplace_back(a, b);  // color c unplaced
      for (int e = 0; e < A->size(); ++e)
        for (int f = 0; f < B->size(); ++f) {
          Assignment a2 = a, b2 = b;
          a2.set(c, e);
          b2.set(c, f);
          next.emplace_back(a2, b2);
        }
    }
    frontier = std::move(next);
  }
  for (const auto& [a, b] : frontier)
    if (matching_pair_raw(*A, a, *B, b)) positions.push_back({a, b});

  auto key_of = [](const Assignment& a, const Assignment& b) {
    std::string s;
    for (auto v : a.raw()) s += static_cast<char>(v + 2);
    for (auto v : b.raw()) s += static_cast<char>(v + 2);
    return s;
  };
  std::unordered_map<std::string, bool> alive;
  for (const auto& [a, b] : positions) alive[key_of(a, b)] = true;

  Decision d;
  d.nodes = positions.size();
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [a, b] : positions) {
      auto it = alive.find(key_of(a, b));
      if (!it->second) continue;
      d.nodes++;
      if (d.nodes > budget.node_cap) throw budget_error("search budget exceeded (node cap)");
      bool removed = false;
      for (int c = 1; c <= k && !removed; ++c) {
        for (int side = 0; side < 2 && !removed; ++side) {
          const Structure& S = side == 0 ? *A : *B;
          const Structure& O = side == 0 ? *B : *A;
          for (int e = 0; e < S.size() && !removed; ++e) {
            bool escape = false;
            for (int f = 0; f < O.size(); ++f) {
              Assignment a2 = a, b2 = b;
              (side == 0 ? a2 : b2).set(c, e);
              (side == 0 ? b2 : a2).set(c, f);
              auto jt = alive.find(key_of(a2, b2));
              if (jt != alive.end() && jt->second) {
                escape = true;
                break;
              }
            }
            if (!escape) removed = true;
          }
        }
      }
      if (removed) {
        it->second = false;
        changed = true;
      }
    }
  }
  Assignment empty;
  auto it = alive.find(key_of(empty, empty));
  d.winner = (it != alive.end() && it->second) ? Player::Duplicator : Player::Spoiler;
  return d;
}

// ---------------------------------------------------------------------------
// Spoiler simulator obtained from a separating sentence.

FollowTrace follow_sentence(const FormulaPtr& sentence, const std::vector<StructurePtr>& A,
                            const std::vector<StructurePtr>& B, Budget budget) {
  if (A.empty() || B.empty()) throw error("both sides must be nonempty");
  if (!is_sentence(sentence)) throw error("follow_sentence needs a sentence");
  FormulaPtr psi = to_prenex(sentence);
  PrenexForm pf = split_prenex(psi);
  int r = static_cast<int>(pf.prefix.size());

  std::vector<PebbledStructure> left, right;
  for (const auto& s : A) left.emplace_back(s);
  for (const auto& s : B) right.emplace_back(s);

  // Must separate before we play.
  for (const auto& ps : left)
    if (!evaluate(psi, ps))
      throw error("sentence is not separating: it fails on left structure '" +
                  ps.structure->name() + "'");
  for (const auto& ps : right)
    if (evaluate(psi, ps))
      throw error("sentence is not separating: it holds on right structure '" +
                  ps.structure->name() + "'");

  // Suffix sentences Q_t x_t ... theta for each round.
  std::vector<FormulaPtr> suffix(static_cast<std::size_t>(r) + 1);
  suffix[static_cast<std::size_t>(r)] = pf.matrix;
  for (int t = r - 1; t >= 0; --t) {
    const auto& q = pf.prefix[static_cast<std::size_t>(t)];
    suffix[static_cast<std::size_t>(t)] =
        q.first ? mk_forall(q.second, suffix[static_cast<std::size_t>(t) + 1])
                : mk_exists(q.second, suffix[static_cast<std::size_t>(t) + 1]);
  }

  FollowTrace trace;
  std::uint64_t work = 0;
  for (int t = 1; t <= r; ++t) {
    bool universal = pf.prefix[static_cast<std::size_t>(t - 1)].first;
    int color = pf.prefix[static_cast<std::size_t>(t - 1)].second;
    FollowRound round;
    round.universal = universal;
    round.play_left = !universal;
    round.color = color;

    auto& mine = universal ? right : left;
    auto& theirs = universal ? left : right;
    const FormulaPtr& want = suffix[static_cast<std::size_t>(t)];

    for (auto& ps : mine) {
      int chosen = -1;
      for (int e = 0; e < ps.structure->size(); ++e) {
        PebbledStructure q = ps.with(color, e);
        bool v = evaluate(want, q);
        if ((work += static_cast<std::uint64_t>(ps.structure->size())) > budget.node_cap)
          throw budget_error("search budget exceeded (node cap)");
        if (universal ? !v : v) {
          chosen = e;
          break;
        }
      }
      if (chosen < 0) throw error("internal: no witness while following the sentence");
      FollowPlacement pl;
      pl.element = chosen;
      pl.on_top = is_on_top(ps, chosen);
      if (pl.on_top) trace.on_top_moves++;
      round.placements.push_back(pl);
      ps = ps.with(color, chosen);
    }

    // Oblivious response on the other side.
    std::vector<PebbledStructure> expanded;
    for (const auto& ps : theirs)
      for (const auto& q : oblivious_responses(ps, color)) expanded.push_back(q);
    theirs = std::move(expanded);
    trace.rounds.push_back(std::move(round));
  }

  // Final checks: no matching pair; matrix verdicts on both sides.
  bool any_match = false;
  for (const auto& l : left)
    for (const auto& rr : right)
      if (matching_pair(l, rr)) any_match = true;
  trace.spoiler_won = !any_match;
  trace.matrix_verified = true;
  for (const auto& l : left)
    if (!evaluate(pf.matrix, l)) trace.matrix_verified = false;
  for (const auto& rr : right)
    if (evaluate(pf.matrix, rr)) trace.matrix_verified = false;
  trace.final_left = std::move(left);
  trace.final_right = std::move(right);
  return trace;
}

// ---------------------------------------------------------------------------
// Position-level API for the interactive mode.

bool position_has_match(const MsPosition& pos) {
  for (const auto& l : pos.left)
    for (const auto& r : pos.right)
      if (matching_pair(l, r)) return true;
  return false;
}

Player solve_ms_position(const MsPosition& pos, Budget budget) {
  MsEngine eng;
  eng.policy = pos.policy;
  eng.cap = budget.node_cap;
  ISide L, R;
  for (const auto& ps : pos.left) L.push_back({eng.reg.add(ps.structure), ps.assignment});
  for (const auto& ps : pos.right) R.push_back({eng.reg.add(ps.structure), ps.assignment});
  sort_dedup(L);
  sort_dedup(R);
  if (!eng.has_match(L, R)) return Player::Spoiler;
  return eng.win(L, R, pos.rounds_left, pos.next_color) ? Player::Spoiler : Player::Duplicator;
}

std::vector<PebbledStructure> expand_side(const std::vector<PebbledStructure>& side, int color) {
  std::vector<PebbledStructure> out;
  for (const auto& ps : side)
    for (const auto& q : oblivious_responses(ps, color)) out.push_back(q);
  return out;
}

}  // namespace msgw
