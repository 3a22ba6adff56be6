#ifndef MSGW_GAMES_HPP
#define MSGW_GAMES_HPP

#include <cstdint>
#include <vector>

#include "msgw/core.hpp"
#include "msgw/formula.hpp"

namespace msgw {

enum class Player { Spoiler, Duplicator };

inline const char* player_name(Player p) {
  return p == Player::Spoiler ? "Spoiler" : "Duplicator";
}

struct Budget {
  std::uint64_t node_cap = 10'000'000;
};

struct Decision {
  Player winner = Player::Duplicator;
  std::uint64_t nodes = 0;
};

// ---------------------------------------------------------------------------
// Multi-structural games. Spoiler wins decide_ms(A,B,r) exactly when an
// r-quantifier separating sentence exists; Duplicator is simulated with the
// oblivious strategy throughout (optimal for her in every variant here).

Decision decide_ms(const std::vector<StructurePtr>& A, const std::vector<StructurePtr>& B,
                   int r, Budget budget = {});

/// Spoiler may never place a pebble on an already-pebbled element or a
/// constant on the forbidden side(s); Duplicator stays unrestricted.
Decision decide_ms_no_on_top(const std::vector<StructurePtr>& A,
                             const std::vector<StructurePtr>& B, int r, OnTopPolicy policy,
                             Budget budget = {});

/// k pebble colors; placing an in-use color picks the old pebble up from all
/// structures. Matching is checked on current pebbles only.
Decision decide_ms_repebbling(const std::vector<StructurePtr>& A,
                              const std::vector<StructurePtr>& B, int r, int k,
                              Budget budget = {});

/// As repebbling, but Duplicator must exhibit a pair whose whole ancestor
/// chains matched round by round (tracked incrementally as lineage pairs).
Decision decide_ms_hereditary(const std::vector<StructurePtr>& A,
                              const std::vector<StructurePtr>& B, int r, int k,
                              Budget budget = {});

struct Weighted {
  StructurePtr structure;
  int count = 1;
};

/// Multiset game without copying: each round both players choose one
/// placement per copy; Duplicator's choices are searched adversarially.
Decision decide_ms_no_duplication(const std::vector<Weighted>& A,
                                  const std::vector<Weighted>& B, int r, Budget budget = {});

/// Reference engine for micro-checks: Duplicator's responses are searched
/// over all nonempty placement subsets instead of assuming obliviousness.
/// Exponential; guarded to tiny instances.
Decision decide_ms_adversarial_dup(const std::vector<StructurePtr>& A,
                                   const std::vector<StructurePtr>& B, int r,
                                   Budget budget = {});

// ---------------------------------------------------------------------------
// Classical games on a pair of structures.

/// r-round EF game: r distinct pebbles, no reuse.
Decision decide_ef(const StructurePtr& A, const StructurePtr& B, int r, Budget budget = {});

/// EF(r,k): r rounds, k reusable pebble pairs.
Decision decide_ef_rk(const StructurePtr& A, const StructurePtr& B, int r, int k,
                      Budget budget = {});

/// Unbounded-round k-pebble game, decided as a greatest fixpoint over
/// matching position pairs.
Decision decide_pebble(const StructurePtr& A, const StructurePtr& B, int k, Budget budget = {});

// ---------------------------------------------------------------------------
// Spoiler simulator driven by a separating sentence.

struct FollowPlacement {
  int element = 0;
  bool on_top = false;
};

struct FollowRound {
  bool universal = false;  // quantifier of this round
  bool play_left = false;
  int color = 0;
  std::vector<FollowPlacement> placements;  // per structure on the played side
};

struct FollowTrace {
  std::vector<FollowRound> rounds;
  int on_top_moves = 0;
  bool spoiler_won = false;
  bool matrix_verified = false;
  std::vector<PebbledStructure> final_left, final_right;
};

/// Replays Spoiler's strategy obtained from the sentence against the
/// oblivious Duplicator. The sentence must separate (A, B); non-prenex
/// sentences are converted first. Every Spoiler placement is annotated with
/// its on-top flag.
FollowTrace follow_sentence(const FormulaPtr& sentence, const std::vector<StructurePtr>& A,
                            const std::vector<StructurePtr>& B, Budget budget = {});

// ---------------------------------------------------------------------------
// Position-level access used by the interactive mode.

struct MsPosition {
  std::vector<PebbledStructure> left, right;
  int rounds_left = 0;
  int next_color = 1;           // color for the coming round
  OnTopPolicy policy = OnTopPolicy::Unrestricted;
};

bool position_has_match(const MsPosition& pos);
Player solve_ms_position(const MsPosition& pos, Budget budget = {});
std::vector<PebbledStructure> expand_side(const std::vector<PebbledStructure>& side, int color);

}  // namespace msgw

#endif
