#ifndef MSGW_SYNTH_HPP
#define MSGW_SYNTH_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "msgw/games.hpp"
#include "msgw/measure.hpp"

namespace msgw {

/// Close requires the atomic formula's cost to equal the counter exactly, or
/// merely not to exceed it. Exact is the literal measure-game contract;
/// at-most reads the counter as a budget and is the default everywhere.
enum class SgMode { Exact, AtMost };

/// One node of a closed game tree. The move names mirror the game:
/// pebble-left/right, split-left/right, swap, close; closed leaves carry the
/// atomic formula that witnessed the close.
struct SgNode;
using SgNodePtr = std::shared_ptr<const SgNode>;

struct SgNode {
  std::vector<PebbledStructure> left, right;
  int counter = 0;
  std::string move;                 // "close", "pebble-left", ...
  int color = 0;                    // pebble moves
  FormulaPtr close_atom;            // close leaves
  std::vector<SgNodePtr> children;  // parse-tree order
};

/// A closed game tree with the separating formula it is isomorphic to.
struct Certificate {
  SgNodePtr root;
  FormulaPtr formula;
  int measure_value = 0;
  int k = 0;
};

struct SgDecision {
  Player winner = Player::Duplicator;
  std::uint64_t nodes = 0;
  std::optional<Certificate> certificate;
};

/// Reads the separating formula off a closed game tree: pebble-left is an
/// existential, pebble-right a universal, split-left a disjunction,
/// split-right a conjunction, swap a negation, close its atomic formula.
FormulaPtr extract_formula(const Certificate& cert);

/// Decides the syntactic game on the measure: Spoiler wins exactly when a
/// separating formula with the requested cost and variables among x1..xk
/// exists. Inputs must be domain-consistent with pebbles among x1..xk.
SgDecision decide_sg(const std::vector<PebbledStructure>& A,
                     const std::vector<PebbledStructure>& B, int r, int k, const MeasureSpec& m,
                     SgMode mode = SgMode::AtMost, bool want_certificate = true,
                     Budget budget = {});

/// The quantifier-variable tree game: the syntactic game on quantifier count.
SgDecision decide_qvt(const std::vector<StructurePtr>& A, const std::vector<StructurePtr>& B,
                      int r, int k, SgMode mode = SgMode::AtMost, Budget budget = {});

struct MinMeasureResult {
  int value = 0;
  Certificate certificate;
  std::uint64_t nodes = 0;  // summed over all measure values tried
};

/// Smallest r <= r_max with a Spoiler win in at-most semantics, or nullopt.
std::optional<MinMeasureResult> min_measure(const std::vector<StructurePtr>& A,
                                            const std::vector<StructurePtr>& B, int k,
                                            const MeasureSpec& m, int r_max, Budget budget = {});

/// Plain exhaustive recursion over the same game: no memoization, no
/// canonical collapse, no search shortcuts. Tiny inputs only; the reference
/// the solver is checked against.
Player naive_oracle_sg(const std::vector<PebbledStructure>& A,
                       const std::vector<PebbledStructure>& B, int r, int k,
                       const MeasureSpec& m, SgMode mode = SgMode::AtMost, Budget budget = {});

}  // namespace msgw

#endif
