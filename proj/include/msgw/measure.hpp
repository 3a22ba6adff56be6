#ifndef MSGW_MEASURE_HPP
#define MSGW_MEASURE_HPP

#include <functional>
#include <string>
#include <vector>

#include "msgw/formula.hpp"

namespace msgw {

/// A compositional syntactic measure: helper functions over the AST
/// constructors, plus bounded preimage enumerators used by the syntactic
/// game to drive counters backwards.
struct MeasureSpec {
  std::string name;

  std::function<int(int)> h_not, h_exists, h_forall;
  std::function<int(int, int)> h_or, h_and;
  std::function<int(const Formula&)> h_atomic;

  // Finite preimage sets; complete for arguments up to preimage_bound.
  std::function<std::vector<int>(int)> inv_not, inv_exists, inv_forall;
  std::function<std::vector<std::pair<int, int>>(int)> inv_or, inv_and;
  int preimage_bound = 1 << 20;

  // Move-progress facts the solver exploits.
  bool pebble_decreases = false;   // h_exists/h_forall strictly increase
  bool qf_complete_at_zero = false;  // at counter 0 the residual game is
                                     // exactly quantifier-free separability
  bool budget_monotone = false;    // larger budgets never lose winnable games
                                   // under at-most semantics
};

/// Structural fold of the measure's helpers over the formula.
int apply_measure(const MeasureSpec& m, const FormulaPtr& f);

const MeasureSpec& measure_qcount();  // f_q: number of quantifiers
const MeasureSpec& measure_qrank();   // f_r: quantifier rank
const MeasureSpec& measure_fsize();   // f_s: formula size

/// Lookup by CLI name: qcount | qrank | fsize.
const MeasureSpec& measure_by_name(const std::string& name);

}  // namespace msgw

#endif
