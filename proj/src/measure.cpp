#include "msgw/measure.hpp"

namespace msgw {

int apply_measure(const MeasureSpec& m, const FormulaPtr& f) {
  switch (f->kind) {
    case Conn::Atom:
      return m.h_atomic(*f);
    case Conn::Not:
      return m.h_not(apply_measure(m, f->child));
    case Conn::And:
      return m.h_and(apply_measure(m, f->lhs), apply_measure(m, f->rhs));
    case Conn::Or:
      return m.h_or(apply_measure(m, f->lhs), apply_measure(m, f->rhs));
    case Conn::Exists:
      return m.h_exists(apply_measure(m, f->child));
    case Conn::Forall:
      return m.h_forall(apply_measure(m, f->child));
  }
  return 0;
}

static std::vector<int> dec_or_empty(int r) {
  if (r >= 1) return {r - 1};
  return {};
}

static std::vector<int> identity_set(int r) { return {r}; }

const MeasureSpec& measure_qcount() {
  static MeasureSpec m = [] {
    MeasureSpec q;
    q.name = "qcount";
    q.h_not = [](int n) { return n; };
    q.h_exists = q.h_forall = [](int n) { return n + 1; };
    q.h_or = q.h_and = [](int a, int b) { return a + b; };
    q.h_atomic = [](const Formula&) { return 0; };
    q.inv_not = identity_set;
    q.inv_exists = q.inv_forall = dec_or_empty;
    q.inv_or = q.inv_and = [](int r) {
      std::vector<std::pair<int, int>> out;
      for (int i = 0; i <= r; ++i) out.emplace_back(i, r - i);
      return out;
    };
    q.pebble_decreases = true;
    q.qf_complete_at_zero = true;
    q.budget_monotone = true;
    return q;
  }();
  return m;
}

const MeasureSpec& measure_qrank() {
  static MeasureSpec m = [] {
    MeasureSpec q;
    q.name = "qrank";
    q.h_not = [](int n) { return n; };
    q.h_exists = q.h_forall = [](int n) { return n + 1; };
    q.h_or = q.h_and = [](int a, int b) { return a > b ? a : b; };
    q.h_atomic = [](const Formula&) { return 0; };
    q.inv_not = identity_set;
    q.inv_exists = q.inv_forall = dec_or_empty;
    q.inv_or = q.inv_and = [](int r) {
      std::vector<std::pair<int, int>> out;
      for (int i = 0; i < r; ++i) out.emplace_back(i, r);
      for (int j = 0; j < r; ++j) out.emplace_back(r, j);
      out.emplace_back(r, r);
      return out;
    };
    q.pebble_decreases = true;
    q.qf_complete_at_zero = true;
    q.budget_monotone = true;
    return q;
  }();
  return m;
}

const MeasureSpec& measure_fsize() {
  static MeasureSpec m = [] {
    MeasureSpec q;
    q.name = "fsize";
    q.h_not = q.h_exists = q.h_forall = [](int n) { return n + 1; };
    q.h_or = q.h_and = [](int a, int b) { return a + b + 1; };
    q.h_atomic = [](const Formula&) { return 1; };
    q.inv_not = q.inv_exists = q.inv_forall = dec_or_empty;
    // Subformulas always have size >= 1, so zero parts are never useful.
    q.inv_or = q.inv_and = [](int r) {
      std::vector<std::pair<int, int>> out;
      for (int i = 1; i <= r - 2; ++i) out.emplace_back(i, r - 1 - i);
      return out;
    };
    q.pebble_decreases = true;
    q.qf_complete_at_zero = false;
    q.budget_monotone = true;
    return q;
  }();
  return m;
}

const MeasureSpec& measure_by_name(const std::string& name) {
  if (name == "qcount") return measure_qcount();
  if (name == "qrank") return measure_qrank();
  if (name == "fsize") return measure_fsize();
  throw error("unknown measure '" + name + "' (expected qcount, qrank or fsize)");
}

}  // namespace msgw
