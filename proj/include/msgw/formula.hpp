#ifndef MSGW_FORMULA_HPP
#define MSGW_FORMULA_HPP

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "msgw/core.hpp"

namespace msgw {

// First-order AST. Equality is an atom with relation name "=".
enum class Conn { Atom, Not, And, Or, Exists, Forall };

struct Term {
  bool is_var = true;
  int var = 0;        // x_var, var >= 1
  std::string cname;  // constant name when !is_var

  static Term variable(int i) { return Term{true, i, {}}; }
  static Term constant(std::string name) { return Term{false, 0, std::move(name)}; }
  bool operator==(const Term& o) const {
    return is_var == o.is_var && (is_var ? var == o.var : cname == o.cname);
  }
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  Conn kind;
  std::string rel;          // Atom: relation name or "="
  std::vector<Term> args;   // Atom
  FormulaPtr child;         // Not / Exists / Forall
  int var = 0;              // Exists / Forall
  FormulaPtr lhs, rhs;      // And / Or
};

FormulaPtr mk_atom(std::string rel, std::vector<Term> args);
FormulaPtr mk_eq(Term a, Term b);
FormulaPtr mk_not(FormulaPtr f);
FormulaPtr mk_and(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_exists(int var, FormulaPtr f);
FormulaPtr mk_forall(int var, FormulaPtr f);

bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b);
std::set<int> free_vars(const FormulaPtr& f);
bool is_sentence(const FormulaPtr& f);

/// Grammar (see README):
///   formula := quant | bin | "!" formula | atom | "(" formula ")"
///   quant   := ("EX" | "ALL") var "." formula
///   bin     := "(" formula ("&" | "|") formula ")"
///   atom    := name "(" term ("," term)* ")" | term "=" term | term "<" term
///   term    := var | name ;  var := "x" digits
/// "!" binds tightest; "&"/"|" require explicit parentheses; a quantifier's
/// scope extends to the end of its formula. The infix "<" form is accepted
/// only when the schema has a binary relation named "<".
FormulaPtr parse_formula(const std::string& text, const SchemaPtr& schema);
std::string print_formula(const FormulaPtr& f);

/// Validates relation/constant names and arities against the schema.
void check_against_schema(const FormulaPtr& f, const SchemaPtr& schema);

/// Tarskian truth of f over p's structure, variables read from p's pebbles.
/// Free(f) must be assigned in p; unbound variables are reported by index.
bool evaluate(const FormulaPtr& f, const PebbledStructure& p);

/// True iff every member of A satisfies f and every member of B falsifies it.
/// A and B must be domain-consistent and cover Free(f).
bool is_separating(const FormulaPtr& f, const std::vector<PebbledStructure>& A,
                   const std::vector<PebbledStructure>& B);

// Prenex machinery. Quantifier prefix entries: (is_forall, variable index).
struct PrenexForm {
  std::vector<std::pair<bool, int>> prefix;
  FormulaPtr matrix;
};

bool is_prenex(const FormulaPtr& f);

/// Splits a prenex formula into prefix and quantifier-free matrix.
PrenexForm split_prenex(const FormulaPtr& f);

/// Standard prenex conversion; every quantifier gets a fresh variable index,
/// then prefix variables are re-indexed to x1..xr in prefix order. Preserves
/// evaluation and quantifier count (rank may change).
FormulaPtr to_prenex(const FormulaPtr& f);

FormulaPtr assemble_prenex(const PrenexForm& pf);

}  // namespace msgw

#endif
