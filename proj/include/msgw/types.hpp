#ifndef MSGW_TYPES_HPP
#define MSGW_TYPES_HPP

#include <string>
#include <vector>

#include "msgw/formula.hpp"

namespace msgw {

/// The atomic formulas over variables x1..xr and the schema's constants:
/// equalities between two distinct variables, constant=variable,
/// equalities between two distinct constants, and every relation atom over
/// not-necessarily-distinct variables/constants. Trivial equalities (x=x,
/// c=c) are excluded. The list order is canonical.
std::vector<FormulaPtr> atom_list(const SchemaPtr& schema, int r);

/// A type over x1..xr: one polarity bit per atom in atom_list order.
struct RType {
  int r = 0;
  std::vector<bool> polarity;

  bool operator==(const RType& o) const { return r == o.r && polarity == o.polarity; }
  bool operator<(const RType& o) const { return polarity < o.polarity; }
};

/// Consistency: positive equalities form classes (union-find, constants
/// included); no negative equality may join a class, and relation polarities
/// must agree across equality-identified tuples. This is realizability in
/// the free structure over the classes.
bool type_consistent(const SchemaPtr& schema, int r, const RType& t);

/// Additionally requires every binary relation named "<" to behave as a
/// strict total order on the classes (irreflexive, transitive, and total
/// across distinct classes). Used by the replication classifier.
bool type_order_consistent(const SchemaPtr& schema, int r, const RType& t);

/// All consistent r-types, in canonical order.
std::vector<RType> enumerate_types(const SchemaPtr& schema, int r);

/// The type realized by a tuple of elements (polarity of each atom read off
/// by direct evaluation).
RType type_of_tuple(const Structure& s, const std::vector<int>& tuple);

/// The type as a conjunction formula.
FormulaPtr type_formula(const SchemaPtr& schema, int r, const RType& t);
std::string type_text(const SchemaPtr& schema, int r, const RType& t);

/// Truth of a quantifier-free formula under a type's polarities.
bool type_satisfies(const SchemaPtr& schema, int r, const RType& t, const FormulaPtr& matrix);

/// The consistent types (over the prefix's variables and constants) whose
/// polarity valuation makes the prenex formula's matrix true.
std::vector<RType> matrix_types(const FormulaPtr& prenex_sentence);

enum class Replication { NonReplicating, Replicating };

struct TypeVerdict {
  RType type;
  bool non_replicating = false;
  std::string offending;  // the equality that violates the conditions, if any
};

struct ClassifyResult {
  Replication verdict = Replication::NonReplicating;
  std::vector<TypeVerdict> types;
};

/// Replication classification per the equality conditions on disjunct types:
/// a type is non-replicating iff every variable equality has both variables
/// universal or the existential one quantified first, and every
/// constant=variable equality has the variable universal.
///
/// `order_types` restricts the matrix's disjunct types to those consistent
/// with "<" being a strict total order; this matches the worked sentence
/// classifications (see README). Pass false for the raw type space.
ClassifyResult classify_sentence(const FormulaPtr& prenex_sentence, bool order_types = true);

/// Classifies the negation without rebuilding it: the matrix types of the
/// negation are exactly the complement set, under the dual prefix.
ClassifyResult classify_negation(const FormulaPtr& prenex_sentence, bool order_types = true);

}  // namespace msgw

#endif
