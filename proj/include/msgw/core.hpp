#ifndef MSGW_CORE_HPP
#define MSGW_CORE_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace msgw {

// Thrown on any precondition or input violation.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a solver exceeds its node cap. Distinct from `error` so
// callers can tell "wrong input" from "gave up".
class budget_error : public error {
 public:
  explicit budget_error(const std::string& what) : error(what) {}
};

// ---------------------------------------------------------------------------
// Schema

struct RelationDecl {
  std::string name;
  int arity = 0;  // >= 1
};

/// A relational schema: finitely many relation symbols and constant symbols.
/// Equality is built into the logic, never listed as a relation.
class Schema {
 public:
  Schema(std::vector<RelationDecl> relations, std::vector<std::string> constants);

  const std::vector<RelationDecl>& relations() const { return relations_; }
  const std::vector<std::string>& constants() const { return constants_; }

  int relation_index(const std::string& name) const;  // -1 if absent
  int constant_index(const std::string& name) const;  // -1 if absent
  bool has_binary_less() const { return binary_less_; }

  bool operator==(const Schema& o) const {
    return relations_ == o.relations_ && constants_ == o.constants_;
  }

 private:
  std::vector<RelationDecl> relations_;
  std::vector<std::string> constants_;
  bool binary_less_ = false;
};

inline bool operator==(const RelationDecl& a, const RelationDecl& b) {
  return a.name == b.name && a.arity == b.arity;
}

using SchemaPtr = std::shared_ptr<const Schema>;

/// Schema with a single binary relation "<" and no constants.
SchemaPtr order_schema();

// ---------------------------------------------------------------------------
// Structure

/// A finite relational structure. The universe is the index range 0..n-1;
/// external element labels live only in ingestion files.
class Structure {
 public:
  Structure(SchemaPtr schema, int size, std::string name = "");

  void add_tuple(const std::string& relation, const std::vector<int>& tuple);
  void set_constant(const std::string& constant, int element);
  void finalize();  // sorts/dedups tuple tables, checks constants are set

  const SchemaPtr& schema() const { return schema_; }
  int size() const { return size_; }
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  bool holds(int relation, const int* tuple, int arity) const;
  bool holds(int relation, const std::vector<int>& tuple) const;
  const std::vector<std::vector<int>>& tuples(int relation) const {
    return tuples_[relation];
  }
  int constant_value(int constant) const { return constant_values_[constant]; }
  const std::vector<int>& constant_values() const { return constant_values_; }

  std::uint64_t tuple_count(int relation) const { return tuples_[relation].size(); }

  /// Stable content serialization (for digests and structure-file output).
  std::string canonical_text() const;

 private:
  SchemaPtr schema_;
  int size_ = 0;
  std::string name_;
  std::vector<std::vector<std::vector<int>>> tuples_;   // per relation, sorted
  std::vector<std::vector<std::uint64_t>> pair_bits_;   // arity<=2 fast path
  std::vector<int> constant_values_;
  bool finalized_ = false;
};

using StructurePtr = std::shared_ptr<const Structure>;

/// Linear order LO(n): universe 0..n-1 with i<j iff i<j.
StructurePtr gen_linear_order(int n);

/// Rooted tree from parent links (parent[i] < 0 marks the root). The single
/// binary relation < holds (i,j) iff j is a proper ancestor of i, matching
/// the descendant reading of tree drawings.
StructurePtr gen_rooted_tree(const std::vector<int>& parent);

/// The standard instances used throughout: RT(3) and RT(4), the rooted trees
/// whose longest branch has 3 resp. 4 nodes.
StructurePtr gen_rt3();
StructurePtr gen_rt4();

// ---------------------------------------------------------------------------
// Pebbled structures

constexpr int kMaxColors = 12;

/// Partial map from pebble colors 1..k to universe elements. At most one
/// pebble per color; several colors may share an element.
class Assignment {
 public:
  Assignment() { slots_.fill(-1); }

  int get(int color) const { return slots_[color - 1]; }
  bool has(int color) const { return slots_[color - 1] >= 0; }
  void set(int color, int element) { slots_[color - 1] = static_cast<std::int8_t>(element); }
  void erase(int color) { slots_[color - 1] = -1; }

  std::vector<int> colors() const;
  int count() const;
  bool operator==(const Assignment& o) const { return slots_ == o.slots_; }
  bool operator<(const Assignment& o) const { return slots_ < o.slots_; }
  const std::array<std::int8_t, kMaxColors>& raw() const { return slots_; }

 private:
  std::array<std::int8_t, kMaxColors> slots_;
};

/// A structure plus a pebble assignment (the structure-assignment pair).
struct PebbledStructure {
  StructurePtr structure;
  Assignment assignment;

  PebbledStructure() = default;
  PebbledStructure(StructurePtr s, Assignment a = {})
      : structure(std::move(s)), assignment(a) {}

  PebbledStructure with(int color, int element) const {
    PebbledStructure p = *this;
    p.assignment.set(color, element);
    return p;
  }
};

/// True iff the element currently carries a pebble or is a constant.
bool is_on_top(const PebbledStructure& p, int element);

/// Definition of a matching pair: the map pebble-i to pebble-i, c^A to c^B
/// must be a partial isomorphism of the induced substructures.
bool matching_pair(const PebbledStructure& p, const PebbledStructure& q);

/// Same check without ownership overhead; callers guarantee both structures
/// share the schema and the assignments carry the same color set.
bool matching_pair_raw(const Structure& A, const Assignment& a, const Structure& B,
                       const Assignment& b);

/// One pebbled structure per universe element, with `color` (re)assigned to
/// each element in turn. This is Duplicator's full response on one structure.
std::vector<PebbledStructure> oblivious_responses(const PebbledStructure& p, int color);

// ---------------------------------------------------------------------------
// Configurations

enum class OnTopPolicy { Unrestricted, ForbidLeft, ForbidRight, ForbidBoth };

struct VariantOptions {
  OnTopPolicy on_top = OnTopPolicy::Unrestricted;
  int color_limit = 0;  // 0 = unlimited (fresh color each round)
  bool hereditary = false;
  bool duplication_allowed = true;
};

/// A game position: two multisets of pebbled structures plus a counter.
struct Configuration {
  std::vector<PebbledStructure> left;
  std::vector<PebbledStructure> right;
  int counter = 0;
  VariantOptions options;
};

/// Opaque canonical key: equal iff configurations are equal up to reordering
/// within each side and collapsing literal duplicates to multiplicities.
/// Structure identity is pointer identity, per the literal-duplicate rule.
std::string canonical_key(const Configuration& c);

}  // namespace msgw

#endif
