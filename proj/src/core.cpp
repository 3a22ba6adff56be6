#include "msgw/core.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

namespace msgw {

// ---------------------------------------------------------------------------
// Schema

static bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '<')) return false;
  }
  return true;
}

Schema::Schema(std::vector<RelationDecl> relations, std::vector<std::string> constants)
    : relations_(std::move(relations)), constants_(std::move(constants)) {
  for (const auto& r : relations_) {
    if (r.arity < 1) throw error("relation " + r.name + ": arity must be >= 1");
    if (!valid_name(r.name)) throw error("bad relation name '" + r.name + "'");
    if (r.name == "=") throw error("equality is built in, not a schema relation");
  }
  for (const auto& c : constants_) {
    if (!valid_name(c)) throw error("bad constant name '" + c + "'");
  }
  for (std::size_t i = 0; i < relations_.size(); ++i)
    for (std::size_t j = i + 1; j < relations_.size(); ++j)
      if (relations_[i].name == relations_[j].name)
        throw error("duplicate relation name " + relations_[i].name);
  for (std::size_t i = 0; i < constants_.size(); ++i)
    for (std::size_t j = i + 1; j < constants_.size(); ++j)
      if (constants_[i] == constants_[j]) throw error("duplicate constant name " + constants_[i]);
  for (const auto& r : relations_)
    for (const auto& c : constants_)
      if (r.name == c) throw error("name " + c + " used as both relation and constant");
  binary_less_ = relation_index("<") >= 0 && relations_[relation_index("<")].arity == 2;
}

int Schema::relation_index(const std::string& name) const {
  for (std::size_t i = 0; i < relations_.size(); ++i)
    if (relations_[i].name == name) return static_cast<int>(i);
  return -1;
}

int Schema::constant_index(const std::string& name) const {
  for (std::size_t i = 0; i < constants_.size(); ++i)
    if (constants_[i] == name) return static_cast<int>(i);
  return -1;
}

SchemaPtr order_schema() {
  static SchemaPtr s = std::make_shared<Schema>(
      std::vector<RelationDecl>{{"<", 2}}, std::vector<std::string>{});
  return s;
}

// ---------------------------------------------------------------------------
// Structure

Structure::Structure(SchemaPtr schema, int size, std::string name)
    : schema_(std::move(schema)), size_(size), name_(std::move(name)) {
  if (size_ < 1) throw error("structure size must be >= 1");
  tuples_.resize(schema_->relations().size());
  pair_bits_.resize(schema_->relations().size());
  constant_values_.assign(schema_->constants().size(), -1);
}

void Structure::add_tuple(const std::string& relation, const std::vector<int>& tuple) {
  int ri = schema_->relation_index(relation);
  if (ri < 0) throw error("unknown relation " + relation);
  int arity = schema_->relations()[ri].arity;
  if (static_cast<int>(tuple.size()) != arity)
    throw error("relation " + relation + " expects arity " + std::to_string(arity));
  for (int e : tuple)
    if (e < 0 || e >= size_)
      throw error("element " + std::to_string(e) + " out of range in " + relation);
  tuples_[ri].push_back(tuple);
}

void Structure::set_constant(const std::string& constant, int element) {
  int ci = schema_->constant_index(constant);
  if (ci < 0) throw error("unknown constant " + constant);
  if (element < 0 || element >= size_) throw error("constant element out of range");
  constant_values_[ci] = element;
}

void Structure::finalize() {
  for (std::size_t ri = 0; ri < tuples_.size(); ++ri) {
    auto& t = tuples_[ri];
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    int arity = schema_->relations()[ri].arity;
    if (arity <= 2 && size_ <= 64) {
      pair_bits_[ri].assign(static_cast<std::size_t>(size_), 0);
      for (const auto& tup : t) {
        int a = tup[0];
        int b = arity == 2 ? tup[1] : 0;
        pair_bits_[ri][static_cast<std::size_t>(a)] |= (std::uint64_t{1} << b);
      }
    }
  }
  for (std::size_t ci = 0; ci < constant_values_.size(); ++ci)
    if (constant_values_[ci] < 0)
      throw error("constant " + schema_->constants()[ci] + " not interpreted");
  finalized_ = true;
}

bool Structure::holds(int relation, const int* tuple, int arity) const {
  const auto& bits = pair_bits_[relation];
  if (!bits.empty()) {
    int b = arity == 2 ? tuple[1] : 0;
    return (bits[static_cast<std::size_t>(tuple[0])] >> b) & 1;
  }
  std::vector<int> key(tuple, tuple + arity);
  const auto& t = tuples_[relation];
  return std::binary_search(t.begin(), t.end(), key);
}

bool Structure::holds(int relation, const std::vector<int>& tuple) const {
  return holds(relation, tuple.data(), static_cast<int>(tuple.size()));
}

std::string Structure::canonical_text() const {
  std::ostringstream os;
  os << "size:" << size_ << "\n";
  for (std::size_t ri = 0; ri < tuples_.size(); ++ri) {
    os << schema_->relations()[ri].name << "/" << schema_->relations()[ri].arity << ":";
    for (const auto& t : tuples_[ri]) {
      os << " (";
      for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
      os << ")";
    }
    os << "\n";
  }
  for (std::size_t ci = 0; ci < constant_values_.size(); ++ci)
    os << schema_->constants()[ci] << "=" << constant_values_[ci] << "\n";
  return os.str();
}

StructurePtr gen_linear_order(int n) {
  if (n < 1) throw error("gen_linear_order: n must be >= 1");
  auto s = std::make_shared<Structure>(order_schema(), n, "LO(" + std::to_string(n) + ")");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) s->add_tuple("<", {i, j});
  s->finalize();
  return s;
}

StructurePtr gen_rooted_tree(const std::vector<int>& parent) {
  int n = static_cast<int>(parent.size());
  if (n < 1) throw error("gen_rooted_tree: empty node list");
  int root = -1;
  for (int i = 0; i < n; ++i) {
    if (parent[i] < 0) {
      if (root >= 0) throw error("gen_rooted_tree: multiple roots");
      root = i;
    } else if (parent[i] >= n) {
      throw error("gen_rooted_tree: parent index out of range");
    }
  }
  if (root < 0) throw error("gen_rooted_tree: no root");
  auto s = std::make_shared<Structure>(order_schema(), n, "RT");
  // x < y means x is a proper descendant of y; walk ancestor chains.
  for (int i = 0; i < n; ++i) {
    int steps = 0;
    for (int a = parent[i]; a >= 0; a = parent[a]) {
      s->add_tuple("<", {i, a});
      if (++steps > n) throw error("gen_rooted_tree: parent links contain a cycle");
    }
  }
  s->finalize();
  return s;
}

StructurePtr gen_rt3() {
  // Root with two children, each with one child (longest branch: 3 nodes).
  static StructurePtr s = [] {
    auto t = gen_rooted_tree({-1, 0, 0, 1, 2});
    auto m = std::make_shared<Structure>(*t);
    m->set_name("RT(3)");
    return StructurePtr(m);
  }();
  return s;
}

StructurePtr gen_rt4() {
  // Longest branch 4 nodes: root, two children, one grandchild chain of two
  // under the first child, one grandchild under the second.
  static StructurePtr s = [] {
    auto t = gen_rooted_tree({-1, 0, 0, 1, 2, 3});
    auto m = std::make_shared<Structure>(*t);
    m->set_name("RT(4)");
    return StructurePtr(m);
  }();
  return s;
}

// ---------------------------------------------------------------------------
// Pebbled structures

std::vector<int> Assignment::colors() const {
  std::vector<int> out;
  for (int c = 1; c <= kMaxColors; ++c)
    if (has(c)) out.push_back(c);
  return out;
}

int Assignment::count() const {
  int n = 0;
  for (int c = 1; c <= kMaxColors; ++c) n += has(c);
  return n;
}

bool is_on_top(const PebbledStructure& p, int element) {
  if (element < 0 || element >= p.structure->size()) throw error("is_on_top: element out of range");
  for (int c = 1; c <= kMaxColors; ++c)
    if (p.assignment.get(c) == element) return true;
  for (int v : p.structure->constant_values())
    if (v == element) return true;
  return false;
}

bool matching_pair(const PebbledStructure& p, const PebbledStructure& q) {
  const Structure& A = *p.structure;
  const Structure& B = *q.structure;
  if (!(*A.schema() == *B.schema())) throw error("matching_pair: schemas differ");
  for (int c = 1; c <= kMaxColors; ++c)
    if (p.assignment.has(c) != q.assignment.has(c))
      throw error("matching_pair: pebble color sets differ");
  return matching_pair_raw(A, p.assignment, B, q.assignment);
}

bool matching_pair_raw(const Structure& A, const Assignment& a, const Structure& B,
                       const Assignment& b) {
  // Collect the map pairs: pebbles then constants.
  int dom[kMaxColors + 8];
  int img[kMaxColors + 8];
  int m = 0;
  for (int c = 1; c <= kMaxColors; ++c) {
    if (a.has(c)) {
      dom[m] = a.get(c);
      img[m] = b.get(c);
      ++m;
    }
  }
  const auto& ca = A.constant_values();
  const auto& cb = B.constant_values();
  for (std::size_t i = 0; i < ca.size(); ++i) {
    dom[m] = ca[i];
    img[m] = cb[i];
    ++m;
  }

  if (m == 0) return true;  // no pebbles, no constants: the empty map

  // Well defined and injective.
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      if (dom[i] == dom[j] && img[i] != img[j]) return false;
      if (dom[i] != dom[j] && img[i] == img[j]) return false;
    }

  // Preserve and reflect every relation on the induced substructures.
  const auto& rels = A.schema()->relations();
  int t[8], u[8];
  for (std::size_t ri = 0; ri < rels.size(); ++ri) {
    int arity = rels[ri].arity;
    if (arity > 8) throw error("matching_pair: arity > 8 unsupported");
    int idx[8] = {0};
    while (true) {
      for (int i = 0; i < arity; ++i) {
        t[i] = dom[idx[i]];
        u[i] = img[idx[i]];
      }
      if (A.holds(static_cast<int>(ri), t, arity) != B.holds(static_cast<int>(ri), u, arity))
        return false;
      int i = arity - 1;
      while (i >= 0 && ++idx[i] == m) {
        idx[i] = 0;
        --i;
      }
      if (i < 0) break;
    }
  }
  return true;
}

std::vector<PebbledStructure> oblivious_responses(const PebbledStructure& p, int color) {
  std::vector<PebbledStructure> out;
  out.reserve(static_cast<std::size_t>(p.structure->size()));
  for (int e = 0; e < p.structure->size(); ++e) out.push_back(p.with(color, e));
  return out;
}

// ---------------------------------------------------------------------------
// Canonical keys

static void append_side(std::string& key, const std::vector<PebbledStructure>& side) {
  std::vector<std::string> items;
  items.reserve(side.size());
  for (const auto& ps : side) {
    std::string s;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%p|", static_cast<const void*>(ps.structure.get()));
    s += buf;
    for (auto v : ps.assignment.raw()) s += static_cast<char>(v + 2);
    items.push_back(std::move(s));
  }
  std::sort(items.begin(), items.end());
  // Collapse literal duplicates to multiplicities.
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i;
    while (j < items.size() && items[j] == items[i]) ++j;
    key += items[i];
    key += '*';
    key += std::to_string(j - i);
    key += ';';
    i = j;
  }
}

std::string canonical_key(const Configuration& c) {
  std::string key;
  key.reserve(64 + 24 * (c.left.size() + c.right.size()));
  key += 'r';
  key += std::to_string(c.counter);
  key += 'o';
  key += std::to_string(static_cast<int>(c.options.on_top));
  key += 'k';
  key += std::to_string(c.options.color_limit);
  key += c.options.hereditary ? 'H' : 'h';
  key += c.options.duplication_allowed ? 'D' : 'd';
  key += "|L:";
  append_side(key, c.left);
  key += "|R:";
  append_side(key, c.right);
  return key;
}

}  // namespace msgw
