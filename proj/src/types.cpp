#include "msgw/types.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>

namespace msgw {

std::vector<FormulaPtr> atom_list(const SchemaPtr& schema, int r) {
  if (r < 0) throw error("atom_list: r must be >= 0");
  std::vector<Term> terms;
  for (int i = 1; i <= r; ++i) terms.push_back(Term::variable(i));
  for (const auto& c : schema->constants()) terms.push_back(Term::constant(c));

  std::vector<FormulaPtr> atoms;
  // Equalities between distinct terms (var-var, const-var, const-const).
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (std::size_t j = i + 1; j < terms.size(); ++j)
      atoms.push_back(mk_eq(terms[i], terms[j]));
  // Relation atoms over all term tuples.
  for (const auto& rd : schema->relations()) {
    if (terms.empty()) continue;
    std::vector<std::size_t> idx(static_cast<std::size_t>(rd.arity), 0);
    while (true) {
      std::vector<Term> args;
      for (auto k : idx) args.push_back(terms[k]);
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

namespace {

// Precomputed view of the atom list: term ids are 0..r-1 for variables,
// r.. for constants; each atom carries its relation index (-1 for "=").
struct AtomTable {
  SchemaPtr schema;
  int r = 0;
  int nterms = 0;
  std::vector<FormulaPtr> atoms;
  std::vector<int> rel;                  // -1 for equality
  std::vector<std::vector<int>> tids;    // term ids per atom
  int less_rel = -1;                     // relation index of binary "<"
};

int term_id(const AtomTable& tb, const Term& t) {
  if (t.is_var) return t.var - 1;
  return tb.r + tb.schema->constant_index(t.cname);
}

const AtomTable& table_for(const SchemaPtr& schema, int r) {
  static std::mutex mu;
  static std::map<std::pair<std::string, int>, std::unique_ptr<AtomTable>> cache;
  std::string key;
  for (const auto& rd : schema->relations()) key += rd.name + "/" + std::to_string(rd.arity) + ";";
  key += "|";
  for (const auto& c : schema->constants()) key += c + ";";

  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({key, r});
  if (it != cache.end()) return *it->second;
  auto tb = std::make_unique<AtomTable>();
  tb->schema = schema;
  tb->r = r;
  tb->nterms = r + static_cast<int>(schema->constants().size());
  tb->atoms = atom_list(schema, r);
  for (const auto& a : tb->atoms) {
    tb->rel.push_back(a->rel == "=" ? -1 : schema->relation_index(a->rel));
    std::vector<int> ids;
    for (const auto& t : a->args) ids.push_back(term_id(*tb, t));
    tb->tids.push_back(std::move(ids));
  }
  if (schema->has_binary_less()) tb->less_rel = schema->relation_index("<");
  auto& slot = cache[{key, r}];
  slot = std::move(tb);
  return *slot;
}

struct UnionFind {
  int p[kMaxColors + 8];
  explicit UnionFind(int n) {
    for (int i = 0; i < n; ++i) p[i] = i;
  }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

bool consistent_impl(const AtomTable& tb, const RType& t, bool order) {
  if (tb.atoms.size() != t.polarity.size()) throw error("type has wrong atom count");
  if (tb.nterms > kMaxColors + 8) throw error("too many terms");
  UnionFind uf(tb.nterms);

  for (std::size_t i = 0; i < tb.atoms.size(); ++i)
    if (tb.rel[i] < 0 && t.polarity[i]) uf.unite(tb.tids[i][0], tb.tids[i][1]);
  for (std::size_t i = 0; i < tb.atoms.size(); ++i)
    if (tb.rel[i] < 0 && !t.polarity[i] && uf.find(tb.tids[i][0]) == uf.find(tb.tids[i][1]))
      return false;

  // Relation polarities must agree across equality-identified tuples.
  std::map<std::pair<int, std::vector<int>>, bool> canon;
  for (std::size_t i = 0; i < tb.atoms.size(); ++i) {
    if (tb.rel[i] < 0) continue;
    std::vector<int> key;
    key.reserve(tb.tids[i].size());
    for (int id : tb.tids[i]) key.push_back(uf.find(id));
    auto [it, inserted] = canon.try_emplace({tb.rel[i], std::move(key)},
                                            static_cast<bool>(t.polarity[i]));
    if (!inserted && it->second != static_cast<bool>(t.polarity[i])) return false;
  }
  if (!order || tb.less_rel < 0) return true;

  // "<" must behave as a strict total order on the classes.
  std::vector<int> reps;
  for (int i = 0; i < tb.nterms; ++i)
    if (uf.find(i) == i) reps.push_back(i);
  auto less = [&](int a, int b) {
    auto it = canon.find({tb.less_rel, {a, b}});
    return it != canon.end() && it->second;
  };
  for (int a : reps) {
    if (less(a, a)) return false;
    for (int b : reps) {
      if (a == b) continue;
      if (less(a, b) == less(b, a)) return false;
      for (int c : reps)
        if (less(a, b) && less(b, c) && !less(a, c)) return false;
    }
  }
  return true;
}

}  // namespace

bool type_consistent(const SchemaPtr& schema, int r, const RType& t) {
  return consistent_impl(table_for(schema, r), t, false);
}

bool type_order_consistent(const SchemaPtr& schema, int r, const RType& t) {
  return consistent_impl(table_for(schema, r), t, true);
}

std::vector<RType> enumerate_types(const SchemaPtr& schema, int r) {
  const AtomTable& tb = table_for(schema, r);
  if (tb.atoms.size() > 24)
    throw error("enumerate_types: too many atoms (" + std::to_string(tb.atoms.size()) + ")");
  std::vector<RType> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << tb.atoms.size()); ++bits) {
    RType t;
    t.r = r;
    t.polarity.resize(tb.atoms.size());
    for (std::size_t i = 0; i < tb.atoms.size(); ++i) t.polarity[i] = (bits >> i) & 1;
    if (consistent_impl(tb, t, false)) out.push_back(std::move(t));
  }
  return out;
}

RType type_of_tuple(const Structure& s, const std::vector<int>& tuple) {
  int r = static_cast<int>(tuple.size());
  for (int e : tuple)
    if (e < 0 || e >= s.size()) throw error("type_of_tuple: element out of range");
  const AtomTable& tb = table_for(s.schema(), r);
  // Term values: variables from the tuple, then the constants.
  std::vector<int> val(static_cast<std::size_t>(tb.nterms));
  for (int i = 0; i < r; ++i) val[static_cast<std::size_t>(i)] = tuple[static_cast<std::size_t>(i)];
  for (std::size_t c = 0; c < s.schema()->constants().size(); ++c)
    val[static_cast<std::size_t>(r) + c] = s.constant_value(static_cast<int>(c));
  RType t;
  t.r = r;
  t.polarity.resize(tb.atoms.size());
  int args[8];
  for (std::size_t i = 0; i < tb.atoms.size(); ++i) {
    if (tb.rel[i] < 0) {
      t.polarity[i] = val[static_cast<std::size_t>(tb.tids[i][0])] ==
                      val[static_cast<std::size_t>(tb.tids[i][1])];
    } else {
      int n = static_cast<int>(tb.tids[i].size());
      for (int j = 0; j < n; ++j) args[j] = val[static_cast<std::size_t>(tb.tids[i][static_cast<std::size_t>(j)])];
      t.polarity[i] = s.holds(tb.rel[i], args, n);
    }
  }
  return t;
}

FormulaPtr type_formula(const SchemaPtr& schema, int r, const RType& t) {
  const auto& atoms = table_for(schema, r).atoms;
  FormulaPtr f;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    FormulaPtr lit = t.polarity[i] ? atoms[i] : mk_not(atoms[i]);
    f = f ? mk_and(f, lit) : lit;
  }
  if (!f) f = mk_eq(Term::variable(1), Term::variable(1));  // no atoms at all
  return f;
}

std::string type_text(const SchemaPtr& schema, int r, const RType& t) {
  const auto& atoms = table_for(schema, r).atoms;
  std::string s;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!s.empty()) s += " & ";
    if (!t.polarity[i]) s += "!";
    s += print_formula(atoms[i]);
  }
  return s;
}

bool type_satisfies(const SchemaPtr& schema, int r, const RType& t, const FormulaPtr& matrix) {
  const auto& atoms = table_for(schema, r).atoms;
  std::function<bool(const FormulaPtr&)> ev = [&](const FormulaPtr& f) -> bool {
    switch (f->kind) {
      case Conn::Atom: {
        if (f->rel == "=" && f->args[0] == f->args[1]) return true;  // trivial x=x
        for (std::size_t i = 0; i < atoms.size(); ++i) {
          if (atoms[i]->rel != f->rel || atoms[i]->args.size() != f->args.size()) continue;
          if (atoms[i]->args == f->args) return t.polarity[i];
          if (f->rel == "=" && atoms[i]->args[0] == f->args[1] && atoms[i]->args[1] == f->args[0])
            return t.polarity[i];
        }
        throw error("matrix atom " + print_formula(f) + " not in the type's atom universe");
      }
      case Conn::Not:
        return !ev(f->child);
      case Conn::And:
        return ev(f->lhs) && ev(f->rhs);
      case Conn::Or:
        return ev(f->lhs) || ev(f->rhs);
      default:
        throw error("matrix is not quantifier-free");
    }
  };
  return ev(matrix);
}

namespace {

PrenexForm checked_prenex(const FormulaPtr& f) {
  if (!is_prenex(f)) throw error("expected a prenex sentence");
  PrenexForm pf = split_prenex(f);
  for (std::size_t i = 0; i < pf.prefix.size(); ++i)
    if (pf.prefix[i].second != static_cast<int>(i) + 1)
      throw error("prenex prefix must bind x1..xr in order (use the prenex converter)");
  if (!is_sentence(f)) throw error("expected a sentence");
  return pf;
}

SchemaPtr schema_of_formula(const FormulaPtr& f) {
  // Infer a schema from the symbols used; defaults to {"<"/2} when none occur.
  std::vector<RelationDecl> rels;
  std::vector<std::string> consts;
  std::function<void(const FormulaPtr&)> walk = [&](const FormulaPtr& g) {
    switch (g->kind) {
      case Conn::Atom: {
        if (g->rel != "=") {
          RelationDecl d{g->rel, static_cast<int>(g->args.size())};
          if (std::find(rels.begin(), rels.end(), d) == rels.end()) rels.push_back(d);
        }
        for (const auto& t : g->args)
          if (!t.is_var && std::find(consts.begin(), consts.end(), t.cname) == consts.end())
            consts.push_back(t.cname);
        break;
      }
      case Conn::Not: walk(g->child); break;
      case Conn::And:
      case Conn::Or: walk(g->lhs); walk(g->rhs); break;
      case Conn::Exists:
      case Conn::Forall: walk(g->child); break;
    }
  };
  walk(f);
  if (rels.empty() && consts.empty()) rels.push_back({"<", 2});
  return std::make_shared<Schema>(std::move(rels), std::move(consts));
}

TypeVerdict verdict_for(const SchemaPtr& schema, const std::vector<bool>& is_forall, int r,
                        const RType& t) {
  TypeVerdict v;
  v.type = t;
  v.non_replicating = true;
  const auto& atoms = table_for(schema, r).atoms;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!t.polarity[i] || atoms[i]->rel != "=") continue;
    const Term& a = atoms[i]->args[0];
    const Term& b = atoms[i]->args[1];
    if (a.is_var && b.is_var) {
      bool fa = is_forall[static_cast<std::size_t>(a.var - 1)];
      bool fb = is_forall[static_cast<std::size_t>(b.var - 1)];
      if (fa && fb) continue;  // both universal
      if (fa != fb) {
        int epos = fa ? b.var : a.var;
        int upos = fa ? a.var : b.var;
        if (epos < upos) continue;  // existential quantified first
      }
      v.non_replicating = false;
      v.offending = print_formula(atoms[i]);
      return v;
    }
    if (a.is_var != b.is_var) {  // constant = variable
      int var = a.is_var ? a.var : b.var;
      if (is_forall[static_cast<std::size_t>(var - 1)]) continue;
      v.non_replicating = false;
      v.offending = print_formula(atoms[i]);
      return v;
    }
  }
  return v;
}

ClassifyResult classify_impl(const FormulaPtr& f, bool order_types, bool negate) {
  PrenexForm pf = checked_prenex(f);
  SchemaPtr schema = schema_of_formula(f);
  int r = static_cast<int>(pf.prefix.size());
  std::vector<bool> is_forall;
  for (const auto& q : pf.prefix) is_forall.push_back(negate ? !q.first : q.first);

  ClassifyResult res;
  for (const auto& t : enumerate_types(schema, r)) {
    if (order_types && !type_order_consistent(schema, r, t)) continue;
    bool sat = type_satisfies(schema, r, t, pf.matrix);
    if (negate) sat = !sat;  // the negation's matrix holds exactly elsewhere
    if (!sat) continue;
    res.types.push_back(verdict_for(schema, is_forall, r, t));
    if (!res.types.back().non_replicating) res.verdict = Replication::Replicating;
  }
  return res;
}

}  // namespace

std::vector<RType> matrix_types(const FormulaPtr& prenex_sentence) {
  PrenexForm pf = checked_prenex(prenex_sentence);
  SchemaPtr schema = schema_of_formula(prenex_sentence);
  int r = static_cast<int>(pf.prefix.size());
  std::vector<RType> out;
  for (const auto& t : enumerate_types(schema, r))
    if (type_satisfies(schema, r, t, pf.matrix)) out.push_back(t);
  return out;
}

ClassifyResult classify_sentence(const FormulaPtr& f, bool order_types) {
  return classify_impl(f, order_types, false);
}

ClassifyResult classify_negation(const FormulaPtr& f, bool order_types) {
  return classify_impl(f, order_types, true);
}

}  // namespace msgw
