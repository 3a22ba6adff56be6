#include "msgw/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>

namespace msgw {

FormulaPtr mk_atom(std::string rel, std::vector<Term> args) {
  auto f = std::make_shared<Formula>();
  f->kind = Conn::Atom;
  f->rel = std::move(rel);
  f->args = std::move(args);
  return f;
}

FormulaPtr mk_eq(Term a, Term b) { return mk_atom("=", {a, b}); }

FormulaPtr mk_not(FormulaPtr f) {
  auto g = std::make_shared<Formula>();
  g->kind = Conn::Not;
  g->child = std::move(f);
  return g;
}

static FormulaPtr mk_bin(Conn kind, FormulaPtr a, FormulaPtr b) {
  auto g = std::make_shared<Formula>();
  g->kind = kind;
  g->lhs = std::move(a);
  g->rhs = std::move(b);
  return g;
}

FormulaPtr mk_and(FormulaPtr a, FormulaPtr b) { return mk_bin(Conn::And, std::move(a), std::move(b)); }
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b) { return mk_bin(Conn::Or, std::move(a), std::move(b)); }

static FormulaPtr mk_quant(Conn kind, int var, FormulaPtr f) {
  if (var < 1 || var > kMaxColors)
    throw error("variable index out of supported range: x" + std::to_string(var));
  auto g = std::make_shared<Formula>();
  g->kind = kind;
  g->var = var;
  g->child = std::move(f);
  return g;
}

FormulaPtr mk_exists(int var, FormulaPtr f) { return mk_quant(Conn::Exists, var, std::move(f)); }
FormulaPtr mk_forall(int var, FormulaPtr f) { return mk_quant(Conn::Forall, var, std::move(f)); }

bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Conn::Atom:
      return a->rel == b->rel && a->args == b->args;
    case Conn::Not:
      return structurally_equal(a->child, b->child);
    case Conn::And:
    case Conn::Or:
      return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
    case Conn::Exists:
    case Conn::Forall:
      return a->var == b->var && structurally_equal(a->child, b->child);
  }
  return false;
}

static void free_vars_rec(const FormulaPtr& f, std::set<int>& bound, std::set<int>& out) {
  switch (f->kind) {
    case Conn::Atom:
      for (const auto& t : f->args)
        if (t.is_var && !bound.count(t.var)) out.insert(t.var);
      break;
    case Conn::Not:
      free_vars_rec(f->child, bound, out);
      break;
    case Conn::And:
    case Conn::Or:
      free_vars_rec(f->lhs, bound, out);
      free_vars_rec(f->rhs, bound, out);
      break;
    case Conn::Exists:
    case Conn::Forall: {
      bool was = bound.count(f->var) > 0;
      bound.insert(f->var);
      free_vars_rec(f->child, bound, out);
      if (!was) bound.erase(f->var);
      break;
    }
  }
}

std::set<int> free_vars(const FormulaPtr& f) {
  std::set<int> bound, out;
  free_vars_rec(f, bound, out);
  return out;
}

bool is_sentence(const FormulaPtr& f) { return free_vars(f).empty(); }

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Token {
  enum Kind { Name, Var, LParen, RParen, Bang, Amp, Pipe, Eq, Lt, Dot, Comma, End } kind;
  std::string text;
  int var = 0;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }
  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    tok_.pos = i_;
    if (i_ >= s_.size()) {
      tok_.kind = Token::End;
      return;
    }
    char c = s_[i_];
    switch (c) {
      case '(': tok_ = {Token::LParen, "(", 0, i_++}; return;
      case ')': tok_ = {Token::RParen, ")", 0, i_++}; return;
      case '!': tok_ = {Token::Bang, "!", 0, i_++}; return;
      case '&': tok_ = {Token::Amp, "&", 0, i_++}; return;
      case '|': tok_ = {Token::Pipe, "|", 0, i_++}; return;
      case '=': tok_ = {Token::Eq, "=", 0, i_++}; return;
      case '<': tok_ = {Token::Lt, "<", 0, i_++}; return;
      case '.': tok_ = {Token::Dot, ".", 0, i_++}; return;
      case ',': tok_ = {Token::Comma, ",", 0, i_++}; return;
      default: break;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i_;
      while (i_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
        ++i_;
      std::string word = s_.substr(start, i_ - start);
      if (word.size() >= 2 && word[0] == 'x' &&
          std::all_of(word.begin() + 1, word.end(),
                      [](char d) { return std::isdigit(static_cast<unsigned char>(d)); })) {
        tok_ = {Token::Var, word, std::stoi(word.substr(1)), start};
      } else {
        tok_ = {Token::Name, word, 0, start};
      }
      return;
    }
    throw error("syntax error at " + std::to_string(i_) + ": unexpected character '" +
                std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t i_ = 0;
  Token tok_;
};

class Parser {
 public:
  Parser(const std::string& text, const SchemaPtr& schema) : lex_(text), schema_(schema) {}

  FormulaPtr parse() {
    FormulaPtr f = formula();
    expect(Token::End, "end of input");
    return f;
  }

 private:
  [[noreturn]] void fail(const Token& t, const std::string& what) {
    throw error("syntax error at " + std::to_string(t.pos) + ": " + what);
  }

  Token expect(Token::Kind k, const std::string& what) {
    if (lex_.peek().kind != k) fail(lex_.peek(), "expected " + what);
    return lex_.take();
  }

  FormulaPtr formula() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Name && (t.text == "EX" || t.text == "ALL")) {
      Token q = lex_.take();
      Token v = lex_.peek();
      if (v.kind != Token::Var) fail(v, "expected variable after " + q.text);
      lex_.take();
      expect(Token::Dot, "'.'");
      FormulaPtr body = formula();
      return q.text == "EX" ? mk_exists(v.var, body) : mk_forall(v.var, body);
    }
    if (t.kind == Token::Bang) {
      lex_.take();
      return mk_not(formula());
    }
    if (t.kind == Token::LParen) {
      lex_.take();
      FormulaPtr a = formula();
      const Token& op = lex_.peek();
      if (op.kind == Token::Amp || op.kind == Token::Pipe) {
        bool conj = op.kind == Token::Amp;
        lex_.take();
        FormulaPtr b = formula();
        expect(Token::RParen, "')'");
        return conj ? mk_and(a, b) : mk_or(a, b);
      }
      expect(Token::RParen, "')'");
      return a;
    }
    return atom();
  }

  Term term() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Var) return Term::variable(lex_.take().var);
    if (t.kind == Token::Name) {
      Token n = lex_.take();
      if (schema_->constant_index(n.text) < 0)
        throw error("unknown constant '" + n.text + "' at " + std::to_string(n.pos));
      return Term::constant(n.text);
    }
    fail(t, "expected term");
  }

  FormulaPtr atom() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Name && schema_->relation_index(t.text) >= 0) {
      Token name = lex_.take();
      int ri = schema_->relation_index(name.text);
      int arity = schema_->relations()[static_cast<std::size_t>(ri)].arity;
      expect(Token::LParen, "'(' after relation " + name.text);
      std::vector<Term> args;
      args.push_back(term());
      while (lex_.peek().kind == Token::Comma) {
        lex_.take();
        args.push_back(term());
      }
      expect(Token::RParen, "')'");
      if (static_cast<int>(args.size()) != arity)
        throw error("arity mismatch: " + name.text + " expects " + std::to_string(arity) +
                    " arguments, got " + std::to_string(args.size()));
      return mk_atom(name.text, std::move(args));
    }
    Term a = term();
    const Token& op = lex_.peek();
    if (op.kind == Token::Eq) {
      lex_.take();
      return mk_eq(a, term());
    }
    if (op.kind == Token::Lt) {
      if (!schema_->has_binary_less())
        fail(op, "infix '<' needs a binary relation named '<' in the schema");
      lex_.take();
      Term b = term();
      return mk_atom("<", {a, b});
    }
    fail(op, "expected '=' or '<'");
  }

  Lexer lex_;
  SchemaPtr schema_;
};

}  // namespace

FormulaPtr parse_formula(const std::string& text, const SchemaPtr& schema) {
  Parser p(text, schema);
  FormulaPtr f = p.parse();
  check_against_schema(f, schema);
  return f;
}

static std::string term_text(const Term& t) {
  return t.is_var ? "x" + std::to_string(t.var) : t.cname;
}

std::string print_formula(const FormulaPtr& f) {
  switch (f->kind) {
    case Conn::Atom:
      if (f->rel == "=" || (f->rel == "<" && f->args.size() == 2))
        return term_text(f->args[0]) + f->rel + term_text(f->args[1]);
      else {
        std::string s = f->rel + "(";
        for (std::size_t i = 0; i < f->args.size(); ++i)
          s += (i ? "," : "") + term_text(f->args[i]);
        return s + ")";
      }
    case Conn::Not:
      return "!" + print_formula(f->child);
    case Conn::And:
      return "(" + print_formula(f->lhs) + " & " + print_formula(f->rhs) + ")";
    case Conn::Or:
      return "(" + print_formula(f->lhs) + " | " + print_formula(f->rhs) + ")";
    case Conn::Exists:
      return "EX x" + std::to_string(f->var) + " . " + print_formula(f->child);
    case Conn::Forall:
      return "ALL x" + std::to_string(f->var) + " . " + print_formula(f->child);
  }
  return {};
}

void check_against_schema(const FormulaPtr& f, const SchemaPtr& schema) {
  switch (f->kind) {
    case Conn::Atom: {
      if (f->rel != "=") {
        int ri = schema->relation_index(f->rel);
        if (ri < 0) throw error("unknown relation '" + f->rel + "'");
        if (static_cast<int>(f->args.size()) != schema->relations()[static_cast<std::size_t>(ri)].arity)
          throw error("arity mismatch for relation '" + f->rel + "'");
      } else if (f->args.size() != 2) {
        throw error("equality takes two terms");
      }
      for (const auto& t : f->args)
        if (!t.is_var && schema->constant_index(t.cname) < 0)
          throw error("unknown constant '" + t.cname + "'");
      break;
    }
    case Conn::Not:
      check_against_schema(f->child, schema);
      break;
    case Conn::And:
    case Conn::Or:
      check_against_schema(f->lhs, schema);
      check_against_schema(f->rhs, schema);
      break;
    case Conn::Exists:
    case Conn::Forall:
      check_against_schema(f->child, schema);
      break;
  }
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

int resolve_term(const Term& t, const Structure& s, const Assignment& a) {
  if (t.is_var) {
    int e = a.has(t.var) ? a.get(t.var) : -1;
    if (e < 0) throw error("unbound free variable x" + std::to_string(t.var));
    return e;
  }
  int ci = s.schema()->constant_index(t.cname);
  if (ci < 0) throw error("unknown constant '" + t.cname + "'");
  return s.constant_value(ci);
}

bool eval_rec(const FormulaPtr& f, const Structure& s, Assignment& a) {
  switch (f->kind) {
    case Conn::Atom: {
      int vals[8];
      int n = static_cast<int>(f->args.size());
      if (n > 8) throw error("atom arity > 8 unsupported");
      for (int i = 0; i < n; ++i) vals[i] = resolve_term(f->args[static_cast<std::size_t>(i)], s, a);
      if (f->rel == "=") return vals[0] == vals[1];
      int ri = s.schema()->relation_index(f->rel);
      if (ri < 0) throw error("unknown relation '" + f->rel + "'");
      return s.holds(ri, vals, n);
    }
    case Conn::Not:
      return !eval_rec(f->child, s, a);
    case Conn::And:
      return eval_rec(f->lhs, s, a) && eval_rec(f->rhs, s, a);
    case Conn::Or:
      return eval_rec(f->lhs, s, a) || eval_rec(f->rhs, s, a);
    case Conn::Exists:
    case Conn::Forall: {
      bool exists = f->kind == Conn::Exists;
      int saved = a.has(f->var) ? a.get(f->var) : -1;
      for (int e = 0; e < s.size(); ++e) {
        a.set(f->var, e);
        bool v = eval_rec(f->child, s, a);
        if (v == exists) {
          if (saved < 0) a.erase(f->var); else a.set(f->var, saved);
          return exists;
        }
      }
      if (saved < 0) a.erase(f->var); else a.set(f->var, saved);
      return !exists;
    }
  }
  return false;
}

}  // namespace

bool evaluate(const FormulaPtr& f, const PebbledStructure& p) {
  Assignment a = p.assignment;
  return eval_rec(f, *p.structure, a);
}

bool is_separating(const FormulaPtr& f, const std::vector<PebbledStructure>& A,
                   const std::vector<PebbledStructure>& B) {
  if (A.empty() && B.empty()) throw error("is_separating: both sides empty");
  // Domain consistency: one common pebble domain across both sides.
  const PebbledStructure* first = !A.empty() ? &A.front() : &B.front();
  auto dom = first->assignment.colors();
  for (const auto& side : {&A, &B})
    for (const auto& ps : *side)
      if (ps.assignment.colors() != dom)
        throw error("is_separating: sides are not domain-consistent");
  auto fv = free_vars(f);
  for (int v : fv)
    if (std::find(dom.begin(), dom.end(), v) == dom.end())
      throw error("is_separating: free variable x" + std::to_string(v) + " outside common domain");
  for (const auto& ps : A)
    if (!evaluate(f, ps)) return false;
  for (const auto& ps : B)
    if (evaluate(f, ps)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Prenex

bool is_prenex(const FormulaPtr& f) {
  FormulaPtr g = f;
  while (g->kind == Conn::Exists || g->kind == Conn::Forall) g = g->child;
  // The matrix must be quantifier-free.
  std::function<bool(const FormulaPtr&)> qf = [&](const FormulaPtr& h) {
    switch (h->kind) {
      case Conn::Atom: return true;
      case Conn::Not: return qf(h->child);
      case Conn::And:
      case Conn::Or: return qf(h->lhs) && qf(h->rhs);
      default: return false;
    }
  };
  return qf(g);
}

PrenexForm split_prenex(const FormulaPtr& f) {
  if (!is_prenex(f)) throw error("formula is not in prenex form");
  PrenexForm pf;
  FormulaPtr g = f;
  while (g->kind == Conn::Exists || g->kind == Conn::Forall) {
    pf.prefix.emplace_back(g->kind == Conn::Forall, g->var);
    g = g->child;
  }
  pf.matrix = g;
  return pf;
}

FormulaPtr assemble_prenex(const PrenexForm& pf) {
  FormulaPtr f = pf.matrix;
  for (auto it = pf.prefix.rbegin(); it != pf.prefix.rend(); ++it)
    f = it->first ? mk_forall(it->second, f) : mk_exists(it->second, f);
  return f;
}

namespace {

FormulaPtr substitute_var(const FormulaPtr& f, int from, int to) {
  switch (f->kind) {
    case Conn::Atom: {
      auto args = f->args;
      for (auto& t : args)
        if (t.is_var && t.var == from) t.var = to;
      return mk_atom(f->rel, std::move(args));
    }
    case Conn::Not:
      return mk_not(substitute_var(f->child, from, to));
    case Conn::And:
      return mk_and(substitute_var(f->lhs, from, to), substitute_var(f->rhs, from, to));
    case Conn::Or:
      return mk_or(substitute_var(f->lhs, from, to), substitute_var(f->rhs, from, to));
    case Conn::Exists:
    case Conn::Forall:
      if (f->var == from) return f;  // shadowed
      return f->kind == Conn::Exists ? mk_exists(f->var, substitute_var(f->child, from, to))
                                     : mk_forall(f->var, substitute_var(f->child, from, to));
  }
  return f;
}

// Pulls quantifiers out, renaming each bound variable to a fresh index.
PrenexForm pull(const FormulaPtr& f, int& fresh, bool positive) {
  switch (f->kind) {
    case Conn::Atom: {
      return {{}, positive ? f : mk_not(f)};
    }
    case Conn::Not:
      return pull(f->child, fresh, !positive);
    case Conn::And:
    case Conn::Or: {
      // Under negation, the connective dualizes.
      bool conj = (f->kind == Conn::And) == positive;
      PrenexForm a = pull(f->lhs, fresh, positive);
      PrenexForm b = pull(f->rhs, fresh, positive);
      PrenexForm out;
      out.prefix = a.prefix;
      out.prefix.insert(out.prefix.end(), b.prefix.begin(), b.prefix.end());
      out.matrix = conj ? mk_and(a.matrix, b.matrix) : mk_or(a.matrix, b.matrix);
      return out;
    }
    case Conn::Exists:
    case Conn::Forall: {
      bool forall = (f->kind == Conn::Forall) == positive;
      int nv = ++fresh;
      if (nv > kMaxColors)
        throw error("prenex conversion exceeds " + std::to_string(kMaxColors) + " variables");
      PrenexForm inner = pull(substitute_var(f->child, f->var, nv), fresh, positive);
      PrenexForm out;
      out.prefix.emplace_back(forall, nv);
      out.prefix.insert(out.prefix.end(), inner.prefix.begin(), inner.prefix.end());
      out.matrix = inner.matrix;
      return out;
    }
  }
  return {};
}

}  // namespace

FormulaPtr to_prenex(const FormulaPtr& f) {
  if (is_prenex(f)) {
    // Already prenex with 1..r prefix variables in order: keep as is.
    PrenexForm pf = split_prenex(f);
    bool canonical = true;
    for (std::size_t i = 0; i < pf.prefix.size(); ++i)
      if (pf.prefix[i].second != static_cast<int>(i) + 1) canonical = false;
    if (canonical) return f;
  }
  if (!is_sentence(f)) throw error("to_prenex requires a sentence");
  // Step 1: pull quantifiers out with fresh indices above any original index.
  int base = 0;
  std::function<void(const FormulaPtr&)> maxvar = [&](const FormulaPtr& g) {
    switch (g->kind) {
      case Conn::Atom:
        for (const auto& t : g->args)
          if (t.is_var) base = std::max(base, t.var);
        break;
      case Conn::Not: maxvar(g->child); break;
      case Conn::And:
      case Conn::Or: maxvar(g->lhs); maxvar(g->rhs); break;
      case Conn::Exists:
      case Conn::Forall: base = std::max(base, g->var); maxvar(g->child); break;
    }
  };
  maxvar(f);
  int fresh = base;
  PrenexForm pf = pull(f, fresh, true);
  // Step 2: re-index prefix variables to 1..r in prefix order.
  FormulaPtr matrix = pf.matrix;
  std::vector<std::pair<bool, int>> prefix;
  for (std::size_t i = 0; i < pf.prefix.size(); ++i) {
    int target = static_cast<int>(i) + 1;
    matrix = substitute_var(matrix, pf.prefix[i].second, target);
    prefix.emplace_back(pf.prefix[i].first, target);
  }
  return assemble_prenex({prefix, matrix});
}

}  // namespace msgw
