#pragma once

// Problems: signature, recursive definitions, axioms, goal, grammar directive
// and expected lemmas. Includes the S-expression parser and printer.

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lemsynth/logic.hpp"
#include "lemsynth/sexpr.hpp"

namespace lemsynth {

class DefinitionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class PositivityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class SymbolKind : std::uint8_t { Constant, Function, Relation };

struct Decl {
  Symbol name;
  SymbolKind kind = SymbolKind::Constant;
  std::vector<Sort> args;
  Sort result;
  bool from_definition = false;  // declared implicitly by define-rec / define-recfun

  friend bool operator==(const Decl& a, const Decl& b) {
    return a.name == b.name && a.kind == b.kind && a.args == b.args && a.result == b.result &&
           a.from_definition == b.from_definition;
  }
};

class Signature {
public:
  const std::optional<Sort>& foreground() const { return fg_; }
  void set_foreground(Sort s) { fg_ = s; }

  void add(Decl d) {
    if (index_.count(d.name)) throw DefinitionError("duplicate declaration of " + d.name.str());
    index_.emplace(d.name, decls_.size());
    decls_.push_back(std::move(d));
  }
  const Decl* find(Symbol name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &decls_[it->second];
  }
  bool contains(Symbol name) const { return index_.count(name) != 0; }
  const std::vector<Decl>& decls() const { return decls_; }

  std::vector<const Decl*> of_kind(SymbolKind k) const {
    std::vector<const Decl*> out;
    for (const auto& d : decls_)
      if (d.kind == k) out.push_back(&d);
    return out;
  }

  friend bool operator==(const Signature& a, const Signature& b) { return a.fg_ == b.fg_ && a.decls_ == b.decls_; }

private:
  std::optional<Sort> fg_;
  std::vector<Decl> decls_;
  std::map<Symbol, std::size_t> index_;
};

// R(x̄) :=lfp body
struct RecDef {
  Symbol name;
  std::vector<Expr> params;
  Expr body;

  Expr head_atom() const { return mk_app(name, Sort::boolean(), params); }
  friend bool operator==(const RecDef& a, const RecDef& b) {
    return a.name == b.name && a.params == b.params && a.body == b.body;
  }
};

// f(x̄) := term, where term is built from ite over a base term language.
struct RecFunDef {
  Symbol name;
  std::vector<Expr> params;
  Sort result;
  Expr body;

  Expr head_term() const { return mk_app(name, result, params); }
  friend bool operator==(const RecFunDef& a, const RecFunDef& b) {
    return a.name == b.name && a.params == b.params && a.result == b.result && a.body == b.body;
  }
};

// ∀x̄. R(x̄) → body
struct Lemma {
  Symbol head;
  std::vector<Expr> vars;
  Expr body;

  Expr head_atom() const { return mk_app(head, Sort::boolean(), vars); }
  Expr formula() const { return mk_forall(vars, mk_implies(head_atom(), body)); }
  std::string str() const { return formula().str(); }

  friend bool operator==(const Lemma& a, const Lemma& b) {
    return a.head == b.head && a.vars == b.vars && a.body == b.body;
  }
};

struct AtomTemplate {
  std::vector<Expr> vars;
  Expr body;
  friend bool operator==(const AtomTemplate& a, const AtomTemplate& b) {
    return a.vars == b.vars && a.body == b.body;
  }
};

struct GrammarConfig {
  bool present = false;
  std::vector<Symbol> heads;  // empty: every define-rec relation
  int max_size = 3;
  int term_depth = 1;
  std::optional<std::vector<Symbol>> constants;
  std::optional<std::vector<Symbol>> functions;
  std::optional<std::vector<Symbol>> relations;
  bool int_atoms = false;
  bool ground_atoms = false;
  std::vector<AtomTemplate> atoms;

  friend bool operator==(const GrammarConfig& a, const GrammarConfig& b) {
    return a.present == b.present && a.heads == b.heads && a.max_size == b.max_size &&
           a.term_depth == b.term_depth && a.constants == b.constants && a.functions == b.functions &&
           a.relations == b.relations && a.int_atoms == b.int_atoms && a.ground_atoms == b.ground_atoms &&
           a.atoms == b.atoms;
  }
};

struct Problem {
  Signature sig;
  std::vector<RecDef> defs;
  std::vector<RecFunDef> fundefs;
  std::vector<Expr> axioms;
  Expr goal;
  GrammarConfig grammar;
  std::vector<Lemma> expected;

  const Sort& fg() const {
    if (!sig.foreground()) throw DefinitionError("problem has no foreground sort");
    return *sig.foreground();
  }
  const RecDef* find_def(Symbol name) const {
    for (const auto& d : defs)
      if (d.name == name) return &d;
    return nullptr;
  }
  const RecFunDef* find_fundef(Symbol name) const {
    for (const auto& d : fundefs)
      if (d.name == name) return &d;
    return nullptr;
  }

  friend bool operator==(const Problem& a, const Problem& b) {
    return a.sig == b.sig && a.defs == b.defs && a.fundefs == b.fundefs && a.axioms == b.axioms &&
           a.goal == b.goal && a.grammar == b.grammar && a.expected == b.expected;
  }
};

// ---------------------------------------------------------------------------
// Positivity

struct PositivityViolation {
  Symbol definition;
  Expr atom;
  std::string path;
};

// Every occurrence of a relation defined in `all_defs` inside d's body must be
// under an even number of negations. Implication antecedents count as negated;
// ite conditions and iff operands occur with both polarities.
inline std::optional<PositivityViolation> check_positivity(const RecDef& d, const std::vector<RecDef>& all_defs) {
  std::vector<Symbol> rec;
  for (const auto& x : all_defs) rec.push_back(x.name);
  auto is_rec = [&](const Expr& e) {
    if (!(e.is(Op::App) || e.is(Op::Const)) || !e.sort().is_bool()) return false;
    return std::find(rec.begin(), rec.end(), e.name()) != rec.end();
  };
  std::optional<PositivityViolation> found;
  // pol: +1 positive, -1 negative, 0 both
  std::function<void(const Expr&, int, std::string)> go = [&](const Expr& e, int pol, std::string path) {
    if (found) return;
    if (is_rec(e)) {
      if (pol != 1) found = PositivityViolation{d.name, e, path};
      return;
    }
    switch (e.op()) {
      case Op::Not: go(e.arg(0), -pol, path + "/not"); break;
      case Op::And:
      case Op::Or:
        for (std::size_t i = 0; i < e.args().size(); ++i)
          go(e.arg(i), pol, path + (e.is(Op::And) ? "/and." : "/or.") + std::to_string(i));
        break;
      case Op::Implies:
        go(e.arg(0), -pol, path + "/=>.0");
        go(e.arg(1), pol, path + "/=>.1");
        break;
      case Op::Iff:
        go(e.arg(0), 0, path + "/<=>.0");
        go(e.arg(1), 0, path + "/<=>.1");
        break;
      case Op::Ite:
        go(e.arg(0), 0, path + "/ite.c");
        go(e.arg(1), pol, path + "/ite.t");
        go(e.arg(2), pol, path + "/ite.e");
        break;
      default:
        // atoms whose arguments contain formulas do not occur in this language
        break;
    }
  };
  go(d.body, 1, "");
  return found;
}

// ---------------------------------------------------------------------------
// Parser

namespace detail {

class ProblemParser {
public:
  Problem parse(std::string_view text) {
    auto forms = parse_sexprs(text);
    // Pass 1: sorts and declarations, including the heads of definitions, so
    // that bodies may refer to symbols defined later (mutual recursion).
    for (const auto& f : forms) {
      auto h = f.head();
      if (h == "foreground-sort") declare_foreground(f);
      else if (h == "const") declare_const(f);
      else if (h == "func") declare_func(f);
      else if (h == "pred") declare_pred(f);
      else if (h == "define-rec") declare_rec_head(f);
      else if (h == "define-recfun") declare_recfun_head(f);
      else if (h == "axiom" || h == "goal" || h == "grammar" || h == "expect-lemma") continue;
      else fail(f, "unknown declaration '" + (f.is_atom ? f.atom : std::string(h)) + "'");
    }
    for (const auto& f : forms) {
      auto h = f.head();
      if (h == "define-rec") parse_rec(f);
      else if (h == "define-recfun") parse_recfun(f);
      else if (h == "axiom") {
        expect_size(f, 2);
        p_.axioms.push_back(formula(f[1]));
        check_closed(f[1], p_.axioms.back(), "axiom");
      } else if (h == "goal") {
        expect_size(f, 2);
        if (p_.goal) fail(f, "duplicate goal");
        p_.goal = formula(f[1]);
        check_closed(f[1], p_.goal, "goal");
      } else if (h == "grammar") parse_grammar(f);
      else if (h == "expect-lemma") parse_expect(f);
    }
    if (!p_.goal) throw ParseError("problem has no goal", {});
    for (const auto& d : p_.defs) {
      if (auto v = check_positivity(d, p_.defs))
        throw PositivityError(pos_str(def_pos_[d.name]) + "relation " + v->atom.name().str() +
                              " occurs negatively in the definition of " + d.name.str() + " at " + v->atom.str() +
                              " (path " + v->path + ")");
    }
    return std::move(p_);
  }

private:
  [[noreturn]] static void fail(const SExpr& at, const std::string& msg) { throw ParseError(msg, at.pos); }
  static std::string pos_str(SourcePos p) { return std::to_string(p.line) + ":" + std::to_string(p.column) + ": "; }

  static void expect_size(const SExpr& f, std::size_t n) {
    if (!f.is_list() || f.size() != n)
      fail(f, "expected " + std::to_string(n - 1) + " argument(s) to " + std::string(f.head()));
  }
  static const std::string& name_of(const SExpr& s) {
    if (!s.is_atom) fail(s, "expected a symbol");
    return s.atom;
  }

  Sort sort_of(const SExpr& s) {
    const auto& n = name_of(s);
    if (n == "Int") return Sort::integer();
    if (n == "Bool") return Sort::boolean();
    if (n == "SetInt") return Sort::set_of_int();
    if (p_.sig.foreground() && p_.sig.foreground()->str() == n) return *p_.sig.foreground();
    fail(s, "unknown sort '" + n + "'");
  }

  void add_decl(const SExpr& at, Decl d) {
    if (is_reserved(d.name.str())) fail(at, "'" + d.name.str() + "' is a reserved name");
    if (p_.sig.contains(d.name)) fail(at, "duplicate definition of '" + d.name.str() + "'");
    p_.sig.add(std::move(d));
  }

  static bool is_reserved(const std::string& n) {
    static const char* words[] = {"and",   "or",        "not",   "=>",     "<=>",    "iff",    "ite",
                                  "=",     "<=",        "<",     ">=",     ">",      "+",      "-",
                                  "true",  "false",     "forall", "exists", "emptyset", "singleton", "union",
                                  "member", "Int",      "Bool",  "SetInt"};
    for (auto w : words)
      if (n == w) return true;
    if (!n.empty() && (std::isdigit(static_cast<unsigned char>(n[0])) || n[0] == '-')) return true;
    return false;
  }

  void declare_foreground(const SExpr& f) {
    expect_size(f, 2);
    if (p_.sig.foreground()) fail(f, "only one foreground sort is allowed");
    const auto& n = name_of(f[1]);
    if (is_reserved(n)) fail(f[1], "'" + n + "' is a reserved name");
    p_.sig.set_foreground(Sort::foreground(n));
  }
  void declare_const(const SExpr& f) {
    expect_size(f, 3);
    add_decl(f, {Symbol(name_of(f[1])), SymbolKind::Constant, {}, sort_of(f[2])});
  }
  std::vector<Sort> sort_list(const SExpr& s) {
    if (!s.is_list()) fail(s, "expected a sort list");
    std::vector<Sort> out;
    for (const auto& x : s.items) out.push_back(sort_of(x));
    return out;
  }
  void declare_func(const SExpr& f) {
    expect_size(f, 4);
    auto args = sort_list(f[2]);
    Sort res = sort_of(f[3]);
    if (res.is_bool()) fail(f[3], "use pred for Bool-valued symbols");
    if (args.empty()) fail(f[2], "use const for nullary functions");
    add_decl(f, {Symbol(name_of(f[1])), SymbolKind::Function, std::move(args), res});
  }
  void declare_pred(const SExpr& f) {
    expect_size(f, 3);
    add_decl(f, {Symbol(name_of(f[1])), SymbolKind::Relation, sort_list(f[2]), Sort::boolean()});
  }

  std::vector<Expr> params(const SExpr& head) {
    if (!head.is_list() || head.size() < 1) fail(head, "expected (NAME (VAR SORT)*)");
    std::vector<Expr> out;
    for (std::size_t i = 1; i < head.size(); ++i) {
      const auto& b = head[i];
      if (!b.is_list() || b.size() != 2) fail(b, "expected (VAR SORT)");
      const auto& vn = name_of(b[0]);
      for (const auto& o : out)
        if (o.name().str() == vn) fail(b, "duplicate parameter '" + vn + "'");
      out.push_back(mk_var(vn, sort_of(b[1])));
    }
    return out;
  }
  static std::vector<Sort> sorts_of(const std::vector<Expr>& vs) {
    std::vector<Sort> out;
    for (const auto& v : vs) out.push_back(v.sort());
    return out;
  }

  void declare_rec_head(const SExpr& f) {
    expect_size(f, 3);
    auto ps = params(f[1]);
    Symbol name(name_of(f[1][0]));
    def_pos_[name] = f.pos;
    add_decl(f, {name, SymbolKind::Relation, sorts_of(ps), Sort::boolean(), true});
  }
  void declare_recfun_head(const SExpr& f) {
    expect_size(f, 4);
    auto ps = params(f[1]);
    if (ps.empty()) fail(f[1], "recursive functions need at least one parameter");
    Symbol name(name_of(f[1][0]));
    Sort res = sort_of(f[2]);
    if (res.is_bool()) fail(f[2], "Bool-valued recursive functions should be define-rec");
    add_decl(f, {name, SymbolKind::Function, sorts_of(ps), res, true});
  }

  void parse_rec(const SExpr& f) {
    auto ps = params(f[1]);
    std::vector<Scope> scope;
    for (const auto& v : ps) scope.push_back({v.name(), v});
    Expr body = parse(f[2], scope);
    if (!body.sort().is_bool()) fail(f[2], "definition body must be a formula");
    if (!is_quantifier_free(body)) fail(f[2], "definition bodies must be quantifier-free");
    p_.defs.push_back({Symbol(name_of(f[1][0])), std::move(ps), std::move(body)});
  }
  void parse_recfun(const SExpr& f) {
    auto ps = params(f[1]);
    std::vector<Scope> scope;
    for (const auto& v : ps) scope.push_back({v.name(), v});
    Sort res = sort_of(f[2]);
    Expr body = parse(f[3], scope);
    if (body.sort() != res)
      fail(f[3], "body has sort " + body.sort().str() + " but the function returns " + res.str());
    if (!is_quantifier_free(body)) fail(f[3], "definition bodies must be quantifier-free");
    p_.fundefs.push_back({Symbol(name_of(f[1][0])), std::move(ps), res, std::move(body)});
  }

  static void check_closed(const SExpr& at, const Expr& e, const char* what) {
    auto fv = free_vars(e);
    if (!fv.empty()) fail(at, std::string(what) + " has free variable '" + fv[0].name().str() + "'");
  }

  Expr formula(const SExpr& s) {
    std::vector<Scope> scope;
    Expr e = parse(s, scope);
    if (!e.sort().is_bool()) fail(s, "expected a formula");
    return e;
  }

  struct Scope {
    Symbol name;
    Expr var;
  };

  Expr parse(const SExpr& s, std::vector<Scope>& scope) {
    try {
      return parse_inner(s, scope);
    } catch (const SortError& e) {
      std::string msg = e.what();
      if (msg.find(':') != std::string::npos && std::isdigit(static_cast<unsigned char>(msg[0]))) throw;
      throw SortError(pos_str(s.pos) + msg);
    }
  }

  Expr parse_inner(const SExpr& s, std::vector<Scope>& scope) {
    if (s.is_atom) return parse_atom(s, scope);
    if (s.items.empty()) fail(s, "empty expression");
    if (!s[0].is_atom) fail(s, "expected an operator");
    const std::string& h = s[0].atom;
    auto args = [&](std::size_t from = 1) {
      std::vector<Expr> out;
      for (std::size_t i = from; i < s.size(); ++i) out.push_back(parse(s[i], scope));
      return out;
    };
    auto arity = [&](std::size_t n) {
      if (s.size() != n + 1)
        fail(s, "'" + h + "' expects " + std::to_string(n) + " argument(s), got " + std::to_string(s.size() - 1));
    };
    auto at_least = [&](std::size_t n) {
      if (s.size() < n + 1) fail(s, "'" + h + "' expects at least " + std::to_string(n) + " argument(s)");
    };

    if (h == "forall") {
      arity(2);
      if (!s[1].is_list() || s[1].items.empty()) fail(s[1], "expected a non-empty binder list");
      std::vector<Expr> vars;
      std::size_t mark = scope.size();
      for (const auto& b : s[1].items) {
        if (!b.is_list() || b.size() != 2) fail(b, "expected (VAR SORT)");
        Expr v = mk_var(name_of(b[0]), sort_of(b[1]));
        vars.push_back(v);
        scope.push_back({v.name(), v});
      }
      Expr body = parse(s[2], scope);
      scope.resize(mark);
      if (!body.sort().is_bool()) fail(s[2], "quantifier body must be a formula");
      return mk_forall(std::move(vars), std::move(body));
    }
    if (h == "exists") fail(s, "existential quantifiers are not supported");
    if (h == "and") return mk_and(args());
    if (h == "or") return mk_or(args());
    if (h == "not") {
      arity(1);
      return mk_not(parse(s[1], scope));
    }
    if (h == "=>") {
      at_least(2);
      auto xs = args();
      Expr acc = xs.back();
      for (std::size_t i = xs.size() - 1; i-- > 0;) acc = mk_implies(xs[i], acc);
      return acc;
    }
    if (h == "<=>" || h == "iff") {
      arity(2);
      return mk_iff(parse(s[1], scope), parse(s[2], scope));
    }
    if (h == "=") {
      at_least(2);
      auto xs = args();
      std::vector<Expr> conj;
      for (std::size_t i = 0; i + 1 < xs.size(); ++i) conj.push_back(mk_eq(xs[i], xs[i + 1]));
      return mk_and(std::move(conj));
    }
    if (h == "distinct") {
      at_least(2);
      auto xs = args();
      std::vector<Expr> conj;
      for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j) conj.push_back(mk_not(mk_eq(xs[i], xs[j])));
      return mk_and(std::move(conj));
    }
    if (h == "ite") {
      arity(3);
      return mk_ite(parse(s[1], scope), parse(s[2], scope), parse(s[3], scope));
    }
    if (h == "+") {
      at_least(2);
      auto xs = args();
      Expr acc = xs[0];
      for (std::size_t i = 1; i < xs.size(); ++i) acc = mk_add(acc, xs[i]);
      return acc;
    }
    if (h == "-") {
      at_least(1);
      auto xs = args();
      if (xs.size() == 1) {
        if (xs[0].is(Op::IntLit)) return mk_int(-xs[0].value());
        return mk_sub(mk_int(0), xs[0]);
      }
      Expr acc = xs[0];
      for (std::size_t i = 1; i < xs.size(); ++i) acc = mk_sub(acc, xs[i]);
      return acc;
    }
    if (h == "<=") { arity(2); return mk_le(parse(s[1], scope), parse(s[2], scope)); }
    if (h == "<") { arity(2); return mk_lt(parse(s[1], scope), parse(s[2], scope)); }
    if (h == ">=") { arity(2); return mk_le(parse(s[2], scope), parse(s[1], scope)); }
    if (h == ">") { arity(2); return mk_lt(parse(s[2], scope), parse(s[1], scope)); }
    if (h == "singleton") { arity(1); return mk_singleton(parse(s[1], scope)); }
    if (h == "member") { arity(2); return mk_member(parse(s[1], scope), parse(s[2], scope)); }
    if (h == "union") {
      at_least(2);
      auto xs = args();
      Expr acc = xs[0];
      for (std::size_t i = 1; i < xs.size(); ++i) acc = mk_union(acc, xs[i]);
      return acc;
    }

    const Decl* d = p_.sig.find(Symbol(h));
    Decl domain;
    if (!d && is_domain_name(Symbol(h))) {
      const Decl* f = p_.sig.find(Symbol(h.substr(0, h.size() - 2)));
      domain = Decl{Symbol(h), SymbolKind::Relation, f->args, Sort::boolean(), true};
      d = &domain;
    }
    if (!d) fail(s[0], "unknown symbol '" + h + "'");
    if (d->kind == SymbolKind::Constant) fail(s, "constant '" + h + "' applied to arguments");
    if (d->args.size() != s.size() - 1)
      fail(s, "'" + h + "' expects " + std::to_string(d->args.size()) + " argument(s), got " +
                  std::to_string(s.size() - 1));
    auto xs = args();
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (xs[i].sort() != d->args[i])
        fail(s[i + 1], "argument " + std::to_string(i + 1) + " of '" + h + "' has sort " + xs[i].sort().str() +
                           ", expected " + d->args[i].str());
    return mk_app(d->name, d->result, std::move(xs));
  }

  Expr parse_atom(const SExpr& s, std::vector<Scope>& scope) {
    const std::string& a = s.atom;
    if (a == "true") return mk_true();
    if (a == "false") return mk_false();
    if (a == "emptyset") return mk_empty_set();
    bool numeric = !a.empty() && (std::isdigit(static_cast<unsigned char>(a[0])) ||
                                  (a[0] == '-' && a.size() > 1 && std::isdigit(static_cast<unsigned char>(a[1]))));
    if (numeric) {
      try {
        std::size_t used = 0;
        long long v = std::stoll(a, &used);
        if (used != a.size()) fail(s, "malformed integer '" + a + "'");
        return mk_int(v);
      } catch (const std::out_of_range&) {
        fail(s, "integer out of range '" + a + "'");
      } catch (const std::invalid_argument&) {
        fail(s, "malformed integer '" + a + "'");
      }
    }
    Symbol sym(a);
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->name == sym) return it->var;
    const Decl* d = p_.sig.find(sym);
    if (!d) fail(s, "unknown symbol '" + a + "'");
    if (!d->args.empty()) fail(s, "'" + a + "' expects " + std::to_string(d->args.size()) + " argument(s)");
    return mk_const(sym, d->result);
  }

  // Grammar symbol lists may also name the domain predicate f_b of a
  // recursive function f.
  std::vector<Symbol> symbol_list(const SExpr& f, bool allow_domain = false) {
    std::vector<Symbol> out;
    for (std::size_t i = 1; i < f.size(); ++i) {
      Symbol sym(name_of(f[i]));
      if (!p_.sig.contains(sym) && !(allow_domain && is_domain_name(sym)))
        fail(f[i], "unknown symbol '" + sym.str() + "'");
      out.push_back(sym);
    }
    return out;
  }
  bool is_domain_name(Symbol sym) const {
    const std::string& s = sym.str();
    if (s.size() < 3 || s.compare(s.size() - 2, 2, "_b") != 0) return false;
    const Decl* d = p_.sig.find(Symbol(s.substr(0, s.size() - 2)));
    return d && d->kind == SymbolKind::Function && d->from_definition;
  }
  static bool flag(const SExpr& f) {
    if (f.size() != 2 || !(f[1].is("true") || f[1].is("false"))) fail(f, "expected true or false");
    return f[1].is("true");
  }
  static int number(const SExpr& f) {
    if (f.size() != 2 || !f[1].is_atom) fail(f, "expected a number");
    try {
      return std::stoi(f[1].atom);
    } catch (const std::exception&) {
      fail(f[1], "expected a number");
    }
  }

  void parse_grammar(const SExpr& f) {
    auto& g = p_.grammar;
    if (g.present) fail(f, "duplicate grammar directive");
    g.present = true;
    for (std::size_t i = 1; i < f.size(); ++i) {
      const auto& c = f[i];
      auto h = c.head();
      if (h == "heads") {
        g.heads = symbol_list(c);
        for (std::size_t j = 0; j < g.heads.size(); ++j) {
          const Decl* d = p_.sig.find(g.heads[j]);
          if (!d || !d->from_definition || d->kind != SymbolKind::Relation)
            fail(c[j + 1], "'" + g.heads[j].str() + "' is not a recursively defined relation");
        }
      } else if (h == "max-size") {
        g.max_size = number(c);
        if (g.max_size < 1) fail(c, "max-size must be at least 1");
      } else if (h == "term-depth") {
        g.term_depth = number(c);
        if (g.term_depth < 0 || g.term_depth > 2) fail(c, "term-depth must be 0, 1 or 2");
      } else if (h == "constants") g.constants = symbol_list(c);
      else if (h == "functions") g.functions = symbol_list(c);
      else if (h == "relations") g.relations = symbol_list(c, true);
      else if (h == "int-atoms") g.int_atoms = flag(c);
      else if (h == "ground-atoms") g.ground_atoms = flag(c);
      else if (h == "atom") {
        if (c.size() != 3 || !c[1].is_list()) fail(c, "expected (atom ((VAR SORT)*) FORMULA)");
        std::vector<Scope> scope;
        std::vector<Expr> vars;
        for (const auto& b : c[1].items) {
          if (!b.is_list() || b.size() != 2) fail(b, "expected (VAR SORT)");
          Expr v = mk_var(name_of(b[0]), sort_of(b[1]));
          vars.push_back(v);
          scope.push_back({v.name(), v});
        }
        Expr body = parse(c[2], scope);
        if (!body.sort().is_bool() || !is_quantifier_free(body)) fail(c[2], "atom must be a quantifier-free formula");
        g.atoms.push_back({std::move(vars), std::move(body)});
      } else {
        fail(c, "unknown grammar option '" + c.str() + "'");
      }
    }
  }

  void parse_expect(const SExpr& f) {
    expect_size(f, 2);
    Expr e = formula(f[1]);
    auto [vars, matrix] = split_forall(e);
    if (!matrix.is(Op::Implies)) fail(f[1], "expected lemma of the form (forall (...) (=> (R x...) body))");
    const Expr& head = matrix.arg(0);
    const Decl* d = (head.is(Op::App) || head.is(Op::Const)) ? p_.sig.find(head.name()) : nullptr;
    if (!d || !d->from_definition || d->kind != SymbolKind::Relation)
      fail(f[1], "lemma head must be a recursively defined relation");
    if (head.args() != vars) fail(f[1], "lemma head must be applied to the bound variables in order");
    if (!is_quantifier_free(matrix.arg(1))) fail(f[1], "lemma body must be quantifier-free");
    p_.expected.push_back({head.name(), vars, matrix.arg(1)});
  }

  Problem p_;
  std::map<Symbol, SourcePos> def_pos_;
};

}  // namespace detail

inline Problem parse_problem(std::string_view text) { return detail::ProblemParser().parse(text); }

inline Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

// Wraps a lemma-shaped formula into a Lemma; the head must be a defined relation.
inline std::optional<Lemma> as_lemma(const Expr& f, const Problem& p) {
  auto [vars, matrix] = split_forall(f);
  if (!matrix.is(Op::Implies)) return std::nullopt;
  const Expr& head = matrix.arg(0);
  if (!(head.is(Op::App) || head.is(Op::Const)) || !p.find_def(head.name())) return std::nullopt;
  if (head.args() != vars) return std::nullopt;
  return Lemma{head.name(), vars, matrix.arg(1)};
}

// ---------------------------------------------------------------------------
// Printer

namespace detail {
inline std::string binder_list(const std::vector<Expr>& vs) {
  std::string out = "(";
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ' ';
    out += "(" + vs[i].name().str() + " " + vs[i].sort().str() + ")";
  }
  return out + ")";
}
inline std::string def_head(Symbol name, const std::vector<Expr>& ps) {
  std::string out = "(" + name.str();
  for (const auto& v : ps) out += " (" + v.name().str() + " " + v.sort().str() + ")";
  return out + ")";
}
inline std::string symbols(const std::vector<Symbol>& xs) {
  std::string out;
  for (auto s : xs) out += " " + s.str();
  return out;
}
}  // namespace detail

inline std::string print_problem(const Problem& p) {
  std::string out;
  if (p.sig.foreground()) out += "(foreground-sort " + p.sig.foreground()->str() + ")\n";
  for (const auto& d : p.sig.decls()) {
    if (d.from_definition) continue;
    switch (d.kind) {
      case SymbolKind::Constant: out += "(const " + d.name.str() + " " + d.result.str() + ")\n"; break;
      case SymbolKind::Function: {
        out += "(func " + d.name.str() + " (";
        for (std::size_t i = 0; i < d.args.size(); ++i) out += (i ? " " : "") + d.args[i].str();
        out += ") " + d.result.str() + ")\n";
        break;
      }
      case SymbolKind::Relation: {
        out += "(pred " + d.name.str() + " (";
        for (std::size_t i = 0; i < d.args.size(); ++i) out += (i ? " " : "") + d.args[i].str();
        out += "))\n";
        break;
      }
    }
  }
  // Definitions in declaration order so that pass-1 ordering is preserved.
  for (const auto& d : p.sig.decls()) {
    if (!d.from_definition) continue;
    if (const RecDef* r = p.find_def(d.name))
      out += "(define-rec " + detail::def_head(r->name, r->params) + "\n  " + r->body.str() + ")\n";
    else if (const RecFunDef* f = p.find_fundef(d.name))
      out += "(define-recfun " + detail::def_head(f->name, f->params) + " " + f->result.str() + "\n  " +
             f->body.str() + ")\n";
  }
  for (const auto& a : p.axioms) out += "(axiom " + a.str() + ")\n";
  if (p.goal) out += "(goal " + p.goal.str() + ")\n";
  if (p.grammar.present) {
    const auto& g = p.grammar;
    out += "(grammar";
    if (!g.heads.empty()) out += "\n  (heads" + detail::symbols(g.heads) + ")";
    out += "\n  (max-size " + std::to_string(g.max_size) + ")";
    out += "\n  (term-depth " + std::to_string(g.term_depth) + ")";
    if (g.constants) out += "\n  (constants" + detail::symbols(*g.constants) + ")";
    if (g.functions) out += "\n  (functions" + detail::symbols(*g.functions) + ")";
    if (g.relations) out += "\n  (relations" + detail::symbols(*g.relations) + ")";
    out += std::string("\n  (int-atoms ") + (g.int_atoms ? "true" : "false") + ")";
    out += std::string("\n  (ground-atoms ") + (g.ground_atoms ? "true" : "false") + ")";
    for (const auto& a : g.atoms) out += "\n  (atom " + detail::binder_list(a.vars) + " " + a.body.str() + ")";
    out += ")\n";
  }
  for (const auto& l : p.expected) out += "(expect-lemma " + l.str() + ")\n";
  return out;
}

}  // namespace lemsynth
