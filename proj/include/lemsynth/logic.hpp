#pragma once

// Sorted FO-RD syntax: interned symbols, sorts and immutable expression trees.
// Terms and formulas share one node type; a formula is an Expr of sort Bool.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace lemsynth {

class SortError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Interned identifier. Copying is an integer copy; ordering is lexicographic
// on the text so that anything sorted by Symbol is reproducible across runs.
class Symbol {
public:
  Symbol() = default;
  explicit Symbol(std::string_view text) : id_(registry().intern(text)) {}

  const std::string& str() const { return registry().text(id_); }
  std::uint32_t id() const { return id_; }
  bool empty() const { return id_ == 0; }

  friend bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }
  friend bool operator!=(Symbol a, Symbol b) { return a.id_ != b.id_; }
  friend bool operator<(Symbol a, Symbol b) { return a.id_ != b.id_ && a.str() < b.str(); }

private:
  struct Registry {
    std::mutex mu;
    std::deque<std::string> texts{""};
    std::unordered_map<std::string, std::uint32_t> ids{{"", 0}};

    std::uint32_t intern(std::string_view text) {
      std::lock_guard<std::mutex> lock(mu);
      auto it = ids.find(std::string(text));
      if (it != ids.end()) return it->second;
      auto id = static_cast<std::uint32_t>(texts.size());
      texts.emplace_back(text);
      ids.emplace(texts.back(), id);
      return id;
    }
    const std::string& text(std::uint32_t id) {
      std::lock_guard<std::mutex> lock(mu);
      return texts[id];
    }
  };
  static Registry& registry() {
    static Registry r;
    return r;
  }

  std::uint32_t id_ = 0;
};

struct SymbolHash {
  std::size_t operator()(Symbol s) const { return std::hash<std::uint32_t>{}(s.id()); }
};

enum class SortKind : std::uint8_t { Bool, Int, SetInt, Foreground };

struct Sort {
  SortKind kind = SortKind::Bool;
  Symbol name;  // only meaningful for the foreground sort

  static Sort boolean() { return {SortKind::Bool, Symbol("Bool")}; }
  static Sort integer() { return {SortKind::Int, Symbol("Int")}; }
  static Sort set_of_int() { return {SortKind::SetInt, Symbol("SetInt")}; }
  static Sort foreground(std::string_view name) { return {SortKind::Foreground, Symbol(name)}; }

  bool is_foreground() const { return kind == SortKind::Foreground; }
  bool is_bool() const { return kind == SortKind::Bool; }
  bool is_int() const { return kind == SortKind::Int; }
  bool is_set() const { return kind == SortKind::SetInt; }
  bool is_background() const { return kind != SortKind::Foreground; }
  const std::string& str() const { return name.str(); }

  friend bool operator==(const Sort& a, const Sort& b) { return a.kind == b.kind && a.name == b.name; }
  friend bool operator!=(const Sort& a, const Sort& b) { return !(a == b); }
  friend bool operator<(const Sort& a, const Sort& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.name < b.name;
  }
};

enum class Op : std::uint8_t {
  Var,
  Const,
  App,
  IntLit,
  BoolLit,
  Add,
  Sub,
  Le,
  Lt,
  Eq,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Ite,
  EmptySet,
  Singleton,
  Union,
  Member,
  Forall,
};

class Expr;

struct Node {
  Op op;
  Sort sort;
  Symbol name;             // Var, Const, App
  std::int64_t value = 0;  // IntLit, BoolLit
  std::vector<Expr> args;
  std::vector<Expr> bound;  // Forall binders (Var nodes)
  std::size_t hash = 0;
};

class Expr {
public:
  Expr() = default;

  static Expr make(Op op, Sort sort, Symbol name, std::int64_t value, std::vector<Expr> args,
                   std::vector<Expr> bound = {});

  explicit operator bool() const { return static_cast<bool>(n_); }
  Op op() const { return n_->op; }
  const Sort& sort() const { return n_->sort; }
  Symbol name() const { return n_->name; }
  std::int64_t value() const { return n_->value; }
  const std::vector<Expr>& args() const { return n_->args; }
  const Expr& arg(std::size_t i) const { return n_->args.at(i); }
  const std::vector<Expr>& bound() const { return n_->bound; }
  std::size_t hash() const { return n_->hash; }
  const Node* node() const { return n_.get(); }

  bool is(Op op) const { return n_ && n_->op == op; }
  bool is_formula() const { return n_->sort.is_bool(); }
  bool is_true() const { return is(Op::BoolLit) && value() != 0; }
  bool is_false() const { return is(Op::BoolLit) && value() == 0; }

  std::string str() const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

private:
  std::shared_ptr<const Node> n_;
};

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

using ExprSet = std::unordered_set<Expr, ExprHash>;
template <class V>
using ExprMap = std::unordered_map<Expr, V, ExprHash>;

namespace detail {
inline std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}
}  // namespace detail

inline Expr Expr::make(Op op, Sort sort, Symbol name, std::int64_t value, std::vector<Expr> args,
                       std::vector<Expr> bound) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->sort = sort;
  n->name = name;
  n->value = value;
  n->args = std::move(args);
  n->bound = std::move(bound);
  std::size_t h = detail::mix(static_cast<std::size_t>(op), name.id());
  h = detail::mix(h, static_cast<std::size_t>(value));
  h = detail::mix(h, static_cast<std::size_t>(sort.kind));
  for (const auto& a : n->args) h = detail::mix(h, a.hash());
  for (const auto& b : n->bound) h = detail::mix(h, b.hash() * 31);
  n->hash = h;
  Expr e;
  e.n_ = std::move(n);
  return e;
}

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.n_ == b.n_) return true;
  if (!a.n_ || !b.n_) return false;
  const Node& x = *a.n_;
  const Node& y = *b.n_;
  if (x.hash != y.hash || x.op != y.op || x.name != y.name || x.value != y.value || x.sort != y.sort)
    return false;
  return x.args == y.args && x.bound == y.bound;
}

// ---------------------------------------------------------------------------
// Construction. Builders check sorts and throw SortError on mismatch.

inline Expr mk_var(std::string_view name, Sort sort) {
  return Expr::make(Op::Var, sort, Symbol(name), 0, {});
}
inline Expr mk_var(Symbol name, Sort sort) { return Expr::make(Op::Var, sort, name, 0, {}); }
inline Expr mk_const(std::string_view name, Sort sort) {
  return Expr::make(Op::Const, sort, Symbol(name), 0, {});
}
inline Expr mk_const(Symbol name, Sort sort) { return Expr::make(Op::Const, sort, name, 0, {}); }
inline Expr mk_app(Symbol fn, Sort result, std::vector<Expr> args) {
  if (args.empty()) return mk_const(fn, result);
  return Expr::make(Op::App, result, fn, 0, std::move(args));
}
inline Expr mk_app(std::string_view fn, Sort result, std::vector<Expr> args) {
  return mk_app(Symbol(fn), result, std::move(args));
}
inline Expr mk_int(std::int64_t v) { return Expr::make(Op::IntLit, Sort::integer(), {}, v, {}); }
inline Expr mk_bool(bool b) { return Expr::make(Op::BoolLit, Sort::boolean(), {}, b ? 1 : 0, {}); }
inline Expr mk_true() { return mk_bool(true); }
inline Expr mk_false() { return mk_bool(false); }

namespace detail {
inline void require(bool ok, const std::string& msg) {
  if (!ok) throw SortError(msg);
}
inline void require_bool(const Expr& e, const char* ctx) {
  require(e.sort().is_bool(), std::string(ctx) + ": expected Bool, got " + e.sort().str() + " in " + e.str());
}
inline void require_int(const Expr& e, const char* ctx) {
  require(e.sort().is_int(), std::string(ctx) + ": expected Int, got " + e.sort().str() + " in " + e.str());
}
inline void require_set(const Expr& e, const char* ctx) {
  require(e.sort().is_set(), std::string(ctx) + ": expected SetInt, got " + e.sort().str() + " in " + e.str());
}
}  // namespace detail

inline Expr mk_add(Expr a, Expr b) {
  detail::require_int(a, "+");
  detail::require_int(b, "+");
  return Expr::make(Op::Add, Sort::integer(), {}, 0, {std::move(a), std::move(b)});
}
inline Expr mk_sub(Expr a, Expr b) {
  detail::require_int(a, "-");
  detail::require_int(b, "-");
  return Expr::make(Op::Sub, Sort::integer(), {}, 0, {std::move(a), std::move(b)});
}
inline Expr mk_le(Expr a, Expr b) {
  detail::require_int(a, "<=");
  detail::require_int(b, "<=");
  return Expr::make(Op::Le, Sort::boolean(), {}, 0, {std::move(a), std::move(b)});
}
inline Expr mk_lt(Expr a, Expr b) {
  detail::require_int(a, "<");
  detail::require_int(b, "<");
  return Expr::make(Op::Lt, Sort::boolean(), {}, 0, {std::move(a), std::move(b)});
}
inline Expr mk_iff(Expr a, Expr b) {
  detail::require_bool(a, "<=>");
  detail::require_bool(b, "<=>");
  return Expr::make(Op::Iff, Sort::boolean(), {}, 0, {std::move(a), std::move(b)});
}
// Equality on Bool arguments is represented as Iff.
inline Expr mk_eq(Expr a, Expr b) {
  detail::require(a.sort() == b.sort(),
                  "=: sort mismatch " + a.sort().str() + " vs " + b.sort().str() + " in (= " + a.str() + " " +
                      b.str() + ")");
  if (a.sort().is_bool()) return mk_iff(std::move(a), std::move(b));
  return Expr::make(Op::Eq, Sort::boolean(), {}, 0, {std::move(a), std::move(b)});
}
inline Expr mk_not(Expr a) {
  detail::require_bool(a, "not");
  return Expr::make(Op::Not, Sort::boolean(), {}, 0, {std::move(a)});
}
inline Expr mk_and(std::vector<Expr> xs) {
  for (const auto& x : xs) detail::require_bool(x, "and");
  if (xs.empty()) return mk_true();
  if (xs.size() == 1) return xs[0];
  return Expr::make(Op::And, Sort::boolean(), {}, 0, std::move(xs));
}
inline Expr mk_and(Expr a, Expr b) { return mk_and(std::vector<Expr>{std::move(a), std::move(b)}); }
inline Expr mk_or(std::vector<Expr> xs) {
  for (const auto& x : xs) detail::require_bool(x, "or");
  if (xs.empty()) return mk_false();
  if (xs.size() == 1) return xs[0];
  return Expr::make(Op::Or, Sort::boolean(), {}, 0, std::move(xs));
}
inline Expr mk_or(Expr a, Expr b) { return mk_or(std::vector<Expr>{std::move(a), std::move(b)}); }
inline Expr mk_implies(Expr a, Expr b) {
  detail::require_bool(a, "=>");
  detail::require_bool(b, "=>");
  return Expr::make(Op::Implies, Sort::boolean(), {}, 0, {std::move(a), std::move(b)});
}
inline Expr mk_ite(Expr c, Expr t, Expr e) {
  detail::require_bool(c, "ite");
  detail::require(t.sort() == e.sort(), "ite: branch sorts differ in (ite " + c.str() + " " + t.str() + " " +
                                            e.str() + ")");
  Sort s = t.sort();
  return Expr::make(Op::Ite, s, {}, 0, {std::move(c), std::move(t), std::move(e)});
}
inline Expr mk_empty_set() { return Expr::make(Op::EmptySet, Sort::set_of_int(), {}, 0, {}); }
inline Expr mk_singleton(Expr i) {
  detail::require_int(i, "singleton");
  return Expr::make(Op::Singleton, Sort::set_of_int(), {}, 0, {std::move(i)});
}
inline Expr mk_union(Expr a, Expr b) {
  detail::require_set(a, "union");
  detail::require_set(b, "union");
  return Expr::make(Op::Union, Sort::set_of_int(), {}, 0, {std::move(a), std::move(b)});
}
inline Expr mk_member(Expr i, Expr s) {
  detail::require_int(i, "member");
  detail::require_set(s, "member");
  return Expr::make(Op::Member, Sort::boolean(), {}, 0, {std::move(i), std::move(s)});
}
inline Expr mk_forall(std::vector<Expr> vars, Expr body) {
  detail::require_bool(body, "forall");
  for (const auto& v : vars) detail::require(v.is(Op::Var), "forall: binder is not a variable");
  if (vars.empty()) return body;
  return Expr::make(Op::Forall, Sort::boolean(), {}, 0, {std::move(body)}, std::move(vars));
}

// Rebuilds a node of the same kind over new children (binders unchanged).
inline Expr rebuild(const Expr& e, std::vector<Expr> args) {
  if (args == e.args()) return e;
  switch (e.op()) {
    case Op::App: return mk_app(e.name(), e.sort(), std::move(args));
    case Op::Add: return mk_add(args[0], args[1]);
    case Op::Sub: return mk_sub(args[0], args[1]);
    case Op::Le: return mk_le(args[0], args[1]);
    case Op::Lt: return mk_lt(args[0], args[1]);
    case Op::Eq: return mk_eq(args[0], args[1]);
    case Op::Not: return mk_not(args[0]);
    case Op::And: return mk_and(std::move(args));
    case Op::Or: return mk_or(std::move(args));
    case Op::Implies: return mk_implies(args[0], args[1]);
    case Op::Iff: return mk_iff(args[0], args[1]);
    case Op::Ite: return mk_ite(args[0], args[1], args[2]);
    case Op::Singleton: return mk_singleton(args[0]);
    case Op::Union: return mk_union(args[0], args[1]);
    case Op::Member: return mk_member(args[0], args[1]);
    case Op::Forall: return mk_forall(e.bound(), args[0]);
    default: return e;
  }
}

// ---------------------------------------------------------------------------
// Printing (problem-file syntax, which is also SMT-LIB-like).

namespace detail {
inline void print_to(const Expr& e, std::string& out) {
  auto list = [&](const char* head) {
    out += '(';
    out += head;
    for (const auto& a : e.args()) {
      out += ' ';
      print_to(a, out);
    }
    out += ')';
  };
  switch (e.op()) {
    case Op::Var:
    case Op::Const: out += e.name().str(); break;
    case Op::App: list(e.name().str().c_str()); break;
    case Op::IntLit: out += std::to_string(e.value()); break;
    case Op::BoolLit: out += e.value() ? "true" : "false"; break;
    case Op::Add: list("+"); break;
    case Op::Sub: list("-"); break;
    case Op::Le: list("<="); break;
    case Op::Lt: list("<"); break;
    case Op::Eq: list("="); break;
    case Op::Not: list("not"); break;
    case Op::And: list("and"); break;
    case Op::Or: list("or"); break;
    case Op::Implies: list("=>"); break;
    case Op::Iff: list("<=>"); break;
    case Op::Ite: list("ite"); break;
    case Op::EmptySet: out += "emptyset"; break;
    case Op::Singleton: list("singleton"); break;
    case Op::Union: list("union"); break;
    case Op::Member: list("member"); break;
    case Op::Forall: {
      out += "(forall (";
      for (std::size_t i = 0; i < e.bound().size(); ++i) {
        if (i) out += ' ';
        out += '(';
        out += e.bound()[i].name().str();
        out += ' ';
        out += e.bound()[i].sort().str();
        out += ')';
      }
      out += ") ";
      print_to(e.arg(0), out);
      out += ')';
      break;
    }
  }
}
}  // namespace detail

inline std::string Expr::str() const {
  if (!n_) return "<null>";
  std::string out;
  detail::print_to(*this, out);
  return out;
}

// ---------------------------------------------------------------------------
// Traversals.

template <class F>
void visit(const Expr& e, F&& f) {
  f(e);
  for (const auto& a : e.args()) visit(a, f);
}

inline bool is_quantifier_free(const Expr& e) {
  if (e.is(Op::Forall)) return false;
  return std::all_of(e.args().begin(), e.args().end(), [](const Expr& a) { return is_quantifier_free(a); });
}

// Free variables in first-occurrence order.
inline std::vector<Expr> free_vars(const Expr& e) {
  std::vector<Expr> out;
  std::vector<Symbol> shadow;
  std::function<void(const Expr&)> go = [&](const Expr& x) {
    if (x.is(Op::Var)) {
      if (std::find(shadow.begin(), shadow.end(), x.name()) != shadow.end()) return;
      if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
      return;
    }
    if (x.is(Op::Forall)) {
      std::size_t mark = shadow.size();
      for (const auto& b : x.bound()) shadow.push_back(b.name());
      go(x.arg(0));
      shadow.resize(mark);
      return;
    }
    for (const auto& a : x.args()) go(a);
  };
  go(e);
  return out;
}

inline bool is_ground(const Expr& e) {
  if (e.is(Op::Var) || e.is(Op::Forall)) return false;
  return std::all_of(e.args().begin(), e.args().end(), [](const Expr& a) { return is_ground(a); });
}

// Maximum nesting of foreground-sorted function applications.
inline int term_depth(const Expr& e) {
  int d = 0;
  for (const auto& a : e.args()) d = std::max(d, term_depth(a));
  if (e.is(Op::App) && e.sort().is_foreground()) ++d;
  return d;
}

// Simultaneous substitution of free variables. Binders shadow.
inline Expr substitute_vars(const Expr& e, const std::unordered_map<Symbol, Expr, SymbolHash>& sub) {
  if (sub.empty()) return e;
  switch (e.op()) {
    case Op::Var: {
      auto it = sub.find(e.name());
      if (it == sub.end()) return e;
      detail::require(it->second.sort() == e.sort(), "substitution changes sort of " + e.str());
      return it->second;
    }
    case Op::Forall: {
      auto inner = sub;
      for (const auto& b : e.bound()) inner.erase(b.name());
      return rebuild(e, {substitute_vars(e.arg(0), inner)});
    }
    default: {
      if (e.args().empty()) return e;
      std::vector<Expr> args;
      args.reserve(e.args().size());
      for (const auto& a : e.args()) args.push_back(substitute_vars(a, sub));
      return rebuild(e, std::move(args));
    }
  }
}

inline Expr substitute_vars(const Expr& e, const std::vector<Expr>& vars, const std::vector<Expr>& values) {
  if (vars.size() != values.size()) throw SortError("substitution arity mismatch");
  std::unordered_map<Symbol, Expr, SymbolHash> sub;
  for (std::size_t i = 0; i < vars.size(); ++i) sub.emplace(vars[i].name(), values[i]);
  return substitute_vars(e, sub);
}

// Replaces every atom R(t1..tk) by replacement(t1..tk). Arguments are
// rewritten first, so nested occurrences inside arguments are also replaced.
inline Expr substitute_relation(const Expr& f, Symbol relation, std::size_t arity,
                                const std::function<Expr(const std::vector<Expr>&)>& replacement) {
  if (f.args().empty()) {
    if (arity == 0 && f.is(Op::Const) && f.name() == relation && f.sort().is_bool()) return replacement({});
    return f;
  }
  std::vector<Expr> args;
  args.reserve(f.args().size());
  for (const auto& a : f.args()) args.push_back(substitute_relation(a, relation, arity, replacement));
  if (f.is(Op::App) && f.name() == relation && f.sort().is_bool()) {
    if (args.size() != arity) throw SortError("substitute: arity mismatch for " + relation.str());
    Expr r = replacement(args);
    detail::require(r.sort().is_bool(), "substitute: replacement is not a formula");
    return r;
  }
  return rebuild(f, std::move(args));
}

// All distinct subterms satisfying pred, in first-occurrence (pre-order) order.
template <class Pred>
std::vector<Expr> collect(const Expr& e, Pred&& pred) {
  std::vector<Expr> out;
  ExprSet seen;
  std::function<void(const Expr&)> go = [&](const Expr& x) {
    if (pred(x) && seen.insert(x).second) out.push_back(x);
    for (const auto& a : x.args()) go(a);
  };
  go(e);
  return out;
}

// Deterministic order used for term sets: (depth, printed form).
inline bool term_order(const Expr& a, const Expr& b) {
  int da = term_depth(a), db = term_depth(b);
  if (da != db) return da < db;
  return a.str() < b.str();
}

// Alpha-equivalence: equal up to consistent renaming of bound variables.
inline bool alpha_equal(const Expr& a, const Expr& b) {
  std::vector<std::pair<Symbol, Symbol>> env;
  std::function<bool(const Expr&, const Expr&)> go = [&](const Expr& x, const Expr& y) -> bool {
    if (x.op() != y.op() || x.sort() != y.sort() || x.value() != y.value()) return false;
    if (x.is(Op::Var)) {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        if (it->first == x.name() || it->second == y.name()) return it->first == x.name() && it->second == y.name();
      }
      return x.name() == y.name();
    }
    if (x.name() != y.name() || x.args().size() != y.args().size()) return false;
    std::size_t mark = env.size();
    if (x.is(Op::Forall)) {
      if (x.bound().size() != y.bound().size()) return false;
      for (std::size_t i = 0; i < x.bound().size(); ++i) {
        if (x.bound()[i].sort() != y.bound()[i].sort()) return false;
        env.emplace_back(x.bound()[i].name(), y.bound()[i].name());
      }
    }
    bool ok = true;
    for (std::size_t i = 0; ok && i < x.args().size(); ++i) ok = go(x.arg(i), y.arg(i));
    env.resize(mark);
    return ok;
  };
  return go(a, b);
}

// Splits a prenex universal formula into binders and matrix.
inline std::pair<std::vector<Expr>, Expr> split_forall(const Expr& f) {
  if (f.is(Op::Forall)) return {f.bound(), f.arg(0)};
  return {{}, f};
}

}  // namespace lemsynth
