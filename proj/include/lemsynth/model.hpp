#pragma once

// Finite, possibly partial models and strong-Kleene evaluation over them.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lemsynth/logic.hpp"

namespace lemsynth {

enum class Truth : std::uint8_t { False, True, Unknown };

inline Truth truth_not(Truth t) {
  if (t == Truth::Unknown) return t;
  return t == Truth::True ? Truth::False : Truth::True;
}
inline const char* truth_name(Truth t) {
  switch (t) {
    case Truth::True: return "true";
    case Truth::False: return "false";
    default: return "unknown";
  }
}

// Knowledge about a finite set of integers. A complete set lists exactly its
// members; an incomplete one only knows the recorded bits. `cls` identifies
// solver-reported equality classes within one extracted model.
struct SetValue {
  std::map<std::int64_t, bool> bits;
  bool complete = false;
  std::int64_t cls = -1;

  std::optional<bool> contains(std::int64_t i) const {
    auto it = bits.find(i);
    if (it != bits.end()) return it->second;
    if (complete) return false;
    return std::nullopt;
  }
  std::vector<std::int64_t> members() const {
    std::vector<std::int64_t> out;
    for (auto [k, v] : bits)
      if (v) out.push_back(k);
    return out;
  }
};

struct Value {
  enum class Kind : std::uint8_t { Undef, Bool, Int, Elem, Set };
  Kind kind = Kind::Undef;
  std::int64_t i = 0;
  std::shared_ptr<const SetValue> set;

  static Value undef() { return {}; }
  static Value boolean(bool b) { return {Kind::Bool, b ? 1 : 0, nullptr}; }
  static Value integer(std::int64_t v) { return {Kind::Int, v, nullptr}; }
  static Value elem(std::int64_t id) { return {Kind::Elem, id, nullptr}; }
  static Value of_set(SetValue s) { return {Kind::Set, 0, std::make_shared<const SetValue>(std::move(s))}; }
  static Value finite_set(const std::vector<std::int64_t>& xs) {
    SetValue s;
    s.complete = true;
    for (auto x : xs) s.bits[x] = true;
    return of_set(std::move(s));
  }

  bool defined() const { return kind != Kind::Undef; }
  bool is_true() const { return kind == Kind::Bool && i != 0; }
  bool is_false() const { return kind == Kind::Bool && i == 0; }

  std::string str() const {
    switch (kind) {
      case Kind::Undef: return "undef";
      case Kind::Bool: return i ? "true" : "false";
      case Kind::Int: return std::to_string(i);
      case Kind::Elem: return "e" + std::to_string(i);
      case Kind::Set: {
        std::string out = "{";
        bool first = true;
        for (auto [k, v] : set->bits) {
          if (!v) continue;
          if (!first) out += ",";
          first = false;
          out += k == std::numeric_limits<std::int64_t>::min() ? std::string("bot") : std::to_string(k);
        }
        if (!set->complete) out += first ? "?" : ",?";
        return out + "}";
      }
    }
    return "?";
  }

  // Identity of recorded values (not semantic equality).
  friend bool operator==(const Value& a, const Value& b) {
    if (a.kind != b.kind) return false;
    if (a.kind != Kind::Set) return a.i == b.i;
    return a.set->complete == b.set->complete && a.set->cls == b.set->cls && a.set->bits == b.set->bits;
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
};

inline Value truth_value(Truth t) {
  if (t == Truth::Unknown) return Value::undef();
  return Value::boolean(t == Truth::True);
}
inline Truth to_truth(const Value& v) {
  if (v.kind != Value::Kind::Bool) return Truth::Unknown;
  return v.i ? Truth::True : Truth::False;
}

// The value used for set-valued recursive functions off their domain: a set
// holding a sentinel that no integer universe contains.
inline Value bottom_set() { return Value::finite_set({std::numeric_limits<std::int64_t>::min()}); }

// Argument tuple of a table entry. Arity is bounded by 4.
struct Key {
  std::uint8_t n = 0;
  std::array<std::int64_t, 4> v{};

  static constexpr std::size_t max_arity = 4;

  friend bool operator==(const Key& a, const Key& b) {
    if (a.n != b.n) return false;
    for (std::uint8_t i = 0; i < a.n; ++i)
      if (a.v[i] != b.v[i]) return false;
    return true;
  }
};
struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::size_t h = k.n;
    for (std::uint8_t i = 0; i < k.n; ++i) h = detail::mix(h, static_cast<std::size_t>(k.v[i]));
    return h;
  }
};

inline std::optional<Key> make_key(const std::vector<Value>& args) {
  if (args.size() > Key::max_arity) return std::nullopt;
  Key k;
  k.n = static_cast<std::uint8_t>(args.size());
  for (std::size_t j = 0; j < args.size(); ++j) {
    const Value& a = args[j];
    if (!a.defined() || a.kind == Value::Kind::Set) return std::nullopt;
    k.v[j] = a.i;
  }
  return k;
}

struct Interp {
  std::vector<Sort> args;
  Sort result;
  std::unordered_map<Key, Value, KeyHash> table;
};

class FiniteModel {
public:
  Sort fg = Sort::foreground("U");
  std::int64_t num_elems = 0;
  std::vector<std::string> elem_names;  // representative term per element
  std::vector<std::int64_t> ints;       // integer universe, sorted
  std::unordered_map<Symbol, Interp, SymbolHash> interp;
  bool closed_world = false;  // missing relation points are false rather than unknown
  ExprMap<Value> term_values;  // ground term values of extracted models
  std::vector<std::int64_t> uk;       // elements denoted by instantiation terms
  std::vector<std::int64_t> uk_ints;  // integer values denoted by instantiation terms

  Interp& declare(Symbol name, std::vector<Sort> args, Sort result) {
    auto& it = interp[name];
    it.args = std::move(args);
    it.result = result;
    return it;
  }
  void set(Symbol name, const Key& k, Value v) { interp.at(name).table[k] = std::move(v); }
  void set_const(Symbol name, Sort s, Value v) {
    auto it = interp.find(name);
    if (it == interp.end()) declare(name, {}, s);
    interp[name].table[Key{}] = std::move(v);
  }

  Value lookup(Symbol name, const Key& k) const {
    auto it = interp.find(name);
    if (it != interp.end()) {
      auto jt = it->second.table.find(k);
      if (jt != it->second.table.end()) return jt->second;
      if (closed_world && it->second.result.is_bool()) return Value::boolean(false);
      return Value::undef();
    }
    return Value::undef();
  }

  // Universe of a sort as values (Set-sorted universes are not enumerable).
  std::vector<Value> universe(const Sort& s) const {
    std::vector<Value> out;
    switch (s.kind) {
      case SortKind::Foreground:
        for (std::int64_t e = 0; e < num_elems; ++e) out.push_back(Value::elem(e));
        break;
      case SortKind::Int:
        for (auto i : ints) out.push_back(Value::integer(i));
        break;
      case SortKind::Bool:
        out.push_back(Value::boolean(false));
        out.push_back(Value::boolean(true));
        break;
      case SortKind::SetInt: break;
    }
    return out;
  }

  std::string elem_name(std::int64_t e) const {
    if (e >= 0 && static_cast<std::size_t>(e) < elem_names.size() && !elem_names[e].empty()) return elem_names[e];
    return "e" + std::to_string(e);
  }
};

// Variable assignment: a small stack of bindings, innermost last.
class Env {
public:
  void push(Symbol s, Value v) { b_.emplace_back(s, std::move(v)); }
  void pop(std::size_t n = 1) { b_.resize(b_.size() - n); }
  std::size_t size() const { return b_.size(); }
  const Value* find(Symbol s) const {
    for (auto it = b_.rbegin(); it != b_.rend(); ++it)
      if (it->first == s) return &it->second;
    return nullptr;
  }

private:
  std::vector<std::pair<Symbol, Value>> b_;
};

using ConstOverrides = std::unordered_map<Symbol, Value, SymbolHash>;

namespace detail {

inline Value set_union(const SetValue& a, const SetValue& b) {
  SetValue r;
  r.complete = a.complete && b.complete;
  for (const auto* s : {&a, &b})
    for (auto [k, v] : s->bits) {
      if (r.bits.count(k)) continue;
      auto x = a.contains(k), y = b.contains(k);
      if ((x && *x) || (y && *y)) r.bits[k] = true;
      else if (x && y) r.bits[k] = false;
    }
  if (r.complete) {
    for (auto it = r.bits.begin(); it != r.bits.end();) {
      if (!it->second) it = r.bits.erase(it);
      else ++it;
    }
  }
  return Value::of_set(std::move(r));
}

inline Truth set_equal(const SetValue& a, const SetValue& b) {
  if (a.cls >= 0 && b.cls >= 0) return a.cls == b.cls ? Truth::True : Truth::False;
  bool all_known = true;
  for (const auto* s : {&a, &b})
    for (auto [k, v] : s->bits) {
      (void)v;
      auto x = a.contains(k), y = b.contains(k);
      if (x && y) {
        if (*x != *y) return Truth::False;
      } else {
        all_known = false;
      }
    }
  if (a.complete && b.complete && all_known) return Truth::True;
  return Truth::Unknown;
}

inline Truth values_equal(const Value& a, const Value& b) {
  if (!a.defined() || !b.defined()) return Truth::Unknown;
  if (a.kind == Value::Kind::Set && b.kind == Value::Kind::Set) return set_equal(*a.set, *b.set);
  if (a.kind != b.kind) return Truth::Unknown;
  return a.i == b.i ? Truth::True : Truth::False;
}

}  // namespace detail

class Evaluator {
public:
  explicit Evaluator(const FiniteModel& m, const ConstOverrides* consts = nullptr) : m_(m), consts_(consts) {}

  Value eval(const Expr& e, Env& env) const {
    switch (e.op()) {
      case Op::Var: {
        const Value* v = env.find(e.name());
        return v ? *v : Value::undef();
      }
      case Op::Const: {
        if (consts_) {
          auto it = consts_->find(e.name());
          if (it != consts_->end()) return it->second;
        }
        return m_.lookup(e.name(), Key{});
      }
      case Op::App: {
        std::vector<Value> args;
        args.reserve(e.args().size());
        for (const auto& a : e.args()) {
          args.push_back(eval(a, env));
          if (!args.back().defined()) return Value::undef();
        }
        auto k = make_key(args);
        if (!k) return Value::undef();
        return m_.lookup(e.name(), *k);
      }
      case Op::IntLit: return Value::integer(e.value());
      case Op::BoolLit: return Value::boolean(e.value() != 0);
      case Op::Add:
      case Op::Sub: {
        Value a = eval(e.arg(0), env), b = eval(e.arg(1), env);
        if (a.kind != Value::Kind::Int || b.kind != Value::Kind::Int) return Value::undef();
        return Value::integer(e.is(Op::Add) ? a.i + b.i : a.i - b.i);
      }
      case Op::Le:
      case Op::Lt: {
        Value a = eval(e.arg(0), env), b = eval(e.arg(1), env);
        if (a.kind != Value::Kind::Int || b.kind != Value::Kind::Int) return Value::undef();
        return Value::boolean(e.is(Op::Le) ? a.i <= b.i : a.i < b.i);
      }
      case Op::Eq: return truth_value(detail::values_equal(eval(e.arg(0), env), eval(e.arg(1), env)));
      case Op::Not: return truth_value(truth_not(truth(e.arg(0), env)));
      case Op::And: {
        bool unknown = false;
        for (const auto& a : e.args()) {
          Truth t = truth(a, env);
          if (t == Truth::False) return Value::boolean(false);
          if (t == Truth::Unknown) unknown = true;
        }
        return unknown ? Value::undef() : Value::boolean(true);
      }
      case Op::Or: {
        bool unknown = false;
        for (const auto& a : e.args()) {
          Truth t = truth(a, env);
          if (t == Truth::True) return Value::boolean(true);
          if (t == Truth::Unknown) unknown = true;
        }
        return unknown ? Value::undef() : Value::boolean(false);
      }
      case Op::Implies: {
        Truth a = truth(e.arg(0), env);
        if (a == Truth::False) return Value::boolean(true);
        Truth b = truth(e.arg(1), env);
        if (b == Truth::True) return Value::boolean(true);
        if (a == Truth::True && b == Truth::False) return Value::boolean(false);
        return Value::undef();
      }
      case Op::Iff: {
        Truth a = truth(e.arg(0), env), b = truth(e.arg(1), env);
        if (a == Truth::Unknown || b == Truth::Unknown) return Value::undef();
        return Value::boolean(a == b);
      }
      case Op::Ite: {
        Truth c = truth(e.arg(0), env);
        if (c == Truth::True) return eval(e.arg(1), env);
        if (c == Truth::False) return eval(e.arg(2), env);
        Value t = eval(e.arg(1), env), f = eval(e.arg(2), env);
        if (t.defined() && f.defined() && detail::values_equal(t, f) == Truth::True) return t;
        return Value::undef();
      }
      case Op::EmptySet: return Value::finite_set({});
      case Op::Singleton: {
        Value a = eval(e.arg(0), env);
        if (a.kind != Value::Kind::Int) return Value::undef();
        return Value::finite_set({a.i});
      }
      case Op::Union: {
        Value a = eval(e.arg(0), env), b = eval(e.arg(1), env);
        if (a.kind != Value::Kind::Set || b.kind != Value::Kind::Set) return Value::undef();
        return detail::set_union(*a.set, *b.set);
      }
      case Op::Member: {
        Value a = eval(e.arg(0), env), s = eval(e.arg(1), env);
        if (a.kind != Value::Kind::Int || s.kind != Value::Kind::Set) return Value::undef();
        auto c = s.set->contains(a.i);
        return c ? Value::boolean(*c) : Value::undef();
      }
      case Op::Forall: return truth_value(forall(e, 0, env));
    }
    return Value::undef();
  }

  Truth truth(const Expr& e, Env& env) const { return to_truth(eval(e, env)); }

  Truth truth(const Expr& e) const {
    Env env;
    return truth(e, env);
  }

  // Evaluates f with vars bound to the given tuple.
  Truth truth_at(const Expr& f, const std::vector<Expr>& vars, const std::vector<Value>& tuple) const {
    Env env;
    for (std::size_t i = 0; i < vars.size(); ++i) env.push(vars[i].name(), tuple[i]);
    return truth(f, env);
  }

private:
  Truth forall(const Expr& e, std::size_t idx, Env& env) const {
    if (idx == e.bound().size()) return truth(e.arg(0), env);
    const Expr& v = e.bound()[idx];
    if (v.sort().is_set()) return Truth::Unknown;
    bool unknown = false;
    for (const auto& val : m_.universe(v.sort())) {
      env.push(v.name(), val);
      Truth t = forall(e, idx + 1, env);
      env.pop();
      if (t == Truth::False) return Truth::False;
      if (t == Truth::Unknown) unknown = true;
    }
    return unknown ? Truth::Unknown : Truth::True;
  }

  const FiniteModel& m_;
  const ConstOverrides* consts_;
};

inline Truth eval_formula(const FiniteModel& m, const Expr& f, Env& env) { return Evaluator(m).truth(f, env); }
inline Truth eval_formula(const FiniteModel& m, const Expr& f) { return Evaluator(m).truth(f); }

// Calls fn(tuple) for every tuple over the given per-position domains; stops
// early when fn returns false. Returns false iff stopped early.
template <class F>
bool for_each_tuple(const std::vector<std::vector<Value>>& domains, F&& fn) {
  for (const auto& d : domains)
    if (d.empty()) return true;
  std::vector<std::size_t> idx(domains.size(), 0);
  std::vector<Value> tuple(domains.size());
  for (;;) {
    for (std::size_t i = 0; i < domains.size(); ++i) tuple[i] = domains[i][idx[i]];
    if (!fn(const_cast<const std::vector<Value>&>(tuple))) return false;
    std::size_t j = domains.size();
    for (;;) {
      if (j == 0) return true;
      --j;
      if (++idx[j] < domains[j].size()) break;
      idx[j] = 0;
    }
  }
}

inline std::size_t tuple_count(const std::vector<std::vector<Value>>& domains) {
  std::size_t n = 1;
  for (const auto& d : domains) n *= d.size();
  return n;
}

}  // namespace lemsynth
