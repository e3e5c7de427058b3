#pragma once

// FO reasoning substrate: abstractions of recursive definitions, lowering of
// recursive functions, Skolemization, depth-k ground terms and instantiation.

#include <algorithm>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "lemsynth/logic.hpp"
#include "lemsynth/problem.hpp"

namespace lemsynth {

class SkolemEnv {
public:
  SkolemEnv() = default;
  explicit SkolemEnv(const Signature& sig) {
    for (const auto& d : sig.decls()) reserved_.insert(d.name.str());
  }

  void reserve(const std::string& name) { reserved_.insert(name); }

  Expr fresh(const std::string& hint, Sort sort) {
    std::string base = hint.empty() ? "c" : hint;
    for (;;) {
      std::string name = "sk_" + base + "_" + std::to_string(counter_++);
      if (reserved_.insert(name).second) {
        Expr c = mk_const(name, sort);
        constants_.push_back(c);
        return c;
      }
    }
  }

  // Records a Skolemized formula and its constants.
  void record(const Expr& formula, const std::vector<Expr>& consts) { entries_.push_back({formula, consts}); }

  const std::vector<Expr>& constants() const { return constants_; }
  const std::vector<std::pair<Expr, std::vector<Expr>>>& entries() const { return entries_; }

private:
  std::unordered_set<std::string> reserved_;
  std::vector<Expr> constants_;
  std::vector<std::pair<Expr, std::vector<Expr>>> entries_;
  unsigned counter_ = 0;
};

// ∀x̄. R(x̄) ↔ ρ_R(x̄)
inline Expr fo_abstraction(const RecDef& d) { return mk_forall(d.params, mk_iff(d.head_atom(), d.body)); }

struct LoweredFunction {
  Symbol function;
  RecDef domain;
  std::vector<Expr> axioms;
  Expr bottom;
};

inline Symbol domain_name(Symbol fn) { return Symbol(fn.str() + "_b"); }

inline Expr bottom_of(const Sort& s) {
  if (s.is_int()) return mk_int(-1);
  if (s.is_set()) return mk_const("undefined-set", Sort::set_of_int());
  throw DefinitionError("recursive functions must return Int or SetInt, not " + s.str());
}

namespace detail {

inline bool mentions(const Expr& e, Symbol fn) {
  bool found = false;
  visit(e, [&](const Expr& x) {
    if (x.is(Op::App) && x.name() == fn) found = true;
  });
  return found;
}

inline void check_leaf(const Expr& e, Symbol fn, bool inside_call) {
  if (e.is(Op::App) && e.name() == fn) {
    if (inside_call) throw DefinitionError("nested recursive call in " + fn.str());
    for (const auto& a : e.args()) check_leaf(a, fn, true);
    return;
  }
  switch (e.op()) {
    case Op::Add:
    case Op::Sub:
    case Op::Union:
    case Op::Singleton:
    case Op::App:
    case Op::Var:
    case Op::Const:
    case Op::IntLit:
    case Op::EmptySet:
      for (const auto& a : e.args()) check_leaf(a, fn, inside_call);
      return;
    default:
      if (mentions(e, fn))
        throw DefinitionError("recursive call to " + fn.str() + " under unsupported context in " + e.str());
  }
}

}  // namespace detail

// Lowers f(x̄) := ite-tree into a domain predicate f_b and guarded axioms.
inline LoweredFunction lower_recfun(const RecFunDef& d) {
  LoweredFunction out;
  out.function = d.name;
  out.bottom = bottom_of(d.result);
  Symbol dom = domain_name(d.name);
  Expr head = d.head_term();
  Expr dom_atom = mk_app(dom, Sort::boolean(), d.params);
  bool recursive = detail::mentions(d.body, d.name);

  std::vector<std::pair<std::vector<Expr>, Expr>> paths;  // (conditions, leaf)
  std::function<Expr(const Expr&, std::vector<Expr>&)> walk = [&](const Expr& e, std::vector<Expr>& conds) -> Expr {
    if (e.is(Op::Ite)) {
      if (detail::mentions(e.arg(0), d.name))
        throw DefinitionError("recursive call inside an ite condition of " + d.name.str());
      conds.push_back(e.arg(0));
      Expr t = walk(e.arg(1), conds);
      conds.back() = mk_not(e.arg(0));
      Expr f = walk(e.arg(2), conds);
      conds.pop_back();
      return mk_ite(e.arg(0), t, f);
    }
    detail::check_leaf(e, d.name, false);
    paths.emplace_back(conds, e);
    std::vector<Expr> calls = collect(e, [&](const Expr& x) { return x.is(Op::App) && x.name() == d.name; });
    std::vector<Expr> guards;
    for (const auto& c : calls) guards.push_back(mk_app(dom, Sort::boolean(), c.args()));
    return mk_and(std::move(guards));
  };
  std::vector<Expr> conds;
  Expr dom_body = walk(d.body, conds);
  out.domain = RecDef{dom, d.params, dom_body};

  for (const auto& [cs, leaf] : paths) {
    Expr eq = mk_eq(head, leaf);
    Expr value = cs.empty() ? eq : mk_implies(mk_and(cs), eq);
    out.axioms.push_back(mk_forall(d.params, recursive ? mk_implies(dom_atom, value) : value));
  }
  if (recursive) out.axioms.push_back(mk_forall(d.params, mk_implies(mk_not(dom_atom), mk_eq(head, out.bottom))));
  return out;
}

// The FO view of a problem: definitions (including lowered domain
// predicates), their abstractions, and the function axioms.
struct Theory {
  Problem problem;
  std::vector<RecDef> defs;
  std::vector<LoweredFunction> lowered;
  std::vector<Expr> abstractions;
  std::vector<Expr> function_axioms;
  std::vector<Expr> background_axioms;

  const RecDef* find_def(Symbol name) const {
    for (const auto& d : defs)
      if (d.name == name) return &d;
    return nullptr;
  }
  bool is_recursive_relation(Symbol name) const { return find_def(name) != nullptr; }
  bool is_recursive_function(Symbol name) const { return problem.find_fundef(name) != nullptr; }

  // Axioms together with every abstraction and function axiom.
  std::vector<Expr> base_formulas() const {
    std::vector<Expr> out = problem.axioms;
    out.insert(out.end(), abstractions.begin(), abstractions.end());
    out.insert(out.end(), function_axioms.begin(), function_axioms.end());
    out.insert(out.end(), background_axioms.begin(), background_axioms.end());
    return out;
  }
};

inline Theory make_theory(const Problem& p) {
  Theory t;
  t.problem = p;
  t.defs = p.defs;
  bool set_bottom = false;
  for (const auto& f : p.fundefs) {
    if (p.sig.contains(domain_name(f.name)))
      throw DefinitionError("domain predicate name " + domain_name(f.name).str() + " clashes with a declaration");
    auto low = lower_recfun(f);
    if (f.result.is_set()) set_bottom = true;
    t.defs.push_back(low.domain);
    t.function_axioms.insert(t.function_axioms.end(), low.axioms.begin(), low.axioms.end());
    t.lowered.push_back(std::move(low));
  }
  for (const auto& d : t.defs) t.abstractions.push_back(fo_abstraction(d));
  if (set_bottom) t.background_axioms.push_back(mk_not(mk_eq(bottom_of(Sort::set_of_int()), mk_empty_set())));
  return t;
}

// (quantifier-free matrix of ¬f, fresh constants)
inline std::pair<Expr, std::vector<Expr>> skolemize(const Expr& f, SkolemEnv& env) {
  auto [vars, matrix] = split_forall(f);
  std::vector<Expr> consts;
  for (const auto& v : vars) consts.push_back(env.fresh(v.name().str(), v.sort()));
  Expr neg = mk_not(substitute_vars(matrix, vars, consts));
  if (!is_quantifier_free(neg)) throw SortError("skolemize: formula is not in universal prenex form: " + f.str());
  env.record(f, consts);
  return {neg, consts};
}

struct GroundTermSet {
  int k = 0;
  std::vector<Expr> terms;  // foreground terms, ordered by (depth, printed form)
  std::vector<std::string> warnings;

  bool contains(const Expr& t) const { return std::find(terms.begin(), terms.end(), t) != terms.end(); }
};

struct GroundTermOptions {
  // Seed T_0 with every ground foreground subterm of the formulas.
  bool seed_subterms = false;
};

// T_0: foreground constants in the formulas (and Skolem constants of env);
// T_j: T_{j-1} plus f(t̄) for every all-foreground function f in the formulas.
inline GroundTermSet ground_terms(const std::vector<Expr>& formulas, const SkolemEnv& env, int k,
                                  GroundTermOptions opts = {}) {
  GroundTermSet out;
  out.k = k;
  ExprSet seen;
  std::vector<Expr> level;
  auto add = [&](const Expr& t, std::vector<Expr>& into) {
    if (seen.insert(t).second) into.push_back(t);
  };
  std::vector<std::pair<Symbol, std::size_t>> funcs;
  Sort fg;
  bool have_fg = false;
  for (const auto& f : formulas) {
    visit(f, [&](const Expr& x) {
      if (!x.sort().is_foreground()) return;
      if (!have_fg) {
        fg = x.sort();
        have_fg = true;
      }
      if (x.is(Op::Const)) add(x, level);
      if (x.is(Op::App)) {
        bool all_fg = std::all_of(x.args().begin(), x.args().end(), [](const Expr& a) { return a.sort().is_foreground(); });
        std::pair<Symbol, std::size_t> key{x.name(), x.args().size()};
        if (all_fg && std::find(funcs.begin(), funcs.end(), key) == funcs.end()) funcs.push_back(key);
        if (opts.seed_subterms && is_ground(x)) add(x, level);
      }
    });
  }
  for (const auto& c : env.constants())
    if (c.sort().is_foreground()) add(c, level);
  if (opts.seed_subterms) {
    // keep T_0 closed downward
    std::vector<Expr> extra;
    for (const auto& t : level)
      visit(t, [&](const Expr& x) {
        if (x.sort().is_foreground() && is_ground(x)) add(x, extra);
      });
    level.insert(level.end(), extra.begin(), extra.end());
  }
  std::sort(funcs.begin(), funcs.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  });
  std::vector<Expr> all = level;
  std::vector<Expr> prev = level;
  for (int j = 1; j <= k; ++j) {
    std::vector<Expr> next;
    for (const auto& [f, arity] : funcs) {
      std::vector<std::vector<Expr>> choices(arity, all);
      std::vector<std::size_t> idx(arity, 0);
      if (all.empty()) break;
      for (;;) {
        std::vector<Expr> args;
        bool fresh_arg = false;
        for (std::size_t i = 0; i < arity; ++i) {
          args.push_back(all[idx[i]]);
          if (std::find(prev.begin(), prev.end(), all[idx[i]]) != prev.end()) fresh_arg = true;
        }
        if (fresh_arg) add(mk_app(f, have_fg ? fg : all[0].sort(), args), next);
        std::size_t p = arity;
        bool done = true;
        while (p > 0) {
          --p;
          if (++idx[p] < all.size()) {
            done = false;
            break;
          }
          idx[p] = 0;
        }
        if (done) break;
      }
    }
    all.insert(all.end(), next.begin(), next.end());
    prev = std::move(next);
  }
  std::sort(all.begin(), all.end(), term_order);
  out.terms = std::move(all);
  if (out.terms.empty()) out.warnings.push_back("no foreground ground terms; quantified formulas get no instances");
  return out;
}

// Instantiation pools for background-sorted quantified variables.
struct BackgroundTerms {
  std::vector<Expr> ints;
  std::vector<Expr> sets;
};

inline BackgroundTerms background_terms(const std::vector<Expr>& formulas, const SkolemEnv& env) {
  BackgroundTerms out;
  ExprSet seen;
  auto consider = [&](const Expr& x) {
    if (!is_ground(x)) return;
    if (x.sort().is_int() && seen.insert(x).second) out.ints.push_back(x);
    if (x.sort().is_set() && seen.insert(x).second) out.sets.push_back(x);
  };
  for (const auto& f : formulas) visit(f, consider);
  for (const auto& c : env.constants()) consider(c);
  std::sort(out.ints.begin(), out.ints.end(), term_order);
  std::sort(out.sets.begin(), out.sets.end(), term_order);
  return out;
}

// Φ[T]: every universal formula instantiated with all tuples from T (and the
// background pools); quantifier-free formulas pass through.
inline std::vector<Expr> instantiate(const std::vector<Expr>& formulas, const GroundTermSet& T,
                                     const BackgroundTerms& bg = {}) {
  std::vector<Expr> out;
  ExprSet seen;
  auto emit = [&](Expr e) {
    if (seen.insert(e).second) out.push_back(std::move(e));
  };
  for (const auto& f : formulas) {
    auto [vars, matrix] = split_forall(f);
    if (!is_quantifier_free(matrix))
      throw SortError("instantiate: not a universal formula with quantifier-free matrix: " + f.str());
    if (vars.empty()) {
      emit(f);
      continue;
    }
    std::vector<const std::vector<Expr>*> pools;
    static const std::vector<Expr> bools{mk_false(), mk_true()};
    bool empty = false;
    for (const auto& v : vars) {
      const std::vector<Expr>* pool = nullptr;
      switch (v.sort().kind) {
        case SortKind::Foreground: pool = &T.terms; break;
        case SortKind::Int: pool = &bg.ints; break;
        case SortKind::SetInt: pool = &bg.sets; break;
        case SortKind::Bool: pool = &bools; break;
      }
      if (pool->empty()) empty = true;
      pools.push_back(pool);
    }
    if (empty) continue;
    std::vector<std::size_t> idx(vars.size(), 0);
    std::vector<Expr> vals(vars.size());
    for (;;) {
      for (std::size_t i = 0; i < vars.size(); ++i) vals[i] = (*pools[i])[idx[i]];
      emit(substitute_vars(matrix, vars, vals));
      std::size_t p = vars.size();
      bool done = true;
      while (p > 0) {
        --p;
        if (++idx[p] < pools[p]->size()) {
          done = false;
          break;
        }
        idx[p] = 0;
      }
      if (done) break;
    }
  }
  return out;
}

}  // namespace lemsynth
