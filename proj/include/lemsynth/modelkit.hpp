#pragma once

// Least-fixpoint evaluation, random true models and the universal model.

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lemsynth/model.hpp"
#include "lemsynth/natproofs.hpp"

namespace lemsynth {

namespace detail {

inline std::vector<std::vector<Value>> domains_for(const FiniteModel& m, const std::vector<Expr>& params) {
  std::vector<std::vector<Value>> out;
  for (const auto& p : params) out.push_back(m.universe(p.sort()));
  return out;
}

inline Value bottom_value(const Sort& s) {
  if (s.is_int()) return Value::integer(-1);
  if (s.is_set()) return bottom_set();
  if (s.is_bool()) return Value::boolean(false);
  return Value::undef();
}

}  // namespace detail

struct LfpStats {
  int rounds = 0;
};

// Recomputes every recursive relation and function of `t` on the universe of
// `base` as the least fixpoint (relations from ∅, functions from undefined;
// points still undefined at the end become ⊥).
inline FiniteModel lfp_eval(const FiniteModel& base, const Theory& t, LfpStats* stats = nullptr) {
  FiniteModel m = base;
  m.closed_world = true;
  const auto& fundefs = t.problem.fundefs;
  for (const auto& d : t.defs) {
    std::vector<Sort> args;
    for (const auto& p : d.params) args.push_back(p.sort());
    m.declare(d.name, args, Sort::boolean()).table.clear();
  }
  for (const auto& f : fundefs) {
    std::vector<Sort> args;
    for (const auto& p : f.params) args.push_back(p.sort());
    m.declare(f.name, args, f.result).table.clear();
  }
  bool has_set_fun = std::any_of(fundefs.begin(), fundefs.end(), [](const RecFunDef& f) { return f.result.is_set(); });
  if (has_set_fun) m.set_const(Symbol("undefined-set"), Sort::set_of_int(), bottom_set());

  Evaluator ev(m);
  int rounds = 0;
  for (bool changed = true; changed;) {
    changed = false;
    ++rounds;
    std::vector<std::tuple<Symbol, Key, Value>> updates;
    for (const auto& d : t.defs) {
      for_each_tuple(detail::domains_for(m, d.params), [&](const std::vector<Value>& tup) {
        if (ev.truth_at(d.body, d.params, tup) == Truth::True) {
          Key k = *make_key(tup);
          if (m.lookup(d.name, k).is_false()) updates.emplace_back(d.name, k, Value::boolean(true));
        }
        return true;
      });
    }
    for (const auto& f : fundefs) {
      for_each_tuple(detail::domains_for(m, f.params), [&](const std::vector<Value>& tup) {
        Key k = *make_key(tup);
        if (m.lookup(f.name, k).defined()) return true;
        Env env;
        for (std::size_t i = 0; i < tup.size(); ++i) env.push(f.params[i].name(), tup[i]);
        Value v = ev.eval(f.body, env);
        if (v.defined()) updates.emplace_back(f.name, k, v);
        return true;
      });
    }
    for (auto& [s, k, v] : updates) {
      m.set(s, k, std::move(v));
      changed = true;
    }
  }
  for (const auto& f : fundefs) {
    Value bot = detail::bottom_value(f.result);
    for_each_tuple(detail::domains_for(m, f.params), [&](const std::vector<Value>& tup) {
      Key k = *make_key(tup);
      if (!m.lookup(f.name, k).defined()) m.set(f.name, k, bot);
      return true;
    });
  }
  // Domain predicates are ordinary relations above; recursive relations keep
  // only their true points, missing points read as false.
  if (stats) stats->rounds = rounds;
  return m;
}

struct TrueModelOptions {
  int count = 0;
  int max_size = 3;
  std::uint64_t seed = 1;
  std::int64_t int_lo = -2;
  std::int64_t int_hi = 8;
  int max_rejections = 2000;  // per model
};

struct TrueModelBatch {
  std::vector<FiniteModel> models;
  int requested = 0;
  int rejected = 0;
};

// Random finite models: non-recursive symbols sampled uniformly, recursive
// symbols by lfp_eval; models violating an axiom or a known lemma are resampled.
inline TrueModelBatch gen_true_models(const Theory& t, const TrueModelOptions& opt,
                                      const std::vector<Expr>& lemmas = {}) {
  TrueModelBatch out;
  out.requested = opt.count;
  if (opt.count <= 0) return out;
  if (opt.max_size < 1) throw std::invalid_argument("model size bound must be at least 1");
  std::mt19937_64 rng(opt.seed);
  auto uniform = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  const Problem& p = t.problem;
  Sort fg = p.fg();
  for (int made = 0; made < opt.count; ++made) {
    bool ok = false;
    for (int attempt = 0; attempt <= opt.max_rejections && !ok; ++attempt) {
      FiniteModel m;
      m.fg = fg;
      m.num_elems = uniform(1, opt.max_size);
      for (std::int64_t e = 0; e < m.num_elems; ++e) m.elem_names.push_back("e" + std::to_string(e));
      for (auto i = opt.int_lo; i <= opt.int_hi; ++i) m.ints.push_back(i);
      auto sample = [&](const Sort& s) -> Value {
        switch (s.kind) {
          case SortKind::Foreground: return Value::elem(uniform(0, m.num_elems - 1));
          case SortKind::Int: return Value::integer(uniform(opt.int_lo, opt.int_hi));
          case SortKind::Bool: return Value::boolean(uniform(0, 1) == 1);
          case SortKind::SetInt: {
            std::vector<std::int64_t> xs;
            for (auto i = opt.int_lo; i <= opt.int_hi; ++i)
              if (uniform(0, 3) == 0) xs.push_back(i);
            return Value::finite_set(xs);
          }
        }
        return Value::undef();
      };
      for (const auto& d : p.sig.decls()) {
        if (d.from_definition) continue;
        m.declare(d.name, d.args, d.result);
        std::vector<std::vector<Value>> doms;
        for (const auto& a : d.args) doms.push_back(m.universe(a));
        for_each_tuple(doms, [&](const std::vector<Value>& tup) {
          m.set(d.name, *make_key(tup), sample(d.result));
          return true;
        });
      }
      m = lfp_eval(m, t);
      for (auto e = 0; e < m.num_elems; ++e) m.uk.push_back(e);
      Evaluator ev(m);
      ok = std::all_of(p.axioms.begin(), p.axioms.end(), [&](const Expr& a) { return ev.truth(a) == Truth::True; }) &&
           std::all_of(lemmas.begin(), lemmas.end(), [&](const Expr& l) { return ev.truth(l) == Truth::True; });
      if (ok) out.models.push_back(std::move(m));
      else ++out.rejected;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Universal model

struct UniversalModel {
  FiniteModel model;
  std::vector<std::int64_t> offsets;
  std::vector<int> member_of;  // per element, -1 for ⊥
  std::int64_t bottom_elem = -1;
  std::int64_t bottom_int = -1;
  std::vector<ConstOverrides> member_consts;
  ConstOverrides bottom_consts;
  std::vector<std::vector<std::int64_t>> member_ints;

  // Member containing every foreground element of the tuple (-1 if mixed,
  // touching ⊥, or without foreground elements).
  int member_of_tuple(const std::vector<Value>& tup) const {
    int m = -2;
    for (const auto& v : tup) {
      if (v.kind != Value::Kind::Elem) continue;
      int x = member_of.at(static_cast<std::size_t>(v.i));
      if (x < 0) return -1;
      if (m == -2) m = x;
      else if (m != x) return -1;
    }
    return m < 0 ? -1 : m;
  }

  Truth eval_at(const Expr& f, const std::vector<Expr>& vars, const std::vector<Value>& tup) const {
    int mi = member_of_tuple(tup);
    const ConstOverrides& c = mi >= 0 ? member_consts[static_cast<std::size_t>(mi)] : bottom_consts;
    return Evaluator(model, &c).truth_at(f, vars, tup);
  }

  Value bottom(const Sort& s) const {
    switch (s.kind) {
      case SortKind::Foreground: return Value::elem(bottom_elem);
      case SortKind::Int: return Value::integer(bottom_int);
      case SortKind::Bool: return Value::boolean(false);
      case SortKind::SetInt: return bottom_set();
    }
    return Value::undef();
  }
};

inline UniversalModel build_universal_model(const std::vector<FiniteModel>& members) {
  if (members.empty()) throw std::invalid_argument("universal model needs at least one member");
  UniversalModel u;
  FiniteModel& m = u.model;
  m.fg = members[0].fg;
  std::int64_t next = 0;
  std::set<std::int64_t> ints;
  std::int64_t lowest = 0;
  std::map<Symbol, std::pair<std::vector<Sort>, Sort>> symbols;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& mi = members[i];
    for (const auto& [sym, it] : mi.interp) {
      auto jt = symbols.find(sym);
      if (jt == symbols.end()) symbols.emplace(sym, std::make_pair(it.args, it.result));
      else if (jt->second.first != it.args || jt->second.second != it.result)
        throw std::invalid_argument("universal model: member signatures differ at " + sym.str());
    }
    u.offsets.push_back(next);
    for (std::int64_t e = 0; e < mi.num_elems; ++e) {
      u.member_of.push_back(static_cast<int>(i));
      m.elem_names.push_back("m" + std::to_string(i) + "." + mi.elem_name(e));
    }
    next += mi.num_elems;
    std::vector<std::int64_t> mine = mi.ints;
    for (const auto& [sym, it] : mi.interp)
      for (const auto& [k, v] : it.table)
        if (v.kind == Value::Kind::Int) mine.push_back(v.i);
    std::sort(mine.begin(), mine.end());
    mine.erase(std::unique(mine.begin(), mine.end()), mine.end());
    for (auto x : mine) {
      ints.insert(x);
      lowest = std::min(lowest, x);
    }
    u.member_ints.push_back(std::move(mine));
  }
  u.bottom_elem = next;
  u.member_of.push_back(-1);
  m.elem_names.push_back("bot");
  m.num_elems = next + 1;
  u.bottom_int = lowest - 1;
  ints.insert(u.bottom_int);
  m.ints.assign(ints.begin(), ints.end());

  auto lift = [&](const Value& v, std::size_t member) -> Value {
    if (v.kind == Value::Kind::Elem) return Value::elem(v.i + u.offsets[member]);
    return v;
  };

  u.member_consts.resize(members.size());
  for (const auto& [sym, sig] : symbols) {
    const std::vector<Sort>& args = sig.first;
    const Sort& result = sig.second;
    m.declare(sym, args, result);
    if (args.empty()) {
      m.set(sym, Key{}, u.bottom(result));
      u.bottom_consts[sym] = u.bottom(result);
      for (std::size_t i = 0; i < members.size(); ++i) {
        Value v = members[i].lookup(sym, Key{});
        u.member_consts[i][sym] = v.defined() ? lift(v, i) : u.bottom(result);
      }
      continue;
    }
    if (std::any_of(args.begin(), args.end(), [](const Sort& s) { return s.is_set(); })) continue;
    std::vector<std::vector<Value>> doms;
    for (const auto& a : args) doms.push_back(m.universe(a));
    for_each_tuple(doms, [&](const std::vector<Value>& tup) {
      Key k = *make_key(tup);
      int mi = u.member_of_tuple(tup);
      Value out = u.bottom(result);
      if (mi >= 0) {
        const auto& mem = members[static_cast<std::size_t>(mi)];
        const auto& mints = u.member_ints[static_cast<std::size_t>(mi)];
        Key local = k;
        bool inside = true;
        for (std::size_t j = 0; j < tup.size(); ++j) {
          if (tup[j].kind == Value::Kind::Elem) local.v[j] = tup[j].i - u.offsets[static_cast<std::size_t>(mi)];
          else if (tup[j].kind == Value::Kind::Int && !std::binary_search(mints.begin(), mints.end(), tup[j].i))
            inside = false;
        }
        if (inside) {
          Value v = mem.lookup(sym, local);
          if (v.defined()) out = lift(v, static_cast<std::size_t>(mi));
        }
      }
      m.set(sym, k, out);
      return true;
    });
  }
  for (std::size_t i = 0; i < members.size(); ++i)
    for (auto e : members[i].uk) m.uk.push_back(e + u.offsets[i]);
  return u;
}

// ---------------------------------------------------------------------------

inline nlohmann::json value_json(const Value& v, const FiniteModel& m) {
  switch (v.kind) {
    case Value::Kind::Undef: return nullptr;
    case Value::Kind::Bool: return v.i != 0;
    case Value::Kind::Int: return v.i;
    case Value::Kind::Elem: return m.elem_name(v.i);
    case Value::Kind::Set: return v.str();
  }
  return nullptr;
}

inline nlohmann::json model_to_json(const FiniteModel& m) {
  nlohmann::json j;
  j["elements"] = nlohmann::json::array();
  for (std::int64_t e = 0; e < m.num_elems; ++e) j["elements"].push_back(m.elem_name(e));
  j["ints"] = m.ints;
  std::vector<Symbol> names;
  for (const auto& [s, it] : m.interp) names.push_back(s);
  std::sort(names.begin(), names.end());
  nlohmann::json syms = nlohmann::json::object();
  for (auto s : names) {
    const auto& it = m.interp.at(s);
    std::vector<std::pair<Key, Value>> rows(it.table.begin(), it.table.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return std::lexicographical_compare(a.first.v.begin(), a.first.v.begin() + a.first.n, b.first.v.begin(),
                                          b.first.v.begin() + b.first.n);
    });
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [k, v] : rows) {
      nlohmann::json args = nlohmann::json::array();
      for (std::size_t i = 0; i < k.n; ++i) {
        const Sort& a = it.args[i];
        if (a.is_foreground()) args.push_back(m.elem_name(k.v[i]));
        else if (a.is_bool()) args.push_back(k.v[i] != 0);
        else args.push_back(k.v[i]);
      }
      arr.push_back({{"args", args}, {"value", value_json(v, m)}});
    }
    syms[s.str()] = arr;
  }
  j["symbols"] = syms;
  return j;
}

}  // namespace lemsynth
