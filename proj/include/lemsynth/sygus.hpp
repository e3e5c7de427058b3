#pragma once

// SyGuS-IF v2 emission of the lemma synthesis constraints over a universal
// model, and a small structural reader for emitted files.

#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lemsynth/induction.hpp"
#include "lemsynth/modelkit.hpp"
#include "lemsynth/sexpr.hpp"
#include "lemsynth/smt.hpp"
#include "lemsynth/synth.hpp"

namespace lemsynth {

namespace detail {

inline std::string sy_name(Symbol s) { return mangle(s.str()); }

inline std::string sy_int(std::int64_t v) {
  if (v >= 0) return std::to_string(v);
  return "(- " + std::to_string(0ULL - static_cast<unsigned long long>(v)) + ")";
}

inline std::string sy_sort(const Sort& s) {
  switch (s.kind) {
    case SortKind::Bool: return "Bool";
    case SortKind::SetInt: return "(Set Int)";
    default: return "Int";
  }
}

inline std::string sy_value(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Bool: return v.i ? "true" : "false";
    case Value::Kind::Int:
    case Value::Kind::Elem: return sy_int(v.i);
    case Value::Kind::Set: {
      std::vector<std::int64_t> xs;
      for (const auto& [i, b] : v.set->bits)
        if (b) xs.push_back(i);
      if (xs.empty()) return "(as set.empty (Set Int))";
      std::string out;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        std::string one = "(set.singleton " + sy_int(xs[k]) + ")";
        out = k == 0 ? one : "(set.union " + out + " " + one + ")";
      }
      return out;
    }
    case Value::Kind::Undef: break;
  }
  return "0";
}

// Renders a quantifier-free expression. Variables map through `vars`;
// constants become lookups at `anchor`; `head_rewrite` replaces applications
// of the lemma head.
struct SyRender {
  std::map<Symbol, std::string> vars;
  std::string anchor = "0";
  Symbol head;
  bool rewrite_head = false;
  std::string head_index;

  std::string operator()(const Expr& e) const {
    auto list = [&](const std::string& h) {
      std::string out = "(" + h;
      for (const auto& a : e.args()) out += " " + (*this)(a);
      return out + ")";
    };
    switch (e.op()) {
      case Op::Var: {
        auto it = vars.find(e.name());
        return it == vars.end() ? sy_name(e.name()) : it->second;
      }
      case Op::Const: return "(" + sy_name(e.name()) + " " + anchor + ")";
      case Op::App: {
        std::string call = list(sy_name(e.name()));
        if (rewrite_head && e.name() == head) {
          std::string args;
          for (const auto& a : e.args()) args += " " + (*this)(a);
          return "(and (lemmarhs" + args + ") " + call + ")";
        }
        return call;
      }
      case Op::IntLit: return sy_int(e.value());
      case Op::BoolLit: return e.value() ? "true" : "false";
      case Op::Add: return list("+");
      case Op::Sub: return list("-");
      case Op::Le: return list("<=");
      case Op::Lt: return list("<");
      case Op::Eq:
      case Op::Iff: return list("=");
      case Op::Not: return list("not");
      case Op::And: return list("and");
      case Op::Or: return list("or");
      case Op::Implies: return list("=>");
      case Op::Ite: return list("ite");
      case Op::EmptySet: return "(as set.empty (Set Int))";
      case Op::Singleton: return list("set.singleton");
      case Op::Union: return list("set.union");
      case Op::Member: return list("set.member");
      case Op::Forall: break;
    }
    throw SortError("sygus: cannot render " + e.str());
  }
};

}  // namespace detail

// Builds a SyGuS-IF problem whose solutions (lemmalhs, lemmarhs) are exactly
// the lemmas satisfying the constraints, evaluated over the universal model.
inline std::string emit_sygus(const SynthesisConstraints& c, const LemmaGrammar& g, const Theory& t) {
  using detail::sy_int;
  using detail::sy_name;
  if (g.heads.empty()) throw std::invalid_argument("sygus: grammar has no heads");

  // Members: pseudomodel, countermodels, truth models.
  std::vector<FiniteModel> members;
  int pseudo = -1;
  if (c.pseudomodel) {
    pseudo = 0;
    members.push_back(*c.pseudomodel);
  }
  struct CmRef {
    std::size_t head_index;
    int member;
  };
  std::vector<CmRef> cms;
  for (std::size_t h = 0; h < g.heads.size(); ++h) {
    auto it = c.countermodels.find(g.heads[h].head);
    if (it == c.countermodels.end()) continue;
    for (const auto& cm : it->second) {
      cms.push_back({h, static_cast<int>(members.size())});
      members.push_back(cm->model);
    }
  }
  std::vector<int> truth;
  for (const auto& m : c.truth_models) {
    truth.push_back(static_cast<int>(members.size()));
    members.push_back(*m);
  }
  if (members.empty()) throw std::invalid_argument("sygus: no constraint models");
  UniversalModel u = build_universal_model(members);
  const FiniteModel& um = u.model;

  std::size_t arity = 0;
  for (const auto& h : g.heads) arity = std::max(arity, h.vars.size());
  std::vector<std::string> xs;
  for (std::size_t i = 0; i < arity; ++i) xs.push_back("x" + std::to_string(i + 1));

  std::ostringstream out;
  out << "(set-logic ALL)\n";

  // Signature symbols as finite lookups.
  std::vector<Symbol> names;
  for (const auto& [s, it] : um.interp) names.push_back(s);
  std::sort(names.begin(), names.end());
  for (auto s : names) {
    const Interp& it = um.interp.at(s);
    if (it.args.empty()) {
      // member-relative constant: looked up through an anchor element
      std::string body = detail::sy_value(u.bottom_consts.at(s));
      for (std::size_t i = members.size(); i-- > 0;) {
        std::int64_t lo = u.offsets[i], hi = lo + members[i].num_elems;
        if (hi == lo) continue;
        body = "(ite (and (<= " + sy_int(lo) + " a) (< a " + sy_int(hi) + ")) " +
               detail::sy_value(u.member_consts[i].at(s)) + " " + body + ")";
      }
      out << "(define-fun " << sy_name(s) << " ((a Int)) " << detail::sy_sort(it.result) << " " << body << ")\n";
      continue;
    }
    if (std::any_of(it.args.begin(), it.args.end(), [](const Sort& x) { return x.is_set(); })) continue;
    std::vector<std::pair<Key, Value>> rows(it.table.begin(), it.table.end());
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return std::lexicographical_compare(a.first.v.begin(), a.first.v.begin() + a.first.n, b.first.v.begin(),
                                          b.first.v.begin() + b.first.n);
    });
    Value dflt = u.bottom(it.result);
    std::string body = detail::sy_value(dflt);
    for (auto r = rows.rbegin(); r != rows.rend(); ++r) {
      if (r->second.kind == dflt.kind && r->second.i == dflt.i && r->second.kind != Value::Kind::Set) continue;
      std::string cond = "(and";
      for (std::size_t j = 0; j < it.args.size(); ++j) cond += " (= a" + std::to_string(j) + " " + sy_int(r->first.v[j]) + ")";
      cond += ")";
      body = "(ite " + cond + " " + detail::sy_value(r->second) + " " + body + ")";
    }
    out << "(define-fun " << sy_name(s) << " (";
    for (std::size_t j = 0; j < it.args.size(); ++j) out << (j ? " " : "") << "(a" << j << " Int)";
    out << ") " << detail::sy_sort(it.result) << " " << body << ")\n";
  }

  // lemmalhs selects the head, lemmarhs is the body over x1..xn.
  out << "(synth-fun lemmalhs () Int ((Start Int)) ((Start Int (";
  for (std::size_t h = 0; h < g.heads.size(); ++h) out << (h ? " " : "") << h;
  out << "))))\n";
  std::vector<std::string> atom_text;
  std::set<std::string> atom_seen;
  for (const auto& h : g.heads) {
    detail::SyRender r;
    for (std::size_t i = 0; i < h.vars.size(); ++i) r.vars[h.vars[i].name()] = xs[i];
    r.anchor = xs.empty() ? "0" : xs[0];
    for (const auto& a : h.atoms) {
      std::string s = r(a);
      if (atom_seen.insert(s).second) atom_text.push_back(s);
    }
  }
  out << "(synth-fun lemmarhs (";
  for (std::size_t i = 0; i < arity; ++i) out << (i ? " " : "") << "(" << xs[i] << " Int)";
  out << ") Bool\n  ((Start Bool) (Atom Bool))\n  ((Start Bool (Atom (not Atom) (and Start Start) (or Start Start) "
         "(=> Start Start) (ite Atom Start Start)))\n   (Atom Bool (true false";
  for (const auto& a : atom_text) out << " " << a;
  out << "))))\n";

  // lemma(ē) := ⋀_i (lemmalhs = i ⇒ (R_i(ē) ⇒ lemmarhs(ē)))
  auto lemma_at = [&](const std::vector<std::int64_t>& tup) {
    std::string s = "(and";
    for (std::size_t h = 0; h < g.heads.size(); ++h) {
      std::size_t n = g.heads[h].vars.size();
      std::string head_args, rhs_args;
      for (std::size_t i = 0; i < n; ++i) head_args += " " + sy_int(tup[i]);
      for (std::size_t i = 0; i < arity; ++i) rhs_args += " " + sy_int(tup[i]);
      s += " (=> (= lemmalhs " + std::to_string(h) + ") (=> (" + sy_name(g.heads[h].head) + head_args +
           ") (lemmarhs" + rhs_args + ")))";
    }
    return s + ")";
  };
  auto tuples = [&](const std::vector<std::int64_t>& elems) {
    std::vector<std::vector<std::int64_t>> out_t;
    if (elems.empty()) return out_t;
    std::vector<std::size_t> idx(arity, 0);
    for (;;) {
      std::vector<std::int64_t> tup;
      for (auto i : idx) tup.push_back(elems[i]);
      out_t.push_back(std::move(tup));
      std::size_t p = arity;
      bool done = true;
      while (p > 0) {
        --p;
        if (++idx[p] < elems.size()) {
          done = false;
          break;
        }
        idx[p] = 0;
      }
      if (done) break;
    }
    return out_t;
  };
  auto member_elems = [&](int i) {
    std::vector<std::int64_t> es;
    for (std::int64_t e = 0; e < members[static_cast<std::size_t>(i)].num_elems; ++e)
      es.push_back(e + u.offsets[static_cast<std::size_t>(i)]);
    return es;
  };

  // Usefulness: some U_k tuple falsifies the lemma.
  if (pseudo >= 0) {
    std::vector<std::int64_t> uk;
    for (auto e : members[0].uk) uk.push_back(e + u.offsets[0]);
    auto ts = tuples(uk);
    if (!ts.empty()) {
      out << "(constraint (or";
      for (const auto& tup : ts) out << " (not " << lemma_at(tup) << ")";
      out << "))\n";
    }
  }

  // Pre-fixpoint at every element tuple of each countermodel, and at the
  // stored Skolem tuples of the pseudomodel.
  auto pfp_at = [&](std::size_t h, const std::vector<std::int64_t>& tup) {
    const HeadSpec& hs = g.heads[h];
    const RecDef* d = t.find_def(hs.head);
    detail::SyRender r;
    for (std::size_t i = 0; i < d->params.size(); ++i) r.vars[d->params[i].name()] = sy_int(tup[i]);
    r.anchor = sy_int(tup.empty() ? 0 : tup[0]);
    r.head = hs.head;
    r.rewrite_head = true;
    std::string rhs;
    for (std::size_t i = 0; i < arity; ++i) rhs += " " + sy_int(i < tup.size() ? tup[i] : tup[0]);
    return "(=> " + r(d->body) + " (lemmarhs" + rhs + "))";
  };
  for (const auto& cm : cms) {
    std::string conj = "(and";
    for (const auto& tup : tuples(member_elems(cm.member))) conj += " " + pfp_at(cm.head_index, tup);
    out << "(constraint (=> (= lemmalhs " << cm.head_index << ") " << conj << ")))\n";
  }
  for (std::size_t h = 0; h < g.heads.size() && pseudo >= 0; ++h) {
    auto it = c.skolem_tuples.find(g.heads[h].head);
    if (it == c.skolem_tuples.end()) continue;
    for (const auto& vals : it->second) {
      std::vector<std::int64_t> tup;
      for (const auto& v : vals) tup.push_back(v.kind == Value::Kind::Elem ? v.i + u.offsets[0] : v.i);
      out << "(constraint (=> (= lemmalhs " << h << ") " << pfp_at(h, tup) << "))\n";
    }
  }

  // Truth in every true model.
  for (int m : truth) {
    out << "(constraint (and";
    for (const auto& tup : tuples(member_elems(m))) out << " " << lemma_at(tup);
    out << "))\n";
  }
  out << "(check-synth)\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Reader for emitted files

struct SygusProblem {
  std::string logic;
  std::vector<std::string> defined;
  std::vector<std::string> synthesized;
  std::vector<SExpr> constraints;
  bool check_synth = false;
};

class SygusError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline SygusProblem parse_sygus(std::string_view text) {
  SygusProblem p;
  std::set<std::string> known = {"and", "or", "not", "=>", "ite", "=", "<=", "<", "+", "-", "true", "false",
                                 "set.union", "set.singleton", "set.member", "as", "set.empty", "Set", "Int"};
  std::set<std::string> locals;
  std::function<void(const SExpr&)> check_term = [&](const SExpr& e) {
    if (e.is_atom) {
      const std::string& a = e.atom;
      if (a.empty()) throw SygusError("empty atom");
      if (std::isdigit(static_cast<unsigned char>(a[0]))) return;
      if (!known.count(a) && !locals.count(a)) throw SygusError("undefined symbol " + a);
      return;
    }
    for (const auto& x : e.items) check_term(x);
  };
  for (const auto& cmd : parse_sexprs(text)) {
    if (cmd.is_atom || cmd.items.empty() || !cmd[0].is_atom) throw SygusError("malformed command " + cmd.str());
    const std::string& h = cmd[0].atom;
    if (p.check_synth) throw SygusError("command after check-synth");
    if (h == "set-logic") {
      if (cmd.size() != 2) throw SygusError("malformed set-logic");
      p.logic = cmd[1].atom;
    } else if (h == "define-fun" || h == "synth-fun") {
      if (cmd.size() < 4 || !cmd[1].is_atom || cmd[2].is_atom) throw SygusError("malformed " + h);
      locals.clear();
      for (const auto& param : cmd[2].items) {
        if (param.is_atom || param.size() != 2) throw SygusError("malformed parameter in " + cmd[1].atom);
        locals.insert(param[0].atom);
      }
      if (h == "define-fun") {
        if (cmd.size() != 5) throw SygusError("malformed define-fun " + cmd[1].atom);
        check_term(cmd[4]);
        p.defined.push_back(cmd[1].atom);
      } else {
        if (cmd.size() > 4) {
          // grammar: nonterminal declarations followed by rules
          const SExpr& rules = cmd.size() == 6 ? cmd[5] : cmd[4];
          std::set<std::string> nts = locals;
          if (cmd.size() == 6)
            for (const auto& nt : cmd[4].items) nts.insert(nt[0].atom);
          for (const auto& r : rules.items) nts.insert(r[0].atom);
          std::swap(locals, nts);
          for (const auto& r : rules.items) {
            if (r.size() != 3) throw SygusError("malformed grammar rule in " + cmd[1].atom);
            for (const auto& prod : r[2].items) check_term(prod);
          }
        }
        p.synthesized.push_back(cmd[1].atom);
      }
      known.insert(cmd[1].atom);
      locals.clear();
    } else if (h == "constraint") {
      if (cmd.size() != 2) throw SygusError("malformed constraint");
      check_term(cmd[1]);
      p.constraints.push_back(cmd[1]);
    } else if (h == "declare-var") {
      if (cmd.size() != 3) throw SygusError("malformed declare-var");
      known.insert(cmd[1].atom);
    } else if (h == "check-synth") {
      p.check_synth = true;
    } else {
      throw SygusError("unknown command " + h);
    }
  }
  if (!p.check_synth) throw SygusError("missing check-synth");
  return p;
}

}  // namespace lemsynth
