#pragma once

// Lemma proposer: grammar, fair size-ordered enumeration and constraint
// filtering against finite models.

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lemsynth/induction.hpp"
#include "lemsynth/model.hpp"
#include "lemsynth/natproofs.hpp"

namespace lemsynth {

struct HeadSpec {
  Symbol head;
  std::vector<Expr> vars;
  std::vector<Expr> atoms;
};

struct LemmaGrammar {
  std::vector<HeadSpec> heads;
  int max_size = 3;
  int term_depth = 1;

  std::size_t atom_count() const {
    std::size_t n = 0;
    for (const auto& h : heads) n += h.atoms.size();
    return n;
  }
};

namespace detail {

// Terms over the given leaves closed under unary-or-more foreground functions
// up to the given depth, in generation order.
inline std::vector<Expr> fg_terms(std::vector<Expr> leaves, const std::vector<const Decl*>& funcs, int depth) {
  std::vector<Expr> all = leaves;
  ExprSet seen(all.begin(), all.end());
  std::vector<Expr> prev = all;
  for (int d = 1; d <= depth; ++d) {
    std::vector<Expr> next;
    for (const Decl* f : funcs) {
      std::size_t n = f->args.size();
      std::vector<std::size_t> idx(n, 0);
      if (all.empty()) break;
      for (;;) {
        std::vector<Expr> args;
        bool uses_prev = false;
        for (std::size_t i = 0; i < n; ++i) {
          args.push_back(all[idx[i]]);
          if (std::find(prev.begin(), prev.end(), all[idx[i]]) != prev.end()) uses_prev = true;
        }
        if (uses_prev) {
          Expr t = mk_app(f->name, f->result, args);
          if (seen.insert(t).second) next.push_back(t);
        }
        std::size_t p = n;
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
  return all;
}

inline bool in_list(const std::optional<std::vector<Symbol>>& xs, Symbol s) {
  return !xs || std::find(xs->begin(), xs->end(), s) != xs->end();
}

inline bool mentions_any(const Expr& e, const std::vector<Expr>& vars) {
  bool found = false;
  visit(e, [&](const Expr& x) {
    if (x.is(Op::Var) && std::find(vars.begin(), vars.end(), x) != vars.end()) found = true;
  });
  return found;
}

}  // namespace detail

inline HeadSpec make_head_spec(const Theory& t, const RecDef& def) {
  const Problem& p = t.problem;
  const GrammarConfig& g = p.grammar;
  HeadSpec h;
  h.head = def.name;
  h.vars = def.params;

  std::vector<Expr> fg_leaves, int_leaves;
  for (const auto& v : def.params) {
    if (v.sort().is_foreground()) fg_leaves.push_back(v);
    else if (v.sort().is_int()) int_leaves.push_back(v);
  }
  for (const Decl* c : p.sig.of_kind(SymbolKind::Constant)) {
    if (!detail::in_list(g.constants, c->name)) continue;
    if (c->result.is_foreground()) fg_leaves.push_back(mk_const(c->name, c->result));
    else if (c->result.is_int()) int_leaves.push_back(mk_const(c->name, c->result));
  }
  std::vector<const Decl*> fg_funcs, bg_funcs;
  for (const Decl* f : p.sig.of_kind(SymbolKind::Function)) {
    if (!detail::in_list(g.functions, f->name)) continue;
    bool fg_args = std::all_of(f->args.begin(), f->args.end(), [](const Sort& s) { return s.is_foreground(); });
    if (!fg_args) continue;
    if (f->result.is_foreground()) fg_funcs.push_back(f);
    else bg_funcs.push_back(f);
  }
  std::vector<Expr> fgt = detail::fg_terms(fg_leaves, fg_funcs, g.term_depth);
  std::vector<Expr> intt = int_leaves;
  if (g.int_atoms) {
    for (const Decl* f : bg_funcs) {
      if (!f->result.is_int()) continue;
      std::vector<std::size_t> idx(f->args.size(), 0);
      if (fgt.empty()) break;
      for (;;) {
        std::vector<Expr> args;
        for (auto i : idx) args.push_back(fgt[i]);
        Expr term = mk_app(f->name, f->result, args);
        if (term_depth(term) <= g.term_depth) intt.push_back(term);
        std::size_t q = idx.size();
        bool done = true;
        while (q > 0) {
          --q;
          if (++idx[q] < fgt.size()) {
            done = false;
            break;
          }
          idx[q] = 0;
        }
        if (done) break;
      }
    }
  }

  std::vector<Expr> atoms;
  ExprSet seen;
  auto add = [&](const Expr& a) {
    if (!g.ground_atoms && !detail::mentions_any(a, h.vars)) return;
    if (seen.insert(a).second) atoms.push_back(a);
  };
  for (std::size_t i = 0; i < fgt.size(); ++i)
    for (std::size_t j = i + 1; j < fgt.size(); ++j) add(mk_eq(fgt[i], fgt[j]));
  std::vector<const Decl*> rels;
  for (const Decl* r : p.sig.of_kind(SymbolKind::Relation))
    if (detail::in_list(g.relations, r->name)) rels.push_back(r);
  std::vector<std::pair<Symbol, std::vector<Sort>>> rel_sigs;
  for (const Decl* r : rels) rel_sigs.emplace_back(r->name, r->args);
  if (g.relations)
    for (const auto& low : t.lowered)
      if (detail::in_list(g.relations, low.domain.name)) {
        std::vector<Sort> args;
        for (const auto& q : low.domain.params) args.push_back(q.sort());
        rel_sigs.emplace_back(low.domain.name, args);
      }
  for (const auto& [rname, rargs] : rel_sigs) {
    std::vector<const std::vector<Expr>*> pools;
    bool possible = true;
    for (const auto& s : rargs) {
      if (s.is_foreground()) pools.push_back(&fgt);
      else if (s.is_int()) pools.push_back(&intt);
      else possible = false;
    }
    if (!possible) continue;
    if (std::any_of(pools.begin(), pools.end(), [](const auto* q) { return q->empty(); })) continue;
    std::vector<std::size_t> idx(pools.size(), 0);
    for (;;) {
      std::vector<Expr> args;
      for (std::size_t i = 0; i < idx.size(); ++i) args.push_back((*pools[i])[idx[i]]);
      add(mk_app(rname, Sort::boolean(), args));
      std::size_t q = idx.size();
      bool done = true;
      while (q > 0) {
        --q;
        if (++idx[q] < pools[q]->size()) {
          done = false;
          break;
        }
        idx[q] = 0;
      }
      if (done) break;
    }
  }
  if (g.int_atoms) {
    for (std::size_t i = 0; i < intt.size(); ++i)
      for (std::size_t j = 0; j < intt.size(); ++j) {
        if (i == j) continue;
        if (i < j) add(mk_eq(intt[i], intt[j]));
        add(mk_le(intt[i], intt[j]));
      }
  }
  for (const auto& tmpl : g.atoms) {
    // every sort-respecting map from template variables to head variables
    std::vector<std::vector<Expr>> choices;
    bool possible = true;
    for (const auto& tv : tmpl.vars) {
      std::vector<Expr> c;
      for (const auto& hv : h.vars)
        if (hv.sort() == tv.sort()) c.push_back(hv);
      if (c.empty()) possible = false;
      choices.push_back(std::move(c));
    }
    if (!possible) continue;
    std::vector<std::size_t> idx(choices.size(), 0);
    for (;;) {
      std::vector<Expr> vals;
      for (std::size_t i = 0; i < idx.size(); ++i) vals.push_back(choices[i][idx[i]]);
      add(substitute_vars(tmpl.body, tmpl.vars, vals));
      std::size_t q = idx.size();
      bool done = true;
      while (q > 0) {
        --q;
        if (++idx[q] < choices[q].size()) {
          done = false;
          break;
        }
        idx[q] = 0;
      }
      if (done) break;
    }
  }
  h.atoms = std::move(atoms);
  return h;
}

inline LemmaGrammar make_grammar(const Theory& t) {
  LemmaGrammar g;
  const Problem& p = t.problem;
  g.max_size = p.grammar.max_size;
  g.term_depth = p.grammar.term_depth;
  if (!p.grammar.heads.empty()) {
    for (auto h : p.grammar.heads) {
      const RecDef* d = t.find_def(h);
      if (!d) throw DefinitionError("grammar head " + h.str() + " is not a recursive definition");
      g.heads.push_back(make_head_spec(t, *d));
    }
  } else {
    for (const auto& d : p.defs) g.heads.push_back(make_head_spec(t, d));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Normal form used for deduplication.

inline Expr normalize(const Expr& e) {
  switch (e.op()) {
    case Op::Not: {
      Expr a = normalize(e.arg(0));
      if (a.is(Op::Not)) return a.arg(0);
      if (a.is(Op::BoolLit)) return mk_bool(!a.value());
      return mk_not(a);
    }
    case Op::And:
    case Op::Or: {
      bool is_and = e.is(Op::And);
      std::vector<Expr> xs;
      std::function<void(const Expr&)> flat = [&](const Expr& x) {
        if (x.op() == e.op()) {
          for (const auto& y : x.args()) flat(y);
          return;
        }
        xs.push_back(x);
      };
      for (const auto& a : e.args()) flat(normalize(a));
      std::vector<std::pair<std::string, Expr>> keyed;
      for (const auto& x : xs) {
        if (x.is(Op::BoolLit)) {
          if ((x.value() != 0) != is_and) return x;  // absorbing element
          continue;                                  // neutral element
        }
        keyed.emplace_back(x.str(), x);
      }
      std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      keyed.erase(std::unique(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
                  keyed.end());
      std::vector<Expr> out;
      for (auto& [k, x] : keyed) out.push_back(x);
      return is_and ? mk_and(std::move(out)) : mk_or(std::move(out));
    }
    case Op::Eq:
    case Op::Iff: {
      Expr a = normalize(e.arg(0)), b = normalize(e.arg(1));
      if (a == b) return mk_true();
      if (b.str() < a.str()) std::swap(a, b);
      return e.is(Op::Eq) ? mk_eq(a, b) : mk_iff(a, b);
    }
    case Op::Implies: {
      Expr a = normalize(e.arg(0)), b = normalize(e.arg(1));
      if (a == b || a.is_false() || b.is_true()) return mk_true();
      if (a.is_true()) return b;
      return mk_implies(a, b);
    }
    case Op::Ite: {
      Expr c = normalize(e.arg(0)), a = normalize(e.arg(1)), b = normalize(e.arg(2));
      if (a == b) return a;
      if (c.is_true()) return a;
      if (c.is_false()) return b;
      return mk_ite(c, a, b);
    }
    default: return e;
  }
}

// Node count: atoms and constants 1, ¬ adds 1, binary connectives add 1.
inline int body_size(const Expr& e) {
  if (e.sort().is_bool() && (e.is(Op::Not) || e.is(Op::And) || e.is(Op::Or) || e.is(Op::Implies) ||
                             e.is(Op::Iff) || e.is(Op::Ite))) {
    int n = 1;
    for (const auto& a : e.args()) n += body_size(a);
    return n;
  }
  return 1;
}

struct Candidate {
  Lemma lemma;
  int size = 0;
  std::size_t head_index = 0;
  std::size_t ordinal = 0;  // position in the stream
};

// Size-ordered stream: all bodies of size s for head 0, head 1, ..., then s+1.
class Enumerator {
public:
  explicit Enumerator(const LemmaGrammar& g) : g_(g) { reset(); }

  void reset() {
    size_ = 1;
    head_ = 0;
    pos_ = 0;
    ordinal_ = 0;
    current_.clear();
    loaded_ = false;
  }

  std::optional<Candidate> next() {
    for (;;) {
      if (size_ > g_.max_size) return std::nullopt;
      if (head_ >= g_.heads.size()) {
        head_ = 0;
        ++size_;
        loaded_ = false;
        continue;
      }
      if (!loaded_) {
        current_ = bodies(head_, size_);
        pos_ = 0;
        loaded_ = true;
      }
      if (pos_ < current_.size()) {
        const HeadSpec& h = g_.heads[head_];
        Candidate c{Lemma{h.head, h.vars, current_[pos_]}, size_, head_, ordinal_++};
        ++pos_;
        return c;
      }
      ++head_;
      loaded_ = false;
    }
  }

  std::size_t emitted() const { return ordinal_; }
  const LemmaGrammar& grammar() const { return g_; }

private:
  struct HeadCache {
    std::vector<std::vector<Expr>> by_size;  // index = size
    ExprSet normal_forms;
  };

  const std::vector<Expr>& bodies(std::size_t h, int size) {
    HeadCache& c = cache_[h];
    while (static_cast<int>(c.by_size.size()) <= size) {
      int s = static_cast<int>(c.by_size.size());
      c.by_size.push_back(build(h, s, c));
    }
    return c.by_size[static_cast<std::size_t>(size)];
  }

  std::vector<Expr> build(std::size_t h, int s, HeadCache& c) {
    std::vector<Expr> out;
    auto offer = [&](const Expr& body) {
      if (c.normal_forms.insert(normalize(body)).second) out.push_back(body);
    };
    const auto& atoms = g_.heads[h].atoms;
    if (s == 1) {
      offer(mk_true());
      offer(mk_false());
      for (const auto& a : atoms) offer(a);
    } else if (s == 2) {
      for (const auto& a : atoms) offer(mk_not(a));
    } else if (s >= 3) {
      // binary connectives over non-constant operands
      for (int ls = 1; ls <= s - 2; ++ls) {
        int rs = s - 1 - ls;
        const auto& L = operands(h, ls, c);
        const auto& R = operands(h, rs, c);
        for (const auto& a : L)
          for (const auto& b : R) {
            offer(mk_and(a, b));
            offer(mk_or(a, b));
            offer(mk_implies(a, b));
            offer(mk_iff(a, b));
          }
      }
      // ite with an atom condition: 1 + 1 + |t| + |e|
      for (int ts = 1; ts <= s - 3; ++ts) {
        int es = s - 2 - ts;
        const auto& T = operands(h, ts, c);
        const auto& E = operands(h, es, c);
        for (const auto& cond : atoms)
          for (const auto& a : T)
            for (const auto& b : E) offer(mk_ite(cond, a, b));
      }
    }
    return out;
  }

  std::vector<Expr>& operands(std::size_t h, int s, HeadCache& c) {
    auto key = std::make_pair(h, s);
    auto it = ops_.find(key);
    if (it != ops_.end()) return it->second;
    std::vector<Expr> xs;
    for (const auto& b : bodies(h, s))
      if (!b.is(Op::BoolLit)) xs.push_back(b);
    (void)c;
    return ops_[key] = std::move(xs);
  }

  const LemmaGrammar& g_;
  std::map<std::size_t, HeadCache> cache_;
  std::map<std::pair<std::size_t, int>, std::vector<Expr>> ops_;
  int size_ = 1;
  std::size_t head_ = 0;
  std::size_t pos_ = 0;
  std::size_t ordinal_ = 0;
  std::vector<Expr> current_;
  bool loaded_ = false;
};

// ---------------------------------------------------------------------------
// Constraints

struct Countermodel {
  Symbol head;
  FiniteModel model;
  std::vector<Value> skolem_tuple;
};

struct SynthesisConstraints {
  std::shared_ptr<const FiniteModel> pseudomodel;
  std::map<Symbol, std::vector<std::shared_ptr<const Countermodel>>> countermodels;  // per head
  std::map<Symbol, std::vector<std::vector<Value>>> skolem_tuples;                  // per head, in the pseudomodel
  std::vector<std::shared_ptr<const FiniteModel>> truth_models;
  std::size_t tuple_cap = 20000;
};

enum class Verdict : std::uint8_t { Accept, RejectA, RejectB, RejectC };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Accept: return "accept";
    case Verdict::RejectA: return "reject-a";
    case Verdict::RejectB: return "reject-b";
    case Verdict::RejectC: return "reject-c";
  }
  return "?";
}

namespace detail {

inline std::vector<std::vector<Value>> lemma_domains(const FiniteModel& m, const std::vector<Expr>& vars,
                                                     bool restrict_to_uk) {
  std::vector<std::vector<Value>> out;
  for (const auto& v : vars) {
    std::vector<Value> d;
    if (restrict_to_uk && v.sort().is_foreground())
      for (auto e : m.uk) d.push_back(Value::elem(e));
    else if (restrict_to_uk && v.sort().is_int())
      for (auto i : m.uk_ints) d.push_back(Value::integer(i));
    else
      d = m.universe(v.sort());
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace detail

// (a) the lemma is definitely false at some tuple over U_k.
inline bool check_usefulness(const Lemma& l, const FiniteModel& m) {
  Evaluator ev(m);
  Expr f = mk_implies(l.head_atom(), l.body);
  bool found = false;
  for_each_tuple(detail::lemma_domains(m, l.vars, true), [&](const std::vector<Value>& tup) {
    if (ev.truth_at(f, l.vars, tup) == Truth::False) found = true;
    return !found;
  });
  return found;
}

// (c) the lemma holds at every tuple of a total model.
inline bool check_truth(const Lemma& l, const FiniteModel& m) {
  Evaluator ev(m);
  Expr f = mk_implies(l.head_atom(), l.body);
  bool violated = false;
  for_each_tuple(detail::lemma_domains(m, l.vars, false), [&](const std::vector<Value>& tup) {
    if (ev.truth_at(f, l.vars, tup) == Truth::False) violated = true;
    return !violated;
  });
  return !violated;
}

// (b) the PFP matrix is not definitely false at the Skolem tuple or at any
// tuple over U_k of a countermodel. Elements outside U_k carry no instances
// of the definitions, so falsity there says nothing. At most `cap` tuples
// are inspected.
inline bool pfp_survives(const Expr& pfp_matrix, const std::vector<Expr>& vars, const Countermodel& cm,
                         std::size_t cap) {
  Evaluator ev(cm.model);
  if (!cm.skolem_tuple.empty() && ev.truth_at(pfp_matrix, vars, cm.skolem_tuple) == Truth::False) return false;
  bool falsified = false;
  std::size_t seen = 0;
  for_each_tuple(detail::lemma_domains(cm.model, vars, true), [&](const std::vector<Value>& tup) {
    if (ev.truth_at(pfp_matrix, vars, tup) == Truth::False) falsified = true;
    return !falsified && ++seen < cap;
  });
  return !falsified;
}

inline bool pfp_survives_at(const Expr& pfp_matrix, const std::vector<Expr>& vars, const FiniteModel& m,
                            const std::vector<Value>& tuple) {
  return Evaluator(m).truth_at(pfp_matrix, vars, tuple) != Truth::False;
}

inline Verdict filter_candidate(const Lemma& l, const SynthesisConstraints& c, const Theory& t) {
  if (c.pseudomodel && !check_usefulness(l, *c.pseudomodel)) return Verdict::RejectA;
  for (const auto& g : c.truth_models)
    if (!check_truth(l, *g)) return Verdict::RejectC;
  auto cms = c.countermodels.find(l.head);
  auto sks = c.skolem_tuples.find(l.head);
  bool need_b = (cms != c.countermodels.end() && !cms->second.empty()) ||
                (sks != c.skolem_tuples.end() && !sks->second.empty());
  if (need_b) {
    Expr pfp = make_pfp(l, t);
    const Expr& matrix = pfp.is(Op::Forall) ? pfp.arg(0) : pfp;
    if (cms != c.countermodels.end())
      for (const auto& cm : cms->second)
        if (!pfp_survives(matrix, l.vars, *cm, c.tuple_cap)) return Verdict::RejectB;
    if (sks != c.skolem_tuples.end() && c.pseudomodel)
      for (const auto& tup : sks->second)
        if (!pfp_survives_at(matrix, l.vars, *c.pseudomodel, tup)) return Verdict::RejectB;
  }
  return Verdict::Accept;
}

// Filters a batch, optionally on several threads; results are in input order.
inline std::vector<Verdict> filter_batch(const std::vector<Candidate>& batch, const SynthesisConstraints& c,
                                         const Theory& t, unsigned threads = 1) {
  std::vector<Verdict> out(batch.size(), Verdict::Accept);
  if (threads <= 1 || batch.size() < 2) {
    for (std::size_t i = 0; i < batch.size(); ++i) out[i] = filter_candidate(batch[i].lemma, c, t);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < batch.size();) out[i] = filter_candidate(batch[i].lemma, c, t);
    });
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace lemsynth
