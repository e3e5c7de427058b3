#pragma once

// Pre-fixpoint formulas and induction principles for lemmas.

#include <string>
#include <vector>

#include "lemsynth/natproofs.hpp"

namespace lemsynth {

namespace detail {
inline const RecDef& require_def(const Lemma& l, const std::vector<RecDef>& defs) {
  for (const auto& d : defs)
    if (d.name == l.head) {
      if (d.params.size() != l.vars.size())
        throw DefinitionError("lemma arity does not match definition of " + l.head.str());
      return d;
    }
  throw DefinitionError("lemma head " + l.head.str() + " has no recursive definition");
}
}  // namespace detail

// ψ instantiated at the argument terms t̄.
inline Expr lemma_body_at(const Lemma& l, const std::vector<Expr>& args) { return substitute_vars(l.body, l.vars, args); }

// ∀x̄. ρ_R(x̄)[R(t̄) ← ψ(t̄) ∧ R(t̄)] → ψ(x̄)
inline Expr make_pfp(const Lemma& l, const std::vector<RecDef>& defs) {
  const RecDef& d = detail::require_def(l, defs);
  Expr rho = substitute_vars(d.body, d.params, l.vars);
  Expr rewritten = substitute_relation(rho, l.head, l.vars.size(), [&](const std::vector<Expr>& args) {
    return mk_and(lemma_body_at(l, args), mk_app(l.head, Sort::boolean(), args));
  });
  return mk_forall(l.vars, mk_implies(rewritten, l.body));
}

inline Expr make_pfp(const Lemma& l, const Theory& t) { return make_pfp(l, t.defs); }

struct InductionPrinciple {
  Lemma lemma;
  std::vector<Expr> skolems;
  Expr formula;  // ∀x̄. ¬PFP-matrix(c̄) ∨ (R(x̄) → ψ(x̄))
};

inline InductionPrinciple make_ip(const Lemma& l, const std::vector<RecDef>& defs, SkolemEnv& env) {
  Expr pfp = make_pfp(l, defs);
  auto [neg_matrix, consts] = skolemize(pfp, env);
  Expr body = mk_or(neg_matrix, mk_implies(l.head_atom(), l.body));
  return {l, consts, mk_forall(l.vars, body)};
}

inline InductionPrinciple make_ip(const Lemma& l, const Theory& t, SkolemEnv& env) { return make_ip(l, t.defs, env); }

}  // namespace lemsynth
