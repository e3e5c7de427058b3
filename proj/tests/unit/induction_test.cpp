#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"

using namespace lemsynth;

namespace {

const char* kLseg = R"(
(foreground-sort Loc)
(const nil Loc)
(func n (Loc) Loc)
(define-rec (list (x Loc)) (or (= x nil) (list (n x))))
(define-rec (lseg (x Loc) (y Loc)) (ite (= x y) true (lseg (n x) y)))
(grammar (max-size 3))
(goal (forall ((x Loc)) (=> (lseg x nil) (list x))))
)";

Lemma lemma_of(const Problem& p, const std::string& text) {
  Problem q = parse_problem(print_problem(p) + "(expect-lemma " + text + ")");
  return q.expected.back();
}

}  // namespace

TEST(Induction, PfpSubstitutesGuardedRecursiveOccurrences) {
  Problem p = parse_problem(testing_util::list_problem());
  Lemma l = *as_lemma(p.goal, p);
  Expr pfp = make_pfp(l, p.defs);
  EXPECT_EQ(pfp.str(),
            "(forall ((x Loc)) (=> (or (= x nil) (and (or (= (n x) nil) (list (n (n x)))) (list (n x)))) "
            "(or (= x nil) (list (n x)))))");
}

TEST(Induction, PfpOfTheSegmentExample) {
  Problem p = parse_problem(kLseg);
  Lemma l = lemma_of(p, "(forall ((x Loc) (y Loc)) (=> (lseg x y) (lseg nil y)))");
  Expr pfp = make_pfp(l, p.defs);
  Expr x = mk_var("u", p.fg()), y = mk_var("v", p.fg());
  Expr nil = mk_const("nil", p.fg());
  auto lseg = [&](Expr a, Expr b) { return mk_app("lseg", Sort::boolean(), {a, b}); };
  Expr want = mk_forall(
      {x, y}, mk_implies(mk_ite(mk_eq(x, y), mk_true(), mk_and(lseg(nil, y), lseg(mk_app("n", p.fg(), {x}), y))),
                         lseg(nil, y)));
  EXPECT_TRUE(alpha_equal(pfp, want)) << pfp.str();
}

TEST(Induction, TrivialBodyGivesValidPfp) {
  Problem p = parse_problem(kLseg);
  Lemma l = lemma_of(p, "(forall ((x Loc) (y Loc)) (=> (lseg x y) true))");
  auto [vars, matrix] = split_forall(make_pfp(l, p.defs));
  ASSERT_TRUE(matrix.is(Op::Implies));
  EXPECT_TRUE(matrix.arg(1).is_true());
}

TEST(Induction, WrongHeadOrArityIsRejected) {
  Problem p = parse_problem(kLseg);
  Expr x = mk_var("x", p.fg());
  EXPECT_THROW(make_pfp(Lemma{Symbol("lseg"), {x}, mk_true()}, p.defs), DefinitionError);
  EXPECT_THROW(make_pfp(Lemma{Symbol("n"), {x}, mk_true()}, p.defs), DefinitionError);
}

// The unfolding lemma's PFP holds in every structure, whatever list means.
TEST(Induction, UnfoldingPfpIsFirstOrderValidBruteForce) {
  Problem p = parse_problem(testing_util::list_problem());
  Expr pfp = make_pfp(*as_lemma(p.goal, p), p.defs);
  int checked = 0;
  for (int size = 1; size <= 3; ++size) {
    int funcs = 1;
    for (int i = 0; i < size; ++i) funcs *= size;
    for (int f = 0; f < funcs; ++f) {
      std::vector<std::int64_t> next;
      for (int i = 0, c = f; i < size; ++i, c /= size) next.push_back(c % size);
      for (int rel = 0; rel < (1 << size); ++rel) {
        FiniteModel m = testing_util::heap_model(p.fg(), next);
        m.declare(Symbol("list"), {p.fg()}, Sort::boolean());
        for (int e = 0; e < size; ++e) m.set(Symbol("list"), *make_key({Value::elem(e)}), Value::boolean(rel >> e & 1));
        ASSERT_EQ(eval_formula(m, pfp), Truth::True);
        ++checked;
      }
    }
  }
  EXPECT_EQ(checked, 2 + 4 * 4 + 27 * 8);
}

// On least-fixpoint models, a PFP that holds everywhere forces the lemma.
TEST(Induction, PfpImpliesLemmaOnRandomLfpModels) {
  Problem p = parse_problem(kLseg);
  Theory t = make_theory(p);
  LemmaGrammar g = make_grammar(t);
  Enumerator en(g);
  std::vector<Lemma> lemmas;
  while (auto c = en.next())
    if (lemmas.size() < 400) lemmas.push_back(c->lemma);
  std::mt19937_64 rng(7);
  int pfp_true = 0;
  for (int round = 0; round < 40; ++round) {
    int size = 1 + static_cast<int>(rng() % 4);
    std::vector<std::int64_t> next;
    for (int i = 0; i < size; ++i) next.push_back(static_cast<std::int64_t>(rng() % size));
    FiniteModel m = lfp_eval(testing_util::heap_model(p.fg(), next), t);
    Evaluator ev(m);
    for (const auto& l : lemmas) {
      Truth pfp = ev.truth(make_pfp(l, t));
      Truth lem = ev.truth(l.formula());
      ASSERT_NE(pfp, Truth::Unknown);
      if (pfp == Truth::True) {
        ++pfp_true;
        EXPECT_EQ(lem, Truth::True) << l.str();
      }
      SkolemEnv env;
      auto ip = make_ip(l, t, env);
      // some interpretation of the Skolem constants satisfies the IP, and
      // every interpretation does when the PFP is valid
      std::vector<std::vector<Value>> doms(ip.skolems.size(), m.universe(p.fg()));
      bool some = false, every = true;
      for_each_tuple(doms, [&](const std::vector<Value>& tup) {
        ConstOverrides c;
        for (std::size_t i = 0; i < tup.size(); ++i) c[ip.skolems[i].name()] = tup[i];
        bool holds = Evaluator(m, &c).truth(ip.formula) == Truth::True;
        some = some || holds;
        every = every && holds;
        return true;
      });
      EXPECT_TRUE(some) << ip.formula.str();
      if (pfp == Truth::True) {
        EXPECT_TRUE(every) << ip.formula.str();
      }
    }
  }
  EXPECT_GT(pfp_true, 0);
}

TEST(Induction, InductionPrincipleShape) {
  Problem p = parse_problem(testing_util::list_problem());
  Lemma l = *as_lemma(p.goal, p);
  SkolemEnv env(p.sig);
  auto ip = make_ip(l, p.defs, env);
  ASSERT_EQ(ip.skolems.size(), 1u);
  auto [vars, matrix] = split_forall(ip.formula);
  EXPECT_EQ(vars, l.vars);
  ASSERT_TRUE(matrix.is(Op::Or));
  EXPECT_TRUE(is_ground(matrix.arg(0)));
  EXPECT_EQ(matrix.arg(1), mk_implies(l.head_atom(), l.body));
}
