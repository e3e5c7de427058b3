#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace lemsynth;

namespace {

SynthesisConstraints pseudomodel_constraints(Engine& e) {
  GoalOutcome g = e.prove_goal(1);
  EXPECT_EQ(g.status, SatStatus::Sat);
  SynthesisConstraints c;
  c.pseudomodel = g.model;
  return c;
}

}  // namespace

TEST(Sygus, EmittedProblemsParse) {
  for (const char* name : {"vc02_slist_list.fol", "vc06_lseg_list.fol", "vc17_slist_find.fol"}) {
    Engine e(load_problem(testing_util::corpus(name)), testing_util::quick_options());
    SynthesisConstraints c = pseudomodel_constraints(e);
    std::string text = emit_sygus(c, e.grammar(), e.theory());
    SygusProblem sp = parse_sygus(text);
    EXPECT_EQ(sp.logic, "ALL") << name;
    EXPECT_TRUE(sp.check_synth);
    EXPECT_EQ(sp.synthesized, (std::vector<std::string>{"lemmalhs", "lemmarhs"}));
    EXPECT_FALSE(sp.constraints.empty());
  }
}

TEST(Sygus, CountermodelsAndTruthModelsAddConstraints) {
  Problem p = load_problem(testing_util::corpus("vc06_lseg_list.fol"));
  Engine e(p, testing_util::quick_options());
  SynthesisConstraints c = pseudomodel_constraints(e);
  std::size_t base = parse_sygus(emit_sygus(c, e.grammar(), e.theory())).constraints.size();

  const Lemma& wrong = p.expected[0];
  Lemma bogus{wrong.head, wrong.vars, mk_false()};
  LemmaOutcome r = e.prove_lemma_inductive(bogus, 1);
  ASSERT_EQ(r.status, SatStatus::Sat);
  ASSERT_TRUE(r.countermodel);
  c.countermodels[bogus.head].push_back(r.countermodel);
  std::size_t with_cm = parse_sygus(emit_sygus(c, e.grammar(), e.theory())).constraints.size();
  EXPECT_GT(with_cm, base);
}

TEST(Sygus, ParserRejectsBrokenInput) {
  EXPECT_THROW(parse_sygus("(set-logic ALL) (constraint (f 1))"), SygusError);
  EXPECT_THROW(parse_sygus("(set-logic ALL) (check-synth) (constraint true)"), SygusError);
  EXPECT_THROW(parse_sygus("(set-logic)"), SygusError);
  EXPECT_THROW(parse_sygus("(set-logic ALL"), std::exception);
  EXPECT_THROW(parse_sygus("(synth-fun f)"), SygusError);
  SygusProblem ok = parse_sygus("(set-logic ALL)\n(define-fun g ((x Int)) Bool (< 0 x))\n(constraint (g 1))\n(check-synth)\n");
  EXPECT_EQ(ok.defined, std::vector<std::string>{"g"});
  EXPECT_EQ(ok.constraints.size(), 1u);
}

TEST(Sygus, EmptyConstraintsAreRejected) {
  Engine e(load_problem(testing_util::corpus("vc02_slist_list.fol")), testing_util::quick_options());
  SynthesisConstraints c;
  EXPECT_THROW(emit_sygus(c, e.grammar(), e.theory()), std::invalid_argument);
}
