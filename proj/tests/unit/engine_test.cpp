#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace lemsynth;

namespace {

RunResult run_file(const std::string& name, EngineOptions opt = testing_util::quick_options()) {
  Engine e(load_problem(testing_util::corpus(name)), opt);
  return e.run();
}

nlohmann::json without_timing(nlohmann::json j) {
  j.erase("t");
  j.erase("seconds");
  return j;
}

std::vector<nlohmann::json> events_of(const RunResult& r, const std::string& kind) {
  std::vector<nlohmann::json> out;
  for (const auto& e : r.events)
    if (e["event"] == kind) out.push_back(e);
  return out;
}

}  // namespace

TEST(Engine, GoalWithoutInductionNeedsNoRounds) {
  Engine e(parse_problem(testing_util::list_problem()), testing_util::quick_options());
  RunResult r = e.run();
  EXPECT_TRUE(r.proved());
  EXPECT_EQ(r.rounds, 0);
  EXPECT_EQ(r.candidates, 0u);
  EXPECT_TRUE(r.lemmas.empty());
}

TEST(Engine, ProvesSortedListIsList) {
  RunResult r = run_file("vc02_slist_list.fol");
  ASSERT_TRUE(r.proved());
  EXPECT_EQ(r.rounds, 1);
  ASSERT_EQ(r.lemmas.size(), 1u);
  EXPECT_EQ(r.lemmas[0].head, Symbol("slist"));
  auto j = r.to_json();
  EXPECT_EQ(j["status"], "proved");
  EXPECT_EQ(j["lemmas"].size(), 1u);
  EXPECT_FALSE(j.contains("reason"));
}

TEST(Engine, AdmittedLemmasAreInductiveAndEntailTheExpectedOne) {
  Problem p = load_problem(testing_util::corpus("vc02_slist_list.fol"));
  Engine e(p, testing_util::quick_options());
  RunResult r = e.run();
  ASSERT_TRUE(r.proved());
  Engine checker(p, testing_util::quick_options());
  for (const auto& l : r.lemmas) EXPECT_EQ(checker.prove_lemma_inductive(l, 1).status, SatStatus::Unsat);
  ASSERT_FALSE(p.expected.empty());
  EXPECT_EQ(checker.entails({r.lemmas[0].formula()}, p.expected[0].formula(), 1), std::optional<bool>(true));
}

TEST(Engine, FailedShallowDepthDoesNotPoisonTheNextOne) {
  EngineOptions opt = testing_util::quick_options();
  opt.schedule = {{0, 5}, {1, 50}};
  RunResult r = run_file("vc06_lseg_list.fol", opt);
  ASSERT_TRUE(r.proved());
  EXPECT_EQ(r.depth, 1);
  auto depths = events_of(r, "depth");
  ASSERT_EQ(depths.size(), 2u);
  EXPECT_EQ(depths[0]["k"], 0);
  EXPECT_EQ(depths[1]["k"], 1);
  // lemmas admitted at depth 0 are carried into depth 1
  std::size_t admitted_before = 0;
  for (const auto& e : r.events) {
    if (e["event"] == "depth" && e["k"] == 1) break;
    if (e["event"] == "admit") ++admitted_before;
  }
  EXPECT_EQ(depths[1]["lemmas"], admitted_before);
}

TEST(Engine, ExhaustedGrammarIsReported) {
  RunResult r = run_file("example_two_lists.fol");
  EXPECT_FALSE(r.proved());
  EXPECT_EQ(r.reason, FailReason::GrammarExhausted);
  EXPECT_EQ(r.to_json()["reason"], "grammar-exhausted");
}

TEST(Engine, CandidateBudgetIsRespected) {
  EngineOptions opt = testing_util::quick_options();
  opt.max_candidates = 3;
  RunResult r = run_file("vc06_lseg_list.fol", opt);
  EXPECT_FALSE(r.proved());
  EXPECT_EQ(r.reason, FailReason::Budget);
  EXPECT_LE(r.candidates, 3u);
}

// Every admission is followed by a countermodel reset, every refuted attempt
// is rechecked and rejected by the PFP filter, and no lemma is attempted
// twice between resets.
TEST(Engine, EventLogFollowsTheResetDiscipline) {
  RunResult r = run_file("vc06_lseg_list.fol");
  ASSERT_TRUE(r.proved());
  std::set<std::string> since_reset;
  for (std::size_t i = 0; i < r.events.size(); ++i) {
    const auto& e = r.events[i];
    if (e["event"] == "admit") {
      ASSERT_LT(i + 1, r.events.size());
      EXPECT_EQ(r.events[i + 1]["event"], "reset");
      EXPECT_EQ(r.events[i + 1]["what"], "countermodels");
    }
    if (e["event"] == "reset") since_reset.clear();
    if (e["event"] == "attempt") {
      EXPECT_TRUE(since_reset.insert(e["lemma"].get<std::string>()).second) << e.dump();
      if (e["result"] == "sat") {
        ASSERT_LT(i + 1, r.events.size());
        EXPECT_EQ(r.events[i + 1]["event"], "recheck");
        EXPECT_EQ(r.events[i + 1]["verdict"], "reject-b");
      }
    }
  }
  EXPECT_EQ(events_of(r, "admit").size(), r.lemmas.size());
  EXPECT_EQ(events_of(r, "attempt").size(), r.candidates);
  EXPECT_EQ(r.events.back()["event"], "result");
}

TEST(Engine, RunsAreDeterministicUpToTimings) {
  RunResult a = run_file("vc04_sdlist_both.fol");
  RunResult b = run_file("vc04_sdlist_both.fol");
  ASSERT_EQ(a.events.size(), b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i)
    EXPECT_EQ(without_timing(a.events[i]), without_timing(b.events[i])) << i;
}

TEST(Engine, InductionPrincipleAlgorithmProvesTwoLists) {
  EngineOptions opt = testing_util::quick_options();
  opt.algorithm = Algorithm::InductionPrinciple;
  RunResult r = run_file("example_two_lists.fol", opt);
  ASSERT_TRUE(r.proved());
  EXPECT_TRUE(r.lemmas.empty());
  EXPECT_FALSE(r.ips.empty());
  EXPECT_EQ(events_of(r, "ip").size(), r.ips.size());
}

TEST(Engine, TrueModelsSatisfyTheTheory) {
  EngineOptions opt = testing_util::quick_options();
  opt.true_models = 5;
  RunResult r = run_file("vc06_lseg_list.fol", opt);
  EXPECT_TRUE(r.proved());
  auto tm = events_of(r, "true-models");
  ASSERT_FALSE(tm.empty());
  EXPECT_EQ(tm[0]["count"], 5);
}

TEST(Engine, EmptyScheduleIsRejected) {
  EngineOptions opt = testing_util::quick_options();
  opt.schedule.clear();
  Engine e(parse_problem(testing_util::list_problem()), opt);
  EXPECT_THROW(e.run(), std::invalid_argument);
}
