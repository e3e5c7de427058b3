#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "helpers.hpp"

using namespace lemsynth;

namespace {

const Sort loc = Sort::foreground("Loc");
Expr nil() { return mk_const("nil", loc); }
Expr c() { return mk_const("c", loc); }
Expr n(Expr a) { return mk_app("n", loc, {std::move(a)}); }
Expr list(Expr a) { return mk_app("list", Sort::boolean(), {std::move(a)}); }

SolverConfig z3() {
  SolverConfig cfg;
  cfg.timeout_s = 20;
  cfg.seed = 1;
  return cfg;
}

FiniteModel solve_and_extract(const std::vector<Expr>& fs, int k) {
  SkolemEnv env;
  auto T = ground_terms(fs, env, k, {true});
  auto bg = background_terms(fs, env);
  auto r = check_sat(fs, z3());
  EXPECT_TRUE(r.sat());
  if (!r.sat()) return {};
  return extract_finite_model(*r.session, ExtractionRequest{fs, T, bg.ints});
}

}  // namespace

TEST(Smt, ManglingRoundTrips) {
  std::mt19937 rng(5);
  for (int i = 0; i < 500; ++i) {
    std::string s;
    int len = 1 + static_cast<int>(rng() % 12);
    for (int j = 0; j < len; ++j) s += static_cast<char>(32 + rng() % 95);
    std::string m = mangle(s);
    EXPECT_EQ(demangle(m), s);
    for (char ch : m) EXPECT_TRUE(std::isgraph(static_cast<unsigned char>(ch)) && ch != '|' && ch != '(' && ch != ')');
  }
  EXPECT_EQ(mangle("lseg-keys_b"), "u.lseg-keys_b");
  EXPECT_THROW(demangle("x"), std::invalid_argument);
}

TEST(Smt, SatAndUnsat) {
  EXPECT_TRUE(check_sat({mk_eq(n(nil()), c()), mk_not(mk_eq(c(), nil()))}, z3()).sat());
  EXPECT_TRUE(check_sat({mk_eq(n(nil()), c()), mk_not(mk_eq(n(nil()), c()))}, z3()).unsat());
  Expr key = mk_app("key", Sort::integer(), {c()});
  EXPECT_TRUE(check_sat({mk_le(key, mk_int(-3)), mk_le(mk_int(-3), key)}, z3()).sat());
  EXPECT_TRUE(check_sat({mk_lt(key, mk_int(-3)), mk_le(mk_int(-3), key)}, z3()).unsat());
}

TEST(Smt, SetTheory) {
  Expr s = mk_app("keys", Sort::set_of_int(), {c()});
  Expr ok = mk_eq(s, mk_union(mk_singleton(mk_int(1)), mk_singleton(mk_int(2))));
  EXPECT_TRUE(check_sat({ok, mk_member(mk_int(2), s)}, z3()).sat());
  EXPECT_TRUE(check_sat({ok, mk_member(mk_int(3), s)}, z3()).unsat());
  EXPECT_TRUE(check_sat({mk_member(mk_int(0), mk_empty_set())}, z3()).unsat());
}

TEST(Smt, RejectsQuantifiedAssertions) {
  Expr x = mk_var("x", loc);
  EXPECT_THROW(check_sat({mk_forall({x}, mk_eq(x, x))}, z3()), SortError);
}

TEST(Smt, MissingSolverIsReportedAsUnknown) {
  SolverConfig cfg = z3();
  cfg.path = "/nonexistent/solver-binary";
  auto r = check_sat({mk_eq(nil(), nil())}, cfg);
  EXPECT_EQ(r.status, SatStatus::Unknown);
  EXPECT_EQ(r.reason, UnknownReason::IoError);
}

TEST(Smt, ExtractedModelsSatisfyTheAssertions) {
  Expr key = mk_app("key", Sort::integer(), {n(c())});
  std::vector<Expr> fs{
      mk_not(mk_eq(c(), nil())),
      mk_eq(n(n(c())), nil()),
      list(n(c())),
      mk_not(list(c())),
      mk_le(mk_int(4), key),
      mk_iff(list(nil()), mk_true()),
      mk_member(key, mk_app("keys", Sort::set_of_int(), {c()})),
  };
  FiniteModel m = solve_and_extract(fs, 2);
  EXPECT_GE(m.num_elems, 3);
  for (const auto& f : fs) EXPECT_EQ(eval_formula(m, f), Truth::True) << f.str();
  EXPECT_FALSE(m.uk.empty());
  auto it = m.term_values.find(c());
  ASSERT_NE(it, m.term_values.end());
  EXPECT_EQ(it->second.kind, Value::Kind::Elem);
}

// Without the abstraction `list` is uninterpreted and the unfolding goal is
// not provable; one round of abstraction instances proves it.
TEST(Smt, AbstractionInstancesProveTheUnfolding) {
  Problem p = parse_problem(testing_util::list_problem());
  Theory t = make_theory(p);
  SkolemEnv env(p.sig);
  auto [neg, consts] = skolemize(p.goal, env);
  auto check = [&](std::vector<Expr> fs) {
    auto T = ground_terms(fs, env, 1);
    return check_sat(instantiate(fs, T), z3()).status;
  };
  EXPECT_EQ(check({neg}), SatStatus::Sat);
  std::vector<Expr> with = t.base_formulas();
  with.push_back(neg);
  EXPECT_EQ(check(with), SatStatus::Unsat);
}

// Runs only when LEMSYNTH_SOLVER2 names a second SMT-LIB2 solver.
TEST(Smt, DifferentialAgainstSecondSolver) {
  const char* other = std::getenv("LEMSYNTH_SOLVER2");
  if (!other || !*other) GTEST_SKIP() << "LEMSYNTH_SOLVER2 not set";
  SolverConfig a = z3(), b = z3();
  b.path = other;
  for (const auto& f : testing_util::corpus_files()) {
    Problem p = load_problem(f);
    Theory t = make_theory(p);
    SkolemEnv env(p.sig);
    std::vector<Expr> fs = t.base_formulas();
    fs.push_back(skolemize(p.goal, env).first);
    auto inst = instantiate(fs, ground_terms(fs, env, 1, {true}), background_terms(fs, env));
    auto ra = check_sat(inst, a), rb = check_sat(inst, b);
    if (ra.status != SatStatus::Unknown && rb.status != SatStatus::Unknown) {
      EXPECT_EQ(ra.status, rb.status) << f;
    }
  }
}
