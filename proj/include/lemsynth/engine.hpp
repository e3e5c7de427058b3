#pragma once

// Goal and lemma proving by depth-k instantiation, the lemma synthesis loop,
// the induction-principle synthesis loop, and depth dovetailing.

#include <chrono>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lemsynth/induction.hpp"
#include "lemsynth/modelkit.hpp"
#include "lemsynth/natproofs.hpp"
#include "lemsynth/smt.hpp"
#include "lemsynth/sygus.hpp"
#include "lemsynth/synth.hpp"

namespace lemsynth {

enum class Algorithm : std::uint8_t { Lemma, InductionPrinciple };
enum class RunStatus : std::uint8_t { Proved, NoProofFound };
enum class FailReason : std::uint8_t { None, GrammarExhausted, Budget, SolverUnknown };

inline const char* run_status_name(RunStatus s) { return s == RunStatus::Proved ? "proved" : "no-proof-found"; }
inline const char* fail_reason_name(FailReason r) {
  switch (r) {
    case FailReason::None: return "none";
    case FailReason::GrammarExhausted: return "grammar-exhausted";
    case FailReason::Budget: return "budget";
    case FailReason::SolverUnknown: return "solver-unknown";
  }
  return "?";
}

struct ScheduleEntry {
  int depth = 1;
  int rounds = 50;
};

struct EngineOptions {
  Algorithm algorithm = Algorithm::Lemma;
  std::vector<ScheduleEntry> schedule{{1, 50}};
  int true_models = 0;
  int model_size = 3;
  std::uint64_t seed = 1;
  SolverConfig solver;
  std::size_t max_candidates = 1000;   // lemma proof attempts
  std::size_t max_enumerated = 2000000;
  double time_budget_s = 0;            // 0: unbounded
  int unknown_retries = 3;
  unsigned threads = 1;
  std::size_t batch = 64;
  std::string sygus_path;              // written each round when set
};

struct GoalOutcome {
  SatStatus status = SatStatus::Unknown;
  UnknownReason reason = UnknownReason::None;
  std::shared_ptr<const FiniteModel> model;
  double seconds = 0;
  std::size_t instances = 0;
  std::size_t terms = 0;
};

struct LemmaOutcome {
  SatStatus status = SatStatus::Unknown;
  UnknownReason reason = UnknownReason::None;
  std::shared_ptr<const Countermodel> countermodel;
  double seconds = 0;
  std::size_t instances = 0;
};

struct RunResult {
  RunStatus status = RunStatus::NoProofFound;
  FailReason reason = FailReason::None;
  std::vector<Lemma> lemmas;
  std::vector<Expr> ips;
  int rounds = 0;
  int depth = 0;
  std::size_t candidates = 0;  // lemma proof attempts
  std::size_t enumerated = 0;
  double seconds = 0;
  double solver_seconds = 0;
  std::vector<nlohmann::json> events;

  bool proved() const { return status == RunStatus::Proved; }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["status"] = run_status_name(status);
    if (status != RunStatus::Proved) j["reason"] = fail_reason_name(reason);
    j["lemmas"] = nlohmann::json::array();
    for (const auto& l : lemmas) j["lemmas"].push_back(l.str());
    j["ips"] = nlohmann::json::array();
    for (const auto& ip : ips) j["ips"].push_back(ip.str());
    j["rounds"] = rounds;
    j["depth"] = depth;
    j["candidates"] = candidates;
    j["enumerated"] = enumerated;
    j["timings"] = {{"total_s", seconds}, {"solver_s", solver_seconds}};
    return j;
  }
};

class Engine {
public:
  using Clock = std::chrono::steady_clock;

  Engine(const Problem& p, EngineOptions opt)
      : theory_(make_theory(p)), opt_(std::move(opt)), env_(p.sig), grammar_(make_grammar(theory_)) {
    for (const auto& d : theory_.defs) env_.reserve(d.name.str());
    auto [neg, consts] = skolemize(p.goal, env_);
    negated_goal_ = neg;
    start_ = Clock::now();
  }

  const Theory& theory() const { return theory_; }
  const LemmaGrammar& grammar() const { return grammar_; }
  const std::vector<Lemma>& lemmas() const { return lemmas_; }
  EngineOptions& options() { return opt_; }

  // Receives every event as it is produced.
  std::function<void(const nlohmann::json&)> on_event;

  // ---- single checks ----------------------------------------------------

  GoalOutcome prove_goal(int k, const std::vector<Expr>& ips = {}) {
    std::vector<Expr> phi = theory_.base_formulas();
    for (const auto& l : lemmas_) phi.push_back(l.formula());
    phi.insert(phi.end(), ips.begin(), ips.end());
    phi.push_back(negated_goal_);
    GoalOutcome out;
    auto q = query(phi, k, true);
    out.status = q.status;
    out.reason = q.reason;
    out.model = q.model;
    out.seconds = q.seconds;
    out.instances = q.instances;
    out.terms = q.terms;
    return out;
  }

  LemmaOutcome prove_lemma_inductive(const Lemma& l, int k) {
    Expr pfp = make_pfp(l, theory_);
    auto [neg, consts] = skolemize(pfp, env_);
    std::vector<Expr> phi = theory_.base_formulas();
    for (const auto& x : lemmas_) phi.push_back(x.formula());
    phi.push_back(neg);
    LemmaOutcome out;
    auto q = query(phi, k, true);
    out.status = q.status;
    out.reason = q.reason;
    out.seconds = q.seconds;
    out.instances = q.instances;
    if (q.model) {
      auto cm = std::make_shared<Countermodel>();
      cm->head = l.head;
      cm->model = *q.model;
      for (const auto& c : consts) {
        auto it = cm->model.term_values.find(c);
        if (it == cm->model.term_values.end()) {
          cm->skolem_tuple.clear();
          break;
        }
        cm->skolem_tuple.push_back(it->second);
      }
      out.countermodel = cm;
    }
    return out;
  }

  // Axioms, definitions and premises entail the conclusion at depth k.
  std::optional<bool> entails(const std::vector<Expr>& premises, const Expr& conclusion, int k) {
    auto [neg, consts] = skolemize(conclusion, env_);
    std::vector<Expr> phi = theory_.base_formulas();
    phi.insert(phi.end(), premises.begin(), premises.end());
    phi.push_back(neg);
    auto q = query(phi, k, false);
    if (q.status == SatStatus::Unknown) return std::nullopt;
    return q.status == SatStatus::Unsat;
  }

  // Mutual implication of two lemmas under the axioms and definitions.
  bool equivalent(const Lemma& a, const Lemma& b, int k) {
    auto ab = entails({a.formula()}, b.formula(), k);
    if (!ab || !*ab) return false;
    auto ba = entails({b.formula()}, a.formula(), k);
    return ba && *ba;
  }

  // ---- loops -------------------------------------------------------------

  RunResult run() {
    RunResult res;
    if (opt_.schedule.empty()) throw std::invalid_argument("empty depth schedule");
    for (const auto& entry : opt_.schedule) {
      res.depth = entry.depth;
      emit({{"event", "depth"}, {"k", entry.depth}, {"rounds", entry.rounds}, {"lemmas", lemmas_.size()}});
      Outcome o = opt_.algorithm == Algorithm::Lemma ? run_lemma_synthesis(entry.depth, entry.rounds)
                                                     : run_ip_synthesis(entry.depth, entry.rounds);
      res.status = o.status;
      res.reason = o.reason;
      res.ips = o.ips;
      if (o.status == RunStatus::Proved || (o.reason == FailReason::Budget && global_budget_exhausted())) break;
    }
    res.lemmas = lemmas_;
    res.rounds = rounds_;
    res.candidates = proposals_;
    res.enumerated = enumerated_;
    res.seconds = elapsed();
    res.solver_seconds = solver_seconds_;
    emit({{"event", "result"}, {"status", run_status_name(res.status)}, {"reason", fail_reason_name(res.reason)},
          {"lemmas", res.lemmas.size()}, {"rounds", res.rounds}, {"candidates", res.candidates}});
    res.events = events_;
    return res;
  }

  struct Outcome {
    RunStatus status = RunStatus::NoProofFound;
    FailReason reason = FailReason::None;
    std::vector<Expr> ips;
  };

  // Lemma synthesis: lemmas are admitted only when proved inductive; failed
  // attempts contribute countermodels that prune later candidates.
  Outcome run_lemma_synthesis(int k, int round_budget) {
    Outcome out;
    auto truth = truth_models();
    int rounds_here = 0;
    for (;;) {
      if (global_budget_exhausted()) return fail(out, FailReason::Budget);
      GoalOutcome g = prove_goal(k);
      log_goal(k, g);
      if (g.status == SatStatus::Unsat) {
        out.status = RunStatus::Proved;
        return out;
      }
      if (g.status == SatStatus::Unknown || !g.model) return fail(out, FailReason::SolverUnknown);
      if (rounds_here >= round_budget) return fail(out, FailReason::Budget);
      ++rounds_here;
      ++rounds_;
      emit({{"event", "round"}, {"k", k}, {"round", rounds_}, {"pseudomodel_size", g.model->num_elems},
            {"uk", g.model->uk.size()}});

      SynthesisConstraints c;
      c.pseudomodel = g.model;
      c.truth_models = truth;
      CandidateStream stream(*this, grammar_);
      int retries = opt_.unknown_retries;
      bool admitted = false;
      while (!admitted) {
        write_sygus(c);
        auto cand = stream.next_accepted(c);
        if (!cand) {
          if (stream.budget_hit) return fail(out, FailReason::Budget);
          return fail(out, FailReason::GrammarExhausted);
        }
        if (proposals_ >= opt_.max_candidates || global_budget_exhausted()) return fail(out, FailReason::Budget);
        ++proposals_;
        LemmaOutcome r = prove_lemma_inductive(cand->lemma, k);
        log_attempt(k, *cand, r);
        if (r.status == SatStatus::Unsat) {
          admit(cand->lemma);
          refilter_truth(truth);
          admitted = true;
        } else if (r.status == SatStatus::Sat && r.countermodel) {
          c.countermodels[cand->lemma.head].push_back(r.countermodel);
          stream.constraints_changed();
          Verdict v = filter_candidate(cand->lemma, c, theory_);
          emit({{"event", "recheck"}, {"ordinal", cand->ordinal}, {"lemma", cand->lemma.str()},
                {"verdict", verdict_name(v)}});
        } else {
          if (--retries < 0) return fail(out, FailReason::SolverUnknown);
        }
      }
    }
  }

  // Induction-principle synthesis: failed attempts contribute induction principles to the goal
  // check and Skolem tuples that constrain later candidates.
  Outcome run_ip_synthesis(int k, int round_budget) {
    Outcome out;
    auto truth = truth_models();
    std::vector<InductionPrinciple> ips;
    int rounds_here = 0;
    int retries = opt_.unknown_retries;
    auto ip_formulas = [&] {
      std::vector<Expr> fs;
      for (const auto& ip : ips) fs.push_back(ip.formula);
      return fs;
    };
    for (;;) {
      out.ips = ip_formulas();
      if (global_budget_exhausted()) return fail(out, FailReason::Budget);
      GoalOutcome g = prove_goal(k, out.ips);
      log_goal(k, g);
      if (g.status == SatStatus::Unsat) {
        out.status = RunStatus::Proved;
        return out;
      }
      if (g.status == SatStatus::Unknown || !g.model) return fail(out, FailReason::SolverUnknown);
      if (rounds_here >= round_budget) return fail(out, FailReason::Budget);
      ++rounds_here;
      ++rounds_;
      emit({{"event", "round"}, {"k", k}, {"round", rounds_}, {"pseudomodel_size", g.model->num_elems},
            {"uk", g.model->uk.size()}, {"ips", ips.size()}});

      SynthesisConstraints c;
      c.pseudomodel = g.model;
      c.truth_models = truth;
      for (const auto& ip : ips) {
        std::vector<Value> tup;
        for (const auto& sk : ip.skolems) {
          auto it = g.model->term_values.find(sk);
          if (it == g.model->term_values.end()) {
            tup.clear();
            break;
          }
          tup.push_back(it->second);
        }
        if (!tup.empty() || ip.skolems.empty()) c.skolem_tuples[ip.lemma.head].push_back(tup);
      }
      write_sygus(c);
      CandidateStream stream(*this, grammar_);
      auto cand = stream.next_accepted(c);
      if (!cand) return fail(out, stream.budget_hit ? FailReason::Budget : FailReason::GrammarExhausted);
      if (proposals_ >= opt_.max_candidates) return fail(out, FailReason::Budget);
      ++proposals_;
      LemmaOutcome r = prove_lemma_inductive(cand->lemma, k);
      log_attempt(k, *cand, r);
      if (r.status == SatStatus::Unsat) {
        admit(cand->lemma);
        refilter_truth(truth);
        ips.clear();
        emit({{"event", "reset"}, {"what", "ips"}});
        continue;
      }
      if (r.status == SatStatus::Unknown && --retries < 0) return fail(out, FailReason::SolverUnknown);
      InductionPrinciple ip = make_ip(cand->lemma, theory_, env_);
      emit({{"event", "ip"}, {"lemma", cand->lemma.str()}, {"formula", ip.formula.str()}});
      ips.push_back(std::move(ip));
    }
  }

  // Adds a lemma known to be valid.
  void add_lemma(const Lemma& l) { lemmas_.push_back(l); }

  const std::vector<nlohmann::json>& events() const { return events_; }

private:
  struct QueryResult {
    SatStatus status = SatStatus::Unknown;
    UnknownReason reason = UnknownReason::None;
    std::shared_ptr<const FiniteModel> model;
    double seconds = 0;
    std::size_t instances = 0;
    std::size_t terms = 0;
  };

  QueryResult query(const std::vector<Expr>& phi, int k, bool want_model) {
    SkolemEnv scratch;
    GroundTermOptions gopt;
    gopt.seed_subterms = true;
    GroundTermSet T = ground_terms(phi, scratch, k, gopt);
    for (const auto& w : T.warnings) emit({{"event", "warning"}, {"message", w}});
    BackgroundTerms bg = background_terms(phi, scratch);
    std::vector<Expr> inst = instantiate(phi, T, bg);
    QueryResult q;
    q.instances = inst.size();
    q.terms = T.terms.size();
    SatResult r = check_sat(inst, opt_.solver);
    q.status = r.status;
    q.reason = r.reason;
    q.seconds = r.seconds;
    if (r.sat() && want_model) {
      try {
        ExtractionRequest req{inst, T, bg.ints};
        auto m = std::make_shared<FiniteModel>(extract_finite_model(*r.session, req));
        q.model = m;
      } catch (const IoError& e) {
        q.status = SatStatus::Unknown;
        q.reason = UnknownReason::IoError;
        emit({{"event", "warning"}, {"message", std::string("model extraction failed: ") + e.what()}});
      }
    }
    if (r.session) r.session->close();
    solver_seconds_ += q.seconds;
    return q;
  }

  // Filters the enumerator output in batches; verdicts computed under older
  // constraints are recomputed before use.
  class CandidateStream {
  public:
    CandidateStream(Engine& e, const LemmaGrammar& g) : e_(e), en_(g) {}

    void constraints_changed() { ++version_; }

    std::optional<Candidate> next_accepted(const SynthesisConstraints& c) {
      for (;;) {
        if (pending_.empty()) {
          std::vector<Candidate> batch;
          while (batch.size() < e_.opt_.batch) {
            if (e_.enumerated_ + batch.size() >= e_.opt_.max_enumerated) {
              budget_hit = true;
              break;
            }
            auto next = en_.next();
            if (!next) break;
            batch.push_back(std::move(*next));
          }
          if (batch.empty()) return std::nullopt;
          auto verdicts = filter_batch(batch, c, e_.theory_, e_.opt_.threads);
          for (std::size_t i = 0; i < batch.size(); ++i) pending_.push_back({std::move(batch[i]), verdicts[i], version_});
        }
        Pending p = std::move(pending_.front());
        pending_.pop_front();
        ++e_.enumerated_;
        if (p.version != version_) p.verdict = filter_candidate(p.cand.lemma, c, e_.theory_);
        e_.emit({{"event", "candidate"}, {"ordinal", p.cand.ordinal}, {"size", p.cand.size},
                 {"lemma", p.cand.lemma.str()}, {"verdict", verdict_name(p.verdict)}});
        if (p.verdict == Verdict::Accept) return p.cand;
        if (e_.global_budget_exhausted()) {
          budget_hit = true;
          return std::nullopt;
        }
      }
    }

    bool budget_hit = false;

  private:
    struct Pending {
      Candidate cand;
      Verdict verdict;
      unsigned version;
    };
    Engine& e_;
    Enumerator en_;
    std::deque<Pending> pending_;
    unsigned version_ = 0;
  };

  std::vector<std::shared_ptr<const FiniteModel>> truth_models() {
    std::vector<std::shared_ptr<const FiniteModel>> out;
    if (opt_.true_models <= 0) return out;
    TrueModelOptions to;
    to.count = opt_.true_models;
    to.max_size = opt_.model_size;
    to.seed = opt_.seed;
    std::vector<Expr> ls;
    for (const auto& l : lemmas_) ls.push_back(l.formula());
    auto batch = gen_true_models(theory_, to, ls);
    for (auto& m : batch.models) out.push_back(std::make_shared<const FiniteModel>(std::move(m)));
    emit({{"event", "true-models"}, {"count", out.size()}, {"rejected", batch.rejected}});
    return out;
  }

  void refilter_truth(std::vector<std::shared_ptr<const FiniteModel>>& truth) {
    std::size_t before = truth.size();
    const Lemma& l = lemmas_.back();
    truth.erase(std::remove_if(truth.begin(), truth.end(), [&](const auto& m) { return !check_truth(l, *m); }),
                truth.end());
    if (truth.size() != before) emit({{"event", "true-models-refiltered"}, {"removed", before - truth.size()}});
  }

  void admit(const Lemma& l) {
    lemmas_.push_back(l);
    emit({{"event", "admit"}, {"lemma", l.str()}, {"lemmas", lemmas_.size()}});
    emit({{"event", "reset"}, {"what", "countermodels"}});
  }

  Outcome& fail(Outcome& o, FailReason r) {
    o.status = RunStatus::NoProofFound;
    o.reason = r;
    emit({{"event", "give-up"}, {"reason", fail_reason_name(r)}});
    return o;
  }

  void log_goal(int k, const GoalOutcome& g) {
    nlohmann::json j{{"event", "goal"}, {"k", k}, {"result", status_name(g.status)}, {"seconds", g.seconds},
                     {"instances", g.instances}, {"terms", g.terms}};
    if (g.status == SatStatus::Unknown) j["reason"] = reason_name(g.reason);
    if (g.model) j["model_size"] = g.model->num_elems;
    emit(j);
  }

  void log_attempt(int k, const Candidate& c, const LemmaOutcome& r) {
    nlohmann::json j{{"event", "attempt"}, {"k", k}, {"ordinal", c.ordinal}, {"lemma", c.lemma.str()},
                     {"result", status_name(r.status)}, {"seconds", r.seconds}, {"instances", r.instances}};
    if (r.status == SatStatus::Unknown) j["reason"] = reason_name(r.reason);
    if (r.countermodel) j["model_size"] = r.countermodel->model.num_elems;
    emit(j);
  }

  void write_sygus(const SynthesisConstraints& c) {
    if (opt_.sygus_path.empty()) return;
    std::ofstream f(opt_.sygus_path);
    f << emit_sygus(c, grammar_, theory_);
  }

  void emit(nlohmann::json j) {
    j["t"] = elapsed();
    events_.push_back(j);
    if (on_event) on_event(j);
  }

  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  bool global_budget_exhausted() const {
    return proposals_ >= opt_.max_candidates || enumerated_ >= opt_.max_enumerated ||
           (opt_.time_budget_s > 0 && elapsed() > opt_.time_budget_s);
  }

  Theory theory_;
  EngineOptions opt_;
  SkolemEnv env_;
  LemmaGrammar grammar_;
  Expr negated_goal_;
  std::vector<Lemma> lemmas_;
  std::vector<nlohmann::json> events_;
  int rounds_ = 0;
  std::size_t proposals_ = 0;
  std::size_t enumerated_ = 0;
  double solver_seconds_ = 0;
  Clock::time_point start_;
};

}  // namespace lemsynth
