#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lemsynth/lemsynth.hpp"

namespace fs = std::filesystem;
using namespace lemsynth;

namespace {

struct RunConfig {
  std::string input;
  std::string algorithm = "lemma";
  int depth = 1;
  int rounds = 50;
  std::string schedule;
  int true_models = 0;
  int model_size = 3;
  std::string solver = "z3";
  double timeout = 30;
  std::uint64_t seed = 1;
  std::string result = "result.json";
  std::string log;
  std::string sygus;
  int max_size = 0;
  std::size_t max_candidates = 1000;
  double time_budget = 0;
  unsigned threads = 1;
  bool check_expected = false;
};

std::vector<ScheduleEntry> parse_schedule(const std::string& text) {
  std::vector<ScheduleEntry> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("schedule entry '" + item + "' is not k:rounds");
    ScheduleEntry e{std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1))};
    if (e.depth < 0 || e.rounds < 0) throw std::invalid_argument("schedule entries must be non-negative");
    out.push_back(e);
  }
  if (out.empty()) throw std::invalid_argument("empty schedule");
  return out;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  if (path.empty()) return;
  std::ofstream f(path);
  f << j.dump(2) << "\n";
}

int run(const RunConfig& cfg) {
  nlohmann::json result;
  try {
    if (!fs::exists(cfg.input)) throw std::runtime_error("no such file: " + cfg.input);
    Problem p = load_problem(cfg.input);
    if (cfg.max_size > 0) p.grammar.max_size = cfg.max_size;

    EngineOptions opt;
    if (cfg.algorithm == "lemma") opt.algorithm = Algorithm::Lemma;
    else if (cfg.algorithm == "ip") opt.algorithm = Algorithm::InductionPrinciple;
    else throw std::invalid_argument("unknown algorithm " + cfg.algorithm);
    opt.schedule = cfg.schedule.empty() ? std::vector<ScheduleEntry>{{cfg.depth, cfg.rounds}} : parse_schedule(cfg.schedule);
    opt.true_models = cfg.true_models;
    opt.model_size = cfg.model_size;
    opt.seed = cfg.seed;
    opt.solver.path = cfg.solver;
    opt.solver.timeout_s = cfg.timeout;
    opt.solver.seed = cfg.seed;
    opt.max_candidates = cfg.max_candidates;
    opt.time_budget_s = cfg.time_budget;
    opt.threads = cfg.threads;
    opt.sygus_path = cfg.sygus;

    { Subprocess probe(opt.solver.argv()); }  // fails early on a missing solver binary

    Engine engine(p, opt);
    std::ofstream log;
    if (!cfg.log.empty()) {
      log.open(cfg.log);
      if (!log) throw std::runtime_error("cannot write " + cfg.log);
      engine.on_event = [&](const nlohmann::json& e) { log << e.dump() << "\n" << std::flush; };
    }
    RunResult r = engine.run();
    result = r.to_json();
    result["input"] = cfg.input;
    result["algorithm"] = cfg.algorithm;

    if (r.proved() && cfg.check_expected) {
      nlohmann::json exp = nlohmann::json::array();
      for (const auto& want : p.expected) {
        bool matched = false;
        for (const auto& got : r.lemmas)
          if (got.head == want.head && engine.equivalent(got, want, r.depth)) matched = true;
        exp.push_back({{"lemma", want.str()}, {"matched", matched}});
      }
      result["expected"] = exp;
    }

    std::cout << run_status_name(r.status);
    if (!r.proved()) std::cout << " (" << fail_reason_name(r.reason) << ")";
    std::cout << "  rounds=" << r.rounds << " candidates=" << r.candidates << " depth=" << r.depth << "\n";
    for (const auto& l : r.lemmas) std::cout << "(lemma " << l.str() << ")\n";
    for (const auto& ip : r.ips) std::cout << "(induction-principle " << ip.str() << ")\n";
    write_json(cfg.result, result);
    return r.proved() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    result = {{"status", "error"}, {"message", e.what()}, {"input", cfg.input}};
    try {
      write_json(cfg.result, result);
    } catch (...) {
    }
    return 2;
  }
}

int check(const std::vector<std::string>& files, bool print) {
  int status = 0;
  for (const auto& f : files) {
    try {
      Problem p = load_problem(f);
      make_theory(p);
      if (print) std::cout << print_problem(p);
      else std::cout << f << ": ok\n";
    } catch (const std::exception& e) {
      std::cerr << f << ": " << e.what() << "\n";
      status = 2;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lemma synthesis for first-order logic with recursive definitions"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto* run_cmd = app.add_subcommand("run", "Prove the goal of a problem file");
  run_cmd->add_option("problem", cfg.input, "Problem file")->required();
  run_cmd->add_option("--algorithm", cfg.algorithm, "lemma or ip")->check(CLI::IsMember({"lemma", "ip"}));
  auto* depth_opt = run_cmd->add_option("--depth", cfg.depth, "Instantiation depth")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--rounds", cfg.rounds, "Round budget for --depth")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--schedule", cfg.schedule, "Depth schedule k:rounds,...")->excludes(depth_opt);
  run_cmd->add_option("--true-models", cfg.true_models, "Number of true models")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--model-size", cfg.model_size, "Size bound of true models")->check(CLI::PositiveNumber);
  run_cmd->add_option("--solver", cfg.solver, "SMT-LIB2 solver binary");
  run_cmd->add_option("--timeout", cfg.timeout, "Solver timeout per query in seconds")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", cfg.seed, "Random seed");
  run_cmd->add_option("--result", cfg.result, "Result JSON path");
  run_cmd->add_option("--log", cfg.log, "Event log path (JSON lines)");
  run_cmd->add_option("--emit-sygus", cfg.sygus, "Write the synthesis constraints as SyGuS-IF");
  run_cmd->add_option("--max-size", cfg.max_size, "Largest lemma body size")->check(CLI::PositiveNumber);
  run_cmd->add_option("--max-candidates", cfg.max_candidates, "Budget of lemma proof attempts");
  run_cmd->add_option("--time-budget", cfg.time_budget, "Wall-clock budget in seconds (0: none)");
  run_cmd->add_option("--threads", cfg.threads, "Threads for candidate filtering")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--check-expected", cfg.check_expected, "Match admitted lemmas against expect-lemma entries");

  std::vector<std::string> files;
  bool print = false;
  auto* check_cmd = app.add_subcommand("check", "Parse and validate problem files");
  check_cmd->add_option("files", files, "Problem files")->required();
  check_cmd->add_flag("--print", print, "Print the parsed problem");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*run_cmd) return run(cfg);
  return check(files, print);
}
