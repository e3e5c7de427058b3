#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lemsynth/lemsynth.hpp"

namespace testing_util {

inline std::string corpus(const std::string& name) { return std::string(LEMSYNTH_CORPUS_DIR) + "/" + name; }

inline std::string data(const std::string& name) { return std::string(LEMSYNTH_DATA_DIR) + "/" + name; }

inline std::vector<std::string> corpus_files() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(LEMSYNTH_CORPUS_DIR))
    if (e.path().extension() == ".fol") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

inline lemsynth::EngineOptions quick_options() {
  lemsynth::EngineOptions opt;
  opt.solver.timeout_s = 30;
  opt.solver.seed = 1;
  return opt;
}

inline const char* list_problem() {
  return R"(
(foreground-sort Loc)
(const nil Loc)
(func n (Loc) Loc)
(define-rec (list (x Loc)) (or (= x nil) (list (n x))))
(goal (forall ((x Loc)) (=> (list x) (or (= x nil) (list (n x))))))
)";
}

}  // namespace testing_util

namespace testing_util {

// A heap over `size` elements: nil is element 0, n(e) = next[e], key(e) = keys[e].
inline lemsynth::FiniteModel heap_model(const lemsynth::Sort& fg, const std::vector<std::int64_t>& next,
                                        const std::vector<std::int64_t>& keys = {}) {
  using namespace lemsynth;
  FiniteModel m;
  m.fg = fg;
  m.num_elems = static_cast<std::int64_t>(next.size());
  for (std::int64_t e = 0; e < m.num_elems; ++e) m.elem_names.push_back(e == 0 ? "nil" : "e" + std::to_string(e));
  for (std::int64_t i = -2; i <= 8; ++i) m.ints.push_back(i);
  m.set_const(Symbol("nil"), fg, Value::elem(0));
  m.declare(Symbol("n"), {fg}, fg);
  for (std::int64_t e = 0; e < m.num_elems; ++e) m.set(Symbol("n"), *make_key({Value::elem(e)}), Value::elem(next[e]));
  if (!keys.empty()) {
    m.declare(Symbol("key"), {fg}, Sort::integer());
    for (std::int64_t e = 0; e < m.num_elems; ++e)
      m.set(Symbol("key"), *make_key({Value::elem(e)}), Value::integer(keys[e]));
  }
  return m;
}

}  // namespace testing_util
