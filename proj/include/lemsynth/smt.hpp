#pragma once

// SMT-LIB2 solver driver: encoding, satisfiability checks over a subprocess
// pipe, and finite model extraction through get-value queries.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lemsynth/logic.hpp"
#include "lemsynth/model.hpp"
#include "lemsynth/natproofs.hpp"
#include "lemsynth/sexpr.hpp"
#include "lemsynth/subprocess.hpp"

namespace lemsynth {

enum class Dialect : std::uint8_t { Z3, Cvc5 };

struct SolverConfig {
  std::string path = "z3";
  double timeout_s = 30.0;
  std::string logic = "ALL";
  std::optional<std::uint64_t> seed;
  std::optional<Dialect> dialect;
  std::size_t max_table_queries = 60000;

  Dialect effective_dialect() const {
    if (dialect) return *dialect;
    auto slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    return base.find("cvc") != std::string::npos ? Dialect::Cvc5 : Dialect::Z3;
  }
  std::vector<std::string> argv() const {
    if (effective_dialect() == Dialect::Cvc5) return {path, "--lang=smt2", "--incremental", "--produce-models"};
    return {path, "-in", "-smt2"};
  }
};

enum class SatStatus : std::uint8_t { Sat, Unsat, Unknown };
enum class UnknownReason : std::uint8_t { None, Timeout, SolverUnknown, IoError };

inline const char* status_name(SatStatus s) {
  switch (s) {
    case SatStatus::Sat: return "sat";
    case SatStatus::Unsat: return "unsat";
    default: return "unknown";
  }
}
inline const char* reason_name(UnknownReason r) {
  switch (r) {
    case UnknownReason::Timeout: return "timeout";
    case UnknownReason::SolverUnknown: return "solver-said-unknown";
    case UnknownReason::IoError: return "io-error";
    default: return "none";
  }
}

// ---------------------------------------------------------------------------
// Identifier mangling. Every user symbol gets a "u." prefix; characters outside
// the SMT-LIB simple-symbol alphabet (and '%') become %XX.

inline std::string mangle(const std::string& name) {
  static const std::string ok = "~!@$^&*_-+=<>.?/";
  std::string out = "u.";
  for (unsigned char c : name) {
    if (std::isalnum(c) || (c != '%' && ok.find(static_cast<char>(c)) != std::string::npos)) {
      out += static_cast<char>(c);
    } else {
      static const char* hex = "0123456789ABCDEF";
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

inline std::string demangle(const std::string& text) {
  if (text.rfind("u.", 0) != 0) throw std::invalid_argument("not a mangled identifier: " + text);
  std::string out;
  for (std::size_t i = 2; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size()) {
      out += static_cast<char>(std::stoi(text.substr(i + 1, 2), nullptr, 16));
      i += 2;
    } else {
      out += text[i];
    }
  }
  return out;
}

class SmtEncoder {
public:
  explicit SmtEncoder(Dialect d) : d_(d) {}

  std::string sort(const Sort& s) const {
    switch (s.kind) {
      case SortKind::Bool: return "Bool";
      case SortKind::Int: return "Int";
      case SortKind::SetInt: return d_ == Dialect::Z3 ? "(Array Int Bool)" : "(Set Int)";
      case SortKind::Foreground: return mangle(s.str());
    }
    return "?";
  }

  std::string term(const Expr& e) const {
    std::string out;
    emit(e, out);
    return out;
  }

  // Declarations for every uninterpreted symbol occurring in the formulas.
  std::string declarations(const std::vector<Expr>& formulas) const {
    std::vector<Sort> fg_sorts;
    std::vector<std::pair<Symbol, std::string>> decls;
    std::set<Symbol> done;
    for (const auto& f : formulas)
      visit(f, [&](const Expr& x) {
        auto note_sort = [&](const Sort& s) {
          if (s.is_foreground() && std::find(fg_sorts.begin(), fg_sorts.end(), s) == fg_sorts.end())
            fg_sorts.push_back(s);
        };
        note_sort(x.sort());
        for (const auto& b : x.bound()) note_sort(b.sort());
        if (!(x.is(Op::Const) || x.is(Op::App)) || done.count(x.name())) return;
        done.insert(x.name());
        std::string d = "(declare-fun " + mangle(x.name().str()) + " (";
        for (std::size_t i = 0; i < x.args().size(); ++i) {
          if (i) d += ' ';
          d += sort(x.arg(i).sort());
        }
        d += ") " + sort(x.sort()) + ")\n";
        decls.emplace_back(x.name(), d);
      });
    std::string out;
    for (const auto& s : fg_sorts) out += "(declare-sort " + mangle(s.str()) + " 0)\n";
    for (const auto& [n, d] : decls) out += d;
    return out;
  }

private:
  std::string empty_set() const {
    return d_ == Dialect::Z3 ? "((as const (Array Int Bool)) false)" : "(as set.empty (Set Int))";
  }

  void emit(const Expr& e, std::string& out) const {
    auto list = [&](const char* head) {
      out += '(';
      out += head;
      for (const auto& a : e.args()) {
        out += ' ';
        emit(a, out);
      }
      out += ')';
    };
    switch (e.op()) {
      case Op::Var:
      case Op::Const: out += mangle(e.name().str()); break;
      case Op::App: list(mangle(e.name().str()).c_str()); break;
      case Op::IntLit:
        if (e.value() < 0) out += "(- " + std::to_string(-e.value()) + ")";
        else out += std::to_string(e.value());
        break;
      case Op::BoolLit: out += e.value() ? "true" : "false"; break;
      case Op::Add: list("+"); break;
      case Op::Sub: list("-"); break;
      case Op::Le: list("<="); break;
      case Op::Lt: list("<"); break;
      case Op::Eq: list("="); break;
      case Op::Not: list("not"); break;
      case Op::And: list("and"); break;
      case Op::Or: list("or"); break;
      case Op::Implies: list("=>"); break;
      case Op::Iff: list("="); break;
      case Op::Ite: list("ite"); break;
      case Op::EmptySet: out += empty_set(); break;
      case Op::Singleton:
        if (d_ == Dialect::Z3) {
          out += "(store " + empty_set() + " ";
          emit(e.arg(0), out);
          out += " true)";
        } else {
          list("set.singleton");
        }
        break;
      case Op::Union: list(d_ == Dialect::Z3 ? "(_ map or)" : "set.union"); break;
      case Op::Member:
        if (d_ == Dialect::Z3) {
          out += "(select ";
          emit(e.arg(1), out);
          out += ' ';
          emit(e.arg(0), out);
          out += ')';
        } else {
          list("set.member");
        }
        break;
      case Op::Forall: {
        out += "(forall (";
        for (std::size_t i = 0; i < e.bound().size(); ++i) {
          if (i) out += ' ';
          out += "(" + mangle(e.bound()[i].name().str()) + " " + sort(e.bound()[i].sort()) + ")";
        }
        out += ") ";
        emit(e.arg(0), out);
        out += ')';
        break;
      }
    }
  }

  Dialect d_;
};

// ---------------------------------------------------------------------------

class SolverSession {
public:
  explicit SolverSession(const SolverConfig& cfg) : cfg_(cfg), proc_(cfg.argv()) {}

  const SolverConfig& config() const { return cfg_; }
  SmtEncoder encoder() const { return SmtEncoder(cfg_.effective_dialect()); }

  void send(const std::string& text) { proc_.write(text); }

  // Reads one response. nullopt on timeout.
  std::optional<SExpr> read_response(Subprocess::Clock::time_point deadline) {
    auto text = proc_.read_until([](const std::string& b) { return SExprReader::complete(b); }, deadline);
    if (!text) return std::nullopt;
    SExprReader r(*text);
    auto first = r.next();
    if (!first) throw IoError("empty solver response");
    // keep whatever followed the first expression for the next read
    std::size_t consumed = consumed_prefix(*text);
    if (consumed < text->size()) proc_.unread(text->substr(consumed));
    return first;
  }

  Subprocess::Clock::time_point deadline() const {
    return Subprocess::Clock::now() +
           std::chrono::milliseconds(static_cast<long long>(cfg_.timeout_s * 1000.0));
  }

  // get-value for a batch of encoded terms; returns the raw value S-expressions.
  std::vector<SExpr> get_values(const std::vector<std::string>& terms) {
    std::vector<SExpr> out;
    out.reserve(terms.size());
    const std::size_t batch = 256;
    for (std::size_t i = 0; i < terms.size(); i += batch) {
      std::size_t end = std::min(terms.size(), i + batch);
      std::string cmd = "(get-value (";
      for (std::size_t j = i; j < end; ++j) {
        if (j > i) cmd += ' ';
        cmd += terms[j];
      }
      cmd += "))\n";
      send(cmd);
      auto resp = read_response(deadline());
      if (!resp) throw IoError("timeout in get-value");
      if (resp->head() == "error") throw IoError("solver refused get-value: " + resp->str());
      if (!resp->is_list() || resp->size() != end - i) throw IoError("malformed get-value response: " + resp->str());
      for (const auto& pair : resp->items) {
        if (!pair.is_list() || pair.size() != 2) throw IoError("malformed get-value pair: " + pair.str());
        out.push_back(pair[1]);
      }
    }
    return out;
  }

  void close() { proc_.kill(); }

private:
  static std::size_t consumed_prefix(const std::string& text) {
    return SExprReader::complete_prefix(text).value_or(text.size());
  }

  SolverConfig cfg_;
  Subprocess proc_;
};

struct SatResult {
  SatStatus status = SatStatus::Unknown;
  UnknownReason reason = UnknownReason::None;
  std::string detail;
  double seconds = 0;
  std::shared_ptr<SolverSession> session;  // live for SAT results

  bool sat() const { return status == SatStatus::Sat; }
  bool unsat() const { return status == SatStatus::Unsat; }
};

inline std::string smt_script(const std::vector<Expr>& assertions, const SolverConfig& cfg) {
  SmtEncoder enc(cfg.effective_dialect());
  std::string s = "(set-option :produce-models true)\n";
  if (cfg.seed) {
    if (cfg.effective_dialect() == Dialect::Z3) s += "(set-option :smt.random_seed " + std::to_string(*cfg.seed) + ")\n";
    else s += "(set-option :seed " + std::to_string(*cfg.seed) + ")\n";
  }
  s += "(set-logic " + cfg.logic + ")\n";
  s += enc.declarations(assertions);
  for (const auto& a : assertions) s += "(assert " + enc.term(a) + ")\n";
  return s;
}

inline SatResult check_sat(const std::vector<Expr>& assertions, const SolverConfig& cfg) {
  SatResult res;
  auto start = Subprocess::Clock::now();
  auto finish = [&]() {
    res.seconds = std::chrono::duration<double>(Subprocess::Clock::now() - start).count();
    return res;
  };
  for (const auto& a : assertions)
    if (!is_quantifier_free(a)) throw SortError("check_sat: assertion is not quantifier-free: " + a.str());
  std::shared_ptr<SolverSession> s;
  try {
    s = std::make_shared<SolverSession>(cfg);
    s->send(smt_script(assertions, cfg) + "(check-sat)\n");
    auto deadline = s->deadline();
    for (;;) {
      auto resp = s->read_response(deadline);
      if (!resp) {
        s->close();
        res.reason = UnknownReason::Timeout;
        res.detail = "no answer within " + std::to_string(cfg.timeout_s) + "s";
        return finish();
      }
      if (resp->head() == "error") {
        s->close();
        res.reason = UnknownReason::IoError;
        res.detail = resp->str();
        return finish();
      }
      if (resp->is("sat")) {
        res.status = SatStatus::Sat;
        res.session = s;
        return finish();
      }
      if (resp->is("unsat")) {
        s->close();
        res.status = SatStatus::Unsat;
        return finish();
      }
      if (resp->is("unknown")) {
        s->close();
        res.reason = UnknownReason::SolverUnknown;
        return finish();
      }
      // informational output such as "success" is skipped
    }
  } catch (const IoError& e) {
    if (s) s->close();
    res.status = SatStatus::Unknown;
    res.reason = UnknownReason::IoError;
    res.detail = e.what();
    return finish();
  }
}

// ---------------------------------------------------------------------------
// Model extraction

struct ExtractionRequest {
  std::vector<Expr> assertions;
  GroundTermSet terms;
  std::vector<Expr> int_pool;  // integer instantiation terms, their values form uk_ints
};

namespace detail {

inline std::optional<std::int64_t> parse_int_value(const SExpr& v) {
  if (v.is_atom) {
    try {
      std::size_t used = 0;
      long long x = std::stoll(v.atom, &used);
      if (used == v.atom.size()) return x;
    } catch (const std::exception&) {
    }
    return std::nullopt;
  }
  if (v.size() == 2 && v[0].is("-")) {
    auto inner = parse_int_value(v[1]);
    if (inner) return -*inner;
  }
  return std::nullopt;
}

inline std::optional<bool> parse_bool_value(const SExpr& v) {
  if (v.is("true")) return true;
  if (v.is("false")) return false;
  return std::nullopt;
}

struct SymbolInfo {
  Symbol name;
  std::vector<Sort> args;
  Sort result;
};

}  // namespace detail

inline FiniteModel extract_finite_model(SolverSession& s, const ExtractionRequest& req) {
  SmtEncoder enc = s.encoder();
  FiniteModel m;
  const std::size_t cap = s.config().max_table_queries;
  std::size_t queries = 0;

  // Symbols and ground subterms of the assertions.
  std::vector<detail::SymbolInfo> symbols;
  std::set<Symbol> seen_sym;
  std::vector<Expr> fg_terms = req.terms.terms;
  std::vector<Expr> int_terms, set_terms;
  ExprSet seen;
  for (const auto& t : fg_terms) seen.insert(t);
  std::vector<Expr> extra_fg;
  for (const auto& a : req.assertions)
    visit(a, [&](const Expr& x) {
      if ((x.is(Op::App) || x.is(Op::Const)) && !seen_sym.count(x.name())) {
        seen_sym.insert(x.name());
        std::vector<Sort> args;
        for (const auto& y : x.args()) args.push_back(y.sort());
        symbols.push_back({x.name(), args, x.sort()});
      }
      if (!is_ground(x) || x.sort().is_bool() || !seen.insert(x).second) return;
      if (x.sort().is_foreground()) extra_fg.push_back(x);
      else if (x.sort().is_int()) int_terms.push_back(x);
      else if (x.sort().is_set()) set_terms.push_back(x);
    });
  for (const auto& t : req.int_pool)
    if (seen.insert(t).second) int_terms.push_back(t);
  std::sort(extra_fg.begin(), extra_fg.end(), term_order);
  fg_terms.insert(fg_terms.end(), extra_fg.begin(), extra_fg.end());
  if (!fg_terms.empty()) m.fg = fg_terms[0].sort();

  auto encode_all = [&](const std::vector<Expr>& ts) {
    std::vector<std::string> out;
    out.reserve(ts.size());
    for (const auto& t : ts) out.push_back(enc.term(t));
    return out;
  };

  // Foreground classes.
  std::map<std::string, std::int64_t> class_of;
  std::vector<Expr> reps;
  {
    auto vals = s.get_values(encode_all(fg_terms));
    queries += fg_terms.size();
    for (std::size_t i = 0; i < fg_terms.size(); ++i) {
      std::string key = vals[i].str();
      auto it = class_of.find(key);
      std::int64_t id;
      if (it == class_of.end()) {
        id = static_cast<std::int64_t>(reps.size());
        class_of.emplace(key, id);
        reps.push_back(fg_terms[i]);
        m.elem_names.push_back(fg_terms[i].str());
      } else {
        id = it->second;
      }
      m.term_values[fg_terms[i]] = Value::elem(id);
    }
    m.num_elems = static_cast<std::int64_t>(reps.size());
  }
  for (const auto& t : req.terms.terms) {
    auto id = m.term_values.at(t).i;
    if (std::find(m.uk.begin(), m.uk.end(), id) == m.uk.end()) m.uk.push_back(id);
  }

  std::set<std::int64_t> ints;
  {
    auto vals = s.get_values(encode_all(int_terms));
    queries += int_terms.size();
    for (std::size_t i = 0; i < int_terms.size(); ++i) {
      auto v = detail::parse_int_value(vals[i]);
      if (!v) throw IoError("unexpected Int value " + vals[i].str());
      m.term_values[int_terms[i]] = Value::integer(*v);
      ints.insert(*v);
    }
    for (const auto& t : req.int_pool) {
      auto v = m.term_values.at(t).i;
      if (std::find(m.uk_ints.begin(), m.uk_ints.end(), v) == m.uk_ints.end()) m.uk_ints.push_back(v);
    }
  }

  for (const auto& sym : symbols) m.declare(sym.name, sym.args, sym.result);

  // Table points: (symbol, key, term). Symbols whose arguments are all
  // foreground first, so that their integer results join the universe.
  struct Point {
    Symbol sym;
    Key key;
    Expr term;
  };
  std::vector<Point> set_points;
  auto tabulate = [&](bool with_int_args) {
    for (const auto& sym : symbols) {
      bool has_int = std::any_of(sym.args.begin(), sym.args.end(), [](const Sort& x) { return x.is_int(); });
      if (has_int != with_int_args) continue;
      if (sym.args.size() > Key::max_arity) continue;
      if (std::any_of(sym.args.begin(), sym.args.end(), [](const Sort& x) { return x.is_set(); })) continue;
      std::vector<std::vector<std::pair<Expr, std::int64_t>>> domains;
      for (const auto& a : sym.args) {
        std::vector<std::pair<Expr, std::int64_t>> d;
        if (a.is_foreground())
          for (std::size_t e = 0; e < reps.size(); ++e) d.emplace_back(reps[e], static_cast<std::int64_t>(e));
        else if (a.is_int())
          for (auto i : ints) d.emplace_back(mk_int(i), i);
        else if (a.is_bool()) {
          d.emplace_back(mk_false(), 0);
          d.emplace_back(mk_true(), 1);
        }
        domains.push_back(std::move(d));
      }
      std::size_t count = 1;
      for (const auto& d : domains) count *= d.size();
      if (count == 0 || queries + count > cap) continue;
      std::vector<Point> points;
      std::vector<std::size_t> idx(domains.size(), 0);
      for (;;) {
        std::vector<Expr> args;
        Key k;
        k.n = static_cast<std::uint8_t>(domains.size());
        for (std::size_t j = 0; j < domains.size(); ++j) {
          args.push_back(domains[j][idx[j]].first);
          k.v[j] = domains[j][idx[j]].second;
        }
        points.push_back({sym.name, k, mk_app(sym.name, sym.result, args)});
        std::size_t p = domains.size();
        bool done = true;
        while (p > 0) {
          --p;
          if (++idx[p] < domains[p].size()) {
            done = false;
            break;
          }
          idx[p] = 0;
        }
        if (done) break;
      }
      if (sym.result.is_set()) {
        set_points.insert(set_points.end(), points.begin(), points.end());
        continue;
      }
      std::vector<Expr> ts;
      for (const auto& p : points) ts.push_back(p.term);
      auto vals = s.get_values(encode_all(ts));
      queries += ts.size();
      for (std::size_t i = 0; i < points.size(); ++i) {
        Value v;
        if (sym.result.is_foreground()) {
          auto it = class_of.find(vals[i].str());
          if (it == class_of.end()) continue;  // element outside the extracted universe
          v = Value::elem(it->second);
        } else if (sym.result.is_int()) {
          auto x = detail::parse_int_value(vals[i]);
          if (!x) continue;
          v = Value::integer(*x);
          if (!with_int_args) ints.insert(*x);
        } else if (sym.result.is_bool()) {
          auto b = detail::parse_bool_value(vals[i]);
          if (!b) continue;
          v = Value::boolean(*b);
        }
        m.set(points[i].sym, points[i].key, v);
      }
    }
  };
  tabulate(false);
  tabulate(true);
  m.ints.assign(ints.begin(), ints.end());

  // Sets: membership bits over the integer universe, then equality classes
  // among sets whose known bits agree.
  std::vector<Expr> all_sets = set_terms;
  for (const auto& p : set_points) all_sets.push_back(p.term);
  if (!all_sets.empty()) {
    std::vector<std::string> qs;
    for (const auto& t : all_sets)
      for (auto i : m.ints) qs.push_back(enc.term(mk_member(mk_int(i), t)));
    std::vector<SExpr> bits;
    if (queries + qs.size() <= cap) {
      bits = s.get_values(qs);
      queries += qs.size();
    }
    std::vector<SetValue> svals(all_sets.size());
    for (std::size_t t = 0; t < all_sets.size() && !bits.empty(); ++t)
      for (std::size_t j = 0; j < m.ints.size(); ++j) {
        auto b = detail::parse_bool_value(bits[t * m.ints.size() + j]);
        if (b) svals[t].bits[m.ints[j]] = *b;
      }
    std::vector<std::size_t> class_rep;  // index into all_sets
    for (std::size_t t = 0; t < all_sets.size(); ++t) {
      std::vector<std::size_t> candidates;
      for (std::size_t c = 0; c < class_rep.size(); ++c)
        if (svals[class_rep[c]].bits == svals[t].bits) candidates.push_back(c);
      std::int64_t cls = -1;
      if (!candidates.empty()) {
        std::vector<std::string> eqs;
        for (auto c : candidates) eqs.push_back("(= " + enc.term(all_sets[t]) + " " + enc.term(all_sets[class_rep[c]]) + ")");
        auto res = s.get_values(eqs);
        queries += eqs.size();
        for (std::size_t i = 0; i < candidates.size(); ++i)
          if (res[i].is("true")) {
            cls = static_cast<std::int64_t>(candidates[i]);
            break;
          }
      }
      if (cls < 0) {
        cls = static_cast<std::int64_t>(class_rep.size());
        class_rep.push_back(t);
      }
      svals[t].cls = cls;
    }
    for (std::size_t t = 0; t < set_terms.size(); ++t) m.term_values[set_terms[t]] = Value::of_set(svals[t]);
    for (std::size_t i = 0; i < set_points.size(); ++i)
      m.set(set_points[i].sym, set_points[i].key, Value::of_set(svals[set_terms.size() + i]));
  }

  // Points reached through ground subterms whose arguments are known.
  for (const auto& [term, val] : m.term_values) {
    if (!(term.is(Op::App) || term.is(Op::Const))) continue;
    std::vector<Value> args;
    bool ok = true;
    for (const auto& a : term.args()) {
      auto it = m.term_values.find(a);
      if (it == m.term_values.end()) {
        ok = false;
        break;
      }
      args.push_back(it->second);
    }
    if (!ok) continue;
    auto k = make_key(args);
    if (!k) continue;
    auto& table = m.interp.at(term.name()).table;
    if (!table.count(*k)) table[*k] = val;
  }
  return m;
}

}  // namespace lemsynth
