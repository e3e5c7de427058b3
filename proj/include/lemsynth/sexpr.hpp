#pragma once

// Minimal S-expression reader shared by the problem parser, the SMT-LIB2
// response reader and the SyGuS checker.

#include <cctype>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lemsynth {

struct SourcePos {
  int line = 1;
  int column = 1;
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, SourcePos pos)
    : std::runtime_error(format(what, pos)), pos_(pos) {}

  SourcePos pos() const { return pos_; }

private:
  static std::string format(const std::string& what, SourcePos pos) {
    return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + what;
  }
  SourcePos pos_;
};

struct SExpr {
  bool is_atom = true;
  std::string atom;
  std::vector<SExpr> items;
  SourcePos pos;

  static SExpr make_atom(std::string text, SourcePos pos = {}) {
    SExpr s;
    s.atom = std::move(text);
    s.pos = pos;
    return s;
  }
  static SExpr make_list(std::vector<SExpr> items, SourcePos pos = {}) {
    SExpr s;
    s.is_atom = false;
    s.items = std::move(items);
    s.pos = pos;
    return s;
  }

  bool is_list() const { return !is_atom; }
  bool is(std::string_view text) const { return is_atom && atom == text; }
  std::size_t size() const { return items.size(); }
  const SExpr& operator[](std::size_t i) const { return items.at(i); }

  // Head symbol of a non-empty list whose first item is an atom, else "".
  std::string_view head() const {
    if (is_atom || items.empty() || !items[0].is_atom) return {};
    return items[0].atom;
  }

  std::string str() const {
    if (is_atom) return atom;
    std::string out = "(";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ' ';
      out += items[i].str();
    }
    out += ')';
    return out;
  }

  bool operator==(const SExpr& o) const {
    if (is_atom != o.is_atom) return false;
    return is_atom ? atom == o.atom : items == o.items;
  }
};

// Reads a sequence of S-expressions. `;` starts a comment to end of line.
// `|quoted symbols|` and `"strings"` are kept verbatim as atoms.
class SExprReader {
public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  // Returns nullopt at end of input.
  std::optional<SExpr> next() {
    skip_ws();
    if (at_end()) return std::nullopt;
    return read();
  }

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    while (auto e = next()) out.push_back(std::move(*e));
    return out;
  }

  // Length of the shortest prefix holding one complete expression, if any.
  static std::optional<std::size_t> complete_prefix(std::string_view text) {
    int depth = 0;
    bool in_bar = false, in_str = false, in_comment = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
      char c = text[i];
      if (in_comment) {
        if (c == '\n') in_comment = false;
        continue;
      }
      if (in_bar) {
        if (c == '|') {
          in_bar = false;
          if (depth == 0) return i + 1;
        }
        continue;
      }
      if (in_str) {
        if (c == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') ++i;
          else {
            in_str = false;
            if (depth == 0) return i + 1;
          }
        }
        continue;
      }
      switch (c) {
        case ';': in_comment = true; break;
        case '|': in_bar = true; break;
        case '"': in_str = true; break;
        case '(': ++depth; break;
        case ')':
          if (--depth == 0) return i + 1;
          break;
        default:
          if (depth == 0 && !std::isspace(static_cast<unsigned char>(c))) {
            // a bare atom is complete once something delimits it
            std::size_t j = i;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '(' &&
                   text[j] != ')')
              ++j;
            if (j < text.size()) return j;
            return std::nullopt;
          }
      }
    }
    return std::nullopt;
  }

  static bool complete(std::string_view text) { return complete_prefix(text).has_value(); }

private:
  bool at_end() const { return i_ >= text_.size(); }
  char peek() const { return text_[i_]; }

  void advance() {
    if (text_[i_] == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else {
      ++pos_.column;
    }
    ++i_;
  }

  void skip_ws() {
    while (!at_end()) {
      char c = peek();
      if (c == ';') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    SourcePos start = pos_;
    char c = peek();
    if (c == '(') {
      advance();
      std::vector<SExpr> items;
      for (;;) {
        skip_ws();
        if (at_end()) throw ParseError("unbalanced '('", start);
        if (peek() == ')') {
          advance();
          break;
        }
        items.push_back(read());
      }
      return SExpr::make_list(std::move(items), start);
    }
    if (c == ')') throw ParseError("unexpected ')'", start);
    std::string atom;
    if (c == '|') {
      atom += c;
      advance();
      while (!at_end() && peek() != '|') {
        atom += peek();
        advance();
      }
      if (at_end()) throw ParseError("unterminated quoted symbol", start);
      atom += '|';
      advance();
      return SExpr::make_atom(std::move(atom), start);
    }
    if (c == '"') {
      atom += c;
      advance();
      for (;;) {
        if (at_end()) throw ParseError("unterminated string", start);
        char d = peek();
        atom += d;
        advance();
        if (d == '"') {
          if (!at_end() && peek() == '"') {
            atom += '"';
            advance();
            continue;
          }
          break;
        }
      }
      return SExpr::make_atom(std::move(atom), start);
    }
    while (!at_end()) {
      char d = peek();
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') break;
      atom += d;
      advance();
    }
    return SExpr::make_atom(std::move(atom), start);
  }

  std::string_view text_;
  std::size_t i_ = 0;
  SourcePos pos_;
};

inline std::vector<SExpr> parse_sexprs(std::string_view text) {
  return SExprReader(text).read_all();
}

}  // namespace lemsynth
