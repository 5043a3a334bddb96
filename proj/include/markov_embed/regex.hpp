#pragma once

// Regular expressions over a model alphabet.
//
//   alternation ::= concat ('|' concat)*
//   concat      ::= repeat*
//   repeat      ::= atom ('*' | '+' | '?')*
//   atom        ::= '(' alternation ')' | '[' member+ ']' | member
//   member      ::= '{' name '}' | symbol        (longest alphabet name wins)
//
// An empty concatenation denotes the empty word.

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "markov_embed/alphabet.hpp"
#include "markov_embed/error.hpp"

namespace markov_embed {

struct Regex {
  enum class Kind { empty, symbol, symbol_class, concat, alternation, star, plus, optional };

  Kind kind = Kind::empty;
  std::vector<Symbol> symbols;  // symbol: one entry; symbol_class: sorted, distinct
  std::vector<Regex> children;

  static Regex empty() { return {}; }
  static Regex literal(Symbol s) { return {Kind::symbol, {s}, {}}; }
  static Regex symbol_class(std::vector<Symbol> s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return {Kind::symbol_class, std::move(s), {}};
  }
  static Regex concat(std::vector<Regex> parts) { return {Kind::concat, {}, std::move(parts)}; }
  static Regex alternation(std::vector<Regex> parts) { return {Kind::alternation, {}, std::move(parts)}; }
  static Regex star(Regex r) { return {Kind::star, {}, {std::move(r)}}; }
  static Regex plus(Regex r) { return {Kind::plus, {}, {std::move(r)}}; }
  static Regex optional(Regex r) { return {Kind::optional, {}, {std::move(r)}}; }

  friend bool operator==(const Regex&, const Regex&) = default;
};

inline std::size_t node_count(const Regex& r) {
  std::size_t n = 1;
  for (const Regex& c : r.children) n += node_count(c);
  return n;
}

/// True when the empty word belongs to the language.
inline bool nullable(const Regex& r) {
  switch (r.kind) {
    case Regex::Kind::empty:
    case Regex::Kind::star:
    case Regex::Kind::optional:
      return true;
    case Regex::Kind::symbol:
    case Regex::Kind::symbol_class:
      return false;
    case Regex::Kind::plus:
      return nullable(r.children[0]);
    case Regex::Kind::concat:
      return std::all_of(r.children.begin(), r.children.end(), [](const Regex& c) { return nullable(c); });
    case Regex::Kind::alternation:
      return std::any_of(r.children.begin(), r.children.end(), [](const Regex& c) { return nullable(c); });
  }
  return false;
}

/// Fully parenthesised rendering, mainly for diagnostics.
inline std::string to_string(const Regex& r, const Alphabet& alphabet) {
  auto sym = [&](Symbol s) {
    const std::string& n = alphabet.name(s);
    return n.size() == 1 ? n : "{" + n + "}";
  };
  switch (r.kind) {
    case Regex::Kind::empty:
      return "()";
    case Regex::Kind::symbol:
      return sym(r.symbols[0]);
    case Regex::Kind::symbol_class: {
      std::string s = "[";
      for (Symbol a : r.symbols) s += sym(a);
      return s + "]";
    }
    case Regex::Kind::concat: {
      std::string s = "(";
      for (const Regex& c : r.children) s += to_string(c, alphabet);
      return s + ")";
    }
    case Regex::Kind::alternation: {
      std::string s = "(";
      for (std::size_t i = 0; i < r.children.size(); ++i) s += (i ? "|" : "") + to_string(r.children[i], alphabet);
      return s + ")";
    }
    case Regex::Kind::star:
      return to_string(r.children[0], alphabet) + "*";
    case Regex::Kind::plus:
      return to_string(r.children[0], alphabet) + "+";
    case Regex::Kind::optional:
      return to_string(r.children[0], alphabet) + "?";
  }
  return {};
}

namespace detail {

class RegexParser {
 public:
  RegexParser(std::string_view text, const Alphabet& alphabet) : text_(text), alphabet_(alphabet) {}

  Regex parse() {
    Regex r = alternation();
    if (pos_ != text_.size()) {
      if (text_[pos_] == ')') throw SyntaxError("unbalanced ')'", pos_);
      throw SyntaxError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    }
    return r;
  }

 private:
  static bool is_meta(char c) {
    return c == '|' || c == '(' || c == ')' || c == '*' || c == '+' || c == '?' || c == '[' || c == ']' ||
           c == '{' || c == '}';
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  Regex alternation() {
    std::vector<Regex> parts{concat()};
    while (!at_end() && peek() == '|') {
      ++pos_;
      parts.push_back(concat());
    }
    return parts.size() == 1 ? std::move(parts[0]) : Regex::alternation(std::move(parts));
  }

  Regex concat() {
    std::vector<Regex> parts;
    while (!at_end() && peek() != '|' && peek() != ')') parts.push_back(repeat());
    if (parts.empty()) return Regex::empty();
    return parts.size() == 1 ? std::move(parts[0]) : Regex::concat(std::move(parts));
  }

  Regex repeat() {
    Regex r = atom();
    while (!at_end()) {
      char c = peek();
      if (c == '*') {
        r = Regex::star(std::move(r));
      } else if (c == '+') {
        r = Regex::plus(std::move(r));
      } else if (c == '?') {
        r = Regex::optional(std::move(r));
      } else {
        break;
      }
      ++pos_;
    }
    return r;
  }

  Regex atom() {
    char c = peek();
    if (c == '(') {
      std::size_t open = pos_++;
      Regex r = alternation();
      if (at_end() || peek() != ')') throw SyntaxError("unbalanced '('", open);
      ++pos_;
      return r;
    }
    if (c == '[') {
      std::size_t open = pos_++;
      std::vector<Symbol> members;
      while (!at_end() && peek() != ']') members.push_back(member());
      if (at_end()) throw SyntaxError("unterminated '['", open);
      if (members.empty()) throw SyntaxError("empty symbol class", open);
      ++pos_;
      return Regex::symbol_class(std::move(members));
    }
    if (c == '*' || c == '+' || c == '?') throw SyntaxError(std::string("nothing to repeat before '") + c + "'", pos_);
    return Regex::literal(member());
  }

  Symbol member() {
    char c = peek();
    if (c == '{') {
      std::size_t open = pos_;
      std::size_t close = text_.find('}', pos_);
      if (close == std::string_view::npos) throw SyntaxError("unterminated '{'", open);
      std::string name(text_.substr(pos_ + 1, close - pos_ - 1));
      if (!alphabet_.contains(name)) throw InputError("unknown symbol '" + name + "' at offset " + std::to_string(open));
      pos_ = close + 1;
      return alphabet_.index(name);
    }
    if (is_meta(c)) throw SyntaxError(std::string("unexpected '") + c + "'", pos_);
    std::size_t best = 0;
    Symbol best_symbol = 0;
    for (Symbol s = 0; s < alphabet_.size(); ++s) {
      const std::string& n = alphabet_.name(s);
      if (n.size() > best && text_.substr(pos_, n.size()) == n) {
        best = n.size();
        best_symbol = s;
      }
    }
    if (best == 0)
      throw InputError("unknown symbol '" + std::string(1, c) + "' at offset " + std::to_string(pos_));
    pos_ += best;
    return best_symbol;
  }

  std::string_view text_;
  const Alphabet& alphabet_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Regex parse_regex(std::string_view text, const Alphabet& alphabet) {
  return detail::RegexParser(text, alphabet).parse();
}

}  // namespace markov_embed
