#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "markov_embed/error.hpp"

namespace markov_embed {

using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;
using WordView = std::span<const Symbol>;

/// Ordered finite set of symbol names; a symbol is its index.
class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw InputError("alphabet must contain at least one symbol");
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (symbols_[i].empty()) throw InputError("alphabet symbol names must be non-empty");
      if (!index_.emplace(symbols_[i], static_cast<Symbol>(i)).second)
        throw InputError("duplicate alphabet symbol '" + symbols_[i] + "'");
      if (symbols_[i].size() > 1) multi_char_ = true;
    }
  }

  /// Convenience for the common {"0","1"} alphabet.
  static Alphabet binary() { return Alphabet({"0", "1"}); }

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::string& name(Symbol s) const { return symbols_.at(s); }
  bool has_multi_char_symbols() const noexcept { return multi_char_; }

  bool contains(std::string_view name) const { return index_.count(std::string(name)) != 0; }

  Symbol index(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw InputError("unknown symbol '" + std::string(name) + "'");
    return it->second;
  }

  void validate(WordView word) const {
    for (Symbol s : word)
      if (s >= symbols_.size()) throw InputError("symbol index " + std::to_string(s) + " outside alphabet");
  }

  /// Single-character alphabets concatenate; otherwise names join with "·".
  std::string format(WordView word) const {
    std::string out;
    for (std::size_t i = 0; i < word.size(); ++i) {
      if (multi_char_ && i > 0) out += "·";
      out += name(word[i]);
    }
    return out;
  }

  Word parse(std::string_view text) const {
    Word word;
    if (text.empty()) return word;
    if (multi_char_) {
      static constexpr std::string_view sep = "·";
      std::size_t start = 0;
      while (true) {
        std::size_t pos = text.find(sep, start);
        std::string_view part = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        word.push_back(index(part));
        if (pos == std::string_view::npos) break;
        start = pos + sep.size();
      }
      return word;
    }
    for (char c : text) word.push_back(index(std::string_view(&c, 1)));
    return word;
  }

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.symbols_ == b.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, Symbol> index_;
  bool multi_char_ = false;
};

}  // namespace markov_embed
