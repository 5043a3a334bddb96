#pragma once

// Adapted embeddings: maps from nonempty prefixes to state labels.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "markov_embed/alphabet.hpp"
#include "markov_embed/automata.hpp"
#include "markov_embed/error.hpp"
#include "markov_embed/source.hpp"

namespace markov_embed {

class Transformation {
 public:
  enum class Kind { constant, last_k, automaton, source_state, time_index, table, product };

  static Transformation constant(std::string label = "*") {
    Transformation t(Kind::constant);
    t.node_->label = std::move(label);
    return t;
  }

  /// Last k symbols; shorter prefixes map to themselves.
  static Transformation last_k_symbols(std::size_t k) {
    if (k == 0) throw InputError("last_k_symbols needs k >= 1");
    Transformation t(Kind::last_k);
    t.node_->k = k;
    return t;
  }

  /// State of `ma` after reading the prefix, labelled "q<id>".
  static Transformation automaton_state(std::shared_ptr<const MatchingAutomaton> ma) {
    if (!ma) throw InputError("automaton_state needs an automaton");
    Transformation t(Kind::automaton);
    t.node_->automaton = std::move(ma);
    return t;
  }
  static Transformation automaton_state(MatchingAutomaton ma) {
    return automaton_state(std::make_shared<const MatchingAutomaton>(std::move(ma)));
  }

  template <Probability T>
  static Transformation source_state(const SourceModel<T>& source) {
    if (!source.has_state())
      throw UnsupportedError(source.name() + " exposes no state; use coarsest_markov_refinement instead");
    Transformation t(Kind::source_state);
    t.node_->state_of = [source](WordView w) { return source.state_label(w); };
    t.node_->finite_source = source.kind() == SourceKind::finite_state;
    return t;
  }

  /// Prefix length.
  static Transformation time_index() { return Transformation(Kind::time_index); }

  /// Explicit prefix -> label map; `marks` optionally flags occurrence positions.
  static Transformation table(std::map<Word, std::string> labels, std::map<Word, bool> marks = {}) {
    Transformation t(Kind::table);
    t.node_->labels = std::move(labels);
    t.node_->marks = std::move(marks);
    return t;
  }

  static Transformation product(std::vector<Transformation> factors) {
    if (factors.empty()) throw InputError("product needs at least one factor");
    Transformation t(Kind::product);
    t.node_->factors = std::move(factors);
    return t;
  }

  Kind kind() const noexcept { return node_->kind; }
  const std::vector<Transformation>& factors() const noexcept { return node_->factors; }
  std::size_t k() const noexcept { return node_->k; }
  const MatchingAutomaton* automaton() const noexcept { return node_->automaton.get(); }
  const std::map<Word, std::string>& table_labels() const noexcept { return node_->labels; }

  std::string apply(const Alphabet& alphabet, WordView prefix) const {
    if (prefix.empty()) throw InputError("transformations are defined on nonempty prefixes only");
    const Node& n = *node_;
    switch (n.kind) {
      case Kind::constant:
        return n.label;
      case Kind::last_k: {
        std::size_t keep = std::min(n.k, prefix.size());
        return alphabet.format(prefix.last(keep));
      }
      case Kind::automaton:
        return "q" + std::to_string(n.automaton->dfa.run(prefix));
      case Kind::source_state:
        return n.state_of(prefix);
      case Kind::time_index:
        return std::to_string(prefix.size());
      case Kind::table: {
        auto it = n.labels.find(Word(prefix.begin(), prefix.end()));
        if (it == n.labels.end())
          throw InputError("table transformation has no label for '" + alphabet.format(prefix) + "'");
        return it->second;
      }
      case Kind::product: {
        std::string s = "(";
        for (std::size_t i = 0; i < n.factors.size(); ++i) s += (i ? "," : "") + n.factors[i].apply(alphabet, prefix);
        return s + ")";
      }
    }
    return {};
  }

  /// Whether a pattern occurrence ends here, taken from the first automaton
  /// coordinate (or table marks). Empty when the transformation has none.
  std::optional<bool> marked(WordView prefix) const {
    const Node& n = *node_;
    switch (n.kind) {
      case Kind::automaton:
        return static_cast<bool>(n.automaton->dfa.accepting[n.automaton->dfa.run(prefix)]);
      case Kind::table: {
        if (n.marks.empty()) return std::nullopt;
        auto it = n.marks.find(Word(prefix.begin(), prefix.end()));
        if (it == n.marks.end()) return std::nullopt;
        return it->second;
      }
      case Kind::product:
        for (const Transformation& f : n.factors)
          if (auto m = f.marked(prefix)) return m;
        return std::nullopt;
      default:
        return std::nullopt;
    }
  }

  bool has_marker() const {
    const Node& n = *node_;
    if (n.kind == Kind::automaton) return true;
    if (n.kind == Kind::table) return !n.marks.empty();
    if (n.kind == Kind::product)
      for (const Transformation& f : n.factors)
        if (f.has_marker()) return true;
    return false;
  }

  /// Every coordinate is a finite-state function of the prefix.
  bool finite_memory() const {
    const Node& n = *node_;
    switch (n.kind) {
      case Kind::constant:
      case Kind::last_k:
      case Kind::automaton:
        return true;
      case Kind::source_state:
        return n.finite_source;
      case Kind::time_index:
      case Kind::table:
        return false;
      case Kind::product:
        for (const Transformation& f : n.factors)
          if (!f.finite_memory()) return false;
        return true;
    }
    return false;
  }

  std::string describe() const {
    const Node& n = *node_;
    switch (n.kind) {
      case Kind::constant:
        return "constant";
      case Kind::last_k:
        return "last_k_symbols(" + std::to_string(n.k) + ")";
      case Kind::automaton:
        return "automaton_state(" + n.automaton->pattern + ")";
      case Kind::source_state:
        return "source_state";
      case Kind::time_index:
        return "time_index";
      case Kind::table:
        return "table(" + std::to_string(n.labels.size()) + " entries)";
      case Kind::product: {
        std::string s = "product(";
        for (std::size_t i = 0; i < n.factors.size(); ++i) s += (i ? ", " : "") + n.factors[i].describe();
        return s + ")";
      }
    }
    return {};
  }

 private:
  struct Node {
    Kind kind;
    std::string label;
    std::size_t k = 0;
    std::shared_ptr<const MatchingAutomaton> automaton;
    std::function<std::string(WordView)> state_of;
    bool finite_source = false;
    std::map<Word, std::string> labels;
    std::map<Word, bool> marks;
    std::vector<Transformation> factors;
  };

  explicit Transformation(Kind kind) : node_(std::make_shared<Node>()) { node_->kind = kind; }

  std::shared_ptr<Node> node_;
};

}  // namespace markov_embed
