#pragma once

// Laws of finite-alphabet random strings, given by next-symbol conditionals.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "markov_embed/alphabet.hpp"
#include "markov_embed/error.hpp"
#include "markov_embed/scalar.hpp"

namespace markov_embed {

enum class SourceKind { finite_state, general };

inline constexpr double kDistributionTolerance = 1e-12;

/// Throws InputError unless `p` is a probability vector over `size` symbols.
template <Probability T>
void check_distribution(const std::vector<T>& p, std::size_t size, const std::string& where) {
  if (p.size() != size)
    throw InputError(where + ": expected " + std::to_string(size) + " probabilities, got " + std::to_string(p.size()));
  T sum(0);
  for (const T& x : p) {
    if (x < T(0)) throw InputError(where + ": negative probability " + format_probability(x));
    sum += x;
  }
  if (!nearly_equal(sum, T(1), kDistributionTolerance))
    throw InputError(where + ": probabilities sum to " + format_probability(sum) + ", not 1");
}

template <Probability T>
class SourceModel {
 public:
  using Vector = std::vector<T>;
  using ConditionalFn = std::function<Vector(WordView)>;
  using StateFn = std::function<std::string(WordView)>;

  /// Explicit sufficient-statistic automaton of a finite_state source.
  struct StateTable {
    std::vector<std::string> labels;
    std::size_t initial = 0;
    std::vector<std::vector<std::size_t>> next;  // [state][symbol]
    std::vector<Vector> emit;                     // [state]
  };

  /// `direct` is an optional closed-form conditional used to cross-check the
  /// state folding; it is never consulted by `conditional`.
  static SourceModel finite_state(Alphabet alphabet, StateTable table, std::string name,
                                  ConditionalFn direct = {}) {
    const std::size_t n = table.labels.size();
    if (n == 0 || table.initial >= n || table.next.size() != n || table.emit.size() != n)
      throw InputError(name + ": inconsistent state table");
    for (std::size_t s = 0; s < n; ++s) {
      if (table.next[s].size() != alphabet.size())
        throw InputError(name + ": state " + table.labels[s] + " lacks a successor for some symbol");
      for (std::size_t t : table.next[s])
        if (t >= n) throw InputError(name + ": successor outside the state set");
      check_distribution(table.emit[s], alphabet.size(), name + " state " + table.labels[s]);
    }
    SourceModel m;
    m.alphabet_ = std::move(alphabet);
    m.kind_ = SourceKind::finite_state;
    m.name_ = std::move(name);
    m.table_ = std::make_shared<const StateTable>(std::move(table));
    m.direct_ = std::move(direct);
    return m;
  }

  static SourceModel general(Alphabet alphabet, ConditionalFn conditional, std::string name,
                             StateFn state_of = {}) {
    if (!conditional) throw InputError(name + ": missing conditional law");
    SourceModel m;
    m.alphabet_ = std::move(alphabet);
    m.kind_ = SourceKind::general;
    m.name_ = std::move(name);
    m.conditional_ = std::move(conditional);
    m.state_of_ = std::move(state_of);
    return m;
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  SourceKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  bool has_state() const noexcept { return kind_ == SourceKind::finite_state || static_cast<bool>(state_of_); }
  const StateTable* table() const noexcept { return table_.get(); }
  bool has_direct_conditional() const noexcept { return static_cast<bool>(direct_); }

  std::size_t state_index(WordView prefix) const {
    if (!table_) throw UnsupportedError(name_ + ": not a finite_state source");
    alphabet_.validate(prefix);
    std::size_t s = table_->initial;
    for (Symbol a : prefix) s = table_->next[s][a];
    return s;
  }

  std::string state_label(WordView prefix) const {
    if (table_) return table_->labels[state_index(prefix)];
    if (!state_of_) throw UnsupportedError(name_ + ": source exposes no state");
    alphabet_.validate(prefix);
    return state_of_(prefix);
  }

  Vector conditional(WordView prefix) const {
    if (table_) return table_->emit[state_index(prefix)];
    alphabet_.validate(prefix);
    Vector p = conditional_(prefix);
    check_distribution(p, alphabet_.size(), name_ + " conditional after '" + alphabet_.format(prefix) + "'");
    return p;
  }

  /// Closed-form evaluation that bypasses the state table (finite_state only).
  Vector direct_conditional(WordView prefix) const {
    if (!direct_) throw UnsupportedError(name_ + ": no direct conditional");
    alphabet_.validate(prefix);
    return direct_(prefix);
  }

  T prefix_probability(WordView word) const {
    alphabet_.validate(word);
    T p(1);
    if (table_) {
      std::size_t s = table_->initial;
      for (Symbol a : word) {
        p *= table_->emit[s][a];
        s = table_->next[s][a];
      }
      return p;
    }
    for (std::size_t i = 0; i < word.size(); ++i) {
      Vector c = conditional(word.first(i));
      p *= c[word[i]];
      if (p == T(0)) break;
    }
    return p;
  }

 private:
  SourceModel() = default;

  Alphabet alphabet_;
  SourceKind kind_ = SourceKind::general;
  std::string name_;
  std::shared_ptr<const StateTable> table_;
  ConditionalFn conditional_;
  ConditionalFn direct_;
  StateFn state_of_;
};

/// Built-in source constructors. Parameters are exact rationals; floating
/// mode converts them once.
namespace sources {

namespace detail {

template <Probability T>
std::vector<T> convert(const std::vector<Rational>& p) {
  std::vector<T> out;
  out.reserve(p.size());
  for (const Rational& q : p) out.push_back(from_rational<T>(q));
  return out;
}

template <Probability T>
std::vector<T> uniform(std::size_t n) {
  return convert<T>(std::vector<Rational>(n, Rational(1, static_cast<unsigned long>(n))));
}

}  // namespace detail

template <Probability T>
SourceModel<T> iid(const Alphabet& alphabet, const std::vector<Rational>& p) {
  check_distribution(p, alphabet.size(), "iid probabilities");
  typename SourceModel<T>::StateTable table;
  table.labels = {"*"};
  table.next = {std::vector<std::size_t>(alphabet.size(), 0)};
  table.emit = {detail::convert<T>(p)};
  auto emit = table.emit[0];
  return SourceModel<T>::finite_state(alphabet, std::move(table), "iid",
                                      [emit](WordView) { return emit; });
}

/// Order-k Markov source. `rows` maps every length-k context to its next-symbol
/// law; `short_rows` optionally covers contexts shorter than k (uniform otherwise).
template <Probability T>
SourceModel<T> markov(const Alphabet& alphabet, std::size_t order,
                      const std::map<Word, std::vector<Rational>>& rows,
                      const std::map<Word, std::vector<Rational>>& short_rows = {}) {
  if (order > 4) throw InputError("markov order must be at most 4");
  const std::size_t m = alphabet.size();
  std::vector<Word> contexts{Word{}};
  std::map<Word, std::size_t> index{{Word{}, 0}};
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    if (contexts[i].size() == order) continue;
    for (Symbol a = 0; a < m; ++a) {
      Word w = contexts[i];
      w.push_back(a);
      index.emplace(w, contexts.size());
      contexts.push_back(std::move(w));
    }
  }
  auto law_of = [&](const Word& ctx) -> std::vector<Rational> {
    const auto& source = ctx.size() == order ? rows : short_rows;
    auto it = source.find(ctx);
    if (it != source.end()) return it->second;
    if (ctx.size() == order)
      throw InputError("markov: missing row for context '" + alphabet.format(ctx) + "'");
    return std::vector<Rational>(m, Rational(1, static_cast<unsigned long>(m)));
  };
  for (const auto& [ctx, row] : rows)
    if (ctx.size() != order) throw InputError("markov: row context '" + alphabet.format(ctx) + "' has wrong length");
  for (const auto& [ctx, row] : short_rows)
    if (ctx.size() >= order) throw InputError("markov: short context '" + alphabet.format(ctx) + "' too long");

  typename SourceModel<T>::StateTable table;
  std::map<Word, std::vector<T>> laws;
  for (const Word& ctx : contexts) {
    std::vector<Rational> law = law_of(ctx);
    check_distribution(law, m, "markov row '" + alphabet.format(ctx) + "'");
    table.labels.push_back("[" + alphabet.format(ctx) + "]");
    table.emit.push_back(detail::convert<T>(law));
    laws.emplace(ctx, table.emit.back());
    std::vector<std::size_t> next(m);
    for (Symbol a = 0; a < m; ++a) {
      Word w = ctx;
      w.push_back(a);
      if (w.size() > order) w.erase(w.begin());
      next[a] = index.at(w);
    }
    table.next.push_back(std::move(next));
  }
  auto direct = [laws, order](WordView prefix) {
    std::size_t keep = std::min(order, prefix.size());
    Word ctx(prefix.end() - static_cast<std::ptrdiff_t>(keep), prefix.end());
    return laws.at(ctx);
  };
  return SourceModel<T>::finite_state(alphabet, std::move(table), "markov" + std::to_string(order), direct);
}

/// Pólya urn: drawing symbol a adds `reinforcement` balls of colour a.
template <Probability T>
SourceModel<T> polya_urn(const Alphabet& alphabet, std::vector<long> composition, long reinforcement) {
  if (composition.size() != alphabet.size())
    throw InputError("polya_urn: composition must list one count per symbol");
  long total = 0;
  for (long c : composition) {
    if (c < 0) throw InputError("polya_urn: negative ball count");
    total += c;
  }
  if (total <= 0) throw InputError("polya_urn: urn must start with at least one ball");
  if (reinforcement < 0) throw InputError("polya_urn: negative reinforcement");
  const std::size_t m = alphabet.size();
  auto counts = [m](WordView prefix) {
    std::vector<long> c(m, 0);
    for (Symbol a : prefix) ++c[a];
    return c;
  };
  auto conditional = [=](WordView prefix) {
    std::vector<long> c = counts(prefix);
    long denom = total + reinforcement * static_cast<long>(prefix.size());
    std::vector<Rational> p(m);
    for (std::size_t a = 0; a < m; ++a) p[a] = Rational(composition[a] + reinforcement * c[a], denom);
    for (auto& q : p) q.canonicalize();
    return detail::convert<T>(p);
  };
  auto state_of = [=](WordView prefix) {
    std::vector<long> c = counts(prefix);
    std::string label = "(" + std::to_string(prefix.size());
    for (std::size_t a = 1; a < m; ++a) label += "," + std::to_string(c[a]);
    return label + ")";
  };
  return SourceModel<T>::general(alphabet, conditional, "polya_urn", state_of);
}

/// Independent steps whose law depends on the position: `schedule(n)` is the
/// law of X_n (n counted from 1). The state is the time index.
template <Probability T>
SourceModel<T> time_varying(const Alphabet& alphabet, std::function<std::vector<Rational>(std::size_t)> schedule,
                            std::string name) {
  auto conditional = [schedule, m = alphabet.size(), name](WordView prefix) {
    std::vector<Rational> law = schedule(prefix.size() + 1);
    check_distribution(law, m, name + " step " + std::to_string(prefix.size() + 1));
    return detail::convert<T>(law);
  };
  auto state_of = [](WordView prefix) { return "t=" + std::to_string(prefix.size()); };
  return SourceModel<T>::general(alphabet, conditional, std::move(name), state_of);
}

/// P(X_n = target) = scale * ratio^n; the remaining mass is split over the
/// other symbols in proportion to `background` (uniform when empty).
template <Probability T>
SourceModel<T> time_decay(const Alphabet& alphabet, Symbol target, const Rational& scale, const Rational& ratio,
                          std::vector<Rational> background = {}) {
  const std::size_t m = alphabet.size();
  if (target >= m) throw InputError("time_decay: target symbol outside alphabet");
  if (m < 2) throw InputError("time_decay: needs at least two symbols");
  if (ratio < 0 || ratio > 1 || scale < 0 || scale * ratio > 1)
    throw InputError("time_decay: need 0 <= ratio <= 1 and 0 <= scale*ratio <= 1");
  if (background.empty()) background.assign(m - 1, Rational(1));
  if (background.size() != m - 1) throw InputError("time_decay: background needs one weight per non-target symbol");
  Rational weight_sum = 0;
  for (const auto& w : background) {
    if (w < 0) throw InputError("time_decay: negative background weight");
    weight_sum += w;
  }
  if (weight_sum <= 0) throw InputError("time_decay: background weights sum to zero");
  auto schedule = [=](std::size_t n) {
    Rational hit = scale;
    for (std::size_t i = 0; i < n; ++i) hit *= ratio;
    std::vector<Rational> law(m);
    std::size_t j = 0;
    for (std::size_t a = 0; a < m; ++a) {
      if (a == target) {
        law[a] = hit;
      } else {
        law[a] = (1 - hit) * background[j++] / weight_sum;
        law[a].canonicalize();
      }
    }
    return law;
  };
  return time_varying<T>(alphabet, schedule, "time_decay");
}

/// Explicit per-step laws; the last one repeats forever.
template <Probability T>
SourceModel<T> time_schedule(const Alphabet& alphabet, std::vector<std::vector<Rational>> steps) {
  if (steps.empty()) throw InputError("time_schedule: needs at least one step");
  for (std::size_t i = 0; i < steps.size(); ++i)
    check_distribution(steps[i], alphabet.size(), "time_schedule step " + std::to_string(i + 1));
  auto schedule = [steps](std::size_t n) { return steps[std::min(n, steps.size()) - 1]; };
  return time_varying<T>(alphabet, schedule, "time_schedule");
}

enum class TableFallback { longest_suffix, uniform };

/// Explicit conditionals per prefix. Prefixes missing from the table use the
/// entry of their longest tabulated suffix, or the uniform law.
template <Probability T>
SourceModel<T> table(const Alphabet& alphabet, const std::map<Word, std::vector<Rational>>& conditionals,
                     TableFallback fallback) {
  std::map<Word, std::vector<T>> laws;
  for (const auto& [w, p] : conditionals) {
    alphabet.validate(w);
    check_distribution(p, alphabet.size(), "table entry '" + alphabet.format(w) + "'");
    laws.emplace(w, detail::convert<T>(p));
  }
  auto uniform = detail::uniform<T>(alphabet.size());
  auto conditional = [laws, uniform, fallback](WordView prefix) {
    Word w(prefix.begin(), prefix.end());
    if (auto it = laws.find(w); it != laws.end()) return it->second;
    if (fallback == TableFallback::longest_suffix) {
      for (std::size_t drop = 1; drop <= w.size(); ++drop) {
        Word suffix(w.begin() + static_cast<std::ptrdiff_t>(drop), w.end());
        if (auto it = laws.find(suffix); it != laws.end()) return it->second;
      }
    }
    return uniform;
  };
  return SourceModel<T>::general(alphabet, conditional, "table");
}

}  // namespace sources

}  // namespace markov_embed
