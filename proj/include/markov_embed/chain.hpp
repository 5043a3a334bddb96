#pragma once

// Materialising certified embedded chains, and the pattern-analysis
// embedding (matching-automaton state, source state).

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "markov_embed/markov_check.hpp"
#include "markov_embed/refinement.hpp"

namespace markov_embed {

/// Finite homogeneous chain whose transitions emit symbols and carry an
/// occurrence increment.
template <Probability T>
struct MarkovChain {
  struct Edge {
    std::size_t from;
    Symbol symbol;
    std::size_t to;
    T prob;
    unsigned increment;
  };

  Alphabet alphabet;
  std::vector<std::string> states;
  std::vector<bool> marked;  // an occurrence ends on entering this state
  std::vector<T> initial;    // law of the state after the first symbol
  std::vector<Edge> edges;
  std::optional<std::size_t> horizon;  // longest string length the chain represents; none = unbounded

  std::size_t size() const noexcept { return states.size(); }

  /// Checks the chain invariants. States without outgoing edges are allowed
  /// only on a finite horizon (they are reached at the last step).
  void validate(double tolerance = kDistributionTolerance) const {
    const std::size_t n = size();
    if (marked.size() != n || initial.size() != n) throw InputError("chain: per-state arrays disagree in size");
    T init(0);
    for (const T& p : initial) init += p;
    if (!nearly_equal(init, T(1), tolerance)) throw InputError("chain: initial law sums to " + format_probability(init));
    std::vector<T> out(n, T(0));
    std::vector<bool> has(n, false);
    for (const Edge& e : edges) {
      if (e.from >= n || e.to >= n) throw InputError("chain: edge references an undeclared state");
      if (e.increment != (marked[e.to] ? 1u : 0u)) throw InputError("chain: edge increment disagrees with target mark");
      out[e.from] += e.prob;
      has[e.from] = true;
    }
    for (std::size_t s = 0; s < n; ++s) {
      if (!has[s]) {
        if (!horizon) throw InputError("chain: state " + states[s] + " has no outgoing edge");
        continue;
      }
      if (!nearly_equal(out[s], T(1), tolerance))
        throw InputError("chain: outgoing probabilities of " + states[s] + " sum to " + format_probability(out[s]));
    }
  }
};

/// Raised when a chain is requested for an embedding that is not Markov.
class NotMarkovError : public Error {
 public:
  NotMarkovError(const std::string& what, std::string u, std::string v, std::string deviation)
      : Error(what), u_(std::move(u)), v_(std::move(v)), deviation_(std::move(deviation)) {}
  const std::string& u() const noexcept { return u_; }
  const std::string& v() const noexcept { return v_; }
  const std::string& deviation() const noexcept { return deviation_; }

 private:
  std::string u_, v_, deviation_;
};

enum class ChainMode {
  finite_horizon,  // states = labels on the prefix tree of depth N
  closed,          // finite-state source and finite-memory R: closure from the initial labels
  unrolled,        // stateful source: closure over (source state, label), up to depth N
};

struct ChainOptions {
  ChainMode mode = ChainMode::finite_horizon;
  std::size_t horizon = 6;          // N for finite_horizon and unrolled
  std::size_t certify_horizon = 4;  // prefix-tree certificate run by closed/unrolled
  double tolerance = kDefaultTolerance;
  TreeOptions tree;
  std::size_t state_cap = 1'000'000;
};

namespace detail {

template <Probability T>
[[noreturn]] void refuse(const MarkovCheckReport<T>& report, const Alphabet& alphabet) {
  if (report.verdict == Verdict::not_markov) {
    const auto& w = *report.witness;
    throw NotMarkovError("embedding is not Markov: histories '" + alphabet.format(w.u) + "' and '" +
                             alphabet.format(w.v) + "' share label " + report.labels[w.label] +
                             " but their next-step laws differ by " + format_probability(w.deviation),
                         alphabet.format(w.u), alphabet.format(w.v), format_probability(w.deviation));
  }
  throw Error("embedding has labels without observable outgoing steps (insufficient support)");
}

/// Builds the chain from a certified report on a labelled tree.
template <Probability T>
MarkovChain<T> chain_from_report(const PrefixTree<T>& tree, const TreeLabels& labels,
                                 const MarkovCheckReport<T>& report, const std::vector<bool>& marked) {
  MarkovChain<T> chain;
  chain.alphabet = tree.alphabet;
  chain.states = report.labels;
  chain.marked = marked;
  chain.initial = report.initial;
  chain.horizon = tree.depth;
  for (std::size_t l = 0; l < report.rows.size(); ++l)
    if (report.rows[l])
      for (const Step<T>& s : *report.rows[l])
        chain.edges.push_back({l, s.symbol, s.label, s.prob, marked[s.label] ? 1u : 0u});
  (void)labels;
  return chain;
}

}  // namespace detail

template <Probability T>
MarkovChain<T> induced_chain(const SourceModel<T>& source, const Transformation& r, const ChainOptions& options = {}) {
  const Alphabet& alphabet = source.alphabet();

  if (options.mode == ChainMode::finite_horizon) {
    if (options.horizon < 2) throw InputError("finite-horizon chain needs horizon >= 2");
    PrefixTree<T> tree = enumerate_prefix_tree(source, options.horizon, options.tree);
    TreeLabels labels = label_tree(tree, r);
    MarkovCheckReport<T> report = check_labeling(tree, labels, options.tolerance);
    if (!report.certified()) detail::refuse(report, alphabet);
    std::vector<bool> marked(labels.names.size(), false);
    std::vector<bool> done(labels.names.size(), false);
    for (std::size_t v = 1; v < tree.size(); ++v) {
      std::size_t l = labels.id[v];
      if (done[l]) continue;
      done[l] = true;
      marked[l] = r.marked(tree.word(v)).value_or(false);
    }
    return detail::chain_from_report(tree, labels, report, marked);
  }

  if (options.mode == ChainMode::closed) {
    if (source.kind() != SourceKind::finite_state || !r.finite_memory())
      throw UnsupportedError("closed mode needs a finite_state source and a finite-memory transformation; "
                             "this embedding's state space grows with n (use finite_horizon or unrolled)");
  } else if (!source.has_state()) {
    throw UnsupportedError(source.name() + " exposes no state; unrolled mode is unavailable");
  }

  {
    std::size_t h = std::max<std::size_t>(2, options.certify_horizon);
    MarkovCheckReport<T> report = check_markov(source, r, h, options.tolerance, options.tree);
    if (report.verdict == Verdict::not_markov) detail::refuse(report, alphabet);
  }

  const bool bounded = options.mode == ChainMode::unrolled;
  MarkovChain<T> chain;
  chain.alphabet = alphabet;
  std::unordered_map<std::string, std::size_t> label_index;
  std::map<std::pair<std::string, std::size_t>, std::size_t> key_index;
  struct Key {
    Word representative;
    std::size_t label;
    bool expanded = false;
  };
  std::vector<Key> keys;
  std::vector<std::optional<std::vector<Step<T>>>> rows;
  std::vector<Word> row_witness;
  std::deque<std::size_t> queue;

  auto intern = [&](Word prefix) {
    std::string label = r.apply(alphabet, prefix);
    auto [lit, fresh_label] = label_index.emplace(label, chain.states.size());
    if (fresh_label) {
      chain.states.push_back(label);
      chain.marked.push_back(r.marked(prefix).value_or(false));
      chain.initial.push_back(T(0));
      rows.emplace_back();
      row_witness.emplace_back();
    }
    std::string state = source.state_label(prefix);
    auto [kit, fresh_key] = key_index.emplace(std::make_pair(std::move(state), lit->second), keys.size());
    if (fresh_key) {
      if (keys.size() >= options.state_cap) throw ResourceError("chain closure exceeds the state cap", options.state_cap);
      keys.push_back({std::move(prefix), lit->second});
      queue.push_back(kit->second);
    }
    return kit->second;
  };

  std::vector<T> first = source.conditional(Word{});
  for (Symbol a = 0; a < alphabet.size(); ++a) {
    if (!(T(0) < first[a])) continue;
    std::size_t k = intern(Word{a});
    chain.initial[keys[k].label] += first[a];
  }

  bool frontier = false;
  while (!queue.empty()) {
    std::size_t k = queue.front();
    queue.pop_front();
    if (bounded && keys[k].representative.size() >= options.horizon) {
      frontier = true;
      continue;
    }
    Word rep = keys[k].representative;
    std::vector<T> law = source.conditional(rep);
    std::vector<Step<T>> steps;
    for (Symbol a = 0; a < alphabet.size(); ++a) {
      if (!(T(0) < law[a])) continue;
      Word child = rep;
      child.push_back(a);
      std::size_t ck = intern(std::move(child));
      steps.push_back({a, keys[ck].label, law[a]});
    }
    const std::size_t l = keys[k].label;
    if (!rows[l]) {
      rows[l] = steps;
      row_witness[l] = rep;
    } else if (!detail::same_steps(*rows[l], steps, options.tolerance)) {
      T dev = detail::step_deviation(*rows[l], steps);
      throw NotMarkovError("embedding is not Markov: histories '" + alphabet.format(row_witness[l]) + "' and '" +
                               alphabet.format(rep) + "' share label " + chain.states[l] +
                               " but their next-step laws differ by " + format_probability(dev),
                           alphabet.format(row_witness[l]), alphabet.format(rep), format_probability(dev));
    }
  }

  for (std::size_t l = 0; l < rows.size(); ++l)
    if (rows[l])
      for (const Step<T>& s : *rows[l])
        chain.edges.push_back({l, s.symbol, s.label, s.prob, chain.marked[s.label] ? 1u : 0u});
  if (frontier) chain.horizon = options.horizon;
  return chain;
}

/// Chain of a computed refinement (states are its blocks).
template <Probability T>
MarkovChain<T> induced_chain(const RefinementResult<T>& refinement) {
  if (!refinement.report.certified()) detail::refuse(refinement.report, refinement.tree.alphabet);
  TreeLabels blocks;
  blocks.id = refinement.partition.block;
  blocks.names = refinement.report.labels;
  std::vector<bool> marked(blocks.names.size(), false);
  std::vector<bool> done(blocks.names.size(), false);
  for (std::size_t v = 1; v < refinement.tree.size(); ++v) {
    std::size_t b = blocks.id[v];
    if (done[b]) continue;
    done[b] = true;
    marked[b] = refinement.table.marked(refinement.tree.word(v)).value_or(false);
  }
  return detail::chain_from_report(refinement.tree, blocks, refinement.report, marked);
}

/// product(matching-automaton state of `pattern`, source state).
template <Probability T>
Transformation canonical_embedding_RX(const SourceModel<T>& source, const Regex& pattern,
                                      std::string pattern_text = {}) {
  if (!source.has_state())
    throw UnsupportedError(source.name() +
                           " exposes no sufficient statistic; use coarsest_markov_refinement of the "
                           "automaton_state transformation as the general fallback");
  MatchingAutomaton ma = matching_automaton(pattern, source.alphabet(), std::move(pattern_text));
  return Transformation::product({Transformation::automaton_state(std::move(ma)), Transformation::source_state(source)});
}

/// Chain for pattern statistics up to length `max_length`: closed R^X for
/// finite-state sources, unrolled R^X for stateful general sources, and the
/// coarsest refinement of the automaton state otherwise.
template <Probability T>
MarkovChain<T> pattern_chain(const SourceModel<T>& source, const Regex& pattern, std::size_t max_length,
                             ChainOptions options = {}) {
  if (source.has_state()) {
    Transformation rx = canonical_embedding_RX(source, pattern);
    options.mode = source.kind() == SourceKind::finite_state ? ChainMode::closed : ChainMode::unrolled;
    options.horizon = std::max<std::size_t>(max_length, 1);
    return induced_chain(source, rx, options);
  }
  Transformation automaton = Transformation::automaton_state(matching_automaton(pattern, source.alphabet()));
  auto refinement = coarsest_markov_refinement(source, automaton, std::max<std::size_t>(max_length, 2),
                                               options.tolerance, options.tree);
  return induced_chain(refinement);
}

}  // namespace markov_embed
