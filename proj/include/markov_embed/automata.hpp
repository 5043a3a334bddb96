#pragma once

// Thompson NFA -> subset construction -> Moore minimisation, and the matching
// automaton for A*·L whose accepting states flag match end positions.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "markov_embed/alphabet.hpp"
#include "markov_embed/error.hpp"
#include "markov_embed/regex.hpp"

namespace markov_embed {

struct Nfa {
  static constexpr Symbol epsilon = std::numeric_limits<Symbol>::max();

  struct Edge {
    Symbol symbol;  // `epsilon` for an empty move
    std::size_t to;
  };

  std::size_t alphabet_size = 0;
  std::size_t start = 0;
  std::vector<std::vector<Edge>> edges;  // per state
  std::vector<bool> accepting;

  std::size_t size() const noexcept { return edges.size(); }

  std::size_t add_state() {
    edges.emplace_back();
    accepting.push_back(false);
    return edges.size() - 1;
  }

  std::vector<std::size_t> closure(std::vector<std::size_t> states) const {
    std::vector<bool> seen(size(), false);
    for (std::size_t s : states) seen[s] = true;
    for (std::size_t i = 0; i < states.size(); ++i)
      for (const Edge& e : edges[states[i]])
        if (e.symbol == epsilon && !seen[e.to]) {
          seen[e.to] = true;
          states.push_back(e.to);
        }
    std::sort(states.begin(), states.end());
    return states;
  }

  bool accepts(WordView word) const {
    std::vector<std::size_t> current = closure({start});
    for (Symbol a : word) {
      std::vector<std::size_t> next;
      for (std::size_t s : current)
        for (const Edge& e : edges[s])
          if (e.symbol == a) next.push_back(e.to);
      current = closure(std::move(next));
    }
    return std::any_of(current.begin(), current.end(), [&](std::size_t s) { return accepting[s]; });
  }
};

namespace detail {

struct Fragment {
  std::size_t in;
  std::size_t out;
};

inline Fragment thompson(Nfa& nfa, const Regex& r) {
  auto eps = [&](std::size_t from, std::size_t to) { nfa.edges[from].push_back({Nfa::epsilon, to}); };
  switch (r.kind) {
    case Regex::Kind::empty: {
      Fragment f{nfa.add_state(), nfa.add_state()};
      eps(f.in, f.out);
      return f;
    }
    case Regex::Kind::symbol:
    case Regex::Kind::symbol_class: {
      Fragment f{nfa.add_state(), nfa.add_state()};
      for (Symbol a : r.symbols) nfa.edges[f.in].push_back({a, f.out});
      return f;
    }
    case Regex::Kind::concat: {
      Fragment f = thompson(nfa, r.children[0]);
      for (std::size_t i = 1; i < r.children.size(); ++i) {
        Fragment g = thompson(nfa, r.children[i]);
        eps(f.out, g.in);
        f.out = g.out;
      }
      return f;
    }
    case Regex::Kind::alternation: {
      Fragment f{nfa.add_state(), nfa.add_state()};
      for (const Regex& c : r.children) {
        Fragment g = thompson(nfa, c);
        eps(f.in, g.in);
        eps(g.out, f.out);
      }
      return f;
    }
    case Regex::Kind::star:
    case Regex::Kind::plus:
    case Regex::Kind::optional: {
      Fragment f{nfa.add_state(), nfa.add_state()};
      Fragment g = thompson(nfa, r.children[0]);
      eps(f.in, g.in);
      eps(g.out, f.out);
      if (r.kind != Regex::Kind::plus) eps(f.in, f.out);
      if (r.kind != Regex::Kind::optional) eps(g.out, g.in);
      return f;
    }
  }
  throw InputError("malformed regex node");
}

}  // namespace detail

/// Thompson construction; at most 2 states per AST node.
inline Nfa compile(const Regex& r, std::size_t alphabet_size) {
  Nfa nfa;
  nfa.alphabet_size = alphabet_size;
  detail::Fragment f = detail::thompson(nfa, r);
  nfa.start = f.in;
  nfa.accepting[f.out] = true;
  return nfa;
}

/// Complete deterministic automaton.
struct Dfa {
  std::size_t alphabet_size = 0;
  std::size_t start = 0;
  std::vector<std::vector<std::size_t>> next;  // [state][symbol]
  std::vector<bool> accepting;

  std::size_t size() const noexcept { return next.size(); }

  std::size_t run(WordView word, std::size_t from) const {
    for (Symbol a : word) {
      if (a >= alphabet_size) throw InputError("symbol index " + std::to_string(a) + " outside alphabet");
      from = next[from][a];
    }
    return from;
  }
  std::size_t run(WordView word) const { return run(word, start); }
  bool accepts(WordView word) const { return accepting[run(word)]; }
};

inline constexpr std::size_t kDefaultSubsetCap = 100'000;

inline Dfa determinize(const Nfa& nfa, std::size_t cap = kDefaultSubsetCap) {
  Dfa dfa;
  dfa.alphabet_size = nfa.alphabet_size;
  std::map<std::vector<std::size_t>, std::size_t> ids;
  std::vector<std::vector<std::size_t>> subsets;
  auto intern = [&](std::vector<std::size_t> subset) {
    auto [it, fresh] = ids.emplace(subset, subsets.size());
    if (fresh) {
      if (subsets.size() >= cap) throw ResourceError("subset construction exceeds the state cap", cap);
      bool acc = std::any_of(subset.begin(), subset.end(), [&](std::size_t s) { return nfa.accepting[s]; });
      subsets.push_back(std::move(subset));
      dfa.accepting.push_back(acc);
      dfa.next.emplace_back(nfa.alphabet_size, 0);
    }
    return it->second;
  };
  dfa.start = intern(nfa.closure({nfa.start}));
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    for (Symbol a = 0; a < nfa.alphabet_size; ++a) {
      std::vector<std::size_t> moved;
      for (std::size_t s : subsets[i])
        for (const Nfa::Edge& e : nfa.edges[s])
          if (e.symbol == a) moved.push_back(e.to);
      std::sort(moved.begin(), moved.end());
      moved.erase(std::unique(moved.begin(), moved.end()), moved.end());
      std::size_t target = intern(nfa.closure(std::move(moved)));
      dfa.next[i][a] = target;
    }
  }
  return dfa;
}

/// Drops unreachable states, merges equivalent ones (Moore refinement) and
/// numbers the result breadth-first from the start state in symbol order.
inline Dfa minimize(const Dfa& dfa) {
  const std::size_t m = dfa.alphabet_size;
  std::vector<std::size_t> reach{dfa.start};
  std::vector<bool> seen(dfa.size(), false);
  seen[dfa.start] = true;
  for (std::size_t i = 0; i < reach.size(); ++i)
    for (Symbol a = 0; a < m; ++a) {
      std::size_t t = dfa.next[reach[i]][a];
      if (!seen[t]) {
        seen[t] = true;
        reach.push_back(t);
      }
    }

  std::vector<std::size_t> block(dfa.size(), 0);
  for (std::size_t s : reach) block[s] = dfa.accepting[s] ? 1 : 0;
  std::size_t count = 0;
  while (true) {
    std::map<std::vector<std::size_t>, std::size_t> signature;
    std::vector<std::size_t> refined(dfa.size(), 0);
    for (std::size_t s : reach) {
      std::vector<std::size_t> sig{block[s]};
      for (Symbol a = 0; a < m; ++a) sig.push_back(block[dfa.next[s][a]]);
      refined[s] = signature.emplace(std::move(sig), signature.size()).first->second;
    }
    block = std::move(refined);
    if (signature.size() == count) break;
    count = signature.size();
  }

  Dfa out;
  out.alphabet_size = m;
  std::vector<std::size_t> renumber(count, std::numeric_limits<std::size_t>::max());
  std::vector<std::size_t> representative;
  std::queue<std::size_t> queue;
  auto visit = [&](std::size_t s) {
    std::size_t b = block[s];
    if (renumber[b] == std::numeric_limits<std::size_t>::max()) {
      renumber[b] = representative.size();
      representative.push_back(s);
      queue.push(s);
    }
    return renumber[b];
  };
  out.start = visit(dfa.start);
  while (!queue.empty()) {
    std::size_t s = queue.front();
    queue.pop();
    for (Symbol a = 0; a < m; ++a) visit(dfa.next[s][a]);
  }
  out.next.assign(representative.size(), std::vector<std::size_t>(m));
  out.accepting.assign(representative.size(), false);
  for (std::size_t i = 0; i < representative.size(); ++i) {
    out.accepting[i] = dfa.accepting[representative[i]];
    for (Symbol a = 0; a < m; ++a) out.next[i][a] = renumber[block[dfa.next[representative[i]][a]]];
  }
  return out;
}

/// Minimal complete DFA for A*·L(pattern). Being in an accepting state after
/// position i means some match of the pattern ends at i.
struct MatchingAutomaton {
  Alphabet alphabet;
  Dfa dfa;
  std::string pattern;  // source text, informational
};

inline MatchingAutomaton matching_automaton(const Regex& pattern, const Alphabet& alphabet,
                                            std::string pattern_text = {},
                                            std::size_t subset_cap = kDefaultSubsetCap) {
  if (nullable(pattern))
    throw InputError("pattern matches the empty word, so a match would end at every position; "
                     "remove the nullable alternative (e.g. write 'x+' instead of 'x*', or drop '?')");
  std::vector<Symbol> all(alphabet.size());
  for (Symbol a = 0; a < alphabet.size(); ++a) all[a] = a;
  Regex floating = Regex::concat({Regex::star(Regex::symbol_class(all)), pattern});
  Dfa dfa = minimize(determinize(compile(floating, alphabet.size()), subset_cap));
  return {alphabet, std::move(dfa), pattern_text.empty() ? to_string(pattern, alphabet) : std::move(pattern_text)};
}

inline MatchingAutomaton matching_automaton(std::string_view pattern_text, const Alphabet& alphabet) {
  return matching_automaton(parse_regex(pattern_text, alphabet), alphabet, std::string(pattern_text));
}

/// Number of end positions i (1-based) at which some match ends.
inline std::size_t count_occurrences(const MatchingAutomaton& ma, WordView word) {
  ma.alphabet.validate(word);
  std::size_t state = ma.dfa.start;
  std::size_t count = 0;
  for (Symbol a : word) {
    state = ma.dfa.next[state][a];
    if (ma.dfa.accepting[state]) ++count;
  }
  return count;
}

/// One line per state: id, accepting flag (0/1), successor per symbol.
inline void dump_transition_table(std::ostream& os, const Dfa& dfa) {
  for (std::size_t s = 0; s < dfa.size(); ++s) {
    os << s << ' ' << (dfa.accepting[s] ? 1 : 0);
    for (std::size_t t : dfa.next[s]) os << ' ' << t;
    os << '\n';
  }
}

inline std::string dump_transition_table(const Dfa& dfa) {
  std::ostringstream os;
  dump_transition_table(os, dfa);
  return os.str();
}

}  // namespace markov_embed
