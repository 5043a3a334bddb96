#pragma once

// Independent oracles: a direct regex interpreter, closed forms, and
// exhaustive partition enumeration. None of these use the automata or
// refinement code under test.

#include <cstddef>
#include <functional>
#include <map>
#include <tuple>
#include <set>
#include <vector>

#include "markov_embed.hpp"

namespace oracle {

using markov_embed::Rational;
using markov_embed::Regex;
using markov_embed::Word;

/// End positions j such that w[i..j) is in L(r).
inline std::set<std::size_t> ends(const Regex& r, const Word& w, std::size_t i) {
  using K = Regex::Kind;
  switch (r.kind) {
    case K::empty:
      return {i};
    case K::symbol:
    case K::symbol_class: {
      if (i < w.size())
        for (auto s : r.symbols)
          if (s == w[i]) return {i + 1};
      return {};
    }
    case K::concat: {
      std::set<std::size_t> cur{i};
      for (const Regex& c : r.children) {
        std::set<std::size_t> next;
        for (std::size_t p : cur)
          for (std::size_t q : ends(c, w, p)) next.insert(q);
        cur = std::move(next);
      }
      return cur;
    }
    case K::alternation: {
      std::set<std::size_t> out;
      for (const Regex& c : r.children)
        for (std::size_t q : ends(c, w, i)) out.insert(q);
      return out;
    }
    case K::star:
    case K::plus:
    case K::optional: {
      const Regex& c = r.children.at(0);
      if (r.kind == K::optional) {
        auto out = ends(c, w, i);
        out.insert(i);
        return out;
      }
      std::set<std::size_t> reached;
      std::vector<std::size_t> frontier{i};
      std::set<std::size_t> expanded;
      while (!frontier.empty()) {
        std::size_t p = frontier.back();
        frontier.pop_back();
        if (!expanded.insert(p).second) continue;
        for (std::size_t q : ends(c, w, p)) {
          reached.insert(q);
          frontier.push_back(q);
        }
      }
      if (r.kind == K::star) reached.insert(i);
      return reached;
    }
  }
  return {};
}

inline bool member(const Regex& r, const Word& w) { return ends(r, w, 0).count(w.size()) != 0; }

/// Number of positions e in 1..|w| where some nonempty factor w[s..e) is in L(r).
inline std::size_t occurrences(const Regex& r, const Word& w) {
  std::set<std::size_t> hit;
  for (std::size_t s = 0; s < w.size(); ++s)
    for (std::size_t e : ends(r, w, s))
      if (e > s) hit.insert(e);
  return hit.size();
}

/// Calls f on every word over {0..m-1} of length exactly n.
inline void for_each_word(std::size_t m, std::size_t n, const std::function<void(const Word&)>& f) {
  Word w(n, 0);
  while (true) {
    f(w);
    std::size_t i = n;
    while (i > 0 && w[i - 1] + 1 == m) w[--i] = 0;
    if (i == 0) return;
    ++w[i - 1];
  }
}

inline Rational binomial_coefficient(unsigned n, unsigned k) {
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), n, k);
  return Rational(c);
}

inline std::vector<Rational> binomial_pmf(unsigned n, const Rational& p) {
  std::vector<Rational> out(n + 1);
  for (unsigned k = 0; k <= n; ++k) {
    Rational term = binomial_coefficient(n, k);
    for (unsigned i = 0; i < k; ++i) term *= p;
    for (unsigned i = 0; i < n - k; ++i) term *= (1 - p);
    out[k] = term;
  }
  return out;
}

/// Calls f on every partition of the tree's non-root nodes that refines
/// `coarse` (ids per node, root ignored); blocks are given as per-node ids.
inline void for_each_refining_partition(const std::vector<std::size_t>& coarse,
                                        const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::size_t classes = 0;
  for (std::size_t v = 1; v < coarse.size(); ++v) classes = std::max(classes, coarse[v] + 1);
  std::vector<std::vector<std::size_t>> members(classes);
  for (std::size_t v = 1; v < coarse.size(); ++v) members[coarse[v]].push_back(v);
  std::vector<std::size_t> block(coarse.size(), 0);
  std::size_t offset = 0;
  std::vector<std::size_t> offsets(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    offsets[c] = offset;
    offset += members[c].size();
  }
  // Restricted growth strings per class, combined by recursion over classes.
  std::function<void(std::size_t)> over_class = [&](std::size_t c) {
    if (c == classes) {
      f(block);
      return;
    }
    const auto& mem = members[c];
    std::vector<std::size_t> rgs(mem.size(), 0);
    std::function<void(std::size_t, std::size_t)> assign = [&](std::size_t i, std::size_t used) {
      if (i == mem.size()) {
        for (std::size_t j = 0; j < mem.size(); ++j) block[mem[j]] = offsets[c] + rgs[j];
        over_class(c + 1);
        return;
      }
      for (std::size_t b = 0; b <= used && b < mem.size(); ++b) {
        rgs[i] = b;
        assign(i + 1, b == used ? used + 1 : used);
      }
    };
    assign(0, 0);
  };
  over_class(0);
}

}  // namespace oracle

namespace oracle {

/// Symbol-aware Markov test of a node partition: every internal node (depth
/// below the horizon) of a block has the same law of (next symbol, next block).
template <markov_embed::Probability T>
bool markov_partition(const markov_embed::PrefixTree<T>& tree, const std::vector<std::size_t>& block) {
  std::map<std::size_t, std::vector<std::tuple<markov_embed::Symbol, std::size_t, T>>> law;
  for (std::size_t v = 1; v < tree.size(); ++v) {
    const auto& node = tree.nodes[v];
    if (node.depth >= tree.depth) continue;
    std::vector<std::tuple<markov_embed::Symbol, std::size_t, T>> steps;
    for (markov_embed::Symbol a = 0; a < node.next.size(); ++a)
      if (T(0) < node.next[a]) steps.emplace_back(a, block[node.children[a]], node.next[a]);
    auto [it, fresh] = law.emplace(block[v], steps);
    if (!fresh && it->second != steps) return false;
  }
  return true;
}

/// Table transformation counting the ones of every word up to `depth`.
inline markov_embed::Transformation count_of_ones(std::size_t depth) {
  std::map<Word, std::string> labels;
  for (std::size_t n = 1; n <= depth; ++n)
    for_each_word(2, n, [&](const Word& w) {
      std::size_t ones = 0;
      for (auto a : w) ones += a;
      labels.emplace(w, "c" + std::to_string(ones));
    });
  return markov_embed::Transformation::table(std::move(labels));
}

}  // namespace oracle
