#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "markov_embed/error.hpp"
#include "markov_embed/source.hpp"

namespace markov_embed {

struct TreeOptions {
  double prune_below = 0.0;          // keep words with probability strictly above this
  std::size_t node_cap = 2'000'000;  // hard limit on stored nodes
};

/// All words of length <= depth with probability above the pruning threshold,
/// stored in breadth-first order (node 0 is the empty word; children follow
/// symbol order within a parent).
template <Probability T>
struct PrefixTree {
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  struct Node {
    std::size_t parent = npos;
    Symbol symbol = 0;
    std::size_t depth = 0;
    T prob;
    std::vector<T> next;                // conditional law of the next symbol (depth < horizon)
    std::vector<std::size_t> children;  // npos for absent (zero-probability or pruned) children
    bool expanded = false;              // every positive-probability child is present
  };

  Alphabet alphabet;
  std::size_t depth = 0;
  std::vector<Node> nodes;

  std::size_t size() const noexcept { return nodes.size(); }

  /// Internal nodes carry an observable outgoing step.
  bool is_internal(std::size_t id) const { return nodes[id].depth < depth && nodes[id].expanded; }

  Word word(std::size_t id) const {
    Word w(nodes[id].depth);
    for (std::size_t i = w.size(); i > 0; --i) {
      w[i - 1] = nodes[id].symbol;
      id = nodes[id].parent;
    }
    return w;
  }

  std::size_t find(WordView w) const {
    std::size_t id = 0;
    for (Symbol a : w) {
      if (a >= alphabet.size() || nodes[id].children.empty()) return npos;
      id = nodes[id].children[a];
      if (id == npos) return npos;
    }
    return id;
  }
};

template <Probability T>
PrefixTree<T> enumerate_prefix_tree(const SourceModel<T>& source, std::size_t depth, const TreeOptions& options = {}) {
  if (options.prune_below < 0.0 || options.prune_below >= 1.0)
    throw InputError("pruning threshold must lie in [0,1)");
  using Tree = PrefixTree<T>;
  const std::size_t m = source.alphabet().size();
  auto keep = [&](const T& p) {
    if (options.prune_below == 0.0) return T(0) < p;
    return to_double(p) > options.prune_below;
  };

  Tree tree;
  tree.alphabet = source.alphabet();
  tree.depth = depth;
  typename Tree::Node root;
  root.prob = T(1);
  tree.nodes.push_back(std::move(root));

  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    if (tree.nodes[id].depth == depth) continue;
    std::vector<T> next = source.conditional(tree.word(id));
    std::vector<std::size_t> children(m, Tree::npos);
    bool expanded = true;
    for (Symbol a = 0; a < m; ++a) {
      if (!(T(0) < next[a])) continue;
      T p = tree.nodes[id].prob * next[a];
      if (!keep(p)) {
        expanded = false;
        continue;
      }
      if (tree.nodes.size() >= options.node_cap)
        throw ResourceError("prefix tree of depth " + std::to_string(depth) + " exceeds the node cap", options.node_cap);
      typename Tree::Node child;
      child.parent = id;
      child.symbol = a;
      child.depth = tree.nodes[id].depth + 1;
      child.prob = std::move(p);
      children[a] = tree.nodes.size();
      tree.nodes.push_back(std::move(child));
    }
    auto& node = tree.nodes[id];
    node.next = std::move(next);
    node.children = std::move(children);
    node.expanded = expanded;
  }
  return tree;
}

}  // namespace markov_embed
