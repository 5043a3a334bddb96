#pragma once

// Coarsest Markovian refinement of a transformation on a finite prefix tree.
//
// Blocks start as the R-labels (all depths pooled) and are split until every
// internal node of a block has the same joint law of (next symbol, next
// block). Depth-N leaves have no outgoing constraint: a leaf x·a follows the
// first internal node z = y·a with y in the current block of x and R(z) =
// R(x·a), otherwise the first internal group with its R-label. Internal blocks
// only ever split; leaf placement is recomputed from them every pass.

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "markov_embed/markov_check.hpp"

namespace markov_embed {

/// Partition of the non-root nodes of a prefix tree.
struct Partition {
  std::vector<std::size_t> block;  // per tree node; npos for the root
  std::size_t block_count = 0;

  std::vector<std::vector<std::size_t>> blocks() const {
    std::vector<std::vector<std::size_t>> out(block_count);
    for (std::size_t v = 1; v < block.size(); ++v) out[block[v]].push_back(v);
    return out;
  }

  bool refines(const std::vector<std::size_t>& coarser) const {
    std::vector<std::size_t> image(block_count, std::numeric_limits<std::size_t>::max());
    for (std::size_t v = 1; v < block.size(); ++v) {
      auto& img = image[block[v]];
      if (img == std::numeric_limits<std::size_t>::max()) img = coarser[v];
      if (img != coarser[v]) return false;
    }
    return true;
  }
};

struct RefineStats {
  std::size_t rounds = 0;
  std::size_t splits = 0;  // blocks created beyond the initial ones
};

namespace detail {

template <Probability T>
struct SplitGroup {
  std::size_t representative;
  std::vector<T> low;
  std::vector<T> high;
};

/// Canonical ids: blocks numbered by breadth-first first occurrence.
inline std::size_t canonicalize(std::vector<std::size_t>& block) {
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::map<std::size_t, std::size_t> rename;
  for (std::size_t v = 1; v < block.size(); ++v) {
    auto it = rename.emplace(block[v], rename.size()).first;
    block[v] = it->second;
  }
  if (!block.empty()) block[0] = none;
  return rename.size();
}

/// Places every non-internal node given ids on the internal ones: a leaf x·a
/// takes the id of the first internal z = y·a with block[y] = block[x] and
/// R(z) = R(x·a), else the first internal id with its R-label, else a fresh id
/// (from `next_id`) per R-label.
template <Probability T>
void place_leaves(const PrefixTree<T>& tree, const std::vector<std::size_t>& rlabel,
                  const std::vector<std::size_t>& block, std::vector<std::size_t>& id, std::size_t next_id) {
  std::map<std::tuple<std::size_t, Symbol, std::size_t>, std::size_t> incoming;
  std::map<std::size_t, std::size_t> first_id;
  for (std::size_t z = 1; z < tree.size(); ++z) {
    if (!tree.is_internal(z)) continue;
    first_id.emplace(rlabel[z], id[z]);
    const std::size_t y = tree.nodes[z].parent;
    if (y != 0) incoming.emplace(std::make_tuple(block[y], tree.nodes[z].symbol, rlabel[z]), id[z]);
  }
  std::map<std::size_t, std::size_t> fresh;
  for (std::size_t v = 1; v < tree.size(); ++v) {
    if (tree.is_internal(v)) continue;
    const std::size_t x = tree.nodes[v].parent;
    auto it = x == 0 ? incoming.end() : incoming.find(std::make_tuple(block[x], tree.nodes[v].symbol, rlabel[v]));
    if (it != incoming.end()) {
      id[v] = it->second;
    } else if (auto f = first_id.find(rlabel[v]); f != first_id.end()) {
      id[v] = f->second;
    } else {
      id[v] = fresh.emplace(rlabel[v], next_id + fresh.size()).first->second;
    }
  }
}

/// One splitting pass. Returns the new (non-canonical) block vector.
template <Probability T>
std::vector<std::size_t> split_pass(const PrefixTree<T>& tree, const std::vector<std::size_t>& rlabel,
                                    std::vector<std::size_t> block, std::size_t block_count, double tolerance) {
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  place_leaves(tree, rlabel, block, block, block_count);
  // Discrete part of a signature: (old block, symbol/child-block pairs).
  using Key = std::pair<std::size_t, std::vector<std::pair<Symbol, std::size_t>>>;
  std::map<Key, std::vector<std::size_t>> candidates;  // key -> group ids
  std::vector<SplitGroup<T>> groups;
  std::vector<std::size_t> group_of(tree.size(), none);

  for (std::size_t v = 1; v < tree.size(); ++v) {
    if (!tree.is_internal(v)) continue;
    const auto& node = tree.nodes[v];
    Key key{block[v], {}};
    std::vector<T> probs;
    for (Symbol a = 0; a < node.next.size(); ++a) {
      if (!(T(0) < node.next[a])) continue;
      key.second.emplace_back(a, block[node.children[a]]);
      probs.push_back(node.next[a]);
    }
    auto& options = candidates[key];
    std::size_t chosen = none;
    for (std::size_t g : options) {
      const auto& rep = tree.nodes[groups[g].representative].next;
      bool match = true;
      std::size_t j = 0;
      for (Symbol a = 0; a < rep.size() && match; ++a) {
        if (!(T(0) < rep[a])) continue;
        match = nearly_equal(rep[a], probs[j++], tolerance);
      }
      if (!match) continue;
      if (chosen != none)
        throw AmbiguityError("floating-point tie: node '" + tree.alphabet.format(tree.word(v)) +
                             "' matches two distinct groups within tolerance; rerun in rational mode");
      chosen = g;
    }
    if (chosen == none) {
      chosen = groups.size();
      groups.push_back({v, probs, probs});
      options.push_back(chosen);
    } else if constexpr (!is_exact_v<T>) {
      auto& g = groups[chosen];
      for (std::size_t j = 0; j < probs.size(); ++j) {
        g.low[j] = std::min(g.low[j], probs[j]);
        g.high[j] = std::max(g.high[j], probs[j]);
        if (g.high[j] - g.low[j] > tolerance)
          throw AmbiguityError("floating-point tie is not transitive at node '" +
                               tree.alphabet.format(tree.word(v)) + "'; rerun in rational mode");
      }
    }
    group_of[v] = chosen;
  }

  place_leaves(tree, rlabel, block, group_of, groups.size());
  group_of[0] = none;
  return group_of;
}

}  // namespace detail

/// Splits `initial` (a node -> id map, root ignored) to the coarsest stable partition.
template <Probability T>
Partition refine_partition(const PrefixTree<T>& tree, std::vector<std::size_t> initial, double tolerance,
                           RefineStats* stats = nullptr) {
  Partition p;
  p.block = std::move(initial);
  p.block_count = detail::canonicalize(p.block);
  const std::vector<std::size_t> rlabel = p.block;
  const std::size_t start = p.block_count;
  std::size_t rounds = 0;
  while (true) {
    ++rounds;
    std::vector<std::size_t> next = detail::split_pass(tree, rlabel, p.block, p.block_count, tolerance);
    std::size_t count = detail::canonicalize(next);
    const bool stable = next == p.block;
    p.block = std::move(next);
    p.block_count = count;
    if (stable) break;
  }
  if (stats) {
    stats->rounds = rounds;
    stats->splits = p.block_count - start;
  }
  return p;
}

template <Probability T>
struct RefinementResult {
  PrefixTree<T> tree;
  TreeLabels input_labels;  // R-labels on the tree
  Partition partition;
  Transformation table = Transformation::constant();  // prefix -> "b<block>"
  MarkovCheckReport<T> report;
  RefineStats stats;

  std::string block_label(std::size_t b) const { return "b" + std::to_string(b); }
};

template <Probability T>
RefinementResult<T> coarsest_markov_refinement(const SourceModel<T>& source, const Transformation& r,
                                               std::size_t horizon, double tolerance = kDefaultTolerance,
                                               const TreeOptions& tree_options = {}) {
  if (horizon < 2) throw InputError("coarsest_markov_refinement needs horizon >= 2");
  RefinementResult<T> out;
  out.tree = enumerate_prefix_tree(source, horizon, tree_options);
  out.input_labels = label_tree(out.tree, r);
  out.partition = refine_partition(out.tree, out.input_labels.id, tolerance, &out.stats);

  TreeLabels blocks;
  blocks.id = out.partition.block;
  for (std::size_t b = 0; b < out.partition.block_count; ++b) blocks.names.push_back(out.block_label(b));
  std::map<Word, std::string> labels;
  std::map<Word, bool> marks;
  const bool marked = r.has_marker();
  for (std::size_t v = 1; v < out.tree.size(); ++v) {
    Word w = out.tree.word(v);
    if (marked) marks.emplace(w, r.marked(w).value_or(false));
    labels.emplace(std::move(w), blocks.names[blocks.id[v]]);
  }
  out.table = Transformation::table(std::move(labels), std::move(marks));
  out.report = check_labeling(out.tree, blocks, tolerance);
  return out;
}

}  // namespace markov_embed
