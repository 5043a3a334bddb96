#pragma once

// Finite-horizon certificate that an embedded process R(X_1), R(X_1X_2), ...
// is a first-order homogeneous Markov chain.
//
// Every history u of length 1..N-1 (a prefix-tree node) yields the joint law
// of (next symbol, next label). The embedding is certified when that law
// depends on u only through its label, pooling all depths (so homogeneity
// is tested together with memorylessness). Depth-N nodes have no observed
// future and impose nothing.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "markov_embed/prefix_tree.hpp"
#include "markov_embed/transformation.hpp"

namespace markov_embed {

enum class Verdict { markov_certified, not_markov, insufficient_support };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::markov_certified:
      return "markov_certified";
    case Verdict::not_markov:
      return "not_markov";
    case Verdict::insufficient_support:
      return "insufficient_support";
  }
  return "?";
}

/// One outgoing step: emit `symbol`, move to `label`, with probability `prob`.
template <Probability T>
struct Step {
  Symbol symbol;
  std::size_t label;
  T prob;
};

template <Probability T>
struct Witness {
  Word u;
  Word v;
  std::size_t label;  // shared current label
  std::vector<Step<T>> u_steps;
  std::vector<Step<T>> v_steps;
  T deviation;  // max absolute difference of the joint next-step laws
};

template <Probability T>
struct MarkovCheckReport {
  std::size_t horizon = 0;
  double tolerance = 0.0;  // 0 in exact mode
  Verdict verdict = Verdict::markov_certified;
  std::vector<std::string> labels;  // label ids in breadth-first order of first occurrence
  std::optional<Witness<T>> witness;
  std::vector<std::optional<std::vector<Step<T>>>> rows;  // per label, when a step was observed
  std::vector<T> initial;                                 // law of R(X_1)
  std::vector<bool> frontier;                             // seen only at depth N
  std::vector<std::size_t> unsupported;                   // seen before depth N, never with a full step

  bool certified() const noexcept { return verdict == Verdict::markov_certified; }

  /// Largest history length whose next step is certified.
  std::size_t effective_horizon() const noexcept { return horizon == 0 ? 0 : horizon - 1; }

  /// Label-to-label transition probability (symbols marginalised).
  T transition(std::size_t from, std::size_t to) const {
    T p(0);
    if (from < rows.size() && rows[from])
      for (const Step<T>& s : *rows[from])
        if (s.label == to) p += s.prob;
    return p;
  }
};

/// Node labels of a tree, as ids into `names` (root gets npos).
struct TreeLabels {
  std::vector<std::size_t> id;
  std::vector<std::string> names;
};

template <Probability T>
TreeLabels label_tree(const PrefixTree<T>& tree, const Transformation& r) {
  TreeLabels out;
  out.id.assign(tree.size(), PrefixTree<T>::npos);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t v = 1; v < tree.size(); ++v) {
    std::string label = r.apply(tree.alphabet, tree.word(v));
    auto [it, fresh] = index.emplace(label, out.names.size());
    if (fresh) out.names.push_back(std::move(label));
    out.id[v] = it->second;
  }
  return out;
}

namespace detail {

template <Probability T>
std::vector<Step<T>> steps_of(const PrefixTree<T>& tree, const std::vector<std::size_t>& label, std::size_t v) {
  const auto& node = tree.nodes[v];
  std::vector<Step<T>> steps;
  for (Symbol a = 0; a < node.next.size(); ++a) {
    if (!(T(0) < node.next[a])) continue;
    steps.push_back({a, label[node.children[a]], node.next[a]});
  }
  return steps;
}

template <Probability T>
bool same_steps(const std::vector<Step<T>>& x, const std::vector<Step<T>>& y, double tol) {
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i].symbol != y[i].symbol || x[i].label != y[i].label || !nearly_equal(x[i].prob, y[i].prob, tol))
      return false;
  return true;
}

/// max over (symbol, label) of |P_x - P_y|; steps are sorted by symbol.
template <Probability T>
T step_deviation(const std::vector<Step<T>>& x, const std::vector<Step<T>>& y) {
  T best(0);
  std::size_t i = 0, j = 0;
  auto bump = [&](const T& d) {
    if (best < d) best = d;
  };
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].symbol < y[j].symbol)) {
      bump(x[i++].prob);
    } else if (i == x.size() || y[j].symbol < x[i].symbol) {
      bump(y[j++].prob);
    } else {
      if (x[i].label == y[j].label) {
        bump(abs_diff(x[i].prob, y[j].prob));
      } else {
        bump(x[i].prob);
        bump(y[j].prob);
      }
      ++i;
      ++j;
    }
  }
  return best;
}

}  // namespace detail

/// Runs the certificate on an already labelled tree.
template <Probability T>
MarkovCheckReport<T> check_labeling(const PrefixTree<T>& tree, const TreeLabels& labels, double tolerance) {
  const std::size_t nl = labels.names.size();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  MarkovCheckReport<T> report;
  report.horizon = tree.depth;
  report.tolerance = is_exact_v<T> ? 0.0 : tolerance;
  report.labels = labels.names;
  report.rows.assign(nl, std::nullopt);
  report.initial.assign(nl, T(0));
  report.frontier.assign(nl, true);

  std::vector<std::size_t> reference(nl, none);
  std::vector<bool> seen_early(nl, false);
  std::vector<bool> failing(nl, false);
  bool any_failing = false;
  for (std::size_t v = 1; v < tree.size(); ++v) {
    const std::size_t l = labels.id[v];
    if (tree.nodes[v].depth == 1) report.initial[l] += tree.nodes[v].prob;
    if (tree.nodes[v].depth < tree.depth) {
      report.frontier[l] = false;
      seen_early[l] = true;
    }
    if (!tree.is_internal(v)) continue;
    std::vector<Step<T>> steps = detail::steps_of(tree, labels.id, v);
    if (reference[l] == none) {
      reference[l] = v;
      report.rows[l] = std::move(steps);
    } else if (!detail::same_steps(*report.rows[l], steps, tolerance)) {
      failing[l] = true;
      any_failing = true;
    }
  }
  for (std::size_t l = 0; l < nl; ++l)
    if (seen_early[l] && reference[l] == none) report.unsupported.push_back(l);

  if (any_failing) {
    report.verdict = Verdict::not_markov;
    // Deepest histories first, reverse breadth-first; first maximal pair wins.
    std::vector<std::vector<std::size_t>> members(nl);
    std::vector<std::vector<Step<T>>> steps(tree.size());
    std::vector<std::size_t> position(tree.size(), 0);
    std::vector<std::size_t> scan;
    for (std::size_t v = tree.size(); v-- > 1;) {
      const std::size_t l = labels.id[v];
      if (!failing[l] || !tree.is_internal(v)) continue;
      steps[v] = detail::steps_of(tree, labels.id, v);
      position[v] = members[l].size();
      members[l].push_back(v);
      scan.push_back(v);
    }
    Witness<T> best{};
    bool found = false;
    for (std::size_t u : scan) {
      const auto& group = members[labels.id[u]];
      for (std::size_t j = position[u] + 1; j < group.size(); ++j) {
        const std::size_t v = group[j];
        T dev = detail::step_deviation(steps[u], steps[v]);
        if (!found || best.deviation < dev) {
          found = true;
          best = Witness<T>{tree.word(u), tree.word(v), labels.id[u], steps[u], steps[v], dev};
        }
      }
    }
    report.witness = std::move(best);
    report.rows.assign(nl, std::nullopt);
  } else if (!report.unsupported.empty()) {
    report.verdict = Verdict::insufficient_support;
  }
  return report;
}

inline constexpr double kDefaultTolerance = 1e-9;

template <Probability T>
MarkovCheckReport<T> check_markov(const SourceModel<T>& source, const Transformation& r, std::size_t horizon,
                                  double tolerance = kDefaultTolerance, const TreeOptions& tree_options = {}) {
  if (horizon < 2) throw InputError("check_markov needs horizon >= 2");
  PrefixTree<T> tree = enumerate_prefix_tree(source, horizon, tree_options);
  return check_labeling(tree, label_tree(tree, r), tolerance);
}

}  // namespace markov_embed
