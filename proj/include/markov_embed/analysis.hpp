#pragma once

// Exact laws of the occurrence count K_n and shape diagnostics.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "markov_embed/automata.hpp"
#include "markov_embed/chain.hpp"
#include "markov_embed/sampler.hpp"

namespace markov_embed {

template <Probability T>
struct CountDistribution {
  std::size_t n = 0;
  std::vector<T> pmf;                    // pmf[k] = P(K_n = k)
  std::optional<std::size_t> tail_cap;   // when set, pmf.back() is P(K_n >= *tail_cap)

  T total() const {
    T s(0);
    for (const T& p : pmf) s += p;
    return s;
  }
  T at(std::size_t k) const { return k < pmf.size() ? pmf[k] : T(0); }
};

inline constexpr std::size_t kDefaultLatticeCap = 50'000'000;

/// Exact laws of K_n for every n in `lengths` (one dynamic-programming pass
/// over (state, count) up to the largest length).
template <Probability T>
std::vector<CountDistribution<T>> count_distributions(const MarkovChain<T>& chain, const std::vector<std::size_t>& lengths,
                                                      std::optional<std::size_t> cap = std::nullopt,
                                                      std::size_t lattice_cap = kDefaultLatticeCap) {
  std::size_t n_max = 0;
  for (std::size_t n : lengths) {
    if (n < 1) throw InputError("count distribution needs n >= 1");
    n_max = std::max(n_max, n);
  }
  if (chain.horizon && n_max > *chain.horizon)
    throw InputError("chain only represents strings up to length " + std::to_string(*chain.horizon) +
                     ", requested " + std::to_string(n_max));
  if (cap && *cap == 0) throw InputError("tail cap must be positive");
  const std::size_t s_count = chain.size();
  const std::size_t width = cap ? std::min(*cap, n_max) + 1 : n_max + 1;
  if (s_count * width > lattice_cap) throw ResourceError("count lattice (states x counts) too large", lattice_cap);
  const std::size_t top = width - 1;  // with a cap, the last cell absorbs everything >= cap

  std::vector<std::vector<T>> cur(s_count, std::vector<T>(width, T(0)));
  for (std::size_t s = 0; s < s_count; ++s) {
    if (!(T(0) < chain.initial[s])) continue;
    cur[s][std::min<std::size_t>(chain.marked[s] ? 1 : 0, top)] += chain.initial[s];
  }
  std::vector<CountDistribution<T>> out;
  auto snapshot = [&](std::size_t t) {
    for (std::size_t n : lengths) {
      if (n != t) continue;
      CountDistribution<T> d;
      d.n = n;
      std::size_t len = cap ? std::min(*cap, n) + 1 : n + 1;
      d.pmf.assign(len, T(0));
      for (std::size_t s = 0; s < s_count; ++s)
        for (std::size_t k = 0; k < len && k < width; ++k) d.pmf[k] += cur[s][k];
      if (cap && *cap <= n) d.tail_cap = *cap;
      out.push_back(std::move(d));
    }
  };
  snapshot(1);
  std::vector<std::vector<T>> nxt(s_count, std::vector<T>(width, T(0)));
  for (std::size_t t = 1; t < n_max; ++t) {
    for (auto& row : nxt)
      for (auto& x : row) x = T(0);
    const std::size_t kmax = std::min(t, top);
    for (const auto& e : chain.edges) {
      const auto& src = cur[e.from];
      auto& dst = nxt[e.to];
      for (std::size_t k = 0; k <= kmax; ++k) {
        if (src[k] == T(0)) continue;
        dst[std::min(k + e.increment, top)] += src[k] * e.prob;
      }
    }
    std::swap(cur, nxt);
    snapshot(t + 1);
  }
  return out;
}

template <Probability T>
CountDistribution<T> count_distribution(const MarkovChain<T>& chain, std::size_t n,
                                        std::optional<std::size_t> cap = std::nullopt) {
  return count_distributions(chain, {n}, cap).front();
}

inline constexpr std::size_t kDefaultWordCap = std::size_t{1} << 20;

/// Enumerates every length-n word, weighting by its probability and counting
/// end positions with the matching automaton.
template <Probability T>
CountDistribution<T> count_distribution_bruteforce(const SourceModel<T>& source, const Regex& pattern, std::size_t n,
                                                   std::size_t word_cap = kDefaultWordCap) {
  if (n < 1) throw InputError("count distribution needs n >= 1");
  const std::size_t m = source.alphabet().size();
  double words = std::pow(static_cast<double>(m), static_cast<double>(n));
  if (words > static_cast<double>(word_cap)) throw ResourceError("brute-force enumeration too large", word_cap);
  MatchingAutomaton ma = matching_automaton(pattern, source.alphabet());
  CountDistribution<T> d;
  d.n = n;
  d.pmf.assign(n + 1, T(0));
  Word w(n, 0);
  while (true) {
    T p = source.prefix_probability(w);
    if (T(0) < p) d.pmf[count_occurrences(ma, w)] += p;
    std::size_t i = n;
    while (i > 0 && w[i - 1] + 1 == m) w[--i] = 0;
    if (i == 0) break;
    ++w[i - 1];
  }
  return d;
}

template <Probability T>
struct Moments {
  T mean;
  T variance;
  double skewness = 0.0;  // 0 when the variance vanishes
};

template <Probability T>
Moments<T> moments(const CountDistribution<T>& d) {
  T mean(0);
  for (std::size_t k = 0; k < d.pmf.size(); ++k) mean += T(static_cast<long>(k)) * d.pmf[k];
  T var(0), third(0);
  for (std::size_t k = 0; k < d.pmf.size(); ++k) {
    T dev = T(static_cast<long>(k)) - mean;
    T sq = dev * dev;
    var += sq * d.pmf[k];
    third += sq * dev * d.pmf[k];
  }
  Moments<T> m{mean, var, 0.0};
  double v = to_double(var);
  if (v > 0.0) m.skewness = to_double(third) / std::pow(v, 1.5);
  return m;
}

/// Standard normal CDF via std::erfc (absolute error well below 1e-12).
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// sup_k |P(K <= k) - Phi((k + 1/2 - mean)/sd)|, over all integers k.
template <Probability T>
double kolmogorov_to_gaussian(const CountDistribution<T>& d) {
  Moments<T> m = moments(d);
  double var = to_double(m.variance);
  if (!(var > 0.0)) throw InputError("Kolmogorov distance undefined for a degenerate (zero-variance) distribution");
  const double mean = to_double(m.mean);
  const double sd = std::sqrt(var);
  double best = normal_cdf((-0.5 - mean) / sd);  // k = -1, where the CDF is 0
  T cum(0);
  for (std::size_t k = 0; k < d.pmf.size(); ++k) {
    cum += d.pmf[k];
    double z = (static_cast<double>(k) + 0.5 - mean) / sd;
    best = std::max(best, std::fabs(to_double(cum) - normal_cdf(z)));
  }
  return std::min(best, 1.0);
}

template <Probability T>
double total_variation(const CountDistribution<T>& a, const CountDistribution<T>& b) {
  T sum(0);
  std::size_t len = std::max(a.pmf.size(), b.pmf.size());
  for (std::size_t k = 0; k < len; ++k) sum += abs_diff(a.at(k), b.at(k));
  return to_double(sum) / 2.0;
}

enum class Shape { gaussian_like, discrete_like, inconclusive };

inline const char* to_string(Shape s) {
  switch (s) {
    case Shape::gaussian_like:
      return "gaussian_like";
    case Shape::discrete_like:
      return "discrete_like";
    case Shape::inconclusive:
      return "inconclusive";
  }
  return "?";
}

/// Verdict thresholds.
struct ShapeThresholds {
  double kolmogorov = 0.05;       // final Kolmogorov distance for gaussian_like
  double total_variation = 1e-3;  // last-step TV for discrete_like
  double variance_growth = 0.10;  // relative variance growth over the grid for discrete_like
};

template <Probability T>
struct LimitRow {
  std::size_t n = 0;
  T mean;
  T variance;
  double skewness = 0.0;
  std::optional<double> kolmogorov;      // absent for zero variance
  std::optional<double> tv_to_previous;  // absent at the first grid point
};

template <Probability T>
struct LimitDiagnostics {
  std::vector<LimitRow<T>> rows;
  std::vector<CountDistribution<T>> distributions;
  Shape verdict = Shape::inconclusive;
};

enum class CountMethod { chain, bruteforce };

template <Probability T>
Shape classify(const std::vector<LimitRow<T>>& rows, const ShapeThresholds& th = {}) {
  bool decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].kolmogorov) {
      decreasing = false;
      break;
    }
    if (i > 0 && !(*rows[i].kolmogorov < *rows[i - 1].kolmogorov)) decreasing = false;
  }
  if (decreasing && *rows.back().kolmogorov < th.kolmogorov) return Shape::gaussian_like;
  double v0 = to_double(rows.front().variance);
  double v1 = to_double(rows.back().variance);
  if (rows.back().tv_to_previous && *rows.back().tv_to_previous < th.total_variation && v0 > 0.0 &&
      (v1 - v0) / v0 < th.variance_growth)
    return Shape::discrete_like;
  return Shape::inconclusive;
}

template <Probability T>
LimitDiagnostics<T> diagnose_distributions(std::vector<CountDistribution<T>> dists, const ShapeThresholds& th = {}) {
  LimitDiagnostics<T> out;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    Moments<T> m = moments(dists[i]);
    LimitRow<T> row;
    row.n = dists[i].n;
    row.mean = m.mean;
    row.variance = m.variance;
    row.skewness = m.skewness;
    if (to_double(m.variance) > 0.0) row.kolmogorov = kolmogorov_to_gaussian(dists[i]);
    if (i > 0) row.tv_to_previous = total_variation(dists[i - 1], dists[i]);
    out.rows.push_back(std::move(row));
  }
  out.distributions = std::move(dists);
  out.verdict = classify(out.rows, th);
  return out;
}

template <Probability T>
LimitDiagnostics<T> limit_diagnose(const SourceModel<T>& source, const Regex& pattern, const std::vector<std::size_t>& grid,
                                   CountMethod method = CountMethod::chain, const ChainOptions& options = {},
                                   const ShapeThresholds& th = {}) {
  if (grid.size() < 3) throw InputError("limit diagnostics need at least three grid points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw InputError("grid lengths must be positive");
    if (i > 0 && grid[i] <= grid[i - 1]) throw InputError("grid must be strictly increasing");
  }
  std::vector<CountDistribution<T>> dists;
  if (method == CountMethod::chain) {
    MarkovChain<T> chain = pattern_chain(source, pattern, grid.back(), options);
    dists = count_distributions(chain, grid);
  } else {
    for (std::size_t n : grid) dists.push_back(count_distribution_bruteforce(source, pattern, n));
  }
  return diagnose_distributions(std::move(dists), th);
}

/// Occurrence counts of `trials` independently sampled words of length n.
struct EmpiricalCounts {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::vector<std::size_t> counts;  // counts[k] = #trials with K_n = k

  double frequency(std::size_t k) const {
    return k < counts.size() ? static_cast<double>(counts[k]) / static_cast<double>(trials) : 0.0;
  }
};

template <Probability T>
EmpiricalCounts monte_carlo_counts(const SourceModel<T>& source, const Regex& pattern, std::size_t n,
                                   std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw InputError("monte carlo needs at least one trial");
  MatchingAutomaton ma = matching_automaton(pattern, source.alphabet());
  EmpiricalCounts out;
  out.n = n;
  out.trials = trials;
  out.counts.assign(n + 1, 0);
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) ++out.counts[count_occurrences(ma, sample(source, n, rng))];
  return out;
}

}  // namespace markov_embed
