#pragma once

// Reproducible sampling. The engine is std::mt19937_64, whose output sequence
// for a given seed is fixed by the C++ standard; uniforms are built from the
// top 53 bits and symbols drawn by inverse CDF, so results do not depend on
// the platform's <random> distributions.

#include <cstdint>
#include <random>
#include <vector>

#include "markov_embed/source.hpp"

namespace markov_embed {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the `stream`-th independent stream derived from a master seed.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <Probability T>
  Symbol draw(const std::vector<T>& law) {
    double u = uniform();
    double cum = 0.0;
    Symbol last = 0;
    for (Symbol a = 0; a < law.size(); ++a) {
      double p = to_double(law[a]);
      if (p <= 0.0) continue;
      last = a;
      cum += p;
      if (u < cum) return a;
    }
    return last;
  }

 private:
  std::mt19937_64 engine_;
};

template <Probability T>
Word sample(const SourceModel<T>& source, std::size_t n, Rng& rng) {
  Word w;
  w.reserve(n);
  if (const auto* table = source.table()) {
    std::size_t s = table->initial;
    for (std::size_t i = 0; i < n; ++i) {
      Symbol a = rng.draw(table->emit[s]);
      w.push_back(a);
      s = table->next[s][a];
    }
    return w;
  }
  for (std::size_t i = 0; i < n; ++i) w.push_back(rng.draw(source.conditional(w)));
  return w;
}

template <Probability T>
Word sample(const SourceModel<T>& source, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return sample(source, n, rng);
}

}  // namespace markov_embed
