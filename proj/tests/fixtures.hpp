#pragma once

// Sources and patterns shared by the unit tests and the acceptance gate.

#include <map>
#include <string>
#include <vector>

#include "markov_embed.hpp"

namespace fixtures {

using namespace markov_embed;

inline const Alphabet& binary() {
  static const Alphabet a = Alphabet::binary();
  return a;
}

inline Rational q(long n, long d) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

template <Probability T>
SourceModel<T> iid(long num, long den) {
  return sources::iid<T>(binary(), {1 - q(num, den), q(num, den)});
}

template <Probability T>
SourceModel<T> markov1() {
  return sources::markov<T>(binary(), 1, {{Word{0}, {q(2, 3), q(1, 3)}}, {Word{1}, {q(1, 4), q(3, 4)}}});
}

/// Four distinct rows, and distinct short-context rows.
template <Probability T>
SourceModel<T> markov2() {
  return sources::markov<T>(binary(), 2,
                            {{Word{0, 0}, {q(1, 3), q(2, 3)}},
                             {Word{0, 1}, {q(3, 5), q(2, 5)}},
                             {Word{1, 0}, {q(1, 4), q(3, 4)}},
                             {Word{1, 1}, {q(5, 7), q(2, 7)}}},
                            {{Word{}, {q(2, 5), q(3, 5)}}, {Word{0}, {q(1, 6), q(5, 6)}}, {Word{1}, {q(4, 9), q(5, 9)}}});
}

template <Probability T>
SourceModel<T> urn() {
  return sources::polya_urn<T>(binary(), {1, 1}, 1);
}

/// Independent steps with P(X_n = 1) = 2^-n.
template <Probability T>
SourceModel<T> decay() {
  return sources::time_decay<T>(binary(), 1, Rational(1), q(1, 2));
}

template <Probability T>
std::vector<std::pair<std::string, SourceModel<T>>> acceptance_sources() {
  return {{"iid(1/2)", iid<T>(1, 2)}, {"iid(3/10)", iid<T>(3, 10)}, {"markov1", markov1<T>()},
          {"markov2", markov2<T>()},  {"polya_urn(1,1)", urn<T>()}, {"time_decay(2^-n)", decay<T>()}};
}

inline const std::vector<std::string>& acceptance_patterns() {
  static const std::vector<std::string> p{"1", "11", "10|01", "1(0|1)1", "(00)*01"};
  return p;
}

/// Wider corpus for automata checks; includes nullable patterns.
inline const std::vector<std::string>& regex_corpus() {
  static const std::vector<std::string> p{"1",        "11",     "10|01",  "1(0|1)1", "(00)*01", "0|1",
                                          "(0|1)*1",  "1*",     "(10)+",  "0?1",     "[01]1",   "1(00|1)*0",
                                          "(0|11)*0", "((1))",  "0+1+0+", "(1|)0",   "()",      "(0*1*)*"};
  return p;
}

}  // namespace fixtures

namespace fixtures {

inline markov_embed::ChainOptions chain_options(markov_embed::ChainMode mode, std::size_t horizon = 6) {
  markov_embed::ChainOptions o;
  o.mode = mode;
  o.horizon = horizon;
  return o;
}

}  // namespace fixtures
