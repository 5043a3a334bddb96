#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace markov_embed;
using fixtures::binary;

namespace {

Regex lit(Symbol s) { return Regex::literal(s); }

Dfa pipeline(const std::string& text) { return minimize(determinize(compile(parse_regex(text, binary()), 2))); }

}  // namespace

TEST(Parse, GrammarExamples) {
  EXPECT_EQ(parse_regex("11", binary()), Regex::concat({lit(1), lit(1)}));
  EXPECT_EQ(parse_regex("(0|1)*1", binary()),
            Regex::concat({Regex::star(Regex::alternation({lit(0), lit(1)})), lit(1)}));
  EXPECT_EQ(parse_regex("0|1?", binary()), Regex::alternation({lit(0), Regex::optional(lit(1))}));
  EXPECT_EQ(parse_regex("[10]+", binary()), Regex::plus(Regex::symbol_class({0, 1})));
  EXPECT_EQ(parse_regex("", binary()), Regex::empty());
}

TEST(Parse, SyntaxErrorCarriesOffset) {
  try {
    parse_regex("1)", binary());
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 1u);
    EXPECT_NE(std::string(e.what()).find("offset 1"), std::string::npos);
  }
  for (const char* bad : {"(1", "*1", "1|*", "[]", "[01", "{0"}) EXPECT_THROW(parse_regex(bad, binary()), SyntaxError) << bad;
}

TEST(Parse, UnknownSymbolNamed) {
  try {
    parse_regex("01x", binary());
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("'x'"), std::string::npos);
  }
}

TEST(Parse, MultiCharacterSymbols) {
  Alphabet a({"a", "ab", "b"});
  EXPECT_EQ(parse_regex("ab", a), lit(1));  // greedy longest name
  EXPECT_EQ(parse_regex("{a}b", a), Regex::concat({lit(0), lit(2)}));
  EXPECT_THROW(parse_regex("{c}", a), InputError);
}

TEST(Parse, PrintRoundTrip) {
  for (const auto& text : fixtures::regex_corpus()) {
    Regex r = parse_regex(text, binary());
    EXPECT_EQ(parse_regex(to_string(r, binary()), binary()), r) << text;
  }
}

TEST(Compile, ThompsonBasics) {
  Nfa eps = compile(Regex::empty(), 2);
  EXPECT_TRUE(eps.accepts(Word{}));
  EXPECT_FALSE(eps.accepts(Word{0}));
  Nfa one = compile(lit(1), 2);
  EXPECT_EQ(one.size(), 2u);
  EXPECT_TRUE(one.accepts(Word{1}));
  EXPECT_FALSE(one.accepts(Word{1, 1}));
  Nfa star = compile(Regex::star(lit(1)), 2);
  for (std::size_t n = 0; n <= 6; ++n)
    oracle::for_each_word(2, n, [&](const Word& w) {
      EXPECT_EQ(star.accepts(w), oracle::member(Regex::star(lit(1)), w));
    });
}

TEST(Compile, StateBound) {
  for (const auto& text : fixtures::regex_corpus()) {
    Regex r = parse_regex(text, binary());
    EXPECT_LE(compile(r, 2).size(), 2 * (node_count(r) + 1)) << text;
  }
}

TEST(Determinize, CompleteWithDeadState) {
  Dfa d = determinize(compile(lit(1), 2));
  for (const auto& row : d.next) EXPECT_EQ(row.size(), 2u);
  EXPECT_TRUE(d.accepts(Word{1}));
  EXPECT_FALSE(d.accepts(Word{}));
  EXPECT_FALSE(d.accepts(Word{0}));
  EXPECT_FALSE(d.accepts(Word{1, 1}));
  Dfa alt = determinize(compile(parse_regex("0|1", binary()), 2));
  for (std::size_t n = 0; n <= 4; ++n)
    oracle::for_each_word(2, n, [&](const Word& w) { EXPECT_EQ(alt.accepts(w), n == 1); });
}

TEST(Determinize, SubsetCap) {
  // (0|1)*1(0|1)^k needs 2^(k+1) subsets.
  std::string text = "(0|1)*1";
  for (int i = 0; i < 12; ++i) text += "(0|1)";
  Nfa nfa = compile(parse_regex(text, binary()), 2);
  EXPECT_THROW(determinize(nfa, 1000), ResourceError);
  EXPECT_NO_THROW(determinize(nfa, 100000));
}

TEST(Pipeline, AgreesWithInterpreterOnAllShortWords) {
  for (const auto& text : fixtures::regex_corpus()) {
    Regex r = parse_regex(text, binary());
    Nfa nfa = compile(r, 2);
    Dfa dfa = determinize(nfa);
    Dfa min = minimize(dfa);
    for (std::size_t n = 0; n <= 8; ++n)
      oracle::for_each_word(2, n, [&](const Word& w) {
        bool expected = oracle::member(r, w);
        ASSERT_EQ(nfa.accepts(w), expected) << text << " on " << binary().format(w);
        ASSERT_EQ(dfa.accepts(w), expected) << text << " on " << binary().format(w);
        ASSERT_EQ(min.accepts(w), expected) << text << " on " << binary().format(w);
      });
  }
}

TEST(Minimize, IsAFixpoint) {
  for (const auto& text : fixtures::regex_corpus()) {
    Dfa once = pipeline(text);
    Dfa twice = minimize(once);
    EXPECT_EQ(twice.size(), once.size()) << text;
    EXPECT_EQ(twice.next, once.next) << text;
    EXPECT_EQ(twice.accepting, once.accepting) << text;
  }
}

TEST(Minimize, MergesDuplicateSinks) {
  Dfa d;
  d.alphabet_size = 2;
  d.start = 0;
  d.next = {{1, 2}, {1, 1}, {2, 2}};
  d.accepting = {false, true, true};
  Dfa m = minimize(d);
  EXPECT_EQ(m.size(), 2u);
  for (std::size_t n = 0; n <= 4; ++n)
    oracle::for_each_word(2, n, [&](const Word& w) { EXPECT_EQ(m.accepts(w), d.accepts(w)); });
}

TEST(Minimize, TrimsUnreachable) {
  Dfa d;
  d.alphabet_size = 2;
  d.next = {{0, 0}, {1, 0}};
  d.accepting = {false, true};
  EXPECT_EQ(minimize(d).size(), 1u);
}

TEST(Minimize, NoTwoStatesEquivalent) {
  for (const auto& text : fixtures::regex_corpus()) {
    Dfa m = pipeline(text);
    // Distinct states must be separated by some word of length < |states|.
    for (std::size_t s = 0; s < m.size(); ++s)
      for (std::size_t t = s + 1; t < m.size(); ++t) {
        bool separated = false;
        for (std::size_t n = 0; n < m.size() && !separated; ++n)
          oracle::for_each_word(2, n, [&](const Word& w) {
            if (m.accepting[m.run(w, s)] != m.accepting[m.run(w, t)]) separated = true;
          });
        EXPECT_TRUE(separated) << text << ": states " << s << " and " << t;
      }
  }
}

TEST(Matching, ElevenHasThreeStates) {
  MatchingAutomaton ma = matching_automaton("11", binary());
  ASSERT_EQ(ma.dfa.size(), 3u);
  EXPECT_EQ(ma.dfa.start, 0u);
  EXPECT_EQ(ma.dfa.next, (std::vector<std::vector<std::size_t>>{{0, 1}, {0, 2}, {0, 2}}));
  EXPECT_EQ(ma.dfa.accepting, (std::vector<bool>{false, false, true}));
  EXPECT_EQ(dump_transition_table(ma.dfa), "0 0 0 1\n1 0 0 2\n2 1 0 2\n");
}

TEST(Matching, EverySymbolMatches) {
  MatchingAutomaton ma = matching_automaton("0|1", binary());
  EXPECT_EQ(ma.dfa.size(), 2u);
  for (std::size_t n = 1; n <= 5; ++n)
    oracle::for_each_word(2, n, [&](const Word& w) { EXPECT_TRUE(ma.dfa.accepts(w)); });
}

TEST(Matching, NullablePatternRejected) {
  try {
    matching_automaton("(0|1)?", binary());
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("empty word"), std::string::npos);
  }
  EXPECT_THROW(matching_automaton("1*", binary()), InputError);
}

TEST(Matching, CountExamples) {
  EXPECT_EQ(count_occurrences(matching_automaton("11", binary()), Word{1, 1, 1}), 2u);
  EXPECT_EQ(count_occurrences(matching_automaton("1", binary()), Word{0, 0, 0}), 0u);
  EXPECT_EQ(count_occurrences(matching_automaton("10|01", binary()), Word{0, 1, 0, 1}), 3u);
  EXPECT_THROW(count_occurrences(matching_automaton("1", binary()), Word{0, 3}), InputError);
}

TEST(Matching, SuffixInvariantAgainstInterpreter) {
  for (const auto& text : fixtures::regex_corpus()) {
    Regex r = parse_regex(text, binary());
    if (nullable(r)) continue;
    MatchingAutomaton ma = matching_automaton(r, binary(), text);
    for (std::size_t n = 0; n <= 8; ++n)
      oracle::for_each_word(2, n, [&](const Word& w) {
        ASSERT_EQ(count_occurrences(ma, w), oracle::occurrences(r, w)) << text << " on " << binary().format(w);
      });
  }
}

TEST(Matching, LargerAlphabet) {
  Alphabet dna({"A", "C", "G", "T"});
  MatchingAutomaton ma = matching_automaton("A[CG]T", dna);
  Regex r = parse_regex("A[CG]T", dna);
  for (std::size_t n = 0; n <= 5; ++n)
    oracle::for_each_word(4, n, [&](const Word& w) { ASSERT_EQ(count_occurrences(ma, w), oracle::occurrences(r, w)); });
}
