#pragma once

// Experiment configuration: a strict JSON schema (unknown fields are errors)
// and builders for sources and transformations.

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "markov_embed.hpp"

namespace markov_embed::cli {

using nlohmann::json;

/// Invalid configuration; the message names the offending field.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

enum class Mode { rational, floating };

struct Config {
  Alphabet alphabet = Alphabet::binary();
  std::optional<json> source;
  std::optional<std::string> pattern;
  std::optional<json> transformation;
  std::size_t horizon = 4;
  std::vector<std::size_t> n_grid;
  Mode mode = Mode::rational;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  double tolerance = kDefaultTolerance;
  double prune_below = 0.0;
  std::size_t node_cap = TreeOptions{}.node_cap;
  std::size_t length = 10;
  std::size_t trials = 10'000;
  std::optional<std::size_t> count_cap;
  CountMethod method = CountMethod::chain;
};

namespace detail {

inline void only_fields(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.count(key)) throw ConfigError(where + ": unknown field '" + key + "'");
}

inline const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing required field '" + key + "'");
  return *it;
}

inline std::string path(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

inline std::size_t to_size(const json& v, const std::string& where) {
  if (!v.is_number_unsigned()) throw ConfigError(where + ": expected a non-negative integer");
  return v.get<std::size_t>();
}

inline long to_long(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return v.get<long>();
}

inline std::string to_string(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": expected a string");
  return v.get<std::string>();
}

/// Numbers are read through their shortest round-trip decimal; strings may
/// be fractions ("3/10") or decimals.
inline Rational to_rational(const json& v, const std::string& where) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    if (v.is_number()) return rational_from_double(v.get<double>());
  } catch (const InputError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  throw ConfigError(where + ": expected a number or a fraction string");
}

inline std::vector<Rational> to_law(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of probabilities");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(to_rational(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline Word to_word(const Alphabet& alphabet, const std::string& text, const std::string& where) {
  try {
    return alphabet.parse(text);
  } catch (const InputError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

inline std::map<Word, std::vector<Rational>> to_rows(const Alphabet& alphabet, const json& v, const std::string& where) {
  if (!v.is_object()) throw ConfigError(where + ": expected an object mapping contexts to laws");
  std::map<Word, std::vector<Rational>> rows;
  for (const auto& [key, law] : v.items()) {
    std::string at = where + "[\"" + key + "\"]";
    rows.emplace(to_word(alphabet, key, at), to_law(law, at));
  }
  return rows;
}

}  // namespace detail

inline Config parse_config(const json& doc) {
  using namespace detail;
  only_fields(doc, "config",
              {"alphabet", "source", "pattern", "transformation", "horizon", "n_grid", "mode", "seed", "output_dir",
               "tolerance", "prune_below", "node_cap", "length", "trials", "count_cap", "method"});
  Config c;
  if (auto it = doc.find("alphabet"); it != doc.end()) {
    if (!it->is_array()) throw ConfigError("alphabet: expected an array of symbol names");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < it->size(); ++i)
      names.push_back(to_string((*it)[i], "alphabet[" + std::to_string(i) + "]"));
    try {
      c.alphabet = Alphabet(std::move(names));
    } catch (const InputError& e) {
      throw ConfigError(std::string("alphabet: ") + e.what());
    }
  }
  if (auto it = doc.find("source"); it != doc.end()) c.source = *it;
  if (auto it = doc.find("pattern"); it != doc.end()) c.pattern = to_string(*it, "pattern");
  if (auto it = doc.find("transformation"); it != doc.end()) c.transformation = *it;
  if (auto it = doc.find("horizon"); it != doc.end()) {
    c.horizon = to_size(*it, "horizon");
    if (c.horizon < 2) throw ConfigError("horizon: must be at least 2");
  }
  if (auto it = doc.find("n_grid"); it != doc.end()) {
    if (!it->is_array()) throw ConfigError("n_grid: expected an array of lengths");
    for (std::size_t i = 0; i < it->size(); ++i) {
      std::string at = "n_grid[" + std::to_string(i) + "]";
      std::size_t n = to_size((*it)[i], at);
      if (n < 1) throw ConfigError(at + ": lengths must be positive");
      if (!c.n_grid.empty() && n <= c.n_grid.back()) throw ConfigError(at + ": grid must be strictly increasing");
      c.n_grid.push_back(n);
    }
  }
  if (auto it = doc.find("mode"); it != doc.end()) {
    std::string m = to_string(*it, "mode");
    if (m == "rational")
      c.mode = Mode::rational;
    else if (m == "floating")
      c.mode = Mode::floating;
    else
      throw ConfigError("mode: expected \"rational\" or \"floating\"");
  }
  if (auto it = doc.find("seed"); it != doc.end()) c.seed = to_size(*it, "seed");
  if (auto it = doc.find("output_dir"); it != doc.end()) c.output_dir = to_string(*it, "output_dir");
  if (auto it = doc.find("tolerance"); it != doc.end()) {
    if (!it->is_number() || it->get<double>() < 0) throw ConfigError("tolerance: expected a non-negative number");
    c.tolerance = it->get<double>();
  }
  if (auto it = doc.find("prune_below"); it != doc.end()) {
    if (!it->is_number() || it->get<double>() < 0 || it->get<double>() >= 1)
      throw ConfigError("prune_below: expected a number in [0, 1)");
    c.prune_below = it->get<double>();
  }
  if (auto it = doc.find("node_cap"); it != doc.end()) c.node_cap = to_size(*it, "node_cap");
  if (auto it = doc.find("length"); it != doc.end()) c.length = to_size(*it, "length");
  if (auto it = doc.find("trials"); it != doc.end()) {
    c.trials = to_size(*it, "trials");
    if (c.trials < 1) throw ConfigError("trials: must be at least 1");
  }
  if (auto it = doc.find("count_cap"); it != doc.end()) {
    c.count_cap = to_size(*it, "count_cap");
    if (*c.count_cap < 1) throw ConfigError("count_cap: must be at least 1");
  }
  if (auto it = doc.find("method"); it != doc.end()) {
    std::string m = to_string(*it, "method");
    if (m == "chain")
      c.method = CountMethod::chain;
    else if (m == "bruteforce")
      c.method = CountMethod::bruteforce;
    else
      throw ConfigError("method: expected \"chain\" or \"bruteforce\"");
  }
  return c;
}

/// Reads and parses a config file; JSON syntax errors report line and column.
inline Config load_config(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + file + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(file + ":" + std::to_string(line) + ":" + std::to_string(col) + ": invalid JSON (" + e.what() +
                      ")");
  }
  return parse_config(doc);
}

template <Probability T>
SourceModel<T> build_source(const Config& c) {
  using namespace detail;
  if (!c.source) throw ConfigError("config: missing required field 'source'");
  const json& s = *c.source;
  const std::string where = "source";
  if (!s.is_object()) throw ConfigError("source: expected an object");
  const std::string type = to_string(require(s, "type", where), "source.type");
  const Alphabet& a = c.alphabet;
  try {
    if (type == "iid") {
      only_fields(s, where, {"type", "p"});
      return sources::iid<T>(a, to_law(require(s, "p", where), "source.p"));
    }
    if (type == "markov") {
      only_fields(s, where, {"type", "order", "rows", "short_rows"});
      std::size_t order = to_size(require(s, "order", where), "source.order");
      auto rows = to_rows(a, require(s, "rows", where), "source.rows");
      std::map<Word, std::vector<Rational>> short_rows;
      if (auto it = s.find("short_rows"); it != s.end()) short_rows = to_rows(a, *it, "source.short_rows");
      return sources::markov<T>(a, order, rows, short_rows);
    }
    if (type == "polya_urn") {
      only_fields(s, where, {"type", "composition", "reinforcement"});
      const json& comp = require(s, "composition", where);
      if (!comp.is_array()) throw ConfigError("source.composition: expected an array of ball counts");
      std::vector<long> balls;
      for (std::size_t i = 0; i < comp.size(); ++i)
        balls.push_back(to_long(comp[i], "source.composition[" + std::to_string(i) + "]"));
      long r = 1;
      if (auto it = s.find("reinforcement"); it != s.end()) r = to_long(*it, "source.reinforcement");
      return sources::polya_urn<T>(a, std::move(balls), r);
    }
    if (type == "time_decay") {
      only_fields(s, where, {"type", "target", "scale", "ratio", "background"});
      Symbol target = to_word(a, to_string(require(s, "target", where), "source.target"), "source.target").at(0);
      Rational scale = 1;
      if (auto it = s.find("scale"); it != s.end()) scale = to_rational(*it, "source.scale");
      Rational ratio = to_rational(require(s, "ratio", where), "source.ratio");
      std::vector<Rational> background;
      if (auto it = s.find("background"); it != s.end()) background = to_law(*it, "source.background");
      return sources::time_decay<T>(a, target, scale, ratio, std::move(background));
    }
    if (type == "time_schedule") {
      only_fields(s, where, {"type", "steps"});
      const json& steps = require(s, "steps", where);
      if (!steps.is_array()) throw ConfigError("source.steps: expected an array of laws");
      std::vector<std::vector<Rational>> laws;
      for (std::size_t i = 0; i < steps.size(); ++i)
        laws.push_back(to_law(steps[i], "source.steps[" + std::to_string(i) + "]"));
      return sources::time_schedule<T>(a, std::move(laws));
    }
    if (type == "table") {
      only_fields(s, where, {"type", "entries", "fallback"});
      auto entries = to_rows(a, require(s, "entries", where), "source.entries");
      sources::TableFallback fb = sources::TableFallback::longest_suffix;
      if (auto it = s.find("fallback"); it != s.end()) {
        std::string f = to_string(*it, "source.fallback");
        if (f == "uniform")
          fb = sources::TableFallback::uniform;
        else if (f != "longest_suffix")
          throw ConfigError("source.fallback: expected \"longest_suffix\" or \"uniform\"");
      }
      return sources::table<T>(a, entries, fb);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InputError& e) {
    throw ConfigError(std::string("source: ") + e.what());
  }
  throw ConfigError("source.type: unknown source type '" + type + "'");
}

inline Regex build_pattern(const Config& c) {
  if (!c.pattern) throw ConfigError("config: missing required field 'pattern'");
  return parse_regex(*c.pattern, c.alphabet);
}

template <Probability T>
Transformation build_transformation(const Config& c, const SourceModel<T>& source, const json& t,
                                    const std::string& where) {
  using namespace detail;
  if (!t.is_object()) throw ConfigError(where + ": expected an object");
  const std::string type = to_string(require(t, "type", where), where + ".type");
  if (type == "constant") {
    only_fields(t, where, {"type", "label"});
    if (auto it = t.find("label"); it != t.end()) return Transformation::constant(to_string(*it, path(where, "label")));
    return Transformation::constant();
  }
  if (type == "last_k") {
    only_fields(t, where, {"type", "k"});
    std::size_t k = to_size(require(t, "k", where), path(where, "k"));
    if (k < 1) throw ConfigError(path(where, "k") + ": must be at least 1");
    return Transformation::last_k_symbols(k);
  }
  if (type == "automaton") {
    only_fields(t, where, {"type", "pattern"});
    std::string text;
    if (auto it = t.find("pattern"); it != t.end())
      text = to_string(*it, path(where, "pattern"));
    else if (c.pattern)
      text = *c.pattern;
    else
      throw ConfigError(where + ": automaton transformation needs a pattern");
    return Transformation::automaton_state(matching_automaton(text, c.alphabet));
  }
  if (type == "source_state") {
    only_fields(t, where, {"type"});
    return Transformation::source_state(source);
  }
  if (type == "time_index") {
    only_fields(t, where, {"type"});
    return Transformation::time_index();
  }
  if (type == "table") {
    only_fields(t, where, {"type", "labels"});
    const json& labels = require(t, "labels", where);
    if (!labels.is_object()) throw ConfigError(path(where, "labels") + ": expected an object mapping prefixes to labels");
    std::map<Word, std::string> map;
    for (const auto& [key, value] : labels.items()) {
      std::string at = path(where, "labels") + "[\"" + key + "\"]";
      Word w = to_word(c.alphabet, key, at);
      if (w.empty()) throw ConfigError(at + ": prefixes must be nonempty");
      map.emplace(std::move(w), to_string(value, at));
    }
    return Transformation::table(std::move(map));
  }
  if (type == "product") {
    only_fields(t, where, {"type", "factors"});
    const json& factors = require(t, "factors", where);
    if (!factors.is_array() || factors.empty())
      throw ConfigError(path(where, "factors") + ": expected a nonempty array of transformations");
    std::vector<Transformation> parts;
    for (std::size_t i = 0; i < factors.size(); ++i)
      parts.push_back(build_transformation(c, source, factors[i], path(where, "factors") + "[" + std::to_string(i) + "]"));
    return Transformation::product(std::move(parts));
  }
  if (type == "canonical") {
    only_fields(t, where, {"type"});
    return canonical_embedding_RX(source, build_pattern(c), *c.pattern);
  }
  throw ConfigError(path(where, "type") + ": unknown transformation type '" + type + "'");
}

template <Probability T>
Transformation build_transformation(const Config& c, const SourceModel<T>& source) {
  if (!c.transformation) throw ConfigError("config: missing required field 'transformation'");
  return build_transformation(c, source, *c.transformation, "transformation");
}

}  // namespace markov_embed::cli
