#pragma once

// CSV serialisation (RFC 4180 quoting, "\n" line endings) and atomic file
// output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "markov_embed/analysis.hpp"
#include "markov_embed/chain.hpp"
#include "markov_embed/markov_check.hpp"
#include "markov_embed/refinement.hpp"

namespace markov_embed::io {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_field(fields[i]);
  }
  os << '\n';
}

inline std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Writes `contents` to a sibling temporary file, then renames it over `path`.
inline void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

/// Columns n,k,probability. A capped tail bucket is written as k ">=cap".
template <Probability T>
std::string distributions_csv(const std::vector<CountDistribution<T>>& dists) {
  std::ostringstream os;
  csv_row(os, {"n", "k", "probability"});
  for (const auto& d : dists)
    for (std::size_t k = 0; k < d.pmf.size(); ++k) {
      std::string key = std::to_string(k);
      if (d.tail_cap && k + 1 == d.pmf.size()) key = ">=" + key;
      csv_row(os, {std::to_string(d.n), key, format_probability(d.pmf[k])});
    }
  return os.str();
}

/// Columns n,mean,variance,skewness,kolmogorov,tv; absent values are empty.
template <Probability T>
std::string diagnostics_csv(const LimitDiagnostics<T>& diag) {
  std::ostringstream os;
  csv_row(os, {"n", "mean", "variance", "skewness", "kolmogorov", "tv"});
  for (const auto& r : diag.rows)
    csv_row(os, {std::to_string(r.n), format_probability(r.mean), format_probability(r.variance),
                 format_double(r.skewness), r.kolmogorov ? format_double(*r.kolmogorov) : "",
                 r.tv_to_previous ? format_double(*r.tv_to_previous) : ""});
  return os.str();
}

/// Columns prefix,label over every non-root node in breadth-first order.
template <Probability T>
std::string refinement_csv(const RefinementResult<T>& result) {
  std::ostringstream os;
  csv_row(os, {"prefix", "label"});
  for (std::size_t v = 1; v < result.tree.size(); ++v)
    csv_row(os, {result.tree.alphabet.format(result.tree.word(v)), "b" + std::to_string(result.partition.block[v])});
  return os.str();
}

/// Columns from,to,probability (symbols marginalised); initial law rows use
/// from = "^".
template <Probability T>
std::string transition_csv(const MarkovCheckReport<T>& report) {
  std::ostringstream os;
  csv_row(os, {"from", "to", "probability"});
  for (std::size_t l = 0; l < report.labels.size(); ++l)
    if (T(0) < report.initial[l]) csv_row(os, {"^", report.labels[l], format_probability(report.initial[l])});
  for (std::size_t a = 0; a < report.labels.size(); ++a)
    for (std::size_t b = 0; b < report.labels.size(); ++b) {
      T p = report.transition(a, b);
      if (T(0) < p) csv_row(os, {report.labels[a], report.labels[b], format_probability(p)});
    }
  return os.str();
}

/// Columns from,symbol,to,probability,increment; initial law rows use from = "^".
template <Probability T>
std::string chain_csv(const MarkovChain<T>& chain) {
  std::ostringstream os;
  csv_row(os, {"from", "symbol", "to", "probability", "increment"});
  for (std::size_t s = 0; s < chain.size(); ++s)
    if (T(0) < chain.initial[s])
      csv_row(os, {"^", "", chain.states[s], format_probability(chain.initial[s]), chain.marked[s] ? "1" : "0"});
  for (const auto& e : chain.edges)
    csv_row(os, {chain.states[e.from], chain.alphabet.name(e.symbol), chain.states[e.to], format_probability(e.prob),
                 std::to_string(e.increment)});
  return os.str();
}

/// Columns n,k,frequency,count.
inline std::string empirical_csv(const EmpiricalCounts& counts) {
  std::ostringstream os;
  csv_row(os, {"n", "k", "frequency", "count"});
  for (std::size_t k = 0; k < counts.counts.size(); ++k)
    csv_row(os, {std::to_string(counts.n), std::to_string(k), format_double(counts.frequency(k)),
                 std::to_string(counts.counts[k])});
  return os.str();
}

}  // namespace markov_embed::io
