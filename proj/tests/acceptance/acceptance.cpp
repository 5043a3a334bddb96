// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any
// criterion fails. Expected values come from the oracles in ../oracles.hpp.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace markov_embed;
using fixtures::binary;
using fixtures::q;

namespace {

/// Collects the first few failure details of one criterion.
struct Outcome {
  std::vector<std::string> failures;
  std::string summary;

  void fail(const std::string& why) {
    if (failures.size() < 5) failures.push_back(why);
    else if (failures.size() == 5) failures.push_back("...");
  }
  bool ok() const { return failures.empty(); }
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;  // 0 = no runtime budget
  std::function<void(Outcome&)> body;
};

// 1. Chain DP equals brute force, rational mode, n = 1..12.
void oracle_equivalence(Outcome& out) {
  std::size_t cells = 0;
  for (auto& [name, s] : fixtures::acceptance_sources<Rational>())
    for (const auto& text : fixtures::acceptance_patterns()) {
      Regex r = parse_regex(text, binary());
      if (nullable(r)) continue;
      MarkovChain<Rational> chain = pattern_chain(s, r, 12);
      std::vector<std::size_t> lengths;
      for (std::size_t n = 1; n <= 12; ++n) lengths.push_back(n);
      for (const auto& d : count_distributions(chain, lengths)) {
        ++cells;
        if (d.pmf != count_distribution_bruteforce(s, r, d.n).pmf)
          out.fail(name + " \"" + text + "\" n=" + std::to_string(d.n));
      }
    }
  out.summary = std::to_string(cells) + " (source, pattern, n) cells compared exactly";
}

// 2. Binomial law for "1" (n <= 100) and E[K_n] = (n-1)p^2 for "11" (n <= 50).
void closed_form(Outcome& out) {
  for (auto [num, den] : {std::pair{1L, 2L}, {3L, 10L}}) {
    Rational p = q(num, den);
    std::vector<std::size_t> lengths;
    for (std::size_t n = 1; n <= 100; ++n) lengths.push_back(n);
    auto ones = pattern_chain(fixtures::iid<Rational>(num, den), parse_regex("1", binary()), 100);
    for (const auto& d : count_distributions(ones, lengths))
      if (d.pmf != oracle::binomial_pmf(static_cast<unsigned>(d.n), p))
        out.fail("Binomial mismatch p=" + p.get_str() + " n=" + std::to_string(d.n));
    lengths.resize(50);
    auto elevens = pattern_chain(fixtures::iid<Rational>(num, den), parse_regex("11", binary()), 50);
    for (const auto& d : count_distributions(elevens, lengths))
      if (moments(d).mean != Rational(static_cast<long>(d.n) - 1) * p * p)
        out.fail("mean mismatch p=" + p.get_str() + " n=" + std::to_string(d.n));
  }
  out.summary = "p in {1/2, 3/10}";
}

// 3. Urn witness at N=3; (time, count of ones) certifies at N=8.
void witness(Outcome& out) {
  auto urn = fixtures::urn<Rational>();
  auto rep = check_markov(urn, Transformation::last_k_symbols(1), 3);
  if (rep.verdict != Verdict::not_markov || !rep.witness) {
    out.fail(std::string("last symbol verdict ") + to_string(rep.verdict));
  } else {
    const auto& w = *rep.witness;
    if (binary().format(w.u) != "11" || binary().format(w.v) != "01" || w.deviation != q(1, 4))
      out.fail("witness '" + binary().format(w.u) + "' vs '" + binary().format(w.v) + "' deviation " +
               w.deviation.get_str());
    else
      out.summary = "witness '11' vs '01' deviation 1/4";
  }
  auto stat = Transformation::product({Transformation::time_index(), oracle::count_of_ones(8)});
  auto cert = check_markov(urn, stat, 8);
  if (!cert.certified()) out.fail(std::string("(time, ones) verdict ") + to_string(cert.verdict));
  else out.summary += "; (time, ones) certified at N=8 with " + std::to_string(cert.labels.size()) + " labels";
}

// 4. Refinement laws: (a) refines R, (b) Markov, (c) coarsest against brute
// force at N=3 (internal node pairs), (d) fixpoint.
void refinement_laws(Outcome& out) {
  std::size_t instances = 0;
  for (auto& [name, s] : fixtures::acceptance_sources<Rational>())
    for (const Transformation& r : {Transformation::constant(), Transformation::last_k_symbols(1),
                                    Transformation::automaton_state(matching_automaton("10|01", binary()))})
      for (std::size_t n : {2u, 3u, 4u}) {
        ++instances;
        std::string tag = name + " " + r.describe() + " N=" + std::to_string(n);
        auto res = coarsest_markov_refinement(s, r, n);
        if (!res.partition.refines(res.input_labels.id)) out.fail("(a) " + tag);
        if (!res.report.certified() || !oracle::markov_partition(res.tree, res.partition.block)) out.fail("(b) " + tag);
        RefineStats stats;
        refine_partition(res.tree, res.partition.block, kDefaultTolerance, &stats);
        if (stats.splits != 0) out.fail("(d) " + tag);
      }

  std::vector<std::pair<std::string, RefinementResult<Rational>>> cases;
  auto last1 = Transformation::last_k_symbols(1);
  cases.emplace_back("polya_urn", coarsest_markov_refinement(fixtures::urn<Rational>(), last1, 3));
  cases.emplace_back("markov2", coarsest_markov_refinement(fixtures::markov2<Rational>(), last1, 3));
  cases.emplace_back("time_decay", coarsest_markov_refinement(fixtures::decay<Rational>(), last1, 3));
  cases.emplace_back("iid(3/10)", coarsest_markov_refinement(fixtures::iid<Rational>(3, 10), last1, 3));
  std::size_t enumerated = 0, passing = 0;
  for (auto& [name, res] : cases) {
    oracle::for_each_refining_partition(res.input_labels.id, [&](const std::vector<std::size_t>& p) {
      ++enumerated;
      if (!oracle::markov_partition(res.tree, p)) return;
      ++passing;
      for (std::size_t u = 1; u < res.tree.size(); ++u) {
        if (res.tree.nodes[u].depth >= res.tree.depth) continue;
        for (std::size_t v = u + 1; v < res.tree.size(); ++v) {
          if (res.tree.nodes[v].depth >= res.tree.depth) continue;
          if (p[u] == p[v] && res.partition.block[u] != res.partition.block[v])
            out.fail("(c) " + name + ": a Markov refinement joins '" + binary().format(res.tree.word(u)) + "' and '" +
                     binary().format(res.tree.word(v)) + "'");
        }
      }
    });
  }
  out.summary = std::to_string(instances) + " instances for (a)(b)(d); (c) enumerated " + std::to_string(enumerated) +
                " partitions, " + std::to_string(passing) + " Markov";
}

// 5. DFA membership vs interpreter on the 510 nonempty binary words of
// length <= 8; minimal matching automaton for "11" has 3 states.
void automata_soundness(Outcome& out) {
  std::size_t words = 0;
  for (const auto& text : fixtures::regex_corpus()) {
    Regex r = parse_regex(text, binary());
    Dfa dfa = minimize(determinize(compile(r, 2)));
    std::optional<MatchingAutomaton> ma;
    if (!nullable(r)) ma = matching_automaton(r, binary(), text);
    words = 0;
    for (std::size_t n = 1; n <= 8; ++n)
      oracle::for_each_word(2, n, [&](const Word& w) {
        ++words;
        if (dfa.accepts(w) != oracle::member(r, w)) out.fail("\"" + text + "\" membership on " + binary().format(w));
        if (ma && count_occurrences(*ma, w) != oracle::occurrences(r, w))
          out.fail("\"" + text + "\" occurrences on " + binary().format(w));
      });
  }
  std::size_t states = matching_automaton("11", binary()).dfa.size();
  if (states != 3) out.fail("\"11\" matching automaton has " + std::to_string(states) + " states");
  out.summary = std::to_string(fixtures::regex_corpus().size()) + " patterns x " + std::to_string(words) +
                " words; \"11\" automaton has " + std::to_string(states) + " states";
}

// 6. Gaussian-like vs discrete-like shapes.
void shape_dichotomy(Outcome& out) {
  auto g = limit_diagnose(fixtures::iid<Rational>(1, 2), parse_regex("11", binary()), {25, 100, 400});
  double k25 = *g.rows[0].kolmogorov, k100 = *g.rows[1].kolmogorov, k400 = *g.rows[2].kolmogorov;
  if (!(k25 > k100 && k100 > k400)) out.fail("Kolmogorov distances not strictly decreasing");
  if (!(k400 < 0.05)) out.fail("final Kolmogorov distance " + io::format_double(k400) + " >= 0.05");
  if (!(k400 <= k25 / 3)) out.fail("d(400) > d(25)/3");
  auto d = limit_diagnose(fixtures::decay<Rational>(), parse_regex("1", binary()), {10, 20, 40});
  double tv = *d.rows.back().tv_to_previous;
  if (!(tv < 1e-3)) out.fail("time-decay tv " + io::format_double(tv) + " >= 1e-3");
  if (d.verdict != Shape::discrete_like) out.fail(std::string("time-decay verdict ") + to_string(d.verdict));
  char buf[200];
  std::snprintf(buf, sizeof buf, "K-distances %.4g, %.4g, %.4g (%s); time-decay tv %.3g (%s)", k25, k100, k400,
                to_string(g.verdict), tv, to_string(d.verdict));
  out.summary = buf;
}

// 7. Monte Carlo within 0.02 of (5/8, 1/4, 1/8); seeded output reproducible.
void monte_carlo(Outcome& out) {
  auto s = fixtures::iid<Rational>(1, 2);
  Regex r = parse_regex("11", binary());
  const std::uint64_t seed = 20080101;
  auto a = monte_carlo_counts(s, r, 3, 100000, seed);
  const double expected[] = {0.625, 0.25, 0.125, 0.0};
  for (std::size_t k = 0; k < 4; ++k)
    if (std::fabs(a.frequency(k) - expected[k]) > 0.02)
      out.fail("k=" + std::to_string(k) + " frequency " + io::format_double(a.frequency(k)));
  if (io::empirical_csv(a) != io::empirical_csv(monte_carlo_counts(s, r, 3, 100000, seed)))
    out.fail("same seed produced different output");
  char buf[160];
  std::snprintf(buf, sizeof buf, "frequencies %.4f, %.4f, %.4f", a.frequency(0), a.frequency(1), a.frequency(2));
  out.summary = buf;
}

// 8. CLI exit codes and byte-identical outputs.
void cli_contract(Outcome& out) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "markov_embed_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  auto run = [&](const std::string& name, const std::string& command, const std::string& json) {
    fs::path cfg = dir / (name + ".json");
    std::ofstream(cfg) << json;
    std::string cmd = std::string(MARKOV_EMBED_CLI) + " --config " + cfg.string() + " --out " + (dir / name).string() +
                      " " + command + " > " + (dir / (name + ".log")).string() + " 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const std::string iid = R"("source": {"type": "iid", "p": ["1/2", "1/2"]})";
  const std::string urn = R"("source": {"type": "polya_urn", "composition": [1, 1]})";
  struct Case {
    std::string name, command, json;
    int expected;
  };
  std::vector<Case> cases{
      {"certified", "check", "{" + iid + R"(, "transformation": {"type": "last_k", "k": 1}, "horizon": 6})", 0},
      {"not_markov", "check", "{" + urn + R"(, "transformation": {"type": "last_k", "k": 1}, "horizon": 3})", 3},
      {"insufficient", "check",
       R"({"source": {"type": "iid", "p": [0.9, 0.1]}, "transformation": {"type": "last_k", "k": 1}, "horizon": 3, "prune_below": 0.2})",
       4},
      {"missing_source", "check", R"({"transformation": {"type": "constant"}})", 2},
      {"nullable", "analyze", "{" + iid + R"(, "pattern": "(0|1)?", "n_grid": [2, 3, 4]})", 2},
      {"resource", "refine", "{" + iid + R"(, "transformation": {"type": "constant"}, "horizon": 12, "node_cap": 100})",
       5},
  };
  for (const auto& c : cases) {
    int code = run(c.name, c.command, c.json);
    if (code != c.expected)
      out.fail(c.name + ": exit " + std::to_string(code) + ", expected " + std::to_string(c.expected));
  }
  if (slurp(dir / "not_markov.log").find("'11' vs '01'") == std::string::npos) out.fail("witness not printed");

  const std::string analyze = "{" + iid + R"(, "pattern": "11", "n_grid": [25, 100, 400]})";
  const std::string refine = "{" + urn + R"(, "transformation": {"type": "last_k", "k": 1}, "horizon": 5})";
  const std::string simulate = "{" + iid + R"(, "pattern": "11", "length": 3, "trials": 5000, "seed": 9})";
  for (int i = 0; i < 2; ++i) {
    std::string suffix = std::to_string(i);
    if (run("analyze" + suffix, "analyze", analyze) != 0) out.fail("analyze run failed");
    if (run("refine" + suffix, "refine", refine) != 0) out.fail("refine run failed");
    if (run("simulate" + suffix, "simulate", simulate) != 0) out.fail("simulate run failed");
  }
  std::size_t compared = 0;
  for (const char* sub : {"analyze", "refine", "simulate"})
    for (const auto& entry : fs::directory_iterator(dir / (std::string(sub) + "0"))) {
      ++compared;
      fs::path twin = dir / (std::string(sub) + "1") / entry.path().filename();
      if (slurp(entry.path()) != slurp(twin)) out.fail(std::string(sub) + ": " + entry.path().filename().string() + " differs");
    }
  out.summary = std::to_string(cases.size()) + " exit-code cases; " + std::to_string(compared) +
                " output files byte-identical across reruns";
  fs::remove_all(dir);
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence (chain DP == brute force, rational, n<=12)", 60, oracle_equivalence},
      {2, "closed forms (Binomial n<=100; E[K_n]=(n-1)p^2 n<=50)", 5, closed_form},
      {3, "non-Markov witness and sufficient statistic", 0, witness},
      {4, "refinement laws (a) refines (b) Markov (c) coarsest (d) fixpoint", 120, refinement_laws},
      {5, "automata soundness", 10, automata_soundness},
      {6, "shape dichotomy", 60, shape_dichotomy},
      {7, "Monte Carlo consistency and reproducibility", 0, monte_carlo},
      {8, "CLI exit codes and determinism", 0, cli_contract},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome out;
    auto start = std::chrono::steady_clock::now();
    try {
      c.body(out);
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && seconds > c.budget_seconds)
      out.fail("runtime " + io::format_double(seconds) + " s exceeds budget");
    char timing[64];
    if (c.budget_seconds > 0)
      std::snprintf(timing, sizeof timing, "%.2f s / %.0f s", seconds, c.budget_seconds);
    else
      std::snprintf(timing, sizeof timing, "%.2f s", seconds);
    std::cout << (out.ok() ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << " [" << timing << "]";
    if (!out.summary.empty()) std::cout << " -- " << out.summary;
    std::cout << '\n';
    for (const auto& f : out.failures) std::cout << "      " << f << '\n';
    if (!out.ok()) ++failed;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << criteria.size() - failed << "/" << criteria.size() << '\n';
  return failed ? 1 : 0;
}
