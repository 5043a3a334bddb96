// markov-embed: config-driven front end.
//
// Exit codes: 0 success (check: certified), 1 internal error, 2 invalid
// config or input, 3 not Markov, 4 insufficient support, 5 resource cap.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "config.hpp"

namespace me = markov_embed;
namespace cli = markov_embed::cli;

namespace {

enum Exit { ok = 0, internal = 1, invalid = 2, not_markov = 3, insufficient = 4, resource = 5 };

struct Globals {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
};

std::filesystem::path out_file(const cli::Config& c, const std::string& name) {
  return std::filesystem::path(c.output_dir) / name;
}

me::TreeOptions tree_options(const cli::Config& c) {
  me::TreeOptions t;
  t.prune_below = c.prune_below;
  t.node_cap = c.node_cap;
  return t;
}

template <me::Probability T>
std::string both(const T& x) {
  std::string s = me::format_probability(x);
  if constexpr (me::is_exact_v<T>) s += " (" + me::io::format_double(me::to_double(x)) + ")";
  return s;
}

template <me::Probability T>
void write_steps(std::ostream& os, const me::MarkovCheckReport<T>& rep, const me::Alphabet& a,
                 const std::vector<me::Step<T>>& steps) {
  for (const auto& s : steps)
    os << "    symbol " << a.name(s.symbol) << " -> " << rep.labels[s.label] << " : " << both(s.prob) << '\n';
}

template <me::Probability T>
int cmd_check(const cli::Config& c) {
  auto source = cli::build_source<T>(c);
  auto r = cli::build_transformation(c, source);
  auto rep = me::check_markov(source, r, c.horizon, c.tolerance, tree_options(c));
  const me::Alphabet& a = c.alphabet;
  std::ostringstream os;
  os << "source: " << source.name() << '\n'
     << "transformation: " << r.describe() << '\n'
     << "horizon: " << rep.horizon << " (next steps certified for histories up to length " << rep.effective_horizon()
     << ")\n"
     << "tolerance: " << (me::is_exact_v<T> ? std::string("exact") : me::io::format_double(rep.tolerance)) << '\n'
     << "labels: " << rep.labels.size() << '\n'
     << "verdict: " << me::to_string(rep.verdict) << '\n';
  if (rep.witness) {
    const auto& w = *rep.witness;
    os << "witness: '" << a.format(w.u) << "' vs '" << a.format(w.v) << "' (label " << rep.labels[w.label]
       << "), deviation " << both(w.deviation) << '\n'
       << "  after '" << a.format(w.u) << "':\n";
    write_steps(os, rep, a, w.u_steps);
    os << "  after '" << a.format(w.v) << "':\n";
    write_steps(os, rep, a, w.v_steps);
  }
  for (std::size_t l : rep.unsupported) os << "unsupported label: " << rep.labels[l] << '\n';
  me::io::write_atomic(out_file(c, "check_report.txt"), os.str());
  if (rep.certified()) me::io::write_atomic(out_file(c, "transition_table.csv"), me::io::transition_csv(rep));
  std::cout << os.str();
  switch (rep.verdict) {
    case me::Verdict::markov_certified:
      return ok;
    case me::Verdict::not_markov:
      return not_markov;
    case me::Verdict::insufficient_support:
      return insufficient;
  }
  return internal;
}

template <me::Probability T>
int cmd_refine(const cli::Config& c) {
  auto source = cli::build_source<T>(c);
  auto r = cli::build_transformation(c, source);
  auto res = me::coarsest_markov_refinement(source, r, c.horizon, c.tolerance, tree_options(c));
  me::io::write_atomic(out_file(c, "refinement.csv"), me::io::refinement_csv(res));
  if (res.report.certified())
    me::io::write_atomic(out_file(c, "refinement_transitions.csv"), me::io::transition_csv(res.report));
  std::cout << "horizon: " << c.horizon << '\n'
            << "input labels: " << res.input_labels.names.size() << '\n'
            << "blocks: " << res.partition.block_count << '\n'
            << "rounds: " << res.stats.rounds << '\n'
            << "verdict: " << me::to_string(res.report.verdict) << '\n';
  return ok;
}

template <me::Probability T>
int cmd_analyze(const cli::Config& c) {
  auto source = cli::build_source<T>(c);
  me::Regex pattern = cli::build_pattern(c);
  me::matching_automaton(pattern, c.alphabet, *c.pattern);  // rejects nullable patterns before any work
  if (c.n_grid.size() < 3) throw cli::ConfigError("n_grid: analysis needs at least three lengths");
  me::ChainOptions opt;
  opt.tolerance = c.tolerance;
  opt.tree = tree_options(c);
  std::vector<me::CountDistribution<T>> dists;
  if (c.method == me::CountMethod::chain) {
    me::MarkovChain<T> chain = me::pattern_chain(source, pattern, c.n_grid.back(), opt);
    me::io::write_atomic(out_file(c, "chain.csv"), me::io::chain_csv(chain));
    std::cout << "chain states: " << chain.size() << '\n';
    dists = me::count_distributions(chain, c.n_grid, c.count_cap);
  } else {
    for (std::size_t n : c.n_grid) dists.push_back(me::count_distribution_bruteforce(source, pattern, n));
  }
  me::io::write_atomic(out_file(c, "distributions.csv"), me::io::distributions_csv(dists));
  if (c.count_cap) {
    std::cout << "count cap " << *c.count_cap << ": moments and shape diagnostics skipped\n";
    return ok;
  }
  auto diag = me::diagnose_distributions(std::move(dists));
  me::io::write_atomic(out_file(c, "diagnostics.csv"), me::io::diagnostics_csv(diag));
  for (const auto& row : diag.rows)
    std::cout << "n=" << row.n << " mean=" << me::io::format_double(me::to_double(row.mean))
              << " variance=" << me::io::format_double(me::to_double(row.variance))
              << " kolmogorov=" << (row.kolmogorov ? me::io::format_double(*row.kolmogorov) : "-")
              << " tv=" << (row.tv_to_previous ? me::io::format_double(*row.tv_to_previous) : "-") << '\n';
  std::cout << "verdict: " << me::to_string(diag.verdict) << '\n';
  return ok;
}

template <me::Probability T>
int cmd_simulate(const cli::Config& c) {
  auto source = cli::build_source<T>(c);
  me::Regex pattern = cli::build_pattern(c);
  auto counts = me::monte_carlo_counts(source, pattern, c.length, c.trials, c.seed);
  me::io::write_atomic(out_file(c, "simulation.csv"), me::io::empirical_csv(counts));
  std::cout << "length: " << c.length << "\ntrials: " << c.trials << "\nseed: " << c.seed << '\n';
  for (std::size_t k = 0; k < counts.counts.size(); ++k)
    if (counts.counts[k]) std::cout << "k=" << k << " frequency=" << me::io::format_double(counts.frequency(k)) << '\n';
  return ok;
}

int cmd_automaton(const cli::Config& c) {
  me::Regex pattern = cli::build_pattern(c);
  me::MatchingAutomaton ma = me::matching_automaton(pattern, c.alphabet, *c.pattern);
  std::ostringstream os;
  os << "# pattern " << *c.pattern << "; states " << ma.dfa.size() << "; columns: id accepting";
  for (const auto& s : c.alphabet.symbols()) os << ' ' << s;
  os << '\n';
  me::dump_transition_table(os, ma.dfa);
  me::io::write_atomic(out_file(c, "automaton.txt"), os.str());
  std::cout << os.str();
  return ok;
}

template <me::Probability T>
int dispatch(const std::string& command, const cli::Config& c) {
  if (command == "check") return cmd_check<T>(c);
  if (command == "refine") return cmd_refine<T>(c);
  if (command == "analyze") return cmd_analyze<T>(c);
  if (command == "simulate") return cmd_simulate<T>(c);
  return cmd_automaton(c);
}

int run(const std::string& command, const Globals& g) {
  cli::Config c = cli::load_config(g.config_path);
  if (g.out) c.output_dir = *g.out;
  if (g.seed) c.seed = *g.seed;
  if (g.mode) c.mode = *g.mode == "floating" ? cli::Mode::floating : cli::Mode::rational;
  if (c.mode == cli::Mode::rational) return dispatch<me::Rational>(command, c);
  return dispatch<double>(command, c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markovian embeddings of random strings: certification, refinement and pattern statistics"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "experiment config (JSON)")->required();
  app.add_option("--out", g.out, "output directory (overrides output_dir)");
  app.add_option("--mode", g.mode, "arithmetic mode (overrides mode)")->check(CLI::IsMember({"rational", "floating"}));
  app.add_option("--seed", g.seed, "random seed (overrides seed)");
  app.fallthrough();
  for (const char* name : {"check", "refine", "analyze", "simulate", "automaton"}) app.add_subcommand(name);
  app.get_subcommand("check")->description("certify that the configured embedding is Markov up to the horizon");
  app.get_subcommand("refine")->description("coarsest Markovian refinement of the configured transformation");
  app.get_subcommand("analyze")->description("exact occurrence-count laws and shape diagnostics over n_grid");
  app.get_subcommand("simulate")->description("Monte Carlo occurrence counts");
  app.get_subcommand("automaton")->description("dump the matching automaton of the pattern");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return invalid;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, g);
  } catch (const me::NotMarkovError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return not_markov;
  } catch (const me::ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return resource;
  } catch (const me::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return invalid;
  } catch (const me::UnsupportedError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return invalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return internal;
  }
}
