// mechlab: double-auction mechanism laboratory.
//
//   mechlab search      sample mechanisms from the policy space, score them
//                       in multi-market games against fixed opponents, and
//                       keep a Hall of Fame of the best found
//   mechlab tournament  replicated multi-market games between named
//                       mechanisms, cumulative scores mean +- sd
//   mechlab isolate     single-market runs with a homogeneous trader
//                       population, reporting allocative efficiency and the
//                       coefficient of convergence

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mechlab/experiment.hpp"

using namespace mechlab;

namespace {

struct CommonOpts {
  int days = 500;
  int rounds = 10;
  int traders = 120;
  double value_low = 50.0;
  double value_high = 150.0;
  double floor = 0.0;
  double ceiling = 200.0;
  std::uint64_t seed = 1;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--days", opts.days, "Trading days per game")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--rounds", opts.rounds, "Rounds per day")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--traders", opts.traders, "Total trader population")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--value-low", opts.value_low, "Private value lower bound");
  cmd->add_option("--value-high", opts.value_high, "Private value upper bound");
  cmd->add_option("--floor", opts.floor, "Price floor");
  cmd->add_option("--ceiling", opts.ceiling, "Price ceiling");
  cmd->add_option("--seed", opts.seed, "Master random seed");
  cmd->add_option("--out", opts.out, "Output directory for CSV artifacts");
}

Strategy parse_strategy(const std::string& name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(
      static_cast<unsigned char>(c))));
  if (lower == "zic") return Strategy::ZIC;
  if (lower == "zip") return Strategy::ZIP;
  if (lower == "re") return Strategy::RE;
  if (lower == "gd") return Strategy::GD;
  throw CLI::ValidationError("--strategy", "unknown strategy: " + name);
}

// --preset names and --genome strings merge into one market list.
std::vector<std::pair<std::string, MechanismGenome>> resolve_markets(
    const std::vector<std::string>& presets,
    const std::vector<std::string>& genomes) {
  std::vector<std::pair<std::string, MechanismGenome>> markets;
  for (const std::string& name : presets) {
    markets.emplace_back(name, preset(name));
  }
  for (std::size_t i = 0; i < genomes.size(); ++i) {
    markets.emplace_back("G" + std::to_string(i),
                         MechanismGenome::parse(genomes[i]));
  }
  return markets;
}

int cmd_search(const CommonOpts& opts, int steps, int samples, int hof_capacity,
               int hof_samples, double t0, double decay, double t_floor,
               bool resume) {
  SearchConfig config;
  config.steps = steps;
  config.samples_per_step = samples;
  config.hof_capacity = static_cast<std::size_t>(hof_capacity);
  config.hof_samples = hof_samples;
  config.anneal = {t0, decay, t_floor};
  default_fixed_markets(config);
  config.num_days = opts.days;
  config.rounds_per_day = opts.rounds;
  config.population = mixed_population(opts.traders, opts.value_low, opts.value_high);
  config.bounds = {opts.floor, opts.ceiling};
  config.seed = opts.seed;

  MechanismSearch search(config);
  std::optional<std::filesystem::path> out_dir;
  if (!opts.out.empty()) out_dir = opts.out;

  run_search(search, out_dir, resume, [&](const StepRecord& record) {
    std::printf("step %3d  T=%.3f  fixed", record.step, record.temperature);
    for (double s : record.fixed_scores) std::printf(" %.3f", s);
    std::printf("  hof[%.3f %.3f %.3f]", record.hof_min, record.hof_median,
                record.hof_max);
    for (const SampleRecord& s : record.samples) {
      std::printf("  %s=%.3f", s.label.c_str(), s.score);
    }
    std::printf("\n");
  });

  std::printf("\nactive hall of fame:\n");
  for (const HofEntry& e : search.hall_of_fame().active()) {
    std::printf("  %-10s mean %.4f over %d game(s)  %s\n", e.label.c_str(),
                e.mean, e.games, e.key.c_str());
  }
  if (out_dir) {
    std::printf("artifacts written to %s\n", out_dir->string().c_str());
  }
  return 0;
}

int cmd_tournament(const CommonOpts& opts,
                   const std::vector<std::string>& presets,
                   const std::vector<std::string>& genomes, int replications) {
  const auto markets = resolve_markets(presets, genomes);
  TournamentParams params;
  params.replications = replications;
  params.num_days = opts.days;
  params.rounds_per_day = opts.rounds;
  params.population = mixed_population(opts.traders, opts.value_low, opts.value_high);
  params.bounds = {opts.floor, opts.ceiling};
  params.seed = opts.seed;

  std::vector<MechanismGenome> genome_list;
  std::vector<std::string> names;
  for (const auto& [name, genome] : markets) {
    genome_list.push_back(genome);
    names.push_back(name);
  }
  const TournamentResult result = run_tournament(genome_list, names, params);

  // ranked table, best first
  std::vector<std::size_t> order(names.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.summary[a].mean > result.summary[b].mean;
  });
  std::printf("%-14s %12s %10s\n", "market", "score", "sd");
  for (std::size_t i : order) {
    std::printf("%-14s %12.4f %10.4f\n", names[i].c_str(),
                result.summary[i].mean, result.summary[i].sd);
  }

  if (!opts.out.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(opts.out);
    std::ofstream scores(fs::path(opts.out) / "scores.csv");
    write_tournament_csv(scores, result);
    for (std::size_t rep = 0; rep < result.games.size(); ++rep) {
      std::ofstream daily(fs::path(opts.out) /
                          ("daily_rep" + std::to_string(rep) + ".csv"));
      result.games[rep].write_daily_csv(daily);
    }
    std::printf("artifacts written to %s\n", opts.out.c_str());
  }
  return 0;
}

int cmd_isolate(const CommonOpts& opts, const std::vector<std::string>& presets,
                const std::vector<std::string>& genomes,
                const std::vector<std::string>& strategies, int runs) {
  const auto markets = resolve_markets(presets, genomes);
  IsolateParams params;
  params.runs = runs;
  params.num_days = opts.days;
  params.rounds_per_day = opts.rounds;
  params.traders = opts.traders;
  params.value_low = opts.value_low;
  params.value_high = opts.value_high;
  params.bounds = {opts.floor, opts.ceiling};
  params.seed = opts.seed;

  std::vector<IsolateCellResult> cells;
  std::printf("%-14s %-8s %10s %8s %10s %8s\n", "market", "traders", "E_a",
              "sd", "alpha", "sd");
  for (const auto& [name, genome] : markets) {
    for (const std::string& strategy_name_text : strategies) {
      const Strategy strategy = parse_strategy(strategy_name_text);
      IsolateCellResult cell = run_isolate_cell(genome, name, strategy, params);
      std::printf("%-14s %-8s %10.3f %8.3f %10.3f %8.3f\n", name.c_str(),
                  strategy_name(strategy), cell.ea.mean, cell.ea.sd,
                  cell.alpha.mean, cell.alpha.sd);
      cells.push_back(std::move(cell));
    }
  }

  if (!opts.out.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(opts.out);
    std::ofstream runs_csv(fs::path(opts.out) / "runs.csv");
    write_isolate_csv(runs_csv, cells);
    std::printf("artifacts written to %s\n", opts.out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"double-auction mechanism laboratory"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a config file");

  CommonOpts search_opts;
  int steps = 200, samples = 2, hof_capacity = 10, hof_samples = 2;
  double t0 = 1.0, decay = 0.98, t_floor = 0.1;
  bool resume = false;
  CLI::App* search = app.add_subcommand(
      "search", "search the mechanism space against fixed opponents");
  add_common(search, search_opts);
  search->add_option("--steps", steps, "Search steps (one game each)")
      ->check(CLI::NonNegativeNumber);
  search->add_option("--samples", samples, "Mechanisms sampled per step")
      ->check(CLI::PositiveNumber);
  search->add_option("--hof-capacity", hof_capacity, "Active Hall of Fame size")
      ->check(CLI::PositiveNumber);
  search->add_option("--hof-samples", hof_samples,
                     "Hall of Fame members re-entered per game")
      ->check(CLI::NonNegativeNumber);
  search->add_option("--t0", t0, "Initial softmax temperature");
  search->add_option("--decay", decay, "Temperature decay per step");
  search->add_option("--t-floor", t_floor, "Temperature floor");
  search->add_flag("--resume", resume, "Resume from the checkpoint in --out");

  CommonOpts tournament_opts;
  std::vector<std::string> tournament_presets, tournament_genomes;
  int replications = 3;
  CLI::App* tournament = app.add_subcommand(
      "tournament", "replicated games between named mechanisms");
  add_common(tournament, tournament_opts);
  tournament->add_option("--preset", tournament_presets,
                         "Preset mechanism name (repeatable)");
  tournament->add_option("--genome", tournament_genomes,
                         "Mechanism genome string (repeatable)");
  tournament->add_option("--replications", replications, "Games to run")
      ->check(CLI::PositiveNumber);

  CommonOpts isolate_opts;
  isolate_opts.days = 500;
  std::vector<std::string> isolate_presets, isolate_genomes;
  std::vector<std::string> isolate_strategies{"zic"};
  int runs = 100;
  CLI::App* isolate = app.add_subcommand(
      "isolate", "economic properties of single markets");
  add_common(isolate, isolate_opts);
  isolate->add_option("--preset", isolate_presets,
                      "Preset mechanism name (repeatable)");
  isolate->add_option("--genome", isolate_genomes,
                      "Mechanism genome string (repeatable)");
  isolate->add_option("--strategy", isolate_strategies,
                      "Trader strategy per cell: zic, zip, re, gd (repeatable)");
  isolate->add_option("--replications,--runs", runs, "Independent runs per cell")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (search->parsed()) {
      return cmd_search(search_opts, steps, samples, hof_capacity, hof_samples,
                        t0, decay, t_floor, resume);
    }
    if (tournament->parsed()) {
      if (tournament_presets.size() + tournament_genomes.size() < 2) {
        std::cerr << "tournament: need at least two markets (--preset/--genome)\n";
        return 2;
      }
      return cmd_tournament(tournament_opts, tournament_presets,
                            tournament_genomes, replications);
    }
    if (isolate->parsed()) {
      if (isolate_presets.empty() && isolate_genomes.empty()) {
        isolate_presets = {"CDA",        "NCDAEE_D0",  "NCDAEE_D10",
                           "NCDAEE_D20", "NCDAEE_D30", "SM7.1",
                           "SM88.0",     "SM127.1"};
      }
      return cmd_isolate(isolate_opts, isolate_presets, isolate_genomes,
                         isolate_strategies, runs);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
