#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mechlab/game.hpp"
#include "mechlab/metrics.hpp"
#include "mechlab/presets.hpp"
#include "mechlab/search.hpp"

namespace mechlab {

namespace detail {

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out.push_back(c);
  }
  out += "\"";
  return out;
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
  int n = 0;
};

inline Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.n = static_cast<int>(xs.size());
  if (m.n == 0) return m;
  for (double x : xs) m.mean += x;
  m.mean /= m.n;
  if (m.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / (m.n - 1));
  }
  return m;
}

// Fans independent jobs out across hardware threads; each job writes only
// its own pre-assigned slot, so scheduling cannot perturb the results.
template <typename Fn>
void parallel_for_index(std::size_t count, Fn fn) {
  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(hw, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Isolation runs: one mechanism, a homogeneous trader population, economic
// properties averaged over independent runs.

struct IsolateParams {
  int runs = 100;
  int num_days = 500;
  int rounds_per_day = 10;
  int traders = 120;
  Currency value_low = 50.0;
  Currency value_high = 150.0;
  PriceBounds bounds;
  std::uint64_t seed = 0;
};

struct IsolateRun {
  std::optional<double> ea;
  std::optional<double> alpha;
};

struct IsolateCellResult {
  std::string mechanism;         // display name
  std::string genome;            // canonical genome string
  Strategy strategy = Strategy::ZIC;
  std::vector<IsolateRun> runs;
  detail::Moments ea;     // over runs where E_a is defined
  detail::Moments alpha;  // over runs with at least one trading day
  std::vector<double> ea_samples;
  std::vector<double> alpha_samples;
};

inline PopulationSpec homogeneous_population(Strategy strategy, int traders,
                                             Currency value_low,
                                             Currency value_high) {
  PopulationSpec pop;
  pop.value_low = value_low;
  pop.value_high = value_high;
  switch (strategy) {
    case Strategy::ZIC: pop.zic = traders; break;
    case Strategy::ZIP: pop.zip = traders; break;
    case Strategy::RE: pop.re = traders; break;
    case Strategy::GD: pop.gd = traders; break;
  }
  return pop;
}

inline PopulationSpec mixed_population(int traders, Currency value_low,
                                       Currency value_high) {
  PopulationSpec pop;
  pop.value_low = value_low;
  pop.value_high = value_high;
  pop.zic = traders / 4;
  pop.zip = traders / 4;
  pop.re = traders / 4;
  pop.gd = traders - 3 * (traders / 4);
  return pop;
}

inline IsolateRun evaluate_isolated_run(const GameResult& result, int num_days) {
  UnderlyingSchedule schedule;
  for (const TraderSpec& t : result.traders) {
    (t.side == TraderSide::Buyer ? schedule.buyer_values : schedule.seller_values)
        .push_back(t.private_value);
  }
  const Equilibrium eq = theoretical_equilibrium(schedule);

  double realized = 0.0;
  for (const Transaction& t : result.transactions) {
    realized += t.buyer_value - t.seller_value;
  }

  IsolateRun run;
  run.ea = allocative_efficiency(realized, eq.max_surplus * num_days);

  // Daily Smith alpha, averaged over the days that traded.
  std::vector<double> day_alphas;
  std::vector<Currency> day_prices;
  int current_day = -1;
  auto flush = [&] {
    if (auto a = smith_alpha(day_prices, eq.price)) day_alphas.push_back(*a);
    day_prices.clear();
  };
  for (const Transaction& t : result.transactions) {
    if (t.day != current_day) {
      flush();
      current_day = t.day;
    }
    day_prices.push_back(t.price);
  }
  flush();
  if (!day_alphas.empty()) {
    double total = 0.0;
    for (double a : day_alphas) total += a;
    run.alpha = total / static_cast<double>(day_alphas.size());
  }
  return run;
}

inline IsolateCellResult run_isolate_cell(const MechanismGenome& genome,
                                          const std::string& mechanism_name,
                                          Strategy strategy,
                                          const IsolateParams& params) {
  IsolateCellResult cell;
  cell.mechanism = mechanism_name;
  cell.genome = genome.str();
  cell.strategy = strategy;
  Rng master(params.seed);
  std::vector<std::uint64_t> seeds;
  seeds.reserve(static_cast<std::size_t>(params.runs));
  for (int r = 0; r < params.runs; ++r) seeds.push_back(master.next_u64());

  cell.runs.resize(static_cast<std::size_t>(params.runs));
  detail::parallel_for_index(static_cast<std::size_t>(params.runs), [&](std::size_t r) {
    GameConfig game;
    game.num_days = params.num_days;
    game.rounds_per_day = params.rounds_per_day;
    game.markets = {genome};
    game.market_names = {mechanism_name};
    game.population = homogeneous_population(strategy, params.traders,
                                             params.value_low, params.value_high);
    game.bounds = params.bounds;
    game.seed = seeds[r];
    cell.runs[r] = evaluate_isolated_run(run_game(game), params.num_days);
  });
  for (const IsolateRun& run : cell.runs) {
    if (run.ea) cell.ea_samples.push_back(*run.ea);
    if (run.alpha) cell.alpha_samples.push_back(*run.alpha);
  }
  cell.ea = detail::moments(cell.ea_samples);
  cell.alpha = detail::moments(cell.alpha_samples);
  return cell;
}

inline void write_isolate_csv(std::ostream& os,
                              const std::vector<IsolateCellResult>& cells) {
  os << "run,mechanism,strategy,ea,alpha\n";
  for (const IsolateCellResult& cell : cells) {
    for (std::size_t r = 0; r < cell.runs.size(); ++r) {
      os << r << ',' << detail::csv_quote(cell.genome) << ','
         << strategy_name(cell.strategy) << ',';
      if (cell.runs[r].ea) os << *cell.runs[r].ea;
      os << ',';
      if (cell.runs[r].alpha) os << *cell.runs[r].alpha;
      os << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Tournaments: replicated games between a fixed list of mechanisms,
// cumulative scores reported mean +- sd per market.

struct TournamentParams {
  int replications = 3;
  int num_days = 500;
  int rounds_per_day = 10;
  PopulationSpec population;
  PriceBounds bounds;
  std::uint64_t seed = 0;
};

struct TournamentResult {
  std::vector<std::string> names;
  std::vector<std::vector<double>> scores;  // [replication][market] cumulative
  std::vector<detail::Moments> summary;     // per market
  std::vector<GameResult> games;
};

inline TournamentResult run_tournament(const std::vector<MechanismGenome>& genomes,
                                       const std::vector<std::string>& names,
                                       const TournamentParams& params) {
  if (genomes.size() < 2) {
    throw std::invalid_argument("tournament: at least two markets required");
  }
  TournamentResult result;
  result.names = names;
  Rng master(params.seed);
  std::vector<std::uint64_t> seeds;
  seeds.reserve(static_cast<std::size_t>(params.replications));
  for (int rep = 0; rep < params.replications; ++rep) seeds.push_back(master.next_u64());

  result.games.resize(static_cast<std::size_t>(params.replications));
  detail::parallel_for_index(
      static_cast<std::size_t>(params.replications), [&](std::size_t rep) {
        GameConfig game;
        game.num_days = params.num_days;
        game.rounds_per_day = params.rounds_per_day;
        game.markets = genomes;
        game.market_names = names;
        game.population = params.population;
        game.bounds = params.bounds;
        game.seed = seeds[rep];
        result.games[rep] = run_game(game);
      });
  for (const GameResult& gr : result.games) {
    result.scores.push_back(gr.cumulative_score);
  }
  for (std::size_t m = 0; m < genomes.size(); ++m) {
    std::vector<double> xs;
    for (const std::vector<double>& rep : result.scores) xs.push_back(rep[m]);
    result.summary.push_back(detail::moments(xs));
  }
  return result;
}

inline void write_tournament_csv(std::ostream& os, const TournamentResult& result) {
  os << "market,mean_score,sd,replications\n";
  for (std::size_t m = 0; m < result.names.size(); ++m) {
    os << detail::csv_quote(result.names[m]) << ',' << result.summary[m].mean << ','
       << result.summary[m].sd << ',' << result.summary[m].n << '\n';
  }
}

// ---------------------------------------------------------------------------
// Search harness: drives MechanismSearch, streams the per-step CSV, keeps a
// resumable checkpoint, and reports the final Hall of Fame.

inline void write_step_csv_header(std::ostream& os,
                                  const std::vector<std::string>& fixed_names,
                                  int samples_per_step) {
  os << "step,temperature";
  for (const std::string& name : fixed_names) os << ",score_" << name;
  os << ",hof_min,hof_median,hof_max";
  for (int i = 0; i < samples_per_step; ++i) {
    os << ",sample" << i << "_genome,sample" << i << "_score";
  }
  os << '\n';
}

inline void write_step_csv_row(std::ostream& os, const StepRecord& record,
                               int samples_per_step) {
  os << record.step << ',' << record.temperature;
  for (double s : record.fixed_scores) os << ',' << s;
  os << ',' << record.hof_min << ',' << record.hof_median << ',' << record.hof_max;
  for (int i = 0; i < samples_per_step; ++i) {
    if (i < static_cast<int>(record.samples.size())) {
      os << ',' << detail::csv_quote(record.samples[i].genome) << ','
         << record.samples[i].score;
    } else {
      os << ",,";
    }
  }
  os << '\n';
}

inline void write_hof_csv(std::ostream& os, const HallOfFame& hof) {
  os << "label,genome,mean_score,games,active\n";
  for (const HofEntry& e : hof.active()) {
    os << e.label << ',' << detail::csv_quote(e.key) << ',' << e.mean << ','
       << e.games << ",1\n";
  }
  for (const HofEntry& e : hof.inactive()) {
    os << e.label << ',' << detail::csv_quote(e.key) << ',' << e.mean << ','
       << e.games << ",0\n";
  }
}

// The four standard opponents every search game includes: clearing house and
// continuous double auction, each at 10% and 100% profit charges.
inline void default_fixed_markets(SearchConfig& config) {
  config.fixed_markets = {preset("CH"), preset("CH_H"), preset("CDA"),
                          preset("CDA_H")};
  config.fixed_names = {"CH_l", "CH_h", "CDA_l", "CDA_h"};
}

struct SearchArtifacts {
  std::vector<StepRecord> steps;
};

inline SearchArtifacts run_search(
    MechanismSearch& search, const std::optional<std::filesystem::path>& out_dir,
    bool resume = false,
    const std::function<void(const StepRecord&)>& on_step = {}) {
  namespace fs = std::filesystem;
  std::ofstream steps_csv;
  fs::path checkpoint_path;
  if (out_dir) {
    fs::create_directories(*out_dir);
    checkpoint_path = *out_dir / "checkpoint.json";
    if (resume && fs::exists(checkpoint_path)) {
      std::ifstream in(checkpoint_path);
      nlohmann::json j;
      in >> j;
      search.restore(j);
    }
    const fs::path csv_path = *out_dir / "steps.csv";
    const bool append = resume && fs::exists(csv_path) && search.next_step() > 1;
    steps_csv.open(csv_path, append ? std::ios::app : std::ios::out);
    if (!append) {
      write_step_csv_header(steps_csv, search.config().fixed_names,
                            search.config().samples_per_step);
    }
  }

  SearchArtifacts artifacts;
  while (!search.done()) {
    StepRecord record = search.run_step();
    if (steps_csv.is_open()) {
      write_step_csv_row(steps_csv, record, search.config().samples_per_step);
      steps_csv.flush();
      std::ofstream cp(checkpoint_path);
      cp << search.checkpoint().dump(2) << '\n';
    }
    if (on_step) on_step(record);
    artifacts.steps.push_back(std::move(record));
  }
  if (out_dir) {
    std::ofstream hof_csv(*out_dir / "hof.csv");
    write_hof_csv(hof_csv, search.hall_of_fame());
  }
  return artifacts;
}

}  // namespace mechlab
