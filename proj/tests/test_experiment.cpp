#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mechlab/experiment.hpp"

using namespace mechlab;

TEST_CASE("isolation runs produce defined economics for a CDA", "[experiment]") {
  IsolateParams params;
  params.runs = 3;
  params.num_days = 10;
  params.rounds_per_day = 5;
  params.traders = 10;
  params.seed = 42;
  const IsolateCellResult cell =
      run_isolate_cell(preset("CDA"), "CDA", Strategy::ZIC, params);
  REQUIRE(cell.runs.size() == 3);
  REQUIRE(cell.ea.n > 0);
  REQUIRE(cell.ea.mean > 0.0);
  REQUIRE(cell.ea.mean <= 100.0 + 1e-6);
  REQUIRE(cell.alpha.n > 0);
  REQUIRE(cell.alpha.mean >= 0.0);

  std::ostringstream os;
  write_isolate_csv(os, {cell});
  REQUIRE(os.str().rfind("run,mechanism,strategy,ea,alpha\n", 0) == 0);
}

TEST_CASE("isolation is deterministic under a fixed seed", "[experiment]") {
  IsolateParams params;
  params.runs = 2;
  params.num_days = 5;
  params.rounds_per_day = 5;
  params.traders = 8;
  params.seed = 7;
  const auto a = run_isolate_cell(preset("CH"), "CH", Strategy::ZIP, params);
  const auto b = run_isolate_cell(preset("CH"), "CH", Strategy::ZIP, params);
  REQUIRE(a.ea_samples == b.ea_samples);
  REQUIRE(a.alpha_samples == b.alpha_samples);
}

TEST_CASE("tournaments summarise cumulative scores", "[experiment]") {
  TournamentParams params;
  params.replications = 1;
  params.num_days = 10;
  params.rounds_per_day = 3;
  params.population.zic = 8;
  params.seed = 5;
  const TournamentResult result = run_tournament(
      {preset("CDA"), preset("CH")}, {"CDA", "CH"}, params);
  REQUIRE(result.summary.size() == 2);
  REQUIRE(result.summary[0].sd == 0.0);  // single replication
  REQUIRE(result.summary[0].n == 1);

  std::ostringstream os;
  write_tournament_csv(os, result);
  REQUIRE(os.str().rfind("market,mean_score,sd,replications\n", 0) == 0);
}

TEST_CASE("tournaments need at least two markets", "[experiment]") {
  TournamentParams params;
  REQUIRE_THROWS_AS(run_tournament({preset("CDA")}, {"CDA"}, params),
                    std::invalid_argument);
}

TEST_CASE("identical markets score within noise of each other", "[experiment]") {
  TournamentParams params;
  params.replications = 20;
  params.num_days = 100;
  params.rounds_per_day = 5;
  params.population.zic = 16;
  params.seed = 99;
  const TournamentResult result = run_tournament(
      {preset("CDA"), preset("CDA")}, {"A", "B"}, params);
  const double gap =
      std::abs(result.summary[0].mean - result.summary[1].mean) /
      static_cast<double>(params.num_days);
  REQUIRE(gap < 0.05);  // per-day combined score gap
}

TEST_CASE("zero-step searches run no games", "[experiment]") {
  SearchConfig config;
  config.steps = 0;
  default_fixed_markets(config);
  config.population.zic = 8;
  config.num_days = 2;
  config.rounds_per_day = 2;
  MechanismSearch search(config);
  const SearchArtifacts artifacts = run_search(search, std::nullopt);
  REQUIRE(artifacts.steps.empty());
  REQUIRE(search.hall_of_fame().active().empty());
  REQUIRE(search.hall_of_fame().inactive().empty());
}

TEST_CASE("search artifacts land in the output directory and resume",
          "[experiment]") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "mechlab_search_test";
  fs::remove_all(dir);

  SearchConfig config;
  config.steps = 2;
  config.samples_per_step = 2;
  config.hof_samples = 1;
  default_fixed_markets(config);
  config.num_days = 4;
  config.rounds_per_day = 2;
  config.population.zic = 8;
  config.seed = 2024;

  MechanismSearch search(config);
  run_search(search, dir);
  REQUIRE(fs::exists(dir / "steps.csv"));
  REQUIRE(fs::exists(dir / "checkpoint.json"));
  REQUIRE(fs::exists(dir / "hof.csv"));

  // extend the run from the checkpoint; the resumed search continues at step 3
  SearchConfig longer = config;
  longer.steps = 3;
  MechanismSearch resumed(longer);
  run_search(resumed, dir, /*resume=*/true);
  REQUIRE(resumed.done());
  REQUIRE(resumed.next_step() == 4);

  std::ifstream csv(dir / "steps.csv");
  std::string line;
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  REQUIRE(rows == 1 + 3);  // header + three steps total across both runs

  fs::remove_all(dir);
}
