#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "mechlab/metrics.hpp"
#include "mechlab/rng.hpp"
#include "support/oracles.hpp"

using namespace mechlab;

TEST_CASE("theoretical equilibrium of the worked schedule", "[metrics]") {
  const Equilibrium eq =
      theoretical_equilibrium({{130.0, 90.0}, {60.0, 80.0}});
  REQUIRE(eq.quantity == 2);
  REQUIRE(eq.max_surplus == 80.0);
  REQUIRE(eq.price == 85.0);
}

TEST_CASE("no crossing means no trade", "[metrics]") {
  const Equilibrium eq = theoretical_equilibrium({{50.0}, {100.0}});
  REQUIRE(eq.quantity == 0);
  REQUIRE(eq.max_surplus == 0.0);
}

TEST_CASE("degenerate equal values", "[metrics]") {
  const Equilibrium eq = theoretical_equilibrium({{100.0}, {100.0}});
  REQUIRE(eq.quantity == 1);
  REQUIRE(eq.max_surplus == 0.0);
  REQUIRE(eq.price == 100.0);
}

TEST_CASE("empty schedule sides are rejected", "[metrics]") {
  REQUIRE_THROWS_AS(theoretical_equilibrium({{}, {100.0}}),
                    std::invalid_argument);
}

TEST_CASE("equilibrium quantity matches the exhaustive oracle", "[metrics]") {
  Rng rng(2025);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> buyers, sellers;
    const std::size_t nb = 1 + rng.index(8);
    const std::size_t ns = 1 + rng.index(8);
    for (std::size_t i = 0; i < nb; ++i) buyers.push_back(rng.uniform(50.0, 150.0));
    for (std::size_t i = 0; i < ns; ++i) sellers.push_back(rng.uniform(50.0, 150.0));
    const Equilibrium eq = theoretical_equilibrium({buyers, sellers});
    REQUIRE(eq.quantity == oracles::equilibrium_volume(sellers, buyers));
  }
}

TEST_CASE("allocative efficiency is a surplus ratio", "[metrics]") {
  // schedule buyers {130,90}, sellers {60,80}: max surplus 80
  REQUIRE(*allocative_efficiency(80.0, 80.0) == Catch::Approx(100.0));
  // only the (130,60) pair trades: 70/80
  REQUIRE(*allocative_efficiency(70.0, 80.0) == Catch::Approx(87.5));
  // adding the extra (90,80) trade recovers all the surplus
  REQUIRE(*allocative_efficiency(70.0 + 10.0, 80.0) == Catch::Approx(100.0));
}

TEST_CASE("efficiency conventions at zero maximum surplus", "[metrics]") {
  REQUIRE(*allocative_efficiency(0.0, 0.0) == 100.0);
  REQUIRE_FALSE(allocative_efficiency(5.0, 0.0).has_value());
}

TEST_CASE("efficiency ignores prices given the matched set", "[metrics]") {
  // realized surplus is buyer value - seller value, whatever the price
  const double surplus = (130.0 - 60.0) + (90.0 - 80.0);
  REQUIRE(*allocative_efficiency(surplus, 80.0) == Catch::Approx(100.0));
}

TEST_CASE("smith alpha on the spec examples", "[metrics]") {
  const std::vector<Currency> perfect{100.0, 100.0};
  REQUIRE(*smith_alpha(perfect, 100.0) == 0.0);

  const std::vector<Currency> spread{105.0, 95.0, 100.0};
  REQUIRE(*smith_alpha(spread, 100.0) ==
          Catch::Approx(std::sqrt(50.0 / 3.0)).epsilon(1e-9));
}

TEST_CASE("smith alpha is scale invariant", "[metrics]") {
  const std::vector<Currency> prices{105.0, 95.0, 100.0};
  std::vector<Currency> doubled;
  for (Currency p : prices) doubled.push_back(2.0 * p);
  REQUIRE(*smith_alpha(prices, 100.0) ==
          Catch::Approx(*smith_alpha(doubled, 200.0)).epsilon(1e-12));
}

TEST_CASE("smith alpha is undefined without transactions", "[metrics]") {
  REQUIRE_FALSE(smith_alpha({}, 100.0).has_value());
}

TEST_CASE("smith alpha is zero only at perfect convergence", "[metrics]") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Currency> prices;
    const std::size_t n = 1 + rng.index(10);
    bool all_equal = true;
    for (std::size_t i = 0; i < n; ++i) {
      prices.push_back(90.0 + rng.index(21));
      if (prices.back() != 100.0) all_equal = false;
    }
    const double alpha = *smith_alpha(prices, 100.0);
    REQUIRE(alpha >= 0.0);
    REQUIRE((alpha == 0.0) == all_equal);
  }
}
