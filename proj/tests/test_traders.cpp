#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mechlab/belief.hpp"
#include "mechlab/rng.hpp"
#include "mechlab/traders.hpp"

using namespace mechlab;

namespace {

const PriceBounds kBounds{0.0, 200.0};

}  // namespace

TEST_CASE("ZIC buyer draws uniformly below its value", "[traders]") {
  Rng rng(11);
  TraderState t;
  t.spec = {0, TraderSide::Buyer, Strategy::ZIC, 100.0};
  MarketView view{nullptr, kBounds};
  double total = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto offer = form_offer(t, view, rng);
    REQUIRE(offer.has_value());
    REQUIRE(*offer >= 0.0);
    REQUIRE(*offer <= 100.0);
    total += *offer;
  }
  REQUIRE(total / 10000.0 == Catch::Approx(50.0).margin(2.0));
}

TEST_CASE("ZIC seller never asks below value", "[traders]") {
  Rng rng(12);
  TraderState t;
  t.spec = {0, TraderSide::Seller, Strategy::ZIC, 80.0};
  MarketView view{nullptr, kBounds};
  for (int i = 0; i < 1000; ++i) {
    const auto offer = form_offer(t, view, rng);
    REQUIRE(*offer >= 80.0);
    REQUIRE(*offer <= 200.0);
  }
}

TEST_CASE("ZIP price scales value by the margin", "[traders]") {
  ZipState seller(0.25, 0.5, 0.0);
  REQUIRE(seller.price(80.0, kBounds) == 100.0);
  ZipState buyer(-0.2, 0.5, 0.0);
  REQUIRE(buyer.price(100.0, kBounds) == 80.0);
}

TEST_CASE("ZIP seller lowers its margin after an underpriced trade", "[traders]") {
  // seller at 100, trade at 90: target in [0.95*90-0.05, 1.0*90] = [85.45, 90],
  // one Widrow-Hoff step with beta=0.5, no momentum -> price in [92.725, 95].
  Rng rng(5);
  ZipState zip(0.25, 0.5, 0.0);
  zip.observe(TraderSide::Seller, 80.0, {true, Side::Ask, 90.0}, true, kBounds, rng);
  const double price = zip.price(80.0, kBounds);
  REQUIRE(zip.margin() < 0.25);
  REQUIRE(price >= 92.7);
  REQUIRE(price <= 95.0);
}

TEST_CASE("ZIP seller raises its margin after selling cheap", "[traders]") {
  // seller priced at 90 sees a trade at 110: profitable to ask more.
  Rng rng(6);
  ZipState zip(0.125, 0.5, 0.0);
  REQUIRE(zip.price(80.0, kBounds) == 90.0);
  zip.observe(TraderSide::Seller, 80.0, {true, Side::Ask, 110.0}, true, kBounds, rng);
  REQUIRE(zip.margin() > 0.125);
}

TEST_CASE("ZIP margins keep traders individually rational", "[traders]") {
  Rng rng(7);
  ZipState zip;
  zip.init(TraderSide::Buyer, rng);
  for (int i = 0; i < 500; ++i) {
    ZipEvent event;
    event.trade = rng.bernoulli(0.3);
    event.side = rng.bernoulli(0.5) ? Side::Ask : Side::Bid;
    event.price = rng.uniform(0.0, 200.0);
    zip.observe(TraderSide::Buyer, 100.0, event, rng.bernoulli(0.7), kBounds, rng);
    REQUIRE(zip.price(100.0, kBounds) <= 100.0);
  }
}

TEST_CASE("RE propensities stay non-negative and favour rewarded bins",
          "[traders]") {
  Rng rng(8);
  ReState re;
  const int bin = re.choose(rng);
  re.reward(25.0);
  for (double p : re.propensities()) REQUIRE(p >= 0.0);
  // the rewarded bin holds most of the propensity mass
  double total = 0.0;
  for (double p : re.propensities()) total += p;
  REQUIRE(re.propensities()[static_cast<std::size_t>(bin)] / total > 0.9);

  re.reset_day();
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    re.reset_day();
    if (re.choose(rng) == bin) ++hits;
  }
  REQUIRE(hits > 850);  // selection proportional to propensity
}

TEST_CASE("RE with zero rewards keeps a valid distribution", "[traders]") {
  Rng rng(9);
  ReState re;
  for (int day = 0; day < 50; ++day) {
    re.reset_day();
    re.choose(rng);
    re.reward(0.0);
  }
  for (double p : re.propensities()) REQUIRE(p >= 0.0);
  re.reset_day();
  const int bin = re.choose(rng);
  REQUIRE(bin >= 0);
  REQUIRE(bin < kReBins);
}

TEST_CASE("GD buyer maximises belief-weighted surplus", "[traders]") {
  ShoutHistory history;
  Shout taken_ask{1, 0, Side::Ask, 90.0, 0, 0, 0};
  Shout standing_bid{2, 1, Side::Bid, 89.0, 0, 0, 0};
  history.record(taken_ask);
  history.record(standing_bid);
  history.mark_taken(taken_ask.id);
  Rng rng(10);
  const auto offer = gd_offer(TraderSide::Buyer, 100.0, history, kBounds, rng);
  REQUIRE(offer.has_value());
  REQUIRE(*offer == 90.0);
}

TEST_CASE("GD falls back to a random rational offer without history", "[traders]") {
  ShoutHistory history;
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto buyer = gd_offer(TraderSide::Buyer, 100.0, history, kBounds, rng);
    REQUIRE(buyer.has_value());
    REQUIRE(*buyer <= 100.0);
    const auto seller = gd_offer(TraderSide::Seller, 80.0, history, kBounds, rng);
    REQUIRE(*seller >= 80.0);
  }
}

TEST_CASE("GD declines when no profitable offer exists", "[traders]") {
  ShoutHistory history;
  // only an untaken bid well above the seller's value range of interest
  Shout untaken{3, 2, Side::Bid, 50.0, 0, 0, 0};
  history.record(untaken);
  Rng rng(12);
  // seller value 120: candidates near 50 are all below value -> no offer
  const auto offer = gd_offer(TraderSide::Seller, 120.0, history, kBounds, rng);
  REQUIRE_FALSE(offer.has_value());
}

TEST_CASE("every strategy is individually rational", "[traders]") {
  Rng rng(44);
  ShoutHistory history;
  for (int i = 0; i < 40; ++i) {
    Shout s{static_cast<std::uint64_t>(i + 1), i,
            rng.bernoulli(0.5) ? Side::Ask : Side::Bid, rng.uniform(40.0, 160.0),
            0, 0, 0};
    history.record(s);
    if (rng.bernoulli(0.4)) history.mark_taken(s.id);
  }
  MarketView view{&history, kBounds};
  for (Strategy strategy : {Strategy::ZIC, Strategy::ZIP, Strategy::RE, Strategy::GD}) {
    for (TraderSide side : {TraderSide::Buyer, TraderSide::Seller}) {
      TraderState t;
      t.spec = {0, side, strategy, rng.uniform(50.0, 150.0)};
      t.zip.init(side, rng);
      for (int i = 0; i < 200; ++i) {
        t.re.reset_day();
        const auto offer = form_offer(t, view, rng);
        if (!offer) continue;
        if (side == TraderSide::Buyer) {
          REQUIRE(*offer <= t.spec.private_value + 1e-9);
        } else {
          REQUIRE(*offer >= t.spec.private_value - 1e-9);
        }
        REQUIRE(*offer >= kBounds.floor);
        REQUIRE(*offer <= kBounds.ceiling);
      }
    }
  }
}

TEST_CASE("shout history window slides", "[traders]") {
  ShoutHistory history(3);
  for (std::uint64_t id = 1; id <= 5; ++id) {
    history.record({id, 0, Side::Ask, 100.0 + static_cast<double>(id), 0, 0, 0});
  }
  REQUIRE(history.records().size() == 3);
  REQUIRE(history.records().front().id == 3);
  history.mark_taken(1);  // slid out: no effect
  history.mark_taken(4);
  int taken = 0;
  for (const ShoutRecord& r : history.records()) taken += r.taken;
  REQUIRE(taken == 1);
}

TEST_CASE("market selection is symmetric at equal values", "[traders]") {
  MarketSelector selector(2);
  const auto probs = selector.probabilities();
  REQUIRE(probs[0] == Catch::Approx(0.5));
  REQUIRE(probs[1] == Catch::Approx(0.5));
}

TEST_CASE("market selection matches the closed-form softmax", "[traders]") {
  MarketSelector selector(2, 1.0);
  selector.update(0, 1.0);  // Q = (1, 0)
  const auto probs = selector.probabilities();
  const double e = std::exp(1.0);
  REQUIRE(probs[0] == Catch::Approx(e / (e + 1.0)).epsilon(1e-9));
  REQUIRE(probs[1] == Catch::Approx(1.0 / (e + 1.0)).epsilon(1e-9));
}

TEST_CASE("market selection approaches greedy as T vanishes", "[traders]") {
  MarketSelector selector(2, 1e-9);
  selector.update(0, 1.0);
  const auto probs = selector.probabilities();
  REQUIRE(probs[0] == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("selector values are running means and unvisited arms stay put",
          "[traders]") {
  MarketSelector selector(2);
  selector.update(0, 10.0);
  REQUIRE(selector.values()[0] == 10.0);
  selector.update(0, 0.0);
  REQUIRE(selector.values()[0] == 5.0);
  REQUIRE(selector.values()[1] == 0.0);
}

TEST_CASE("selection probabilities form a distribution and respect argmax",
          "[traders]") {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.index(5);
    MarketSelector selector(n);
    std::size_t best = 0;
    for (std::size_t m = 0; m < n; ++m) {
      const double reward = rng.uniform(-20.0, 40.0);
      selector.update(m, reward);
      if (selector.values()[m] > selector.values()[best]) best = m;
    }
    const auto probs = selector.probabilities();
    double total = 0.0;
    for (double p : probs) total += p;
    REQUIRE(total == Catch::Approx(1.0).epsilon(1e-9));
    for (std::size_t m = 0; m < n; ++m) REQUIRE(probs[best] >= probs[m]);
  }
}

TEST_CASE("uniform softmax selection passes a chi-squared test", "[traders]") {
  MarketSelector selector(3);
  Rng rng(140);
  const int trials = 10000;
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < trials; ++i) ++counts[selector.select(rng)];
  const double expected = trials / 3.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  REQUIRE(chi2 < 5.991);  // 95th percentile, 2 degrees of freedom
}
