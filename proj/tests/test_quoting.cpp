#include <catch2/catch_amalgamated.hpp>

#include "mechlab/order_book.hpp"
#include "mechlab/policies/quoting.hpp"

using namespace mechlab;

namespace {

OrderBook worked_book() {
  OrderBook book;
  book.insert({1, 0, Side::Ask, 60.0, 0, 0, 0});
  book.insert({2, 1, Side::Ask, 80.0, 0, 0, 0});
  book.insert({3, 2, Side::Ask, 120.0, 0, 0, 0});
  book.insert({4, 3, Side::Bid, 130.0, 0, 0, 0});
  book.insert({5, 4, Side::Bid, 90.0, 0, 0, 0});
  book.insert({6, 5, Side::Bid, 70.0, 0, 0, 0});
  return book;
}

const PriceBounds kBounds{0.0, 200.0};

}  // namespace

TEST_CASE("two-sided quote on the worked book under ME", "[quoting]") {
  OrderBook book = worked_book();
  // matchable bids {130,90}, matchable asks {60,80}; unmatched: ask 120, bid 70
  const MarketQuote q =
      quote(book, {QuotePolicy::QT, 0.0}, {MatchingPolicy::ME, 0.0}, kBounds);
  REQUIRE(q.ask_quote == 90.0);  // min(lowest matchable bid 90, unmatched ask 120)
  REQUIRE(q.bid_quote == 80.0);  // max(highest matchable ask 80, unmatched bid 70)
}

TEST_CASE("empty book quotes the bounds", "[quoting]") {
  OrderBook book;
  const MarketQuote q =
      quote(book, {QuotePolicy::QT, 0.0}, {MatchingPolicy::ME, 0.0}, kBounds);
  REQUIRE(q.ask_quote == kBounds.ceiling);
  REQUIRE(q.bid_quote == kBounds.floor);
}

TEST_CASE("spread-based quoting resets an inverted quote", "[quoting]") {
  // Max-volume matching makes every shout in the worked book matchable, so
  // QT inverts: ask quote 70 (lowest matchable bid), bid quote 120 (highest
  // matchable ask). QS recenters both on the average 95 with a fixed spread.
  OrderBook book = worked_book();
  const MarketQuote inverted =
      quote(book, {QuotePolicy::QT, 0.0}, {MatchingPolicy::MV, 0.0}, kBounds);
  REQUIRE(inverted.ask_quote == 70.0);
  REQUIRE(inverted.bid_quote == 120.0);

  const MarketQuote q =
      quote(book, {QuotePolicy::QS, 20.0}, {MatchingPolicy::MV, 0.0}, kBounds);
  REQUIRE(q.ask_quote == 105.0);
  REQUIRE(q.bid_quote == 85.0);
}

TEST_CASE("QS arithmetic on the ask 80 / bid 90 inversion", "[quoting]") {
  // average 85 with spread 20 puts the quotes at 95 and 75
  MarketQuote q{80.0, 90.0};
  const double avg = 0.5 * (q.ask_quote + q.bid_quote);
  q.ask_quote = avg + 10.0;
  q.bid_quote = avg - 10.0;
  REQUIRE(q.ask_quote == 95.0);
  REQUIRE(q.bid_quote == 75.0);
}

TEST_CASE("one-sided quote tracks the unmatchable shouts nearest equilibrium",
          "[quoting]") {
  OrderBook book = worked_book();
  // Equilibrium midpoint 85; unmatchable ask 120, unmatchable bid 70.
  const MarketQuote q =
      quote(book, {QuotePolicy::QO, 0.0}, {MatchingPolicy::ME, 0.0}, kBounds);
  REQUIRE(q.ask_quote == 120.0);
  REQUIRE(q.bid_quote == 70.0);
}

TEST_CASE("one-sided quote defaults to bounds without unmatchable shouts",
          "[quoting]") {
  OrderBook book;
  book.insert({1, 0, Side::Ask, 80.0, 0, 0, 0});
  book.insert({2, 1, Side::Bid, 90.0, 0, 0, 0});
  const MarketQuote q =
      quote(book, {QuotePolicy::QO, 0.0}, {MatchingPolicy::ME, 0.0}, kBounds);
  REQUIRE(q.ask_quote == kBounds.ceiling);
  REQUIRE(q.bid_quote == kBounds.floor);
}
