#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>
#include <vector>

#include "mechlab/genome.hpp"
#include "mechlab/order_book.hpp"
#include "mechlab/policies/matching.hpp"

namespace mechlab {

struct MarketQuote {
  Currency ask_quote = 0.0;  // upper bound for incoming asks
  Currency bid_quote = 0.0;  // lower bound for incoming bids
};

// Ask and bid quotes from the standing book, given the matching policy in
// force. QT combines both sides of the tentative match; QO looks only at the
// unmatchable shouts nearest the reported equilibrium price; QS widens an
// inverted QT quote to a fixed spread around the average.
inline MarketQuote quote(const OrderBook& book, const QuoteRule& rule,
                         const MatchingRule& matching, const PriceBounds& bounds) {
  const std::vector<MatchedPair> tentative = tentative_match(book, matching);
  std::unordered_set<std::uint64_t> matched_ids;
  for (const MatchedPair& p : tentative) {
    matched_ids.insert(p.ask.id);
    matched_ids.insert(p.bid.id);
  }

  const double none = std::numeric_limits<double>::quiet_NaN();
  double lowest_matchable_bid = none, highest_matchable_ask = none;
  double lowest_unmatchable_ask = none, highest_unmatchable_bid = none;
  for (const Shout& s : book.asks()) {
    if (matched_ids.count(s.id)) {
      if (std::isnan(highest_matchable_ask) || s.price > highest_matchable_ask) {
        highest_matchable_ask = s.price;
      }
    } else if (std::isnan(lowest_unmatchable_ask) || s.price < lowest_unmatchable_ask) {
      lowest_unmatchable_ask = s.price;
    }
  }
  for (const Shout& s : book.bids()) {
    if (matched_ids.count(s.id)) {
      if (std::isnan(lowest_matchable_bid) || s.price < lowest_matchable_bid) {
        lowest_matchable_bid = s.price;
      }
    } else if (std::isnan(highest_unmatchable_bid) || s.price > highest_unmatchable_bid) {
      highest_unmatchable_bid = s.price;
    }
  }

  auto min_defined = [](double a, double b, double fallback) {
    if (std::isnan(a) && std::isnan(b)) return fallback;
    if (std::isnan(a)) return b;
    if (std::isnan(b)) return a;
    return std::min(a, b);
  };
  auto max_defined = [](double a, double b, double fallback) {
    if (std::isnan(a) && std::isnan(b)) return fallback;
    if (std::isnan(a)) return b;
    if (std::isnan(b)) return a;
    return std::max(a, b);
  };

  MarketQuote q;
  switch (rule.policy) {
    case QuotePolicy::QT:
    case QuotePolicy::QS:
      q.ask_quote = min_defined(lowest_matchable_bid, lowest_unmatchable_ask,
                                bounds.ceiling);
      q.bid_quote = max_defined(highest_matchable_ask, highest_unmatchable_bid,
                                bounds.floor);
      break;
    case QuotePolicy::QO: {
      const Currency eq = book.reported_equilibrium(bounds).midpoint;
      // Nearest unmatchable shout to the equilibrium price, FIFO on distance ties.
      auto nearest = [&](const std::vector<Shout>& side, double fallback) {
        const Shout* best = nullptr;
        for (const Shout& s : side) {
          if (matched_ids.count(s.id)) continue;
          if (best == nullptr ||
              std::abs(s.price - eq) < std::abs(best->price - eq) ||
              (std::abs(s.price - eq) == std::abs(best->price - eq) &&
               s.arrival < best->arrival)) {
            best = &s;
          }
        }
        return best ? best->price : fallback;
      };
      q.ask_quote = nearest(book.asks(), bounds.ceiling);
      q.bid_quote = nearest(book.bids(), bounds.floor);
      break;
    }
  }

  if (rule.policy == QuotePolicy::QS && q.ask_quote < q.bid_quote) {
    const double avg = 0.5 * (q.ask_quote + q.bid_quote);
    q.ask_quote = std::min(avg + 0.5 * rule.spread, bounds.ceiling);
    q.bid_quote = std::max(avg - 0.5 * rule.spread, bounds.floor);
  }
  return q;
}

}  // namespace mechlab
