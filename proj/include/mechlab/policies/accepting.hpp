#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "mechlab/belief.hpp"
#include "mechlab/genome.hpp"
#include "mechlab/order_book.hpp"
#include "mechlab/policies/quoting.hpp"

namespace mechlab {

// Market state an accepting policy may consult. Price sequences run oldest
// to newest; policies with a window look at the trailing `window` entries.
struct AcceptContext {
  MarketQuote quote;
  std::span<const Currency> transaction_prices;  // AE/AD
  std::span<const TradedPair> executed_pairs;    // AT
  const ShoutHistory* shout_history = nullptr;   // AH
  const Shout* standing = nullptr;               // AS: trader's current shout
  PriceBounds bounds;
};

namespace detail {

inline std::span<const Currency> trailing(std::span<const Currency> xs,
                                          std::size_t n) {
  if (xs.size() <= n) return xs;
  return xs.subspan(xs.size() - n);
}

inline double mean(std::span<const Currency> xs) {
  double total = 0.0;
  for (double x : xs) total += x;
  return total / static_cast<double>(xs.size());
}

inline double stddev(std::span<const Currency> xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

}  // namespace detail

// Whether the market lets the shout stand. Policies that estimate from
// history accept everything until the history exists, so day one can trade.
inline bool accept(const Shout& s, const AcceptContext& ctx,
                   const AcceptingRule& rule) {
  switch (rule.policy) {
    case AcceptingPolicy::AA:
      return true;
    case AcceptingPolicy::AN:
      return false;
    case AcceptingPolicy::AQ:
      return s.side == Side::Bid ? s.price >= ctx.quote.bid_quote
                                 : s.price <= ctx.quote.ask_quote;
    case AcceptingPolicy::AS: {
      if (ctx.standing == nullptr) return true;
      return s.side == Side::Bid ? s.price > ctx.standing->price
                                 : s.price < ctx.standing->price;
    }
    case AcceptingPolicy::AE:
    case AcceptingPolicy::AD: {
      auto window = detail::trailing(ctx.transaction_prices,
                                     static_cast<std::size_t>(rule.window));
      if (window.empty()) return true;
      const double estimate = detail::mean(window);
      const double slack = rule.policy == AcceptingPolicy::AE
                               ? rule.delta
                               : detail::stddev(window);
      return s.side == Side::Bid ? s.price >= estimate - slack
                                 : s.price <= estimate + slack;
    }
    case AcceptingPolicy::AH: {
      if (ctx.shout_history == nullptr) return true;
      return match_probability(*ctx.shout_history, s.side, s.price) >= rule.tau;
    }
    case AcceptingPolicy::AT: {
      auto window = std::span<const TradedPair>(ctx.executed_pairs);
      if (window.size() > static_cast<std::size_t>(rule.window)) {
        window = window.subspan(window.size() - static_cast<std::size_t>(rule.window));
      }
      if (window.empty()) return true;
      double lowest_bid = window.front().bid;
      double highest_ask = window.front().ask;
      for (const TradedPair& p : window) {
        lowest_bid = std::min(lowest_bid, p.bid);
        highest_ask = std::max(highest_ask, p.ask);
      }
      return s.side == Side::Bid ? s.price >= lowest_bid : s.price <= highest_ask;
    }
    case AcceptingPolicy::AY:
      switch (rule.side) {
        case SideFilter::AskOnly: return s.side == Side::Ask;
        case SideFilter::BidOnly: return s.side == Side::Bid;
        case SideFilter::Both: return true;
      }
      return true;
  }
  return true;
}

}  // namespace mechlab
