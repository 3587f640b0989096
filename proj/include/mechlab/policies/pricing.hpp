#pragma once

#include <algorithm>
#include <span>

#include "mechlab/genome.hpp"
#include "mechlab/order_book.hpp"
#include "mechlab/policies/quoting.hpp"

namespace mechlab {

// Transaction price for a matched ask-bid pair. `history` holds executed
// pairs oldest to newest (PN). `standing_asks`/`standing_bids` are the
// book's standing counts at pricing time (PB). The result always lies in
// [pair.ask, pair.bid].
inline Currency transaction_price(const TradedPair& pair, const MarketQuote& quote,
                                  std::span<const TradedPair> history,
                                  const PricingRule& rule, int standing_asks,
                                  int standing_bids) {
  const Currency lo = pair.ask;
  const Currency hi = pair.bid;
  auto clamp = [&](Currency p) { return std::min(std::max(p, lo), hi); };

  switch (rule.policy) {
    case PricingPolicy::PD:
      return lo + rule.k * (hi - lo);
    case PricingPolicy::PU: {
      // Interpolate between the quotes; MV/QS can invert them, so order first.
      const Currency qlo = std::min(quote.bid_quote, quote.ask_quote);
      const Currency qhi = std::max(quote.bid_quote, quote.ask_quote);
      return clamp(qlo + rule.k * (qhi - qlo));
    }
    case PricingPolicy::PN: {
      auto recent = history;
      if (recent.size() > static_cast<std::size_t>(rule.pairs)) {
        recent = recent.subspan(recent.size() - static_cast<std::size_t>(rule.pairs));
      }
      if (recent.empty()) return 0.5 * (lo + hi);
      double total = 0.0;
      for (const TradedPair& p : recent) total += p.ask + p.bid;
      return clamp(total / (2.0 * static_cast<double>(recent.size())));
    }
    case PricingPolicy::PB: {
      const int total = standing_asks + standing_bids;
      const double k = total == 0 ? 0.5
                                  : static_cast<double>(standing_bids) /
                                        static_cast<double>(total);
      return lo + k * (hi - lo);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace mechlab
