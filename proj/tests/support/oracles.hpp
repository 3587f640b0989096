#pragma once

// Brute-force reference computations, independent of the library's matching
// and equilibrium code paths. Only usable on small books.

#include <algorithm>
#include <functional>
#include <vector>

#include "mechlab/order_book.hpp"
#include "mechlab/rng.hpp"

namespace oracles {

// Largest equal-size selection of asks and bids in which every selected bid
// clears every selected ask (a uniform price exists), found by exhaustive
// subset enumeration.
inline int equilibrium_volume(const std::vector<double>& ask_prices,
                              const std::vector<double>& bid_prices) {
  const int na = static_cast<int>(ask_prices.size());
  const int nb = static_cast<int>(bid_prices.size());
  int best = 0;
  for (int am = 0; am < (1 << na); ++am) {
    double max_ask = -1e300;
    int ac = 0;
    for (int i = 0; i < na; ++i) {
      if (am & (1 << i)) {
        ++ac;
        max_ask = std::max(max_ask, ask_prices[i]);
      }
    }
    for (int bm = 0; bm < (1 << nb); ++bm) {
      double min_bid = 1e300;
      int bc = 0;
      for (int j = 0; j < nb; ++j) {
        if (bm & (1 << j)) {
          ++bc;
          min_bid = std::min(min_bid, bid_prices[j]);
        }
      }
      if (ac == bc && ac > best && (ac == 0 || min_bid >= max_ask)) best = ac;
    }
  }
  return best;
}

// Maximum bipartite matching size with an edge wherever bid >= ask
// (Kuhn's augmenting paths).
inline int max_match_volume(const std::vector<double>& ask_prices,
                            const std::vector<double>& bid_prices) {
  const int na = static_cast<int>(ask_prices.size());
  const int nb = static_cast<int>(bid_prices.size());
  std::vector<int> matched_ask(na, -1);

  std::vector<char> visited;
  std::function<bool(int)> try_bid = [&](int b) -> bool {
    for (int a = 0; a < na; ++a) {
      if (visited[a] || bid_prices[b] < ask_prices[a]) continue;
      visited[a] = 1;
      if (matched_ask[a] == -1 || try_bid(matched_ask[a])) {
        matched_ask[a] = b;
        return true;
      }
    }
    return false;
  };

  int size = 0;
  for (int b = 0; b < nb; ++b) {
    visited.assign(na, 0);
    if (try_bid(b)) ++size;
  }
  return size;
}

struct RandomBook {
  mechlab::OrderBook book;
  std::vector<double> ask_prices;
  std::vector<double> bid_prices;
};

// Book with up to `max_side` shouts per side on an integer price grid (ties
// are likely, which exercises FIFO ordering). Trader ids are distinct so
// the replacement rule never fires.
inline RandomBook random_book(mechlab::Rng& rng, int max_side = 8) {
  RandomBook rb;
  const int na = static_cast<int>(rng.index(static_cast<std::size_t>(max_side) + 1));
  const int nb = static_cast<int>(rng.index(static_cast<std::size_t>(max_side) + 1));
  std::uint64_t id = 1;
  int trader = 0;
  for (int i = 0; i < na; ++i) {
    const double price = 40.0 + static_cast<double>(rng.index(121));
    rb.ask_prices.push_back(price);
    rb.book.insert({id++, trader++, mechlab::Side::Ask, price, 0, 0, 0});
  }
  for (int i = 0; i < nb; ++i) {
    const double price = 40.0 + static_cast<double>(rng.index(121));
    rb.bid_prices.push_back(price);
    rb.book.insert({id++, trader++, mechlab::Side::Bid, price, 0, 0, 0});
  }
  return rb;
}

}  // namespace oracles
