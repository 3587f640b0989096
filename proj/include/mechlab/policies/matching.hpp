#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "mechlab/genome.hpp"
#include "mechlab/order_book.hpp"

namespace mechlab {

namespace detail {

// Count of pairs under equilibrium matching: largest q whose q-th highest
// bid meets the q-th lowest ask.
inline std::size_t equilibrium_volume(const std::vector<Shout>& asks,
                                      const std::vector<Shout>& bids) {
  const std::size_t limit = std::min(asks.size(), bids.size());
  std::size_t q = 0;
  while (q < limit && bids[q].price >= asks[q].price) ++q;
  return q;
}

// Largest k for which the k lowest asks can all be paired with the k highest
// bids (ascending against ascending), every pair with bid >= ask. Pairing a
// high bid with a low extra-marginal ask is allowed, which is what lets this
// exceed the equilibrium volume.
inline std::size_t max_volume(const std::vector<Shout>& asks,
                              const std::vector<Shout>& bids) {
  const std::size_t limit = std::min(asks.size(), bids.size());
  for (std::size_t k = limit; k > 0; --k) {
    bool ok = true;
    for (std::size_t i = 0; i < k; ++i) {
      // i-th lowest of the k highest bids is bids[k - 1 - i]
      if (bids[k - 1 - i].price < asks[i].price) {
        ok = false;
        break;
      }
    }
    if (ok) return k;
  }
  return 0;
}

// Equilibrium pairing: i-th lowest ask with i-th highest bid, most
// competitive pairs first.
inline std::vector<MatchedPair> equilibrium_pairs(const std::vector<Shout>& asks,
                                                  const std::vector<Shout>& bids,
                                                  std::size_t count) {
  std::vector<MatchedPair> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) pairs.push_back({asks[i], bids[i]});
  return pairs;
}

// Volume-maximising pairing over the k lowest asks and k highest bids:
// ascending asks against ascending bids, listed highest ask first.
inline std::vector<MatchedPair> volume_pairs(const std::vector<Shout>& asks,
                                             const std::vector<Shout>& bids,
                                             std::size_t k) {
  std::vector<MatchedPair> pairs;
  pairs.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t ai = k - 1 - i;
    pairs.push_back({asks[ai], bids[i]});
  }
  return pairs;
}

}  // namespace detail

// Pairs the matching policy would form on the current standing sets, without
// touching the book. ME yields the equilibrium volume, MV the maximum
// feasible volume, MT a volume interpolated through (-1, 0), (0, ME), (1, MV).
inline std::vector<MatchedPair> tentative_match(const OrderBook& book,
                                                const MatchingRule& rule) {
  const std::vector<Shout>& asks = book.asks();
  const std::vector<Shout>& bids = book.bids();
  const std::size_t v_me = detail::equilibrium_volume(asks, bids);
  switch (rule.policy) {
    case MatchingPolicy::ME:
      return detail::equilibrium_pairs(asks, bids, v_me);
    case MatchingPolicy::MV:
      return detail::volume_pairs(asks, bids, detail::max_volume(asks, bids));
    case MatchingPolicy::MT: {
      // Target volume interpolates through (-1, 0), (0, ME), (1, MV).
      // Negative theta truncates the equilibrium pairing, keeping the most
      // competitive pairs; positive theta extends in max-volume pairing
      // order, so MT(1) is MV pair-for-pair even when the volumes coincide.
      const std::size_t v_mv = detail::max_volume(asks, bids);
      double target;
      if (rule.theta >= 0.0) {
        target = static_cast<double>(v_me) +
                 rule.theta * (static_cast<double>(v_mv) - static_cast<double>(v_me));
      } else {
        target = (1.0 + rule.theta) * static_cast<double>(v_me);
      }
      auto t = static_cast<std::size_t>(
          std::min<long>(std::lround(target), static_cast<long>(v_mv)));
      if (rule.theta > 0.0) return detail::volume_pairs(asks, bids, t);
      return detail::equilibrium_pairs(asks, bids, t);
    }
  }
  return {};
}

// Matches and moves the paired shouts out of the standing sets into the
// book's matched set, pending execution.
inline std::vector<MatchedPair> match(OrderBook& book, const MatchingRule& rule) {
  std::vector<MatchedPair> pairs = tentative_match(book, rule);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ids;
  ids.reserve(pairs.size());
  for (const MatchedPair& p : pairs) ids.emplace_back(p.ask.id, p.bid.id);
  book.commit_match(ids);
  return pairs;
}

}  // namespace mechlab
