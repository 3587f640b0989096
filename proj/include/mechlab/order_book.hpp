#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <utility>
#include <vector>

namespace mechlab {

using Currency = double;

enum class Side { Ask, Bid };

struct PriceBounds {
  Currency floor = 0.0;
  Currency ceiling = 200.0;
  Currency midpoint() const { return 0.5 * (floor + ceiling); }
};

// A priced single-unit offer standing in one market.
struct Shout {
  std::uint64_t id = 0;
  int trader = -1;
  Side side = Side::Ask;
  Currency price = 0.0;
  int day = 0;
  int round = 0;
  std::uint64_t arrival = 0;  // assigned by the book; breaks price ties FIFO
};

struct MatchedPair {
  Shout ask;
  Shout bid;
};

// Prices of an executed ask-bid pair, kept for pricing/accepting history.
struct TradedPair {
  Currency ask = 0.0;
  Currency bid = 0.0;
};

struct EquilibriumReport {
  int quantity = 0;
  Currency price_low = 0.0;
  Currency price_high = 0.0;
  Currency midpoint = 0.0;
};

// Standing asks sorted ascending and bids descending by price, FIFO on ties,
// plus matched pairs pending execution. One standing shout per trader;
// resubmission replaces.
class OrderBook {
 public:
  bool insert(Shout s) {
    if (ids_.count(s.id)) return false;
    remove_trader_standing(s.trader);
    s.arrival = next_arrival_++;
    if (s.side == Side::Ask) {
      auto pos = std::upper_bound(asks_.begin(), asks_.end(), s, ask_before);
      asks_.insert(pos, s);
    } else {
      auto pos = std::upper_bound(bids_.begin(), bids_.end(), s, bid_before);
      bids_.insert(pos, s);
    }
    ids_.insert(s.id);
    return true;
  }

  const std::vector<Shout>& asks() const { return asks_; }
  const std::vector<Shout>& bids() const { return bids_; }
  const std::vector<MatchedPair>& matched() const { return matched_; }

  const Shout* standing_for(int trader) const {
    for (const Shout& s : asks_) {
      if (s.trader == trader) return &s;
    }
    for (const Shout& s : bids_) {
      if (s.trader == trader) return &s;
    }
    return nullptr;
  }

  // Moves the given shouts from the standing sets into the matched set.
  void commit_match(const std::vector<std::pair<std::uint64_t, std::uint64_t>>&
                        ask_bid_ids) {
    for (auto [ask_id, bid_id] : ask_bid_ids) {
      auto ask = take_standing(asks_, ask_id);
      auto bid = take_standing(bids_, bid_id);
      if (ask && bid) matched_.push_back({*ask, *bid});
    }
  }

  std::vector<MatchedPair> drain_matched() {
    std::vector<MatchedPair> out = std::move(matched_);
    matched_.clear();
    for (const MatchedPair& p : out) {
      ids_.erase(p.ask.id);
      ids_.erase(p.bid.id);
    }
    return out;
  }

  void clear() {
    asks_.clear();
    bids_.clear();
    matched_.clear();
    ids_.clear();
  }

  // Largest q whose q-th highest bid meets the q-th lowest ask, and the
  // corresponding market-clearing price interval. Books with no crossing
  // report the full [floor, ceiling] interval.
  EquilibriumReport reported_equilibrium(const PriceBounds& bounds) const {
    const std::size_t limit = std::min(asks_.size(), bids_.size());
    std::size_t q = 0;
    while (q < limit && bids_[q].price >= asks_[q].price) ++q;
    if (q == 0) {
      return {0, bounds.floor, bounds.ceiling, bounds.midpoint()};
    }
    Currency low = asks_[q - 1].price;
    if (q < bids_.size()) low = std::max(low, bids_[q].price);
    Currency high = bids_[q - 1].price;
    if (q < asks_.size()) high = std::min(high, asks_[q].price);
    low = std::max(low, bounds.floor);
    high = std::min(high, bounds.ceiling);
    return {static_cast<int>(q), low, high, 0.5 * (low + high)};
  }

 private:
  static bool ask_before(const Shout& a, const Shout& b) {
    if (a.price != b.price) return a.price < b.price;
    return a.arrival < b.arrival;
  }

  static bool bid_before(const Shout& a, const Shout& b) {
    if (a.price != b.price) return a.price > b.price;
    return a.arrival < b.arrival;
  }

  void remove_trader_standing(int trader) {
    auto drop = [&](std::vector<Shout>& v) {
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (it->trader == trader) {
          ids_.erase(it->id);
          v.erase(it);
          return;
        }
      }
    };
    drop(asks_);
    drop(bids_);
  }

  std::optional<Shout> take_standing(std::vector<Shout>& v, std::uint64_t id) {
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (it->id == id) {
        Shout s = *it;
        v.erase(it);
        return s;
      }
    }
    return std::nullopt;
  }

  std::vector<Shout> asks_;
  std::vector<Shout> bids_;
  std::vector<MatchedPair> matched_;
  std::unordered_set<std::uint64_t> ids_;
  std::uint64_t next_arrival_ = 0;
};

}  // namespace mechlab
