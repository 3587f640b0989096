#pragma once

#include <cstdint>
#include <deque>

#include "mechlab/order_book.hpp"

namespace mechlab {

struct ShoutRecord {
  std::uint64_t id = 0;
  Side side = Side::Ask;
  Currency price = 0.0;
  bool taken = false;  // flips when the shout transacts
};

// Shouts remembered for belief estimates, both by markets (AH) and traders (GD).
inline constexpr std::size_t kShoutHistoryWindow = 40;

// Sliding window over the most recent accepted shouts in one market.
class ShoutHistory {
 public:
  explicit ShoutHistory(std::size_t window = kShoutHistoryWindow)
      : window_(window) {}

  void record(const Shout& s) {
    records_.push_back({s.id, s.side, s.price, false});
    while (records_.size() > window_) records_.pop_front();
  }

  void mark_taken(std::uint64_t id) {
    for (ShoutRecord& r : records_) {
      if (r.id == id) {
        r.taken = true;
        return;
      }
    }
  }

  const std::deque<ShoutRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  std::size_t window() const { return window_; }

 private:
  std::size_t window_;
  std::deque<ShoutRecord> records_;
};

// Probability that an offer at `price` transacts, estimated from the shout
// window the way the GD trading strategy does (step belief, no interpolation).
// For an ask a:  (taken asks >= a + bids >= a) /
//                (taken asks >= a + bids >= a + untaken asks <= a)
// For a bid b:   (taken bids <= b + asks <= b) /
//                (taken bids <= b + asks <= b + untaken bids >= b)
// An empty denominator reads as certainty so that day-one markets bootstrap.
inline double match_probability(const ShoutHistory& history, Side side,
                                Currency price) {
  int favorable = 0;
  int unfavorable = 0;
  for (const ShoutRecord& r : history.records()) {
    if (side == Side::Ask) {
      if (r.side == Side::Ask && r.taken && r.price >= price) ++favorable;
      if (r.side == Side::Bid && r.price >= price) ++favorable;
      if (r.side == Side::Ask && !r.taken && r.price <= price) ++unfavorable;
    } else {
      if (r.side == Side::Bid && r.taken && r.price <= price) ++favorable;
      if (r.side == Side::Ask && r.price <= price) ++favorable;
      if (r.side == Side::Bid && !r.taken && r.price >= price) ++unfavorable;
    }
  }
  const int total = favorable + unfavorable;
  if (total == 0) return 1.0;
  return static_cast<double>(favorable) / static_cast<double>(total);
}

}  // namespace mechlab
