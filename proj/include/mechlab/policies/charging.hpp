#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mechlab/genome.hpp"

namespace mechlab {

// One trader's chargeable activity in one market over one day.
struct TraderDayLedger {
  int registrations = 0;
  int info_requests = 0;
  int shouts = 0;
  int transactions = 0;
  double profit = 0.0;  // gross trading profit; only gains are charged
};

inline double assess_fees(const TraderDayLedger& ledger, const FeeSchedule& fees) {
  return fees.registration * ledger.registrations +
         fees.information * ledger.info_requests + fees.shout * ledger.shouts +
         fees.transaction * ledger.transactions +
         fees.profit_fraction * std::max(ledger.profit, 0.0);
}

// End-of-day public reports every charging policy may read.
struct MarketObservation {
  std::vector<double> shares;        // per-market share of registered traders
  std::vector<FeeSchedule> fees;     // per-market schedule charged today
  std::vector<double> profits;       // per-market fee income today
  std::size_t self = 0;
};

struct ChargingState {
  bool raising = false;  // GB mode; starts cutting until target share reached
};

namespace detail {

template <typename F>
inline FeeSchedule map_fees(const FeeSchedule& fees, F f) {
  FeeSchedule out = fees;
  out.registration = f(fees.registration);
  out.information = f(fees.information);
  out.shout = f(fees.shout);
  out.transaction = f(fees.transaction);
  out.profit_fraction = std::clamp(f(fees.profit_fraction), 0.0, 1.0);
  return out;
}

}  // namespace detail

// GB constants: cut until the market holds 30% of the traders, then raise
// slowly; re-cut when share drops under 20%. Step is 5% of the current fee.
inline constexpr double kGbTargetShare = 0.3;
inline constexpr double kGbRecutShare = 0.2;
inline constexpr double kGbStep = 0.05;

// Next day's fee schedule from today's public reports.
inline FeeSchedule update_charges(const ChargingRule& rule, ChargingState& state,
                                  const FeeSchedule& current,
                                  const MarketObservation& obs) {
  switch (rule.policy) {
    case ChargingPolicy::GF:
      return current;
    case ChargingPolicy::GB: {
      const double share = obs.shares[obs.self];
      if (!state.raising && share >= kGbTargetShare) state.raising = true;
      if (state.raising && share < kGbRecutShare) state.raising = false;
      const double factor = state.raising ? 1.0 + kGbStep : 1.0 - kGbStep;
      return detail::map_fees(current, [&](double f) { return f * factor; });
    }
    case ChargingPolicy::GC: {
      FeeSchedule lowest;
      bool found = false;
      for (std::size_t m = 0; m < obs.fees.size(); ++m) {
        if (m == obs.self) continue;
        if (!found) {
          lowest = obs.fees[m];
          found = true;
          continue;
        }
        lowest.registration = std::min(lowest.registration, obs.fees[m].registration);
        lowest.information = std::min(lowest.information, obs.fees[m].information);
        lowest.shout = std::min(lowest.shout, obs.fees[m].shout);
        lowest.transaction = std::min(lowest.transaction, obs.fees[m].transaction);
        lowest.profit_fraction =
            std::min(lowest.profit_fraction, obs.fees[m].profit_fraction);
      }
      if (!found) return current;
      return detail::map_fees(lowest, [&](double f) { return f * rule.scale; });
    }
    case ChargingPolicy::GL: {
      // Flat share distribution means traders are still exploring: lure them
      // with charges adapted toward zero. Otherwise learn from the most
      // profitable market's charges. Widrow-Hoff step at rate r either way.
      double mean = 0.0;
      for (double s : obs.shares) mean += s;
      mean /= static_cast<double>(obs.shares.size());
      double ss = 0.0;
      for (double s : obs.shares) ss += (s - mean) * (s - mean);
      const double sd = std::sqrt(ss / static_cast<double>(obs.shares.size()));
      const bool exploring = mean <= 0.0 || (sd / mean) < rule.tau;

      FeeSchedule target;  // zero-initialised
      if (!exploring) {
        std::size_t best = 0;
        for (std::size_t m = 1; m < obs.profits.size(); ++m) {
          if (obs.profits[m] > obs.profits[best]) best = m;
        }
        target = obs.fees[best];
      }
      FeeSchedule next = current;
      auto step = [&](double f, double t) { return f + rule.rate * (t - f); };
      next.registration = step(current.registration, target.registration);
      next.information = step(current.information, target.information);
      next.shout = step(current.shout, target.shout);
      next.transaction = step(current.transaction, target.transaction);
      next.profit_fraction =
          std::clamp(step(current.profit_fraction, target.profit_fraction), 0.0, 1.0);
      return next;
    }
  }
  return current;
}

}  // namespace mechlab
