#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "mechlab/belief.hpp"
#include "mechlab/genome.hpp"
#include "mechlab/order_book.hpp"
#include "mechlab/rng.hpp"

namespace mechlab {

enum class TraderSide { Buyer, Seller };
enum class Strategy { ZIC, ZIP, RE, GD };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::ZIC: return "ZIC";
    case Strategy::ZIP: return "ZIP";
    case Strategy::RE: return "RE";
    case Strategy::GD: return "GD";
  }
  return "?";
}

struct TraderSpec {
  int id = 0;
  TraderSide side = TraderSide::Buyer;
  Strategy strategy = Strategy::ZIC;
  Currency private_value = 0.0;
};

// n-armed bandit over markets: value of a market is the running mean of the
// net daily profit earned there, selection is softmax at fixed temperature.
class MarketSelector {
 public:
  explicit MarketSelector(std::size_t num_markets, double temperature = 1.0)
      : q_(num_markets, 0.0), visits_(num_markets, 0), temperature_(temperature) {}

  std::size_t select(Rng& rng) const { return softmax_pick(q_, temperature_, rng); }

  std::vector<double> probabilities() const {
    return softmax_probabilities(q_, temperature_);
  }

  void update(std::size_t market, double net_profit) {
    ++visits_[market];
    q_[market] += (net_profit - q_[market]) / static_cast<double>(visits_[market]);
  }

  const std::vector<double>& values() const { return q_; }

 private:
  std::vector<double> q_;
  std::vector<int> visits_;
  double temperature_;
};

// ---------------------------------------------------------------------------
// ZIP: price = value * (1 + margin), margin adapted by Widrow-Hoff with
// momentum toward perturbed targets, per Cliff's rules. Sellers hold
// margin >= 0, buyers margin in [-1, 0].

struct ZipEvent {
  bool trade = false;  // true: a transaction at `price`; false: a standing shout
  Side side = Side::Ask;  // shout side (ignored for trades)
  Currency price = 0.0;
};

class ZipState {
 public:
  ZipState() = default;
  ZipState(double margin, double learn_rate, double momentum)
      : margin_(margin), learn_rate_(learn_rate), momentum_(momentum) {}

  void init(TraderSide side, Rng& rng) {
    const double m = rng.uniform(0.05, 0.35);
    margin_ = side == TraderSide::Seller ? m : -m;
    learn_rate_ = rng.uniform(0.1, 0.5);
    momentum_ = rng.uniform(0.2, 0.8);
    smoothed_ = 0.0;
  }

  Currency price(Currency value, const PriceBounds& bounds) const {
    return std::clamp(value * (1.0 + margin_), bounds.floor, bounds.ceiling);
  }

  double margin() const { return margin_; }
  void set_margin(double m) { margin_ = m; }

  void observe(TraderSide side, Currency value, const ZipEvent& event,
               bool active, const PriceBounds& bounds, Rng& rng) {
    const double p = price(value, bounds);
    const double q = event.price;
    if (side == TraderSide::Seller) {
      if (event.trade) {
        if (p <= q) {
          adjust(value, target_up(q, rng));
        } else if (active) {
          adjust(value, target_down(q, rng));
        }
      } else if (active && event.side == Side::Ask && p >= q) {
        adjust(value, target_down(q, rng));
      }
    } else {
      if (event.trade) {
        if (p >= q) {
          adjust(value, target_down(q, rng));
        } else if (active) {
          adjust(value, target_up(q, rng));
        }
      } else if (active && event.side == Side::Bid && p <= q) {
        adjust(value, target_up(q, rng));
      }
    }
    if (side == TraderSide::Seller) {
      margin_ = std::max(margin_, 0.0);
    } else {
      margin_ = std::clamp(margin_, -1.0, 0.0);
    }
  }

 private:
  // Cliff's perturbation ranges: relative U(1, 1.05) / absolute U(0, 0.05)
  // when pushing the target price up, mirrored when pushing it down.
  static double target_up(double q, Rng& rng) {
    return rng.uniform(1.0, 1.05) * q + rng.uniform(0.0, 0.05);
  }
  static double target_down(double q, Rng& rng) {
    return rng.uniform(0.95, 1.0) * q + rng.uniform(-0.05, 0.0);
  }

  void adjust(Currency value, double target) {
    if (value <= 0.0) return;
    const double p = value * (1.0 + margin_);
    const double delta = learn_rate_ * (target - p);
    smoothed_ = momentum_ * smoothed_ + (1.0 - momentum_) * delta;
    margin_ = (p + smoothed_) / value - 1.0;
  }

  double margin_ = 0.0;
  double learn_rate_ = 0.3;
  double momentum_ = 0.5;
  double smoothed_ = 0.0;
};

// ---------------------------------------------------------------------------
// RE: a margin bin is drawn with probability proportional to its propensity;
// propensities follow the three-parameter Roth-Erev rule (experimentation,
// recency, scaling) with the day's profit as reward.

inline constexpr int kReBins = 100;
inline constexpr double kReExperimentation = 0.15;
inline constexpr double kReRecency = 0.1;
inline constexpr double kReScaling = 1.0;

class ReState {
 public:
  ReState() : propensity_(kReBins, kReScaling / kReBins) {}

  int choose(Rng& rng) {
    chosen_ = static_cast<int>(rng.weighted_pick(propensity_));
    return chosen_;
  }

  bool has_choice() const { return chosen_ >= 0; }
  int chosen() const { return chosen_; }
  void reset_day() { chosen_ = -1; }

  static double margin_of(int bin) {
    return static_cast<double>(bin) / kReBins;
  }

  void reward(double profit) {
    if (chosen_ < 0) return;
    for (int j = 0; j < kReBins; ++j) {
      const double experience =
          j == chosen_ ? profit * (1.0 - kReExperimentation)
                       : propensity_[j] * (kReExperimentation / (kReBins - 1));
      propensity_[j] = (1.0 - kReRecency) * propensity_[j] + experience;
      propensity_[j] = std::max(propensity_[j], 0.0);
    }
  }

  const std::vector<double>& propensities() const { return propensity_; }

 private:
  std::vector<double> propensity_;
  int chosen_ = -1;
};

// ---------------------------------------------------------------------------
// GD: maximise belief(price) * surplus over candidate prices taken from the
// observed shout window (each observed price and its +-1 neighbours). An
// empty window falls back to a ZIC draw so fresh markets can bootstrap.

inline std::optional<Currency> gd_offer(TraderSide side, Currency value,
                                        const ShoutHistory& history,
                                        const PriceBounds& bounds, Rng& rng) {
  const Currency lo = side == TraderSide::Buyer ? bounds.floor : value;
  const Currency hi = side == TraderSide::Buyer ? value : bounds.ceiling;
  if (history.empty()) return rng.uniform(lo, hi);

  std::vector<Currency> candidates;
  candidates.reserve(history.records().size() * 3);
  for (const ShoutRecord& r : history.records()) {
    for (double offset : {-1.0, 0.0, 1.0}) {
      const Currency c = std::clamp(r.price + offset, lo, hi);
      candidates.push_back(c);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  const Side shout_side = side == TraderSide::Buyer ? Side::Bid : Side::Ask;
  double best_score = 0.0;
  std::optional<Currency> best;
  for (Currency c : candidates) {
    const double surplus = side == TraderSide::Buyer ? value - c : c - value;
    if (surplus <= 0.0) continue;
    const double score = match_probability(history, shout_side, c) * surplus;
    if (score > best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

struct TraderState {
  TraderSpec spec;
  MarketSelector selector{1};
  ZipState zip;
  ReState re;
  bool traded_today = false;
  double day_profit = 0.0;  // gross trading profit earned today
};

// The trader's view of the market it is registered with today.
struct MarketView {
  const ShoutHistory* shout_history = nullptr;
  PriceBounds bounds;
};

// Price the trader would shout this round, if any. Every strategy is
// individually rational: buyers never offer above value, sellers below.
inline std::optional<Currency> form_offer(TraderState& trader,
                                          const MarketView& view, Rng& rng) {
  const TraderSpec& spec = trader.spec;
  const PriceBounds& bounds = view.bounds;
  switch (spec.strategy) {
    case Strategy::ZIC:
      return spec.side == TraderSide::Buyer
                 ? rng.uniform(bounds.floor, spec.private_value)
                 : rng.uniform(spec.private_value, bounds.ceiling);
    case Strategy::ZIP:
      return trader.zip.price(spec.private_value, bounds);
    case Strategy::RE: {
      if (!trader.re.has_choice()) trader.re.choose(rng);
      const double m = ReState::margin_of(trader.re.chosen());
      return spec.side == TraderSide::Buyer
                 ? spec.private_value - m * (spec.private_value - bounds.floor)
                 : spec.private_value + m * (bounds.ceiling - spec.private_value);
    }
    case Strategy::GD:
      if (view.shout_history == nullptr) return std::nullopt;
      return gd_offer(spec.side, spec.private_value, *view.shout_history, bounds,
                      rng);
  }
  return std::nullopt;
}

}  // namespace mechlab
