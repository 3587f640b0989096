#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mechlab/belief.hpp"
#include "mechlab/genome.hpp"
#include "mechlab/order_book.hpp"
#include "mechlab/policies/accepting.hpp"
#include "mechlab/policies/charging.hpp"
#include "mechlab/policies/clearing.hpp"
#include "mechlab/policies/matching.hpp"
#include "mechlab/policies/pricing.hpp"
#include "mechlab/policies/quoting.hpp"
#include "mechlab/rng.hpp"
#include "mechlab/traders.hpp"

namespace mechlab {

struct PopulationSpec {
  int zic = 0;
  int zip = 0;
  int re = 0;
  int gd = 0;
  Currency value_low = 50.0;
  Currency value_high = 150.0;
  int total() const { return zic + zip + re + gd; }
};

struct GameConfig {
  int num_days = 500;
  int rounds_per_day = 10;
  std::vector<MechanismGenome> markets;
  std::vector<std::string> market_names;  // defaults to M0, M1, ...
  PopulationSpec population;
  PriceBounds bounds;
  std::uint64_t seed = 0;
};

struct DailyScore {
  double market_share = 0.0;
  double profit_share = 0.0;
  double tsr = 0.0;
  double combined = 0.0;
};

struct Transaction {
  int day = 0;
  int round = 0;
  int market = 0;
  int buyer = 0;
  int seller = 0;
  Currency ask_price = 0.0;
  Currency bid_price = 0.0;
  Currency price = 0.0;
  Currency buyer_value = 0.0;
  Currency seller_value = 0.0;
};

struct GameResult {
  std::vector<std::string> market_names;
  std::vector<std::vector<DailyScore>> daily;   // [market][day]
  std::vector<std::vector<double>> fee_income;  // [market][day]
  std::vector<double> game_score;               // mean combined daily score
  std::vector<double> cumulative_score;         // summed combined daily score
  std::vector<Transaction> transactions;
  std::vector<TraderSpec> traders;
  double total_trader_net_profit = 0.0;
  double total_fee_income = 0.0;
  double total_realized_surplus = 0.0;

  void write_daily_csv(std::ostream& os) const {
    os << "day,market,market_share,profit_share,tsr,combined\n";
    if (daily.empty()) return;
    const std::size_t days = daily.front().size();
    for (std::size_t d = 0; d < days; ++d) {
      for (std::size_t m = 0; m < daily.size(); ++m) {
        const DailyScore& s = daily[m][d];
        os << d << ',' << market_names[m] << ',' << s.market_share << ','
           << s.profit_share << ',' << s.tsr << ',' << s.combined << '\n';
      }
    }
  }
};

// One market's engine state inside a game: the book, the policy-facing
// histories, the day's counters, and the evolving fee schedule.
class Market {
 public:
  Market(MechanismGenome genome, std::string name, PriceBounds bounds)
      : genome_(std::move(genome)),
        name_(std::move(name)),
        bounds_(bounds),
        history_(kShoutHistoryWindow) {
    retain_ = static_cast<std::size_t>(
        std::max({64, genome_.accepting.window, genome_.pricing.pairs}));
    fees_ = genome_.charging.fees;
  }

  struct Execution {
    Shout ask;
    Shout bid;
    Currency price = 0.0;
  };

  struct SubmitOutcome {
    bool accepted = false;
    std::vector<Execution> executions;
  };

  void begin_day() {
    registered_today_ = 0;
    accepted_shouts_today_ = 0;
    matched_shouts_today_ = 0;
    fee_income_today_ = 0.0;
  }

  void register_trader() { ++registered_today_; }

  SubmitOutcome submit(const Shout& s, Rng& rng) {
    if (s.price < bounds_.floor || s.price > bounds_.ceiling) return {};
    AcceptContext ctx{market_quote(),
                      {txn_prices_.data(), txn_prices_.size()},
                      {executed_pairs_.data(), executed_pairs_.size()},
                      &history_,
                      book_.standing_for(s.trader),
                      bounds_};
    if (!accept(s, ctx, genome_.accepting)) return {};
    if (!book_.insert(s)) return {};
    quote_dirty_ = true;
    ++accepted_shouts_today_;
    history_.record(s);
    SubmitOutcome outcome;
    outcome.accepted = true;
    if (should_clear(ClearingEvent::ShoutPlaced, genome_.clearing, rng)) {
      outcome.executions = clear();
    }
    return outcome;
  }

  std::vector<Execution> round_end(Rng& rng) {
    if (!should_clear(ClearingEvent::RoundEnd, genome_.clearing, rng)) return {};
    return clear();
  }

  // Final clear of the day; standing shouts do not survive into the next day.
  std::vector<Execution> day_end(Rng& rng) {
    std::vector<Execution> executions;
    if (should_clear(ClearingEvent::DayEnd, genome_.clearing, rng)) {
      executions = clear();
    }
    book_.clear();
    quote_dirty_ = true;
    return executions;
  }

  void add_fee_income(double amount) { fee_income_today_ += amount; }

  const MechanismGenome& genome() const { return genome_; }
  const std::string& name() const { return name_; }
  const FeeSchedule& fees() const { return fees_; }
  void set_fees(const FeeSchedule& fees) { fees_ = fees; }
  ChargingState& charging_state() { return charging_state_; }
  const ShoutHistory& shout_history() const { return history_; }
  const OrderBook& book() const { return book_; }

  int registered_today() const { return registered_today_; }
  int accepted_shouts_today() const { return accepted_shouts_today_; }
  int matched_shouts_today() const { return matched_shouts_today_; }
  double fee_income_today() const { return fee_income_today_; }

  const MarketQuote& market_quote() {
    if (quote_dirty_) {
      quote_ = quote(book_, genome_.quoting, genome_.matching, bounds_);
      quote_dirty_ = false;
    }
    return quote_;
  }

 private:
  std::vector<Execution> clear() {
    // Quotes are read on the pre-clear book: PU prices against the quote the
    // standing shouts produced, not the one left after extraction.
    const MarketQuote at_clear = market_quote();
    match(book_, genome_.matching);
    std::vector<Execution> executions;
    for (const MatchedPair& pair : book_.drain_matched()) {
      const Currency p = transaction_price(
          {pair.ask.price, pair.bid.price}, at_clear,
          {executed_pairs_.data(), executed_pairs_.size()}, genome_.pricing,
          static_cast<int>(book_.asks().size()),
          static_cast<int>(book_.bids().size()));
      push_capped(txn_prices_, p);
      push_capped(executed_pairs_, TradedPair{pair.ask.price, pair.bid.price});
      history_.mark_taken(pair.ask.id);
      history_.mark_taken(pair.bid.id);
      matched_shouts_today_ += 2;
      executions.push_back({pair.ask, pair.bid, p});
    }
    if (!executions.empty()) quote_dirty_ = true;
    return executions;
  }

  template <typename T>
  void push_capped(std::vector<T>& v, const T& x) {
    v.push_back(x);
    if (v.size() > retain_) v.erase(v.begin());
  }

  MechanismGenome genome_;
  std::string name_;
  PriceBounds bounds_;
  OrderBook book_;
  MarketQuote quote_;
  bool quote_dirty_ = true;
  std::vector<Currency> txn_prices_;
  std::vector<TradedPair> executed_pairs_;
  ShoutHistory history_;
  std::size_t retain_ = 64;
  FeeSchedule fees_;
  ChargingState charging_state_;

  int registered_today_ = 0;
  int accepted_shouts_today_ = 0;
  int matched_shouts_today_ = 0;
  double fee_income_today_ = 0.0;
};

// Combined daily score: equal-weight mean of market share, profit share and
// transaction success rate, each in [0, 1].
inline DailyScore daily_score(int registered, int total_traders, double fee_income,
                              double total_fee_income, int matched_shouts,
                              int accepted_shouts) {
  DailyScore s;
  s.market_share = total_traders > 0
                       ? static_cast<double>(registered) / total_traders
                       : 0.0;
  s.profit_share = total_fee_income > 0.0 ? fee_income / total_fee_income : 0.0;
  s.tsr = accepted_shouts > 0
              ? static_cast<double>(matched_shouts) / accepted_shouts
              : 0.0;
  s.combined = (s.market_share + s.profit_share + s.tsr) / 3.0;
  return s;
}

class Game {
 public:
  explicit Game(GameConfig config) : config_(std::move(config)), rng_(config_.seed) {
    validate();
    build_markets();
    build_traders();
  }

  GameResult run() {
    GameResult result;
    result.market_names.reserve(markets_.size());
    for (const Market& m : markets_) result.market_names.push_back(m.name());
    result.daily.assign(markets_.size(), {});
    result.fee_income.assign(markets_.size(), {});
    for (TraderState& t : traders_) result.traders.push_back(t.spec);

    for (int day = 0; day < config_.num_days; ++day) run_day(day, result);

    for (std::size_t m = 0; m < markets_.size(); ++m) {
      double total = 0.0;
      for (const DailyScore& s : result.daily[m]) total += s.combined;
      result.cumulative_score.push_back(total);
      result.game_score.push_back(total / config_.num_days);
    }
    return result;
  }

 private:
  void validate() const {
    if (config_.markets.empty()) {
      throw std::invalid_argument("game: at least one market required");
    }
    if (config_.num_days < 1 || config_.rounds_per_day < 1) {
      throw std::invalid_argument("game: days and rounds must be >= 1");
    }
    if (config_.population.total() < 1) {
      throw std::invalid_argument("game: empty trader population");
    }
    if (config_.population.value_low > config_.population.value_high ||
        config_.population.value_low < config_.bounds.floor ||
        config_.population.value_high > config_.bounds.ceiling) {
      throw std::invalid_argument(
          "game: private value range must sit inside the price bounds");
    }
    if (!config_.market_names.empty() &&
        config_.market_names.size() != config_.markets.size()) {
      throw std::invalid_argument("game: market_names size mismatch");
    }
    for (const MechanismGenome& g : config_.markets) g.validate();
  }

  void build_markets() {
    for (std::size_t m = 0; m < config_.markets.size(); ++m) {
      std::string name = config_.market_names.empty()
                             ? "M" + std::to_string(m)
                             : config_.market_names[m];
      markets_.emplace_back(config_.markets[m], std::move(name), config_.bounds);
    }
  }

  void build_traders() {
    const PopulationSpec& pop = config_.population;
    auto add_group = [&](Strategy strategy, int count) {
      for (int i = 0; i < count; ++i) {
        TraderState t;
        t.spec.id = static_cast<int>(traders_.size());
        t.spec.strategy = strategy;
        t.spec.side = i < (count + 1) / 2 ? TraderSide::Buyer : TraderSide::Seller;
        t.selector = MarketSelector(markets_.size());
        traders_.push_back(std::move(t));
      }
    };
    add_group(Strategy::ZIC, pop.zic);
    add_group(Strategy::ZIP, pop.zip);
    add_group(Strategy::RE, pop.re);
    add_group(Strategy::GD, pop.gd);
    for (TraderState& t : traders_) {
      t.spec.private_value = rng_.uniform(pop.value_low, pop.value_high);
      if (t.spec.strategy == Strategy::ZIP) t.zip.init(t.spec.side, rng_);
    }
    registered_.assign(traders_.size(), 0);
    ledgers_.assign(traders_.size(), {});
  }

  void run_day(int day, GameResult& result) {
    for (Market& m : markets_) m.begin_day();
    for (std::size_t t = 0; t < traders_.size(); ++t) {
      traders_[t].traded_today = false;
      traders_[t].day_profit = 0.0;
      traders_[t].re.reset_day();
      ledgers_[t] = {};
      const std::size_t m = traders_[t].selector.select(rng_);
      registered_[t] = m;
      ledgers_[t].registrations = 1;
      markets_[m].register_trader();
    }

    std::vector<std::size_t> order(traders_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int round = 0; round < config_.rounds_per_day; ++round) {
      rng_.shuffle(order);
      for (std::size_t t : order) {
        TraderState& trader = traders_[t];
        if (trader.traded_today) continue;
        Market& market = markets_[registered_[t]];
        MarketView view{&market.shout_history(), config_.bounds};
        auto offer = form_offer(trader, view, rng_);
        if (!offer) continue;
        Shout s;
        s.id = next_shout_id_++;
        s.trader = static_cast<int>(t);
        s.side = trader.spec.side == TraderSide::Buyer ? Side::Bid : Side::Ask;
        s.price = *offer;
        s.day = day;
        s.round = round;
        auto outcome = market.submit(s, rng_);
        if (!outcome.accepted) continue;
        ++ledgers_[t].shouts;
        bool shout_matched_now = false;
        for (const Market::Execution& e : outcome.executions) {
          if (e.ask.id == s.id || e.bid.id == s.id) shout_matched_now = true;
        }
        if (!shout_matched_now) {
          broadcast_shout(registered_[t], s);
        }
        apply_executions(day, round, registered_[t], outcome.executions, result);
      }
      for (std::size_t m = 0; m < markets_.size(); ++m) {
        apply_executions(day, round, m, markets_[m].round_end(rng_), result);
      }
    }

    for (std::size_t m = 0; m < markets_.size(); ++m) {
      apply_executions(day, config_.rounds_per_day - 1, m, markets_[m].day_end(rng_),
                       result);
    }

    settle_day(result);
  }

  void apply_executions(int day, int round, std::size_t market_index,
                        const std::vector<Market::Execution>& executions,
                        GameResult& result) {
    for (const Market::Execution& e : executions) {
      TraderState& buyer = traders_[static_cast<std::size_t>(e.bid.trader)];
      TraderState& seller = traders_[static_cast<std::size_t>(e.ask.trader)];
      const double buyer_gain = buyer.spec.private_value - e.price;
      const double seller_gain = e.price - seller.spec.private_value;
      buyer.day_profit += buyer_gain;
      seller.day_profit += seller_gain;
      buyer.traded_today = true;
      seller.traded_today = true;
      ++ledgers_[static_cast<std::size_t>(e.bid.trader)].transactions;
      ++ledgers_[static_cast<std::size_t>(e.ask.trader)].transactions;
      result.total_realized_surplus += buyer_gain + seller_gain;
      result.transactions.push_back({day, round, static_cast<int>(market_index),
                                     e.bid.trader, e.ask.trader, e.ask.price,
                                     e.bid.price, e.price,
                                     buyer.spec.private_value,
                                     seller.spec.private_value});
      broadcast_trade(market_index, e.price);
    }
  }

  void broadcast_trade(std::size_t market_index, Currency price) {
    ZipEvent event{true, Side::Ask, price};
    notify_zip(market_index, event);
  }

  void broadcast_shout(std::size_t market_index, const Shout& s) {
    ZipEvent event{false, s.side, s.price};
    notify_zip(market_index, event);
  }

  void notify_zip(std::size_t market_index, const ZipEvent& event) {
    for (std::size_t t = 0; t < traders_.size(); ++t) {
      TraderState& trader = traders_[t];
      if (trader.spec.strategy != Strategy::ZIP) continue;
      if (registered_[t] != market_index) continue;
      trader.zip.observe(trader.spec.side, trader.spec.private_value, event,
                         !trader.traded_today, config_.bounds, rng_);
    }
  }

  void settle_day(GameResult& result) {
    double total_income = 0.0;
    for (std::size_t t = 0; t < traders_.size(); ++t) {
      TraderState& trader = traders_[t];
      Market& market = markets_[registered_[t]];
      ledgers_[t].profit = trader.day_profit;
      const double fee = assess_fees(ledgers_[t], market.fees());
      market.add_fee_income(fee);
      const double net = trader.day_profit - fee;
      trader.selector.update(registered_[t], net);
      if (trader.spec.strategy == Strategy::RE) trader.re.reward(trader.day_profit);
      result.total_trader_net_profit += net;
    }
    for (Market& m : markets_) total_income += m.fee_income_today();
    result.total_fee_income += total_income;

    MarketObservation obs;
    obs.shares.reserve(markets_.size());
    for (std::size_t m = 0; m < markets_.size(); ++m) {
      Market& market = markets_[m];
      obs.shares.push_back(static_cast<double>(market.registered_today()) /
                           static_cast<double>(traders_.size()));
      obs.fees.push_back(market.fees());
      obs.profits.push_back(market.fee_income_today());
      result.daily[m].push_back(daily_score(
          market.registered_today(), static_cast<int>(traders_.size()),
          market.fee_income_today(), total_income, market.matched_shouts_today(),
          market.accepted_shouts_today()));
      result.fee_income[m].push_back(market.fee_income_today());
    }
    for (std::size_t m = 0; m < markets_.size(); ++m) {
      obs.self = m;
      markets_[m].set_fees(update_charges(markets_[m].genome().charging,
                                          markets_[m].charging_state(),
                                          markets_[m].fees(), obs));
    }
  }

  GameConfig config_;
  Rng rng_;
  std::vector<Market> markets_;
  std::vector<TraderState> traders_;
  std::vector<std::size_t> registered_;
  std::vector<TraderDayLedger> ledgers_;
  std::uint64_t next_shout_id_ = 1;
};

inline GameResult run_game(const GameConfig& config) { return Game(config).run(); }

}  // namespace mechlab
