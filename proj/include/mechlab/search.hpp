#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mechlab/game.hpp"
#include "mechlab/genome.hpp"
#include "mechlab/rng.hpp"

namespace mechlab {

// Running-mean quality score of one or-node child.
struct BlockStats {
  double quality = 0.0;
  int count = 0;
  void add(double score) {
    ++count;
    quality += (score - quality) / count;
  }
};

struct ParamDomain {
  std::string name;
  std::vector<double> values;
  std::vector<BlockStats> stats;

  ParamDomain(std::string n, std::vector<double> v)
      : name(std::move(n)), values(std::move(v)), stats(values.size()) {}
};

struct PolicyOption {
  std::string token;
  std::vector<ParamDomain> params;
  BlockStats stats;
};

struct FamilyNode {
  std::string name;
  std::vector<PolicyOption> options;
};

namespace detail {

inline std::vector<double> unit_grid() {
  return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
}

}  // namespace detail

// The searchable space of mechanisms as a tree: an and-node root over the
// matching, quoting, accepting, clearing and pricing families, an or-node
// per family over candidate policies, and an or-node per parameter over a
// discrete value grid. Charging stays fixed at a 10% profit fee. Each
// or-node child carries a quality score fed back from game results.
class PolicyTree {
 public:
  PolicyTree() {
    families_.push_back(
        {"M",
         {{"ME", {}, {}},
          {"MV", {}, {}},
          {"MT", {{"theta", {-1.0, -0.5, 0.0, 0.5, 1.0}}}, {}}}});
    families_.push_back(
        {"Q",
         {{"QT", {}, {}},
          {"QO", {}, {}},
          {"QS", {{"spread", {0.0, 5.0, 10.0, 20.0, 30.0}}}, {}}}});
    families_.push_back(
        {"A",
         {{"AA", {}, {}},
          {"AN", {}, {}},
          {"AQ", {}, {}},
          {"AS", {}, {}},
          {"AE",
           {{"w", {2.0, 4.0, 8.0, 16.0}},
            {"delta", {0.0, 5.0, 10.0, 20.0, 30.0}}},
           {}},
          {"AD", {{"w", {2.0, 4.0, 8.0, 16.0}}}, {}},
          {"AH", {{"tau", detail::unit_grid()}}, {}},
          {"AT", {{"w", {2.0, 4.0, 8.0, 16.0}}}, {}},
          {"AY", {{"side", {0.0, 1.0, 2.0}}}, {}}}});
    families_.push_back(
        {"C", {{"CC", {}, {}}, {"CR", {}, {}}, {"CP", {{"p", detail::unit_grid()}}, {}}}});
    families_.push_back(
        {"P",
         {{"PD", {{"k", detail::unit_grid()}}, {}},
          {"PU", {{"k", detail::unit_grid()}}, {}},
          {"PN", {{"n", {1.0, 3.0, 5.0, 9.0, 11.0}}}, {}},
          {"PB", {}, {}}}});
  }

  MechanismGenome sample(double temperature, Rng& rng) const {
    MechanismGenome g;
    g.charging.policy = ChargingPolicy::GF;
    g.charging.fees.profit_fraction = 0.1;
    for (const FamilyNode& family : families_) {
      std::vector<double> scores;
      scores.reserve(family.options.size());
      for (const PolicyOption& opt : family.options) scores.push_back(opt.stats.quality);
      const std::size_t choice = softmax_pick(scores, temperature, rng);
      const PolicyOption& opt = family.options[choice];
      std::vector<double> values;
      values.reserve(opt.params.size());
      for (const ParamDomain& dom : opt.params) {
        std::vector<double> pscores;
        pscores.reserve(dom.stats.size());
        for (const BlockStats& s : dom.stats) pscores.push_back(s.quality);
        values.push_back(dom.values[softmax_pick(pscores, temperature, rng)]);
      }
      apply_choice(g, family.name, opt.token, values);
    }
    return g;
  }

  // Feeds a game score back into every or-node child the genome used: the
  // policy picked in each family and each of its parameter values.
  void update(const MechanismGenome& genome, double score) {
    for (FamilyNode& family : families_) {
      auto [token, values] = describe_choice(genome, family.name);
      for (PolicyOption& opt : family.options) {
        if (opt.token != token) continue;
        opt.stats.add(score);
        for (std::size_t p = 0; p < opt.params.size() && p < values.size(); ++p) {
          ParamDomain& dom = opt.params[p];
          for (std::size_t i = 0; i < dom.values.size(); ++i) {
            if (dom.values[i] == values[p]) {
              dom.stats[i].add(score);
              break;
            }
          }
        }
        break;
      }
    }
  }

  const std::vector<FamilyNode>& families() const { return families_; }
  std::vector<FamilyNode>& families() { return families_; }

  nlohmann::json to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const FamilyNode& family : families_) {
      nlohmann::json f;
      f["name"] = family.name;
      f["options"] = nlohmann::json::array();
      for (const PolicyOption& opt : family.options) {
        nlohmann::json o;
        o["token"] = opt.token;
        o["quality"] = opt.stats.quality;
        o["count"] = opt.stats.count;
        o["params"] = nlohmann::json::array();
        for (const ParamDomain& dom : opt.params) {
          nlohmann::json d;
          d["name"] = dom.name;
          d["values"] = dom.values;
          nlohmann::json stats = nlohmann::json::array();
          for (const BlockStats& s : dom.stats) {
            stats.push_back({{"quality", s.quality}, {"count", s.count}});
          }
          d["stats"] = stats;
          o["params"].push_back(d);
        }
        f["options"].push_back(o);
      }
      out.push_back(f);
    }
    return out;
  }

  void from_json(const nlohmann::json& in) {
    if (in.size() != families_.size()) {
      throw std::runtime_error("policy tree checkpoint: family count mismatch");
    }
    for (std::size_t fi = 0; fi < families_.size(); ++fi) {
      FamilyNode& family = families_[fi];
      const nlohmann::json& f = in[fi];
      if (f["options"].size() != family.options.size()) {
        throw std::runtime_error("policy tree checkpoint: option count mismatch");
      }
      for (std::size_t oi = 0; oi < family.options.size(); ++oi) {
        PolicyOption& opt = family.options[oi];
        const nlohmann::json& o = f["options"][oi];
        if (o["token"] != opt.token) {
          throw std::runtime_error("policy tree checkpoint: option order mismatch");
        }
        opt.stats.quality = o["quality"];
        opt.stats.count = o["count"];
        for (std::size_t pi = 0; pi < opt.params.size(); ++pi) {
          const nlohmann::json& d = o["params"][pi];
          ParamDomain& dom = opt.params[pi];
          for (std::size_t vi = 0; vi < dom.stats.size(); ++vi) {
            dom.stats[vi].quality = d["stats"][vi]["quality"];
            dom.stats[vi].count = d["stats"][vi]["count"];
          }
        }
      }
    }
  }

 private:
  static void apply_choice(MechanismGenome& g, const std::string& family,
                           const std::string& token,
                           const std::vector<double>& values) {
    if (family == "M") {
      if (token == "ME") {
        g.matching.policy = MatchingPolicy::ME;
      } else if (token == "MV") {
        g.matching.policy = MatchingPolicy::MV;
      } else {
        g.matching.policy = MatchingPolicy::MT;
        g.matching.theta = values[0];
      }
    } else if (family == "Q") {
      if (token == "QT") {
        g.quoting.policy = QuotePolicy::QT;
      } else if (token == "QO") {
        g.quoting.policy = QuotePolicy::QO;
      } else {
        g.quoting.policy = QuotePolicy::QS;
        g.quoting.spread = values[0];
      }
    } else if (family == "A") {
      if (token == "AA") {
        g.accepting.policy = AcceptingPolicy::AA;
      } else if (token == "AN") {
        g.accepting.policy = AcceptingPolicy::AN;
      } else if (token == "AQ") {
        g.accepting.policy = AcceptingPolicy::AQ;
      } else if (token == "AS") {
        g.accepting.policy = AcceptingPolicy::AS;
      } else if (token == "AE") {
        g.accepting.policy = AcceptingPolicy::AE;
        g.accepting.window = static_cast<int>(values[0]);
        g.accepting.delta = values[1];
      } else if (token == "AD") {
        g.accepting.policy = AcceptingPolicy::AD;
        g.accepting.window = static_cast<int>(values[0]);
      } else if (token == "AH") {
        g.accepting.policy = AcceptingPolicy::AH;
        g.accepting.tau = values[0];
      } else if (token == "AT") {
        g.accepting.policy = AcceptingPolicy::AT;
        g.accepting.window = static_cast<int>(values[0]);
      } else {
        g.accepting.policy = AcceptingPolicy::AY;
        g.accepting.side = static_cast<SideFilter>(static_cast<int>(values[0]));
      }
    } else if (family == "C") {
      if (token == "CC") {
        g.clearing.policy = ClearingPolicy::CC;
      } else if (token == "CR") {
        g.clearing.policy = ClearingPolicy::CR;
      } else {
        g.clearing.policy = ClearingPolicy::CP;
        g.clearing.probability = values[0];
      }
    } else if (family == "P") {
      if (token == "PD") {
        g.pricing.policy = PricingPolicy::PD;
        g.pricing.k = values[0];
      } else if (token == "PU") {
        g.pricing.policy = PricingPolicy::PU;
        g.pricing.k = values[0];
      } else if (token == "PN") {
        g.pricing.policy = PricingPolicy::PN;
        g.pricing.pairs = static_cast<int>(values[0]);
      } else {
        g.pricing.policy = PricingPolicy::PB;
      }
    }
  }

  static std::pair<std::string, std::vector<double>> describe_choice(
      const MechanismGenome& g, const std::string& family) {
    if (family == "M") {
      switch (g.matching.policy) {
        case MatchingPolicy::ME: return {"ME", {}};
        case MatchingPolicy::MV: return {"MV", {}};
        case MatchingPolicy::MT: return {"MT", {g.matching.theta}};
      }
    } else if (family == "Q") {
      switch (g.quoting.policy) {
        case QuotePolicy::QT: return {"QT", {}};
        case QuotePolicy::QO: return {"QO", {}};
        case QuotePolicy::QS: return {"QS", {g.quoting.spread}};
      }
    } else if (family == "A") {
      switch (g.accepting.policy) {
        case AcceptingPolicy::AA: return {"AA", {}};
        case AcceptingPolicy::AN: return {"AN", {}};
        case AcceptingPolicy::AQ: return {"AQ", {}};
        case AcceptingPolicy::AS: return {"AS", {}};
        case AcceptingPolicy::AE:
          return {"AE", {static_cast<double>(g.accepting.window), g.accepting.delta}};
        case AcceptingPolicy::AD:
          return {"AD", {static_cast<double>(g.accepting.window)}};
        case AcceptingPolicy::AH: return {"AH", {g.accepting.tau}};
        case AcceptingPolicy::AT:
          return {"AT", {static_cast<double>(g.accepting.window)}};
        case AcceptingPolicy::AY:
          return {"AY", {static_cast<double>(static_cast<int>(g.accepting.side))}};
      }
    } else if (family == "C") {
      switch (g.clearing.policy) {
        case ClearingPolicy::CC: return {"CC", {}};
        case ClearingPolicy::CR: return {"CR", {}};
        case ClearingPolicy::CP: return {"CP", {g.clearing.probability}};
      }
    } else if (family == "P") {
      switch (g.pricing.policy) {
        case PricingPolicy::PD: return {"PD", {g.pricing.k}};
        case PricingPolicy::PU: return {"PU", {g.pricing.k}};
        case PricingPolicy::PN:
          return {"PN", {static_cast<double>(g.pricing.pairs)}};
        case PricingPolicy::PB: return {"PB", {}};
      }
    }
    return {"", {}};
  }

  std::vector<FamilyNode> families_;
};

// ---------------------------------------------------------------------------

struct HofEntry {
  MechanismGenome genome;
  std::string key;    // canonical genome string; identity for re-samples
  std::string label;  // first label the genome appeared under
  double mean = 0.0;
  int games = 0;
};

// Capacity-bounded set of the best genomes seen so far, by running mean
// score. Members pushed out stay archived as inactive and resume their
// running mean if the same genome is sampled again.
class HallOfFame {
 public:
  explicit HallOfFame(std::size_t capacity = 10) : capacity_(capacity) {}

  void record(const MechanismGenome& genome, const std::string& label,
              double score) {
    const std::string key = genome.str();
    for (HofEntry& e : active_) {
      if (e.key == key) {
        bump(e, score);
        return;
      }
    }
    for (std::size_t i = 0; i < inactive_.size(); ++i) {
      if (inactive_[i].key == key) {
        bump(inactive_[i], score);
        maybe_activate(i);
        return;
      }
    }
    HofEntry entry{genome, key, label, score, 1};
    if (active_.size() < capacity_) {
      active_.push_back(std::move(entry));
    } else if (entry.mean > min_active_mean()) {
      demote_worst();
      active_.push_back(std::move(entry));
    } else {
      inactive_.push_back(std::move(entry));
    }
  }

  // Distinct active members, drawn uniformly. Uniform selection keeps every
  // active member's running mean fresh; weighting by mean starves the bottom
  // of the table of re-evaluation and lets stale scores linger there.
  std::vector<HofEntry> sample_active(std::size_t n, Rng& rng) const {
    std::vector<std::size_t> pool(active_.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    std::vector<HofEntry> picked;
    while (picked.size() < n && !pool.empty()) {
      const std::size_t j = rng.index(pool.size());
      picked.push_back(active_[pool[j]]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
    }
    return picked;
  }

  double min_active_mean() const {
    double lowest = std::numeric_limits<double>::infinity();
    for (const HofEntry& e : active_) lowest = std::min(lowest, e.mean);
    return lowest;
  }

  const std::vector<HofEntry>& active() const { return active_; }
  const std::vector<HofEntry>& inactive() const { return inactive_; }
  std::size_t capacity() const { return capacity_; }

  nlohmann::json to_json() const {
    auto dump = [](const std::vector<HofEntry>& entries) {
      nlohmann::json out = nlohmann::json::array();
      for (const HofEntry& e : entries) {
        out.push_back({{"genome", e.key},
                       {"label", e.label},
                       {"mean", e.mean},
                       {"games", e.games}});
      }
      return out;
    };
    return {{"capacity", capacity_},
            {"active", dump(active_)},
            {"inactive", dump(inactive_)}};
  }

  void from_json(const nlohmann::json& in) {
    capacity_ = in["capacity"];
    auto load = [](const nlohmann::json& arr) {
      std::vector<HofEntry> entries;
      for (const nlohmann::json& j : arr) {
        HofEntry e;
        e.key = j["genome"];
        e.genome = MechanismGenome::parse(e.key);
        e.label = j["label"];
        e.mean = j["mean"];
        e.games = j["games"];
        entries.push_back(std::move(e));
      }
      return entries;
    };
    active_ = load(in["active"]);
    inactive_ = load(in["inactive"]);
  }

 private:
  static void bump(HofEntry& e, double score) {
    ++e.games;
    e.mean += (score - e.mean) / e.games;
  }

  void maybe_activate(std::size_t inactive_index) {
    HofEntry& e = inactive_[inactive_index];
    if (active_.size() < capacity_) {
      active_.push_back(e);
      inactive_.erase(inactive_.begin() + static_cast<std::ptrdiff_t>(inactive_index));
    } else if (e.mean > min_active_mean()) {
      HofEntry copy = e;
      inactive_.erase(inactive_.begin() + static_cast<std::ptrdiff_t>(inactive_index));
      demote_worst();
      active_.push_back(std::move(copy));
    }
  }

  void demote_worst() {
    std::size_t worst = 0;
    for (std::size_t i = 1; i < active_.size(); ++i) {
      if (active_[i].mean < active_[worst].mean) worst = i;
    }
    inactive_.push_back(active_[worst]);
    active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(worst));
  }

  std::size_t capacity_;
  std::vector<HofEntry> active_;
  std::vector<HofEntry> inactive_;
};

// ---------------------------------------------------------------------------

// Geometric cooling with a floor, so even the worst block keeps a
// non-negligible selection probability at any step.
struct AnnealSchedule {
  double initial = 1.0;
  double decay = 0.98;
  double floor = 0.1;

  double temperature(int step) const {
    return std::max(floor, initial * std::pow(decay, step));
  }
};

struct SearchConfig {
  int steps = 200;
  int samples_per_step = 2;
  std::size_t hof_capacity = 10;
  int hof_samples = 2;
  AnnealSchedule anneal;
  std::vector<MechanismGenome> fixed_markets;
  std::vector<std::string> fixed_names;
  int num_days = 500;
  int rounds_per_day = 10;
  PopulationSpec population;
  PriceBounds bounds;
  std::uint64_t seed = 0;
};

struct SampleRecord {
  std::string label;
  std::string genome;
  double score = 0.0;
};

struct StepRecord {
  int step = 0;  // 1-based
  double temperature = 0.0;
  std::vector<double> fixed_scores;
  double hof_min = 0.0;
  double hof_median = 0.0;
  double hof_max = 0.0;
  std::vector<SampleRecord> samples;
};

// One search step: sample mechanisms from the tree, pull a few Hall of Fame
// members back in, run a single game against the fixed markets, then feed
// every non-fixed participant's score into its Hall of Fame entry and into
// each building block it used.
class MechanismSearch {
 public:
  explicit MechanismSearch(SearchConfig config)
      : config_(std::move(config)),
        hof_(config_.hof_capacity),
        rng_(config_.seed) {
    if (config_.fixed_names.size() != config_.fixed_markets.size()) {
      throw std::invalid_argument("search: fixed market names mismatch");
    }
    for (const MechanismGenome& g : config_.fixed_markets) g.validate();
  }

  bool done() const { return next_step_ > config_.steps; }
  int next_step() const { return next_step_; }

  StepRecord run_step() {
    const int step = next_step_;
    const double temperature = config_.anneal.temperature(step - 1);

    std::vector<MechanismGenome> sampled;
    std::vector<std::string> sample_labels;
    for (int i = 0; i < config_.samples_per_step; ++i) {
      sampled.push_back(tree_.sample(temperature, rng_));
      sample_labels.push_back("SM" + std::to_string(step) + "." + std::to_string(i));
    }
    const std::vector<HofEntry> elites = hof_.sample_active(
        static_cast<std::size_t>(std::max(config_.hof_samples, 0)), rng_);

    GameConfig game;
    game.num_days = config_.num_days;
    game.rounds_per_day = config_.rounds_per_day;
    game.population = config_.population;
    game.bounds = config_.bounds;
    game.seed = rng_.next_u64();
    game.markets = config_.fixed_markets;
    game.market_names = config_.fixed_names;
    for (const HofEntry& e : elites) {
      game.markets.push_back(e.genome);
      game.market_names.push_back(e.label);
    }
    for (std::size_t i = 0; i < sampled.size(); ++i) {
      game.markets.push_back(sampled[i]);
      game.market_names.push_back(sample_labels[i]);
    }

    const GameResult result = run_game(game);

    const std::size_t fixed_count = config_.fixed_markets.size();
    StepRecord record;
    record.step = step;
    record.temperature = temperature;
    for (std::size_t m = 0; m < fixed_count; ++m) {
      record.fixed_scores.push_back(result.game_score[m]);
    }
    for (std::size_t i = 0; i < elites.size(); ++i) {
      const std::size_t m = fixed_count + i;
      hof_.record(elites[i].genome, elites[i].label, result.game_score[m]);
      tree_.update(elites[i].genome, result.game_score[m]);
    }
    for (std::size_t i = 0; i < sampled.size(); ++i) {
      const std::size_t m = fixed_count + elites.size() + i;
      hof_.record(sampled[i], sample_labels[i], result.game_score[m]);
      tree_.update(sampled[i], result.game_score[m]);
      record.samples.push_back(
          {sample_labels[i], sampled[i].str(), result.game_score[m]});
    }

    std::vector<double> means;
    for (const HofEntry& e : hof_.active()) means.push_back(e.mean);
    if (!means.empty()) {
      std::sort(means.begin(), means.end());
      record.hof_min = means.front();
      record.hof_max = means.back();
      const std::size_t mid = means.size() / 2;
      record.hof_median = means.size() % 2 == 1
                              ? means[mid]
                              : 0.5 * (means[mid - 1] + means[mid]);
    }

    ++next_step_;
    return record;
  }

  const HallOfFame& hall_of_fame() const { return hof_; }
  const PolicyTree& tree() const { return tree_; }
  const SearchConfig& config() const { return config_; }

  nlohmann::json checkpoint() const {
    return {{"next_step", next_step_},
            {"rng_state", rng_.save_state()},
            {"tree", tree_.to_json()},
            {"hof", hof_.to_json()}};
  }

  void restore(const nlohmann::json& in) {
    next_step_ = in["next_step"];
    rng_.restore_state(in["rng_state"]);
    tree_.from_json(in["tree"]);
    hof_.from_json(in["hof"]);
  }

 private:
  SearchConfig config_;
  PolicyTree tree_;
  HallOfFame hof_;
  Rng rng_;
  int next_step_ = 1;
};

}  // namespace mechlab
