#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace mechlab {

// Seeded random source. All draws go through explicit helpers so that replay
// under a fixed seed does not depend on libstdc++ distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform index in [0, n); n must be positive.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(engine_() % n);
  }

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

  // Draw an index with probability proportional to weights[i]. Non-positive
  // total weight falls back to a uniform pick.
  std::size_t weighted_pick(const std::vector<double>& weights) {
    if (weights.empty()) return 0;
    double total = 0.0;
    for (double w : weights) total += std::max(w, 0.0);
    if (!(total > 0.0)) return index(weights.size());
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += std::max(weights[i], 0.0);
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

  // mt19937_64 streams its full state; used by search checkpoints.
  std::string save_state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }

  void restore_state(const std::string& state) {
    std::istringstream is(state);
    is >> engine_;
  }

 private:
  std::mt19937_64 engine_;
};

// Boltzmann weights exp(q_i / t), shifted by the max score for stability.
inline std::vector<double> softmax_weights(const std::vector<double>& scores,
                                           double temperature) {
  std::vector<double> w(scores.size(), 1.0);
  if (scores.empty()) return w;
  double t = std::max(temperature, 1e-12);
  double top = *std::max_element(scores.begin(), scores.end());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    w[i] = std::exp((scores[i] - top) / t);
  }
  return w;
}

inline std::vector<double> softmax_probabilities(
    const std::vector<double>& scores, double temperature) {
  std::vector<double> w = softmax_weights(scores, temperature);
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

inline std::size_t softmax_pick(const std::vector<double>& scores,
                                double temperature, Rng& rng) {
  return rng.weighted_pick(softmax_weights(scores, temperature));
}

}  // namespace mechlab
