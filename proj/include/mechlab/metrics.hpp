#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mechlab/order_book.hpp"

namespace mechlab {

// Traders' private values, one entry per single-unit trader and side.
struct UnderlyingSchedule {
  std::vector<Currency> buyer_values;
  std::vector<Currency> seller_values;
};

struct Equilibrium {
  Currency price = 0.0;   // midpoint of the equilibrium price interval
  int quantity = 0;
  Currency max_surplus = 0.0;
};

struct EconReport {
  double ea = 0.0;     // allocative efficiency, percent
  double alpha = 0.0;  // coefficient of convergence, percent
  Currency p0 = 0.0;
  int q0 = 0;
};

// Intersect the underlying demand and supply: the largest q whose q-th
// highest buyer value meets the q-th lowest seller value, the corresponding
// price interval midpoint, and the maximum extractable surplus.
inline Equilibrium theoretical_equilibrium(const UnderlyingSchedule& schedule) {
  if (schedule.buyer_values.empty() || schedule.seller_values.empty()) {
    throw std::invalid_argument("equilibrium: empty schedule side");
  }
  std::vector<Currency> buyers = schedule.buyer_values;
  std::vector<Currency> sellers = schedule.seller_values;
  std::sort(buyers.begin(), buyers.end(), std::greater<>());
  std::sort(sellers.begin(), sellers.end());

  const std::size_t limit = std::min(buyers.size(), sellers.size());
  std::size_t q = 0;
  Currency surplus = 0.0;
  while (q < limit && buyers[q] >= sellers[q]) {
    surplus += buyers[q] - sellers[q];
    ++q;
  }
  Currency low, high;
  if (q == 0) {
    // No crossing: the gap between best bid value and best ask value.
    low = buyers[0];
    high = sellers[0];
  } else {
    low = sellers[q - 1];
    if (q < buyers.size()) low = std::max(low, buyers[q]);
    high = buyers[q - 1];
    if (q < sellers.size()) high = std::min(high, sellers[q]);
  }
  return {0.5 * (low + high), static_cast<int>(q), q == 0 ? 0.0 : surplus};
}

// Realized share of the maximum surplus, in percent. Surplus is the value
// transferred by each trade (buyer value - seller value); prices and fees
// only move it between parties. A run with nothing to gain and nothing
// gained counts as fully efficient; gains against a zero maximum have no
// defined efficiency and come back empty.
inline std::optional<double> allocative_efficiency(double realized_surplus,
                                                   double max_surplus) {
  if (max_surplus <= 0.0) {
    if (realized_surplus == 0.0) return 100.0;
    return std::nullopt;
  }
  return 100.0 * realized_surplus / max_surplus;
}

// Smith's coefficient of convergence: RMS deviation of transaction prices
// from the equilibrium price, as a percentage of that price. Undefined
// without transactions.
inline std::optional<double> smith_alpha(std::span<const Currency> prices,
                                         Currency p0) {
  if (prices.empty() || p0 <= 0.0) return std::nullopt;
  double ss = 0.0;
  for (Currency p : prices) ss += (p - p0) * (p - p0);
  return 100.0 / p0 * std::sqrt(ss / static_cast<double>(prices.size()));
}

}  // namespace mechlab
