#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mechlab/genome.hpp"

namespace mechlab {

// Named mechanisms used by the harness: the standard clearing house and
// continuous double auction at low/high profit charges, the NCDAEE family,
// and three strong mechanisms found by the search.
inline const std::vector<std::pair<std::string, std::string>>& preset_table() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"CH", "ME + QT + AQ + CR + PU(k=0.5) + GF(fp=0.1)"},
      {"CH_H", "ME + QT + AQ + CR + PU(k=0.5) + GF(fp=1)"},
      {"CDA", "ME + QT + AQ + CC + PD(k=0.5) + GF(fp=0.1)"},
      {"CDA_H", "ME + QT + AQ + CC + PD(k=0.5) + GF(fp=1)"},
      {"NCDAEE_D0", "ME + QT + AE(w=4,delta=0) + CC + PN(n=4) + GF(fp=0.1)"},
      {"NCDAEE_D10", "ME + QT + AE(w=4,delta=10) + CC + PN(n=4) + GF(fp=0.1)"},
      {"NCDAEE_D20", "ME + QT + AE(w=4,delta=20) + CC + PN(n=4) + GF(fp=0.1)"},
      {"NCDAEE_D30", "ME + QT + AE(w=4,delta=30) + CC + PN(n=4) + GF(fp=0.1)"},
      {"SM7.1", "MV + QO + AH(tau=0.4) + CP(p=0.3) + PN(n=11) + GF(fp=0.1)"},
      {"SM88.0", "MT(theta=0.4) + QT + AA + CP(p=0.4) + PU(k=0.7) + GF(fp=0.1)"},
      {"SM127.1", "MV + QS(spread=10) + AS + CP(p=0.4) + PU(k=0.7) + GF(fp=0.1)"},
  };
  return table;
}

inline bool is_preset(const std::string& name) {
  std::string upper;
  for (char c : name) upper.push_back(static_cast<char>(std::toupper(
      static_cast<unsigned char>(c))));
  for (const auto& [key, value] : preset_table()) {
    if (key == upper) return true;
  }
  return false;
}

inline MechanismGenome preset(const std::string& name) {
  std::string upper;
  for (char c : name) upper.push_back(static_cast<char>(std::toupper(
      static_cast<unsigned char>(c))));
  for (const auto& [key, value] : preset_table()) {
    if (key == upper) return MechanismGenome::parse(value);
  }
  throw std::invalid_argument("unknown preset: " + name);
}

// Resolves either a preset name or a genome string.
inline MechanismGenome resolve_mechanism(const std::string& text) {
  if (is_preset(text)) return preset(text);
  return MechanismGenome::parse(text);
}

}  // namespace mechlab
