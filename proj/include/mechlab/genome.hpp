#pragma once

#include <charconv>
#include <cctype>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mechlab {

struct GenomeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class MatchingPolicy { ME, MV, MT };
enum class QuotePolicy { QT, QO, QS };
enum class AcceptingPolicy { AA, AN, AQ, AS, AE, AD, AH, AT, AY };
enum class ClearingPolicy { CC, CR, CP };
enum class PricingPolicy { PD, PU, PN, PB };
enum class ChargingPolicy { GF, GB, GC, GL };
enum class SideFilter { AskOnly, BidOnly, Both };

struct MatchingRule {
  MatchingPolicy policy = MatchingPolicy::ME;
  double theta = 0.0;  // MT, in [-1, 1]
};

struct QuoteRule {
  QuotePolicy policy = QuotePolicy::QT;
  double spread = 0.0;  // QS, >= 0
};

struct AcceptingRule {
  AcceptingPolicy policy = AcceptingPolicy::AA;
  int window = 4;             // AE/AD/AT sliding window, >= 1
  double delta = 0.0;         // AE slack, >= 0
  double tau = 0.5;           // AH match-probability threshold, [0, 1]
  SideFilter side = SideFilter::Both;  // AY
};

struct ClearingRule {
  ClearingPolicy policy = ClearingPolicy::CC;
  double probability = 0.0;  // CP, [0, 1]
};

struct PricingRule {
  PricingPolicy policy = PricingPolicy::PD;
  double k = 0.5;  // PD/PU, [0, 1]
  int pairs = 4;   // PN, >= 1
};

struct FeeSchedule {
  double registration = 0.0;
  double information = 0.0;
  double shout = 0.0;
  double transaction = 0.0;
  double profit_fraction = 0.0;  // [0, 1]
};

struct ChargingRule {
  ChargingPolicy policy = ChargingPolicy::GF;
  FeeSchedule fees;
  double scale = 0.8;  // GC multiplier on the lowest competitor fees
  double rate = 0.1;   // GL learning rate, (0, 1]
  double tau = 0.5;    // GL exploring-monitor threshold, [0, 1]
};

// One policy plus parameters per family; round-trips through a canonical
// string such as "MV + QO + AH(tau=0.4) + CP(p=0.3) + PN(n=11) + GF(fp=0.1)".
struct MechanismGenome {
  MatchingRule matching;
  QuoteRule quoting;
  AcceptingRule accepting;
  ClearingRule clearing;
  PricingRule pricing;
  ChargingRule charging;

  std::string str() const;
  static MechanismGenome parse(std::string_view text);
  void validate() const;

  bool operator==(const MechanismGenome& other) const {
    return str() == other.str();
  }
};

namespace detail {

inline std::string format_number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

inline std::string format_number(int v) { return std::to_string(v); }

struct GenomeToken {
  std::string policy;
  std::vector<std::pair<std::string, std::string>> args;
};

inline std::vector<GenomeToken> tokenize_genome(std::string_view text) {
  std::vector<GenomeToken> tokens;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  while (true) {
    skip_ws();
    if (i >= text.size()) break;
    GenomeToken tok;
    while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) {
      tok.policy.push_back(static_cast<char>(std::toupper(
          static_cast<unsigned char>(text[i]))));
      ++i;
    }
    if (tok.policy.empty()) {
      throw GenomeError("genome: expected policy name at '" +
                        std::string(text.substr(i)) + "'");
    }
    skip_ws();
    if (i < text.size() && text[i] == '(') {
      ++i;
      while (true) {
        skip_ws();
        std::string key;
        while (i < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
          key.push_back(static_cast<char>(std::tolower(
              static_cast<unsigned char>(text[i]))));
          ++i;
        }
        skip_ws();
        if (i >= text.size() || text[i] != '=') {
          throw GenomeError("genome: expected '=' in parameters of " + tok.policy);
        }
        ++i;
        skip_ws();
        std::string value;
        while (i < text.size() && text[i] != ',' && text[i] != ')') {
          value.push_back(text[i]);
          ++i;
        }
        while (!value.empty() && std::isspace(static_cast<unsigned char>(value.back()))) {
          value.pop_back();
        }
        tok.args.emplace_back(key, value);
        if (i >= text.size()) throw GenomeError("genome: unterminated parameter list");
        if (text[i] == ',') {
          ++i;
          continue;
        }
        ++i;  // ')'
        break;
      }
    }
    tokens.push_back(std::move(tok));
    skip_ws();
    if (i >= text.size()) break;
    if (text[i] != '+') {
      throw GenomeError("genome: expected '+' between policies near '" +
                        std::string(text.substr(i)) + "'");
    }
    ++i;
  }
  return tokens;
}

inline double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw GenomeError("genome: bad numeric value '" + s + "' in " + where);
  }
  return v;
}

inline int parse_int(const std::string& s, const std::string& where) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw GenomeError("genome: bad integer value '" + s + "' in " + where);
  }
  return v;
}

inline std::map<std::string, std::string> arg_map(const GenomeToken& tok,
                                                  std::size_t expected) {
  if (tok.args.size() != expected) {
    throw GenomeError("genome: " + tok.policy + " takes " +
                      std::to_string(expected) + " parameter(s)");
  }
  std::map<std::string, std::string> m;
  for (const auto& [k, v] : tok.args) m[k] = v;
  return m;
}

inline const std::string& require_arg(const std::map<std::string, std::string>& m,
                                      const std::string& key,
                                      const std::string& policy) {
  auto it = m.find(key);
  if (it == m.end()) {
    throw GenomeError("genome: " + policy + " needs parameter '" + key + "'");
  }
  return it->second;
}

}  // namespace detail

inline std::string side_filter_name(SideFilter side) {
  switch (side) {
    case SideFilter::AskOnly: return "ask";
    case SideFilter::BidOnly: return "bid";
    case SideFilter::Both: return "both";
  }
  return "both";
}

inline std::string MechanismGenome::str() const {
  using detail::format_number;
  std::string out;
  switch (matching.policy) {
    case MatchingPolicy::ME: out += "ME"; break;
    case MatchingPolicy::MV: out += "MV"; break;
    case MatchingPolicy::MT:
      out += "MT(theta=" + format_number(matching.theta) + ")";
      break;
  }
  out += " + ";
  switch (quoting.policy) {
    case QuotePolicy::QT: out += "QT"; break;
    case QuotePolicy::QO: out += "QO"; break;
    case QuotePolicy::QS:
      out += "QS(spread=" + format_number(quoting.spread) + ")";
      break;
  }
  out += " + ";
  switch (accepting.policy) {
    case AcceptingPolicy::AA: out += "AA"; break;
    case AcceptingPolicy::AN: out += "AN"; break;
    case AcceptingPolicy::AQ: out += "AQ"; break;
    case AcceptingPolicy::AS: out += "AS"; break;
    case AcceptingPolicy::AE:
      out += "AE(w=" + format_number(accepting.window) +
             ",delta=" + format_number(accepting.delta) + ")";
      break;
    case AcceptingPolicy::AD:
      out += "AD(w=" + format_number(accepting.window) + ")";
      break;
    case AcceptingPolicy::AH:
      out += "AH(tau=" + format_number(accepting.tau) + ")";
      break;
    case AcceptingPolicy::AT:
      out += "AT(w=" + format_number(accepting.window) + ")";
      break;
    case AcceptingPolicy::AY:
      out += "AY(side=" + side_filter_name(accepting.side) + ")";
      break;
  }
  out += " + ";
  switch (clearing.policy) {
    case ClearingPolicy::CC: out += "CC"; break;
    case ClearingPolicy::CR: out += "CR"; break;
    case ClearingPolicy::CP:
      out += "CP(p=" + format_number(clearing.probability) + ")";
      break;
  }
  out += " + ";
  switch (pricing.policy) {
    case PricingPolicy::PD: out += "PD(k=" + format_number(pricing.k) + ")"; break;
    case PricingPolicy::PU: out += "PU(k=" + format_number(pricing.k) + ")"; break;
    case PricingPolicy::PN:
      out += "PN(n=" + format_number(pricing.pairs) + ")";
      break;
    case PricingPolicy::PB: out += "PB"; break;
  }
  out += " + ";
  switch (charging.policy) {
    case ChargingPolicy::GF:
      out += "GF(fp=" + format_number(charging.fees.profit_fraction) + ")";
      break;
    case ChargingPolicy::GB: out += "GB"; break;
    case ChargingPolicy::GC:
      out += "GC(scale=" + format_number(charging.scale) + ")";
      break;
    case ChargingPolicy::GL:
      out += "GL(r=" + format_number(charging.rate) +
             ",tau=" + format_number(charging.tau) + ")";
      break;
  }
  return out;
}

inline MechanismGenome MechanismGenome::parse(std::string_view text) {
  using namespace detail;
  auto tokens = tokenize_genome(text);
  if (tokens.size() != 6) {
    throw GenomeError("genome: expected 6 policies (M + Q + A + C + P + G), got " +
                      std::to_string(tokens.size()));
  }
  MechanismGenome g;

  const GenomeToken& m = tokens[0];
  if (m.policy == "ME") {
    arg_map(m, 0);
    g.matching.policy = MatchingPolicy::ME;
  } else if (m.policy == "MV") {
    arg_map(m, 0);
    g.matching.policy = MatchingPolicy::MV;
  } else if (m.policy == "MT") {
    auto args = arg_map(m, 1);
    g.matching.policy = MatchingPolicy::MT;
    g.matching.theta = parse_double(require_arg(args, "theta", "MT"), "MT");
  } else {
    throw GenomeError("genome: unknown matching policy " + m.policy);
  }

  const GenomeToken& q = tokens[1];
  if (q.policy == "QT") {
    arg_map(q, 0);
    g.quoting.policy = QuotePolicy::QT;
  } else if (q.policy == "QO") {
    arg_map(q, 0);
    g.quoting.policy = QuotePolicy::QO;
  } else if (q.policy == "QS") {
    auto args = arg_map(q, 1);
    g.quoting.policy = QuotePolicy::QS;
    g.quoting.spread = parse_double(require_arg(args, "spread", "QS"), "QS");
  } else {
    throw GenomeError("genome: unknown quote policy " + q.policy);
  }

  const GenomeToken& a = tokens[2];
  if (a.policy == "AA") {
    arg_map(a, 0);
    g.accepting.policy = AcceptingPolicy::AA;
  } else if (a.policy == "AN") {
    arg_map(a, 0);
    g.accepting.policy = AcceptingPolicy::AN;
  } else if (a.policy == "AQ") {
    arg_map(a, 0);
    g.accepting.policy = AcceptingPolicy::AQ;
  } else if (a.policy == "AS") {
    arg_map(a, 0);
    g.accepting.policy = AcceptingPolicy::AS;
  } else if (a.policy == "AE") {
    auto args = arg_map(a, 2);
    g.accepting.policy = AcceptingPolicy::AE;
    g.accepting.window = parse_int(require_arg(args, "w", "AE"), "AE");
    g.accepting.delta = parse_double(require_arg(args, "delta", "AE"), "AE");
  } else if (a.policy == "AD") {
    auto args = arg_map(a, 1);
    g.accepting.policy = AcceptingPolicy::AD;
    g.accepting.window = parse_int(require_arg(args, "w", "AD"), "AD");
  } else if (a.policy == "AH") {
    auto args = arg_map(a, 1);
    g.accepting.policy = AcceptingPolicy::AH;
    g.accepting.tau = parse_double(require_arg(args, "tau", "AH"), "AH");
  } else if (a.policy == "AT") {
    auto args = arg_map(a, 1);
    g.accepting.policy = AcceptingPolicy::AT;
    g.accepting.window = parse_int(require_arg(args, "w", "AT"), "AT");
  } else if (a.policy == "AY") {
    auto args = arg_map(a, 1);
    g.accepting.policy = AcceptingPolicy::AY;
    const std::string& side = require_arg(args, "side", "AY");
    if (side == "ask") {
      g.accepting.side = SideFilter::AskOnly;
    } else if (side == "bid") {
      g.accepting.side = SideFilter::BidOnly;
    } else if (side == "both") {
      g.accepting.side = SideFilter::Both;
    } else {
      throw GenomeError("genome: AY side must be ask, bid, or both");
    }
  } else {
    throw GenomeError("genome: unknown accepting policy " + a.policy);
  }

  const GenomeToken& c = tokens[3];
  if (c.policy == "CC") {
    arg_map(c, 0);
    g.clearing.policy = ClearingPolicy::CC;
  } else if (c.policy == "CR") {
    arg_map(c, 0);
    g.clearing.policy = ClearingPolicy::CR;
  } else if (c.policy == "CP") {
    auto args = arg_map(c, 1);
    g.clearing.policy = ClearingPolicy::CP;
    g.clearing.probability = parse_double(require_arg(args, "p", "CP"), "CP");
  } else {
    throw GenomeError("genome: unknown clearing policy " + c.policy);
  }

  const GenomeToken& p = tokens[4];
  if (p.policy == "PD") {
    auto args = arg_map(p, 1);
    g.pricing.policy = PricingPolicy::PD;
    g.pricing.k = parse_double(require_arg(args, "k", "PD"), "PD");
  } else if (p.policy == "PU") {
    auto args = arg_map(p, 1);
    g.pricing.policy = PricingPolicy::PU;
    g.pricing.k = parse_double(require_arg(args, "k", "PU"), "PU");
  } else if (p.policy == "PN") {
    auto args = arg_map(p, 1);
    g.pricing.policy = PricingPolicy::PN;
    g.pricing.pairs = parse_int(require_arg(args, "n", "PN"), "PN");
  } else if (p.policy == "PB") {
    arg_map(p, 0);
    g.pricing.policy = PricingPolicy::PB;
  } else {
    throw GenomeError("genome: unknown pricing policy " + p.policy);
  }

  const GenomeToken& f = tokens[5];
  if (f.policy == "GF") {
    auto args = arg_map(f, 1);
    g.charging.policy = ChargingPolicy::GF;
    g.charging.fees.profit_fraction =
        parse_double(require_arg(args, "fp", "GF"), "GF");
  } else if (f.policy == "GB") {
    arg_map(f, 0);
    g.charging.policy = ChargingPolicy::GB;
  } else if (f.policy == "GC") {
    auto args = arg_map(f, 1);
    g.charging.policy = ChargingPolicy::GC;
    g.charging.scale = parse_double(require_arg(args, "scale", "GC"), "GC");
  } else if (f.policy == "GL") {
    auto args = arg_map(f, 2);
    g.charging.policy = ChargingPolicy::GL;
    g.charging.rate = parse_double(require_arg(args, "r", "GL"), "GL");
    g.charging.tau = parse_double(require_arg(args, "tau", "GL"), "GL");
  } else {
    throw GenomeError("genome: unknown charging policy " + f.policy);
  }

  g.validate();
  return g;
}

inline void MechanismGenome::validate() const {
  auto fail = [](const std::string& msg) { throw GenomeError("genome: " + msg); };
  if (matching.theta < -1.0 || matching.theta > 1.0) fail("MT theta outside [-1, 1]");
  if (quoting.spread < 0.0) fail("QS spread must be non-negative");
  if (accepting.window < 1) fail("accepting window must be >= 1");
  if (accepting.delta < 0.0) fail("AE delta must be non-negative");
  if (accepting.tau < 0.0 || accepting.tau > 1.0) fail("AH tau outside [0, 1]");
  if (clearing.probability < 0.0 || clearing.probability > 1.0) {
    fail("CP probability outside [0, 1]");
  }
  if (pricing.k < 0.0 || pricing.k > 1.0) fail("pricing k outside [0, 1]");
  if (pricing.pairs < 1) fail("PN n must be >= 1");
  const FeeSchedule& fees = charging.fees;
  if (fees.registration < 0.0 || fees.information < 0.0 || fees.shout < 0.0 ||
      fees.transaction < 0.0 || fees.profit_fraction < 0.0) {
    fail("fees must be non-negative");
  }
  if (fees.profit_fraction > 1.0) fail("profit fee outside [0, 1]");
  if (charging.scale < 0.0) fail("GC scale must be non-negative");
  if (charging.rate <= 0.0 || charging.rate > 1.0) fail("GL rate outside (0, 1]");
  if (charging.tau < 0.0 || charging.tau > 1.0) fail("GL tau outside [0, 1]");
}

}  // namespace mechlab
