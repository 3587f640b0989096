#pragma once

#include "mechlab/genome.hpp"
#include "mechlab/rng.hpp"

namespace mechlab {

enum class ClearingEvent { ShoutPlaced, RoundEnd, DayEnd };

// CC clears on every event, CR only at round/day boundaries, CP clears a
// freshly placed shout with probability p and always at boundaries, so
// CP(0) behaves as CR and CP(1) as CC.
inline bool should_clear(ClearingEvent event, const ClearingRule& rule, Rng& rng) {
  switch (rule.policy) {
    case ClearingPolicy::CC:
      return true;
    case ClearingPolicy::CR:
      return event != ClearingEvent::ShoutPlaced;
    case ClearingPolicy::CP:
      if (event != ClearingEvent::ShoutPlaced) return true;
      return rng.bernoulli(rule.probability);
  }
  return false;
}

}  // namespace mechlab
