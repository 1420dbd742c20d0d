#include "bellkl/strategies.hpp"

#include <stdexcept>

namespace bellkl {

StrategySet StrategySet::enumerate(int alice_outcomes, int bob_outcomes) {
  if (alice_outcomes < 1 || bob_outcomes < 1)
    throw std::invalid_argument("StrategySet::enumerate: outcome counts must be positive");
  StrategySet set;
  set.alice_outcomes = alice_outcomes;
  set.bob_outcomes = bob_outcomes;
  const auto joint = [bob_outcomes](int a, int b) {
    return static_cast<std::int32_t>(a * bob_outcomes + b);
  };
  set.cells.reserve(static_cast<std::size_t>(alice_outcomes) * alice_outcomes *
                    bob_outcomes * bob_outcomes);
  for (int a1 = 0; a1 < alice_outcomes; ++a1)
    for (int a2 = 0; a2 < alice_outcomes; ++a2)
      for (int b1 = 0; b1 < bob_outcomes; ++b1)
        for (int b2 = 0; b2 < bob_outcomes; ++b2)
          set.cells.push_back({joint(a1, b1), joint(a1, b2), joint(a2, b1), joint(a2, b2)});
  return set;
}

}  // namespace bellkl
