#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace bellkl {

/// All deterministic local strategies for the 2-settings-per-party scenario.
/// A strategy fixes one outcome per setting per party, (a1, a2; b1, b2); a
/// local realistic theory is a convex mixture of these. For each strategy,
/// `cells` stores the joint outcome index it produces at each of the four
/// setting pairs (A1,B1), (A1,B2), (A2,B1), (A2,B2), with joint outcomes
/// Alice-major as in ExperimentDistribution.
struct StrategySet {
  int n_alice_settings = 2;
  int n_bob_settings = 2;
  int alice_outcomes = 0;  // d_A
  int bob_outcomes = 0;    // d_B
  std::vector<std::array<std::int32_t, 4>> cells;

  int size() const { return static_cast<int>(cells.size()); }

  /// Enumerates all d_A^2 * d_B^2 strategies.
  static StrategySet enumerate(int alice_outcomes, int bob_outcomes);
};

}  // namespace bellkl
