#pragma once

#include <cstdint>
#include <Eigen/Core>

#include "bellkl/experiment.hpp"

namespace bellkl {

/// Empirical statistics of the per-trial log-likelihood ratio
/// log2(q / p) under i.i.d. (setting, outcome) records drawn from q.
struct TrialStats {
  double mean_llr_bits = 0.0;    // (1/N) sum log2(q/p); estimates D_KL(q||p)
  double stddev_bits = 0.0;      // sample standard deviation of the per-trial LLR
  double stderr_bits = 0.0;      // stddev / sqrt(N)
  std::int64_t n_trials = 0;
  /// Trials that landed where p = 0 (< q); any such draw rejects local
  /// realism outright and makes the mean +infinity.
  std::int64_t n_infinite = 0;
};

/// Draws `n_trials` records from q with a seeded deterministic generator and
/// evaluates the log-likelihood ratio against the prediction table p (same
/// shape and setting probabilities as q). Identical seeds give identical
/// output bit for bit.
TrialStats simulate_trials(const ExperimentDistribution& q, const Eigen::MatrixXd& p,
                           std::int64_t n_trials, std::uint64_t seed);

}  // namespace bellkl
