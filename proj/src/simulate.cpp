#include "bellkl/simulate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bellkl/rng.hpp"

namespace bellkl {

TrialStats simulate_trials(const ExperimentDistribution& q, const Eigen::MatrixXd& p,
                           std::int64_t n_trials, std::uint64_t seed) {
  if (n_trials < 1) throw std::invalid_argument("simulate_trials: need at least one trial");
  if (p.rows() != q.table.rows() || p.cols() != q.table.cols())
    throw std::invalid_argument("simulate_trials: prediction shape mismatch");

  const int n_cells = static_cast<int>(q.table.size());
  const int n_outcomes = q.outcome_count();
  std::vector<double> cdf(n_cells);
  std::vector<double> qv(n_cells), pv(n_cells);
  double acc = 0.0;
  for (int k = 0; k < q.table.rows(); ++k)
    for (int l = 0; l < n_outcomes; ++l) {
      const int c = k * n_outcomes + l;
      qv[c] = q.table(k, l);
      pv[c] = p(k, l);
      acc += qv[c];
      cdf[c] = acc;
    }
  cdf[n_cells - 1] = 1.0;  // guard against rounding in the final bin

  // Tally draws per cell, then reduce; cheaper and numerically tidier than
  // accumulating one trial at a time.
  std::vector<std::int64_t> counts(n_cells, 0);
  Rng rng(seed);
  for (std::int64_t t = 0; t < n_trials; ++t) {
    const double u = rng.uniform();
    int lo = 0, hi = n_cells - 1;
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (u < cdf[mid])
        hi = mid;
      else
        lo = mid + 1;
    }
    ++counts[lo];
  }

  TrialStats stats;
  stats.n_trials = n_trials;
  double mean = 0.0;
  for (int c = 0; c < n_cells; ++c) {
    if (counts[c] == 0) continue;
    if (pv[c] <= 0.0) {
      stats.n_infinite += counts[c];
      continue;
    }
    mean += static_cast<double>(counts[c]) * std::log2(qv[c] / pv[c]);
  }
  if (stats.n_infinite > 0) {
    stats.mean_llr_bits = std::numeric_limits<double>::infinity();
    return stats;
  }
  mean /= static_cast<double>(n_trials);
  double ss = 0.0;
  for (int c = 0; c < n_cells; ++c) {
    if (counts[c] == 0) continue;
    const double d = std::log2(qv[c] / pv[c]) - mean;
    ss += static_cast<double>(counts[c]) * d * d;
  }
  stats.mean_llr_bits = mean;
  stats.stddev_bits = n_trials > 1 ? std::sqrt(ss / static_cast<double>(n_trials - 1)) : 0.0;
  stats.stderr_bits = stats.stddev_bits / std::sqrt(static_cast<double>(n_trials));
  return stats;
}

}  // namespace bellkl
