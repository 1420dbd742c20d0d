#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <Eigen/Core>

#include "bellkl/experiment.hpp"
#include "bellkl/strategies.hpp"

namespace bellkl {

/// Kullback-Leibler divergence sum_kl q_kl log2(q_kl / p_kl) in bits, with
/// 0 log(0/p) = 0. Returns +infinity when q puts mass where p has none.
/// Both tables must have the same shape.
template <typename DerivedQ, typename DerivedP>
double kl_divergence_bits(const Eigen::MatrixBase<DerivedQ>& q,
                          const Eigen::MatrixBase<DerivedP>& p) {
  if (q.rows() != p.rows() || q.cols() != p.cols())
    throw std::invalid_argument("kl_divergence_bits: shape mismatch");
  double d = 0.0;
  for (Eigen::Index i = 0; i < q.rows(); ++i)
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      const double qv = q(i, j);
      if (qv <= 0.0) continue;
      const double pv = p(i, j);
      if (pv <= 0.0) return std::numeric_limits<double>::infinity();
      d += qv * std::log2(qv / pv);
    }
  return d;
}

/// Convex mixture of deterministic local strategies together with the joint
/// prediction table it induces (scaled by the setting probabilities, same
/// layout as ExperimentDistribution::table).
struct LRModel {
  Eigen::VectorXd weights;
  Eigen::MatrixXd prediction;
};

struct EmOptions {
  /// Stop when the divergence decrease in one sweep falls below this (bits).
  double tol = 1e-10;
  int max_iter = 1'000'000;
  /// Extra certified stop: the multiplicative EM update also yields the bound
  /// divergence - optimum <= log2(max strategy gain); stop once that bound
  /// drops below gap_tol. Zero disables.
  double gap_tol = 0.0;
  /// Like gap_tol but relative to the current divergence. Zero disables.
  double rel_gap_tol = 0.0;
  /// When set, stop as soon as the current divergence interval
  /// [divergence - gap bound, divergence] lies entirely above or below this
  /// threshold; used for efficiency-boundary decisions.
  std::optional<double> decision_threshold;
  /// Warm-start weights (defaults to uniform). Floored to a small positive
  /// value so no strategy is locked out.
  std::optional<Eigen::VectorXd> initial_weights;
};

struct EmResult {
  LRModel model;
  double divergence_bits = 0.0;
  /// Certified upper bound on divergence_bits minus the true minimum.
  double gap_bound_bits = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  /// False if any sweep increased the divergence by more than rounding slack.
  bool monotone = true;
};

/// Minimizes D_KL(q || p) over the local-realistic polytope spanned by
/// `strategies` with the multiplicative EM update
///   w_s <- w_s * sum_k q[k, c_s(k)] / ptilde[k, c_s(k)],
/// where ptilde is the conditional prediction and c_s(k) the outcome strategy
/// s produces at setting pair k. Starts from uniform weights.
EmResult em_project(const ExperimentDistribution& q, const StrategySet& strategies,
                    const EmOptions& options = {});

struct StrengthResult {
  double strength_bits = 0.0;      // after zero truncation
  double raw_strength_bits = 0.0;  // divergence as computed
  SettingQuad settings;
  LRModel lr_model;
  int iterations = 0;
  bool converged = false;
  bool truncated_to_zero = false;
};

inline constexpr double kDefaultTruncationThreshold = 1e-9;

/// Inner problem only: builds the experiment distribution for the given
/// settings and projects onto the local-realistic set. Strengths below
/// `truncation_threshold` are recorded as zero.
StrengthResult strength_given_settings(
    const FockState& state, const SettingQuad& settings, const DetectionModel& model,
    double truncation_threshold = kDefaultTruncationThreshold, const EmOptions& em = {});

/// Asymptotic p-value bound 2^(-N S) for rejecting local realism after N
/// experiments at statistical strength S; the data-dependent o(N) correction
/// is dropped.
double pvalue_bound(double strength_bits, double n_trials);

}  // namespace bellkl
