#pragma once

#include <Eigen/Core>

#include "bellkl/detection.hpp"
#include "bellkl/fock.hpp"
#include "bellkl/measurement.hpp"

namespace bellkl {

/// Joint probability table for a full two-party experiment: rows are the
/// setting pairs (A1,B1), (A1,B2), (A2,B1), (A2,B2) in that order, columns
/// the joint outcomes of `space` (Alice-major). Entries include the setting
/// probabilities, so the whole table sums to one and row k sums to
/// setting_probs[k].
struct ExperimentDistribution {
  OutcomeSpace space;
  Eigen::Vector4d setting_probs = Eigen::Vector4d::Constant(0.25);
  Eigen::MatrixXd table;

  int setting_count() const { return static_cast<int>(table.rows()); }
  int outcome_count() const { return static_cast<int>(table.cols()); }

  /// Max |row sum - setting prob| over rows; diagnostic for tests.
  double normalization_error() const;
};

/// Outcome distribution for one setting pair at unit efficiency: rotates the
/// state into the detector-port basis, reads off the exact photon-count
/// distribution, and (detector kind) collapses counts to clicks.
/// Throws if the state is not normalized.
Eigen::VectorXd ideal_outcome_distribution(const FockState& state,
                                           const MeasurementSetting& alice,
                                           const MeasurementSetting& bob,
                                           const OutcomeSpace& space);

/// Full experiment table over the four setting pairs. Loss is applied to the
/// ideal count statistics by binomial thinning at every detector; detector
/// kind collapses the thinned counts to clicks. Setting probabilities default
/// to uniform and must sum to one.
ExperimentDistribution experiment_distribution(
    const FockState& state, const SettingQuad& settings, const DetectionModel& model,
    const Eigen::Vector4d& setting_probs = Eigen::Vector4d::Constant(0.25));

/// Signs (+1/-1) for each label of one party; no-detection defaults to -1.
/// The +1 outcome is a single registration at the reflected port.
std::vector<double> default_sign_map(const std::vector<OutcomeLabel>& labels);

/// CHSH combination E(A1,B1) - E(A1,B2) + E(A2,B1) + E(A2,B2) of the
/// conditional correlators under the given per-party outcome signs.
/// Diagnostic only; sign maps must cover every label.
double chsh_value(const ExperimentDistribution& dist, const std::vector<double>& alice_signs,
                  const std::vector<double>& bob_signs);

double chsh_value(const ExperimentDistribution& dist);

}  // namespace bellkl
