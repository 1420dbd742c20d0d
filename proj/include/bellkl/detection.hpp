#pragma once

#include <string>
#include <vector>
#include <Eigen/Core>

#include "bellkl/fock.hpp"

namespace bellkl {

/// Photon counters resolve the photon number at each detector port;
/// photon detectors only report click / no click.
enum class DetectionKind { kCounter, kDetector };

std::string to_string(DetectionKind kind);

struct DetectionModel {
  DetectionKind kind = DetectionKind::kCounter;
  double efficiency = 1.0;  // per-photon registration probability, in [0, 1]
};

bool detection_model_valid(const DetectionModel& m);

/// One party's outcome label: photon counts (reflected, transmitted) for
/// counters, or the click pattern (0/1 each) for detectors.
struct OutcomeLabel {
  int reflected = 0;
  int transmitted = 0;
  friend bool operator==(const OutcomeLabel&, const OutcomeLabel&) = default;
};

/// Per-party outcome alphabets for a joint experiment. Counter labels are
/// count pairs in lexicographic order; detector labels are click patterns in
/// binary order. Alphabets are capped by the photon number each party can
/// receive, which local rotations and loss never increase: an unbalanced
/// Bell state feeds at most one photon per side, so both kinds reduce to the
/// same three labels, while pseudo-Bell states use the full six (counter) or
/// four (detector) labels.
class OutcomeSpace {
 public:
  static OutcomeSpace counters(int max_photons_alice = kMaxTotalPhotons,
                               int max_photons_bob = kMaxTotalPhotons);
  static OutcomeSpace detectors(int max_photons_alice = kMaxTotalPhotons,
                                int max_photons_bob = kMaxTotalPhotons);
  static OutcomeSpace for_state(const FockState& state, DetectionKind kind);

  DetectionKind kind() const { return kind_; }
  const std::vector<OutcomeLabel>& alice_labels() const { return alice_; }
  const std::vector<OutcomeLabel>& bob_labels() const { return bob_; }
  int alice_size() const { return static_cast<int>(alice_.size()); }
  int bob_size() const { return static_cast<int>(bob_.size()); }
  int joint_size() const { return alice_size() * bob_size(); }

  /// Joint outcome index; Alice-major.
  int joint_index(int alice_label, int bob_label) const {
    return alice_label * bob_size() + bob_label;
  }
  int alice_index(const OutcomeLabel& label) const;
  int bob_index(const OutcomeLabel& label) const;

 private:
  DetectionKind kind_ = DetectionKind::kCounter;
  std::vector<OutcomeLabel> alice_, bob_;
};

/// Per-party binomial-thinning matrix on count labels: entry (src, dst) is
/// the probability that counts `src` are registered as `dst` when each photon
/// is kept independently with probability `efficiency`.
Eigen::MatrixXd loss_transition(const std::vector<OutcomeLabel>& count_labels,
                                double efficiency);

/// Applies detector loss to a joint distribution over count labels
/// (binomial thinning at all four detectors).
Eigen::VectorXd apply_loss(const Eigen::VectorXd& joint_counts,
                           const OutcomeSpace& counter_space, double efficiency);

///0/1 matrix mapping count labels onto click patterns (n > 0 becomes 1).
Eigen::MatrixXd collapse_transition(const std::vector<OutcomeLabel>& count_labels,
                                    const std::vector<OutcomeLabel>& click_labels);

/// Collapses a joint count distribution to the detector click distribution.
Eigen::VectorXd collapse_to_clicks(const Eigen::VectorXd& joint_counts,
                                   const OutcomeSpace& counter_space,
                                   const OutcomeSpace& detector_space);

}  // namespace bellkl
