#include "bellkl/experiment.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace bellkl {

double ExperimentDistribution::normalization_error() const {
  double err = 0.0;
  for (int k = 0; k < table.rows(); ++k)
    err = std::max(err, std::abs(table.row(k).sum() - setting_probs[k]));
  return err;
}

Eigen::VectorXd ideal_outcome_distribution(const FockState& state,
                                           const MeasurementSetting& alice,
                                           const MeasurementSetting& bob,
                                           const OutcomeSpace& space) {
  if (!state.is_normalized(1e-10))
    throw std::invalid_argument("ideal_outcome_distribution: state is not normalized");
  const auto& basis = FockBasis::instance();
  const FockState rotated = rotate_to_ports(state, alice, bob);

  // counter alphabet large enough for the state, collapsed later if needed
  const OutcomeSpace counts =
      space.kind() == DetectionKind::kCounter
          ? space
          : OutcomeSpace::counters(state.max_photons_alice(), state.max_photons_bob());

  Eigen::VectorXd probs = Eigen::VectorXd::Zero(counts.joint_size());
  for (int i = 0; i < basis.size(); ++i) {
    const double p = std::norm(rotated.amplitudes[i]);
    if (p == 0.0) continue;
    const Occupation& occ = basis.tuple(i);
    const int a = counts.alice_index({occ[0], occ[1]});
    const int b = counts.bob_index({occ[2], occ[3]});
    if (a < 0 || b < 0)
      throw std::logic_error("ideal_outcome_distribution: outcome outside the outcome space");
    probs[counts.joint_index(a, b)] += p;
  }
  if (space.kind() == DetectionKind::kDetector)
    return collapse_to_clicks(probs, counts, space);
  return probs;
}

ExperimentDistribution experiment_distribution(const FockState& state,
                                               const SettingQuad& settings,
                                               const DetectionModel& model,
                                               const Eigen::Vector4d& setting_probs) {
  if (!detection_model_valid(model))
    throw std::domain_error("experiment_distribution: efficiency must lie in [0, 1]");
  if (std::abs(setting_probs.sum() - 1.0) > 1e-12 || setting_probs.minCoeff() < 0.0)
    throw std::invalid_argument("experiment_distribution: setting probabilities must sum to 1");

  const OutcomeSpace counts = OutcomeSpace::for_state(state, DetectionKind::kCounter);
  const OutcomeSpace space = OutcomeSpace::for_state(state, model.kind);

  ExperimentDistribution dist;
  dist.space = space;
  dist.setting_probs = setting_probs;
  dist.table.resize(4, space.joint_size());

  const MeasurementSetting& a1 = settings[0];
  const MeasurementSetting& a2 = settings[1];
  const MeasurementSetting& b1 = settings[2];
  const MeasurementSetting& b2 = settings[3];
  const std::array<std::pair<const MeasurementSetting*, const MeasurementSetting*>, 4> pairs = {
      {{&a1, &b1}, {&a1, &b2}, {&a2, &b1}, {&a2, &b2}}};

  for (int k = 0; k < 4; ++k) {
    Eigen::VectorXd row =
        ideal_outcome_distribution(state, *pairs[k].first, *pairs[k].second, counts);
    row = apply_loss(row, counts, model.efficiency);
    if (model.kind == DetectionKind::kDetector) row = collapse_to_clicks(row, counts, space);
    dist.table.row(k) = setting_probs[k] * row.transpose();
  }
  return dist;
}

std::vector<double> default_sign_map(const std::vector<OutcomeLabel>& labels) {
  std::vector<double> signs(labels.size(), -1.0);
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == OutcomeLabel{1, 0}) signs[i] = 1.0;
  return signs;
}

double chsh_value(const ExperimentDistribution& dist, const std::vector<double>& alice_signs,
                  const std::vector<double>& bob_signs) {
  if (static_cast<int>(alice_signs.size()) != dist.space.alice_size() ||
      static_cast<int>(bob_signs.size()) != dist.space.bob_size())
    throw std::invalid_argument("chsh_value: sign map must cover every outcome label");
  Eigen::Vector4d correlators;
  for (int k = 0; k < 4; ++k) {
    if (dist.setting_probs[k] <= 0.0)
      throw std::invalid_argument("chsh_value: setting probability is zero");
    double e = 0.0;
    for (int a = 0; a < dist.space.alice_size(); ++a)
      for (int b = 0; b < dist.space.bob_size(); ++b)
        e += alice_signs[a] * bob_signs[b] * dist.table(k, dist.space.joint_index(a, b));
    correlators[k] = e / dist.setting_probs[k];
  }
  return correlators[0] - correlators[1] + correlators[2] + correlators[3];
}

double chsh_value(const ExperimentDistribution& dist) {
  return chsh_value(dist, default_sign_map(dist.space.alice_labels()),
                    default_sign_map(dist.space.bob_labels()));
}

}  // namespace bellkl
