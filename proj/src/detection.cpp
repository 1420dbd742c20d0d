#include "bellkl/detection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace bellkl {

std::string to_string(DetectionKind kind) {
  return kind == DetectionKind::kCounter ? "counter" : "detector";
}

bool detection_model_valid(const DetectionModel& m) {
  return m.efficiency >= 0.0 && m.efficiency <= 1.0;
}

namespace {

std::vector<OutcomeLabel> count_labels(int max_photons) {
  std::vector<OutcomeLabel> labels;
  for (int n1 = 0; n1 <= max_photons; ++n1)
    for (int n2 = 0; n2 <= max_photons - n1; ++n2) labels.push_back({n1, n2});
  return labels;
}

std::vector<OutcomeLabel> click_labels(int max_photons) {
  std::vector<OutcomeLabel> labels;
  for (int c1 = 0; c1 <= 1; ++c1)
    for (int c2 = 0; c2 <= 1; ++c2)
      if (c1 + c2 <= max_photons) labels.push_back({c1, c2});
  return labels;
}

int label_index(const std::vector<OutcomeLabel>& labels, const OutcomeLabel& label) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  return -1;
}

double binomial_pmf(int n, int k, double p) {
  double coeff = 1.0;
  for (int i = 1; i <= k; ++i) coeff = coeff * (n - k + i) / i;
  return coeff * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

}  // namespace

OutcomeSpace OutcomeSpace::counters(int max_photons_alice, int max_photons_bob) {
  OutcomeSpace space;
  space.kind_ = DetectionKind::kCounter;
  space.alice_ = count_labels(max_photons_alice);
  space.bob_ = count_labels(max_photons_bob);
  // lexicographic order; (0,0) is the no-detection outcome and is kept
  std::sort(space.alice_.begin(), space.alice_.end(), [](auto a, auto b) {
    return std::pair(a.reflected, a.transmitted) < std::pair(b.reflected, b.transmitted);
  });
  std::sort(space.bob_.begin(), space.bob_.end(), [](auto a, auto b) {
    return std::pair(a.reflected, a.transmitted) < std::pair(b.reflected, b.transmitted);
  });
  return space;
}

OutcomeSpace OutcomeSpace::detectors(int max_photons_alice, int max_photons_bob) {
  OutcomeSpace space;
  space.kind_ = DetectionKind::kDetector;
  space.alice_ = click_labels(max_photons_alice);
  space.bob_ = click_labels(max_photons_bob);
  return space;
}

OutcomeSpace OutcomeSpace::for_state(const FockState& state, DetectionKind kind) {
  const int na = state.max_photons_alice();
  const int nb = state.max_photons_bob();
  return kind == DetectionKind::kCounter ? counters(na, nb) : detectors(na, nb);
}

int OutcomeSpace::alice_index(const OutcomeLabel& label) const {
  return label_index(alice_, label);
}

int OutcomeSpace::bob_index(const OutcomeLabel& label) const {
  return label_index(bob_, label);
}

Eigen::MatrixXd loss_transition(const std::vector<OutcomeLabel>& count_labels,
                                double efficiency) {
  if (!(efficiency >= 0.0 && efficiency <= 1.0))
    throw std::domain_error("loss_transition: efficiency must lie in [0, 1]");
  const int n = static_cast<int>(count_labels.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (int src = 0; src < n; ++src) {
    const auto [n1, n2] = count_labels[src];
    for (int k1 = 0; k1 <= n1; ++k1)
      for (int k2 = 0; k2 <= n2; ++k2) {
        const int dst = label_index(count_labels, {k1, k2});
        if (dst < 0)
          throw std::logic_error("loss_transition: thinned label missing from alphabet");
        t(src, dst) += binomial_pmf(n1, k1, efficiency) * binomial_pmf(n2, k2, efficiency);
      }
  }
  return t;
}

Eigen::VectorXd apply_loss(const Eigen::VectorXd& joint_counts,
                           const OutcomeSpace& counter_space, double efficiency) {
  if (counter_space.kind() != DetectionKind::kCounter)
    throw std::invalid_argument("apply_loss: expected a counter-kind distribution");
  if (joint_counts.size() != counter_space.joint_size())
    throw std::invalid_argument("apply_loss: distribution size does not match outcome space");
  const Eigen::MatrixXd ta = loss_transition(counter_space.alice_labels(), efficiency);
  const Eigen::MatrixXd tb = loss_transition(counter_space.bob_labels(), efficiency);
  Eigen::MatrixXd m = joint_counts.reshaped<Eigen::RowMajor>(counter_space.alice_size(),
                                                             counter_space.bob_size());
  Eigen::MatrixXd out = ta.transpose() * m * tb;
  return out.reshaped<Eigen::RowMajor>().eval();
}

Eigen::MatrixXd collapse_transition(const std::vector<OutcomeLabel>& count_labels,
                                    const std::vector<OutcomeLabel>& click_labels) {
  Eigen::MatrixXd c =
      Eigen::MatrixXd::Zero(static_cast<int>(count_labels.size()),
                            static_cast<int>(click_labels.size()));
  for (std::size_t i = 0; i < count_labels.size(); ++i) {
    const OutcomeLabel clicks{count_labels[i].reflected > 0 ? 1 : 0,
                              count_labels[i].transmitted > 0 ? 1 : 0};
    const int j = label_index(click_labels, clicks);
    if (j < 0) throw std::logic_error("collapse_transition: click pattern missing");
    c(static_cast<int>(i), j) = 1.0;
  }
  return c;
}

Eigen::VectorXd collapse_to_clicks(const Eigen::VectorXd& joint_counts,
                                   const OutcomeSpace& counter_space,
                                   const OutcomeSpace& detector_space) {
  const Eigen::MatrixXd ca =
      collapse_transition(counter_space.alice_labels(), detector_space.alice_labels());
  const Eigen::MatrixXd cb =
      collapse_transition(counter_space.bob_labels(), detector_space.bob_labels());
  Eigen::MatrixXd m = joint_counts.reshaped<Eigen::RowMajor>(counter_space.alice_size(),
                                                             counter_space.bob_size());
  Eigen::MatrixXd out = ca.transpose() * m * cb;
  return out.reshaped<Eigen::RowMajor>().eval();
}

}  // namespace bellkl
