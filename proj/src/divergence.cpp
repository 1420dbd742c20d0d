#include "bellkl/divergence.hpp"

#include <cmath>
#include <vector>

namespace bellkl {

namespace {
// Rounding slack for the per-sweep monotonicity check.
constexpr double kMonotoneSlack = 1e-12;
}  // namespace

EmResult em_project(const ExperimentDistribution& q, const StrategySet& strategies,
                    const EmOptions& options) {
  const int n_settings = q.setting_count();
  const int n_outcomes = q.outcome_count();
  const int n_cells = n_settings * n_outcomes;
  const int n_strategies = strategies.size();
  if (n_settings != 4)
    throw std::invalid_argument("em_project: expected the four CHSH setting pairs");
  if (strategies.alice_outcomes * strategies.bob_outcomes != n_outcomes)
    throw std::invalid_argument("em_project: strategy outcomes do not match the table");
  if (!(options.tol > 0.0)) throw std::invalid_argument("em_project: tol must be positive");

  // Flattened joint table, cell = k * L + l, and per-strategy flat cells.
  Eigen::VectorXd qf(n_cells);
  for (int k = 0; k < n_settings; ++k)
    qf.segment(k * n_outcomes, n_outcomes) = q.table.row(k);
  std::vector<std::int32_t> flat(static_cast<std::size_t>(n_strategies) * 4);
  for (int s = 0; s < n_strategies; ++s)
    for (int k = 0; k < 4; ++k)
      flat[4 * s + k] = static_cast<std::int32_t>(k * n_outcomes + strategies.cells[s][k]);

  std::vector<int> support;
  support.reserve(n_cells);
  Eigen::VectorXd q_log2(n_cells);
  for (int c = 0; c < n_cells; ++c)
    if (qf[c] > 0.0) {
      support.push_back(c);
      q_log2[c] = std::log2(qf[c]);
    }
  Eigen::Vector4d log2_pi;
  for (int k = 0; k < 4; ++k)
    log2_pi[k] = q.setting_probs[k] > 0.0 ? std::log2(q.setting_probs[k]) : 0.0;

  Eigen::VectorXd w;
  if (options.initial_weights) {
    if (options.initial_weights->size() != n_strategies)
      throw std::invalid_argument("em_project: initial weights size mismatch");
    // Floor so no strategy is permanently locked out of the support.
    w = options.initial_weights->cwiseMax(1e-8 / n_strategies);
    w /= w.sum();
  } else {
    w = Eigen::VectorXd::Constant(n_strategies, 1.0 / n_strategies);
  }

  Eigen::VectorXd ptilde(n_cells), ratio(n_cells), gains(n_strategies);
  ratio.setZero();

  EmResult result;
  double prev_divergence = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (;; ++iter) {
    ptilde.setZero();
    {
      const double* wd = w.data();
      double* pd = ptilde.data();
      for (int s = 0; s < n_strategies; ++s) {
        const std::int32_t* c = &flat[4 * s];
        const double ws = wd[s];
        pd[c[0]] += ws;
        pd[c[1]] += ws;
        pd[c[2]] += ws;
        pd[c[3]] += ws;
      }
    }

    double divergence = 0.0;
    for (const int c : support) {
      ratio[c] = qf[c] / ptilde[c];
      divergence += qf[c] * (q_log2[c] - log2_pi[c / n_outcomes] - std::log2(ptilde[c]));
    }

    double max_gain = 0.0;
    {
      const double* rd = ratio.data();
      double* gd = gains.data();
      for (int s = 0; s < n_strategies; ++s) {
        const std::int32_t* c = &flat[4 * s];
        const double g = rd[c[0]] + rd[c[1]] + rd[c[2]] + rd[c[3]];
        gd[s] = g;
        if (g > max_gain) max_gain = g;
      }
    }
    const double gap = std::log2(std::max(max_gain, 1.0));

    if (divergence > prev_divergence + kMonotoneSlack) result.monotone = false;

    bool stop = false;
    bool converged = false;
    if (options.decision_threshold &&
        (divergence - gap > *options.decision_threshold ||
         divergence < *options.decision_threshold)) {
      stop = converged = true;
    } else if (options.gap_tol > 0.0 && gap < options.gap_tol) {
      stop = converged = true;
    } else if (options.rel_gap_tol > 0.0 && gap < options.rel_gap_tol * divergence) {
      stop = converged = true;
    } else if (iter > 0 && prev_divergence - divergence < options.tol) {
      stop = converged = true;
    } else if (iter >= options.max_iter) {
      stop = true;
    }

    if (stop) {
      result.divergence_bits = divergence;
      result.gap_bound_bits = gap;
      result.iterations = iter;
      result.converged = converged;
      result.model.weights = w;
      result.model.prediction.resize(n_settings, n_outcomes);
      for (int k = 0; k < n_settings; ++k)
        result.model.prediction.row(k) =
            q.setting_probs[k] * ptilde.segment(k * n_outcomes, n_outcomes).transpose();
      return result;
    }

    prev_divergence = divergence;
    w.array() *= gains.array();
    w /= w.sum();
  }
}

StrengthResult strength_given_settings(const FockState& state, const SettingQuad& settings,
                                       const DetectionModel& model,
                                       double truncation_threshold, const EmOptions& em) {
  const ExperimentDistribution dist = experiment_distribution(state, settings, model);
  const StrategySet strategies =
      StrategySet::enumerate(dist.space.alice_size(), dist.space.bob_size());
  const EmResult projected = em_project(dist, strategies, em);

  StrengthResult result;
  result.raw_strength_bits = projected.divergence_bits;
  result.truncated_to_zero = projected.divergence_bits < truncation_threshold;
  result.strength_bits = result.truncated_to_zero ? 0.0 : projected.divergence_bits;
  result.settings = settings;
  result.lr_model = projected.model;
  result.iterations = projected.iterations;
  result.converged = projected.converged;
  return result;
}

double pvalue_bound(double strength_bits, double n_trials) {
  if (strength_bits < 0.0) throw std::domain_error("pvalue_bound: strength must be >= 0");
  if (n_trials < 0.0) throw std::domain_error("pvalue_bound: trial count must be >= 0");
  return std::exp2(-n_trials * strength_bits);
}

}  // namespace bellkl
