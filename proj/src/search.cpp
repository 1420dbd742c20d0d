#include "bellkl/search.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "bellkl/rng.hpp"

namespace bellkl {

std::string to_string(StateFamily family) {
  return family == StateFamily::kUnbalanced ? "unbalanced" : "pseudo";
}

FockState make_family_state(StateFamily family, double parameter_deg, double phi_deg) {
  return family == StateFamily::kUnbalanced ? build_unbalanced_bell(parameter_deg)
                                            : build_pseudo_bell(parameter_deg, phi_deg);
}

namespace {

struct Scenario {
  FockState state;
  DetectionKind kind;
  OutcomeSpace space;
  StrategySet strategies;

  Scenario(const FockState& s, DetectionKind k)
      : state(s),
        kind(k),
        space(OutcomeSpace::for_state(s, k)),
        strategies(StrategySet::enumerate(space.alice_size(), space.bob_size())) {}

  DetectionModel model(double eta) const { return {kind, eta}; }
};

int angle_dim(bool planar_only) { return planar_only ? 4 : 8; }

SettingQuad quad_from_vector(const Eigen::VectorXd& x, bool planar_only) {
  SettingQuad quad;
  for (int i = 0; i < 4; ++i) {
    quad[i].polar_deg = x[i];
    quad[i].azimuth_deg = planar_only ? 0.0 : x[4 + i];
    quad[i] = wrap_setting(quad[i]);
  }
  return quad;
}

Eigen::VectorXd vector_from_quad(const SettingQuad& quad, bool planar_only) {
  Eigen::VectorXd x(angle_dim(planar_only));
  for (int i = 0; i < 4; ++i) {
    x[i] = quad[i].polar_deg;
    if (!planar_only) x[4 + i] = quad[i].azimuth_deg;
  }
  return x;
}

// Strength of one setting quad with a cheap warm-started EM; the weights of
// the previous solve seed the next one, which is what makes the many nearby
// evaluations of a Nelder-Mead run affordable.
class StrengthEvaluator {
 public:
  StrengthEvaluator(const Scenario& scenario, double eta, const SearchConfig& config)
      : scenario_(scenario), eta_(eta), config_(config) {}

  double operator()(const Eigen::VectorXd& x) {
    ++evaluations_;
    const SettingQuad quad = quad_from_vector(x, config_.planar_only);
    const ExperimentDistribution dist =
        experiment_distribution(scenario_.state, quad, scenario_.model(eta_));
    EmOptions em = config_.search_em;
    em.tol = 1e-18;  // rely on the certified gap inside the search
    em.rel_gap_tol = 0.02;
    if (warm_weights_.size() > 0) em.initial_weights = warm_weights_;
    const EmResult r = em_project(dist, scenario_.strategies, em);
    warm_weights_ = r.model.weights;
    return r.divergence_bits;
  }

  void reset_warm_start() { warm_weights_.resize(0); }
  int evaluations() const { return evaluations_; }

 private:
  const Scenario& scenario_;
  double eta_;
  const SearchConfig& config_;
  Eigen::VectorXd warm_weights_;
  int evaluations_ = 0;
};

struct NmOutcome {
  Eigen::VectorXd x;
  double f = 0.0;
  int evaluations = 0;
};

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5) minimizing f; stops on simplex size or evaluation budget.
NmOutcome nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                      const Eigen::VectorXd& x0, double edge, int max_evals, double x_tol,
                      double f_tol) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  int evals = 0;
  for (int i = 1; i <= n; ++i) xs[i][i - 1] += edge;
  for (int i = 0; i <= n; ++i) fs[i] = (++evals, f(xs[i]));

  std::vector<int> order(n + 1);
  while (true) {
    for (int i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    const int best = order[0], worst = order[n], second_worst = order[n - 1];

    double spread = 0.0;
    for (int i = 0; i <= n; ++i)
      spread = std::max(spread, (xs[i] - xs[best]).cwiseAbs().maxCoeff());
    if (spread < x_tol || fs[worst] - fs[best] < f_tol || evals >= max_evals) {
      return {xs[best], fs[best], evals};
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += xs[i];
    centroid /= n;

    const Eigen::VectorXd reflected = centroid + (centroid - xs[worst]);
    const double f_reflected = (++evals, f(reflected));
    if (f_reflected < fs[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - xs[worst]);
      const double f_expanded = (++evals, f(expanded));
      if (f_expanded < f_reflected) {
        xs[worst] = expanded;
        fs[worst] = f_expanded;
      } else {
        xs[worst] = reflected;
        fs[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < fs[second_worst]) {
      xs[worst] = reflected;
      fs[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < fs[worst];
    Eigen::VectorXd contracted;
    if (outside)
      contracted = centroid + 0.5 * (reflected - centroid);
    else
      contracted = centroid - 0.5 * (centroid - xs[worst]);
    const double f_contracted = (++evals, f(contracted));
    if (f_contracted < (outside ? f_reflected : fs[worst])) {
      xs[worst] = contracted;
      fs[worst] = f_contracted;
      continue;
    }
    for (int i = 0; i <= n; ++i) {  // shrink toward the best vertex
      if (i == best) continue;
      xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
      fs[i] = (++evals, f(xs[i]));
    }
  }
}

SettingQuad random_quad(Rng& rng, bool planar_only) {
  SettingQuad quad;
  for (auto& s : quad) {
    s.polar_deg = rng.uniform(-90.0, 90.0);
    s.azimuth_deg = planar_only ? 0.0 : rng.uniform(0.0, 360.0);
  }
  return quad;
}

// Report-grade strength at fixed settings: cold uniform-start EM.
StrengthResult cold_strength(const Scenario& scenario, const SettingQuad& quad, double eta,
                             const SearchConfig& config) {
  const ExperimentDistribution dist =
      experiment_distribution(scenario.state, quad, scenario.model(eta));
  const EmResult r = em_project(dist, scenario.strategies, config.em);
  StrengthResult out;
  out.raw_strength_bits = r.divergence_bits;
  out.truncated_to_zero = r.divergence_bits < config.truncation_threshold;
  out.strength_bits = out.truncated_to_zero ? 0.0 : r.divergence_bits;
  out.settings = quad;
  out.lr_model = r.model;
  out.iterations = r.iterations;
  out.converged = r.converged;
  return out;
}

// Certified threshold verdict at fixed settings. The per-sweep decrease test
// is disabled: near the boundary EM crawls, and stopping on slow progress
// would misread a slightly-unconverged divergence as strength above the
// threshold. Instead run until [divergence - gap, divergence] clears the
// threshold on one side, or the iteration cap is hit (counted as below).
struct ThresholdVerdict {
  bool above = false;
  bool certified = false;
  double divergence = 0.0;
};

ThresholdVerdict threshold_verdict(const Scenario& scenario, const SettingQuad& quad,
                                   double eta, double threshold, const SearchConfig& config) {
  const ExperimentDistribution dist =
      experiment_distribution(scenario.state, quad, scenario.model(eta));
  EmOptions em;
  em.tol = 1e-18;
  em.max_iter = config.em.max_iter;
  em.decision_threshold = threshold;
  const EmResult r = em_project(dist, scenario.strategies, em);
  ThresholdVerdict v;
  v.divergence = r.divergence_bits;
  v.certified = r.converged;
  v.above = r.converged ? (r.divergence_bits - r.gap_bound_bits > threshold)
                        : false;
  return v;
}

double to_lattice(double eta, double resolution) {
  return std::clamp(std::round(eta / resolution) * resolution, 0.0, 1.0);
}

}  // namespace

OptimizeResult optimize_settings(const FockState& state, const DetectionModel& model,
                                 const SearchConfig& config,
                                 const std::vector<SettingQuad>& warm_starts) {
  if (config.restarts < 1) throw std::invalid_argument("optimize_settings: restarts must be >= 1");
  const Scenario scenario(state, model.kind);

  std::vector<std::pair<SettingQuad, bool>> starts;  // (quad, is_warm)
  for (const auto& quad : warm_starts) starts.emplace_back(quad, true);
  for (int r = 0; r < config.restarts; ++r) {
    Rng rng(Rng::derive_seed(config.seed, static_cast<std::uint64_t>(r)));
    starts.emplace_back(random_quad(rng, config.planar_only), false);
  }

  OptimizeResult result;
  StrengthEvaluator eval(scenario, model.efficiency, config);
  int best_index = -1;
  double best_value = -1.0;
  Eigen::VectorXd best_x;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    eval.reset_warm_start();
    const auto& [quad, warm] = starts[i];
    const double edge = warm ? config.warm_simplex_deg : config.restart_simplex_deg;
    const Eigen::VectorXd x0 = vector_from_quad(quad, config.planar_only);
    const NmOutcome nm = nelder_mead([&eval](const Eigen::VectorXd& x) { return -eval(x); },
                                     x0, edge, config.nm_max_evals, config.angle_tol_deg, 1e-14);
    RestartRecord record;
    record.initial = quad;
    record.final = quad_from_vector(nm.x, config.planar_only);
    record.strength_bits = -nm.f;
    record.evaluations = nm.evaluations;
    record.warm_start = warm;
    result.restarts.push_back(record);
    if (-nm.f > best_value) {
      best_value = -nm.f;
      best_index = static_cast<int>(i);
      best_x = nm.x;
    }
  }
  result.total_evaluations = eval.evaluations();
  (void)best_index;

  const SettingQuad best_quad = quad_from_vector(best_x, config.planar_only);
  result.best = cold_strength(scenario, best_quad, model.efficiency, config);
  return result;
}

namespace {

struct EtaDecision {
  bool feasible = false;
  double divergence = 0.0;
  SettingQuad settings;
};

// Is the optimized strength above `threshold` at this efficiency? Tries the
// warm settings first (enough whenever the answer is yes), then re-optimizes.
EtaDecision decide_at_eta(const Scenario& scenario, double eta, double threshold,
                          const SearchConfig& config, const std::vector<SettingQuad>& warm,
                          int extra_restarts, int* optimizer_calls) {
  EtaDecision decision;
  if (!warm.empty()) {
    const ThresholdVerdict quick = threshold_verdict(scenario, warm.front(), eta, threshold, config);
    if (quick.above) {
      decision.feasible = true;
      decision.divergence = quick.divergence;
      decision.settings = warm.front();
      return decision;
    }
  }
  SearchConfig local = config;
  local.restarts = std::max(extra_restarts, warm.empty() ? config.restarts : 1);
  ++*optimizer_calls;
  const OptimizeResult opt = optimize_settings(scenario.state, scenario.model(eta), local, warm);
  const ThresholdVerdict verdict =
      threshold_verdict(scenario, opt.best.settings, eta, threshold, config);
  decision.feasible = verdict.above;
  decision.divergence = verdict.divergence;
  decision.settings = opt.best.settings;
  return decision;
}

EfficiencyBracket bracket_eta(const Scenario& scenario, double threshold,
                              const SearchConfig& config,
                              const std::vector<SettingQuad>& warm_starts,
                              std::optional<double> eta_start) {
  EfficiencyBracket bracket;
  int optimizer_calls = 0;
  const double res = config.eta_resolution;

  // Establish feasibility at the top of the scan (walking back up to 1 if a
  // warm-started guess turns out infeasible).
  double eta_hi = to_lattice(eta_start.value_or(1.0), res);
  std::vector<SettingQuad> warm = warm_starts;
  EtaDecision top;
  while (true) {
    top = decide_at_eta(scenario, eta_hi, threshold, config, warm, config.restarts,
                        &optimizer_calls);
    if (top.feasible) break;
    if (eta_hi >= 1.0) {
      bracket.feasible = false;
      bracket.optimizer_calls = optimizer_calls;
      return bracket;
    }
    eta_hi = to_lattice(std::min(1.0, eta_hi + config.eta_scan_step), res);
  }
  warm = {top.settings};

  // Downward continuation until the verdict flips.
  double eta_lo = 0.0;
  bool have_lo = false;
  double probe = eta_hi;
  while (probe > 0.0) {
    probe = to_lattice(std::max(0.0, probe - config.eta_scan_step), res);
    const EtaDecision d = decide_at_eta(scenario, probe, threshold, config, warm, 0,
                                        &optimizer_calls);
    if (d.feasible) {
      eta_hi = probe;
      warm = {d.settings};
    } else {
      eta_lo = probe;
      have_lo = true;
      break;
    }
  }
  if (!have_lo) eta_lo = 0.0;  // feasible all the way down

  // Lattice bisection; extra random restarts once the bracket is tight, so
  // a poorly adapted warm start cannot freeze the boundary too high.
  while (eta_hi - eta_lo > res + 0.5 * res) {
    const double mid = to_lattice(0.5 * (eta_hi + eta_lo), res);
    if (mid <= eta_lo || mid >= eta_hi) break;
    const int extras = (eta_hi - eta_lo) <= 8 * res ? 2 : 0;
    const EtaDecision d =
        decide_at_eta(scenario, mid, threshold, config, warm, extras, &optimizer_calls);
    if (d.feasible) {
      eta_hi = mid;
      warm = {d.settings};
    } else {
      eta_lo = mid;
    }
  }

  // Final report-grade pass: cold re-optimization at eta_1; if it fails to
  // confirm feasibility, push the bracket up one step and retry.
  for (int guard = 0; guard < 64; ++guard) {
    ++optimizer_calls;
    const OptimizeResult confirm =
        optimize_settings(scenario.state, scenario.model(eta_hi), config, warm);
    const ThresholdVerdict v =
        threshold_verdict(scenario, confirm.best.settings, eta_hi, threshold, config);
    if (v.above) {
      bracket.feasible = true;
      bracket.eta_1 = eta_hi;
      bracket.s_1 = confirm.best.raw_strength_bits;
      bracket.settings_at_eta1 = confirm.best.settings;
      warm = {confirm.best.settings};
      break;
    }
    eta_lo = eta_hi;
    eta_hi = to_lattice(eta_hi + res, res);
    if (eta_hi > 1.0) {
      bracket.feasible = false;
      bracket.optimizer_calls = optimizer_calls;
      return bracket;
    }
  }

  // And the strength just below: optimized value at eta_2 (may dip under the
  // threshold only slightly). If it is still above, keep walking down.
  for (int guard = 0; guard < 64; ++guard) {
    bracket.eta_2 = to_lattice(bracket.eta_1 - res, res);
    ++optimizer_calls;
    const OptimizeResult below = optimize_settings(
        scenario.state, scenario.model(bracket.eta_2), config, warm);
    const ThresholdVerdict v =
        threshold_verdict(scenario, below.best.settings, bracket.eta_2, threshold, config);
    if (!v.above) {
      bracket.s_2 = below.best.raw_strength_bits;
      break;
    }
    bracket.eta_1 = bracket.eta_2;
    bracket.s_1 = below.best.raw_strength_bits;
    bracket.settings_at_eta1 = below.best.settings;
    warm = {below.best.settings};
  }
  bracket.optimizer_calls = optimizer_calls;
  return bracket;
}

}  // namespace

EfficiencyBracket find_eta_min(const FockState& state, DetectionKind kind,
                               const SearchConfig& config,
                               const std::vector<SettingQuad>& warm_starts,
                               std::optional<double> eta_start) {
  const Scenario scenario(state, kind);
  return bracket_eta(scenario, config.truncation_threshold, config, warm_starts, eta_start);
}

EfficiencyBracket find_eta_for_strength(const FockState& state, DetectionKind kind,
                                        double target_s, const SearchConfig& config,
                                        const std::vector<SettingQuad>& warm_starts) {
  if (!(target_s > 0.0))
    throw std::invalid_argument("find_eta_for_strength: target strength must be positive");
  const Scenario scenario(state, kind);

  // The continuation loop: re-optimize settings at the current efficiency,
  // then lower the efficiency as far as those fixed settings allow, and
  // repeat until the efficiency stops moving.
  int optimizer_calls = 1;
  const OptimizeResult at_unit = optimize_settings(state, {kind, 1.0}, config, warm_starts);
  if (at_unit.best.raw_strength_bits < target_s) {
    EfficiencyBracket infeasible;
    infeasible.feasible = false;
    infeasible.optimizer_calls = optimizer_calls;
    return infeasible;
  }

  const double res = config.eta_resolution;
  double eta_old = 1.0;
  SettingQuad settings = at_unit.best.settings;
  for (int round = 0; round < 256; ++round) {
    // Fixed-settings descent on the efficiency lattice (strength decreases
    // with loss for fixed settings, so bisection applies).
    double lo = eta_old, hi = eta_old;
    while (lo > 0.0) {
      const double next = to_lattice(std::max(0.0, lo - config.eta_scan_step), res);
      const ThresholdVerdict v = threshold_verdict(scenario, settings, next, target_s, config);
      if (v.above) {
        lo = next;
        if (next == 0.0) break;
      } else {
        hi = lo;
        lo = next;
        while (hi - lo > res + 0.5 * res) {
          const double mid = to_lattice(0.5 * (hi + lo), res);
          if (mid <= lo || mid >= hi) break;
          const ThresholdVerdict mv =
              threshold_verdict(scenario, settings, mid, target_s, config);
          (mv.above ? hi : lo) = mid;
        }
        lo = hi;
        break;
      }
    }
    const double eta_new = lo;

    // Re-optimize the settings at the lowered efficiency.
    ++optimizer_calls;
    const OptimizeResult reopt =
        optimize_settings(state, {kind, eta_new}, config, {settings});
    settings = reopt.best.settings;

    if (eta_old - eta_new < res - 0.5 * res) {
      // Stuck: confirm that one more lattice step down really is infeasible
      // even with re-optimized settings; if not, keep going.
      const double probe = to_lattice(eta_new - res, res);
      if (probe <= 0.0) break;
      const EtaDecision d =
          decide_at_eta(scenario, probe, target_s, config, {settings}, 2, &optimizer_calls);
      if (!d.feasible) break;
      settings = d.settings;
      eta_old = probe;
      continue;
    }
    eta_old = eta_new;
  }

  // Delegate the final bracketing (cold confirmation at eta_1, strength at
  // eta_2) to the shared machinery, starting right at the located boundary.
  EfficiencyBracket bracket =
      bracket_eta(scenario, target_s, config, {settings}, eta_old);
  bracket.optimizer_calls += optimizer_calls;
  return bracket;
}

std::vector<TraceRow> trace_curve(StateFamily family, DetectionKind kind,
                                  const std::vector<double>& grid, double target_s,
                                  const SearchConfig& config) {
  if (target_s < 0.0) throw std::invalid_argument("trace_curve: target strength must be >= 0");
  std::vector<TraceRow> rows;
  rows.reserve(grid.size());
  std::vector<SettingQuad> warm;
  std::optional<double> eta_hint;

  for (const double parameter : grid) {
    const FockState state = make_family_state(family, parameter);
    EfficiencyBracket bracket;
    if (target_s > 0.0) {
      bracket = find_eta_for_strength(state, kind, target_s, config, warm);
    } else {
      std::optional<double> start;
      if (eta_hint)
        start = std::min(1.0, *eta_hint + 4 * config.eta_scan_step);
      bracket = find_eta_min(state, kind, config, warm, start);
    }

    TraceRow row;
    row.parameter = parameter;
    row.target_s = target_s;
    row.feasible = bracket.feasible;
    if (bracket.feasible) {
      row.settings = canonicalize_settings(bracket.settings_at_eta1, state,
                                           {kind, bracket.eta_1});
      row.eta_1 = bracket.eta_1;
      row.eta_2 = bracket.eta_2;
      row.s_1 = bracket.s_1;
      // In minimum-efficiency traces the below-threshold strength is
      // truncated to zero, matching how such tables are reported.
      row.s_2 = (target_s == 0.0 && bracket.s_2 < config.truncation_threshold) ? 0.0
                                                                               : bracket.s_2;
      warm = {bracket.settings_at_eta1};
      eta_hint = bracket.eta_1;
    } else {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.eta_1 = row.eta_2 = row.s_1 = row.s_2 = nan;
    }
    rows.push_back(row);
  }
  return rows;
}

SettingQuad canonicalize_settings(const SettingQuad& settings, const FockState& state,
                                  const DetectionModel& model) {
  SettingQuad folded;
  for (int i = 0; i < 4; ++i) {
    MeasurementSetting s = wrap_setting(settings[i]);
    // |polar| > 90 describes the same analysis with the ports exchanged.
    if (s.polar_deg > 90.0)
      s.polar_deg -= 180.0;
    else if (s.polar_deg < -90.0)
      s.polar_deg += 180.0;
    folded[i] = s;
  }
  if (folded[0].polar_deg >= 0.0) return folded;

  SettingQuad flipped = folded;
  for (auto& s : flipped) s.polar_deg = -s.polar_deg;
  // Accept the sign flip only if it provably leaves the outcome table
  // unchanged for this state (true for unbalanced Bell states; checked
  // rather than assumed for the rest).
  const ExperimentDistribution a = experiment_distribution(state, folded, model);
  const ExperimentDistribution b = experiment_distribution(state, flipped, model);
  if ((a.table - b.table).cwiseAbs().maxCoeff() < 1e-12) return flipped;
  return folded;
}

}  // namespace bellkl
