// Acceptance suite: end-to-end checks of the published anchor values and the
// oracle cross-validations, one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "bellkl/report.hpp"
#include "bellkl/rng.hpp"
#include "bellkl/search.hpp"
#include "bellkl/simulate.hpp"
#include "support/fock_oracle.hpp"
#include "support/pg_oracle.hpp"
#include "support/scenarios.hpp"

using namespace bellkl;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& note) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += note;
    }
  }
  void info(const std::string& note) {
    if (!detail.empty()) detail += "; ";
    detail += note;
  }
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

bool em_monotone_everywhere = true;

void record_em(const EmResult& r) {
  em_monotone_everywhere = em_monotone_everywhere && r.monotone;
}

// --- criterion 1: Bell-state minimum efficiency --------------------------

Outcome criterion1_bell_state_boundary() {
  Outcome out;
  SearchConfig config;
  const EfficiencyBracket bracket =
      find_eta_min(build_unbalanced_bell(45.0), DetectionKind::kCounter, config);
  out.require(bracket.feasible, "no boundary found");
  if (bracket.feasible) {
    out.require(bracket.eta_1 >= 0.8275 && bracket.eta_1 <= 0.8295,
                fmt("eta_min %.4f outside [0.8275, 0.8295]", bracket.eta_1));
    out.require(bracket.eta_1 - bracket.eta_2 <= config.eta_resolution + 1e-12,
                "bracket wider than the efficiency resolution");
    // bracket validity, recomputed from scratch
    const OptimizeResult cold1 = optimize_settings(
        build_unbalanced_bell(45.0), {DetectionKind::kCounter, bracket.eta_1}, config);
    out.require(cold1.best.raw_strength_bits > config.truncation_threshold,
                "cold re-optimization at eta_1 lost the strength");
    out.info(fmt("eta_min = %.4f (bracket %.4f/%.4f)", bracket.eta_1, bracket.eta_1,
                 bracket.eta_2));
    // boundary symmetry alpha_i = -beta_i
    const SettingQuad s =
        canonicalize_settings(bracket.settings_at_eta1, build_unbalanced_bell(45.0),
                              {DetectionKind::kCounter, bracket.eta_1});
    out.require(std::abs(s[0].polar_deg + s[2].polar_deg) < 2 * 0.25 &&
                    std::abs(s[1].polar_deg + s[3].polar_deg) < 2 * 0.25,
                "boundary settings break the alpha = -beta symmetry");
  }
  return out;
}

// --- criterion 2: full unbalanced-Bell table ------------------------------

Outcome criterion2_table_one() {
  Outcome out;
  SearchConfig config;
  const std::vector<double> grid = {45, 40, 35, 30, 25, 20, 15, 10, 5, 4, 3, 2, 1};
  const std::vector<TraceRow> rows =
      trace_curve(StateFamily::kUnbalanced, DetectionKind::kCounter, grid, 0.0, config);

  const auto eta_at = [&](double theta) {
    for (const TraceRow& row : rows)
      if (row.parameter == theta) return row.eta_1;
    return -1.0;
  };
  const struct {
    double theta, eta;
  } anchors[] = {{30, 0.7650}, {10, 0.6953}, {1, 0.6706}};
  for (const auto& a : anchors) {
    const double eta = eta_at(a.theta);
    out.require(std::abs(eta - a.eta) <= 0.003,
                fmt("theta %.0f: eta_min %.4f vs %.4f", a.theta, eta, a.eta));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.require(rows[i].feasible, fmt("theta %.0f infeasible", rows[i].parameter));
    if (i > 0)
      out.require(rows[i].eta_1 <= rows[i - 1].eta_1 + 1e-12,
                  fmt("monotone trend broken at theta %.0f", rows[i].parameter));
  }
  out.require(rows.back().eta_1 > 2.0 / 3.0, "limit undercuts 2/3");
  out.info(fmt("eta_min(45)=%.4f .. eta_min(1)=%.4f", rows.front().eta_1,
               rows.back().eta_1));
  return out;
}

// --- criterion 3: pseudo-Bell table, counters vs detectors ----------------

Outcome criterion3_table_two() {
  Outcome out;
  SearchConfig config;
  const std::vector<double> grid = {45, 40, 35, 30, 25, 20, 15, 10, 5};
  const std::vector<TraceRow> counters =
      trace_curve(StateFamily::kPseudo, DetectionKind::kCounter, grid, 0.0, config);
  const std::vector<TraceRow> detectors =
      trace_curve(StateFamily::kPseudo, DetectionKind::kDetector, grid, 0.0, config);

  int counter_argmin = 0, detector_argmin = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.require(counters[i].feasible && detectors[i].feasible,
                fmt("gamma %.0f infeasible", grid[i]));
    if (counters[i].eta_1 < counters[counter_argmin].eta_1)
      counter_argmin = static_cast<int>(i);
    if (detectors[i].eta_1 < detectors[detector_argmin].eta_1)
      detector_argmin = static_cast<int>(i);
    out.require(counters[i].eta_1 <= detectors[i].eta_1 + 1e-12,
                fmt("counter advantage lost at gamma %.0f", grid[i]));
  }
  out.require(grid[counter_argmin] == 40.0,
              fmt("counter minimum at gamma %.0f, expected 40", grid[counter_argmin]));
  out.require(std::abs(counters[counter_argmin].eta_1 - 0.8971) <= 0.003,
              fmt("counter minimum %.4f vs 0.8971", counters[counter_argmin].eta_1));
  out.require(grid[detector_argmin] == 35.0,
              fmt("detector minimum at gamma %.0f, expected 35", grid[detector_argmin]));
  out.require(std::abs(detectors[detector_argmin].eta_1 - 0.9111) <= 0.003,
              fmt("detector minimum %.4f vs 0.9111", detectors[detector_argmin].eta_1));
  out.info(fmt("counter min %.4f @40, detector min %.4f @35",
               counters[counter_argmin].eta_1, detectors[detector_argmin].eta_1));
  return out;
}

// --- criterion 4: strength anchors at unit efficiency ---------------------

Outcome criterion4_strength_anchors() {
  Outcome out;
  SearchConfig config;
  const OptimizeResult bell =
      optimize_settings(build_unbalanced_bell(45.0), {DetectionKind::kCounter, 1.0}, config);
  out.require(std::abs(bell.best.strength_bits - 0.04627) <= 1e-4,
              fmt("S(uB 45) = %.6f vs 0.04627", bell.best.strength_bits));
  const OptimizeResult pseudo = optimize_settings(build_pseudo_bell(45.0, 0.0),
                                                  {DetectionKind::kCounter, 1.0}, config);
  out.require(std::abs(pseudo.best.strength_bits - 0.5 * bell.best.strength_bits) <= 1e-4,
              fmt("S(pB 45) = %.6f vs half of %.6f", pseudo.best.strength_bits,
                  bell.best.strength_bits));
  out.info(fmt("S1 = %.6f, S2 = %.6f", bell.best.strength_bits, pseudo.best.strength_bits));
  return out;
}

// --- criterion 5: feasibility edge of the strength target -----------------

Outcome criterion5_feasibility_edge() {
  Outcome out;
  SearchConfig config;
  const EfficiencyBracket below = find_eta_for_strength(
      build_unbalanced_bell(0.9), DetectionKind::kDetector, 1e-4, config);
  out.require(!below.feasible, "theta 0.9 should not reach S = 1e-4");
  const EfficiencyBracket above = find_eta_for_strength(
      build_unbalanced_bell(1.1), DetectionKind::kDetector, 1e-4, config);
  out.require(above.feasible, "theta 1.1 should reach S = 1e-4");
  if (above.feasible) {
    out.require(above.eta_1 <= 1.0, "eta above 1");
    out.require(above.s_1 >= 1e-4 - config.strength_tol_bits, "S_1 below the target");
    out.require(above.s_2 <= 1e-4 + config.strength_tol_bits, "S_2 above the target");
    out.info(fmt("eta_c(theta=1.1) = %.4f", above.eta_1));
  }
  return out;
}

// --- criterion 6: oracle and property suites ------------------------------

Outcome criterion6_oracles() {
  Outcome out;

  // EM vs projected gradient on 50 randomized small scenarios
  {
    Rng rng(0xACCE55);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int da = 2 + static_cast<int>(rng.next_u64() % 2);
      const int db = 2 + static_cast<int>(rng.next_u64() % 2);
      const StrategySet strategies = StrategySet::enumerate(da, db);
      ExperimentDistribution q;
      if (trial % 3 == 0) {
        q = testing::random_lr_table(rng, strategies, da * db);
      } else {
        q = testing::random_table(rng, da, db);
      }
      EmOptions options;
      options.gap_tol = 1e-12;
      options.tol = 1e-15;
      const EmResult em = em_project(q, strategies, options);
      record_em(em);
      const testing::PgResult pg = testing::pg_project(q, strategies);
      worst = std::max(worst, std::abs(em.divergence_bits - pg.divergence_bits));
    }
    out.require(worst < 1e-6, fmt("EM vs projected gradient deviate by %.2e", worst));
    out.info(fmt("max EM-PG gap %.2e", worst));
  }

  // photonic model vs dense Fock oracle on 100 draws
  {
    Rng rng(0xF0C5);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const FockState state = testing::random_state(rng);
      const MeasurementSetting a = testing::random_setting(rng);
      const MeasurementSetting b = testing::random_setting(rng);
      const OutcomeSpace space = OutcomeSpace::for_state(
          state, trial % 2 == 0 ? DetectionKind::kCounter : DetectionKind::kDetector);
      const Eigen::VectorXd lib = ideal_outcome_distribution(state, a, b, space);
      const Eigen::VectorXd oracle =
          testing::oracle_outcome_distribution(state, a, b, space);
      worst = std::max(worst, (lib - oracle).cwiseAbs().maxCoeff());
    }
    out.require(worst < 1e-10, fmt("photonic model vs Fock oracle deviate by %.2e", worst));
    out.info(fmt("max Fock-oracle gap %.2e", worst));
  }

  // loss monotonicity of the strength on a 5 x 5 (state, eta) grid
  {
    const std::vector<FockState> states = {
        build_unbalanced_bell(45.0), build_unbalanced_bell(30.0), build_unbalanced_bell(15.0),
        build_pseudo_bell(45.0, 0.0), build_pseudo_bell(30.0, 0.0)};
    SearchConfig config;
    config.restarts = 4;
    for (const FockState& state : states) {
      const OptimizeResult opt =
          optimize_settings(state, {DetectionKind::kCounter, 1.0}, config);
      double previous = std::numeric_limits<double>::infinity();
      for (const double eta : {1.0, 0.95, 0.9, 0.85, 0.8}) {
        EmOptions options;
        options.gap_tol = 1e-12;
        options.tol = 1e-15;
        const StrengthResult r =
            strength_given_settings(state, opt.best.settings,
                                    {DetectionKind::kCounter, eta},
                                    kDefaultTruncationThreshold, options);
        out.require(r.raw_strength_bits <= previous + 1e-9,
                    fmt("strength rose when eta dropped to %.2f", eta));
        previous = r.raw_strength_bits;
      }
    }
  }

  // counters equal detectors on unbalanced Bell states, exactly
  {
    Rng rng(0xC0DE);
    for (int trial = 0; trial < 10; ++trial) {
      const FockState state = build_unbalanced_bell(rng.uniform(0.5, 45.0));
      const SettingQuad quad = testing::random_quad(rng);
      const double eta = rng.uniform();
      const ExperimentDistribution counter =
          experiment_distribution(state, quad, {DetectionKind::kCounter, eta});
      const ExperimentDistribution detector =
          experiment_distribution(state, quad, {DetectionKind::kDetector, eta});
      out.require((counter.table - detector.table).cwiseAbs().maxCoeff() == 0.0,
                  "counter/detector tables differ on an unbalanced Bell state");
    }
  }

  out.require(em_monotone_everywhere, "an EM run lost monotonicity");
  return out;
}

// --- criterion 7: Monte-Carlo consistency ----------------------------------

Outcome criterion7_monte_carlo() {
  Outcome out;
  const SettingQuad quad = {{{22.5, 0.0}, {-67.5, 0.0}, {-22.5, 0.0}, {67.5, 0.0}}};
  const ExperimentDistribution q = experiment_distribution(
      build_unbalanced_bell(45.0), quad, {DetectionKind::kCounter, 1.0});
  const StrategySet strategies =
      StrategySet::enumerate(q.space.alice_size(), q.space.bob_size());
  EmOptions options;
  options.gap_tol = 1e-13;
  options.tol = 1e-15;
  const EmResult projected = em_project(q, strategies, options);
  record_em(projected);

  const std::int64_t n = 1'000'000;
  const TrialStats stats = simulate_trials(q, projected.model.prediction, n, 2012);
  out.require(stats.n_infinite == 0, "trials landed outside the LR support");
  out.require(std::abs(stats.mean_llr_bits - projected.divergence_bits) <=
                  3.0 * stats.stderr_bits,
              fmt("mean LLR %.6f vs S %.6f beyond 3 sigma", stats.mean_llr_bits,
                  projected.divergence_bits));

  // the empirical p-value exponent (per trial) is the mean LLR; it must match
  // the leading-order law p_N = 2^(-N S)
  const double exponent = -std::log2(pvalue_bound(stats.mean_llr_bits, double(n))) / double(n);
  out.require(std::abs(exponent - projected.divergence_bits) <= 3.0 * stats.stderr_bits,
              "p-value exponent inconsistent with the divergence");
  out.info(fmt("mean %.6f vs S %.6f (stderr %.1e)", stats.mean_llr_bits,
               projected.divergence_bits, stats.stderr_bits));
  return out;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const Entry entries[] = {
      {1, "Bell-state minimum efficiency in [0.8275, 0.8295]", criterion1_bell_state_boundary},
      {2, "unbalanced-Bell table spot rows and monotone trend", criterion2_table_one},
      {3, "pseudo-Bell table minima and counter advantage", criterion3_table_two},
      {4, "strength anchors 0.04627 and the one-half ratio", criterion4_strength_anchors},
      {5, "strength-target feasibility edge near theta = 1 degree",
       criterion5_feasibility_edge},
      {6, "oracle suites: EM vs projected gradient, Fock oracle, monotonicity",
       criterion6_oracles},
      {7, "Monte-Carlo log-likelihood ratio matches the divergence",
       criterion7_monte_carlo},
  };

  int failures = 0;
  for (const Entry& entry : entries) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d: %s (%.1fs)%s%s\n", outcome.pass ? "PASS" : "FAIL",
                entry.id, entry.name, seconds, outcome.detail.empty() ? "" : " -- ",
                outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
