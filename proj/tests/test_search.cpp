#include <doctest.h>

#include "bellkl/search.hpp"

using namespace bellkl;

namespace {

SearchConfig quick_config() {
  SearchConfig config;
  config.restarts = 3;
  config.nm_max_evals = 300;
  return config;
}

}  // namespace

TEST_CASE("settings optimization recovers the Bell-state strength") {
  const SearchConfig config = quick_config();
  const OptimizeResult r =
      optimize_settings(build_unbalanced_bell(45.0), {DetectionKind::kCounter, 1.0}, config);
  CHECK(r.best.strength_bits == doctest::Approx(0.04627).epsilon(2e-4));
  CHECK(r.restarts.size() == 3);
  CHECK(r.best.converged);

  SUBCASE("identical configuration reproduces identical results") {
    const OptimizeResult again = optimize_settings(build_unbalanced_bell(45.0),
                                                   {DetectionKind::kCounter, 1.0}, config);
    CHECK(again.best.strength_bits == r.best.strength_bits);
    for (int i = 0; i < 4; ++i)
      CHECK(again.best.settings[i].polar_deg == r.best.settings[i].polar_deg);
  }
  SUBCASE("doubling restarts moves the reported strength only within tolerance") {
    SearchConfig more = config;
    more.restarts = 6;
    const OptimizeResult wide = optimize_settings(build_unbalanced_bell(45.0),
                                                  {DetectionKind::kCounter, 1.0}, more);
    CHECK(std::abs(wide.best.strength_bits - r.best.strength_bits) <
          config.strength_tol_bits);
  }
}

TEST_CASE("warm starts are honoured and searched first") {
  const SettingQuad table_one = {{{22.5, 0.0}, {-67.5, 0.0}, {-22.5, 0.0}, {67.5, 0.0}}};
  SearchConfig config = quick_config();
  config.restarts = 1;
  const OptimizeResult r = optimize_settings(
      build_unbalanced_bell(45.0), {DetectionKind::kCounter, 1.0}, config, {table_one});
  CHECK(r.restarts.size() == 2);
  CHECK(r.restarts.front().warm_start);
  CHECK(r.best.strength_bits == doctest::Approx(0.04627).epsilon(2e-4));
}

TEST_CASE("strength decreases with loss at fixed settings") {
  const SettingQuad quad = {{{22.5, 0.0}, {-67.5, 0.0}, {-22.5, 0.0}, {67.5, 0.0}}};
  const FockState state = build_unbalanced_bell(45.0);
  double previous = std::numeric_limits<double>::infinity();
  for (const double eta : {1.0, 0.95, 0.9, 0.85}) {
    EmOptions options;
    options.gap_tol = 1e-12;
    options.tol = 1e-15;
    const StrengthResult r = strength_given_settings(
        state, quad, {DetectionKind::kCounter, eta}, kDefaultTruncationThreshold, options);
    CHECK(r.raw_strength_bits <= previous + 1e-9);
    previous = r.raw_strength_bits;
  }
}

TEST_CASE("canonical settings put A1 at a nonnegative polar angle") {
  const FockState state = build_unbalanced_bell(45.0);
  const DetectionModel model{DetectionKind::kCounter, 1.0};
  const SettingQuad raw = {{{-22.5, 0.0}, {67.5, 0.0}, {22.5, 0.0}, {-67.5, 0.0}}};
  const SettingQuad canonical = canonicalize_settings(raw, state, model);
  CHECK(canonical[0].polar_deg >= 0.0);
  // symmetry used for the flip: verified table equality
  const ExperimentDistribution a = experiment_distribution(state, raw, model);
  const ExperimentDistribution b = experiment_distribution(state, canonical, model);
  CHECK((a.table - b.table).cwiseAbs().maxCoeff() < 1e-12);

  // folding out-of-range polars relabels ports but keeps values in range
  const SettingQuad wide = {{{150.0, 0.0}, {-120.0, 0.0}, {10.0, 0.0}, {20.0, 0.0}}};
  const SettingQuad folded = canonicalize_settings(wide, state, model);
  for (const auto& s : folded) CHECK(std::abs(s.polar_deg) <= 90.0);
}

TEST_CASE("minimum efficiency for the Bell state brackets the known boundary") {
  // coarse resolution keeps this in the unit suite; the acceptance suite
  // runs the full-resolution version
  SearchConfig config = quick_config();
  config.eta_resolution = 1e-3;
  const EfficiencyBracket bracket =
      find_eta_min(build_unbalanced_bell(45.0), DetectionKind::kCounter, config);
  REQUIRE(bracket.feasible);
  CHECK(bracket.eta_1 >= 0.827);
  CHECK(bracket.eta_1 <= 0.830);
  CHECK(bracket.eta_1 - bracket.eta_2 <= config.eta_resolution + 1e-12);
  CHECK(bracket.s_1 > config.truncation_threshold);
  CHECK(bracket.s_2 < config.truncation_threshold);

  // boundary symmetry: alpha_i ~ -beta_i at the S -> 0 optimum
  const SettingQuad s = canonicalize_settings(
      bracket.settings_at_eta1, build_unbalanced_bell(45.0),
      {DetectionKind::kCounter, bracket.eta_1});
  CHECK(std::abs(s[0].polar_deg + s[2].polar_deg) < 0.5);
  CHECK(std::abs(s[1].polar_deg + s[3].polar_deg) < 0.5);
}

TEST_CASE("a single-point trace equals the single call") {
  SearchConfig config = quick_config();
  config.eta_resolution = 1e-3;
  const std::vector<TraceRow> rows =
      trace_curve(StateFamily::kUnbalanced, DetectionKind::kCounter, {45.0}, 0.0, config);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].feasible);
  const EfficiencyBracket direct =
      find_eta_min(build_unbalanced_bell(45.0), DetectionKind::kCounter, config);
  CHECK(rows[0].eta_1 == direct.eta_1);
  CHECK(rows[0].eta_2 == direct.eta_2);
  CHECK(rows[0].s_1 == direct.s_1);
  CHECK(rows[0].s_2 == 0.0);  // below threshold, truncated in the trace row
}

TEST_CASE("family helpers") {
  CHECK(to_string(StateFamily::kUnbalanced) == "unbalanced");
  CHECK(to_string(StateFamily::kPseudo) == "pseudo");
  CHECK(make_family_state(StateFamily::kUnbalanced, 45.0).max_photons_alice() == 1);
  CHECK(make_family_state(StateFamily::kPseudo, 45.0).max_photons_alice() == 2);
}
