// bellkl: statistical strength of photon-pair tests of local realism.
//
// Computes the Kullback-Leibler divergence from quantum predictions to the
// closest local-realistic model, optimizes it over measurement settings, and
// traces the detection efficiencies needed to keep it above a target.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bellkl/config.hpp"
#include "bellkl/report.hpp"
#include "bellkl/simulate.hpp"
#include "bellkl/version.hpp"

namespace {

using namespace bellkl;

std::string describe_settings(const SettingQuad& quad) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "A1 = %.4f  A2 = %.4f  B1 = %.4f  B2 = %.4f",
                quad[0].polar_deg, quad[1].polar_deg, quad[2].polar_deg, quad[3].polar_deg);
  return buf;
}

void deliver(const RunConfig& config, const std::string& text) {
  if (config.out_path.empty()) {
    std::cout << text;
  } else {
    atomic_write(config.out_path, text);
    std::cout << "wrote " << config.out_path << "\n";
  }
}

TraceRow row_from_bracket(const RunConfig& config, const EfficiencyBracket& bracket,
                          double target_s) {
  TraceRow row;
  row.parameter = config.parameter_deg();
  row.target_s = target_s;
  row.feasible = bracket.feasible;
  if (bracket.feasible) {
    row.settings = canonicalize_settings(bracket.settings_at_eta1, config.state(),
                                         {config.kind, bracket.eta_1});
    row.eta_1 = bracket.eta_1;
    row.eta_2 = bracket.eta_2;
    row.s_1 = bracket.s_1;
    row.s_2 = (target_s == 0.0 && bracket.s_2 < config.search.truncation_threshold)
                  ? 0.0
                  : bracket.s_2;
  } else {
    row.eta_1 = row.eta_2 = row.s_1 = row.s_2 = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

std::string render_rows(const RunConfig& config, const std::vector<TraceRow>& rows) {
  const std::string hash = fnv1a_hex(dump_config(config));
  if (config.format == OutputFormat::kDelimitedValues)
    return format_plot_data(rows, config.resolved_family(), config.kind, hash);
  std::string text = format_appendix_table(rows, config.resolved_family());
  text += "# config " + hash + "\n";
  return text;
}

int run_strength(const RunConfig& config) {
  const StrengthResult r = strength_given_settings(
      config.state(), config.setting_quad(), {config.kind, config.eta},
      config.search.truncation_threshold, config.search.em);
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "S = %.6e bits\nraw = %.6e bits\ntruncated_to_zero = %s\n"
                "em_iterations = %d\nconverged = %s\n",
                r.strength_bits, r.raw_strength_bits, r.truncated_to_zero ? "true" : "false",
                r.iterations, r.converged ? "true" : "false");
  out << buf << describe_settings(r.settings) << "\n";
  deliver(config, out.str());
  return 0;
}

int run_optimize(const RunConfig& config) {
  const OptimizeResult r =
      optimize_settings(config.state(), {config.kind, config.eta}, config.search);
  const SettingQuad canonical = canonicalize_settings(r.best.settings, config.state(),
                                                      {config.kind, config.eta});
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "S = %.6e bits\ntruncated_to_zero = %s\nevaluations = %d\n",
                r.best.strength_bits, r.best.truncated_to_zero ? "true" : "false",
                r.total_evaluations);
  out << buf << describe_settings(canonical) << "\n";
  out << "restarts:\n";
  for (std::size_t i = 0; i < r.restarts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "  %2zu%s S = %.6e  %s\n", i,
                  r.restarts[i].warm_start ? " (warm)" : "", r.restarts[i].strength_bits,
                  describe_settings(r.restarts[i].final).c_str());
    out << buf;
  }
  deliver(config, out.str());
  return 0;
}

int run_eta_min(const RunConfig& config) {
  const EfficiencyBracket bracket =
      find_eta_min(config.state(), config.kind, config.search);
  if (!bracket.feasible) {
    std::cout << "no detection-loophole-free test found (strength 0 even at eta = 1)\n";
    return 0;
  }
  const TraceRow row = row_from_bracket(config, bracket, 0.0);
  deliver(config, render_rows(config, {row}));
  char buf[128];
  std::snprintf(buf, sizeof buf, "eta_min = %.4f (bracket %.4f / %.4f)\n", bracket.eta_1,
                bracket.eta_1, bracket.eta_2);
  std::cout << buf;
  return 0;
}

int run_eta_for_strength(const RunConfig& config) {
  const EfficiencyBracket bracket =
      find_eta_for_strength(config.state(), config.kind, config.target_s, config.search);
  if (!bracket.feasible) {
    std::cout << "infeasible: target strength not reachable at eta = 1 for this state\n";
    return 0;
  }
  const TraceRow row = row_from_bracket(config, bracket, config.target_s);
  deliver(config, render_rows(config, {row}));
  char buf[128];
  std::snprintf(buf, sizeof buf, "eta_c = %.4f (bracket %.4f / %.4f)\n", bracket.eta_1,
                bracket.eta_1, bracket.eta_2);
  std::cout << buf;
  return 0;
}

int run_trace(const RunConfig& config) {
  const std::vector<TraceRow> rows = trace_curve(config.resolved_family(), config.kind,
                                                 config.grid, config.target_s, config.search);
  deliver(config, render_rows(config, rows));
  return 0;
}

int run_simulate(const RunConfig& config) {
  SettingQuad quad;
  if (config.angles_deg) {
    quad = config.setting_quad();
  } else {
    quad = optimize_settings(config.state(), {config.kind, config.eta}, config.search)
               .best.settings;
  }
  const ExperimentDistribution q =
      experiment_distribution(config.state(), quad, {config.kind, config.eta});
  const StrategySet strategies =
      StrategySet::enumerate(q.space.alice_size(), q.space.bob_size());
  const EmResult projected = em_project(q, strategies, config.search.em);
  const TrialStats stats =
      simulate_trials(q, projected.model.prediction, config.trials, config.search.seed);
  std::ostringstream out;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "trials = %lld\nD_KL = %.6e bits\nmean_llr = %.6e bits\nstderr = %.3e bits\n"
                "pvalue_exponent_per_trial = %.6e\npvalue_bound(N) = %.6e\n",
                static_cast<long long>(stats.n_trials), projected.divergence_bits,
                stats.mean_llr_bits, stats.stderr_bits, stats.mean_llr_bits,
                pvalue_bound(projected.divergence_bits, double(stats.n_trials)));
  out << buf << describe_settings(quad) << "\n";
  deliver(config, out.str());
  return 0;
}

int run_chsh(const RunConfig& config) {
  const ExperimentDistribution dist = experiment_distribution(
      config.state(), config.setting_quad(), {config.kind, config.eta});
  char buf[64];
  std::snprintf(buf, sizeof buf, "CHSH = %.9f\n", chsh_value(dist));
  std::cout << buf;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical strength of photon-pair tests of local realism"};
  app.set_version_flag("--version", bellkl::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  bool dump_effective = false;
  RunConfig config;

  // Flag presence is tracked so that flags override file values.
  struct Flags {
    std::string family, kind, format, out;
    double theta = 0, gamma = 0, phi = 0, eta = 0, target_s = 0;
    double eta_resolution = 0, angle_tol = 0, strength_tol = 0, trunc = 0, em_tol = 0;
    std::vector<double> grid, angles;
    long long trials = 0, seed = 0;
    int restarts = 0, em_max_iter = 0;
    bool planar = true;
  } flags;

  const std::vector<std::string> commands = {"strength",         "optimize", "eta-min",
                                             "eta-for-strength", "trace",    "simulate",
                                             "chsh"};
  std::vector<CLI::App*> subs;
  for (const std::string& name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value configuration file");
    sub->add_option("--family", flags.family, "state family: unbalanced | pseudo");
    sub->add_option("--theta", flags.theta, "unbalanced-Bell angle theta, degrees (0, 45]");
    sub->add_option("--gamma", flags.gamma, "pseudo-Bell angle gamma, degrees (0, 45]");
    sub->add_option("--phi", flags.phi, "pseudo-Bell phase phi, degrees [0, 360)");
    sub->add_option("--kind", flags.kind, "detection kind: counter | detector");
    sub->add_option("--eta", flags.eta, "detection efficiency in [0, 1]");
    sub->add_option("--target-s", flags.target_s, "strength target, bits");
    sub->add_option("--grid", flags.grid, "parameter grid, degrees")->delimiter(',');
    sub->add_option("--angles", flags.angles, "polar angles A1,A2,B1,B2, degrees")
        ->delimiter(',');
    sub->add_option("--trials", flags.trials, "number of simulated trials");
    sub->add_option("--restarts", flags.restarts, "optimizer restarts");
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_flag("--planar,!--no-planar", flags.planar,
                  "restrict settings to the (x,z) plane");
    sub->add_option("--out", flags.out, "output file (written atomically)");
    sub->add_option("--format", flags.format, "appendix-table | delimited-values");
    sub->add_option("--eta-resolution", flags.eta_resolution, "efficiency lattice step");
    sub->add_option("--angle-tol", flags.angle_tol, "settings convergence tolerance, degrees");
    sub->add_option("--strength-tol", flags.strength_tol, "strength tolerance, bits");
    sub->add_option("--trunc", flags.trunc, "zero-truncation threshold, bits");
    sub->add_option("--em-tol", flags.em_tol, "EM per-sweep divergence tolerance, bits");
    sub->add_option("--em-max-iter", flags.em_max_iter, "EM iteration cap");
    sub->add_flag("--dump-config", dump_effective, "print the effective configuration");
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* active = app.get_subcommands().front();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open configuration file '" + config_path + "'");
      std::stringstream buffer;
      buffer << in.rdbuf();
      config = parse_config(buffer.str());
    }
    config.command = active->get_name();

    const auto set_if = [&](const char* flag, const char* key, const std::string& value) {
      if (active->count(flag)) apply_config_entry(config, key, value);
    };
    set_if("--family", "family", flags.family);
    set_if("--theta", "theta", std::to_string(flags.theta));
    set_if("--gamma", "gamma", std::to_string(flags.gamma));
    set_if("--phi", "phi", std::to_string(flags.phi));
    set_if("--kind", "kind", flags.kind);
    set_if("--eta", "eta", std::to_string(flags.eta));
    set_if("--target-s", "target_s", std::to_string(flags.target_s));
    set_if("--trials", "trials", std::to_string(flags.trials));
    set_if("--restarts", "restarts", std::to_string(flags.restarts));
    set_if("--seed", "seed", std::to_string(flags.seed));
    set_if("--out", "out", flags.out);
    set_if("--format", "format", flags.format);
    set_if("--eta-resolution", "eta_resolution", std::to_string(flags.eta_resolution));
    set_if("--angle-tol", "angle_tol", std::to_string(flags.angle_tol));
    set_if("--strength-tol", "strength_tol", std::to_string(flags.strength_tol));
    set_if("--trunc", "trunc_threshold", std::to_string(flags.trunc));
    set_if("--em-tol", "em_tol", std::to_string(flags.em_tol));
    set_if("--em-max-iter", "em_max_iter", std::to_string(flags.em_max_iter));
    if (active->count("--planar") || active->count("--no-planar"))
      config.search.planar_only = flags.planar;
    if (active->count("--grid")) {
      config.grid = flags.grid;
    }
    if (active->count("--angles")) {
      if (flags.angles.size() != 4)
        throw ConfigError("key 'angles': expected four comma-separated angles A1,A2,B1,B2");
      config.angles_deg = {flags.angles[0], flags.angles[1], flags.angles[2],
                           flags.angles[3]};
    }

    validate_config(config);

    if (dump_effective) {
      std::cout << dump_config(config);
      return 0;
    }

    const std::string& cmd = config.command;
    if (cmd == "strength") return run_strength(config);
    if (cmd == "optimize") return run_optimize(config);
    if (cmd == "eta-min") return run_eta_min(config);
    if (cmd == "eta-for-strength") return run_eta_for_strength(config);
    if (cmd == "trace") return run_trace(config);
    if (cmd == "simulate") return run_simulate(config);
    if (cmd == "chsh") return run_chsh(config);
    throw ConfigError("unhandled command '" + cmd + "'");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
