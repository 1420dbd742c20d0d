#include "bellkl/config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace bellkl {

namespace {

const std::vector<std::string> kCommands = {"strength",         "optimize", "eta-min",
                                            "eta-for-strength", "trace",    "simulate",
                                            "chsh"};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0')
    throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
  return v;
}

long long parse_integer(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0')
    throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + value + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> values;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) values.push_back(parse_double(key, item));
  }
  if (values.empty()) throw ConfigError("key '" + key + "': expected a comma-separated list");
  return values;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

StateFamily RunConfig::resolved_family() const {
  if (family) return *family;
  if (theta_deg) return StateFamily::kUnbalanced;
  return StateFamily::kPseudo;
}

double RunConfig::parameter_deg() const {
  return resolved_family() == StateFamily::kUnbalanced ? theta_deg.value() : gamma_deg.value();
}

FockState RunConfig::state() const {
  return make_family_state(resolved_family(), parameter_deg(), phi_deg);
}

SettingQuad RunConfig::setting_quad() const {
  SettingQuad quad;
  for (int i = 0; i < 4; ++i) quad[i] = {(*angles_deg)[i], 0.0};
  return quad;
}

void apply_config_entry(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "command") {
    c.command = value;
  } else if (key == "family") {
    if (value == "unbalanced")
      c.family = StateFamily::kUnbalanced;
    else if (value == "pseudo")
      c.family = StateFamily::kPseudo;
    else
      throw ConfigError("key 'family': expected unbalanced or pseudo, got '" + value + "'");
  } else if (key == "theta") {
    c.theta_deg = parse_double(key, value);
  } else if (key == "gamma") {
    c.gamma_deg = parse_double(key, value);
  } else if (key == "phi") {
    c.phi_deg = parse_double(key, value);
  } else if (key == "kind") {
    if (value == "counter")
      c.kind = DetectionKind::kCounter;
    else if (value == "detector")
      c.kind = DetectionKind::kDetector;
    else
      throw ConfigError("key 'kind': expected counter or detector, got '" + value + "'");
  } else if (key == "eta") {
    c.eta = parse_double(key, value);
  } else if (key == "target_s") {
    c.target_s = parse_double(key, value);
  } else if (key == "grid") {
    c.grid = parse_list(key, value);
  } else if (key == "angles") {
    const auto list = parse_list(key, value);
    if (list.size() != 4)
      throw ConfigError("key 'angles': expected four comma-separated angles A1,A2,B1,B2");
    c.angles_deg = {list[0], list[1], list[2], list[3]};
  } else if (key == "trials") {
    c.trials = parse_integer(key, value);
  } else if (key == "out") {
    c.out_path = value;
  } else if (key == "format") {
    if (value == "appendix-table")
      c.format = OutputFormat::kAppendixTable;
    else if (value == "delimited-values")
      c.format = OutputFormat::kDelimitedValues;
    else
      throw ConfigError("key 'format': expected appendix-table or delimited-values");
  } else if (key == "restarts") {
    c.search.restarts = static_cast<int>(parse_integer(key, value));
  } else if (key == "seed") {
    c.search.seed = static_cast<std::uint64_t>(parse_integer(key, value));
  } else if (key == "planar") {
    c.search.planar_only = parse_bool(key, value);
  } else if (key == "eta_resolution") {
    c.search.eta_resolution = parse_double(key, value);
  } else if (key == "angle_tol") {
    c.search.angle_tol_deg = parse_double(key, value);
  } else if (key == "strength_tol") {
    c.search.strength_tol_bits = parse_double(key, value);
  } else if (key == "trunc_threshold") {
    c.search.truncation_threshold = parse_double(key, value);
  } else if (key == "em_tol") {
    c.search.em.tol = parse_double(key, value);
  } else if (key == "em_max_iter") {
    c.search.em.max_iter = static_cast<int>(parse_integer(key, value));
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    apply_config_entry(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

void validate_config(const RunConfig& c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end())
    throw ConfigError("key 'command': expected one of strength, optimize, eta-min, "
                      "eta-for-strength, trace, simulate, chsh; got '" +
                      c.command + "'");

  if (c.theta_deg && c.gamma_deg)
    throw ConfigError("keys 'theta' and 'gamma' are both set; exactly one state family "
                      "may be specified");
  if (c.family == StateFamily::kUnbalanced && c.gamma_deg)
    throw ConfigError("key 'gamma' conflicts with family = unbalanced (use 'theta')");
  if (c.family == StateFamily::kPseudo && c.theta_deg)
    throw ConfigError("key 'theta' conflicts with family = pseudo (use 'gamma')");

  const bool is_trace = c.command == "trace";
  if (is_trace) {
    if (!c.family)
      throw ConfigError("key 'family' is required for trace (grid values need a family)");
    if (c.grid.empty()) throw ConfigError("key 'grid' is required for trace");
    if (c.theta_deg || c.gamma_deg)
      throw ConfigError("keys 'theta'/'gamma' are not used by trace; supply 'grid'");
    for (const double v : c.grid)
      if (!(v > 0.0 && v <= 45.0))
        throw ConfigError("key 'grid': values must lie in (0, 45] degrees");
  } else {
    if (!c.theta_deg && !c.gamma_deg)
      throw ConfigError("one of keys 'theta' (unbalanced family) or 'gamma' (pseudo family) "
                        "is required");
    const double p = c.theta_deg ? *c.theta_deg : *c.gamma_deg;
    if (!(p > 0.0 && p <= 45.0))
      throw ConfigError(std::string("key '") + (c.theta_deg ? "theta" : "gamma") +
                        "': value must lie in (0, 45] degrees");
  }

  if (!(c.phi_deg >= 0.0 && c.phi_deg < 360.0))
    throw ConfigError("key 'phi': value must lie in [0, 360) degrees");
  if (!(c.eta >= 0.0 && c.eta <= 1.0))
    throw ConfigError("key 'eta': value must lie in [0, 1]");
  if (c.target_s < 0.0) throw ConfigError("key 'target_s': value must be >= 0");
  if (c.command == "eta-for-strength" && !(c.target_s > 0.0))
    throw ConfigError("key 'target_s': a positive strength target is required for "
                      "eta-for-strength");
  if ((c.command == "strength" || c.command == "chsh") && !c.angles_deg)
    throw ConfigError("key 'angles': explicit settings A1,A2,B1,B2 are required for " +
                      c.command);
  if (c.angles_deg)
    for (const double a : *c.angles_deg)
      if (!(a >= -180.0 && a <= 180.0))
        throw ConfigError("key 'angles': polar angles must lie in [-180, 180] degrees");
  if (c.trials < 1) throw ConfigError("key 'trials': value must be >= 1");
  if (c.search.restarts < 1) throw ConfigError("key 'restarts': value must be >= 1");
  if (!(c.search.eta_resolution > 0.0))
    throw ConfigError("key 'eta_resolution': value must be > 0");
  if (!(c.search.angle_tol_deg > 0.0)) throw ConfigError("key 'angle_tol': value must be > 0");
  if (!(c.search.em.tol > 0.0)) throw ConfigError("key 'em_tol': value must be > 0");
  if (c.search.em.max_iter < 1) throw ConfigError("key 'em_max_iter': value must be >= 1");
}

std::string dump_config(const RunConfig& c) {
  std::string out;
  const auto line = [&out](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  line("command", c.command);
  if (c.family)
    line("family", to_string(*c.family));
  if (c.theta_deg) line("theta", format_double(*c.theta_deg));
  if (c.gamma_deg) line("gamma", format_double(*c.gamma_deg));
  line("phi", format_double(c.phi_deg));
  line("kind", to_string(c.kind));
  line("eta", format_double(c.eta));
  line("target_s", format_double(c.target_s));
  if (!c.grid.empty()) {
    std::string joined;
    for (const double v : c.grid) {
      if (!joined.empty()) joined += ",";
      joined += format_double(v);
    }
    line("grid", joined);
  }
  if (c.angles_deg) {
    std::string joined;
    for (const double v : *c.angles_deg) {
      if (!joined.empty()) joined += ",";
      joined += format_double(v);
    }
    line("angles", joined);
  }
  line("trials", std::to_string(c.trials));
  if (!c.out_path.empty()) line("out", c.out_path);
  line("format", c.format == OutputFormat::kAppendixTable ? "appendix-table"
                                                          : "delimited-values");
  line("restarts", std::to_string(c.search.restarts));
  line("seed", std::to_string(c.search.seed));
  line("planar", c.search.planar_only ? "true" : "false");
  line("eta_resolution", format_double(c.search.eta_resolution));
  line("angle_tol", format_double(c.search.angle_tol_deg));
  line("strength_tol", format_double(c.search.strength_tol_bits));
  line("trunc_threshold", format_double(c.search.truncation_threshold));
  line("em_tol", format_double(c.search.em.tol));
  line("em_max_iter", std::to_string(c.search.em.max_iter));
  return out;
}

}  // namespace bellkl
