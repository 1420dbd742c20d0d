#include "bellkl/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "bellkl/version.hpp"

namespace bellkl {

namespace {

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string sci5(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

std::string pad(const std::string& s, int width) {
  return s.size() >= static_cast<std::size_t>(width)
             ? s
             : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string format_appendix_table(const std::vector<TraceRow>& rows, StateFamily family) {
  const char* param = family == StateFamily::kUnbalanced ? "theta" : "gamma";
  constexpr int w = 13;
  std::string out;
  out += pad(param, w);
  for (const char* col : {"A_1", "A_2", "B_1", "B_2", "eta_1", "eta_2", "S_1", "S_2"})
    out += pad(col, w);
  out += '\n';
  for (const TraceRow& row : rows) {
    out += pad(fixed4(row.parameter), w);
    for (int i = 0; i < 4; ++i) out += pad(fixed4(row.settings[i].polar_deg), w);
    out += pad(fixed4(row.eta_1), w);
    out += pad(fixed4(row.eta_2), w);
    out += pad(sci5(row.s_1), w);
    out += pad(sci5(row.s_2), w);
    out += '\n';
  }
  return out;
}

std::string format_plot_data(const std::vector<TraceRow>& rows, StateFamily family,
                             DetectionKind kind, const std::string& config_hash) {
  for (const TraceRow& row : rows)
    if (row.target_s != rows.front().target_s)
      throw std::invalid_argument("format_plot_data: rows mix strength targets");
  std::string out;
  out += "# strength_level " + sci5(rows.empty() ? 0.0 : rows.front().target_s) + "\n";
  out += "# kind " + to_string(kind) + "\n";
  out += "# family " + to_string(family) + "\n";
  out += std::string("# version ") + kVersion + "\n";
  out += "# config " + config_hash + "\n";
  for (const TraceRow& row : rows) {
    if (!row.feasible) continue;
    // report whichever bracket end sits closer to the requested level
    const double eta = std::abs(row.s_1 - row.target_s) <= std::abs(row.s_2 - row.target_s)
                           ? row.eta_1
                           : row.eta_2;
    out += fixed4(row.parameter) + " " + fixed4(eta) + "\n";
  }
  return out;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("atomic_write: write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace bellkl
