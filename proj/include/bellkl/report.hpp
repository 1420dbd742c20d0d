#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bellkl/search.hpp"

namespace bellkl {

/// Fixed-layout text table in the efficiency-bracketing schema: one header
/// line (theta|gamma, A_1, A_2, B_1, B_2, eta_1, eta_2, S_1, S_2), then one
/// line per row. Angles and efficiencies carry four decimals, strengths six
/// significant digits in scientific notation. Output is deterministic byte
/// for byte; infeasible rows print nan efficiencies.
std::string format_appendix_table(const std::vector<TraceRow>& rows, StateFamily family);

/// Two-column (parameter, efficiency) plot data for a single strength level,
/// preceded by '#'-prefixed comment lines recording the level, detection
/// kind, family, tool version and configuration hash. Of each bracket the
/// efficiency whose strength is closer to the level is used. Rows with mixed
/// targets are rejected.
std::string format_plot_data(const std::vector<TraceRow>& rows, StateFamily family,
                             DetectionKind kind, const std::string& config_hash);

/// FNV-1a 64-bit hash, hex-encoded; used to stamp outputs with the
/// configuration that produced them.
std::string fnv1a_hex(const std::string& text);

/// Whole-file atomic write: the content lands under a temporary name in the
/// destination directory and is renamed into place.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace bellkl
