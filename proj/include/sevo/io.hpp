#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "sevo/analysis.hpp"
#include "sevo/config.hpp"
#include "sevo/schemes.hpp"

namespace sevo {

/// Shortest-exact decimal rendering ('.' decimal point, round-trips).
std::string format_double(double v);

/// FNV-1a 64-bit over raw bytes; returned as 16 hex digits.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hash_hex(std::uint64_t h);

/// CSV writers. Dialect: comma separator, '.' decimal, one header row,
/// LF line endings.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_condition_csv(std::ostream& out, const ConditionReport& report);
void write_scan_csv(std::ostream& out, const std::vector<ScanCell>& cells);
void write_ladder_csv(std::ostream& out, const LadderReport& report);

/// Static SVG artifacts.
std::string svg_loglog(const LadderReport& report);
std::string svg_heatmap(const std::vector<ScanCell>& cells);

/// Run manifest: resolved config, seed, worker count, quadrature and
/// solver settings, per-file content hashes and a combined hash over
/// the output bytes (order-independent in file names). The timestamp
/// is informational and excluded from all hashes.
std::string build_manifest(const std::string& command, const RunConfig& config,
                           const std::map<std::string, std::string>& outputs,
                           const std::string& extra_json = "");

/// Writes `bytes` to dir/name (binary, LF preserved); creates dir.
void write_file(const std::string& dir, const std::string& name, const std::string& bytes);

}  // namespace sevo
