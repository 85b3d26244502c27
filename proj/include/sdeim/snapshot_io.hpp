#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "sdeim/dynamics.hpp"

namespace sdeim
{

/// Binary layout: "SDM1", u64 N, u64 M, f64 t0, f64 dt_sample (little
/// endian), then N*M f64 values in column-major order.
std::string encode_snapshots(const TrajectoryMatrix &traj);
TrajectoryMatrix decode_snapshots(const std::string &bytes);

/// Text layout: "# N,M,t0,dt" header, then N lines of M comma-separated
/// values; column j is snapshot j.
std::string encode_snapshots_csv(const TrajectoryMatrix &traj);
TrajectoryMatrix decode_snapshots_csv(const std::string &text);

/// Writes SDM1, or CSV when the extension is ".csv". Atomic.
void write_snapshots(const std::filesystem::path &path, const TrajectoryMatrix &traj);

/// Reads either format (detected from the magic bytes) and tags the result
/// External. When given, dt_sample and t0 must agree with the file header.
TrajectoryMatrix ingest_snapshots(const std::filesystem::path &path,
                                  std::optional<double> dt_sample = std::nullopt,
                                  std::optional<double> t0 = std::nullopt);

/// Whole-file helpers shared with the artifact writers.
std::string read_file(const std::filesystem::path &path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path &path, const std::string &contents);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

} // namespace sdeim
