#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "thermolab/micro_sim.hpp"
#include "thermolab/path.hpp"
#include "thermolab/rough_lift.hpp"
#include "thermolab/sde_limit.hpp"
#include "thermolab/stats.hpp"

namespace thermolab::io {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

/// Shortest round-trip decimal form, so rewritten files are byte-identical.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws parse_error when missing.
  std::size_t column(const std::string& name) const;
};

std::string to_csv(const CsvTable& table);
/// Parses a numeric CSV with a header row. Errors name the 1-based line.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// t, p_<k>_<i>..., u_<k>_<i>..., phi_<j>... on the output grid.
CsvTable trajectory_table(const micro::Trajectory& traj, int n_particles, int dim);
/// t, phi_<j>... at every knot of the driver (exact piecewise-linear path).
CsvTable driver_table(const PiecewiseLinearPath& driver);
/// Rebuilds a piecewise-linear path from the t and phi_* columns.
PiecewiseLinearPath path_from_table(const CsvTable& table, const std::string& prefix = "phi_");

/// t, x_<j>... and, for level 2, xx_<i>_<j> anchored at the first grid time.
CsvTable lift_table(const rough::RoughPathGrid& lift);
/// t, x_<j>... for one sample path.
CsvTable path_sample_table(const sde::PathSample& sample);
/// Stacks several paths with a leading path index column.
CsvTable path_ensemble_table(const std::vector<sde::PathSample>& samples);

std::uint32_t crc32(const std::string& bytes);

json to_json(const micro::ModelParams& params);
json to_json(const sde::SdeConfig& cfg);
json to_json(const rough::HolderReport& report);
json to_json(const rough::SpiralReport& report);
json to_json(const stats::CorrelationEstimate& estimate);
json to_json(const stats::KsResult& ks);
json to_json(const stats::MomentBoundFit& fit);
json to_json(const Mat& m);

/// Manifest pairing output files with the inputs that produced them.
struct RunManifest {
  std::string command;
  json config;
  std::uint64_t seed = 0;
  int threads = 1;
  double wall_clock_seconds = 0.0;
  std::vector<std::filesystem::path> outputs;

  /// Checksums are computed from the files on disk at write time.
  json to_json() const;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace thermolab::io
