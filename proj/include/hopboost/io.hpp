#pragma once

// File formats: embeddings (binary "HBEM" or CSV), value and index CSVs,
// metrics JSON, toy trajectories, and JSON configs.
//
// Binary embedding layout, little-endian:
//   bytes 0-3   magic "HBEM"
//   bytes 4-7   u32 version = 1
//   bytes 8-11  u32 dtype (1 = f32, 2 = f64)
//   bytes 12-15 u32 d
//   bytes 16-23 u64 N
//   then N rows of d values (one pattern per row).
// CSV layout: a first line "d=<int>", then one comma-separated row per pattern.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hopboost/energy.hpp"
#include "hopboost/metrics.hpp"
#include "hopboost/toy_runner.hpp"

namespace hopboost::io {

enum class EmbFormat { kBinary, kCsv };

// ".csv" (any case) -> kCsv, everything else -> kBinary.
EmbFormat format_from_path(const std::string& path);

enum class Dtype : std::uint32_t { kF32 = 1, kF64 = 2 };

// The normalized flag of the result is set iff every column is unit-norm.
PatternMemory read_embeddings(const std::string& path, EmbFormat format);
PatternMemory read_embeddings(const std::string& path);

void write_embeddings(const std::string& path, const PatternMemory& mem, EmbFormat format,
                      Dtype dtype = Dtype::kF64);

// CSV with header "index,value".
void write_values(const std::string& path, std::span<const double> values);
std::vector<double> read_values(const std::string& path);

// CSV with header "draw,index".
void write_indices(const std::string& path, std::span<const std::size_t> indices);
std::vector<std::size_t> read_indices(const std::string& path);

// {"fpr95":…,"auroc":…,"gamma":…} with 17 significant digits.
std::string metrics_json(const OodMetrics& m);
void write_metrics(const std::string& path, const OodMetrics& m);
OodMetrics read_metrics(const std::string& path);

// Directory with manifest.json (config echo and snapshot list) plus one
// snapshot_<step>.csv per snapshot. Returns the number of snapshot files.
std::size_t write_trajectory(const std::string& dir, const ToyTrajectory& traj,
                             const std::string& scene);

// Trajectory under dir/trajectory, heatmap_initial.csv, heatmap_final.csv
// and summary.json.
void write_toy_run(const std::string& dir, const ToyRun& run);

// Applies a flat JSON object (text) on top of base. Keys: beta, lambda, lr,
// lr_growth, steps, resample_every, batch_n, seed, geometry, full_batch,
// snapshot_every, enable_ce and the scene keys dim, n_id, n_aux,
// concentration, n_per_class, separation, spread, box, grid_points,
// grid_extent, grid_res. Unknown key -> kUnknownKey, bad type -> kParse,
// invalid value -> kRange.
ToyPreset apply_config(const std::string& json_text, const ToyPreset& base);

// Reads a config file and applies it on top of the sphere-scene defaults
// (beta 4, lambda 0.5, resample_every 50, …) or the given base.
ToyPreset parse_config(const std::string& path);
ToyPreset parse_config(const std::string& path, const ToyPreset& base);

// Keys beta and normalize_inputs.
HopfieldConfig parse_hopfield_config(const std::string& json_text);

// Echo of a preset as a JSON object (text).
std::string config_json(const ToyPreset& preset);

}  // namespace hopboost::io
