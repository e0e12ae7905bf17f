#pragma once

// Named toy scenes (sphere, blobs, interaction) with their preset
// configurations, run end to end with the summary statistics attached.

#include <cstddef>
#include <string>
#include <vector>

#include "hopboost/boosting.hpp"
#include "hopboost/toy_lab.hpp"

namespace hopboost {

enum class SceneKind { kSphere, kBlobs, kInteraction };

const char* scene_name(SceneKind kind) noexcept;
SceneKind parse_scene(const std::string& name);  // unknown -> kUnknownName

struct SceneParams {
  std::size_t dim = 3;            // sphere
  std::size_t n_id = 100;         // sphere
  std::size_t n_aux = 400;        // sphere, interaction
  double concentration = 8.0;     // sphere
  std::size_t n_per_class = 40;   // blobs, interaction
  double separation = 4.0;        // blobs, interaction
  double spread = 0.5;            // blobs, interaction
  double box = 4.0;               // interaction AUX square half-width
  std::size_t grid_points = 2000; // sphere grid size
  double grid_extent = 4.0;       // planar grid covers [−extent, extent]²
  std::size_t grid_res = 41;      // planar grid resolution per axis
};

struct ToyPreset {
  ToyConfig config;
  SceneParams scene;
  bool enable_ce = false;
};

ToyPreset scene_preset(SceneKind kind);

struct ToySummary {
  double var_orth_initial = 0.0;
  double var_orth_final = 0.0;
  double var_par_initial = 0.0;
  double var_par_final = 0.0;
  std::vector<double> cross_dot;        // per snapshot
  std::vector<double> l_ood;            // per snapshot, full pools
  double agreement_last_batch = 1.0;    // grid sign agreement of the final batch vs full pools
  ResamplingTrial resampling;           // weighted vs uniform subsample on the initial scene
};

struct ToyRun {
  SceneKind kind = SceneKind::kSphere;
  ToyPreset preset;
  PatternMemory grid;
  Vector heatmap_initial;
  Vector heatmap_final;
  ToyTrajectory trajectory;
  ToySummary summary;
};

ToyRun run_scene(SceneKind kind, const ToyPreset& preset);

}  // namespace hopboost
