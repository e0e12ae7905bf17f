#include "hopboost/toy_runner.hpp"

#include <string>

namespace hopboost {

const char* scene_name(SceneKind kind) noexcept {
  switch (kind) {
    case SceneKind::kSphere: return "sphere";
    case SceneKind::kBlobs: return "blobs";
    case SceneKind::kInteraction: return "interaction";
  }
  return "unknown";
}

SceneKind parse_scene(const std::string& name) {
  if (name == "sphere") return SceneKind::kSphere;
  if (name == "blobs") return SceneKind::kBlobs;
  if (name == "interaction") return SceneKind::kInteraction;
  fail(ErrorCode::kUnknownName,
       "unknown scene '" + name + "' (expected sphere, blobs or interaction)");
}

ToyPreset scene_preset(SceneKind kind) {
  ToyPreset p;
  switch (kind) {
    case SceneKind::kSphere:
      // defaults of ToyConfig and SceneParams
      break;
    case SceneKind::kBlobs:
      p.config.beta = 2.0;
      p.config.lr = 0.1;
      p.config.lr_growth = 1.0;
      p.config.steps = 100;
      p.config.geometry = Geometry::kEuclidean;
      p.config.full_batch = true;
      p.config.snapshot_every = 25;
      break;
    case SceneKind::kInteraction:
      p.config.beta = 2.0;
      p.config.lambda = 1.0;
      p.config.lr = 0.05;
      p.config.lr_growth = 1.0;
      p.config.steps = 1000;
      p.config.geometry = Geometry::kEuclidean;
      p.config.full_batch = true;
      p.config.snapshot_every = 100;
      p.scene.n_aux = 80;
      p.enable_ce = true;
      break;
  }
  return p;
}

namespace {

struct Scene {
  PatternMemory id_pool;
  PatternMemory aux_pool;
  std::vector<int> labels;
  PatternMemory grid;
};

Scene build(SceneKind kind, const ToyPreset& p) {
  const SceneParams& s = p.scene;
  const std::uint64_t seed = p.config.seed;
  switch (kind) {
    case SceneKind::kSphere: {
      auto sc = gen_sphere_scene(s.dim, s.n_id, s.n_aux, s.concentration, seed);
      PatternMemory grid = s.dim <= 3 ? sphere_grid(s.dim, s.grid_points) : sc.aux_pool;
      return Scene{std::move(sc.id_pool), std::move(sc.aux_pool), {}, std::move(grid)};
    }
    case SceneKind::kBlobs: {
      auto sc = gen_planar_blobs(s.n_per_class, s.separation, s.spread, seed);
      return Scene{std::move(sc.id_pool), std::move(sc.aux_pool), {},
                   planar_grid(-s.grid_extent, s.grid_extent, s.grid_res)};
    }
    case SceneKind::kInteraction: {
      auto sc = gen_interaction_scene(s.n_per_class, s.n_aux, s.separation, s.spread, s.box, seed);
      return Scene{std::move(sc.id_pool), std::move(sc.aux_pool), std::move(sc.id_labels),
                   planar_grid(-s.grid_extent, s.grid_extent, s.grid_res)};
    }
  }
  fail(ErrorCode::kUnknownName, "unknown scene");
}

}  // namespace

ToyRun run_scene(SceneKind kind, const ToyPreset& preset) {
  preset.config.validate();
  if (kind == SceneKind::kSphere && preset.config.geometry != Geometry::kSphere)
    fail(ErrorCode::kRange, "the sphere scene requires sphere geometry");
  Scene sc = build(kind, preset);
  const HopfieldConfig hcfg{preset.config.beta, false};
  const Geometry geom = preset.config.geometry;

  ToyTrajectory traj =
      run_toy_boosting(preset.config, sc.id_pool, sc.aux_pool, preset.enable_ce, sc.labels);

  ToyRun run{kind, preset, sc.grid, {}, {}, {}, {}};
  run.heatmap_initial = heatmap_field(hcfg, geom, sc.id_pool, sc.aux_pool, sc.grid);
  const ToySnapshot& last = traj.snapshots.back();
  const PatternMemory final_id(last.id_patterns), final_aux(last.aux_patterns);
  run.heatmap_final = heatmap_field(hcfg, geom, final_id, final_aux, sc.grid);

  ToySummary& s = run.summary;
  const auto v0 = orthogonal_variance_stat(sc.id_pool.data(), sc.aux_pool.data());
  const auto v1 = orthogonal_variance_stat(last.id_patterns, last.aux_patterns);
  s.var_orth_initial = v0.var_orth;
  s.var_par_initial = v0.var_par;
  s.var_orth_final = v1.var_orth;
  s.var_par_final = v1.var_par;
  for (const auto& snap : traj.snapshots) {
    s.cross_dot.push_back(cross_class_dot(snap.id_patterns, snap.aux_patterns));
    s.l_ood.push_back(snap.l_ood);
  }
  if (!last.id_indices.empty() && !last.aux_indices.empty())
    s.agreement_last_batch =
        boundary_agreement(hcfg, geom, final_id, final_aux, final_id.select(last.id_indices),
                           final_aux.select(last.aux_indices), sc.grid);
  const std::size_t n = std::min<std::size_t>(
      preset.config.batch_n,
      static_cast<std::size_t>(std::min(sc.id_pool.count(), sc.aux_pool.count())));
  s.resampling = resampling_trial(hcfg, geom, sc.id_pool, sc.aux_pool, sc.grid, n,
                                  preset.config.seed);
  run.trajectory = std::move(traj);
  return run;
}

}  // namespace hopboost
