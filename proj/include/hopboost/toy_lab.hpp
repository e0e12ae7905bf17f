#pragma once

// Synthetic scenes and the statistics used to read the toy experiments.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hopboost/boosting.hpp"
#include "hopboost/energy.hpp"

namespace hopboost {

struct SphereScene {
  PatternMemory id_pool;   // concentrated around the pole
  PatternMemory aux_pool;  // uniform on the sphere outside the pole cap
  Vector pole;
  double concentration = 0.0;
};

// ID = normalize(pole + g/concentration), g ~ N(0, I), pole = e_d;
// concentration = +inf puts every ID point at the pole. AUX is uniform on the
// sphere, rejecting points with poleᵀo >= cos(min(π/2, 2/concentration)).
// d < 2, zero counts, concentration <= 0 -> kRange.
SphereScene gen_sphere_scene(std::size_t d, std::size_t n_id, std::size_t n_aux,
                             double concentration, std::uint64_t seed);

struct PlanarScene {
  PatternMemory id_pool;
  PatternMemory aux_pool;
  std::vector<int> id_labels;  // empty, or one label in {0,1} per ID pattern
};

// ID ~ N(+separation/2·e₁, spread²I), AUX ~ N(−separation/2·e₁, spread²I) in
// the plane. spread = 0 is allowed (points exactly at the centers).
PlanarScene gen_planar_blobs(std::size_t n_per_class, double separation, double spread,
                             std::uint64_t seed);

// Two labelled ID blobs at (±separation/2, 0) and AUX uniform in the square
// [−box, box]², the setting for studying CE next to the OOD loss.
PlanarScene gen_interaction_scene(std::size_t n_per_class, std::size_t n_aux, double separation,
                                  double spread, double box, std::uint64_t seed);

// n points covering the unit sphere: circle for d = 2, Fibonacci lattice for
// d = 3. Other d -> kRange.
PatternMemory sphere_grid(std::size_t d, std::size_t n);

// res × res lattice over [lo, hi]², row-major with x varying fastest.
PatternMemory planar_grid(double lo, double hi, std::size_t res);

// Fraction of grid points where decide(score, 0) under the subsampled
// memories matches decide(score, 0) under the full memories.
double boundary_agreement(const HopfieldConfig& cfg, Geometry geom, const PatternMemory& full_id,
                          const PatternMemory& full_aux, const PatternMemory& sub_id,
                          const PatternMemory& sub_aux, const QueryBatch& grid);

// exp(β·E_b) per grid point, in (0, ¼].
Vector heatmap_field(const HopfieldConfig& cfg, Geometry geom, const PatternMemory& id_mem,
                     const PatternMemory& aux_mem, const QueryBatch& grid);

struct VarianceStat {
  double var_orth = 0.0;  // along the axis joining the two class means
  double var_par = 0.0;   // mean over the orthogonal complement
};

// Pooled within-class variance (each class centered on its own mean) along
// the inter-class axis and, averaged per direction, its orthogonal
// complement. Coincident class means -> kDegenerate; d < 2 or fewer than
// three patterns in total -> kRange.
VarianceStat orthogonal_variance_stat(const Eigen::MatrixXd& id_patterns,
                                      const Eigen::MatrixXd& aux_patterns);

// m_Xᵀm_O for the class means, i.e. the mean cross-class dot product.
double cross_class_dot(const Eigen::MatrixXd& id_patterns, const Eigen::MatrixXd& aux_patterns);

struct ResamplingTrial {
  double agreement_weighted = 0.0;
  double agreement_uniform = 0.0;
  double mean_eb_weighted = 0.0;  // mean full-memory E_b of the sampled AUX points
  double mean_eb_uniform = 0.0;
};

// One Figure-2 style comparison: n ID patterns drawn uniformly with
// replacement are shared by both arms; the AUX subsample is drawn by
// update_weights (weighted arm) or uniformly (uniform arm), n draws each.
ResamplingTrial resampling_trial(const HopfieldConfig& cfg, Geometry geom,
                                 const PatternMemory& id_pool, const PatternMemory& aux_pool,
                                 const QueryBatch& grid, std::size_t n, std::uint64_t seed);

}  // namespace hopboost
