#pragma once

// Algorithm-1 style boosting at toy scale: weights from the boundary energy,
// weighted resampling of weak learners, the OOD loss and its total gradient,
// the pattern-dynamics loop, and the boundary-sampling Monte-Carlo.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hopboost/energy.hpp"
#include "hopboost/gradients.hpp"

namespace hopboost {

// Resampling distribution over the AUX pool.
struct SampleWeights {
  Vector weights;

  // Entries finite and >= 0, sum within 1e-9 of 1, nonempty -> else kInvalidSimplex.
  void validate() const;
};

struct ToyConfig {
  double beta = 4.0;
  double lambda = 0.5;      // weight of the OOD loss next to cross-entropy
  double lr = 0.02;
  double lr_growth = 1.001;  // lr multiplier applied after every step
  std::size_t steps = 2000;
  std::size_t resample_every = 50;
  std::size_t batch_n = 20;
  std::uint64_t seed = 0;
  Geometry geometry = Geometry::kSphere;
  bool full_batch = false;         // use every pattern in every step
  std::size_t snapshot_every = 250;

  void validate() const;
  HopfieldConfig hopfield() const;
};

struct ToySnapshot {
  std::size_t step = 0;  // number of updates applied so far
  Eigen::MatrixXd id_patterns;
  Eigen::MatrixXd aux_patterns;
  std::vector<std::size_t> id_indices;   // batch of the step that led here
  std::vector<std::size_t> aux_indices;
  Vector weights;                        // current AUX resampling weights
  double l_ood = 0.0;                    // over the full pools
  double ce = std::numeric_limits<double>::quiet_NaN();  // NaN when CE is off
};

struct ToyTrajectory {
  ToyConfig config;
  bool ce_enabled = false;
  std::vector<ToySnapshot> snapshots;   // steps / snapshot_every + 1 entries
  std::vector<double> batch_loss;       // total loss of the batch at every step
  Eigen::MatrixXd head_weights;         // final linear head (empty without CE)
  Vector head_bias;
};

// softmax(β·E_b(pool; X, O)).
SampleWeights update_weights(const HopfieldConfig& cfg, Geometry geom, const QueryBatch& pool,
                             const PatternMemory& id_mem, const PatternMemory& aux_mem);
SampleWeights update_weights(const HopfieldConfig& cfg, const QueryBatch& pool,
                             const PatternMemory& id_mem, const PatternMemory& aux_mem);

// n i.i.d. draws with replacement by inverse CDF on the cumulative weights.
// n == 0 -> kUsage.
std::vector<std::size_t> weighted_sample(const SampleWeights& weights, std::size_t n,
                                         std::uint64_t seed);

// Mean of E_b(ξ; X_s, O_s) over every column ξ of (X_s‖O_s), self-terms
// included. Equals the 1/(2N) normalization when both batches have N columns.
double l_ood(const HopfieldConfig& cfg, Geometry geom, const PatternMemory& id_batch,
             const PatternMemory& aux_batch);
double l_ood(const HopfieldConfig& cfg, const PatternMemory& id_batch,
             const PatternMemory& aux_batch);

// Total derivative of l_ood w.r.t. every pattern (each one is both a stored
// memory column and a query).
MemoryGrad l_ood_gradient(const HopfieldConfig& cfg, Geometry geom, const PatternMemory& id_batch,
                          const PatternMemory& aux_batch);

// K-class linear classifier on raw coordinates: logits = W·x + b.
struct LinearHead {
  Eigen::MatrixXd weights;  // K × d
  Vector bias;              // K

  static LinearHead zeros(Eigen::Index classes, Eigen::Index dim);
};

struct CompositeLoss {
  double total = 0.0;  // ce + λ·ood
  double ce = 0.0;
  double ood = 0.0;
};

// Mean multinomial cross-entropy of the head over the ID batch plus λ·l_ood.
// Label outside [0, K) or label count != batch size -> kRange.
CompositeLoss composite_loss(const ToyConfig& cfg, const PatternMemory& id_batch,
                             const PatternMemory& aux_batch, std::span<const int> labels,
                             const LinearHead& head);

struct CrossEntropyGrad {
  double loss = 0.0;
  Eigen::MatrixXd d_inputs;   // d × n
  Eigen::MatrixXd d_weights;  // K × d
  Vector d_bias;              // K
};

CrossEntropyGrad cross_entropy_gradient(const Eigen::MatrixXd& inputs, std::span<const int> labels,
                                        const LinearHead& head);

// Runs the weight / evaluate / update loop. Without CE the objective is
// l_ood alone; with CE it is ce + λ·l_ood and a zero-initialized linear head
// over max(label)+1 classes is trained jointly. Sphere runs require unit-norm
// pools and renormalize every updated pattern.
ToyTrajectory run_toy_boosting(const ToyConfig& cfg, const PatternMemory& id_pool,
                               const PatternMemory& aux_pool, bool enable_ce,
                               std::span<const int> labels = {});

struct BoundaryMcSummary {
  std::vector<double> margin_plain;     // per trial, AUX unconstrained
  std::vector<double> margin_filtered;  // per trial, AUX with |2μᵀo| <= εσ²
  double mean_plain = 0.0;
  double mean_filtered = 0.0;
  double win_fraction = 0.0;  // trials with filtered margin > plain margin
  double acceptance = 0.0;    // probability that a raw AUX draw passes the filter
};

// Smallest admissible signal-to-noise ratio ‖μ‖/σ: root of 1 − 1/r − 1/(2r²).
inline constexpr double kMinSnr = 1.36602540378443865;

// ID x ~ N(μ, σ²I), AUX o ~ N(−μ, σ²I); θ = mean(x) − mean(o); margin μᵀθ/‖θ‖
// with ‖μ‖ = mu_norm along e₁. The same x draws serve both arms of a trial.
// r < kMinSnr, σ <= 0, ε <= 0 -> kRange; acceptance < 1e-4 -> kLowAcceptance.
BoundaryMcSummary boundary_mc_experiment(std::size_t d, double mu_norm, double sigma, double eps,
                                         std::size_t n_per_class, std::size_t trials,
                                         std::uint64_t seed);

}  // namespace hopboost
