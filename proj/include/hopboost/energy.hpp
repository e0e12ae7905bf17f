#pragma once

// Log-sum-exp kernels and the modern Hopfield energies built on them.
//
// All reductions run left to right over the pattern index, so a given build
// produces bit-identical results for identical inputs. Functions validate
// their inputs and throw hopboost::Error.

#include <Eigen/Dense>

#include <span>
#include <utility>

#include "hopboost/types.hpp"

namespace hopboost {

using Vector = Eigen::VectorXd;

// β⁻¹·log Σ exp(β z_i), max-shifted. Empty z -> kEmptyInput, non-finite -> kNonFinite.
double lse(const HopfieldConfig& cfg, std::span<const double> z);

// exp(β z_i − β·lse(z)); entries >= 0 and summing to 1.
Vector softmax(const HopfieldConfig& cfg, std::span<const double> z);

// −lse(β, Xᵀξ) + ½ξᵀξ (+ β⁻¹ log N + ½M² when include_constant).
double mhe(const HopfieldConfig& cfg, const Vector& query, const PatternMemory& memory,
           bool include_constant = true);

// The boundary energy −2 lse(β,(X‖O)ᵀξ) + lse(β,Xᵀξ) + lse(β,Oᵀξ).
// Maximal (−2β⁻¹ log 2) where the two per-class lse terms coincide.
double boundary_energy(const HopfieldConfig& cfg, const Vector& query,
                       const PatternMemory& id_mem, const PatternMemory& aux_mem);

// Same quantity through −2β⁻¹ log cosh(β/2·(lseX − lseO)) − 2β⁻¹ log 2.
double boundary_energy_logcosh(const HopfieldConfig& cfg, const Vector& query,
                               const PatternMemory& id_mem, const PatternMemory& aux_mem);

// Column i of queries -> entry i. Parallel over columns when HB_THREADS > 1.
Vector boundary_energy_batch(const HopfieldConfig& cfg, const QueryBatch& queries,
                             const PatternMemory& id_mem, const PatternMemory& aux_mem);

// OOD score lse(β,Xᵀξ) − lse(β,Oᵀξ); higher means more in-distribution.
double score(const HopfieldConfig& cfg, const Vector& query, const PatternMemory& id_mem,
             const PatternMemory& aux_mem);

Vector score_batch(const HopfieldConfig& cfg, const QueryBatch& queries,
                   const PatternMemory& id_mem, const PatternMemory& aux_mem);

struct Posterior {
  double p_id = 0.5;
  double p_aux = 0.5;
};

// Class posteriors of the equal-prior Gaussian-mixture reading of the energy.
// p_id + p_aux == 1 exactly.
Posterior posterior_pair(const HopfieldConfig& cfg, const Vector& query,
                         const PatternMemory& id_mem, const PatternMemory& aux_mem);

enum class Decision { kId, kOod };

// ID iff score >= gamma.
Decision decide(double score, double gamma) noexcept;

// log( (1/N) Σ N(ξ; c_i, β⁻¹ I) ), evaluated with exact Gaussian log-densities.
double gaussian_mixture_logdensity(const HopfieldConfig& cfg, const Vector& query,
                                   const PatternMemory& centers);

// β⁻¹ log Σ exp(−β/2 ‖ξ − x_i‖²). Never requires normalization.
double euclidean_lse(const HopfieldConfig& cfg, const Vector& query, const PatternMemory& memory);

double euclidean_boundary_energy(const HopfieldConfig& cfg, const Vector& query,
                                 const PatternMemory& id_mem, const PatternMemory& aux_mem);

double euclidean_score(const HopfieldConfig& cfg, const Vector& query,
                       const PatternMemory& id_mem, const PatternMemory& aux_mem);

// Geometry dispatch: sphere -> dot-product forms, euclidean -> distance forms.
double boundary_energy(const HopfieldConfig& cfg, Geometry geom, const Vector& query,
                       const PatternMemory& id_mem, const PatternMemory& aux_mem);
double score(const HopfieldConfig& cfg, Geometry geom, const Vector& query,
             const PatternMemory& id_mem, const PatternMemory& aux_mem);
Vector boundary_energy_batch(const HopfieldConfig& cfg, Geometry geom, const QueryBatch& queries,
                             const PatternMemory& id_mem, const PatternMemory& aux_mem);
Vector score_batch(const HopfieldConfig& cfg, Geometry geom, const QueryBatch& queries,
                   const PatternMemory& id_mem, const PatternMemory& aux_mem);

// Divides each column by its ℓ2 norm. A column with norm < 1e-12 -> kZeroNorm
// naming the column.
PatternMemory normalize_columns(const Eigen::MatrixXd& matrix);

// log cosh(a) = |a| + log1p(exp(−2|a|)) − log 2
double log_cosh(double a) noexcept;

// Stable logistic function.
double sigmoid(double t) noexcept;

namespace detail {

// Unvalidated kernels for hot loops. z must be nonempty.
double lse_unchecked(double beta, std::span<const double> z) noexcept;
void softmax_unchecked(double beta, std::span<const double> z, std::span<double> out) noexcept;

// Per-class similarity vector: Xᵀξ (sphere) or −½‖ξ − x_i‖² (euclidean).
void similarities(Geometry geom, const Eigen::MatrixXd& memory,
                  const Eigen::Ref<const Vector>& query, std::span<double> out) noexcept;

struct BoundaryTerms {
  double lse_id = 0.0;
  double lse_aux = 0.0;
  double lse_joint = 0.0;
};

// lse over X, over O and over the concatenation (computed directly over the
// joined similarity vector).
BoundaryTerms boundary_terms(double beta, Geometry geom, const Eigen::MatrixXd& id_mem,
                             const Eigen::MatrixXd& aux_mem,
                             const Eigen::Ref<const Vector>& query);

// Throws if dimensions disagree or normalization is demanded but missing.
void check_pair(const HopfieldConfig& cfg, Geometry geom, const Eigen::Ref<const Vector>& query,
                const PatternMemory& id_mem, const PatternMemory& aux_mem);
void check_single(const HopfieldConfig& cfg, Geometry geom, const Eigen::Ref<const Vector>& query,
                  const PatternMemory& memory);

}  // namespace detail

}  // namespace hopboost
