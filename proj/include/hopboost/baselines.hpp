#pragma once

// Post-hoc Hopfield-energy scores and the kernel-method identities that
// relate the boundary score to RBF networks and SVM decision rules.

#include <Eigen/Dense>

#include <vector>

#include "hopboost/energy.hpp"

namespace hopboost {

// lse(β, X_cᵀξ), minus β⁻¹ log N_c when shifted.
double he_score(const HopfieldConfig& cfg, const Vector& query, const PatternMemory& class_mem,
                bool shifted);

// m_cᵀξ
double she_score(const Vector& query, const Vector& class_mean);

// Column mean of a class memory.
Vector class_mean(const PatternMemory& class_mem);

// he_score(unshifted) − lse(β, Oᵀξ)
double he_aux_score(const HopfieldConfig& cfg, const Vector& query, const PatternMemory& class_mem,
                    const PatternMemory& aux_mem);

struct RbfCheck {
  double lhs = 0.0;    // −β⁻¹ log φ(ξ), φ the normalized RBF network
  double rhs = 0.0;    // −β⁻¹ log Σ exp(βμᵢᵀξ) + ½ξᵀξ + lse(β, a)
  double diff = 0.0;   // |lhs − rhs|
  double bound = 0.0;  // −β⁻¹ log Σ exp(βμᵢᵀξ) + ½ξᵀξ + max aᵢ + β⁻¹ log N  (>= rhs)
};

// RBF network φ(ξ) = Σ ωᵢ exp(−β/2 ‖ξ − μᵢ‖²) with ω = softmax(β·a),
// aᵢ = ½‖μᵢ‖². Centers need not be normalized.
RbfCheck rbf_energy_check(const HopfieldConfig& cfg, const PatternMemory& centers,
                          const Vector& query);

struct SvmDual {
  Vector alphas;             // >= 0, one per pattern
  std::vector<int> targets;  // +1 (ID) or −1 (AUX), one per pattern
  PatternMemory patterns;    // unit-norm, d × n

  // Sizes agree, α finite and >= 0, targets ±1, at least one α > 0 per class.
  void validate() const;
};

struct SvmEquiv {
  double direct = 0.0;    // β⁻¹ log Σ_ID αk − β⁻¹ log Σ_AUX αk, k(z,ξ) = exp(−β/2‖ξ − z‖²)
  double hopfield = 0.0;  // lse(β, X_Hᵀξ_H) − lse(β, O_Hᵀξ_H) with augmented rows
  double diff = 0.0;      // |direct − hopfield|
};

// Zero-α support vectors are dropped before taking log α. The augmented
// form equals the direct one for unit-norm patterns and queries.
SvmEquiv svm_score_equiv(const HopfieldConfig& cfg, const SvmDual& dual, const Vector& query);

}  // namespace hopboost
