#pragma once

// Hand-derived gradients of the Hopfield energies and a central-difference
// oracle to check them.
//
// Gradients are ambient (unprojected): on the sphere the caller renormalizes
// after a step.

#include <Eigen/Dense>

#include <functional>

#include "hopboost/energy.hpp"

namespace hopboost {

struct GradReport {
  Eigen::VectorXd analytic;  // flattened, column-major for matrices
  Eigen::VectorXd numeric;
  double max_rel_err = 0.0;
  double tol = 0.0;
  bool pass = false;
};

// ‖a − n‖ / max(1e-12, ‖a‖ + ‖n‖) with ℓ2 norms over the whole tensor;
// pass iff that is <= tol.
GradReport compare_gradients(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric,
                             double tol);

// ∇ξ mhe = −X·softmax(βXᵀξ) + ξ
Vector grad_query_mhe(const HopfieldConfig& cfg, const Vector& query, const PatternMemory& memory);

// X·softmax(βXᵀξ), i.e. one gradient step of size 1 on mhe.
Vector hopfield_update(const HopfieldConfig& cfg, const Vector& query, const PatternMemory& memory);

// −2(X‖O)·sm(β(X‖O)ᵀξ) + X·sm(βXᵀξ) + O·sm(βOᵀξ)
Vector grad_query_boundary(const HopfieldConfig& cfg, const Vector& query,
                           const PatternMemory& id_mem, const PatternMemory& aux_mem);

// −tanh(β/2·(lseX − lseO))·(X·sm(βXᵀξ) − O·sm(βOᵀξ))
Vector grad_query_boundary_tanh(const HopfieldConfig& cfg, const Vector& query,
                                const PatternMemory& id_mem, const PatternMemory& aux_mem);

struct MemoryGrad {
  Eigen::MatrixXd d_id;   // ∂E_b/∂X, same shape as X
  Eigen::MatrixXd d_aux;  // ∂E_b/∂O, same shape as O
};

// dX = −tanh(β/2·(lseX − lseO))·ξ·sm(βXᵀξ)ᵀ, dO = +tanh(…)·ξ·sm(βOᵀξ)ᵀ.
MemoryGrad grad_memory_boundary(const HopfieldConfig& cfg, const Vector& query,
                                const PatternMemory& id_mem, const PatternMemory& aux_mem);

// Geometry-aware versions. For euclidean similarities −½‖ξ − z‖² the query
// terms cancel and column i of dX is (ξ − x_i)·(sm_X,i − 2·sm_Z,i).
Vector grad_query_boundary(const HopfieldConfig& cfg, Geometry geom, const Vector& query,
                           const PatternMemory& id_mem, const PatternMemory& aux_mem);
MemoryGrad grad_memory_boundary(const HopfieldConfig& cfg, Geometry geom, const Vector& query,
                                const PatternMemory& id_mem, const PatternMemory& aux_mem);

// Central differences (f(x + h·e_k) − f(x − h·e_k)) / 2h per coordinate.
// h <= 0 -> kRange; a non-finite evaluation -> kNonFinite.
Vector finite_difference(const std::function<double(const Vector&)>& f, const Vector& point,
                         double h);

// Same over every entry of a matrix; result has the matrix's shape.
Eigen::MatrixXd finite_difference(const std::function<double(const Eigen::MatrixXd&)>& f,
                                  const Eigen::MatrixXd& point, double h);

namespace detail {

// Raw kernel shared by the query and memory gradients: coefficient c_j of
// each memory column in ∂E_b/∂s_j, with X columns first then O columns.
Vector boundary_coefficients(double beta, Geometry geom, const Eigen::MatrixXd& id_mem,
                             const Eigen::MatrixXd& aux_mem,
                             const Eigen::Ref<const Vector>& query);

}  // namespace detail

}  // namespace hopboost
