#include "hopboost/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hopboost {

namespace {

void check_dims(const Vector& query, Eigen::Index dim) {
  if (query.size() != dim)
    fail(ErrorCode::kDimensionMismatch, "query has dimension " + std::to_string(query.size()) +
                                            ", memory has " + std::to_string(dim));
  if (!query.allFinite()) fail(ErrorCode::kNonFinite, "query contains NaN or Inf");
}

double dot_lse(double beta, const Eigen::MatrixXd& mem, const Vector& query) {
  std::vector<double> sims(static_cast<std::size_t>(mem.cols()));
  detail::similarities(Geometry::kSphere, mem, query, sims);
  return detail::lse_unchecked(beta, sims);
}

}  // namespace

double he_score(const HopfieldConfig& cfg, const Vector& query, const PatternMemory& class_mem,
                bool shifted) {
  cfg.validate();
  check_dims(query, class_mem.dim());
  double s = dot_lse(cfg.beta, class_mem.data(), query);
  if (shifted) s -= std::log(static_cast<double>(class_mem.count())) / cfg.beta;
  return s;
}

double she_score(const Vector& query, const Vector& class_mean) {
  check_dims(query, class_mean.size());
  return class_mean.dot(query);
}

Vector class_mean(const PatternMemory& class_mem) { return class_mem.data().rowwise().mean(); }

double he_aux_score(const HopfieldConfig& cfg, const Vector& query, const PatternMemory& class_mem,
                    const PatternMemory& aux_mem) {
  if (class_mem.dim() != aux_mem.dim())
    fail(ErrorCode::kDimensionMismatch, "class and AUX memories differ in dimension");
  return he_score(cfg, query, class_mem, false) - dot_lse(cfg.beta, aux_mem.data(), query);
}

RbfCheck rbf_energy_check(const HopfieldConfig& cfg, const PatternMemory& centers,
                          const Vector& query) {
  cfg.validate();
  check_dims(query, centers.dim());
  const auto n = static_cast<std::size_t>(centers.count());
  std::vector<double> a(n), log_terms(n);
  for (std::size_t i = 0; i < n; ++i)
    a[i] = 0.5 * centers.column(static_cast<Eigen::Index>(i)).squaredNorm();
  std::vector<double> omega(n);
  detail::softmax_unchecked(cfg.beta, a, omega);
  // log φ = log Σ ωᵢ exp(−β/2‖ξ − μᵢ‖²), evaluated as a natural-log lse.
  for (std::size_t i = 0; i < n; ++i)
    log_terms[i] = std::log(omega[i]) -
                   0.5 * cfg.beta * (query - centers.column(static_cast<Eigen::Index>(i))).squaredNorm();
  RbfCheck r;
  r.lhs = -detail::lse_unchecked(1.0, log_terms) / cfg.beta;
  const double head = -dot_lse(cfg.beta, centers.data(), query) + 0.5 * query.squaredNorm();
  r.rhs = head + detail::lse_unchecked(cfg.beta, a);
  r.diff = std::abs(r.lhs - r.rhs);
  r.bound = head + *std::max_element(a.begin(), a.end()) +
            std::log(static_cast<double>(n)) / cfg.beta;
  return r;
}

void SvmDual::validate() const {
  const Eigen::Index n = patterns.count();
  if (alphas.size() != n || static_cast<Eigen::Index>(targets.size()) != n)
    fail(ErrorCode::kDimensionMismatch, "alphas, targets and patterns differ in length");
  if (!patterns.normalized())
    fail(ErrorCode::kNotNormalized, "SVM patterns must be unit-norm");
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = alphas(i);
    if (!std::isfinite(a) || a < 0.0)
      fail(ErrorCode::kRange, "alpha " + std::to_string(i) + " is negative or non-finite");
    const int t = targets[static_cast<std::size_t>(i)];
    if (t != 1 && t != -1) fail(ErrorCode::kRange, "targets must be +1 or -1");
    if (a > 0.0) (t == 1 ? pos : neg) = true;
  }
  if (!pos || !neg)
    fail(ErrorCode::kData, "each class needs at least one support vector with alpha > 0");
}

SvmEquiv svm_score_equiv(const HopfieldConfig& cfg, const SvmDual& dual, const Vector& query) {
  cfg.validate();
  dual.validate();
  check_dims(query, dual.patterns.dim());
  const Eigen::Index d = dual.patterns.dim();

  // Per side: log Σ α k (natural log) and the augmented similarity vector.
  std::vector<double> direct_id, direct_aux, hop_id, hop_aux;
  Vector aug_query(d + 1);
  aug_query << query, 1.0;
  for (Eigen::Index i = 0; i < dual.patterns.count(); ++i) {
    const double a = dual.alphas(i);
    if (a == 0.0) continue;
    const auto z = dual.patterns.column(i);
    const double log_term = std::log(a) - 0.5 * cfg.beta * (query - z).squaredNorm();
    Vector aug(d + 1);
    aug << z, std::log(a) / cfg.beta;
    const double hop = aug.dot(aug_query);
    if (dual.targets[static_cast<std::size_t>(i)] == 1) {
      direct_id.push_back(log_term);
      hop_id.push_back(hop);
    } else {
      direct_aux.push_back(log_term);
      hop_aux.push_back(hop);
    }
  }
  SvmEquiv r;
  r.direct = (detail::lse_unchecked(1.0, direct_id) - detail::lse_unchecked(1.0, direct_aux)) /
             cfg.beta;
  r.hopfield = detail::lse_unchecked(cfg.beta, hop_id) - detail::lse_unchecked(cfg.beta, hop_aux);
  r.diff = std::abs(r.direct - r.hopfield);
  return r;
}

}  // namespace hopboost
