#include "hopboost/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "hopboost/parallel.hpp"

namespace hopboost {

const char* error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "ok";
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kUnknownName: return "unknown_name";
    case ErrorCode::kData: return "data";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kNotNormalized: return "not_normalized";
    case ErrorCode::kNonFinite: return "non_finite";
    case ErrorCode::kZeroNorm: return "zero_norm";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kBadMagic: return "bad_magic";
    case ErrorCode::kBadVersion: return "bad_version";
    case ErrorCode::kBadDtype: return "bad_dtype";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kZeroDim: return "zero_dim";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kRange: return "range";
    case ErrorCode::kUnknownKey: return "unknown_key";
    case ErrorCode::kInvalidSimplex: return "invalid_simplex";
    case ErrorCode::kLowAcceptance: return "low_acceptance";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kVerifyFailed: return "verify_failed";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Types

void HopfieldConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta))
    fail(ErrorCode::kRange, "beta must be positive and finite, got " + std::to_string(beta));
}

const char* geometry_name(Geometry g) noexcept {
  return g == Geometry::kSphere ? "sphere" : "euclidean";
}

Geometry parse_geometry(const std::string& name) {
  if (name == "sphere") return Geometry::kSphere;
  if (name == "euclidean") return Geometry::kEuclidean;
  fail(ErrorCode::kRange, "unknown geometry '" + name + "' (expected sphere or euclidean)");
}

bool is_unit_column(const Eigen::Ref<const Eigen::VectorXd>& v) noexcept {
  return std::abs(v.norm() - 1.0) <= kUnitNormTol;
}

bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& m) noexcept {
  return m.allFinite();
}

PatternMemory::PatternMemory(Eigen::MatrixXd data, bool normalized)
    : data_(std::move(data)), normalized_(normalized) {
  if (data_.rows() == 0) fail(ErrorCode::kZeroDim, "pattern dimension is zero");
  if (data_.cols() == 0) fail(ErrorCode::kEmptyInput, "pattern memory holds no patterns");
  if (!data_.allFinite()) fail(ErrorCode::kNonFinite, "pattern memory contains NaN or Inf");
  if (normalized_) {
    for (Eigen::Index i = 0; i < data_.cols(); ++i)
      if (!is_unit_column(data_.col(i)))
        fail(ErrorCode::kNotNormalized, "column " + std::to_string(i) + " is not unit-norm");
  }
}

PatternMemory PatternMemory::detect(Eigen::MatrixXd data) {
  bool unit = data.cols() > 0 && data.rows() > 0;
  for (Eigen::Index i = 0; unit && i < data.cols(); ++i) unit = is_unit_column(data.col(i));
  return PatternMemory(std::move(data), unit);
}

double PatternMemory::max_norm() const { return data_.colwise().norm().maxCoeff(); }

PatternMemory PatternMemory::concat(const PatternMemory& a, const PatternMemory& b) {
  if (a.dim() != b.dim())
    fail(ErrorCode::kDimensionMismatch, "cannot concatenate memories of dimension " +
                                            std::to_string(a.dim()) + " and " +
                                            std::to_string(b.dim()));
  Eigen::MatrixXd joined(a.dim(), a.count() + b.count());
  joined << a.data(), b.data();
  return PatternMemory(std::move(joined), a.normalized() && b.normalized());
}

PatternMemory PatternMemory::select(std::span<const std::size_t> idx) const {
  if (idx.empty()) fail(ErrorCode::kEmptyInput, "empty column selection");
  Eigen::MatrixXd out(dim(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= static_cast<std::size_t>(count()))
      fail(ErrorCode::kRange, "column index " + std::to_string(idx[k]) + " out of range");
    out.col(static_cast<Eigen::Index>(k)) = data_.col(static_cast<Eigen::Index>(idx[k]));
  }
  PatternMemory m(std::move(out), false);
  m.normalized_ = normalized_;
  return m;
}

// ---------------------------------------------------------------------------
// Kernels

namespace detail {

double lse_unchecked(double beta, std::span<const double> z) noexcept {
  double m = z[0];
  for (double v : z) m = std::max(m, v);
  double s = 0.0;
  for (double v : z) s += std::exp(beta * (v - m));
  return m + std::log(s) / beta;
}

void softmax_unchecked(double beta, std::span<const double> z, std::span<double> out) noexcept {
  double m = z[0];
  for (double v : z) m = std::max(m, v);
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(beta * (z[i] - m));
    s += out[i];
  }
  for (std::size_t i = 0; i < z.size(); ++i) out[i] /= s;
}

void similarities(Geometry geom, const Eigen::MatrixXd& memory,
                  const Eigen::Ref<const Vector>& query, std::span<double> out) noexcept {
  const Eigen::Index n = memory.cols();
  if (geom == Geometry::kSphere) {
    for (Eigen::Index i = 0; i < n; ++i) out[i] = memory.col(i).dot(query);
  } else {
    for (Eigen::Index i = 0; i < n; ++i) out[i] = -0.5 * (query - memory.col(i)).squaredNorm();
  }
}

BoundaryTerms boundary_terms(double beta, Geometry geom, const Eigen::MatrixXd& id_mem,
                             const Eigen::MatrixXd& aux_mem,
                             const Eigen::Ref<const Vector>& query) {
  const auto n = static_cast<std::size_t>(id_mem.cols());
  const auto m = static_cast<std::size_t>(aux_mem.cols());
  std::vector<double> sims(n + m);
  std::span<double> all(sims);
  similarities(geom, id_mem, query, all.first(n));
  similarities(geom, aux_mem, query, all.subspan(n));
  BoundaryTerms t;
  t.lse_id = lse_unchecked(beta, all.first(n));
  t.lse_aux = lse_unchecked(beta, all.subspan(n));
  t.lse_joint = lse_unchecked(beta, all);
  return t;
}

namespace {

void check_query(const HopfieldConfig& cfg, Geometry geom, const Eigen::Ref<const Vector>& query,
                 Eigen::Index dim) {
  if (query.size() != dim)
    fail(ErrorCode::kDimensionMismatch, "query has dimension " + std::to_string(query.size()) +
                                            ", memory has " + std::to_string(dim));
  if (!query.allFinite()) fail(ErrorCode::kNonFinite, "query contains NaN or Inf");
  if (cfg.normalize_inputs && geom == Geometry::kSphere && !is_unit_column(query))
    fail(ErrorCode::kNotNormalized, "query is not unit-norm but normalization is required");
}

void check_memory(const HopfieldConfig& cfg, Geometry geom, const PatternMemory& mem,
                  const char* which) {
  if (cfg.normalize_inputs && geom == Geometry::kSphere && !mem.normalized())
    fail(ErrorCode::kNotNormalized,
         std::string(which) + " memory is not unit-normalized but normalization is required");
}

}  // namespace

void check_single(const HopfieldConfig& cfg, Geometry geom, const Eigen::Ref<const Vector>& query,
                  const PatternMemory& memory) {
  cfg.validate();
  check_memory(cfg, geom, memory, "pattern");
  check_query(cfg, geom, query, memory.dim());
}

void check_pair(const HopfieldConfig& cfg, Geometry geom, const Eigen::Ref<const Vector>& query,
                const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  cfg.validate();
  if (id_mem.dim() != aux_mem.dim())
    fail(ErrorCode::kDimensionMismatch, "ID memory has dimension " + std::to_string(id_mem.dim()) +
                                            ", AUX memory has " + std::to_string(aux_mem.dim()));
  check_memory(cfg, geom, id_mem, "ID");
  check_memory(cfg, geom, aux_mem, "AUX");
  check_query(cfg, geom, query, id_mem.dim());
}

}  // namespace detail

double log_cosh(double a) noexcept {
  const double x = std::abs(a);
  return x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2;
}

double sigmoid(double t) noexcept {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------------------
// Public operations

namespace {

void check_vector(std::span<const double> z) {
  if (z.empty()) fail(ErrorCode::kEmptyInput, "lse/softmax of an empty vector");
  for (double v : z)
    if (!std::isfinite(v)) fail(ErrorCode::kNonFinite, "lse/softmax input contains NaN or Inf");
}

}  // namespace

double lse(const HopfieldConfig& cfg, std::span<const double> z) {
  cfg.validate();
  check_vector(z);
  return detail::lse_unchecked(cfg.beta, z);
}

Vector softmax(const HopfieldConfig& cfg, std::span<const double> z) {
  cfg.validate();
  check_vector(z);
  Vector out(static_cast<Eigen::Index>(z.size()));
  detail::softmax_unchecked(cfg.beta, z, std::span<double>(out.data(), z.size()));
  return out;
}

double mhe(const HopfieldConfig& cfg, const Vector& query, const PatternMemory& memory,
           bool include_constant) {
  detail::check_single(cfg, Geometry::kSphere, query, memory);
  std::vector<double> sims(static_cast<std::size_t>(memory.count()));
  detail::similarities(Geometry::kSphere, memory.data(), query, sims);
  double e = -detail::lse_unchecked(cfg.beta, sims) + 0.5 * query.squaredNorm();
  if (include_constant) {
    const double big_m = memory.max_norm();
    e += std::log(static_cast<double>(memory.count())) / cfg.beta + 0.5 * big_m * big_m;
  }
  return e;
}

double boundary_energy(const HopfieldConfig& cfg, Geometry geom, const Vector& query,
                       const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  detail::check_pair(cfg, geom, query, id_mem, aux_mem);
  const auto t = detail::boundary_terms(cfg.beta, geom, id_mem.data(), aux_mem.data(), query);
  return -2.0 * t.lse_joint + t.lse_id + t.lse_aux;
}

double boundary_energy(const HopfieldConfig& cfg, const Vector& query,
                       const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  return boundary_energy(cfg, Geometry::kSphere, query, id_mem, aux_mem);
}

double boundary_energy_logcosh(const HopfieldConfig& cfg, const Vector& query,
                               const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  detail::check_pair(cfg, Geometry::kSphere, query, id_mem, aux_mem);
  const auto t =
      detail::boundary_terms(cfg.beta, Geometry::kSphere, id_mem.data(), aux_mem.data(), query);
  const double a = 0.5 * cfg.beta * (t.lse_id - t.lse_aux);
  return -2.0 / cfg.beta * log_cosh(a) - 2.0 / cfg.beta * std::numbers::ln2;
}

double score(const HopfieldConfig& cfg, Geometry geom, const Vector& query,
             const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  detail::check_pair(cfg, geom, query, id_mem, aux_mem);
  const auto n = static_cast<std::size_t>(id_mem.count());
  const auto m = static_cast<std::size_t>(aux_mem.count());
  std::vector<double> sims(std::max(n, m));
  detail::similarities(geom, id_mem.data(), query, std::span(sims).first(n));
  const double lx = detail::lse_unchecked(cfg.beta, std::span(sims).first(n));
  detail::similarities(geom, aux_mem.data(), query, std::span(sims).first(m));
  const double lo = detail::lse_unchecked(cfg.beta, std::span(sims).first(m));
  return lx - lo;
}

double score(const HopfieldConfig& cfg, const Vector& query, const PatternMemory& id_mem,
             const PatternMemory& aux_mem) {
  return score(cfg, Geometry::kSphere, query, id_mem, aux_mem);
}

namespace {

template <typename Fn>
Vector per_column(const QueryBatch& queries, Fn fn) {
  Vector out(queries.count());
  parallel_for(static_cast<std::size_t>(queries.count()), [&](std::size_t i) {
    out(static_cast<Eigen::Index>(i)) = fn(queries.column(static_cast<Eigen::Index>(i)));
  });
  return out;
}

}  // namespace

Vector boundary_energy_batch(const HopfieldConfig& cfg, Geometry geom, const QueryBatch& queries,
                             const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  return per_column(queries, [&](const Vector& q) {
    return boundary_energy(cfg, geom, q, id_mem, aux_mem);
  });
}

Vector boundary_energy_batch(const HopfieldConfig& cfg, const QueryBatch& queries,
                             const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  return boundary_energy_batch(cfg, Geometry::kSphere, queries, id_mem, aux_mem);
}

Vector score_batch(const HopfieldConfig& cfg, Geometry geom, const QueryBatch& queries,
                   const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  return per_column(queries, [&](const Vector& q) { return score(cfg, geom, q, id_mem, aux_mem); });
}

Vector score_batch(const HopfieldConfig& cfg, const QueryBatch& queries,
                   const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  return score_batch(cfg, Geometry::kSphere, queries, id_mem, aux_mem);
}

Posterior posterior_pair(const HopfieldConfig& cfg, const Vector& query,
                         const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  const double s = score(cfg, query, id_mem, aux_mem);
  // The smaller probability carries the precision; the other is its complement.
  Posterior p;
  if (s >= 0.0) {
    p.p_aux = sigmoid(-cfg.beta * s);
    p.p_id = 1.0 - p.p_aux;
  } else {
    p.p_id = sigmoid(cfg.beta * s);
    p.p_aux = 1.0 - p.p_id;
  }
  return p;
}

Decision decide(double score, double gamma) noexcept {
  return score >= gamma ? Decision::kId : Decision::kOod;
}

double gaussian_mixture_logdensity(const HopfieldConfig& cfg, const Vector& query,
                                   const PatternMemory& centers) {
  cfg.validate();
  if (query.size() != centers.dim())
    fail(ErrorCode::kDimensionMismatch, "query has dimension " + std::to_string(query.size()) +
                                            ", centers have " + std::to_string(centers.dim()));
  if (!query.allFinite()) fail(ErrorCode::kNonFinite, "query contains NaN or Inf");
  const double d = static_cast<double>(query.size());
  const double log_norm = -0.5 * d * std::log(2.0 * std::numbers::pi / cfg.beta);
  std::vector<double> logp(static_cast<std::size_t>(centers.count()));
  for (Eigen::Index i = 0; i < centers.count(); ++i)
    logp[static_cast<std::size_t>(i)] =
        log_norm - 0.5 * cfg.beta * (query - centers.column(i)).squaredNorm();
  // natural-log logsumexp, i.e. lse at unit temperature
  return detail::lse_unchecked(1.0, logp) - std::log(static_cast<double>(centers.count()));
}

double euclidean_lse(const HopfieldConfig& cfg, const Vector& query, const PatternMemory& memory) {
  detail::check_single(cfg, Geometry::kEuclidean, query, memory);
  std::vector<double> sims(static_cast<std::size_t>(memory.count()));
  detail::similarities(Geometry::kEuclidean, memory.data(), query, sims);
  return detail::lse_unchecked(cfg.beta, sims);
}

double euclidean_boundary_energy(const HopfieldConfig& cfg, const Vector& query,
                                 const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  return boundary_energy(cfg, Geometry::kEuclidean, query, id_mem, aux_mem);
}

double euclidean_score(const HopfieldConfig& cfg, const Vector& query,
                       const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  return score(cfg, Geometry::kEuclidean, query, id_mem, aux_mem);
}

PatternMemory normalize_columns(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() == 0) fail(ErrorCode::kZeroDim, "pattern dimension is zero");
  if (!matrix.allFinite()) fail(ErrorCode::kNonFinite, "matrix contains NaN or Inf");
  Eigen::MatrixXd out = matrix;
  for (Eigen::Index i = 0; i < out.cols(); ++i) {
    const double n = out.col(i).norm();
    if (n < 1e-12)
      fail(ErrorCode::kZeroNorm, "column " + std::to_string(i) + " has zero norm");
    out.col(i) /= n;
  }
  return PatternMemory(std::move(out), true);
}

}  // namespace hopboost
