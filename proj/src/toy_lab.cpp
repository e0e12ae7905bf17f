#include "hopboost/toy_lab.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hopboost/parallel.hpp"
#include "hopboost/rng.hpp"

namespace hopboost {

SphereScene gen_sphere_scene(std::size_t d, std::size_t n_id, std::size_t n_aux,
                             double concentration, std::uint64_t seed) {
  if (d < 2) fail(ErrorCode::kRange, "sphere scenes need d >= 2");
  if (n_id < 1 || n_aux < 1) fail(ErrorCode::kRange, "pool sizes must be >= 1");
  if (!(concentration > 0.0)) fail(ErrorCode::kRange, "concentration must be positive");

  const auto di = static_cast<Eigen::Index>(d);
  Vector pole = Vector::Zero(di);
  pole(di - 1) = 1.0;

  Rng id_rng(mix_seed(seed, 1));
  Eigen::MatrixXd ids(di, static_cast<Eigen::Index>(n_id));
  for (Eigen::Index i = 0; i < ids.cols(); ++i) {
    Vector v = pole;
    if (std::isfinite(concentration))
      for (Eigen::Index k = 0; k < di; ++k) v(k) += id_rng.normal() / concentration;
    const double n = v.norm();
    if (n < 1e-12) fail(ErrorCode::kDegenerate, "ID draw collapsed to the origin");
    ids.col(i) = v / n;
  }

  const double cap = std::cos(std::min(std::numbers::pi / 2.0, 2.0 / concentration));
  Rng aux_rng(mix_seed(seed, 2));
  Eigen::MatrixXd aux(di, static_cast<Eigen::Index>(n_aux));
  for (Eigen::Index j = 0; j < aux.cols();) {
    Vector v(di);
    for (Eigen::Index k = 0; k < di; ++k) v(k) = aux_rng.normal();
    const double n = v.norm();
    if (n < 1e-12) continue;
    v /= n;
    if (v.dot(pole) < cap) aux.col(j++) = v;
  }
  return SphereScene{PatternMemory(std::move(ids), true), PatternMemory(std::move(aux), true),
                     pole, concentration};
}

PlanarScene gen_planar_blobs(std::size_t n_per_class, double separation, double spread,
                             std::uint64_t seed) {
  if (n_per_class < 1) fail(ErrorCode::kRange, "n_per_class must be >= 1");
  if (!(separation > 0.0) || !std::isfinite(separation))
    fail(ErrorCode::kRange, "separation must be positive");
  if (!(spread >= 0.0) || !std::isfinite(spread)) fail(ErrorCode::kRange, "spread must be >= 0");
  const auto n = static_cast<Eigen::Index>(n_per_class);
  Rng rng(mix_seed(seed, 3));
  Eigen::MatrixXd ids(2, n), aux(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ids(0, i) = separation / 2.0 + spread * rng.normal();
    ids(1, i) = spread * rng.normal();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    aux(0, i) = -separation / 2.0 + spread * rng.normal();
    aux(1, i) = spread * rng.normal();
  }
  return PlanarScene{PatternMemory(std::move(ids)), PatternMemory(std::move(aux)), {}};
}

PlanarScene gen_interaction_scene(std::size_t n_per_class, std::size_t n_aux, double separation,
                                  double spread, double box, std::uint64_t seed) {
  if (n_per_class < 1 || n_aux < 1) fail(ErrorCode::kRange, "pool sizes must be >= 1");
  if (!(separation > 0.0) || !(spread >= 0.0) || !(box > 0.0))
    fail(ErrorCode::kRange, "separation and box must be positive, spread >= 0");
  const auto n = static_cast<Eigen::Index>(n_per_class);
  Rng rng(mix_seed(seed, 4));
  Eigen::MatrixXd ids(2, 2 * n);
  std::vector<int> labels(static_cast<std::size_t>(2 * n));
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    const int y = i < n ? 0 : 1;
    labels[static_cast<std::size_t>(i)] = y;
    ids(0, i) = (y == 0 ? -1.0 : 1.0) * separation / 2.0 + spread * rng.normal();
    ids(1, i) = spread * rng.normal();
  }
  Eigen::MatrixXd aux(2, static_cast<Eigen::Index>(n_aux));
  for (Eigen::Index j = 0; j < aux.cols(); ++j) {
    aux(0, j) = box * (2.0 * rng.uniform() - 1.0);
    aux(1, j) = box * (2.0 * rng.uniform() - 1.0);
  }
  return PlanarScene{PatternMemory(std::move(ids)), PatternMemory(std::move(aux)),
                     std::move(labels)};
}

PatternMemory sphere_grid(std::size_t d, std::size_t n) {
  if (n < 1) fail(ErrorCode::kRange, "grid size must be >= 1");
  const auto ni = static_cast<Eigen::Index>(n);
  const double dn = static_cast<double>(n);
  if (d == 2) {
    Eigen::MatrixXd g(2, ni);
    for (Eigen::Index i = 0; i < ni; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / dn;
      g(0, i) = std::cos(t);
      g(1, i) = std::sin(t);
    }
    return normalize_columns(g);
  }
  if (d == 3) {
    const double golden = std::numbers::pi * (1.0 + std::sqrt(5.0));
    Eigen::MatrixXd g(3, ni);
    for (Eigen::Index i = 0; i < ni; ++i) {
      const double k = static_cast<double>(i) + 0.5;
      const double phi = std::acos(1.0 - 2.0 * k / dn);
      const double th = golden * k;
      g(0, i) = std::cos(th) * std::sin(phi);
      g(1, i) = std::sin(th) * std::sin(phi);
      g(2, i) = std::cos(phi);
    }
    return normalize_columns(g);
  }
  fail(ErrorCode::kRange, "sphere grids exist for d = 2 or 3, got " + std::to_string(d));
}

PatternMemory planar_grid(double lo, double hi, std::size_t res) {
  if (res < 2 || !(hi > lo)) fail(ErrorCode::kRange, "planar grid needs res >= 2 and hi > lo");
  const auto r = static_cast<Eigen::Index>(res);
  Eigen::MatrixXd g(2, r * r);
  const double step = (hi - lo) / static_cast<double>(res - 1);
  for (Eigen::Index row = 0; row < r; ++row)
    for (Eigen::Index col = 0; col < r; ++col) {
      g(0, row * r + col) = lo + step * static_cast<double>(col);
      g(1, row * r + col) = lo + step * static_cast<double>(row);
    }
  return PatternMemory(std::move(g));
}

double boundary_agreement(const HopfieldConfig& cfg, Geometry geom, const PatternMemory& full_id,
                          const PatternMemory& full_aux, const PatternMemory& sub_id,
                          const PatternMemory& sub_aux, const QueryBatch& grid) {
  const Vector full = score_batch(cfg, geom, grid, full_id, full_aux);
  const Vector sub = score_batch(cfg, geom, grid, sub_id, sub_aux);
  std::size_t agree = 0;
  for (Eigen::Index i = 0; i < full.size(); ++i)
    agree += decide(full(i), 0.0) == decide(sub(i), 0.0) ? 1 : 0;
  return static_cast<double>(agree) / static_cast<double>(full.size());
}

Vector heatmap_field(const HopfieldConfig& cfg, Geometry geom, const PatternMemory& id_mem,
                     const PatternMemory& aux_mem, const QueryBatch& grid) {
  return (cfg.beta * boundary_energy_batch(cfg, geom, grid, id_mem, aux_mem).array()).exp();
}

VarianceStat orthogonal_variance_stat(const Eigen::MatrixXd& id_patterns,
                                      const Eigen::MatrixXd& aux_patterns) {
  const Eigen::Index d = id_patterns.rows();
  if (d < 2 || aux_patterns.rows() != d)
    fail(ErrorCode::kRange, "variance statistic needs two classes of the same dimension >= 2");
  const Eigen::Index total = id_patterns.cols() + aux_patterns.cols();
  if (id_patterns.cols() < 1 || aux_patterns.cols() < 1 || total < 3)
    fail(ErrorCode::kRange, "variance statistic needs at least three patterns");
  const Vector mx = id_patterns.rowwise().mean();
  const Vector mo = aux_patterns.rowwise().mean();
  Vector axis = mx - mo;
  const double len = axis.norm();
  if (len < 1e-12) fail(ErrorCode::kDegenerate, "class means coincide");
  axis /= len;

  Eigen::MatrixXd centered(d, total);
  centered << id_patterns.colwise() - mx, aux_patterns.colwise() - mo;
  const double dof = static_cast<double>(total - 2 > 0 ? total - 2 : 1);
  const Eigen::MatrixXd cov = centered * centered.transpose() / dof;
  VarianceStat s;
  s.var_orth = axis.dot(cov * axis);
  s.var_par = (cov.trace() - s.var_orth) / static_cast<double>(d - 1);
  return s;
}

double cross_class_dot(const Eigen::MatrixXd& id_patterns, const Eigen::MatrixXd& aux_patterns) {
  if (id_patterns.rows() != aux_patterns.rows())
    fail(ErrorCode::kDimensionMismatch, "class dimensions differ");
  if (id_patterns.cols() < 1 || aux_patterns.cols() < 1)
    fail(ErrorCode::kEmptyInput, "empty class");
  return id_patterns.rowwise().mean().dot(aux_patterns.rowwise().mean());
}

ResamplingTrial resampling_trial(const HopfieldConfig& cfg, Geometry geom,
                                 const PatternMemory& id_pool, const PatternMemory& aux_pool,
                                 const QueryBatch& grid, std::size_t n, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::kUsage, "subsample size must be >= 1");
  Rng rng(mix_seed(seed, 5));
  std::vector<std::size_t> id_idx(n), uni_idx(n);
  for (auto& i : id_idx) i = rng.below(static_cast<std::uint64_t>(id_pool.count()));
  for (auto& i : uni_idx) i = rng.below(static_cast<std::uint64_t>(aux_pool.count()));
  const Vector energies = boundary_energy_batch(cfg, geom, aux_pool, id_pool, aux_pool);
  SampleWeights w;
  w.weights = softmax(cfg, std::span<const double>(energies.data(),
                                                   static_cast<std::size_t>(energies.size())));
  const auto wt_idx = weighted_sample(w, n, mix_seed(seed, 6));

  const PatternMemory sub_id = id_pool.select(id_idx);
  ResamplingTrial r;
  r.agreement_weighted =
      boundary_agreement(cfg, geom, id_pool, aux_pool, sub_id, aux_pool.select(wt_idx), grid);
  r.agreement_uniform =
      boundary_agreement(cfg, geom, id_pool, aux_pool, sub_id, aux_pool.select(uni_idx), grid);
  for (std::size_t k = 0; k < n; ++k) {
    r.mean_eb_weighted += energies(static_cast<Eigen::Index>(wt_idx[k]));
    r.mean_eb_uniform += energies(static_cast<Eigen::Index>(uni_idx[k]));
  }
  r.mean_eb_weighted /= static_cast<double>(n);
  r.mean_eb_uniform /= static_cast<double>(n);
  return r;
}

}  // namespace hopboost
