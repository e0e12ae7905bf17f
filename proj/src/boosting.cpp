#include "hopboost/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "hopboost/parallel.hpp"
#include "hopboost/rng.hpp"

namespace hopboost {

void SampleWeights::validate() const {
  if (weights.size() == 0) fail(ErrorCode::kInvalidSimplex, "weights are empty");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double w = weights(i);
    if (!std::isfinite(w) || w < 0.0)
      fail(ErrorCode::kInvalidSimplex, "weight " + std::to_string(i) + " is negative or non-finite");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    fail(ErrorCode::kInvalidSimplex, "weights sum to " + std::to_string(sum) + ", not 1");
}

void ToyConfig::validate() const {
  hopfield().validate();
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail(ErrorCode::kRange, "lambda must be >= 0");
  if (!(lr > 0.0) || !std::isfinite(lr)) fail(ErrorCode::kRange, "lr must be positive");
  if (!(lr_growth > 0.0) || !std::isfinite(lr_growth))
    fail(ErrorCode::kRange, "lr_growth must be positive");
  if (steps < 1) fail(ErrorCode::kRange, "steps must be >= 1");
  if (resample_every < 1) fail(ErrorCode::kRange, "resample_every must be >= 1");
  if (batch_n < 1) fail(ErrorCode::kRange, "batch_n must be >= 1");
  if (snapshot_every < 1) fail(ErrorCode::kRange, "snapshot_every must be >= 1");
}

HopfieldConfig ToyConfig::hopfield() const {
  return HopfieldConfig{beta, geometry == Geometry::kSphere};
}

// ---------------------------------------------------------------------------

SampleWeights update_weights(const HopfieldConfig& cfg, Geometry geom, const QueryBatch& pool,
                             const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  const Vector e = boundary_energy_batch(cfg, geom, pool, id_mem, aux_mem);
  SampleWeights w;
  w.weights = softmax(cfg, std::span<const double>(e.data(), static_cast<std::size_t>(e.size())));
  return w;
}

SampleWeights update_weights(const HopfieldConfig& cfg, const QueryBatch& pool,
                             const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  return update_weights(cfg, Geometry::kSphere, pool, id_mem, aux_mem);
}

std::vector<std::size_t> weighted_sample(const SampleWeights& weights, std::size_t n,
                                         std::uint64_t seed) {
  weights.validate();
  if (n == 0) fail(ErrorCode::kUsage, "sample size must be >= 1");
  std::vector<double> cdf(static_cast<std::size_t>(weights.weights.size()));
  std::partial_sum(weights.weights.data(), weights.weights.data() + cdf.size(), cdf.begin());
  const double total = cdf.back();
  Rng rng(seed);
  std::vector<std::size_t> out(n);
  for (auto& idx : out) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    // Skip trailing zero-weight entries that share the final cumulative value.
    if (it == cdf.end()) it = std::lower_bound(cdf.begin(), cdf.end(), total);
    idx = static_cast<std::size_t>(it - cdf.begin());
  }
  return out;
}

// ---------------------------------------------------------------------------

double l_ood(const HopfieldConfig& cfg, Geometry geom, const PatternMemory& id_batch,
             const PatternMemory& aux_batch) {
  const PatternMemory joint = PatternMemory::concat(id_batch, aux_batch);
  const Vector e = boundary_energy_batch(cfg, geom, joint, id_batch, aux_batch);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) sum += e(i);
  return sum / static_cast<double>(e.size());
}

double l_ood(const HopfieldConfig& cfg, const PatternMemory& id_batch,
             const PatternMemory& aux_batch) {
  return l_ood(cfg, Geometry::kSphere, id_batch, aux_batch);
}

MemoryGrad l_ood_gradient(const HopfieldConfig& cfg, Geometry geom, const PatternMemory& id_batch,
                          const PatternMemory& aux_batch) {
  const PatternMemory joint = PatternMemory::concat(id_batch, aux_batch);
  for (Eigen::Index j = 0; j < joint.count(); ++j)
    detail::check_pair(cfg, geom, joint.column(j), id_batch, aux_batch);
  const Eigen::Index total = joint.count();
  const Eigen::MatrixXd& z = joint.data();

  // Column j holds ∂E_b(z_j)/∂s_k for every memory column k.
  Eigen::MatrixXd coeff(total, total);
  parallel_for(static_cast<std::size_t>(total), [&](std::size_t j) {
    const auto jj = static_cast<Eigen::Index>(j);
    coeff.col(jj) =
        detail::boundary_coefficients(cfg.beta, geom, id_batch.data(), aux_batch.data(), z.col(jj));
  });

  // Query part: Σ_k c_jk ∂s_k/∂ξ at ξ = z_j; memory part: Σ_j c_jk ∂s_k/∂z_k.
  Eigen::MatrixXd grad;
  if (geom == Geometry::kSphere) {
    grad = z * (coeff + coeff.transpose());
  } else {
    const Vector col_sum = coeff.colwise().sum().transpose();
    const Vector row_sum = coeff.rowwise().sum();
    grad = z * coeff - z * col_sum.asDiagonal();
    grad += z * coeff.transpose() - z * row_sum.asDiagonal();
  }
  grad /= static_cast<double>(total);

  MemoryGrad g;
  g.d_id = grad.leftCols(id_batch.count());
  g.d_aux = grad.rightCols(aux_batch.count());
  return g;
}

// ---------------------------------------------------------------------------

LinearHead LinearHead::zeros(Eigen::Index classes, Eigen::Index dim) {
  return LinearHead{Eigen::MatrixXd::Zero(classes, dim), Vector::Zero(classes)};
}

CrossEntropyGrad cross_entropy_gradient(const Eigen::MatrixXd& inputs, std::span<const int> labels,
                                        const LinearHead& head) {
  const Eigen::Index n = inputs.cols();
  const Eigen::Index k = head.weights.rows();
  if (static_cast<std::size_t>(n) != labels.size())
    fail(ErrorCode::kRange, "label count " + std::to_string(labels.size()) +
                                " does not match batch size " + std::to_string(n));
  if (head.weights.cols() != inputs.rows())
    fail(ErrorCode::kDimensionMismatch, "classifier head dimension does not match patterns");
  for (int y : labels)
    if (y < 0 || y >= k) fail(ErrorCode::kRange, "label " + std::to_string(y) + " out of range");

  const Eigen::MatrixXd logits = (head.weights * inputs).colwise() + head.bias;
  Eigen::MatrixXd d_logits(k, n);
  CrossEntropyGrad g;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::span<const double> z(logits.col(i).data(), static_cast<std::size_t>(k));
    const double norm = detail::lse_unchecked(1.0, z);
    const int y = labels[static_cast<std::size_t>(i)];
    loss += norm - logits(y, i);
    for (Eigen::Index c = 0; c < k; ++c) d_logits(c, i) = std::exp(logits(c, i) - norm);
    d_logits(y, i) -= 1.0;
  }
  d_logits /= static_cast<double>(n);
  g.loss = loss / static_cast<double>(n);
  g.d_inputs = head.weights.transpose() * d_logits;
  g.d_weights = d_logits * inputs.transpose();
  g.d_bias = d_logits.rowwise().sum();
  return g;
}

CompositeLoss composite_loss(const ToyConfig& cfg, const PatternMemory& id_batch,
                             const PatternMemory& aux_batch, std::span<const int> labels,
                             const LinearHead& head) {
  cfg.validate();
  CompositeLoss out;
  out.ce = cross_entropy_gradient(id_batch.data(), labels, head).loss;
  out.ood = l_ood(cfg.hopfield(), cfg.geometry, id_batch, aux_batch);
  out.total = out.ce + cfg.lambda * out.ood;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::size_t> all_indices(Eigen::Index n) {
  std::vector<std::size_t> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

// n distinct indices from [0, pool) by a partial Fisher–Yates shuffle.
std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t pool, std::size_t n) {
  std::vector<std::size_t> v(pool);
  std::iota(v.begin(), v.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) std::swap(v[i], v[i + rng.below(pool - i)]);
  v.resize(n);
  return v;
}

std::vector<int> pick_labels(std::span<const int> labels, const std::vector<std::size_t>& idx) {
  std::vector<int> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = labels[idx[i]];
  return out;
}

void renormalize(Eigen::MatrixXd& pool, const std::vector<std::size_t>& touched) {
  for (std::size_t i : touched) {
    auto col = pool.col(static_cast<Eigen::Index>(i));
    const double n = col.norm();
    if (n < 1e-12) fail(ErrorCode::kDegenerate, "pattern collapsed to the origin");
    col /= n;
  }
}

}  // namespace

ToyTrajectory run_toy_boosting(const ToyConfig& cfg, const PatternMemory& id_pool,
                               const PatternMemory& aux_pool, bool enable_ce,
                               std::span<const int> labels) {
  cfg.validate();
  const HopfieldConfig hcfg = cfg.hopfield();
  const Geometry geom = cfg.geometry;
  const bool sphere = geom == Geometry::kSphere;
  if (id_pool.dim() != aux_pool.dim())
    fail(ErrorCode::kDimensionMismatch, "ID and AUX pools differ in dimension");
  if (sphere && (!id_pool.normalized() || !aux_pool.normalized()))
    fail(ErrorCode::kNotNormalized, "sphere geometry requires unit-norm pools");
  if (!cfg.full_batch && (cfg.batch_n > static_cast<std::size_t>(id_pool.count()) ||
                          cfg.batch_n > static_cast<std::size_t>(aux_pool.count())))
    fail(ErrorCode::kRange, "batch_n exceeds a pool size");
  if (enable_ce && labels.size() != static_cast<std::size_t>(id_pool.count()))
    fail(ErrorCode::kRange, "cross-entropy needs one label per ID pattern");

  ToyTrajectory traj;
  traj.config = cfg;
  traj.ce_enabled = enable_ce;

  Eigen::MatrixXd ids = id_pool.data();
  Eigen::MatrixXd aux = aux_pool.data();
  LinearHead head;
  if (enable_ce) {
    const int max_label = *std::max_element(labels.begin(), labels.end());
    head = LinearHead::zeros(std::max(max_label, 0) + 1, id_pool.dim());
  }

  const auto id_all = all_indices(id_pool.count());
  const auto aux_all = all_indices(aux_pool.count());
  Rng id_rng(mix_seed(cfg.seed, 1));
  SampleWeights weights;
  std::vector<std::size_t> id_idx, aux_idx;
  double lr = cfg.lr;

  const auto snapshot = [&](std::size_t step) {
    const PatternMemory x(ids, false), o(aux, false);
    ToySnapshot s;
    s.step = step;
    s.id_patterns = ids;
    s.aux_patterns = aux;
    s.id_indices = id_idx;
    s.aux_indices = aux_idx;
    s.weights = weights.weights;
    s.l_ood = l_ood(HopfieldConfig{hcfg.beta, false}, geom, x, o);
    if (enable_ce) s.ce = cross_entropy_gradient(ids, labels, head).loss;
    traj.snapshots.push_back(std::move(s));
  };

  const auto refresh_weights = [&] {
    const PatternMemory x(ids, sphere), o(aux, sphere);
    weights = update_weights(hcfg, geom, o, x, o);
  };

  refresh_weights();
  snapshot(0);

  for (std::size_t t = 0; t < cfg.steps; ++t) {
    // weight
    if (t > 0 && t % cfg.resample_every == 0) refresh_weights();
    if (cfg.full_batch) {
      id_idx = id_all;
      aux_idx = aux_all;
    } else {
      id_idx = sample_without_replacement(id_rng, id_all.size(), cfg.batch_n);
      aux_idx = weighted_sample(weights, cfg.batch_n, mix_seed(cfg.seed, 2 + t));
    }
    const PatternMemory xs = PatternMemory(ids, sphere).select(id_idx);
    const PatternMemory os = PatternMemory(aux, sphere).select(aux_idx);

    // evaluate
    MemoryGrad g = l_ood_gradient(hcfg, geom, xs, os);
    double loss = l_ood(hcfg, geom, xs, os);
    CrossEntropyGrad ce;
    if (enable_ce) {
      const auto y = pick_labels(labels, id_idx);
      ce = cross_entropy_gradient(xs.data(), y, head);
      g.d_id *= cfg.lambda;
      g.d_aux *= cfg.lambda;
      g.d_id += ce.d_inputs;
      loss = ce.loss + cfg.lambda * loss;
    }
    traj.batch_loss.push_back(loss);

    // update: gradients of repeated draws accumulate on the same pattern
    for (std::size_t k = 0; k < id_idx.size(); ++k)
      ids.col(static_cast<Eigen::Index>(id_idx[k])) -= lr * g.d_id.col(static_cast<Eigen::Index>(k));
    for (std::size_t k = 0; k < aux_idx.size(); ++k)
      aux.col(static_cast<Eigen::Index>(aux_idx[k])) -=
          lr * g.d_aux.col(static_cast<Eigen::Index>(k));
    if (enable_ce) {
      head.weights -= lr * ce.d_weights;
      head.bias -= lr * ce.d_bias;
    }
    if (sphere) {
      renormalize(ids, id_idx);
      renormalize(aux, aux_idx);
    }
    if (!ids.allFinite() || !aux.allFinite())
      fail(ErrorCode::kNonFinite, "patterns diverged at step " + std::to_string(t + 1));
    lr *= cfg.lr_growth;

    if ((t + 1) % cfg.snapshot_every == 0) snapshot(t + 1);
  }

  if (enable_ce) {
    traj.head_weights = head.weights;
    traj.head_bias = head.bias;
  }
  return traj;
}

// ---------------------------------------------------------------------------

namespace {

double margin(const Eigen::MatrixXd& x, const Eigen::MatrixXd& o, double mu_norm) {
  const Vector theta = x.rowwise().mean() - o.rowwise().mean();
  const double n = theta.norm();
  if (n == 0.0) fail(ErrorCode::kDegenerate, "θ vanished");
  return mu_norm * theta(0) / n;  // μ = ‖μ‖·e₁
}

}  // namespace

BoundaryMcSummary boundary_mc_experiment(std::size_t d, double mu_norm, double sigma, double eps,
                                         std::size_t n_per_class, std::size_t trials,
                                         std::uint64_t seed) {
  if (d < 1) fail(ErrorCode::kRange, "dimension must be >= 1");
  if (n_per_class < 1 || trials < 1) fail(ErrorCode::kRange, "n and trials must be >= 1");
  if (!(sigma > 0.0) || !(mu_norm > 0.0) || !(eps > 0.0))
    fail(ErrorCode::kRange, "mu_norm, sigma and eps must be positive");
  if (mu_norm / sigma < kMinSnr)
    fail(ErrorCode::kRange, "signal-to-noise ratio ‖μ‖/σ = " + std::to_string(mu_norm / sigma) +
                                " is below " + std::to_string(kMinSnr));

  // Filter |2μᵀo| <= εσ² acts on the μ-component only: |o₁| <= b with
  // o₁ ~ N(−‖μ‖, σ²).
  const double b = eps * sigma * sigma / (2.0 * mu_norm);
  const double s2 = sigma * std::numbers::sqrt2;
  BoundaryMcSummary out;
  out.acceptance = 0.5 * (std::erfc((mu_norm - b) / s2) - std::erfc((mu_norm + b) / s2));
  if (out.acceptance < 1e-4)
    fail(ErrorCode::kLowAcceptance, "boundary filter acceptance " + std::to_string(out.acceptance) +
                                        " is below 1e-4; use a larger eps");

  const auto di = static_cast<Eigen::Index>(d);
  const auto ni = static_cast<Eigen::Index>(n_per_class);
  out.margin_plain.resize(trials);
  out.margin_filtered.resize(trials);
  parallel_for(trials, [&](std::size_t t) {
    const std::uint64_t trial_seed = mix_seed(seed, t);
    Rng rx(mix_seed(trial_seed, 0)), rp(mix_seed(trial_seed, 1)), rf(mix_seed(trial_seed, 2));
    Eigen::MatrixXd x(di, ni), plain(di, ni), filtered(di, ni);
    for (Eigen::Index i = 0; i < ni; ++i)
      for (Eigen::Index k = 0; k < di; ++k) x(k, i) = (k == 0 ? mu_norm : 0.0) + sigma * rx.normal();
    for (Eigen::Index i = 0; i < ni; ++i)
      for (Eigen::Index k = 0; k < di; ++k)
        plain(k, i) = (k == 0 ? -mu_norm : 0.0) + sigma * rp.normal();
    for (Eigen::Index i = 0; i < ni; ++i) {
      double o1;
      do {
        o1 = -mu_norm + sigma * rf.normal();
      } while (std::abs(2.0 * mu_norm * o1) > eps * sigma * sigma);
      filtered(0, i) = o1;
      for (Eigen::Index k = 1; k < di; ++k) filtered(k, i) = sigma * rf.normal();
    }
    out.margin_plain[t] = margin(x, plain, mu_norm);
    out.margin_filtered[t] = margin(x, filtered, mu_norm);
  });

  std::size_t wins = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    out.mean_plain += out.margin_plain[t];
    out.mean_filtered += out.margin_filtered[t];
    wins += out.margin_filtered[t] > out.margin_plain[t] ? 1 : 0;
  }
  out.mean_plain /= static_cast<double>(trials);
  out.mean_filtered /= static_cast<double>(trials);
  out.win_fraction = static_cast<double>(wins) / static_cast<double>(trials);
  return out;
}

}  // namespace hopboost
