#include "hopboost/gradients.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace hopboost {

GradReport compare_gradients(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric,
                             double tol) {
  if (analytic.size() != numeric.size())
    fail(ErrorCode::kDimensionMismatch, "gradient sizes differ");
  GradReport r;
  r.analytic = analytic;
  r.numeric = numeric;
  r.tol = tol;
  const double denom = std::max(1e-12, analytic.norm() + numeric.norm());
  r.max_rel_err = (analytic - numeric).norm() / denom;
  r.pass = r.max_rel_err <= tol;
  return r;
}

namespace {

Vector weighted_columns(const Eigen::MatrixXd& mem, const std::vector<double>& w) {
  return mem * Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
}

std::vector<double> class_softmax(double beta, const Eigen::MatrixXd& mem,
                                  const Eigen::Ref<const Vector>& query, double* lse_out) {
  std::vector<double> sims(static_cast<std::size_t>(mem.cols()));
  detail::similarities(Geometry::kSphere, mem, query, sims);
  std::vector<double> sm(sims.size());
  detail::softmax_unchecked(beta, sims, sm);
  if (lse_out) *lse_out = detail::lse_unchecked(beta, sims);
  return sm;
}

}  // namespace

Vector grad_query_mhe(const HopfieldConfig& cfg, const Vector& query, const PatternMemory& memory) {
  return query - hopfield_update(cfg, query, memory);
}

Vector hopfield_update(const HopfieldConfig& cfg, const Vector& query, const PatternMemory& memory) {
  detail::check_single(cfg, Geometry::kSphere, query, memory);
  return weighted_columns(memory.data(), class_softmax(cfg.beta, memory.data(), query, nullptr));
}

namespace detail {

Vector boundary_coefficients(double beta, Geometry geom, const Eigen::MatrixXd& id_mem,
                             const Eigen::MatrixXd& aux_mem,
                             const Eigen::Ref<const Vector>& query) {
  const auto n = static_cast<std::size_t>(id_mem.cols());
  const auto m = static_cast<std::size_t>(aux_mem.cols());
  std::vector<double> sims(n + m);
  std::span<double> all(sims);
  similarities(geom, id_mem, query, all.first(n));
  similarities(geom, aux_mem, query, all.subspan(n));
  std::vector<double> sm_joint(n + m), sm_id(n), sm_aux(m);
  softmax_unchecked(beta, all, sm_joint);
  softmax_unchecked(beta, all.first(n), sm_id);
  softmax_unchecked(beta, all.subspan(n), sm_aux);
  Vector c(static_cast<Eigen::Index>(n + m));
  for (std::size_t j = 0; j < n; ++j)
    c(static_cast<Eigen::Index>(j)) = sm_id[j] - 2.0 * sm_joint[j];
  for (std::size_t j = 0; j < m; ++j)
    c(static_cast<Eigen::Index>(n + j)) = sm_aux[j] - 2.0 * sm_joint[n + j];
  return c;
}

}  // namespace detail

Vector grad_query_boundary(const HopfieldConfig& cfg, Geometry geom, const Vector& query,
                           const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  detail::check_pair(cfg, geom, query, id_mem, aux_mem);
  const Vector c =
      detail::boundary_coefficients(cfg.beta, geom, id_mem.data(), aux_mem.data(), query);
  const Eigen::Index n = id_mem.count();
  Vector g = id_mem.data() * c.head(n) + aux_mem.data() * c.tail(aux_mem.count());
  // Euclidean: ∂s_j/∂ξ = z_j − ξ; the −ξ·Σc_j term vanishes because Σc_j = 0.
  if (geom == Geometry::kEuclidean) g -= c.sum() * query;
  return g;
}

Vector grad_query_boundary(const HopfieldConfig& cfg, const Vector& query,
                           const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  return grad_query_boundary(cfg, Geometry::kSphere, query, id_mem, aux_mem);
}

Vector grad_query_boundary_tanh(const HopfieldConfig& cfg, const Vector& query,
                                const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  detail::check_pair(cfg, Geometry::kSphere, query, id_mem, aux_mem);
  double lx = 0.0, lo = 0.0;
  const auto sm_x = class_softmax(cfg.beta, id_mem.data(), query, &lx);
  const auto sm_o = class_softmax(cfg.beta, aux_mem.data(), query, &lo);
  const double t = std::tanh(0.5 * cfg.beta * (lx - lo));
  return -t * (weighted_columns(id_mem.data(), sm_x) - weighted_columns(aux_mem.data(), sm_o));
}

MemoryGrad grad_memory_boundary(const HopfieldConfig& cfg, Geometry geom, const Vector& query,
                                const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  detail::check_pair(cfg, geom, query, id_mem, aux_mem);
  MemoryGrad g;
  if (geom == Geometry::kSphere) {
    // Shared tanh factor: the softmaxes and lse terms are evaluated once.
    double lx = 0.0, lo = 0.0;
    const auto sm_x = class_softmax(cfg.beta, id_mem.data(), query, &lx);
    const auto sm_o = class_softmax(cfg.beta, aux_mem.data(), query, &lo);
    const double t = std::tanh(0.5 * cfg.beta * (lx - lo));
    const auto row = [](const std::vector<double>& v) {
      return Eigen::Map<const Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    };
    g.d_id = -t * query * row(sm_x);
    g.d_aux = t * query * row(sm_o);
    return g;
  }
  const Vector c =
      detail::boundary_coefficients(cfg.beta, geom, id_mem.data(), aux_mem.data(), query);
  const Eigen::Index n = id_mem.count();
  g.d_id.resize(id_mem.dim(), n);
  g.d_aux.resize(aux_mem.dim(), aux_mem.count());
  for (Eigen::Index i = 0; i < n; ++i) g.d_id.col(i) = c(i) * (query - id_mem.column(i));
  for (Eigen::Index j = 0; j < aux_mem.count(); ++j)
    g.d_aux.col(j) = c(n + j) * (query - aux_mem.column(j));
  return g;
}

MemoryGrad grad_memory_boundary(const HopfieldConfig& cfg, const Vector& query,
                                const PatternMemory& id_mem, const PatternMemory& aux_mem) {
  return grad_memory_boundary(cfg, Geometry::kSphere, query, id_mem, aux_mem);
}

namespace {

double checked(double v, Eigen::Index k) {
  if (!std::isfinite(v))
    fail(ErrorCode::kNonFinite,
         "non-finite function value in finite differences at coordinate " + std::to_string(k));
  return v;
}

}  // namespace

Vector finite_difference(const std::function<double(const Vector&)>& f, const Vector& point,
                         double h) {
  if (!(h > 0.0)) fail(ErrorCode::kRange, "finite-difference step must be positive");
  Vector out(point.size());
  Vector x = point;
  for (Eigen::Index k = 0; k < point.size(); ++k) {
    x(k) = point(k) + h;
    const double fp = checked(f(x), k);
    x(k) = point(k) - h;
    const double fm = checked(f(x), k);
    x(k) = point(k);
    out(k) = (fp - fm) / (2.0 * h);
  }
  return out;
}

Eigen::MatrixXd finite_difference(const std::function<double(const Eigen::MatrixXd&)>& f,
                                  const Eigen::MatrixXd& point, double h) {
  if (!(h > 0.0)) fail(ErrorCode::kRange, "finite-difference step must be positive");
  Eigen::MatrixXd out(point.rows(), point.cols());
  Eigen::MatrixXd x = point;
  for (Eigen::Index k = 0; k < point.size(); ++k) {
    x(k) = point(k) + h;
    const double fp = checked(f(x), k);
    x(k) = point(k) - h;
    const double fm = checked(f(x), k);
    x(k) = point(k);
    out(k) = (fp - fm) / (2.0 * h);
  }
  return out;
}

}  // namespace hopboost
