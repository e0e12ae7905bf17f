#include "hopboost/hopboost.h"

#include <cmath>
#include <cstring>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "hopboost/boosting.hpp"
#include "hopboost/energy.hpp"
#include "hopboost/io.hpp"
#include "hopboost/metrics.hpp"
#include "hopboost/toy_runner.hpp"
#include "hopboost/verify.hpp"

using namespace hopboost;

struct hb_memory {
  PatternMemory mem;
};

struct hb_vector {
  std::vector<double> values;
};

struct hb_report {
  VerifyReport report;
};

namespace {

thread_local std::string g_last_error;

static_assert(static_cast<int>(ErrorCode::kVerifyFailed) == HB_E_VERIFY_FAILED);
static_assert(static_cast<int>(ErrorCode::kDegenerate) == HB_E_DEGENERATE);

template <typename Fn>
hb_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return HB_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<hb_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return HB_E_DATA;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HB_E_DATA;
  }
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorCode::kUsage, std::string(what) + " must not be NULL");
}

HopfieldConfig to_cfg(const hb_config* cfg) {
  need(cfg, "config");
  return HopfieldConfig{cfg->beta, cfg->normalize_inputs != 0};
}

void copy_out(const Vector& v, double* out, size_t out_len) {
  need(out, "output buffer");
  if (out_len < static_cast<size_t>(v.size()))
    fail(ErrorCode::kUsage, "output buffer holds " + std::to_string(out_len) + " values, need " +
                                std::to_string(v.size()));
  std::memcpy(out, v.data(), static_cast<size_t>(v.size()) * sizeof(double));
}

ToyPreset preset_for(const char* scene, const char* config_json, SceneKind* kind) {
  need(scene, "scene");
  *kind = parse_scene(scene);
  ToyPreset p = scene_preset(*kind);
  if (config_json && *config_json) p = io::apply_config(config_json, p);
  return p;
}

}  // namespace

extern "C" {

const char* hb_last_error(void) { return g_last_error.c_str(); }

const char* hb_status_name(hb_status status) {
  return error_name(static_cast<ErrorCode>(status));
}

int hb_status_exit_code(hb_status status) { return exit_code(static_cast<ErrorCode>(status)); }

const char* hb_version(void) { return "0.1.0"; }

hb_status hb_memory_create(const double* rows, uint32_t d, uint64_t n, hb_memory** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    if (d == 0) fail(ErrorCode::kZeroDim, "pattern dimension is zero");
    if (n == 0) fail(ErrorCode::kEmptyInput, "no patterns");
    need(rows, "rows");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n));
    for (uint64_t i = 0; i < n; ++i)
      for (uint32_t k = 0; k < d; ++k)
        m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = rows[i * d + k];
    if (!m.allFinite()) fail(ErrorCode::kNonFinite, "pattern data contains NaN or Inf");
    *out = new hb_memory{PatternMemory::detect(std::move(m))};
  });
}

hb_status hb_memory_read(const char* path, hb_memory** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    need(path, "path");
    *out = new hb_memory{io::read_embeddings(path)};
  });
}

hb_status hb_memory_write(const hb_memory* mem, const char* path, int dtype) {
  return guarded([&] {
    need(mem, "memory");
    need(path, "path");
    if (dtype != 1 && dtype != 2) fail(ErrorCode::kBadDtype, "dtype must be 1 (f32) or 2 (f64)");
    io::write_embeddings(path, mem->mem, io::format_from_path(path), static_cast<io::Dtype>(dtype));
  });
}

hb_status hb_memory_normalize(const hb_memory* mem, hb_memory** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    need(mem, "memory");
    *out = new hb_memory{normalize_columns(mem->mem.data())};
  });
}

uint32_t hb_memory_dim(const hb_memory* mem) {
  return mem ? static_cast<uint32_t>(mem->mem.dim()) : 0;
}

uint64_t hb_memory_count(const hb_memory* mem) {
  return mem ? static_cast<uint64_t>(mem->mem.count()) : 0;
}

int hb_memory_is_normalized(const hb_memory* mem) { return mem && mem->mem.normalized() ? 1 : 0; }

hb_status hb_memory_copy_data(const hb_memory* mem, double* out, size_t len) {
  return guarded([&] {
    need(mem, "memory");
    need(out, "output buffer");
    const auto& m = mem->mem.data();
    if (len < static_cast<size_t>(m.size())) fail(ErrorCode::kUsage, "output buffer too small");
    for (Eigen::Index i = 0; i < m.cols(); ++i)
      for (Eigen::Index k = 0; k < m.rows(); ++k) out[i * m.rows() + k] = m(k, i);
  });
}

void hb_memory_free(hb_memory* mem) { delete mem; }

hb_config hb_config_default(void) { return hb_config{4.0, 1}; }

hb_status hb_score(const hb_config* cfg, const hb_memory* id_mem, const hb_memory* aux_mem,
                   const hb_memory* queries, double* out, size_t out_len) {
  return guarded([&] {
    need(id_mem, "ID memory");
    need(aux_mem, "AUX memory");
    need(queries, "queries");
    copy_out(score_batch(to_cfg(cfg), queries->mem, id_mem->mem, aux_mem->mem), out, out_len);
  });
}

hb_status hb_boundary_energy(const hb_config* cfg, const hb_memory* id_mem,
                             const hb_memory* aux_mem, const hb_memory* queries, double* out,
                             size_t out_len) {
  return guarded([&] {
    need(id_mem, "ID memory");
    need(aux_mem, "AUX memory");
    need(queries, "queries");
    copy_out(boundary_energy_batch(to_cfg(cfg), queries->mem, id_mem->mem, aux_mem->mem), out,
             out_len);
  });
}

hb_status hb_update_weights(const hb_config* cfg, const hb_memory* id_mem,
                            const hb_memory* aux_mem, const hb_memory* pool, double* out,
                            size_t out_len) {
  return guarded([&] {
    need(id_mem, "ID memory");
    need(aux_mem, "AUX memory");
    need(pool, "pool");
    copy_out(update_weights(to_cfg(cfg), pool->mem, id_mem->mem, aux_mem->mem).weights, out,
             out_len);
  });
}

hb_status hb_weighted_sample(const double* weights, size_t m, size_t n, uint64_t seed,
                             size_t* out) {
  return guarded([&] {
    need(weights, "weights");
    need(out, "output buffer");
    SampleWeights w{Eigen::Map<const Vector>(weights, static_cast<Eigen::Index>(m))};
    const auto idx = weighted_sample(w, n, seed);
    std::memcpy(out, idx.data(), idx.size() * sizeof(size_t));
  });
}

hb_status hb_evaluate(const double* id_scores, size_t n_id, const double* ood_scores,
                      size_t n_ood, double tpr, hb_metrics* out) {
  return guarded([&] {
    need(out, "out");
    if (n_id) need(id_scores, "ID scores");
    if (n_ood) need(ood_scores, "OOD scores");
    ScoredDataset data;
    if (n_id) data.id_scores.assign(id_scores, id_scores + n_id);
    if (n_ood) data.ood_scores.assign(ood_scores, ood_scores + n_ood);
    const OodMetrics m = evaluate(data, tpr);
    *out = hb_metrics{m.fpr95, m.auroc, m.gamma};
  });
}

hb_status hb_values_read(const char* path, hb_vector** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    need(path, "path");
    *out = new hb_vector{io::read_values(path)};
  });
}

size_t hb_vector_size(const hb_vector* v) { return v ? v->values.size() : 0; }

const double* hb_vector_data(const hb_vector* v) { return v ? v->values.data() : nullptr; }

void hb_vector_free(hb_vector* v) { delete v; }

hb_status hb_values_write(const char* path, const double* values, size_t n) {
  return guarded([&] {
    need(path, "path");
    if (n) need(values, "values");
    io::write_values(path, std::span<const double>(values, n));
  });
}

hb_status hb_indices_write(const char* path, const size_t* indices, size_t n) {
  return guarded([&] {
    need(path, "path");
    if (n) need(indices, "indices");
    io::write_indices(path, std::span<const std::size_t>(indices, n));
  });
}

hb_status hb_metrics_write_json(const char* path, const hb_metrics* m) {
  return guarded([&] {
    need(path, "path");
    need(m, "metrics");
    io::write_metrics(path, OodMetrics{m->fpr95, m->auroc, m->gamma});
  });
}

hb_status hb_toy_run(const char* scene, const char* config_json, const char* out_dir,
                     hb_toy_summary* summary) {
  return guarded([&] {
    SceneKind kind;
    const ToyPreset preset = preset_for(scene, config_json, &kind);
    const ToyRun run = run_scene(kind, preset);
    if (out_dir) io::write_toy_run(out_dir, run);
    if (summary) {
      const ToySummary& s = run.summary;
      summary->snapshots = run.trajectory.snapshots.size();
      summary->var_orth_initial = s.var_orth_initial;
      summary->var_orth_final = s.var_orth_final;
      summary->var_par_initial = s.var_par_initial;
      summary->var_par_final = s.var_par_final;
      summary->cross_dot_initial = s.cross_dot.front();
      summary->cross_dot_final = s.cross_dot.back();
      summary->l_ood_initial = s.l_ood.front();
      summary->l_ood_final = s.l_ood.back();
      summary->agreement_last_batch = s.agreement_last_batch;
      summary->agreement_weighted = s.resampling.agreement_weighted;
      summary->agreement_uniform = s.resampling.agreement_uniform;
    }
  });
}

hb_status hb_toy_config(const char* scene, const char* config_json, char** out_json) {
  return guarded([&] {
    need(out_json, "out");
    *out_json = nullptr;
    SceneKind kind;
    const std::string text = io::config_json(preset_for(scene, config_json, &kind));
    char* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out_json = buf;
  });
}

void hb_string_free(char* s) { delete[] s; }

hb_status hb_verify_run(const char* suite, uint64_t seed, double tol, hb_report** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    need(suite, "suite");
    const std::optional<double> t = std::isnan(tol) ? std::nullopt : std::optional<double>(tol);
    *out = new hb_report{run_verify(suite, seed, t)};
  });
}

size_t hb_report_size(const hb_report* r) { return r ? r->report.rows.size() : 0; }

hb_status hb_report_row(const hb_report* r, size_t i, hb_report_row_info* out) {
  return guarded([&] {
    need(r, "report");
    need(out, "out");
    if (i >= r->report.rows.size()) fail(ErrorCode::kUsage, "row index out of range");
    const VerifyRow& row = r->report.rows[i];
    *out = hb_report_row_info{row.name.c_str(), row.relation.c_str(), row.value, row.threshold,
                              row.pass ? 1 : 0};
  });
}

int hb_report_pass(const hb_report* r) { return r && r->report.pass() ? 1 : 0; }

void hb_report_free(hb_report* r) { delete r; }

const char* const* hb_verify_suites(void) {
  static const std::vector<const char*> names = [] {
    std::vector<const char*> v;
    for (const auto& s : verify_suites()) v.push_back(s.c_str());
    v.push_back(nullptr);
    return v;
  }();
  return names.data();
}

}  // extern "C"
