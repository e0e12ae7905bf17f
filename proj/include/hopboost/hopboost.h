#ifndef HOPBOOST_H
#define HOPBOOST_H

/*
 * C interface of the hopboost library: Hopfield boundary-energy OOD scoring,
 * boosting weights, metrics, toy experiments and verification suites.
 *
 * Every fallible call returns an hb_status; on failure hb_last_error() gives
 * a message for the calling thread. Handles are opaque and must be released
 * with their *_free function. Pattern data crosses the boundary row-major:
 * one pattern per row of d doubles.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(HB_BUILDING_LIBRARY)
#define HB_API __attribute__((visibility("default")))
#else
#define HB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hb_status {
  HB_OK = 0,

  HB_E_USAGE = 100,
  HB_E_EMPTY_INPUT = 101,
  HB_E_UNKNOWN_NAME = 102,

  HB_E_DATA = 200,
  HB_E_DIMENSION_MISMATCH = 201,
  HB_E_NOT_NORMALIZED = 202,
  HB_E_NON_FINITE = 203,
  HB_E_ZERO_NORM = 204,
  HB_E_IO = 205,
  HB_E_BAD_MAGIC = 206,
  HB_E_BAD_VERSION = 207,
  HB_E_BAD_DTYPE = 208,
  HB_E_TRUNCATED = 209,
  HB_E_ZERO_DIM = 210,
  HB_E_PARSE = 211,
  HB_E_RANGE = 212,
  HB_E_UNKNOWN_KEY = 213,
  HB_E_INVALID_SIMPLEX = 214,
  HB_E_LOW_ACCEPTANCE = 215,
  HB_E_DEGENERATE = 216,

  HB_E_VERIFY_FAILED = 300
} hb_status;

/* Message of the last failed call on this thread ("" if none). */
HB_API const char* hb_last_error(void);

/* Short identifier such as "bad_magic". */
HB_API const char* hb_status_name(hb_status status);

/* Process exit code for a status: 0 ok, 1 usage, 2 data, 3 verification. */
HB_API int hb_status_exit_code(hb_status status);

HB_API const char* hb_version(void);

/* ---------------------------------------------------------------------- */
/* Pattern memories                                                        */

typedef struct hb_memory hb_memory;

/* Copies n rows of d values. The normalized flag is set iff every pattern
 * has unit norm within 1e-6. */
HB_API hb_status hb_memory_create(const double* rows, uint32_t d, uint64_t n, hb_memory** out);

/* Reads an embedding file; ".csv" selects the text format, anything else the
 * binary HBEM format. */
HB_API hb_status hb_memory_read(const char* path, hb_memory** out);

/* dtype 1 = f32, 2 = f64 (binary only; ignored for ".csv"). */
HB_API hb_status hb_memory_write(const hb_memory* mem, const char* path, int dtype);

/* New memory with every pattern scaled to unit norm. */
HB_API hb_status hb_memory_normalize(const hb_memory* mem, hb_memory** out);

HB_API uint32_t hb_memory_dim(const hb_memory* mem);
HB_API uint64_t hb_memory_count(const hb_memory* mem);
HB_API int hb_memory_is_normalized(const hb_memory* mem);

/* Copies dim*count values row-major into out; len must be at least that. */
HB_API hb_status hb_memory_copy_data(const hb_memory* mem, double* out, size_t len);

HB_API void hb_memory_free(hb_memory* mem);

/* ---------------------------------------------------------------------- */
/* Scores, energies, weights                                               */

typedef struct hb_config {
  double beta;           /* inverse temperature, > 0 */
  int normalize_inputs;  /* nonzero: memories and queries must be unit-norm */
} hb_config;

/* beta = 4, normalize_inputs = 1 */
HB_API hb_config hb_config_default(void);

/* s(ξ) = lse(β, Xᵀξ) − lse(β, Oᵀξ) for every query; out has count(queries) slots. */
HB_API hb_status hb_score(const hb_config* cfg, const hb_memory* id_mem, const hb_memory* aux_mem,
                          const hb_memory* queries, double* out, size_t out_len);

/* E_b(ξ; X, O) for every query. */
HB_API hb_status hb_boundary_energy(const hb_config* cfg, const hb_memory* id_mem,
                                    const hb_memory* aux_mem, const hb_memory* queries,
                                    double* out, size_t out_len);

/* softmax(β·E_b(pool; X, O)); out has count(pool) slots. */
HB_API hb_status hb_update_weights(const hb_config* cfg, const hb_memory* id_mem,
                                   const hb_memory* aux_mem, const hb_memory* pool, double* out,
                                   size_t out_len);

/* n draws with replacement from the categorical distribution `weights`. */
HB_API hb_status hb_weighted_sample(const double* weights, size_t m, size_t n, uint64_t seed,
                                    size_t* out);

/* ---------------------------------------------------------------------- */
/* Metrics and value files                                                 */

typedef struct hb_metrics {
  double fpr95;
  double auroc;
  double gamma;
} hb_metrics;

HB_API hb_status hb_evaluate(const double* id_scores, size_t n_id, const double* ood_scores,
                             size_t n_ood, double tpr, hb_metrics* out);

typedef struct hb_vector hb_vector;

/* Reads an "index,value" CSV. */
HB_API hb_status hb_values_read(const char* path, hb_vector** out);
HB_API size_t hb_vector_size(const hb_vector* v);
HB_API const double* hb_vector_data(const hb_vector* v);
HB_API void hb_vector_free(hb_vector* v);

HB_API hb_status hb_values_write(const char* path, const double* values, size_t n);
HB_API hb_status hb_indices_write(const char* path, const size_t* indices, size_t n);
HB_API hb_status hb_metrics_write_json(const char* path, const hb_metrics* m);

/* ---------------------------------------------------------------------- */
/* Toy experiments                                                         */

typedef struct hb_toy_summary {
  size_t snapshots;
  double var_orth_initial;
  double var_orth_final;
  double var_par_initial;
  double var_par_final;
  double cross_dot_initial;
  double cross_dot_final;
  double l_ood_initial;
  double l_ood_final;
  double agreement_last_batch;
  double agreement_weighted;
  double agreement_uniform;
} hb_toy_summary;

/* Runs scene "sphere", "blobs" or "interaction" with its preset, overridden
 * by the flat JSON object config_json (NULL or "" for none). Writes the
 * trajectory, heat maps and summary.json below out_dir when it is non-NULL.
 * summary may be NULL. */
HB_API hb_status hb_toy_run(const char* scene, const char* config_json, const char* out_dir,
                            hb_toy_summary* summary);

/* Effective configuration (preset + overrides) as JSON; release with
 * hb_string_free. */
HB_API hb_status hb_toy_config(const char* scene, const char* config_json, char** out_json);
HB_API void hb_string_free(char* s);

/* ---------------------------------------------------------------------- */
/* Verification                                                            */

typedef struct hb_report hb_report;

typedef struct hb_report_row_info {
  const char* name;      /* valid while the report lives */
  const char* relation;  /* "<" or ">=" */
  double value;
  double threshold;
  int pass;
} hb_report_row_info;

/* Suites: gradcheck, identities, rbf, svm, heshe, boundary-mc. A NaN tol
 * keeps the built-in tolerances. A failing check is reported in the rows,
 * not through the status. */
HB_API hb_status hb_verify_run(const char* suite, uint64_t seed, double tol, hb_report** out);
HB_API size_t hb_report_size(const hb_report* r);
HB_API hb_status hb_report_row(const hb_report* r, size_t i, hb_report_row_info* out);
HB_API int hb_report_pass(const hb_report* r);
HB_API void hb_report_free(hb_report* r);

/* Names of the verification suites, NULL-terminated. */
HB_API const char* const* hb_verify_suites(void);

#ifdef __cplusplus
}
#endif

#endif /* HOPBOOST_H */
