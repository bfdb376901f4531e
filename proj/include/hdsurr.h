/* hdsurr: CNN surrogates for high-dimensional functions, a small isogeometric
 * plane-stress solver, and particle-swarm optimization, behind a C ABI.
 *
 * Conventions:
 *   - Functions returning int give HDS_OK (0) on success; on failure they
 *     return a nonzero status and leave a message in hds_last_error().
 *   - Functions returning char* give a malloc'd NUL-terminated string (free
 *     with hds_string_free) or NULL on failure.
 *   - Handles are opaque; every *_free accepts NULL.
 *   - The last-error slot is thread-local.
 */
#ifndef HDSURR_H
#define HDSURR_H

#include <stdint.h>

#if defined(_WIN32)
#define HDS_API __declspec(dllexport)
#else
#define HDS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
  HDS_OK = 0,
  HDS_E_INVALID_ARGUMENT = 1,
  HDS_E_SHAPE_MISMATCH = 2,
  HDS_E_DOMAIN = 3,
  HDS_E_UNDEFINED_METRIC = 4,
  HDS_E_IO = 5,
  HDS_E_NUMERIC = 6,
  HDS_E_GEOMETRY = 7,
  HDS_E_STATE = 8,
  HDS_E_UNKNOWN = 99
};

HDS_API const char* hds_version(void);
HDS_API int hds_last_status(void);
HDS_API const char* hds_last_error(void);
HDS_API void hds_string_free(char* s);

/* ---- benchmark functions ---- */

/* [{"id":..., "lo":..., "hi":..., "min_d":...}, ...] */
HDS_API char* hds_bench_list_json(void);
HDS_API int hds_bench_eval(const char* fn_id, const double* x, int d, double* out_value);

/* ---- datasets ---- */

/* Uniform (or Latin hypercube when lhs != 0) samples of a registered function,
 * written as CSV plus a .meta.json sidecar. */
HDS_API int hds_dataset_generate(const char* fn_id, int n, int d, uint64_t seed, int lhs,
                                 const char* csv_path);

/* ---- surrogate models ---- */

typedef struct hds_surrogate hds_surrogate;

/* train_json: the "train" object of an experiment config (null/empty = defaults):
 * {"arch":"", "grid":[], "epochs":200, "batch":64, "lr":0.001,
 *  "patience":20, "val_fraction":0.1, "min_delta":0.0} */
HDS_API hds_surrogate* hds_surrogate_train_csv(const char* train_csv,
                                               const char* train_json_or_null, uint64_t seed);
HDS_API hds_surrogate* hds_surrogate_load(const char* path);
HDS_API int hds_surrogate_save(const hds_surrogate* s, const char* path);
HDS_API int hds_surrogate_dim(const hds_surrogate* s);
HDS_API int hds_surrogate_predict(const hds_surrogate* s, const double* x, int d,
                                  double* out_value);
HDS_API int hds_surrogate_predict_batch(const hds_surrogate* s, const double* X, int n, int d,
                                        double* out_values);
HDS_API void hds_surrogate_free(hds_surrogate* s);

/* Score a saved model against a dataset CSV; optionally dump predictions.
 * Returns {"raae":..., "rmae":..., "r2":..., "error_pct":..., "n":...}. */
HDS_API char* hds_eval_csv(const char* model_path, const char* data_csv,
                           const char* predictions_csv_or_null);

/* ---- experiments ---- */

HDS_API char* hds_experiment_kinds_json(void);
HDS_API char* hds_experiment_default_config(const char* kind);
/* Runs one experiment into out_dir (metrics.json, tables, models, manifest.json)
 * and returns the metrics document. config_json overrides the defaults. */
HDS_API char* hds_experiment_run(const char* kind, const char* config_json_or_null,
                                 const char* out_dir);
/* Re-runs run_dir's manifest into scratch_dir; {"identical":bool,"detail":""}. */
HDS_API char* hds_experiment_replay(const char* run_dir, const char* scratch_dir);
/* 1 = every "checks" entry passed, 0 = some failed, -1 = error. */
HDS_API int hds_metrics_checks_pass(const char* metrics_json);

/* ---- isogeometric solver ---- */

/* Quarter-annulus tube analog (inner radius 1, outer 1.5, fixed bottom edge,
 * downward loads on the top edge), written as a model JSON file. */
HDS_API int hds_iga_build_tube(int n_ctrl_u, int n_ctrl_v, const char* model_path);
/* Assemble + solve + stress recovery; optional CSV dumps. Returns
 * {"max_von_mises":..., "n_dofs":..., "n_quad":...}. */
HDS_API char* hds_iga_solve(const char* model_path, const char* stress_csv_or_null,
                            const char* displacement_csv_or_null);
/* Draw (design, max stress) training/testing sets from the reduced-order
 * response of the model's control net. Returns response statistics. */
HDS_API char* hds_iga_dataset(const char* model_path, int n_train, int n_test, int n_snapshots,
                              uint64_t seed, const char* train_csv, const char* test_csv);

/* ---- particle swarm ---- */

/* Return nonzero to abort (propagates as HDS_E_NUMERIC). */
typedef int (*hds_objective_fn)(void* user, const double* x, int d, double* out_value);

/* config_json (null/empty = defaults): {"population":50, "iterations":200,
 * "inertia":0.7, "cognitive":1.5, "social":1.5, "clamp_fraction":0.2, "seed":0}.
 * out_best_x must hold d doubles. */
HDS_API int hds_pso_minimize(hds_objective_fn f, void* user, int d, const double* lo,
                             const double* hi, const char* config_json_or_null,
                             double* out_best_x, double* out_best_value);

#ifdef __cplusplus
}
#endif

#endif /* HDSURR_H */
