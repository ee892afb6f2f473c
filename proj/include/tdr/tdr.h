/* tdr: time-dimensional reduction solver for recovering the initial state of
 * a damped acoustic field from lateral Cauchy data.
 *
 * C89-compatible surface over the C++ core. All functions are thread-safe as
 * long as each handle is used from one thread at a time. Failing calls return
 * a nonzero status; tdr_last_error() describes the most recent failure on the
 * calling thread.
 */
#ifndef TDR_H
#define TDR_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tdr_status {
  TDR_OK = 0,
  TDR_ERR_ARGUMENT = 1,  /* bad key, value, or null handle */
  TDR_ERR_CONFIG = 2,    /* config fails cross-field validation */
  TDR_ERR_IO = 3,        /* file or directory problem */
  TDR_ERR_NUMERIC = 4,   /* solver or simulation failure */
  TDR_ERR_INTERNAL = 5
} tdr_status;

typedef struct tdr_config tdr_config;
typedef struct tdr_report tdr_report;

const char* tdr_version(void);

/* Thread-local message for the last failing call; never NULL. */
const char* tdr_last_error(void);

/* ---- configuration ------------------------------------------------ */

tdr_config* tdr_config_new(void);
void tdr_config_free(tdr_config* config);

/* Merge a JSON config file into the handle. */
tdr_status tdr_config_load_file(tdr_config* config, const char* path);

/* Set one field from its string form. Keys: phantom, data_dir, out_dir,
 * delta, seed, lambda, beta, x0 ("x,y"), b, eps, kappa0, max_iters, clamp_m,
 * reg_eta, cutoff ("auto" or integer), cutoff_tol, paper_scale, nx, nt,
 * u0 ("linear"|"zero"), reconstruct_a, const_f, const_a. */
tdr_status tdr_config_set(tdr_config* config, const char* key,
                          const char* value);

/* Canonical JSON form of the current configuration. The returned buffer
 * lives until the next call on the same handle. */
const char* tdr_config_json(tdr_config* config);

/* ---- pipeline ------------------------------------------------------ */

/* Simulate boundary data and write it (CSV + sidecar) under out_dir. */
tdr_status tdr_simulate(const tdr_config* config);

/* Full run: simulate or ingest, invert, reconstruct, score, emit artifacts.
 * Succeeds even when the iteration hits max_iters; check
 * tdr_report_converged. */
tdr_status tdr_run(const tdr_config* config, tdr_report** out_report);

/* Like tdr_run but requires data_dir to be set (no simulation). */
tdr_status tdr_invert(const tdr_config* config, tdr_report** out_report);

/* ---- reports -------------------------------------------------------- */

/* Load the report.json of a finished run directory. */
tdr_status tdr_report_open(const char* run_dir, tdr_report** out_report);

/* Numeric fields: f_rel_l2, f_sup, a_rel_l2, iterations, final_rel_diff,
 * seconds_total, n, nx. Returns NaN for unknown keys. */
double tdr_report_value(const tdr_report* report, const char* key);

int tdr_report_converged(const tdr_report* report);

/* Full JSON text; buffer lives as long as the report handle. */
const char* tdr_report_json(const tdr_report* report);

void tdr_report_free(tdr_report* report);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TDR_H */
