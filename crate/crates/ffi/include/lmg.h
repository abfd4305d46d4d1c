#ifndef LMG_H
#define LMG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define LMG_PHASE_ORDERED 0

#define LMG_PHASE_PARAMAGNETIC 1

#define LMG_PHASE_BOUNDARY 2

#define LMG_VARIANT_CORRECTED 0

#define LMG_VARIANT_PRINTED 1

#define LMG_RICCI_CHRISTOFFEL 0

#define LMG_RICCI_ORTHOGONAL 1

#define LMG_RICCI_PRINTED 2

/*
 Result code of every call.
 */
typedef enum LmgStatus {
  LMG_STATUS_OK = 0,
  LMG_STATUS_NULL_POINTER = 1,
  LMG_STATUS_INVALID_PARAMS = 2,
  LMG_STATUS_DOMAIN = 3,
  LMG_STATUS_RESOURCE = 4,
  LMG_STATUS_SINGULAR = 5,
  LMG_STATUS_NUMERIC = 6,
  LMG_STATUS_PANIC = 7,
} LmgStatus;

/*
 Opaque canonical ensemble at fixed `(N, beta, h)`.
 */
typedef struct LmgEnsemble LmgEnsemble;

typedef struct LmgMoments {
  double mean_h;
  double var_h;
  double mean_sz;
  double var_sz;
  double cov_h_sz;
} LmgMoments;

/*
 Symmetric 2x2 metric in `(beta, h)` coordinates.
 */
typedef struct LmgMetric {
  double g_bb;
  double g_bh;
  double g_hh;
} LmgMetric;

typedef struct LmgPhasePoint {
  double beta;
  double h;
  /*
   One of the `LMG_PHASE_*` constants.
   */
  int phase;
  double mu_xy;
  double r;
} LmgPhasePoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the last error message of this thread into `buf` (NUL-terminated,
 truncated to `len` bytes) and returns the full message length, or 0 when
 no error has been recorded. `buf` may be null to query the length.

 # Safety
 `buf` must be null or valid for `len` bytes of writes.
 */
size_t lmg_last_error(char *buf, size_t len);

/*
 Library version as a static NUL-terminated string.
 */
const char *lmg_version(void);

/*
 Builds the ensemble for even `n`, `beta > 0` and finite `h`.

 # Safety
 `out` must be valid for writes.
 */
enum LmgStatus lmg_ensemble_new(uint32_t n, double beta, double h, struct LmgEnsemble **out);

/*
 Releases a handle; null is ignored.

 # Safety
 `e` must be null or a handle from [`lmg_ensemble_new`] not freed before.
 */
void lmg_ensemble_free(struct LmgEnsemble *e);

/*
 `ln Z`.

 # Safety
 `e` must be a live handle and `out` valid for writes.
 */
enum LmgStatus lmg_ensemble_log_partition(const struct LmgEnsemble *e, double *out);

/*
 Free energy per spin `-ln Z / (beta N)`.

 # Safety
 `e` must be a live handle and `out` valid for writes.
 */
enum LmgStatus lmg_ensemble_free_energy(const struct LmgEnsemble *e, double *out);

/*
 # Safety
 `e` must be a live handle and `out` valid for writes.
 */
enum LmgStatus lmg_ensemble_moments(const struct LmgEnsemble *e, struct LmgMoments *out);

/*
 Fidelity metric from thermal fluctuations.

 # Safety
 `e` must be a live handle and `out` valid for writes.
 */
enum LmgStatus lmg_ensemble_metric(const struct LmgEnsemble *e, struct LmgMetric *out);

/*
 Fidelity metric from finite differences of `ln Z`; `step <= 0` selects the default.

 # Safety
 `out` must be valid for writes.
 */
enum LmgStatus lmg_metric_fd(uint32_t n, double beta, double h, double step, struct LmgMetric *out);

/*
 Level `E_SM` of the sector `s` with magnetic number `m`.

 # Safety
 `out` must be valid for writes.
 */
enum LmgStatus lmg_energy_level(uint32_t n, uint32_t s, int64_t m, double h, double *out);

/*
 `ln d_S`.

 # Safety
 `out` must be valid for writes.
 */
enum LmgStatus lmg_log_multiplicity(uint32_t n, uint32_t s, double *out);

/*
 Phase and order parameter in the thermodynamic limit.

 # Safety
 `out` must be valid for writes.
 */
enum LmgStatus lmg_classify(double beta, double h, struct LmgPhasePoint *out);

/*
 Inverse critical temperature at field `h`, `|h| <= 1`.

 # Safety
 `out` must be valid for writes.
 */
enum LmgStatus lmg_critical_beta(double h, double *out);

/*
 Per-spin metric in the thermodynamic limit; `variant` is an `LMG_VARIANT_*` constant.

 # Safety
 `out` must be valid for writes.
 */
enum LmgStatus lmg_limit_metric(double beta, double h, int variant_id, struct LmgMetric *out);

/*
 Coefficient of the reduced one-parameter paramagnetic metric at `hbar = beta h`.

 # Safety
 `out` must be valid for writes.
 */
enum LmgStatus lmg_reduced_metric(double hbar, int variant_id, double *out);

/*
 Ricci scalar of the limit metric; `method` is an `LMG_RICCI_*` constant.

 # Safety
 `out` must be valid for writes.
 */
enum LmgStatus lmg_ricci_limit(double beta, double h, int method, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LMG_H */
