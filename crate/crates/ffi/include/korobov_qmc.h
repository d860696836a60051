#ifndef KOROBOV_QMC_H
#define KOROBOV_QMC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KqFamily {
  KQ_FAMILY_S = 0,
  KQ_FAMILY_T = 1,
  KQ_FAMILY_U = 2,
} KqFamily;

typedef enum KqStatus {
  KQ_STATUS_OK = 0,
  KQ_STATUS_DOMAIN_ERROR = 1,
  KQ_STATUS_CAPACITY_ERROR = 2,
  KQ_STATUS_NULL_POINTER = 3,
  KQ_STATUS_INTERNAL = 4,
} KqStatus;

/**
 * Opaque composite point set.
 */
typedef struct KqPointSet KqPointSet;

typedef struct KqWceEstimate {
  double lower;
  double upper;
  uint64_t radius;
  uint64_t frequencies_checked;
  /**
   * Nonzero when `lower` is the exact worst-case error.
   */
  uint8_t exact;
} KqWceEstimate;

typedef struct KqWceBounds {
  uint64_t count;
  double bound_in_m;
  double bound_in_n;
  double initial_error;
  uint8_t vacuous;
} KqWceBounds;

/**
 * Integrand callback: `x` points at `d` coordinates in `[0,1)`.
 */
typedef double (*KqIntegrand)(const double *x, size_t d, void *user);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *kq_last_error_message(void);

/**
 * Builds the composite set of `family` (a [`KqFamily`] value) over the band
 * of `m` in dimension `d`.
 *
 * # Safety
 * `out` must be valid for one pointer write.
 */
enum KqStatus kq_pointset_new(uint32_t family, uint64_t m, size_t d, struct KqPointSet **out);

/**
 * # Safety
 * `set` must be NULL or a handle from [`kq_pointset_new`] not yet freed.
 */
void kq_pointset_free(struct KqPointSet *set);

/**
 * # Safety
 * `set` must be a live handle and `out` valid for one write.
 */
enum KqStatus kq_pointset_count(const struct KqPointSet *set, uint64_t *out);

/**
 * # Safety
 * `set` must be a live handle and `out` valid for one write.
 */
enum KqStatus kq_pointset_dim(const struct KqPointSet *set, size_t *out);

/**
 * Copies all points, row-major, into `buf` of `len` doubles; `len` must be
 * at least `count * dim`.
 *
 * # Safety
 * `set` must be a live handle and `buf` valid for `len` writes.
 */
enum KqStatus kq_pointset_coords(const struct KqPointSet *set, double *buf, size_t len);

/**
 * Normalized exponential sum `W(k)` for `k` of length `d`.
 *
 * # Safety
 * `set` must be a live handle, `k` valid for `d` reads, `re` and `im` for
 * one write each.
 */
enum KqStatus kq_pointset_weyl_sum(const struct KqPointSet *set,
                                   const int64_t *k,
                                   size_t d,
                                   double *re,
                                   double *im);

/**
 * Two-sided worst-case error estimate over `|k|_inf <= radius`.
 *
 * # Safety
 * `set` must be a live handle and `out` valid for one write.
 */
enum KqStatus kq_pointset_wce(const struct KqPointSet *set,
                              uint64_t radius,
                              struct KqWceEstimate *out);

/**
 * Upper bounds for `family` (a [`KqFamily`] value).
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum KqStatus kq_wce_upper(uint32_t family,
                           uint64_t m,
                           size_t d,
                           double c_p,
                           struct KqWceBounds *out);

/**
 * Number of primes `p` with `ceil(m/2) < p <= m`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
enum KqStatus kq_prime_band_count(uint64_t m, uint64_t *out);

/**
 * # Safety
 * `out` must be valid for one write.
 */
enum KqStatus kq_info_complexity_bound(double eps, size_t d, double c_p, uint64_t *out);

/**
 * QMC estimate `(1/N) sum f(x)` with `f` called once per point.
 *
 * # Safety
 * `set` must be a live handle, `f` safe to call with `user`, and `out`
 * valid for one write. `f` must not unwind.
 */
enum KqStatus kq_qmc_apply(const struct KqPointSet *set, KqIntegrand f, void *user, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KOROBOV_QMC_H */
