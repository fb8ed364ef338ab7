#ifndef HESSIAN_BLOWUP_H
#define HESSIAN_BLOWUP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HbStatus {
  HB_STATUS_OK = 0,
  HB_STATUS_NULL_POINTER = 1,
  HB_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A structural condition failed: Keller-Osserman (f2) or (1.5).
   */
  HB_STATUS_CONDITION_VIOLATION = 3,
  HB_STATUS_COMPUTATION_FAILED = 4,
  HB_STATUS_PANIC = 5,
} HbStatus;

typedef enum HbNonlinearity {
  /**
   * f(u) = u^p for u > 0.
   */
  HB_NONLINEARITY_POWER = 0,
  /**
   * f(u) = exp(p u).
   */
  HB_NONLINEARITY_EXPONENTIAL = 1,
} HbNonlinearity;

/**
 * Opaque profile handle: nonlinearity, Hessian order and unit weight.
 */
typedef struct HbProfile HbProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *hb_last_error(void);

/**
 * Static name of a status code.
 */
const char *hb_status_name(enum HbStatus status);

/**
 * σ_j of the `n` eigenvalues at `lambda`.
 *
 * # Safety
 * `lambda` must point to `n` doubles; `out` must be writable.
 */
enum HbStatus hb_sigma(const double *lambda, size_t n, uint32_t j, double *out);

/**
 * Strict test λ ∈ Γ_k.
 *
 * # Safety
 * `lambda` must point to `n` doubles; `out` must be writable.
 */
enum HbStatus hb_in_gamma_k(const double *lambda, size_t n, uint32_t k, bool *out);

/**
 * Builds the profile of f for order `k`. Release with [`hb_profile_free`].
 *
 * # Safety
 * `out` must be writable; on failure `*out` is set to NULL.
 */
enum HbStatus hb_profile_new(enum HbNonlinearity kind,
                             double param,
                             uint32_t k,
                             struct HbProfile **out);

/**
 * # Safety
 * `profile` must come from [`hb_profile_new`] and not be freed twice. NULL is ignored.
 */
void hb_profile_free(struct HbProfile *profile);

/**
 * φ(t) and φ′(t).
 *
 * # Safety
 * `profile` must be a live handle; `phi` and `phi_prime` writable (either may be NULL to skip).
 */
enum HbStatus hb_profile_phi(const struct HbProfile *profile,
                             double t,
                             double *phi,
                             double *phi_prime);

/**
 * Limit constants C_f and C_m (C_m = 1 for the unit weight).
 *
 * # Safety
 * `profile` must be a live handle; outputs writable (NULL skips).
 */
enum HbStatus hb_profile_constants(const struct HbProfile *profile, double *c_f, double *c_m);

/**
 * Blow-up radius R* of the radial problem in ℝⁿ started from u(0) = u0.
 *
 * # Safety
 * `profile` must be a live handle; `rstar` writable.
 */
enum HbStatus hb_radial_blowup_radius(const struct HbProfile *profile,
                                      uint32_t n,
                                      double u0,
                                      double tol,
                                      double *rstar);

/**
 * Centre value u(0) of the radial solution blowing up exactly at `radius`.
 *
 * # Safety
 * `profile` must be a live handle; `u0` writable.
 */
enum HbStatus hb_radial_shoot(const struct HbProfile *profile,
                              uint32_t n,
                              double radius,
                              double tol,
                              double *u0);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HESSIAN_BLOWUP_H */
