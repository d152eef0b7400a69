#ifndef CVPHASE_H
#define CVPHASE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CvpSpinFamily {
  CVP_SPIN_FAMILY_BW = 0,
  CVP_SPIN_FAMILY_GKMR = 1,
  CVP_SPIN_FAMILY_LARSSON = 2,
} CvpSpinFamily;

typedef enum CvpStatus {
  CVP_STATUS_OK = 0,
  CVP_STATUS_NULL_POINTER = 1,
  CVP_STATUS_INVALID_ARGUMENT = 2,
  CVP_STATUS_TRUNCATION = 3,
  CVP_STATUS_NUMERICAL = 4,
  CVP_STATUS_PANIC = 5,
} CvpStatus;

/**
 * Two-mode squeezed Gaussian state.
 */
typedef struct CvpGaussianState CvpGaussianState;

/**
 * Pseudo-spin operator triple on a truncated Fock space.
 */
typedef struct CvpSpinTriple CvpSpinTriple;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message on this thread; empty if none. Valid until the next
 * failing call on the same thread.
 */
const char *cvp_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cvp_version(void);

/**
 * Quantum discord of the two-mode squeezed vacuum, in bits.
 */
enum CvpStatus cvp_discord_tmss(double r, double *value);

/**
 * Smallest x > 0 where the Bell-letter state violates CHSH at settings (−2x, x, 0, 3x).
 */
enum CvpStatus cvp_bell_letter_threshold(double *value);

/**
 * Wigner function of the even cat state with centres ±q0.
 */
enum CvpStatus cvp_cat_wigner(double q0,
                              double p0,
                              double m,
                              double omega,
                              double q,
                              double p,
                              double *value);

/**
 * Semiclassical Wigner function of oscillator level n.
 */
enum CvpStatus cvp_berry_wigner_ho(uint32_t n, double q, double p, double *value);

enum CvpStatus cvp_gaussian_state_new(double r, double phi, struct CvpGaussianState **handle);

/**
 * Releases a state; null is ignored.
 */
void cvp_gaussian_state_free(struct CvpGaussianState *handle);

/**
 * Squeezing parameters (r, φ) the state was built from.
 */
enum CvpStatus cvp_gaussian_state_params(const struct CvpGaussianState *handle,
                                         double *r,
                                         double *phi);

/**
 * Covariance matrix in row-major order over (q1, p1, q2, p2); `out16` holds 16 doubles.
 */
enum CvpStatus cvp_gaussian_state_covariance(const struct CvpGaussianState *handle, double *out16);

enum CvpStatus cvp_gaussian_state_wigner(const struct CvpGaussianState *handle,
                                         double q1,
                                         double p1,
                                         double q2,
                                         double p2,
                                         double *value);

/**
 * `family` is a `CvpSpinFamily` value; `ell` is only read for Larsson.
 */
enum CvpStatus cvp_spin_triple_new(uint32_t family,
                                   uint32_t truncation,
                                   double ell,
                                   struct CvpSpinTriple **handle);

void cvp_spin_triple_free(struct CvpSpinTriple *handle);

enum CvpStatus cvp_spin_triple_truncation(const struct CvpSpinTriple *handle, uint32_t *n);

/**
 * Maximum CHSH value of the pseudo-spin triple on the state with
 * parameters (r, φ). `settings4` receives (θn, θn′, θm, θm′); may be null.
 */
enum CvpStatus cvp_pseudospin_bell_max(const struct CvpSpinTriple *handle,
                                       double r,
                                       double phi,
                                       double *value,
                                       double *settings4);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CVPHASE_H */
