#ifndef SBSTOCH_H
#define SBSTOCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SbStatus {
  SB_STATUS_OK = 0,
  SB_STATUS_INVALID_PARAMETER = 1,
  SB_STATUS_NON_CONVERGENCE = 2,
  SB_STATUS_INVALID_CUTOFF = 3,
  SB_STATUS_DIVERGENT_I0 = 4,
  SB_STATUS_DIVERGENT_PRINCIPAL_VALUE = 5,
  SB_STATUS_NO_SOLUTION = 6,
  SB_STATUS_DIMENSION_BUDGET_EXCEEDED = 7,
  SB_STATUS_STEP_CONTROL_FAILURE = 8,
  SB_STATUS_NULL_POINTER = 9,
  SB_STATUS_PANIC = 10,
} SbStatus;

typedef enum SbRegime {
  SB_REGIME_PURE_DAMPING = 0,
  SB_REGIME_PURE_OSCILLATION = 1,
  SB_REGIME_DAMPED_OSCILLATION = 2,
  SB_REGIME_FROZEN = 3,
} SbRegime;

typedef enum SbBranch {
  SB_BRANCH_PRINTED = 0,
  SB_BRANCH_CORRELATOR = 1,
} SbBranch;

/**
 * Opaque spectral density.
 */
typedef struct SbDensity SbDensity;

/**
 * Limit coefficients. `beta` is 0 at zero temperature.
 */
typedef struct SbCoefficients {
  double gamma;
  double sigma;
  double phi;
  double beta;
  double resonant_density;
} SbCoefficients;

typedef struct SbOracleResult {
  double sup_error;
  double sup_error_other_branch;
  double max_norm_drift;
  double terminal_sigma_z;
} SbOracleResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t sb_last_error_message(char *buf, size_t len);

/**
 * `α ω_c (ω/ω_c)^s e^{−ω/ω_c}`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SbStatus sb_density_power_law(double alpha, double s, double omega_c, struct SbDensity **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum SbStatus sb_density_ohmic(double alpha, double omega_c, struct SbDensity **out);

/**
 * `α` on `[omega_lo, omega_hi]`, zero elsewhere.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SbStatus sb_density_box(double alpha,
                             double omega_lo,
                             double omega_hi,
                             struct SbDensity **out);

/**
 * Piecewise-linear table with `len` nodes.
 *
 * # Safety
 * `omega` and `values` must point to `len` doubles; `out` must be valid.
 */
enum SbStatus sb_density_table(const double *omega,
                               const double *values,
                               size_t len,
                               struct SbDensity **out);

/**
 * # Safety
 * `density` must be null or a handle from one of the constructors, not yet freed.
 */
void sb_density_free(struct SbDensity *density);

/**
 * `J(ω)`; NaN for a null handle.
 *
 * # Safety
 * `density` must be null or a live handle.
 */
double sb_density_evaluate(const struct SbDensity *density, double omega);

/**
 * Principal-value transform `I(ω)` with default quadrature settings.
 *
 * # Safety
 * `density` must be a live handle and `out` valid.
 */
enum SbStatus sb_hilbert(const struct SbDensity *density, double omega, double *out);

/**
 * Limit coefficients; `beta <= 0` selects zero temperature.
 *
 * # Safety
 * `density` must be a live handle and `out` valid.
 */
enum SbStatus sb_coefficients(double epsilon,
                              double delta,
                              const struct SbDensity *density,
                              double beta,
                              struct SbCoefficients *out);

/**
 * Regime of `coefficients` with tolerances scaled to `density`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum SbStatus sb_classify_regime(double epsilon,
                                 double delta,
                                 const struct SbDensity *density,
                                 const struct SbCoefficients *coefficients,
                                 enum SbRegime *out);

/**
 * Amplitude α* such that `α*·shape` stops the oscillation.
 *
 * # Safety
 * `shape` must be a live handle; `alpha` and `residual` valid.
 */
enum SbStatus sb_solve_damping(double epsilon,
                               double delta,
                               const struct SbDensity *shape,
                               double *alpha,
                               double *residual);

/**
 * `⟨ψ|P(t)|ψ⟩` for `ψ = (up, down)` in the σ_z basis, given as
 * `[re_up, im_up, re_down, im_down]` and normalized here.
 *
 * # Safety
 * `coefficients` must be valid, `state` must point to 4 doubles, `out` valid.
 */
enum SbStatus sb_p_scalar(double epsilon,
                          double delta,
                          const struct SbCoefficients *coefficients,
                          const double *state,
                          double t,
                          enum SbBranch frequency_branch,
                          double *out);

/**
 * Trace of the vacuum evolution at `t`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum SbStatus sb_vacuum_trace(const struct SbCoefficients *coefficients,
                              double t,
                              double *re,
                              double *im);

/**
 * Exact discretized-bath run at one coupling λ, spin up, compared with the
 * limit on `n_points` limit times in `[0, t_max]`.
 *
 * # Safety
 * `density` must be a live handle and `out` valid.
 */
enum SbStatus sb_oracle(double epsilon,
                        double delta,
                        const struct SbDensity *density,
                        size_t modes,
                        double omega_max,
                        size_t fock_truncation,
                        double lambda,
                        double t_max,
                        size_t n_points,
                        enum SbBranch frequency_branch,
                        struct SbOracleResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SBSTOCH_H */
