#ifndef SGC_H
#define SGC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum SgcStatus {
  SGC_STATUS_OK = 0,
  SGC_STATUS_NULL_POINTER = 1,
  SGC_STATUS_INVALID_UTF8 = 2,
  SGC_STATUS_VALIDATION = 3,
  SGC_STATUS_JSON = 4,
  SGC_STATUS_UNKNOWN_PRESET = 5,
  SGC_STATUS_SINGULAR = 6,
  SGC_STATUS_WRONG_SYSTEM_KIND = 7,
  SGC_STATUS_BUFFER_TOO_SMALL = 8,
  SGC_STATUS_INTERNAL = 99,
} SgcStatus;

/**
 * Opaque solver handle.
 */
typedef struct SgcSolver SgcSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *sgc_last_error_message(void);

/**
 * Builds a solver from a JSON parameter record.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum SgcStatus sgc_solver_new_from_json(const char *json, struct SgcSolver **out);

/**
 * Builds a solver from a bundled preset such as `"fig2b"`.
 *
 * # Safety
 * `name` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum SgcStatus sgc_solver_new_from_preset(const char *name, struct SgcSolver **out);

/**
 * Releases a solver. Null is ignored.
 *
 * # Safety
 * `solver` must come from one of the constructors and not be used afterwards.
 */
void sgc_solver_free(struct SgcSolver *solver);

/**
 * Length of the state vector (15 for the four-level system, 8 for the
 * three-level one), or 0 for a null handle.
 *
 * # Safety
 * `solver` must be null or a live handle.
 */
size_t sgc_solver_dim(const struct SgcSolver *solver);

/**
 * Susceptibility χ at probe detuning `delta1`.
 *
 * # Safety
 * `solver` must be a live handle; `re` and `im` valid pointers.
 */
enum SgcStatus sgc_susceptibility(const struct SgcSolver *solver,
                                  double delta1,
                                  double *re,
                                  double *im);

/**
 * Central-difference slope `d Re χ / dΔ1` with step `h`.
 *
 * # Safety
 * `solver` must be a live handle; `out` a valid pointer.
 */
enum SgcStatus sgc_dispersion_slope(const struct SgcSolver *solver,
                                    double delta1,
                                    double h,
                                    double *out);

/**
 * `c / vg = 1 + K·slope`.
 */
double sgc_group_velocity_ratio(double slope, double k);

/**
 * Copies the pump-only steady state into `re[0..len]`, `im[0..len]`.
 * `len` must be at least [`sgc_solver_dim`].
 *
 * # Safety
 * `solver` must be a live handle; `re` and `im` must hold `len` doubles.
 */
enum SgcStatus sgc_steady_state(const struct SgcSolver *solver, double *re, double *im, size_t len);

/**
 * Cross-damping `γ12 = √(γ1γ2)·cos θ` for the dipole angle `theta_deg`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SgcStatus sgc_interference_parameter(double gamma1,
                                          double gamma2,
                                          double theta_deg,
                                          double *out);

/**
 * Closed-form steady pump coherence `Re ρ23` under full interference.
 */
double sgc_pump_coherence_analytic(double gamma1, double gamma3);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SGC_H */
