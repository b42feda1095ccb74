/* C interface for the subwalk library: subordinate random walks on
 * the integer lattice.  Generated by cbindgen; do not edit. */

#ifndef SUBWALK_H
#define SUBWALK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a fallible call.  Matches the CLI exit-code taxonomy.
 */
typedef enum SubwalkStatus {
  /**
   * The call succeeded.
   */
  SubwalkOk = 0,
  /**
   * Bad arguments: unparsable literal, out-of-range parameter, null or
   * mis-sized pointer.
   */
  SubwalkErrUsage = 2,
  /**
   * The computation itself failed: unsupported capability, numeric
   * breakdown, or an internal panic.
   */
  SubwalkErrNumeric = 3,
} SubwalkStatus;

/**
 * Opaque handle to an n-step transition kernel on a torus.
 */
typedef struct SubwalkKernel SubwalkKernel;

/**
 * Opaque handle to a normalized complete Bernstein function.
 */
typedef struct SubwalkPhi SubwalkPhi;

/**
 * Opaque handle to a table of one-step subordination weights.
 */
typedef struct SubwalkWeights SubwalkWeights;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, as a
 * NUL-terminated UTF-8 string.  Empty if no call has failed.  The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *subwalk_last_error_message(void);

/**
 * Parse a Bernstein-function literal (for example `stable:0.5` or
 * `mix:0.3,0.7`) into a handle.  On success writes the new handle to `out`.
 *
 * # Safety
 * `literal` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SubwalkStatus subwalk_phi_new(const char *literal, struct SubwalkPhi **out);

/**
 * Release a handle returned by [`subwalk_phi_new`].  Null is a no-op.
 *
 * # Safety
 * `phi` must be null or a pointer returned by `subwalk_phi_new` that has
 * not been freed already.
 */
void subwalk_phi_free(struct SubwalkPhi *phi);

/**
 * Evaluate the normalized function at `lambda >= 0`.
 *
 * # Safety
 * `phi` must be a live handle and `out` a valid pointer.
 */
enum SubwalkStatus subwalk_phi_eval(const struct SubwalkPhi *phi, double lambda, double *out);

/**
 * Invert the normalized function: find `lambda` with `phi(lambda) = y` for
 * `y` in (0, phi(inf)).
 *
 * # Safety
 * `phi` must be a live handle and `out` a valid pointer.
 */
enum SubwalkStatus subwalk_phi_invert(const struct SubwalkPhi *phi, double y, double *out);

/**
 * Evaluate the Lévy density of the subordinator at `t > 0`.  Kinds without
 * a tractable density return the capability status (3).
 *
 * # Safety
 * `phi` must be a live handle and `out` a valid pointer.
 */
enum SubwalkStatus subwalk_phi_levy_density(const struct SubwalkPhi *phi, double t, double *out);

/**
 * Build the one-step weight table by Lévy-measure quadrature, truncated so
 * the tail mass is at most `tol` (must lie in (0, 1e-3]).
 *
 * # Safety
 * `phi` must be a live handle and `out` a valid pointer.
 */
enum SubwalkStatus subwalk_weights_new(const struct SubwalkPhi *phi,
                                       double tol,
                                       struct SubwalkWeights **out);

/**
 * Number of stored weights.  A null handle has length 0.
 *
 * # Safety
 * `weights` must be null or a live handle.
 */
uintptr_t subwalk_weights_len(const struct SubwalkWeights *weights);

/**
 * Fetch the weight of order `m` (1-based: `m = 1` is the single-step
 * weight).  Out-of-range orders are usage errors.
 *
 * # Safety
 * `weights` must be a live handle and `out` a valid pointer.
 */
enum SubwalkStatus subwalk_weights_get(const struct SubwalkWeights *weights,
                                       uintptr_t m,
                                       double *out);

/**
 * Mass beyond the truncation, computed independently of the stored entries.
 * A null handle reports NaN.
 *
 * # Safety
 * `weights` must be null or a live handle.
 */
double subwalk_weights_tail(const struct SubwalkWeights *weights);

/**
 * Release a handle returned by [`subwalk_weights_new`].  Null is a no-op.
 *
 * # Safety
 * `weights` must be null or a pointer returned by `subwalk_weights_new`
 * that has not been freed already.
 */
void subwalk_weights_free(struct SubwalkWeights *weights);

/**
 * Compute the n-step kernel by the spectral route on a torus of side
 * `grid` (a power of two; pass 0 to size it from the radius).  The window
 * half-width `radius` must satisfy `radius < grid / 2`.
 *
 * # Safety
 * `phi` must be a live handle and `out` a valid pointer.
 */
enum SubwalkStatus subwalk_kernel_spectral(const struct SubwalkPhi *phi,
                                           uintptr_t d,
                                           uint64_t n,
                                           int64_t radius,
                                           uintptr_t grid,
                                           struct SubwalkKernel **out);

/**
 * Read the kernel mass at lattice point `x` (an array of `len`
 * coordinates, where `len` must equal the kernel dimension).  Coordinates
 * are wrapped onto the torus.
 *
 * # Safety
 * `kernel` must be a live handle, `x` must point to `len` readable
 * coordinates, and `out` must be a valid pointer.
 */
enum SubwalkStatus subwalk_kernel_value(const struct SubwalkKernel *kernel,
                                        const int64_t *x,
                                        uintptr_t len,
                                        double *out);

/**
 * Certified upper bound on the kernel's lost mass (truncation defect).  A
 * null handle reports NaN.
 *
 * # Safety
 * `kernel` must be null or a live handle.
 */
double subwalk_kernel_mass_defect(const struct SubwalkKernel *kernel);

/**
 * Number of steps the kernel represents.  A null handle reports 0.
 *
 * # Safety
 * `kernel` must be null or a live handle.
 */
uint64_t subwalk_kernel_steps(const struct SubwalkKernel *kernel);

/**
 * Release a handle returned by [`subwalk_kernel_spectral`].  Null is a
 * no-op.
 *
 * # Safety
 * `kernel` must be null or a pointer returned by `subwalk_kernel_spectral`
 * that has not been freed already.
 */
void subwalk_kernel_free(struct SubwalkKernel *kernel);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBWALK_H */
