#ifndef SCMODES_H
#define SCMODES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  SCM_STATUS_OK = 0,
  /**
   * Bad argument, unsupported combination or value outside the domain.
   */
  SCM_STATUS_INVALID_INPUT = 1,
  /**
   * Blow-up, caustic, non-convergence or another numerical failure.
   */
  SCM_STATUS_NUMERICAL = 2,
  /**
   * File or serialization failure.
   */
  SCM_STATUS_IO = 3,
  /**
   * A required pointer was null.
   */
  SCM_STATUS_NULL_POINTER = 4,
  /**
   * The library panicked; this is a bug.
   */
  SCM_STATUS_PANIC = 5,
} ScmStatus;

/**
 * A sampled wavefunction on a uniform grid.
 */
typedef struct ScmWavefunction ScmWavefunction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *scm_version(void);

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *scm_last_error(void);

/**
 * Coupling `beta_m^n` of the cubic generators.
 */
double scm_beta(size_t m, size_t n);

/**
 * The symbol `p0(x, xi)` at semiclassical parameter `h`.
 */
double scm_p0(double x, double xi, double h);

/**
 * Closed-form `p0` flow of `(x, xi)` for time `t`.
 *
 * # Safety
 * `out_x` and `out_xi` must be valid for writes.
 */
ScmStatus scm_flow_p0(double x, double xi, double h, double t, double *out_x, double *out_xi);

/**
 * Weierstrass `P(z)` for invariants `g2`, `g3` at `z = re + i im`.
 *
 * # Safety
 * `out_re` and `out_im` must be valid for writes.
 */
ScmStatus scm_wp(double g2, double g3, double re, double im, double *out_re, double *out_im);

/**
 * Coefficient of `|m_out, n_out>` after the truncated-basis propagator of
 * `gen` (`"t4"`, `"t5"`, `"t38"`, `"t0"`, `"p0"`) acts on `|m_in, n_in>`.
 *
 * # Safety
 * `gen` must be a NUL-terminated string; `out_re`, `out_im` valid for writes.
 */
ScmStatus scm_truncated_coefficient(const char *gen,
                                    double t,
                                    double h,
                                    size_t m_in,
                                    size_t n_in,
                                    size_t m_out,
                                    size_t n_out,
                                    double *out_re,
                                    double *out_im);

/**
 * Growth exponent fitted at the moving singular point of the `Q1` flow.
 *
 * # Safety
 * `out_slope` must be valid for writes.
 */
ScmStatus scm_q1_singularity_slope(double alpha, double t, double *out_slope);

/**
 * Samples `|m,n>` on a square grid of `dims` (1 or 2) axes with `points`
 * samples on `[-extent, extent)`. In one dimension `n` must be 0.
 *
 * # Safety
 * `out_handle` must be valid for writes.
 */
ScmStatus scm_wavefunction_mode(size_t m,
                                size_t n,
                                double h,
                                size_t dims,
                                size_t points,
                                double extent,
                                ScmWavefunction **out_handle);

/**
 * Parses the grid JSON format.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out_handle` valid for writes.
 */
ScmStatus scm_wavefunction_from_json(const char *json, ScmWavefunction **out_handle);

/**
 * Serializes to the grid JSON format; free the string with [`scm_string_free`].
 *
 * # Safety
 * `w` must be a live handle; `out_json` valid for writes.
 */
ScmStatus scm_wavefunction_to_json(const ScmWavefunction *w, char **out_json);

/**
 * Number of complex samples, or 0 for a null handle.
 *
 * # Safety
 * `w` must be null or a live handle.
 */
size_t scm_wavefunction_len(const ScmWavefunction *w);

/**
 * Number of grid axes, or 0 for a null handle.
 *
 * # Safety
 * `w` must be null or a live handle.
 */
size_t scm_wavefunction_dims(const ScmWavefunction *w);

/**
 * L2 norm, or NaN for a null handle.
 *
 * # Safety
 * `w` must be null or a live handle.
 */
double scm_wavefunction_norm(const ScmWavefunction *w);

/**
 * Copies the samples as interleaved `(re, im)` pairs in row-major order.
 * `capacity` counts doubles and must be at least twice the sample count.
 *
 * # Safety
 * `w` must be a live handle; `buf` valid for `capacity` writes.
 */
ScmStatus scm_wavefunction_values(const ScmWavefunction *w, double *buf, size_t capacity);

/**
 * Applies `gen` for time `t`: `"warmup"` and `"gyrator"` on 2-D grids,
 * `"t0-fio"` and `"q2"` on 1-D grids. The gyrator picks its chart
 * automatically and uses the grid's `h`.
 *
 * # Safety
 * `w` must be a live handle, `gen` a NUL-terminated string and
 * `out_handle` valid for writes.
 */
ScmStatus scm_propagate(const ScmWavefunction *w,
                        const char *gen,
                        double t,
                        double h,
                        ScmWavefunction **out_handle);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `w` must be null or a handle not yet freed.
 */
void scm_wavefunction_free(ScmWavefunction *w);

/**
 * Releases a string returned by the library; null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void scm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCMODES_H */
