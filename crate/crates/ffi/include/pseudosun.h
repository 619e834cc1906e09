#ifndef PSEUDOSUN_H
#define PSEUDOSUN_H

/* Generated by cbindgen; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum PsFieldMethod {
  PS_FIELD_METHOD_EXACT_QUADRATURE = 0,
  PS_FIELD_METHOD_RECT_APPROX = 1,
} PsFieldMethod;

typedef enum PsNormalization {
  PS_NORMALIZATION_RAW = 0,
  PS_NORMALIZATION_MAX_RE_PART_OFFDIAG = 1,
  PS_NORMALIZATION_MAX_DIAG = 2,
} PsNormalization;

/**
 * Result codes.
 */
typedef enum PsStatus {
  PS_STATUS_OK = 0,
  PS_STATUS_INVALID_GRID = 1,
  PS_STATUS_INVALID_PARAMS = 2,
  PS_STATUS_INVALID_INPUT = 3,
  PS_STATUS_CANNOT_NORMALIZE = 4,
  PS_STATUS_PRECONDITION = 5,
  PS_STATUS_NUMERICAL = 6,
  PS_STATUS_FIT_DIVERGED = 7,
  PS_STATUS_NULL_POINTER = 8,
  PS_STATUS_OUT_OF_RANGE = 9,
  PS_STATUS_PANIC = 10,
} PsStatus;

/**
 * Opaque molecule.
 */
typedef struct PsMolecule PsMolecule;

/**
 * Opaque photon spectrum.
 */
typedef struct PsSpectrum PsSpectrum;

/**
 * Opaque density-matrix trajectory.
 */
typedef struct PsTrajectory PsTrajectory;

/**
 * PDC source parameters (cm⁻¹, fs).
 */
typedef struct PsPdcParams {
  double pump_freq;
  double signal_center;
  double entanglement_time;
  double gain;
} PsPdcParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *ps_version(void);

/**
 * Copy the calling thread's last error message into `buf` (truncated and
 * NUL-terminated). Returns the full message length, 0 when there is none.
 *
 * # Safety
 * `buf` must be NULL or point to `len` writable bytes.
 */
size_t ps_last_error_message(char *buf, size_t len);

/**
 * Mean PDC photon number on `count` points of `[min, max]` cm⁻¹.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum PsStatus ps_mean_photon_number(struct PsPdcParams params,
                                    double min,
                                    double max,
                                    size_t count,
                                    struct PsSpectrum **out);

/**
 * Black-body occupation at `temperature` K on `count` points of `[min, max]` cm⁻¹.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum PsStatus ps_thermal_mean(double temperature,
                              double min,
                              double max,
                              size_t count,
                              struct PsSpectrum **out);

/**
 * Number of grid points, 0 for NULL.
 *
 * # Safety
 * `spectrum` must be NULL or a live handle.
 */
size_t ps_spectrum_len(const struct PsSpectrum *spectrum);

/**
 * Copy up to `len` values into `buf`.
 *
 * # Safety
 * `spectrum` must be a live handle and `buf` must point to `len` writable doubles.
 */
enum PsStatus ps_spectrum_values(const struct PsSpectrum *spectrum, double *buf, size_t len);

/**
 * # Safety
 * `spectrum` must be NULL or a handle not yet freed.
 */
void ps_spectrum_free(struct PsSpectrum *spectrum);

/**
 * Molecule with `n` excited levels.
 *
 * # Safety
 * `energies` and `dipoles` must point to `n` readable doubles; `out` must be writable.
 */
enum PsStatus ps_molecule_new(const double *energies,
                              const double *dipoles,
                              size_t n,
                              struct PsMolecule **out);

/**
 * # Safety
 * `molecule` must be NULL or a handle not yet freed.
 */
void ps_molecule_free(struct PsMolecule *molecule);

/**
 * Unconditional dynamics under a stationary spectrum on `count` points of
 * `[t_min, t_max]` fs, raw units.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum PsStatus ps_evolve_unconditional(const struct PsMolecule *molecule,
                                      const struct PsSpectrum *spectrum,
                                      double t_min,
                                      double t_max,
                                      size_t count,
                                      struct PsTrajectory **out);

/**
 * Dynamics conditioned on an idler detected at `herald_time`, raw units.
 * The exact field uses the default frequency quadrature for the time window.
 *
 * # Safety
 * `molecule` must be live; `out` must be writable.
 */
enum PsStatus ps_evolve_heralded(const struct PsMolecule *molecule,
                                 struct PsPdcParams params,
                                 double t_min,
                                 double t_max,
                                 size_t count,
                                 double herald_time,
                                 enum PsFieldMethod method,
                                 struct PsTrajectory **out);

/**
 * Rescale a trajectory in place.
 *
 * # Safety
 * `trajectory` must be a live handle.
 */
enum PsStatus ps_trajectory_normalize(struct PsTrajectory *trajectory, enum PsNormalization mode);

/**
 * Number of time points, 0 for NULL.
 *
 * # Safety
 * `trajectory` must be NULL or a live handle.
 */
size_t ps_trajectory_len(const struct PsTrajectory *trajectory);

/**
 * Number of excited levels, 0 for NULL.
 *
 * # Safety
 * `trajectory` must be NULL or a live handle.
 */
size_t ps_trajectory_dim(const struct PsTrajectory *trajectory);

/**
 * Time of sample `k` and element `(row, col)` of its density matrix.
 *
 * # Safety
 * `trajectory` must be live; `t`, `re` and `im` must be writable.
 */
enum PsStatus ps_trajectory_element(const struct PsTrajectory *trajectory,
                                    size_t k,
                                    size_t row,
                                    size_t col,
                                    double *t,
                                    double *re,
                                    double *im);

/**
 * # Safety
 * `trajectory` must be NULL or a handle not yet freed.
 */
void ps_trajectory_free(struct PsTrajectory *trajectory);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PSEUDOSUN_H */
