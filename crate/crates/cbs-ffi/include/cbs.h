#ifndef CBS_H
#define CBS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Contribution type of the triple-scattering signal.
 */
typedef enum CbsContributionType {
  CBS_CONTRIBUTION_TYPE_L1 = 0,
  CBS_CONTRIBUTION_TYPE_L2 = 1,
  CBS_CONTRIBUTION_TYPE_C1 = 2,
  CBS_CONTRIBUTION_TYPE_C2 = 3,
} CbsContributionType;

/*
 Result code of every fallible call.
 */
typedef enum CbsStatus {
  CBS_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  CBS_STATUS_NULL_POINTER = 1,
  /*
   Parameters, grid or tolerance out of range.
   */
  CBS_STATUS_INVALID_ARGUMENT = 2,
  /*
   A numerical routine failed: quadrature, singular resolvent or similar.
   */
  CBS_STATUS_NUMERICAL = 3,
  /*
   A caller buffer is smaller than the result.
   */
  CBS_STATUS_BUFFER_TOO_SMALL = 4,
  /*
   Unexpected failure inside the library.
   */
  CBS_STATUS_INTERNAL = 5,
} CbsStatus;

/*
 Driven two-level atom with γ = 1.
 */
typedef struct CbsAtom CbsAtom;

/*
 Inelastic spectra of all four types on a frequency grid plus elastic intensities.
 */
typedef struct CbsSpectrum CbsSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *cbs_version(void);

/*
 Copies the calling thread's last error message into `buf` (NUL-terminated,
 truncated to `len`) and returns the full message length without the NUL.

 # Safety
 `buf` must be null or point to `len` writable bytes.
 */
size_t cbs_last_error_message(char *buf, size_t len);

/*
 Creates an atom with real Rabi frequency `rabi` and detuning `detuning`.

 # Safety
 `out` must be a valid pointer; on success it receives a handle to release
 with [`cbs_atom_free`].
 */
enum CbsStatus cbs_atom_new(double rabi, double detuning, struct CbsAtom **out);

/*
 Releases an atom handle; null is ignored.

 # Safety
 `atom` must be null or a handle from [`cbs_atom_new`] not yet released.
 */
void cbs_atom_free(struct CbsAtom *atom);

/*
 Steady-state Bloch vector (⟨σ⁻⟩, ⟨σ⁺⟩, ⟨σᶻ⟩) as separate real and imaginary parts.

 # Safety
 `atom` must be a live handle; `re` and `im` must each point to 3 writable doubles.
 */
enum CbsStatus cbs_atom_steady_state(const struct CbsAtom *atom,
                                     double *re,
                                     double *im);

/*
 Elastic intensity of one contribution type. `rel_tol` = 0 selects the default.

 # Safety
 `atom` must be a live handle and `out` a valid pointer.
 */
enum CbsStatus cbs_elastic_intensity(const struct CbsAtom *atom,
                                     enum CbsContributionType ty,
                                     double rel_tol,
                                     double *out);

/*
 Inelastic spectrum of one contribution type at the `n` frequencies in `nu`,
 written to `out`.

 # Safety
 `atom` must be a live handle; `nu` and `out` must each point to `n` doubles.
 */
enum CbsStatus cbs_inelastic_spectrum(const struct CbsAtom *atom,
                                      enum CbsContributionType ty,
                                      const double *nu,
                                      size_t n,
                                      double rel_tol,
                                      double *out);

/*
 Weak-drive closed form of the inelastic spectrum at frequency `nu`.
 */
double cbs_perturbative_inelastic(enum CbsContributionType ty,
                                  double rabi,
                                  double detuning,
                                  double nu);

/*
 Weak-drive closed form of the elastic intensity.
 */
double cbs_perturbative_elastic(enum CbsContributionType ty, double rabi, double detuning);

/*
 Number of enumerated diagram terms of a type before (`raw`) and after
 (`allowed`) removal of closed-loop diagrams.

 # Safety
 `raw` and `allowed` must be valid pointers.
 */
enum CbsStatus cbs_diagram_count(enum CbsContributionType ty, size_t *raw, size_t *allowed);

/*
 Computes all four spectra on the `n` frequencies in `nu` together with the
 elastic intensities.

 # Safety
 `atom` must be a live handle, `nu` must point to `n` doubles and `out` must be
 a valid pointer; on success it receives a handle to release with
 [`cbs_spectrum_free`].
 */
enum CbsStatus cbs_spectrum_compute(const struct CbsAtom *atom,
                                    const double *nu,
                                    size_t n,
                                    double rel_tol,
                                    struct CbsSpectrum **out);

/*
 Releases a spectrum handle; null is ignored.

 # Safety
 `spectrum` must be null or a handle from [`cbs_spectrum_compute`] not yet released.
 */
void cbs_spectrum_free(struct CbsSpectrum *spectrum);

/*
 Number of frequency points of a spectrum; 0 for a null handle.

 # Safety
 `spectrum` must be null or a live handle.
 */
size_t cbs_spectrum_len(const struct CbsSpectrum *spectrum);

/*
 Copies the spectrum of one type into `out`, which holds `len` doubles.
 Returns [`CbsStatus::BufferTooSmall`] when `len` is below the grid length.

 # Safety
 `spectrum` must be a live handle and `out` must point to `len` writable doubles.
 */
enum CbsStatus cbs_spectrum_values(const struct CbsSpectrum *spectrum,
                                   enum CbsContributionType ty,
                                   double *out,
                                   size_t len);

/*
 Elastic intensity of one type stored with the spectrum.

 # Safety
 `spectrum` must be a live handle and `out` a valid pointer.
 */
enum CbsStatus cbs_spectrum_elastic(const struct CbsSpectrum *spectrum,
                                    enum CbsContributionType ty,
                                    double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CBS_H */
