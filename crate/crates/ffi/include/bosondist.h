#ifndef BOSONDIST_H
#define BOSONDIST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every call.
 */
typedef enum BdStatus {
  BD_STATUS_OK = 0,
  BD_STATUS_NULL_POINTER = 1,
  BD_STATUS_INVALID_ARGUMENT = 2,
  BD_STATUS_SIZE_LIMIT = 3,
  BD_STATUS_VALIDATION = 4,
  BD_STATUS_NUMERIC_RANGE = 5,
  BD_STATUS_IO = 6,
  BD_STATUS_PANIC = 7,
} BdStatus;

/*
 Opaque experiment: a model and a unitary.
 */
typedef struct BdExperiment BdExperiment;

/*
 Opaque photon model.
 */
typedef struct BdModel BdModel;

/*
 Opaque unitary matrix.
 */
typedef struct BdUnitary BdUnitary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the last error message of this thread into `buf` (NUL-terminated,
 truncated to `len - 1` bytes) and returns its full length in bytes.

 # Safety
 `buf` must be null or point to `len` writable bytes.
 */
size_t bd_last_error_message(char *buf, size_t len);

/*
 Haar-random `m × m` unitary from `seed`.

 # Safety
 `out` must be a valid pointer.
 */
enum BdStatus bd_unitary_haar(size_t m, uint64_t seed, struct BdUnitary **out);

/*
 Balanced two-mode beam splitter.

 # Safety
 `out` must be a valid pointer.
 */
enum BdStatus bd_unitary_beam_splitter(struct BdUnitary **out);

/*
 Unitary from row-major real and imaginary parts of length `m * m`.

 # Safety
 `re` and `im` must point to `m * m` doubles; `out` must be valid.
 */
enum BdStatus bd_unitary_from_parts(size_t m,
                                    const double *re,
                                    const double *im,
                                    struct BdUnitary **out);

/*
 Unitary read from a JSON file of the form `{"m", "re", "im"}`.

 # Safety
 `path` must be a NUL-terminated string; `out` must be valid.
 */
enum BdStatus bd_unitary_from_json_file(const char *path, struct BdUnitary **out);

/*
 Writes the unitary as JSON.

 # Safety
 `u` must be a live handle; `path` a NUL-terminated string.
 */
enum BdStatus bd_unitary_write_json_file(const struct BdUnitary *u, const char *path);

/*
 Dimension of the unitary, or 0 for a null handle.

 # Safety
 `u` must be null or a live handle.
 */
size_t bd_unitary_dim(const struct BdUnitary *u);

/*
 Entry `(row, col)` of the unitary.

 # Safety
 `u` must be a live handle; `re` and `im` valid pointers.
 */
enum BdStatus bd_unitary_get(const struct BdUnitary *u,
                             size_t row,
                             size_t col,
                             double *re,
                             double *im);

/*
 Releases a unitary handle. Null is ignored.

 # Safety
 `u` must be null or a handle not yet freed.
 */
void bd_unitary_free(struct BdUnitary *u);

/*
 Photon model with `n` photons, pulse width, arrival-time spread and
 optional per-photon frequencies (`frequencies` may be null for all zero).

 # Safety
 `frequencies` must be null or point to `n` doubles; `out` must be valid.
 */
enum BdStatus bd_model_new(size_t n,
                           double pulse_width,
                           double arrival_spread,
                           const double *frequencies,
                           struct BdModel **out);

/*
 Dimensionless spread `Δτ / 2T` of the model.

 # Safety
 `model` must be a live handle; `out` valid.
 */
enum BdStatus bd_model_eta(const struct BdModel *model, double *out);

/*
 Releases a model handle. Null is ignored.

 # Safety
 `model` must be null or a handle not yet freed.
 */
void bd_model_free(struct BdModel *model);

/*
 Experiment from copies of `model` and `unitary`; both handles stay owned
 by the caller.

 # Safety
 Both handles must be live; `out` valid.
 */
enum BdStatus bd_experiment_new(const struct BdModel *model,
                                const struct BdUnitary *unitary,
                                struct BdExperiment **out);

/*
 Releases an experiment handle. Null is ignored.

 # Safety
 `exp` must be null or a handle not yet freed.
 */
void bd_experiment_free(struct BdExperiment *exp);

/*
 Permanent of an `n × n` complex matrix given as row-major parts.

 # Safety
 `re` and `im` must point to `n * n` doubles; outputs valid.
 */
enum BdStatus bd_permanent(size_t n,
                           const double *re,
                           const double *im,
                           double *out_re,
                           double *out_im);

/*
 `Tr(ρⁿ)` for spread `eta`.

 # Safety
 `out` must be valid.
 */
enum BdStatus bd_purity(double eta, size_t n, double *out);

/*
 `exp(-n η²)`.

 # Safety
 `out` must be valid.
 */
enum BdStatus bd_purity_approx(double eta, size_t n, double *out);

/*
 Closed-form `d_s` for `n` photons.

 # Safety
 `out` must be valid.
 */
enum BdStatus bd_ds_closed_form(size_t n, double eta, double *out);

/*
 Exact `d_s` by summing over the symmetric group.

 # Safety
 `model` must be a live handle; `out` valid.
 */
enum BdStatus bd_ds_exact(const struct BdModel *model, double *out);

/*
 Monte Carlo `d_s` from sampled arrival times.

 # Safety
 `model` must be a live handle; outputs valid.
 */
enum BdStatus bd_ds_monte_carlo(const struct BdModel *model,
                                uint64_t seed,
                                size_t samples,
                                double *out_estimate,
                                double *out_std_error);

/*
 Probability of the ordered output `ports` without time resolution.

 # Safety
 `exp` must be a live handle; `ports` must point to `n` entries.
 */
enum BdStatus bd_prob_a(const struct BdExperiment *exp, const size_t *ports, size_t n, double *out);

/*
 Same as [`bd_prob_a`] for identical photons.

 # Safety
 As for [`bd_prob_a`].
 */
enum BdStatus bd_prob_a_ideal(const struct BdExperiment *exp,
                              const size_t *ports,
                              size_t n,
                              double *out);

/*
 Joint density of `ports` and detection `times` (units `1/T^n`).

 # Safety
 `exp` must be a live handle; `ports` and `times` must point to `n` entries.
 */
enum BdStatus bd_prob_b(const struct BdExperiment *exp,
                        const size_t *ports,
                        const double *times,
                        size_t n,
                        double *out);

/*
 Same as [`bd_prob_b`] for identical photons.

 # Safety
 As for [`bd_prob_b`].
 */
enum BdStatus bd_prob_b_ideal(const struct BdExperiment *exp,
                              const size_t *ports,
                              const double *times,
                              size_t n,
                              double *out);

/*
 Total variation distance to the ideal distribution without time resolution.

 # Safety
 `exp` must be a live handle; `out` valid.
 */
enum BdStatus bd_tvd_a(const struct BdExperiment *exp, double *out);

/*
 Monte Carlo total variation distance with time resolution.

 # Safety
 `exp` must be a live handle; outputs valid.
 */
enum BdStatus bd_tvd_b(const struct BdExperiment *exp,
                       uint64_t seed,
                       size_t samples,
                       double *out_estimate,
                       double *out_std_error);

/*
 Upper bound on either distance for `n` photons of two-photon purity `purity`.

 # Safety
 `out` must be valid.
 */
enum BdStatus bd_deviation_bound(size_t n, double purity, double *out);

/*
 Smallest purity keeping the bound at or below `target`.

 # Safety
 `out` must be valid.
 */
enum BdStatus bd_required_purity(size_t n, double target, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOSONDIST_H */
