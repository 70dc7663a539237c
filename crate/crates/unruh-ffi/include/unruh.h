#ifndef UNRUH_H
#define UNRUH_H

/* Generated by cbindgen from the unruh-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible call.
typedef enum UnruhStatus {
  // Success; out-parameters are valid.
  UNRUH_STATUS_OK = 0,
  // A required pointer argument was NULL.
  UNRUH_STATUS_NULL_POINTER = 1,
  // An argument value was rejected (range, parse, or preset errors).
  UNRUH_STATUS_INVALID_ARGUMENT = 2,
  // Array or party dimensions disagree with the handle.
  UNRUH_STATUS_DIMENSION_MISMATCH = 3,
  // A matrix was not a physical density matrix (Hermiticity,
  // positivity, or trace).
  UNRUH_STATUS_NOT_PHYSICAL = 4,
  // The construction would exceed a resource budget.
  UNRUH_STATUS_BUDGET_EXCEEDED = 5,
  // Requested operation is defined only for other dimensions.
  UNRUH_STATUS_UNSUPPORTED_DIMENSION = 6,
  // A property-suite assertion failed.
  UNRUH_STATUS_PROPERTY_FAILED = 7,
  // Unexpected internal error.
  UNRUH_STATUS_INTERNAL = 8,
  // A panic was caught at the boundary.
  UNRUH_STATUS_INTERNAL_PANIC = 9,
} UnruhStatus;

// Opaque handle to a certified channel (Kraus set plus its spec).
typedef struct UnruhChannel UnruhChannel;

// Opaque handle to a multiparty density matrix.
typedef struct UnruhState UnruhState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Last error message for this thread, as a NUL-terminated string.
//
// Never NULL; empty before the first failure. Valid until the next failing
// call on the same thread.
const char *unruh_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *unruh_version(void);

// Build a certified channel.
//
// `local_dims[n_parties]` are per-party input dimensions; `accelerated`
// and `r` list the accelerated party indices and their acceleration
// parameters (`n_accelerated` entries each). Per-party cutoffs are chosen
// so the truncation tail stays below `epsilon`; pass `epsilon <= 0` for
// the default target of 1e-10.
//
// # Safety
// Pointers must be valid for the stated lengths; `out_channel` receives an
// owned handle that must be released with [`unruh_channel_free`].
enum UnruhStatus unruh_channel_new(const size_t *local_dims,
                                   size_t n_parties,
                                   const size_t *accelerated,
                                   size_t n_accelerated,
                                   const double *r,
                                   double epsilon,
                                   struct UnruhChannel **out_channel);

// Release a channel handle (NULL is a no-op).
//
// # Safety
// `channel` must be a handle from [`unruh_channel_new`], released once.
void unruh_channel_free(struct UnruhChannel *channel);

// Number of Kraus operators.
//
// # Safety
// `channel` must be a live handle and `out` a valid pointer.
enum UnruhStatus unruh_channel_kraus_count(const struct UnruhChannel *channel, size_t *out);

// Completeness defect max |I - sum A^dag A| (bounded by the tail).
//
// # Safety
// `channel` must be a live handle and `out` a valid pointer.
enum UnruhStatus unruh_channel_completeness_defect(const struct UnruhChannel *channel, double *out);

// Certified bound on the trace deficit of any output.
//
// # Safety
// `channel` must be a live handle and `out` a valid pointer.
enum UnruhStatus unruh_channel_tail_bound(const struct UnruhChannel *channel, double *out);

// Kraus cutoff chosen for the `index`-th accelerated party.
//
// # Safety
// `channel` must be a live handle and `out` a valid pointer.
enum UnruhStatus unruh_channel_cutoff(const struct UnruhChannel *channel,
                                      size_t index,
                                      size_t *out);

// Apply the channel; the result is a new state handle on the enlarged
// output space.
//
// # Safety
// Handles must be live; `out_state` receives an owned handle to release
// with [`unruh_state_free`].
enum UnruhStatus unruh_channel_apply(const struct UnruhChannel *channel,
                                     const struct UnruhState *state,
                                     struct UnruhState **out_state);

// Build a state from a row-major density matrix.
//
// `dims[n_parties]` are party dimensions with product `d`; `re` (and `im`,
// which may be NULL for a real matrix) hold `d * d` entries. The matrix
// must be Hermitian, positive semidefinite, and unit trace within the
// library tolerances.
//
// # Safety
// Pointers must be valid for the stated lengths; `out_state` receives an
// owned handle to release with [`unruh_state_free`].
enum UnruhStatus unruh_state_new(const size_t *dims,
                                 size_t n_parties,
                                 const double *re,
                                 const double *im,
                                 struct UnruhState **out_state);

// The two-qubit Bell state (|00> + |11>)/sqrt(2).
//
// # Safety
// `out_state` receives an owned handle to release with
// [`unruh_state_free`].
enum UnruhStatus unruh_state_bell_phi_plus(struct UnruhState **out_state);

// Release a state handle (NULL is a no-op).
//
// # Safety
// `state` must be a handle from this library, released once.
void unruh_state_free(struct UnruhState *state);

// Total Hilbert-space dimension (product of party dimensions).
//
// # Safety
// `state` must be a live handle and `out` a valid pointer.
enum UnruhStatus unruh_state_dim(const struct UnruhState *state, size_t *out);

// Number of parties.
//
// # Safety
// `state` must be a live handle and `out` a valid pointer.
enum UnruhStatus unruh_state_party_count(const struct UnruhState *state, size_t *out);

// Dimension of one party.
//
// # Safety
// `state` must be a live handle and `out` a valid pointer.
enum UnruhStatus unruh_state_party_dim(const struct UnruhState *state, size_t party, size_t *out);

// Trace of the stored matrix.
//
// # Safety
// `state` must be a live handle and `out` a valid pointer.
enum UnruhStatus unruh_state_trace(const struct UnruhState *state, double *out);

// Accumulated truncation-induced trace deficit.
//
// # Safety
// `state` must be a live handle and `out` a valid pointer.
enum UnruhStatus unruh_state_trace_deficit(const struct UnruhState *state, double *out);

// Copy the density matrix out, row-major. `re` must hold `dim * dim`
// doubles; `im` may be NULL to skip the imaginary part.
//
// # Safety
// `state` must be a live handle; buffers must be valid for `dim * dim`
// doubles each (query `dim` with [`unruh_state_dim`]).
enum UnruhStatus unruh_state_copy_matrix(const struct UnruhState *state, double *re, double *im);

// Sum of absolute values of off-diagonal entries.
//
// # Safety
// `state` must be a live handle and `out` a valid pointer.
enum UnruhStatus unruh_state_l1_coherence(const struct UnruhState *state, double *out);

// Negativity across the cut obtained by transposing the listed parties.
//
// # Safety
// `state` must be a live handle; `transpose_parties` must be valid for
// `n_transpose` entries; `out` a valid pointer.
enum UnruhStatus unruh_state_negativity(const struct UnruhState *state,
                                        const size_t *transpose_parties,
                                        size_t n_transpose,
                                        double *out);

// Trace distance (1/2)||a - b||_1 between two states on the same space.
//
// # Safety
// Both handles must be live and `out` a valid pointer.
enum UnruhStatus unruh_trace_distance(const struct UnruhState *a,
                                      const struct UnruhState *b,
                                      double *out);

// Map a Rindler frequency to the acceleration parameter r.
//
// # Safety
// `out` must be a valid pointer.
enum UnruhStatus unruh_r_from_omega(double omega, double *out);

// Probability weight discarded when capping excitation `level`'s Kraus
// series at `cutoff`.
//
// # Safety
// `out` must be a valid pointer.
enum UnruhStatus unruh_truncation_tail(double r, size_t level, size_t cutoff, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UNRUH_H */
