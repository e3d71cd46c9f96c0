/* C interface for the wpl-braid engine. Generated by cbindgen; do not edit. */

#ifndef WPL_BRAID_H
#define WPL_BRAID_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
enum WplStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  WPL_STATUS_OK = 0,
  WPL_STATUS_NULL_POINTER = 1,
  WPL_STATUS_BAD_INPUT = 2,
  WPL_STATUS_MISMATCH = 3,
  WPL_STATUS_OVERFLOW = 4,
  WPL_STATUS_MODEL_INCONSISTENCY = 5,
  WPL_STATUS_BUDGET_EXHAUSTED = 6,
  WPL_STATUS_INTERNAL = 7,
};
#ifndef __cplusplus
typedef int32_t WplStatus;
#endif // __cplusplus

// Search strategies for [`wpl_connect`].
enum WplStrategy
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  WPL_STRATEGY_RECURSIVE = 0,
  WPL_STRATEGY_BIDIRECTIONAL = 1,
};
#ifndef __cplusplus
typedef int32_t WplStrategy;
#endif // __cplusplus

// Opaque Euler lattice handle.
typedef struct WplLattice WplLattice;

// Opaque exceptional-sequence handle.
typedef struct WplSeq WplSeq;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds the Euler lattice of a weight sequence (`weights` may be null
// when `len` is 0, giving the weightless type).
//
// # Safety
// `weights` must point to `len` readable values; `out` must be a valid
// pointer. The returned handle must be released with
// [`wpl_lattice_free`].
WplStatus wpl_lattice_new(const int64_t *weights, uintptr_t len, struct WplLattice **out);

// # Safety
// `lat` must be null or a handle from [`wpl_lattice_new`], not yet freed.
void wpl_lattice_free(struct WplLattice *lat);

// Rank of the Grothendieck lattice; 0 on a null handle.
//
// # Safety
// `lat` must be a live handle or null.
uintptr_t wpl_lattice_rank(const struct WplLattice *lat);

// Least common multiple of the weights; 0 on a null handle.
//
// # Safety
// `lat` must be a live handle or null.
int64_t wpl_lattice_lcm(const struct WplLattice *lat);

// Twice the genus.
//
// # Safety
// `lat` must be a live handle or null.
int64_t wpl_lattice_genus2(const struct WplLattice *lat);

// JSON dump of the lattice (weights, Gram matrix, degrees, translate
// matrix, genus). Free the string with [`wpl_string_free`].
//
// # Safety
// `lat` must be a live handle; `out` a valid pointer.
WplStatus wpl_lattice_to_json(const struct WplLattice *lat, char **out);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void wpl_string_free(char *s);

// The canonical exceptional sequence.
//
// # Safety
// `lat` must be a live handle; `out` valid. Free with [`wpl_seq_free`].
WplStatus wpl_seq_canonical(const struct WplLattice *lat, struct WplSeq **out);

// The determinant-normalizing sequence `(O, O(c), tube simples)`.
//
// # Safety
// `lat` must be a live handle; `out` valid. Free with [`wpl_seq_free`].
WplStatus wpl_seq_det2(const struct WplLattice *lat, struct WplSeq **out);

// Builds a sequence from `count` rows of coefficients, one row per class,
// each of length `wpl_lattice_rank(lat)`, row-major.
//
// # Safety
// `coeffs` must hold `count * wpl_lattice_rank(lat)` values; `out` valid.
WplStatus wpl_seq_from_classes(const struct WplLattice *lat,
                               const int64_t *coeffs,
                               uintptr_t count,
                               struct WplSeq **out);

// # Safety
// `seq` must be null or a handle from this library, not yet freed.
void wpl_seq_free(struct WplSeq *seq);

// Number of entries; 0 on a null handle.
//
// # Safety
// `seq` must be a live handle or null.
uintptr_t wpl_seq_len(const struct WplSeq *seq);

// Copies the coefficients of entry `index` into `buf`.
//
// # Safety
// `buf` must hold at least `buf_len` writable values.
WplStatus wpl_seq_entry(const struct WplSeq *seq, uintptr_t index, int64_t *buf, uintptr_t buf_len);

// Sequence as JSON `{ "weights": ..., "classes": ... }`; free with
// [`wpl_string_free`].
//
// # Safety
// `lat` and `seq` must be live handles; `out` valid.
WplStatus wpl_seq_to_json(const struct WplLattice *lat, const struct WplSeq *seq, char **out);

// Validity of the sequence: writes 1 or 0 to `ok_out`. A sequence that
// fails validation is still `WPL_STATUS_OK` at the call level.
//
// # Safety
// `lat` and `seq` must be live handles; `ok_out` valid.
WplStatus wpl_seq_is_valid(const struct WplLattice *lat, const struct WplSeq *seq, int32_t *ok_out);

// Applies a braid word (signed 1-based slots) and hands back the new
// sequence.
//
// # Safety
// `letters` must hold `len` values; handles live; `out` valid.
WplStatus wpl_seq_apply_word(const struct WplLattice *lat,
                             const struct WplSeq *seq,
                             const int32_t *letters,
                             uintptr_t len,
                             struct WplSeq **out);

// Determinant of the default functional matrix (rank, degree, tube
// pairings); its absolute value is the weight lcm on every full sequence
// in the mutation orbit.
//
// # Safety
// Handles live; `det_out` valid.
WplStatus wpl_invariant_determinant(const struct WplLattice *lat,
                                    const struct WplSeq *seq,
                                    int64_t *det_out);

// Checks both helix rotation identities; writes 1 or 0.
//
// # Safety
// Handles live; `pass_out` valid.
WplStatus wpl_helix_check(const struct WplLattice *lat,
                          const struct WplSeq *seq,
                          int32_t *pass_out);

// Searches for a braid word carrying `src` to `dst`. On success writes a
// letter buffer (free with [`wpl_word_free`]) and its length; when the
// budget runs out returns `WPL_STATUS_BUDGET_EXHAUSTED` with
// `found_out = 0`. A returned word always re-applies exactly.
//
// # Safety
// Handles live; out-pointers valid.
WplStatus wpl_connect(const struct WplLattice *lat,
                      const struct WplSeq *src,
                      const struct WplSeq *dst,
                      WplStrategy strategy,
                      uint64_t max_nodes,
                      int32_t *found_out,
                      int32_t **word_out,
                      uintptr_t *word_len_out,
                      uint64_t *nodes_out);

// # Safety
// `word` must be a buffer of length `len` returned by [`wpl_connect`],
// not yet freed (null is ignored).
void wpl_word_free(int32_t *word, uintptr_t len);

// Certified lower bound for the strongest global dimension by bounded
// orbit search.
//
// # Safety
// `lat` live; `bound_out` valid.
WplStatus wpl_sgd_lower_bound(const struct WplLattice *lat, uint64_t max_nodes, int64_t *bound_out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* WPL_BRAID_H */
