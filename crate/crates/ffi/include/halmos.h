#ifndef HALMOS_H
#define HALMOS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum {
  HX_STATUS_OK = 0,
  HX_STATUS_NULL_ARGUMENT,
  HX_STATUS_INVALID_UTF8,
  HX_STATUS_DIMENSION,
  HX_STATUS_NOT_BIJECTION,
  HX_STATUS_OUT_OF_RANGE,
  HX_STATUS_NOT_ERGODIC,
  HX_STATUS_DIVISIBILITY,
  HX_STATUS_HEIGHT,
  HX_STATUS_CYCLE_TYPE_MISMATCH,
  HX_STATUS_COMPLETION,
  HX_STATUS_NOT_CYCLIC,
  HX_STATUS_RESOLUTION,
  HX_STATUS_TARGET_OUTSIDE,
  HX_STATUS_INFEASIBLE,
  HX_STATUS_IDENTITY_BALL,
  HX_STATUS_DENSITY,
  HX_STATUS_OVERLAP,
  HX_STATUS_INVALID,
  HX_STATUS_PARSE,
  HX_STATUS_IO,
  HX_STATUS_PANIC,
} HxStatus;

/**
 * Opaque conjugator-certificate handle.
 */
typedef struct HxConjCert HxConjCert;

/**
 * Opaque weak-neighborhood handle.
 */
typedef struct HxNeighborhood HxNeighborhood;

/**
 * Opaque permutation system handle.
 */
typedef struct HxPerm HxPerm;

/**
 * Opaque unbalancedness-witness handle.
 */
typedef struct HxWitness HxWitness;

/**
 * An exact rational value; `den` is always positive and the pair is in
 * lowest terms.
 */
typedef struct {
  int64_t num;
  int64_t den;
} HxRatio;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * A static description of a status code.
 */
const char *hx_status_message(HxStatus status);

/**
 * Builds a permutation from `images[0..n]`, the image of each atom.
 *
 * # Safety
 * `images` must point to `n` readable elements.
 */
HxStatus hx_perm_from_images(const size_t *images, size_t n, HxPerm **out);

HxStatus hx_perm_identity(size_t n, HxPerm **out);

HxStatus hx_perm_rotation(size_t n, size_t step, HxPerm **out);

HxStatus hx_perm_random_cycle(size_t n, uint64_t seed, HxPerm **out);

HxStatus hx_perm_random_permutation(size_t n, uint64_t seed, HxPerm **out);

HxStatus hx_perm_m_periodic(size_t n, size_t m, uint64_t seed, HxPerm **out);

/**
 * # Safety
 * `p` must be a live handle from this library, or NULL.
 */
void hx_perm_free(HxPerm *p);

/**
 * Atom count; 0 for NULL.
 *
 * # Safety
 * `p` must be a live handle or NULL.
 */
size_t hx_perm_len(const HxPerm *p);

/**
 * Copies the image vector into `buf[0..n]`.
 *
 * # Safety
 * `buf` must point to at least `hx_perm_len(p)` writable elements.
 */
HxStatus hx_perm_images(const HxPerm *p, size_t *buf, size_t buf_len);

/**
 * # Safety
 * `s` and `t` must be live handles.
 */
HxStatus hx_perm_compose(const HxPerm *s, const HxPerm *t, HxPerm **out);

/**
 * # Safety
 * `p` must be a live handle.
 */
HxStatus hx_perm_inverse(const HxPerm *p, HxPerm **out);

/**
 * `h t h⁻¹`.
 *
 * # Safety
 * `h` and `t` must be live handles.
 */
HxStatus hx_perm_conjugate(const HxPerm *h, const HxPerm *t, HxPerm **out);

/**
 * Normalized Hamming distance between two systems, exact.
 *
 * # Safety
 * `s` and `t` must be live handles; `out` must be writable.
 */
HxStatus hx_halmos_distance(const HxPerm *s, const HxPerm *t, HxRatio *out);

/**
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
HxStatus hx_perm_is_ergodic(const HxPerm *p, bool *out);

/**
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
HxStatus hx_perm_is_m_periodic(const HxPerm *p, size_t m, bool *out);

/**
 * The m-periodic approximation at exact distance 1/m (for m < n).
 *
 * # Safety
 * `t` must be a live handle.
 */
HxStatus hx_periodic_approximation(const HxPerm *t, size_t m, HxPerm **out);

/**
 * Merges all cycles into a single n-cycle; writes the exact cost.
 *
 * # Safety
 * `s` must be a live handle; `cost` must be writable.
 */
HxStatus hx_ergodic_smoothing(const HxPerm *s, HxPerm **out, HxRatio *cost);

/**
 * Serializes a permutation in the `perm n=<N>` text format.
 *
 * # Safety
 * `p` must be a live handle; the string must be freed with
 * `hx_string_free`.
 */
HxStatus hx_perm_to_text(const HxPerm *p, char **out);

/**
 * # Safety
 * `text` must be a NUL-terminated string.
 */
HxStatus hx_perm_from_text(const char *text, HxPerm **out);

/**
 * # Safety
 * `s` must have been returned by this library, or be NULL.
 */
void hx_string_free(char *s);

/**
 * Neighborhood of `center` with radius `eps` and no marker sets yet.
 *
 * # Safety
 * `center` must be a live handle.
 */
HxStatus hx_neighborhood_new(const HxPerm *center, HxRatio eps, HxNeighborhood **out);

/**
 * Adds a marker set; it must be disjoint from the existing ones.
 *
 * # Safety
 * `nbhd` must be a live handle; `members` must point to `len` readable
 * elements.
 */
HxStatus hx_neighborhood_add_set(HxNeighborhood *nbhd, const size_t *members, size_t len);

/**
 * # Safety
 * `nbhd` and `s` must be live handles; `out` must be writable.
 */
HxStatus hx_neighborhood_contains(const HxNeighborhood *nbhd, const HxPerm *s, bool *out);

/**
 * # Safety
 * `nbhd` must be a live handle or NULL.
 */
void hx_neighborhood_free(HxNeighborhood *nbhd);

/**
 * Runs the conjugator pipeline for single n-cycles `s`, `t` and budget
 * `delta`.
 *
 * # Safety
 * `s` and `t` must be live handles.
 */
HxStatus hx_conjugator_build(const HxPerm *s, const HxPerm *t, HxRatio delta, HxConjCert **out);

/**
 * # Safety
 * `cert` must be a live handle or NULL.
 */
void hx_conj_cert_free(HxConjCert *cert);

/**
 * Writes the three recorded distances of a certificate.
 *
 * # Safety
 * `cert` must be a live handle; out pointers must be writable.
 */
HxStatus hx_conj_cert_distances(const HxConjCert *cert,
                                HxRatio *conj_dist,
                                HxRatio *id_dist,
                                HxRatio *input_dist);

/**
 * Displacement window of the certificate; 0 for NULL.
 *
 * # Safety
 * `cert` must be a live handle or NULL.
 */
size_t hx_conj_cert_window(const HxConjCert *cert);

/**
 * The conjugator `h` of a certificate, as a fresh handle.
 *
 * # Safety
 * `cert` must be a live handle.
 */
HxStatus hx_conj_cert_conjugator(const HxConjCert *cert, HxPerm **out);

/**
 * Recomputes every certified quantity; false on any mismatch or NULL.
 *
 * # Safety
 * `cert` must be a live handle or NULL.
 */
bool hx_conj_cert_verify(const HxConjCert *cert);

/**
 * # Safety
 * `cert` must be a live handle; free the string with `hx_string_free`.
 */
HxStatus hx_conj_cert_to_text(const HxConjCert *cert, char **out);

/**
 * # Safety
 * `text` must be a NUL-terminated string.
 */
HxStatus hx_conj_cert_from_text(const char *text, HxConjCert **out);

/**
 * Runs the full witness pipeline.
 *
 * # Safety
 * `t1`, `t2` and `u` must be live handles.
 */
HxStatus hx_witness_build(const HxPerm *t1,
                          const HxPerm *t2,
                          const HxNeighborhood *u,
                          HxRatio v_eps,
                          HxRatio delta,
                          uint64_t seed,
                          HxWitness **out);

/**
 * # Safety
 * `w` must be a live handle or NULL.
 */
void hx_witness_free(HxWitness *w);

/**
 * Recomputes every invariant of the witness; false on NULL.
 *
 * # Safety
 * `w` must be a live handle or NULL.
 */
bool hx_witness_verify(const HxWitness *w);

/**
 * # Safety
 * `w` must be a live handle; `out` must be writable.
 */
HxStatus hx_witness_final_dist(const HxWitness *w, HxRatio *out);

/**
 * # Safety
 * `w` must be a live handle; free the string with `hx_string_free`.
 */
HxStatus hx_witness_to_text(const HxWitness *w, char **out);

/**
 * # Safety
 * `text` must be a NUL-terminated string.
 */
HxStatus hx_witness_from_text(const char *text, HxWitness **out);

/**
 * Verifies any certificate text produced by the toolkit, detecting the
 * kind from its header line. Writes true iff the certificate is valid.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `valid` must be writable.
 */
HxStatus hx_verify_text(const char *text, bool *valid);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* HALMOS_H */
