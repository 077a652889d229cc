#ifndef VACANT_H
#define VACANT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VacantStatus {
  VACANT_STATUS_OK = 0,
  VACANT_STATUS_NULL_POINTER = 1,
  VACANT_STATUS_INVALID_ARGUMENT = 2,
  VACANT_STATUS_OUT_OF_RANGE = 3,
  VACANT_STATUS_PANIC = 4,
} VacantStatus;

/**
 * A simple d-regular graph on n vertices.
 */
typedef struct VacantGraph VacantGraph;

/**
 * The vacant set of one walk at one intensity, with its components.
 */
typedef struct VacantSet VacantSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if none failed.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *vacant_last_error(void);

/**
 * Critical intensity of random interlacements on the d-regular tree.
 *
 * # Safety
 * `out` must be null or point to writable memory for one `double`.
 */
enum VacantStatus vacant_u_star(size_t d, double *out);

/**
 * Samples a uniform random d-regular graph on n vertices.
 *
 * # Safety
 * `out` must be null or point to writable memory for one handle pointer.
 */
enum VacantStatus vacant_graph_generate(size_t n,
                                        size_t d,
                                        uint64_t seed,
                                        struct VacantGraph **out);

/**
 * # Safety
 * `g` must be null or a handle from [`vacant_graph_generate`] not yet freed.
 */
void vacant_graph_free(struct VacantGraph *g);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t vacant_graph_n(const struct VacantGraph *g);

/**
 * Degree, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live graph handle.
 */
size_t vacant_graph_d(const struct VacantGraph *g);

/**
 * Copies the d neighbours of `x` into `buf`, which must hold at least `len` entries.
 *
 * # Safety
 * `g` must be a live graph handle and `buf` must be valid for `len` writes.
 */
enum VacantStatus vacant_graph_neighbours(const struct VacantGraph *g,
                                          size_t x,
                                          size_t *buf,
                                          size_t len);

/**
 * Runs a stationary walk for time `u·n` and returns the vertices it never visited.
 *
 * # Safety
 * `g` must be a live graph handle and `out` must be writable for one handle pointer.
 */
enum VacantStatus vacant_set_sample(const struct VacantGraph *g,
                                    double u,
                                    uint64_t seed,
                                    struct VacantSet **out);

/**
 * # Safety
 * `s` must be null or a handle from [`vacant_set_sample`] not yet freed.
 */
void vacant_set_free(struct VacantSet *s);

/**
 * Writes 1 to `out` if `x` is vacant and 0 otherwise.
 *
 * # Safety
 * `s` must be a live vacant-set handle and `out` writable for one `int`.
 */
enum VacantStatus vacant_set_contains(const struct VacantSet *s, size_t x, int32_t *out);

/**
 * Number of vacant vertices, or 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live vacant-set handle.
 */
size_t vacant_set_count(const struct VacantSet *s);

/**
 * Sizes of the largest and second-largest vacant components.
 *
 * # Safety
 * `s` must be a live vacant-set handle; each output must be null or writable.
 */
enum VacantStatus vacant_set_largest_components(const struct VacantSet *s,
                                                size_t *c_max,
                                                size_t *c_sec);

/**
 * Size of the vacant component containing `x`, 0 when `x` was visited.
 *
 * # Safety
 * `s` must be a live vacant-set handle and `out` writable for one `size_t`.
 */
enum VacantStatus vacant_set_component_size(const struct VacantSet *s, size_t x, size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VACANT_H */
