/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef HARMONIC_SIEVE_H
#define HARMONIC_SIEVE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HsvClass {
  HSV_CLASS_SURVIVOR = 0,
  HSV_CLASS_CROSSED = 1,
  HSV_CLASS_UNTOUCHED = 2,
} HsvClass;

typedef enum HsvSpawnRule {
  HSV_SPAWN_RULE_CASE_I = 1,
  HSV_SPAWN_RULE_CASE_II = 2,
} HsvSpawnRule;

// Result code of every fallible call.
typedef enum HsvStatus {
  HSV_STATUS_OK = 0,
  // Two constructions classify some number differently. Output is still written.
  HSV_STATUS_DIVERGENCE = 1,
  HSV_STATUS_CONFIG = 2,
  HSV_STATUS_CAPACITY = 3,
  // A weak Goldbach counterexample candidate. Output is still written where
  // the function produces a report.
  HSV_STATUS_COUNTEREXAMPLE = 4,
  HSV_STATUS_OUT_OF_RANGE = 5,
  HSV_STATUS_IO = 6,
  HSV_STATUS_CORRUPT = 7,
  HSV_STATUS_COMPLEXITY = 8,
  HSV_STATUS_NULL_POINTER = 9,
  HSV_STATUS_INVALID_UTF8 = 10,
  HSV_STATUS_PANIC = 11,
} HsvStatus;

typedef enum HsvVariant {
  HSV_VARIANT_FULL = 0,
  HSV_VARIANT_ODD_ONLY = 1,
} HsvVariant;

// Opaque classification table.
typedef struct HsvTable HsvTable;

typedef struct HsvTriple {
  uint64_t p1;
  uint64_t p2;
  uint64_t p3;
} HsvTriple;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or an empty string. The
// pointer stays valid until the next library call on the same thread.
const char *hsv_last_error_message(void);

// Sieves `[2, bound]` with the segmented classical sieve.
//
// # Safety
// `out` must be a valid pointer to writable storage for one table pointer.
enum HsvStatus hsv_classical_sieve(uint64_t bound, struct HsvTable **out);

// Spawns a harmonic construction over `[2, bound]` and materializes it.
//
// # Safety
// `out` must be a valid pointer to writable storage for one table pointer.
enum HsvStatus hsv_materialize(enum HsvVariant variant,
                               enum HsvSpawnRule rule,
                               uint64_t bound,
                               bool odd_primes_only,
                               struct HsvTable **out);

// Releases a table. Null is ignored.
//
// # Safety
// `table` must be null or a pointer obtained from this library that has not
// been freed yet.
void hsv_table_free(struct HsvTable *table);

// Upper bound of the table, or 0 for a null table.
//
// # Safety
// `table` must be null or a live table pointer.
uint64_t hsv_table_bound(const struct HsvTable *table);

// Number of primes `<= x`.
//
// # Safety
// `table` must be a live table pointer and `out` valid for one write.
enum HsvStatus hsv_table_prime_count(const struct HsvTable *table, uint64_t x, uint64_t *out);

// Classification of `n`.
//
// # Safety
// `table` must be a live table pointer and `out` valid for one write.
enum HsvStatus hsv_table_classify(const struct HsvTable *table, uint64_t n, enum HsvClass *out);

// Writes the table as an HSV1 cache file.
//
// # Safety
// `table` must be a live table pointer and `path` a NUL-terminated string.
enum HsvStatus hsv_write_cache(const struct HsvTable *table, const char *path);

// Loads an HSV1 cache file.
//
// # Safety
// `path` must be a NUL-terminated string and `out` valid for one write.
enum HsvStatus hsv_read_cache(const char *path, struct HsvTable **out);

// Whether the term anchored at `anchor` zero-crosses `n`.
//
// # Safety
// `out` must be valid for one write.
enum HsvStatus hsv_zero_cross(enum HsvVariant variant, uint64_t anchor, uint64_t n, bool *out);

// Lexicographically smallest odd-prime triple for odd `n > 7`.
// Returns `HSV_STATUS_COUNTEREXAMPLE` if none exists within the table.
//
// # Safety
// `table` must be a live table pointer and `out` valid for one write.
enum HsvStatus hsv_decompose_weak(const struct HsvTable *table, uint64_t n, struct HsvTriple *out);

// Compares the Case I and Case II constructions and returns the report as
// JSON. `HSV_STATUS_DIVERGENCE` still sets `out_json`.
//
// # Safety
// `out_json` must be valid for one write; free the string with
// `hsv_string_free`.
enum HsvStatus hsv_compare_json(enum HsvVariant variant,
                                uint64_t bound,
                                bool odd_primes_only,
                                char **out_json);

// Verifies the weak Goldbach property over `[lo, hi]` and returns the
// report as JSON. `checkpoint_path` may be null. A `checkpoint_every` or
// `workers` of 0 selects the default. `HSV_STATUS_COUNTEREXAMPLE` still sets
// `out_json`.
//
// # Safety
// `table` must be a live table pointer, `checkpoint_path` null or a
// NUL-terminated string, and `out_json` valid for one write.
enum HsvStatus hsv_verify_json(const struct HsvTable *table,
                               uint64_t lo,
                               uint64_t hi,
                               const char *checkpoint_path,
                               uint64_t checkpoint_every,
                               uint32_t workers,
                               char **out_json);

// Renders a predefined figure (for example `"full23"` or `"odd_all"`) as SVG.
//
// # Safety
// `figure_id` must be a NUL-terminated string and `out_svg` valid for one
// write; free the string with `hsv_string_free`.
enum HsvStatus hsv_render_figure(const char *figure_id, char **out_svg);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string obtained from this library that has not been
// freed yet.
void hsv_string_free(char *s);

// Library version as a static NUL-terminated string.
const char *hsv_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HARMONIC_SIEVE_H */
