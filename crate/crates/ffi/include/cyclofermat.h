#ifndef CYCLOFERMAT_H
#define CYCLOFERMAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CfStatus {
  CF_STATUS_OK = 0,
  CF_STATUS_NULL_POINTER = 1,
  CF_STATUS_INVALID_UTF8 = 2,
  CF_STATUS_DOMAIN = 3,
  CF_STATUS_PRECONDITION = 4,
  CF_STATUS_PARSE = 5,
  CF_STATUS_MISSING_INPUT = 6,
  CF_STATUS_WRONG_THEOREM = 7,
  CF_STATUS_REDUCIBLE = 8,
  CF_STATUS_DEGREE_CAP = 9,
  CF_STATUS_IO = 10,
  CF_STATUS_INTERNAL = 11,
  CF_STATUS_PANIC = 12,
} CfStatus;

typedef enum CfClassification {
  CF_CLASSIFICATION_INERT = 0,
  CF_CLASSIFICATION_TOTALLY_RAMIFIED = 1,
  CF_CLASSIFICATION_OTHER = 2,
} CfClassification;

/**
 * Opaque number field handle.
 */
typedef struct CfField CfField;

/**
 * Summary of `split_prime`. `ramified_root` is meaningful only when
 * `has_ramified_root` is set.
 */
typedef struct CfSplit {
  enum CfClassification classification;
  bool index_caveat;
  bool has_ramified_root;
  uint64_t ramified_root;
} CfSplit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message on this thread; empty after a successful call. The
 * pointer stays valid until the next call into the library on this thread.
 */
const char *cf_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cf_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void cf_string_free(char *s);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum CfStatus cf_is_prime(uint64_t n, bool *out);

/**
 * Tests `base^(l-1) = 1 mod l^2` for an odd prime `l < 2^32`.
 *
 * # Safety
 * `is_pair` and `residue` must be valid for writes.
 */
enum CfStatus cf_wieferich_test(uint64_t base, uint64_t l, bool *is_pair, uint64_t *residue);

/**
 * JSON array of the Wieferich primes for `base` in `[min, max]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CfStatus cf_wieferich_scan_json(uint64_t base, uint64_t min, uint64_t max, char **out);

/**
 * Field `Q[x]/(f)` from `len` integer coefficients, constant term first.
 *
 * # Safety
 * `coeffs` must point to `len` values; `out` must be valid for writes.
 */
enum CfStatus cf_field_new(const int64_t *coeffs, size_t len, struct CfField **out);

/**
 * Field from field-spec text (`coeffs = ...`, `#` comments), or `Q`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum CfStatus cf_field_from_spec(const char *text, struct CfField **out);

/**
 * # Safety
 * `f` must come from this library and not have been freed. Null is ignored.
 */
void cf_field_free(struct CfField *f);

/**
 * # Safety
 * `f` must be a live handle; `out` must be valid for writes.
 */
enum CfStatus cf_field_degree(const struct CfField *f, size_t *out);

/**
 * Defining polynomial as a JSON array of decimal strings.
 *
 * # Safety
 * `f` must be a live handle; `out` must be valid for writes.
 */
enum CfStatus cf_field_poly_json(const struct CfField *f, char **out);

/**
 * # Safety
 * `f` must be a live handle; `out` must be valid for writes.
 */
enum CfStatus cf_split_prime(const struct CfField *f, uint64_t p, struct CfSplit *out);

/**
 * Full splitting report as JSON.
 *
 * # Safety
 * `f` must be a live handle; `out` must be valid for writes.
 */
enum CfStatus cf_split_prime_json(const struct CfField *f, uint64_t p, char **out);

/**
 * Layer report of `Q_{n,l}` as JSON; `cap` bounds the degree `l^n`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CfStatus cf_layer_json(uint64_t l, uint32_t n, size_t cap, char **out);

/**
 * Handle on the field `Q_{n,l}`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum CfStatus cf_layer_field(uint64_t l, uint32_t n, size_t cap, struct CfField **out);

/**
 * S-unit equation report (JSON) over the box `[-height, height]^m`.
 *
 * # Safety
 * `f` must be a live handle; `s` must point to `s_len` primes (or be null
 * with `s_len = 0`); `out` must be valid for writes.
 */
enum CfStatus cf_sunit_json(const struct CfField *f,
                            const uint64_t *s,
                            size_t s_len,
                            uint32_t height,
                            char **out);

/**
 * Evaluates a checklist described by a JSON request and returns the
 * certificate JSON. Request keys: `theorem` (`aflt-layers`, `gfe-layers`,
 * `gfe-K-2d`, `gfe-Q-2d`, `prop-bound`), optional `field` (`"Q"` or an
 * integer array), `l`, `n`, `d`, `A`, `B`, `C` (`"u,r,s"`), `h_plus`
 * (`"odd:<source>"` or `"even:<source>"`).
 *
 * # Safety
 * `request` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum CfStatus cf_verify_json(const char *request, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CYCLOFERMAT_H */
