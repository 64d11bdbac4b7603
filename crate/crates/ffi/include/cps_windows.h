#ifndef CPS_WINDOWS_H
#define CPS_WINDOWS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Zero is success.
typedef enum CpswStatus {
  CPSW_STATUS_OK = 0,
  CPSW_STATUS_NULL_POINTER = 1,
  CPSW_STATUS_INVALID_ARGUMENT = 2,
  CPSW_STATUS_PARSE = 3,
  CPSW_STATUS_RATIONAL_ROTATION = 4,
  CPSW_STATUS_DEPTH_OVERFLOW = 5,
  CPSW_STATUS_SEARCH_EXHAUSTED = 6,
  CPSW_STATUS_EMPTY_WINDOW = 7,
  CPSW_STATUS_GERM_UNDECIDABLE = 8,
  CPSW_STATUS_IO = 9,
  CPSW_STATUS_PANIC = 10,
} CpswStatus;

typedef enum CpswWindowKind {
  // Cantor body plus even-level gaps.
  CPSW_WINDOW_KIND_W = 0,
  // Full circle minus one chosen gap per level.
  CPSW_WINDOW_KIND_V = 1,
  // Gaps filled by a seeded random bit string.
  CPSW_WINDOW_KIND_RANDOM = 2,
} CpswWindowKind;

// Opaque window handle.
typedef struct CpswWindow CpswWindow;

// ω = (p + q√D)/r.
typedef struct CpswRotation {
  int64_t d;
  int64_t p;
  int64_t q;
  int64_t r;
} CpswRotation;

// num/den.
typedef struct CpswRational {
  int64_t num;
  int64_t den;
} CpswRational;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string; do not free.
const char *cpsw_version(void);

// Message of the last failed call on this thread, or NULL. Free with
// [`cpsw_string_free`].
char *cpsw_last_error(void);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void cpsw_string_free(char *s);

// Builds window_W, window_V or a random filling over the depth-`depth`
// Cantor approximation with parameter `eps`. `seed` is used by `Random`
// only; `exact` keeps raw endpoints instead of orbit-separated ones.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum CpswStatus cpsw_window_build(enum CpswWindowKind kind,
                                  struct CpswRotation omega,
                                  struct CpswRational eps,
                                  uint32_t depth,
                                  uint64_t seed,
                                  bool exact,
                                  struct CpswWindow **out);

// The closed arc [lo, hi] on the circle.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum CpswStatus cpsw_window_interval(struct CpswRotation omega,
                                     struct CpswRational lo,
                                     struct CpswRational hi,
                                     struct CpswWindow **out);

// Parses a window from its JSON form.
//
// # Safety
// `json` must be a NUL-terminated UTF-8 string; `out` must be valid for one
// handle write.
enum CpswStatus cpsw_window_from_json(const char *json, struct CpswWindow **out);

// Serializes a window; free the string with [`cpsw_string_free`].
//
// # Safety
// `w` must be a live handle and `out` valid for one pointer write.
enum CpswStatus cpsw_window_to_json(const struct CpswWindow *w, char **out);

// # Safety
// `w` must be NULL or a handle from this library that has not been freed.
void cpsw_window_free(struct CpswWindow *w);

// Haar measure of the window, rounded to double.
//
// # Safety
// `w` must be a live handle and `out` valid for one write.
enum CpswStatus cpsw_window_measure(const struct CpswWindow *w, double *out);

// Number of boundary points of the window.
//
// # Safety
// `w` must be a live handle and `out` valid for one write.
enum CpswStatus cpsw_window_boundary_count(const struct CpswWindow *w, size_t *out);

// Writes p(1), …, p(nmax) of the coding k ↦ [{kω} ∈ W + t] into `out`.
//
// # Safety
// `w` must be a live handle and `out` must have room for `nmax` values.
enum CpswStatus cpsw_complexity(const struct CpswWindow *w, size_t nmax, uint64_t *out);

// Writes the bits [{kω} ∈ W + t] for k0 ≤ k ≤ k1 into `out`, one byte each.
//
// # Safety
// `w` must be a live handle and `out` must have room for `k1 − k0 + 1` bytes.
enum CpswStatus cpsw_coding_word(const struct CpswWindow *w,
                                 struct CpswRational t,
                                 int64_t k0,
                                 int64_t k1,
                                 uint8_t *out);

// Checks an independence certificate exhaustively; `ok` receives the
// verdict, and a malformed certificate is reported as an error.
//
// # Safety
// `json` must be a NUL-terminated UTF-8 string and `ok` valid for one write.
enum CpswStatus cpsw_verify_certificate(const char *json, bool *ok);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CPS_WINDOWS_H */
