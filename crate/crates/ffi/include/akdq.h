#ifndef AKDQ_H
#define AKDQ_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AkdqStatus {
  AKDQ_STATUS_OK = 0,
  /**
   * The query ran and some identity check failed, or the chart is not
   * almost-Kähler.
   */
  AKDQ_STATUS_CHECK_FAILED = 1,
  /**
   * Malformed JSON, expressions, shapes or jet orders.
   */
  AKDQ_STATUS_INPUT_ERROR = 2,
  /**
   * An internal consistency check tripped.
   */
  AKDQ_STATUS_INTERNAL = 3,
  AKDQ_STATUS_NULL_POINTER = 4,
  AKDQ_STATUS_PANIC = 5,
} AkdqStatus;

/**
 * A parsed chart description.
 */
typedef struct AkdqChart AkdqChart;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a chart from its JSON description.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AkdqStatus akdq_chart_from_json(const char *json, struct AkdqChart **out);

/**
 * Load one of the bundled charts: `flat2d`, `flat_c2`, `kahler2d` or
 * `nonintegrable4d`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AkdqStatus akdq_chart_bundled(const char *name, struct AkdqChart **out);

/**
 * # Safety
 * `chart` must come from this library and not have been freed; null is ignored.
 */
void akdq_chart_free(struct AkdqChart *chart);

/**
 * # Safety
 * `chart` must be a live handle and `out` a valid pointer.
 */
enum AkdqStatus akdq_chart_dimension(const struct AkdqChart *chart, uint32_t *out);

/**
 * Validate the chart and verify its derived tensors. `jet_order` 0 keeps the
 * chart's own order.
 *
 * # Safety
 * `chart` must be a live handle and `report` a valid pointer.
 */
enum AkdqStatus akdq_check(const struct AkdqChart *chart, uint32_t jet_order, char **report);

/**
 * Christoffel symbols, torsion, Nijenhuis tensor, curvature, γ and μ.
 *
 * # Safety
 * `chart` must be a live handle and `report` a valid pointer.
 */
enum AkdqStatus akdq_connection(const struct AkdqChart *chart, uint32_t jet_order, char **report);

/**
 * `C_r(f, g)` at the base point for `r <= order`; `f` and `g` are polynomial
 * expressions in `x1..xn`.
 *
 * # Safety
 * `chart` must be a live handle, `f` and `g` NUL-terminated strings and
 * `report` a valid pointer.
 */
enum AkdqStatus akdq_star(const struct AkdqChart *chart,
                          const char *f,
                          const char *g,
                          uint32_t order,
                          bool normalized,
                          uint32_t jet_order,
                          char **report);

/**
 * κ by every route and the class witness.
 *
 * # Safety
 * `chart` must be a live handle and `report` a valid pointer.
 */
enum AkdqStatus akdq_class(const struct AkdqChart *chart, uint32_t jet_order, char **report);

/**
 * Message for the last non-OK status on this thread, or null. Valid until
 * the next call into the library from the same thread.
 */
const char *akdq_last_error(void);

/**
 * # Safety
 * `s` must be a string returned by this library, or null.
 */
void akdq_string_free(char *s);

const char *akdq_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AKDQ_H */
