#ifndef RADLITE_H
#define RADLITE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RadliteStatus {
  RADLITE_STATUS_OK = 0,
  RADLITE_STATUS_NULL_POINTER = 1,
  RADLITE_STATUS_INVALID_UTF8 = 2,
  RADLITE_STATUS_INVALID_ARGUMENT = 3,
  RADLITE_STATUS_NO_DISCORDANT_PAIRS = 4,
  RADLITE_STATUS_INSUFFICIENT_DATA = 5,
  RADLITE_STATUS_UNPARSEABLE = 6,
  RADLITE_STATUS_PANIC = 7,
} RadliteStatus;

typedef enum RadliteErrorDirection {
  RADLITE_ERROR_DIRECTION_EXACT = 0,
  RADLITE_ERROR_DIRECTION_UNDERCALL = 1,
  RADLITE_ERROR_DIRECTION_OVERCALL = 2,
  RADLITE_ERROR_DIRECTION_SAFE_MISCLASSIFY = 3,
  RADLITE_ERROR_DIRECTION_CROSS_SYSTEM_UNDEFINED = 4,
} RadliteErrorDirection;

typedef enum RadliteTestMethod {
  RADLITE_TEST_METHOD_MCNEMAR_EXACT = 0,
  RADLITE_TEST_METHOD_MCNEMAR_CHI2 = 1,
  RADLITE_TEST_METHOD_WILCOXON_NORMAL = 2,
} RadliteTestMethod;

/**
 * A RADS grammar bound to one category inventory.
 */
typedef struct RadliteInventory RadliteInventory;

/**
 * Running counts of error directions.
 */
typedef struct RadliteSeverityTally RadliteSeverityTally;

typedef struct RadliteRouge {
  double precision;
  double recall;
  double f1;
} RadliteRouge;

typedef struct RadliteTestResult {
  double statistic;
  double p_value;
  size_t n_effective;
  enum RadliteTestMethod method;
} RadliteTestResult;

typedef struct RadliteSeverityCounts {
  size_t exact;
  size_t undercall;
  size_t overcall;
  size_t safe_misclassify;
  size_t cross_system_undefined;
} RadliteSeverityCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty after a success.
 * Valid until the next call into the library from the same thread.
 */
const char *radlite_last_error_message(void);

const char *radlite_version(void);

/**
 * # Safety
 * `s` must be null or a pointer returned by this library that has not been freed.
 */
void radlite_string_free(char *s);

/**
 * Canonical form ("BI-RADS 4A") of the first category mentioned in `text`
 * under the shipped inventory; `RADLITE_STATUS_UNPARSEABLE` if none.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum RadliteStatus radlite_rads_canonical(const char *text, char **out);

/**
 * Direction of `prediction` relative to the ground-truth category `truth`.
 *
 * # Safety
 * Both strings must be NUL-terminated; `out` must be writable.
 */
enum RadliteStatus radlite_rads_classify(const char *prediction,
                                         const char *truth,
                                         enum RadliteErrorDirection *out);

/**
 * Builds a grammar from an inventory TOML document.
 *
 * # Safety
 * `toml` must be NUL-terminated; `out` must be writable.
 */
enum RadliteStatus radlite_inventory_from_toml(const char *toml, struct RadliteInventory **out);

/**
 * A new handle on the inventory shipped with the library.
 */
struct RadliteInventory *radlite_inventory_shipped(void);

/**
 * Number of categories in the inventory, or 0 for a null handle.
 *
 * # Safety
 * `inventory` must be null or a live handle.
 */
size_t radlite_inventory_len(const struct RadliteInventory *inventory);

/**
 * Like [`radlite_rads_canonical`] but against `inventory`.
 *
 * # Safety
 * `inventory` must be a live handle; `text` NUL-terminated; `out` writable.
 */
enum RadliteStatus radlite_inventory_canonical(const struct RadliteInventory *inventory,
                                               const char *text,
                                               char **out);

/**
 * # Safety
 * `inventory` must be null or a handle not yet freed.
 */
void radlite_inventory_free(struct RadliteInventory *inventory);

/**
 * Removes reasoning spans and trims.
 *
 * # Safety
 * `text` must be NUL-terminated; `out` writable.
 */
enum RadliteStatus radlite_strip_think(const char *text, char **out);

/**
 * ROUGE-L precision, recall and F1 of `prediction` against `reference`.
 *
 * # Safety
 * Both strings NUL-terminated; `out` writable.
 */
enum RadliteStatus radlite_rouge_l(const char *prediction,
                                   const char *reference,
                                   struct RadliteRouge *out);

/**
 * McNemar's test on per-sample correctness of two models over `len` samples.
 *
 * # Safety
 * `a` and `b` must each point to `len` readable bools; `out` writable.
 */
enum RadliteStatus radlite_mcnemar(const bool *a,
                                   const bool *b,
                                   size_t len,
                                   struct RadliteTestResult *out);

/**
 * Wilcoxon signed-rank test on paired scores.
 *
 * # Safety
 * `a` and `b` must each point to `len` readable doubles; `out` writable.
 */
enum RadliteStatus radlite_wilcoxon(const double *a,
                                    const double *b,
                                    size_t len,
                                    struct RadliteTestResult *out);

struct RadliteSeverityTally *radlite_severity_tally_new(void);

/**
 * Classifies one (prediction, truth) pair and counts it. An unparseable
 * truth leaves the tally unchanged.
 *
 * # Safety
 * `tally` must be a live handle; strings NUL-terminated.
 */
enum RadliteStatus radlite_severity_tally_add(struct RadliteSeverityTally *tally,
                                              const char *prediction,
                                              const char *truth);

/**
 * # Safety
 * `tally` must be a live handle; `out` writable.
 */
enum RadliteStatus radlite_severity_tally_counts(const struct RadliteSeverityTally *tally,
                                                 struct RadliteSeverityCounts *out);

/**
 * # Safety
 * `tally` must be null or a handle not yet freed.
 */
void radlite_severity_tally_free(struct RadliteSeverityTally *tally);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RADLITE_H */
