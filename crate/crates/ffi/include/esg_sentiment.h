#ifndef ESG_SENTIMENT_H
#define ESG_SENTIMENT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EsgAffinity {
  ESG_AFFINITY_AVERSE = -1,
  ESG_AFFINITY_NEUTRAL = 0,
  ESG_AFFINITY_AFFINE = 1,
} EsgAffinity;

/**
 * Label values equal their composite weight.
 */
typedef enum EsgLabel {
  ESG_LABEL_NEGATIVE = -1,
  ESG_LABEL_NEUTRAL = 0,
  ESG_LABEL_POSITIVE = 1,
} EsgLabel;

typedef enum EsgStatus {
  ESG_STATUS_OK = 0,
  ESG_STATUS_NULL_ARGUMENT = 1,
  ESG_STATUS_INVALID_UTF8 = 2,
  ESG_STATUS_SCHEMA = 3,
  ESG_STATUS_TRANSPORT = 4,
  ESG_STATUS_INVARIANT = 5,
  ESG_STATUS_INSUFFICIENT_DATA = 6,
  ESG_STATUS_DEGENERATE_SERIES = 7,
  ESG_STATUS_CONFIG = 8,
  ESG_STATUS_IO = 9,
  ESG_STATUS_PANIC = 10,
} EsgStatus;

typedef struct EsgLexicon EsgLexicon;

typedef struct EsgPriceSeries EsgPriceSeries;

typedef struct EsgRunConfig EsgRunConfig;

typedef struct EsgVerdict {
  enum EsgLabel label;
  double score;
} EsgVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *esg_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *esg_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void esg_string_free(char *s);

/**
 * Composite weight of a label: +1, 0 or -1.
 */
int32_t esg_label_weight(enum EsgLabel label);

/**
 * `weight(label) * score`; fails with `Schema` when score is outside [0, 1].
 *
 * # Safety
 * `out` must be a valid pointer to a double.
 */
enum EsgStatus esg_composite(struct EsgVerdict verdict, double *out);

/**
 * The bundled financial lexicon.
 *
 * # Safety
 * `out` must be a valid pointer; the handle is released with `esg_lexicon_free`.
 */
enum EsgStatus esg_lexicon_default(struct EsgLexicon **out);

/**
 * Loads positive.txt, negative.txt and negators.txt from `dir`.
 *
 * # Safety
 * `dir` must be a nul-terminated string and `out` a valid pointer.
 */
enum EsgStatus esg_lexicon_load_dir(const char *dir, struct EsgLexicon **out);

/**
 * # Safety
 * `lexicon` must be null or a handle from this library, freed once.
 */
void esg_lexicon_free(struct EsgLexicon *lexicon);

/**
 * Scores one document text against the lexicon.
 *
 * # Safety
 * Pointers must be valid; `text` nul-terminated.
 */
enum EsgStatus esg_score_text(const struct EsgLexicon *lexicon,
                              const char *text,
                              struct EsgVerdict *out);

/**
 * Search query for a ticker key, e.g. "ESG Investing Goldman Sachs" for GS.
 *
 * # Safety
 * `key` must be nul-terminated and `out` valid; free the result with
 * `esg_string_free`.
 */
enum EsgStatus esg_build_query(const char *key, char **out);

/**
 * Classifies a mean composite against the affine and averse thresholds.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum EsgStatus esg_classify(double mean,
                            double affine_min,
                            double averse_max,
                            enum EsgAffinity *out);

/**
 * Population Pearson correlation of two arrays of length `len` (at least 3).
 *
 * # Safety
 * `x` and `y` must point to `len` doubles each; `out` must be valid.
 */
enum EsgStatus esg_pearson(const double *x, const double *y, size_t len, double *out);

/**
 * Parses a Yahoo-style daily price CSV.
 *
 * # Safety
 * `ticker` and `csv` must be nul-terminated; `out` valid. Release the
 * series with `esg_prices_free`.
 */
enum EsgStatus esg_prices_parse_csv(const char *ticker,
                                    const char *csv,
                                    struct EsgPriceSeries **out);

/**
 * # Safety
 * `series` must be null or a handle from this library, freed once.
 */
void esg_prices_free(struct EsgPriceSeries *series);

/**
 * Number of bars, or 0 for a null handle.
 *
 * # Safety
 * `series` must be null or a valid handle.
 */
size_t esg_prices_len(const struct EsgPriceSeries *series);

/**
 * New series holding the last `n` bars.
 *
 * # Safety
 * `series` must be a valid handle and `out` a valid pointer.
 */
enum EsgStatus esg_prices_tail(const struct EsgPriceSeries *series,
                               size_t n,
                               struct EsgPriceSeries **out);

/**
 * Opening-price change over the series in percent.
 *
 * # Safety
 * `series` must be a valid handle and `out` a valid pointer.
 */
enum EsgStatus esg_prices_percent_change_open(const struct EsgPriceSeries *series, double *out);

/**
 * The series as CSV text.
 *
 * # Safety
 * `series` must be a valid handle; free the result with `esg_string_free`.
 */
enum EsgStatus esg_prices_to_csv(const struct EsgPriceSeries *series, char **out);

/**
 * Loads a JSON run configuration. Relative paths in the file resolve
 * against its directory.
 *
 * # Safety
 * `path` must be nul-terminated and `out` valid. Release with
 * `esg_config_free`.
 */
enum EsgStatus esg_config_load(const char *path, struct EsgRunConfig **out);

/**
 * Replaces the output directory.
 *
 * # Safety
 * `config` must be a valid handle and `dir` nul-terminated.
 */
enum EsgStatus esg_config_set_out(struct EsgRunConfig *config, const char *dir);

/**
 * # Safety
 * `config` must be null or a handle from this library, freed once.
 */
void esg_config_free(struct EsgRunConfig *config);

/**
 * Runs every pipeline stage. When `summary_csv` is not null it receives
 * the summary CSV text, to be freed with `esg_string_free`.
 *
 * # Safety
 * `config` must be a valid handle; `summary_csv` null or valid.
 */
enum EsgStatus esg_run(const struct EsgRunConfig *config, char **summary_csv);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ESG_SENTIMENT_H */
