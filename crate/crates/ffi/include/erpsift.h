#ifndef ERPSIFT_H
#define ERPSIFT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ErpsiftStatus {
  ERPSIFT_STATUS_OK = 0,
  ERPSIFT_STATUS_NULL_POINTER = 1,
  ERPSIFT_STATUS_INVALID_ARGUMENT = 2,
  ERPSIFT_STATUS_LENGTH = 3,
  ERPSIFT_STATUS_EMPTY_INPUT = 4,
  ERPSIFT_STATUS_SHAPE = 5,
  ERPSIFT_STATUS_INSUFFICIENT_STRUCTURE = 6,
  ERPSIFT_STATUS_UNDEFINED_INPUT = 7,
  ERPSIFT_STATUS_CONFIG = 8,
  ERPSIFT_STATUS_CONVERGENCE = 9,
  ERPSIFT_STATUS_IO = 10,
  ERPSIFT_STATUS_PARSE = 11,
  ERPSIFT_STATUS_PANIC = 12,
} ErpsiftStatus;

/**
 * Values accepted by the `boundary` arguments.
 */
typedef enum ErpsiftBoundary {
  ERPSIFT_BOUNDARY_PERIODIC = 0,
  ERPSIFT_BOUNDARY_SYMMETRIC = 1,
} ErpsiftBoundary;

/**
 * Values accepted by the `kernel` arguments.
 */
typedef enum ErpsiftKernel {
  ERPSIFT_KERNEL_LINEAR = 0,
  ERPSIFT_KERNEL_GAUSSIAN = 1,
} ErpsiftKernel;

/**
 * Labelled subjects × features table.
 */
typedef struct ErpsiftDataset ErpsiftDataset;

/**
 * Classifier together with the column count and imputation means it was fitted with.
 */
typedef struct ErpsiftModel ErpsiftModel;

typedef struct ErpsiftRegistry ErpsiftRegistry;

/**
 * Cross-validation settings; start from [`erpsift_cv_settings_default`].
 */
typedef struct ErpsiftCvSettings {
  /**
   * Stratified fold count; 0 selects leave-one-subject-out.
   */
  uint32_t folds;
  uint32_t repeats;
  /**
   * ReliefF subset size; 0 keeps every feature.
   */
  size_t top_k;
  size_t neighbors;
  /**
   * An [`ErpsiftKernel`] value.
   */
  int32_t kernel;
  /**
   * Gaussian width; values <= 0 use 1 / feature count.
   */
  double gamma;
  double c;
  uint64_t seed;
  /**
   * Select on all rows before splitting instead of inside each fold.
   */
  bool leaky;
} ErpsiftCvSettings;

/**
 * Row-normalised confusion percentages, row = true class, column = predicted.
 */
typedef struct ErpsiftConfusion {
  double mean[2][2];
  double sd[2][2];
  uint32_t n_repeats;
} ErpsiftConfusion;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *erpsift_version(void);

/**
 * Copies the calling thread's last error message into `buf`, truncated to
 * `len - 1` bytes and NUL-terminated. Returns the full message length, so a
 * return value >= `len` means the copy was truncated.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t erpsift_last_error_message(char *buf, size_t len);

/**
 * Splits `signal` into low-pass (level-`levels` db4 approximation) and
 * high-pass (`signal - lp`) parts, each `len` samples.
 *
 * # Safety
 * `signal`, `lp_out` and `hp_out` must each hold `len` doubles.
 */
enum ErpsiftStatus erpsift_wavelet_split(const double *signal,
                                         size_t len,
                                         size_t levels,
                                         int32_t boundary_mode,
                                         double *lp_out,
                                         double *hp_out);

/**
 * The built-in 27-feature registry.
 */
struct ErpsiftRegistry *erpsift_registry_default(void);

/**
 * Loads a registry TOML file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a writable pointer.
 */
enum ErpsiftStatus erpsift_registry_load(const char *path, struct ErpsiftRegistry **out);

/**
 * Number of features computed per channel; 0 for a null handle.
 *
 * # Safety
 * `registry` must be null or a live registry handle.
 */
size_t erpsift_registry_len(const struct ErpsiftRegistry *registry);

/**
 * # Safety
 * `registry` must be null or a handle not yet freed.
 */
void erpsift_registry_free(struct ErpsiftRegistry *registry);

/**
 * Feature vector of one averaged ERP. `values` is `n_channels` rows of
 * `pre_samples + post_samples` samples; the output is channel-major with
 * `erpsift_registry_len` entries per channel. Features that are undefined
 * for the input are written as NaN.
 *
 * # Safety
 * `values` must hold `n_channels * (pre_samples + post_samples)` doubles and
 * `out` must hold `out_len` doubles.
 */
enum ErpsiftStatus erpsift_extract_features(const struct ErpsiftRegistry *registry,
                                            const double *values,
                                            size_t n_channels,
                                            double rate_hz,
                                            size_t pre_samples,
                                            size_t post_samples,
                                            size_t levels,
                                            int32_t boundary_mode,
                                            double *out,
                                            size_t out_len);

/**
 * Copies an `n_rows × n_cols` matrix and its 0/1 labels into a dataset.
 *
 * # Safety
 * `values` must hold `n_rows * n_cols` doubles, `labels` `n_rows` bytes,
 * and `out` must be writable.
 */
enum ErpsiftStatus erpsift_dataset_new(const double *values,
                                       size_t n_rows,
                                       size_t n_cols,
                                       const uint8_t *labels,
                                       struct ErpsiftDataset **out);

/**
 * # Safety
 * `dataset` must be null or a handle not yet freed.
 */
void erpsift_dataset_free(struct ErpsiftDataset *dataset);

/**
 * ReliefF weight of every column, after mean imputation over all rows.
 *
 * # Safety
 * `dataset` must be a live handle and `weights_out` must hold `len` doubles.
 */
enum ErpsiftStatus erpsift_relieff(const struct ErpsiftDataset *dataset,
                                   size_t neighbors,
                                   double *weights_out,
                                   size_t len);

/**
 * Five-fold, 20-repeat, in-fold ReliefF top 10 with K = 10 and a linear
 * kernel at C = 1.
 */
struct ErpsiftCvSettings erpsift_cv_settings_default(void);

/**
 * Repeated cross-validation of `dataset`.
 *
 * # Safety
 * `dataset` must be a live handle; `settings` and `out` must be valid pointers.
 */
enum ErpsiftStatus erpsift_cross_validate(const struct ErpsiftDataset *dataset,
                                          const struct ErpsiftCvSettings *settings,
                                          struct ErpsiftConfusion *out);

/**
 * Fits a classifier on every row: mean imputation, ReliefF top `top_k`
 * (0 keeps every column), then the SVM.
 *
 * # Safety
 * `dataset` must be a live handle and `out` writable.
 */
enum ErpsiftStatus erpsift_model_train(const struct ErpsiftDataset *dataset,
                                       size_t top_k,
                                       size_t neighbors,
                                       int32_t kernel_kind,
                                       double gamma,
                                       double c,
                                       uint64_t seed,
                                       struct ErpsiftModel **out);

/**
 * Classifies one full-width row; NaN entries take the training means.
 *
 * # Safety
 * `model` must be a live handle, `row` must hold `len` doubles, and
 * `label_out` / `decision_out` must each be null or writable.
 */
enum ErpsiftStatus erpsift_model_predict(const struct ErpsiftModel *model,
                                         const double *row,
                                         size_t len,
                                         uint32_t *label_out,
                                         double *decision_out);

/**
 * Number of columns the model uses; 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t erpsift_model_n_selected(const struct ErpsiftModel *model);

/**
 * Copies the selected column indices, best first.
 *
 * # Safety
 * `model` must be a live handle and `out` must hold `len` values.
 */
enum ErpsiftStatus erpsift_model_selected(const struct ErpsiftModel *model,
                                          size_t *out,
                                          size_t len);

/**
 * # Safety
 * `model` must be null or a handle not yet freed.
 */
void erpsift_model_free(struct ErpsiftModel *model);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ERPSIFT_H */
