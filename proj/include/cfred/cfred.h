/* SPDX-License-Identifier: Apache-2.0
 * Copyright 2026 The cfred Authors
 *
 * C interface of libcfred. Every function returning cfred_status leaves a
 * thread-local message retrievable with cfred_last_error() on failure.
 * Objects are opaque and owned by the caller once returned.
 */

#ifndef CFRED_CFRED_H_
#define CFRED_CFRED_H_

#include <stddef.h>
#include <stdint.h>

#if defined(CFRED_BUILDING_LIBRARY)
#define CFRED_API __attribute__((visibility("default")))
#else
#define CFRED_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cfred_status {
  CFRED_OK = 0,
  CFRED_ERR_USAGE = 1,
  CFRED_ERR_DATA = 2,
  CFRED_ERR_NUMERICAL = 3,
  CFRED_ERR_INTERNAL = 4
} cfred_status;

typedef enum cfred_format {
  CFRED_FORMAT_CSV = 0,
  CFRED_FORMAT_JSON = 1,
  CFRED_FORMAT_MARKDOWN = 2
} cfred_format;

typedef enum cfred_divisor {
  CFRED_DIVISOR_ML = 0,       /* divide by n */
  CFRED_DIVISOR_UNBIASED = 1  /* divide by n - 1 */
} cfred_divisor;

typedef struct cfred_matrix cfred_matrix;
typedef struct cfred_manifest cfred_manifest;
typedef struct cfred_report cfred_report;

typedef struct cfred_options {
  size_t threads;
  cfred_divisor divisor;
  int expectation_form; /* nonzero: add the per-group column when prompts are grouped */
  int has_seed;
  uint64_t seed;
} cfred_options;

CFRED_API void cfred_options_init(cfred_options* options);

CFRED_API const char* cfred_version(void);
CFRED_API unsigned cfred_emb_format_version(void);
/* Message of the last failed call on this thread; empty after success. */
CFRED_API const char* cfred_last_error(void);

/* Matrices: row-major float32, rows x cols. */
CFRED_API cfred_status cfred_matrix_create(size_t rows, size_t cols, const float* data,
                                           cfred_matrix** out);
CFRED_API cfred_status cfred_matrix_read(const char* path, cfred_matrix** out);
CFRED_API cfred_status cfred_matrix_write(const cfred_matrix* m, const char* path);
CFRED_API size_t cfred_matrix_rows(const cfred_matrix* m);
CFRED_API size_t cfred_matrix_cols(const cfred_matrix* m);
CFRED_API const float* cfred_matrix_data(const cfred_matrix* m);
CFRED_API void cfred_matrix_destroy(cfred_matrix* m);

/* Metrics. */
CFRED_API cfred_status cfred_frechet_distance(const cfred_matrix* a, const cfred_matrix* b,
                                              cfred_divisor divisor, double* out);
CFRED_API cfred_status cfred_conditional_frechet_distance(const cfred_matrix* condition,
                                                          const cfred_matrix* real,
                                                          const cfred_matrix* generated,
                                                          cfred_divisor divisor, double* out);
CFRED_API cfred_status cfred_cmmd(const cfred_matrix* real, const cfred_matrix* generated,
                                  double sigma, double scale, double* out);
CFRED_API cfred_status cfred_clipscore(const cfred_matrix* text, const cfred_matrix* image,
                                       double* out);

/* Manifests and benchmark runs. */
CFRED_API cfred_status cfred_manifest_load(const char* path, cfred_manifest** out);
CFRED_API void cfred_manifest_destroy(cfred_manifest* manifest);
CFRED_API cfred_status cfred_benchmark_scores(const cfred_manifest* manifest,
                                              const cfred_options* options,
                                              cfred_report** out);
CFRED_API cfred_status cfred_benchmark_rank(const cfred_manifest* manifest,
                                            const cfred_options* options, cfred_report** out);

/* Column-level analyses over JSON documents (see the CLI reference). */
CFRED_API cfred_status cfred_rank_columns(const char* columns_json, cfred_report** out);
CFRED_API cfred_status cfred_correlate(const char* columns_json, const char* metric,
                                       const char* against, cfred_report** out);
CFRED_API cfred_status cfred_winrate(const char* candidates_json, cfred_report** out);
CFRED_API cfred_status cfred_combo(const char* columns_json, const char* metric_a,
                                   const char* metric_b, cfred_report** out);
CFRED_API cfred_status cfred_ablate(const char* grid_json, const char* attributes_json,
                                    const char* axis, cfred_report** out);
CFRED_API cfred_status cfred_synth(const char* spec_json, const cfred_options* options,
                                   const char* out_dir, cfred_report** out);

/* Rendering. The returned buffer is NUL-terminated; free with cfred_string_free. */
CFRED_API cfred_status cfred_report_render(const cfred_report* report, cfred_format format,
                                           char** out, size_t* length);
CFRED_API void cfred_string_free(char* s);
CFRED_API void cfred_report_destroy(cfred_report* report);

#ifdef __cplusplus
}
#endif

#endif /* CFRED_CFRED_H_ */
