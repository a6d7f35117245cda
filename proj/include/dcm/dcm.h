/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the distributed covariance library.
 *
 * Every object is an opaque handle released with its *_free function. Every
 * fallible call returns a dcm_status; on failure, dcm_last_error() describes
 * the most recent error on the calling thread. Strings returned through
 * char** out-parameters are owned by the caller and released with
 * dcm_string_free.
 */
#ifndef DCM_DCM_H
#define DCM_DCM_H

#include <stddef.h>
#include <stdint.h>

#if defined(DCM_BUILDING_LIBRARY)
#define DCM_API __attribute__((visibility("default")))
#else
#define DCM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dcm_status {
  DCM_OK = 0,
  DCM_E_INVALID_ARGUMENT = 1,
  DCM_E_DIMENSION_MISMATCH = 2,
  DCM_E_NON_FINITE_VALUE = 3,
  DCM_E_DUPLICATE_LABEL = 4,
  DCM_E_INDEX_OUT_OF_RANGE = 5,
  DCM_E_EMPTY_MATRIX = 6,
  DCM_E_DUPLICATE_INDEX = 7,
  DCM_E_LENGTH_MISMATCH = 8,
  DCM_E_TOO_FEW_ROWS = 9,
  DCM_E_ROW_COUNT_MISMATCH = 10,
  DCM_E_SAME_SITE = 11,
  DCM_E_MISSING_PAIR = 12,
  DCM_E_OVERLAPPING_PAIR = 13,
  DCM_E_NON_CONVERGENCE = 14,
  DCM_E_IO = 15,
  DCM_E_RAGGED_ROWS = 16,
  DCM_E_PARSE = 17,
  DCM_E_SPEC_MISMATCH = 18,
  DCM_E_UNSUPPORTED_PARTITION_COUNT = 19,
  DCM_E_WIDTH_MISMATCH = 20,
  DCM_E_MALFORMED_FRAME = 21,
  DCM_E_UNKNOWN_KIND = 22,
  DCM_E_TRANSPORT = 23,
  DCM_E_TIMEOUT = 24,
  DCM_E_PROTOCOL = 25,
  DCM_E_MISMATCH = 26,
  DCM_E_INTERNAL = 99
} dcm_status;

typedef enum dcm_format { DCM_FORMAT_AUTO = 0, DCM_FORMAT_CSV = 1, DCM_FORMAT_WHITESPACE = 2 } dcm_format;
typedef enum dcm_mode { DCM_MODE_CENTRALIZED = 0, DCM_MODE_DISTRIBUTED = 1 } dcm_mode;
typedef enum dcm_transport { DCM_TRANSPORT_IN_PROCESS = 0, DCM_TRANSPORT_TCP = 1 } dcm_transport;

typedef struct dcm_matrix_s* dcm_matrix_t;
typedef struct dcm_partition_s* dcm_partition_t;
typedef struct dcm_result_s* dcm_result_t;

typedef struct dcm_run_options {
  dcm_transport transport;
  /* 0 selects the library default of 60000 ms. */
  uint32_t deadline_ms;
  /* Non-zero skips the eigen-decomposition. */
  int skip_eigen;
  /* Test hook: non-zero nudges one entry of the last site's local block by
   * one ulp before it is sent (distributed mode only). */
  int inject_corruption;
} dcm_run_options;

DCM_API const char* dcm_version(void);
DCM_API const char* dcm_last_error(void);
DCM_API const char* dcm_status_name(dcm_status status);
DCM_API void dcm_string_free(char* s);

/* --- matrices ------------------------------------------------------------ */

/* `labels` may be NULL; otherwise it holds `cols` strings. */
DCM_API dcm_status dcm_matrix_create(size_t rows, size_t cols, const double* values,
                                     const char* const* labels, dcm_matrix_t* out);
DCM_API dcm_status dcm_matrix_load(const char* path, dcm_format format, dcm_matrix_t* out);
DCM_API dcm_status dcm_matrix_save(dcm_matrix_t m, const char* path, dcm_format format);
DCM_API dcm_status dcm_matrix_generate(size_t rows, size_t cols, uint64_t seed, dcm_matrix_t* out);
DCM_API dcm_status dcm_matrix_hjoin(const dcm_matrix_t* tables, size_t count, dcm_matrix_t* out);
DCM_API dcm_status dcm_matrix_slice(dcm_matrix_t m, const size_t* cols, size_t count,
                                    dcm_matrix_t* out);
DCM_API size_t dcm_matrix_rows(dcm_matrix_t m);
DCM_API size_t dcm_matrix_cols(dcm_matrix_t m);
/* Copies rows*cols values, row-major, into `out`. */
DCM_API dcm_status dcm_matrix_values(dcm_matrix_t m, double* out, size_t capacity);
DCM_API dcm_status dcm_matrix_column_mean(dcm_matrix_t m, size_t col, double* out);
DCM_API void dcm_matrix_free(dcm_matrix_t m);

/* --- partitions ------------------------------------------------------------ */

DCM_API dcm_status dcm_partition_mfeat(size_t partitions, dcm_partition_t* out);
DCM_API dcm_status dcm_partition_from_widths(const size_t* widths, size_t count,
                                             dcm_partition_t* out);
DCM_API dcm_status dcm_partition_from_json(const char* json, dcm_partition_t* out);
DCM_API dcm_status dcm_partition_to_json(dcm_partition_t p, char** out);
DCM_API size_t dcm_partition_sites(dcm_partition_t p);
DCM_API size_t dcm_partition_total_cols(dcm_partition_t p);
/* Writes the table for each group to `<dir>/<name>.txt` (whitespace format). */
DCM_API dcm_status dcm_partition_write_tables(dcm_partition_t p, dcm_matrix_t m, const char* dir);
DCM_API void dcm_partition_free(dcm_partition_t p);

/* --- schedule and cost model (JSON documents) ------------------------------ */

DCM_API dcm_status dcm_schedule_json(size_t sites, char** out);
DCM_API dcm_status dcm_schedule_text(size_t sites, char** out);
DCM_API dcm_status dcm_cost_model_json(const size_t* widths, size_t count, char** out);

/* --- runs ------------------------------------------------------------------ */

DCM_API void dcm_run_options_init(dcm_run_options* options);
/* `options` may be NULL for defaults. */
DCM_API dcm_status dcm_run(dcm_matrix_t data, dcm_partition_t spec, dcm_mode mode,
                           const dcm_run_options* options, dcm_result_t* out);
DCM_API dcm_status dcm_result_report_json(dcm_result_t r, char** out);
/* Hex SHA-256 of the covariance matrix, 64 characters plus terminator. */
DCM_API dcm_status dcm_result_checksum(dcm_result_t r, char out[65]);
DCM_API size_t dcm_result_dim(dcm_result_t r);
DCM_API dcm_status dcm_result_covariance(dcm_result_t r, double* out, size_t capacity);
/* Descending; returns DCM_E_INVALID_ARGUMENT when eigen was skipped. */
DCM_API dcm_status dcm_result_eigenvalues(dcm_result_t r, double* out, size_t capacity);
DCM_API dcm_status dcm_result_dump_matrix(dcm_result_t r, const char* path);
/* *equal = 1 when both covariance matrices are bit-identical. */
DCM_API dcm_status dcm_result_equal(dcm_result_t a, dcm_result_t b, int* equal);
DCM_API void dcm_result_free(dcm_result_t r);

/* Runs both modes on the same partition and writes a comparison document.
 * Returns DCM_E_MISMATCH (with `out` still filled) when the matrices differ. */
DCM_API dcm_status dcm_compare(dcm_matrix_t data, dcm_partition_t spec,
                               const dcm_run_options* options, char** out);

#ifdef __cplusplus
}
#endif

#endif /* DCM_DCM_H */
