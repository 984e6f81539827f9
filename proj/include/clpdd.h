/* Copyright 2026 The CLPDD Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the clpdd distillation engine.
 *
 * Every fallible call returns a clpdd_status. On failure the message for the
 * calling thread is available from clpdd_last_error() until the next call.
 * Strings returned through char** are owned by the caller and released with
 * clpdd_string_free().
 */
#ifndef CLPDD_H_
#define CLPDD_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CLPDD_BUILDING_LIBRARY)
#    define CLPDD_API __declspec(dllexport)
#  else
#    define CLPDD_API __declspec(dllimport)
#  endif
#else
#  define CLPDD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum clpdd_status {
  CLPDD_OK = 0,
  CLPDD_ERR_INVALID_ARGUMENT = 1,
  CLPDD_ERR_DIMENSION_MISMATCH = 2,
  CLPDD_ERR_NOT_POSITIVE_DEFINITE = 3,
  CLPDD_ERR_NON_FINITE = 4,
  CLPDD_ERR_CONFIG = 5,
  CLPDD_ERR_IO = 6,
  CLPDD_ERR_BAD_MAGIC = 7,
  CLPDD_ERR_VERSION_MISMATCH = 8,
  CLPDD_ERR_TRUNCATED = 9,
  CLPDD_ERR_LABEL_OUT_OF_RANGE = 10,
  CLPDD_ERR_INSUFFICIENT_DATA = 11,
  CLPDD_ERR_DIVERGENCE = 12,
  CLPDD_ERR_STATE = 13,
  CLPDD_ERR_GRADCHECK_FAILED = 14,
  CLPDD_ERR_INTERNAL = 99
} clpdd_status;

typedef struct clpdd_config clpdd_config;
typedef struct clpdd_dataset clpdd_dataset;

CLPDD_API const char* clpdd_version(void);
CLPDD_API const char* clpdd_status_name(clpdd_status status);
/* Never NULL; empty when the last call on this thread succeeded. */
CLPDD_API const char* clpdd_last_error(void);
CLPDD_API void clpdd_string_free(char* s);

/* Configuration. */
CLPDD_API clpdd_status clpdd_config_create(clpdd_config** out);
CLPDD_API clpdd_status clpdd_config_parse(const char* text, clpdd_config** out);
CLPDD_API clpdd_status clpdd_config_load(const char* path, clpdd_config** out);
CLPDD_API clpdd_status clpdd_config_set(clpdd_config* cfg, const char* key,
                                        const char* value);
CLPDD_API clpdd_status clpdd_config_get(const clpdd_config* cfg,
                                        const char* key, char** value_out);
CLPDD_API clpdd_status clpdd_config_serialize(const clpdd_config* cfg,
                                              char** text_out);
CLPDD_API void clpdd_config_destroy(clpdd_config* cfg);

/* Labelled feature sets. inputs are row-major n x dim. */
CLPDD_API clpdd_status clpdd_dataset_create(size_t n, size_t dim,
                                            size_t class_count,
                                            const double* inputs,
                                            const uint32_t* labels,
                                            clpdd_dataset** out);
/* Generates the configured blobs with the given seed. */
CLPDD_API clpdd_status clpdd_dataset_generate(const clpdd_config* cfg,
                                              uint64_t seed,
                                              clpdd_dataset** train_out,
                                              clpdd_dataset** eval_out);
/* ".csv" paths use the text format, anything else the binary format. */
CLPDD_API clpdd_status clpdd_dataset_load(const char* path,
                                          clpdd_dataset** out);
CLPDD_API clpdd_status clpdd_dataset_save(const clpdd_dataset* ds,
                                          const char* path, int single_precision);
CLPDD_API clpdd_status clpdd_dataset_info(const clpdd_dataset* ds, size_t* n,
                                          size_t* dim, size_t* class_count);
/* Either output may be NULL. Buffers must hold n*dim and n entries. */
CLPDD_API clpdd_status clpdd_dataset_copy(const clpdd_dataset* ds,
                                          double* inputs, uint32_t* labels);
CLPDD_API void clpdd_dataset_destroy(clpdd_dataset* ds);

/* Commands. JSON/CSV outputs may be NULL when not wanted. */
/* Sets *passed to 1 or 0; a failed check is not an error status. */
CLPDD_API clpdd_status clpdd_gradcheck(uint64_t seed, size_t instances,
                                       int corrupt_backward, int* passed,
                                       char** report_json);
CLPDD_API clpdd_status clpdd_distill(const clpdd_config* cfg,
                                     const char* out_dir, char** report_json);
CLPDD_API clpdd_status clpdd_eval(const clpdd_config* cfg,
                                  const char* synthetic_path,
                                  const char* out_dir, char** report_json);
CLPDD_API clpdd_status clpdd_compare(const clpdd_config* cfg,
                                     const char* out_dir, char** report_json);
CLPDD_API clpdd_status clpdd_sweep(const clpdd_config* cfg, const char* param,
                                   const char* const* values, size_t count,
                                   const char* out_dir, char** csv_out);
/* synthetic_path may be NULL or empty to distill first. */
CLPDD_API clpdd_status clpdd_export_embeddings(const clpdd_config* cfg,
                                               const char* synthetic_path,
                                               const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* CLPDD_H_ */
