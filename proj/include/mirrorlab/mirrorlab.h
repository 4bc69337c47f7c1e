/* Copyright (c) 2026, mirrorlab developers
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to mirrorlab. All objects are opaque handles released with
 * the matching *_free function. Functions return MLAB_OK on success; on
 * failure mlab_last_error() describes the problem for the calling thread.
 */

#ifndef MIRRORLAB_H
#define MIRRORLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MIRRORLAB_BUILDING_DLL)
#    define MLAB_API __declspec(dllexport)
#  else
#    define MLAB_API __declspec(dllimport)
#  endif
#else
#  define MLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mlab_status {
  MLAB_OK = 0,
  MLAB_ERR_INPUT = 1,
  MLAB_ERR_DOMAIN = 2,
  MLAB_ERR_DIMENSION = 3,
  MLAB_ERR_DIVERGED = 4,
  MLAB_ERR_UNSUPPORTED = 5,
  MLAB_ERR_PARSE = 6,
  MLAB_ERR_IO = 7,
  MLAB_ERR_DOMAIN_EXIT = 8,
  MLAB_ERR_RANK_DEFICIENT = 9,
  MLAB_ERR_INTERNAL = 99
} mlab_status;

typedef struct mlab_config mlab_config;
typedef struct mlab_schedule mlab_schedule;
typedef struct mlab_family mlab_family;
typedef struct mlab_matrix mlab_matrix;
typedef struct mlab_result mlab_result;

MLAB_API const char* mlab_version(void);
MLAB_API const char* mlab_status_string(mlab_status status);
/* Message of the last failed call on this thread ("" if none). */
MLAB_API const char* mlab_last_error(void);

/* Configuration: flat "key = value" text with [section] headers. */
MLAB_API mlab_status mlab_config_new(mlab_config** out);
MLAB_API mlab_status mlab_config_load(const char* path, mlab_config** out);
MLAB_API mlab_status mlab_config_parse(const char* text, mlab_config** out);
MLAB_API mlab_status mlab_config_set(mlab_config* cfg, const char* key, const char* value);
MLAB_API const char* mlab_config_hash(const mlab_config* cfg);
MLAB_API void mlab_config_free(mlab_config* cfg);

/* Schedules: kind is constant, turnoff, linear-decay or cosine-decay. */
MLAB_API mlab_status mlab_schedule_new(const char* kind, double alpha0, double turnoff_time, double t_end,
                                       mlab_schedule** out);
MLAB_API mlab_status mlab_schedule_alpha(const mlab_schedule* s, double t, double* out);
MLAB_API mlab_status mlab_schedule_a(const mlab_schedule* s, double t, double* out);
MLAB_API void mlab_schedule_free(mlab_schedule* s);

/* Legendre families. Vectors have length n. */
MLAB_API mlab_status mlab_family_entropy(const double* x0, size_t n, double scale, mlab_family** out);
MLAB_API mlab_status mlab_family_hyperbolic_entropy(const double* m0, const double* w0, size_t n,
                                                    mlab_family** out);
MLAB_API mlab_status mlab_family_log_cosh(const double* u0, const double* v0, size_t n, mlab_family** out);
MLAB_API mlab_status mlab_family_diff_powers(int k, const double* u0, const double* v0, size_t n,
                                             mlab_family** out);
MLAB_API size_t mlab_family_dim(const mlab_family* f);
MLAB_API mlab_status mlab_family_value(const mlab_family* f, double a, const double* x, double* out);
MLAB_API mlab_status mlab_family_grad(const mlab_family* f, double a, const double* x, double* out);
MLAB_API mlab_status mlab_family_dual_map(const mlab_family* f, double a, const double* mu, double* out);
MLAB_API mlab_status mlab_family_argmin(const mlab_family* f, double a, double* out);
MLAB_API mlab_status mlab_family_bregman(const mlab_family* f, double a, const double* x, const double* y,
                                         double* out);
/* Dual interval per coordinate: lo[i] < mu_i < hi[i] (may be infinite). */
/* lo and hi receive one bound per coordinate. */
MLAB_API mlab_status mlab_family_dual_domain(const mlab_family* f, double a, double* lo, double* hi);
MLAB_API void mlab_family_free(mlab_family* f);

/* Dense row-major matrices and headerless CSV files. */
MLAB_API mlab_status mlab_matrix_new(size_t rows, size_t cols, const double* data, mlab_matrix** out);
MLAB_API mlab_status mlab_matrix_load(const char* path, mlab_matrix** out);
MLAB_API mlab_status mlab_matrix_save(const mlab_matrix* m, const char* path);
MLAB_API size_t mlab_matrix_rows(const mlab_matrix* m);
MLAB_API size_t mlab_matrix_cols(const mlab_matrix* m);
MLAB_API const double* mlab_matrix_data(const mlab_matrix* m);
MLAB_API void mlab_matrix_free(mlab_matrix* m);
MLAB_API mlab_status mlab_nuclear_frobenius_ratio(const mlab_matrix* m, double* out);

/* Options shared by verification suites and experiment runs. */
typedef struct mlab_options {
  const char* family;   /* NULL for default */
  const char* variant;  /* NULL for default */
  int depth;            /* 0 for default */
  int expect_fail;
  const char* schedule; /* kind override or "none"; NULL keeps config */
  int has_seed;
  uint64_t seed;
} mlab_options;

MLAB_API void mlab_options_init(mlab_options* opt);

/* suite: commuting, equivalence, contracting, optimality. cfg may be NULL. */
MLAB_API mlab_status mlab_verify(const char* suite, const mlab_config* cfg, const mlab_options* opt,
                                 mlab_result** out);
/* experiment: sensing, diagonal, sparse-coding, flow. cfg may be NULL. */
MLAB_API mlab_status mlab_run(const char* experiment, const mlab_config* cfg, const mlab_options* opt,
                              mlab_result** out);

MLAB_API int mlab_result_passed(const mlab_result* r);
MLAB_API int mlab_result_diverged(const mlab_result* r);
/* Human-readable table (suites) or one-line summary (runs). */
MLAB_API const char* mlab_result_table(const mlab_result* r);
/* JSON record: suite report or run summary. */
MLAB_API const char* mlab_result_json(const mlab_result* r);
MLAB_API mlab_status mlab_result_write_csv(const mlab_result* r, const char* path);
MLAB_API mlab_status mlab_result_write_states(const mlab_result* r, const char* path);
MLAB_API mlab_status mlab_result_write_svg(const mlab_result* r, const char* metric, const char* path);
MLAB_API mlab_status mlab_result_series(const mlab_result* r, const char* name, const double** data, size_t* len);
MLAB_API void mlab_result_free(mlab_result* r);

#ifdef __cplusplus
}
#endif

#endif /* MIRRORLAB_H */
