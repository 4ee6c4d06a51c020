/*
 * zakline C API.
 *
 * Complex Berry (Zak) phases of non-Hermitian Bloch Hamiltonians from a
 * gauge-smoothed biorthogonal eigenbasis, with a Wilson-loop cross-check and
 * the closed-form result for the gain/loss SSH chain.
 *
 * Every fallible call returns a zl_status. On failure the calling thread's
 * last error message is available from zl_last_error() until the next call.
 * Handles are opaque; free them with the matching *_free function.
 */
#ifndef ZAKLINE_ZAKLINE_H
#define ZAKLINE_ZAKLINE_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(ZAKLINE_BUILDING_LIBRARY)
#    define ZL_API __declspec(dllexport)
#  else
#    define ZL_API __declspec(dllimport)
#  endif
#else
#  define ZL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zl_status {
  ZL_OK = 0,
  ZL_ERR_INVALID_ARGUMENT = 1,
  ZL_ERR_PARSE = 2,
  ZL_ERR_VALIDATION = 3,
  ZL_ERR_DEFECTIVE_MATRIX = 4,
  ZL_ERR_NO_CONVERGENCE = 5,
  ZL_ERR_PAIRING_AMBIGUOUS = 6,
  ZL_ERR_SELF_ORTHOGONAL = 7,
  ZL_ERR_SUBSPACE_COLLAPSE = 8,
  ZL_ERR_BAND_CROSSING = 9,
  ZL_ERR_VANISHING_OVERLAP = 10,
  ZL_ERR_NO_USABLE_COMPONENT = 11,
  ZL_ERR_CLOSURE_FAILURE = 12,
  ZL_ERR_NOT_SMOOTHED = 13,
  ZL_ERR_DOMAIN = 14,
  ZL_ERR_BROKEN_REGIME = 15,
  ZL_ERR_DEGENERATE_RATIO = 16,
  ZL_ERR_IO = 17,
  ZL_ERR_INTERNAL = 18
} zl_status;

typedef enum zl_methods {
  ZL_METHODS_DERIVATIVE = 1,
  ZL_METHODS_WILSON = 2,
  ZL_METHODS_BOTH = 3
} zl_methods;

typedef enum zl_difference {
  ZL_DIFFERENCE_FIVE_POINT = 0,
  ZL_DIFFERENCE_CENTRAL = 1,
  ZL_DIFFERENCE_FORWARD = 2
} zl_difference;

typedef struct zl_complex {
  double re;
  double im;
} zl_complex;

typedef struct zl_ssh_params {
  double t;
  double delta;
  double theta;
  double gamma;
} zl_ssh_params;

typedef struct zl_tolerances {
  double resid;
  double ortho;
  double pair;
  double selforth;
  double degeneracy;
  double overlap;
  double closure;
  double component;
  double pt;
  double quant;
} zl_tolerances;

typedef struct zl_run_options {
  int grid_points;         /* M, >= 3 */
  zl_methods methods;
  zl_difference difference;
  int emit_analytic;       /* nonzero: attach closed-form values when unbroken */
  int workers;             /* 0: hardware concurrency */
  zl_tolerances tol;
} zl_run_options;

typedef struct zl_model zl_model;
typedef struct zl_result zl_result;
typedef struct zl_sweep zl_sweep;

typedef struct zl_band_result {
  int band;
  int has_derivative;
  zl_complex gamma_derivative;
  int has_wilson;
  zl_complex gamma_wilson;
  double oracle_gap;       /* NaN unless both routes ran */
  double quant_residual;   /* from Wilson when available */
  double quant_value;      /* 0 or pi */
  int quantized;           /* residual <= tol.quant */
  int has_winding;
  int crossings;           /* X */
  double delta_phase;
  int component;           /* 0-based p */
  int has_analytic;
  zl_complex gamma_analytic;
} zl_band_result;

typedef struct zl_pt_info {
  int broken;
  double max_imag_gap;
  size_t critical_count;
} zl_pt_info;

typedef struct zl_sweep_row {
  double theta;
  int pt_broken;
  int failed;
  zl_complex gamma[2];
  int has_analytic[2];
  zl_complex analytic[2];
  double quant_residual[2];
  double oracle_gap[2];
  int crossings[2];
} zl_sweep_row;

typedef struct zl_convergence_row {
  int grid_points;
  zl_complex gamma;        /* NaN when failed */
  double delta_prev;       /* NaN for the first row or next to a failed one */
  int failed;
  char error[192];         /* "Name: message" when failed, truncated */
} zl_convergence_row;

/* -- library -------------------------------------------------------------- */

ZL_API const char* zl_version(void);
ZL_API const char* zl_status_name(zl_status status);
ZL_API const char* zl_last_error(void);

ZL_API zl_tolerances zl_default_tolerances(void);
ZL_API zl_run_options zl_default_run_options(void);

/* Decimal literal, optional trailing "pi" when allow_pi is nonzero. */
ZL_API zl_status zl_parse_real(const char* text, int allow_pi, double* out);

/* -- models --------------------------------------------------------------- */

ZL_API zl_status zl_model_create_ssh(const zl_ssh_params* params, zl_model** out);
ZL_API zl_status zl_model_load(const char* config_text, zl_model** out);
ZL_API zl_status zl_model_load_file(const char* path, zl_model** out);
ZL_API void zl_model_free(zl_model* model);

ZL_API int zl_model_dim(const zl_model* model);
/* Returns 1 and fills *out for SSH models, 0 otherwise. */
ZL_API int zl_model_ssh_params(const zl_model* model, zl_ssh_params* out);
/* Writes dim*dim entries, row major. */
ZL_API zl_status zl_model_evaluate(const zl_model* model, double k, zl_complex* out,
                                   size_t capacity);

/* -- single point --------------------------------------------------------- */

ZL_API zl_status zl_compute(const zl_model* model, const zl_run_options* options,
                            zl_result** out);
ZL_API void zl_result_free(zl_result* result);
ZL_API size_t zl_result_band_count(const zl_result* result);
ZL_API zl_status zl_result_band(const zl_result* result, size_t index, zl_band_result* out);
ZL_API zl_status zl_result_pt(const zl_result* result, zl_pt_info* out);

/* -- diagnostics ---------------------------------------------------------- */

/* critical points are written up to `capacity`; info->critical_count is the total. */
ZL_API zl_status zl_pt_classify(const zl_model* model, int grid_points, double tol_pt,
                                zl_pt_info* info, double* critical, size_t capacity);
ZL_API zl_status zl_chiral_residual(const zl_model* model, int grid_points, double axis[3],
                                    double* residual);
/* 1-based band; rows must hold `count` entries. A numerical failure at one
 * grid size is recorded in its row and does not fail the call. */
ZL_API zl_status zl_convergence_study(const zl_model* model, int band,
                                      const int* grid_points, size_t count,
                                      zl_methods method, const zl_run_options* options,
                                      zl_convergence_row* rows);

/* -- sweeps --------------------------------------------------------------- */

ZL_API zl_status zl_sweep_run(const zl_ssh_params* base, double theta_min, double theta_max,
                              int steps, const zl_run_options* options, zl_sweep** out);
ZL_API void zl_sweep_free(zl_sweep* sweep);
ZL_API size_t zl_sweep_row_count(const zl_sweep* sweep);
ZL_API zl_status zl_sweep_get_row(const zl_sweep* sweep, size_t index, zl_sweep_row* out);
/* Failure message of a failed row ("" for successful rows). */
ZL_API const char* zl_sweep_row_error(const zl_sweep* sweep, size_t index);
ZL_API zl_status zl_sweep_write_csv(const zl_sweep* sweep, const char* path);
/* *needed receives the size of the CSV text including the terminator. With a
 * null buffer only the size is reported; a smaller capacity is an error. */
ZL_API zl_status zl_sweep_csv(const zl_sweep* sweep, char* buffer, size_t capacity,
                              size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* ZAKLINE_ZAKLINE_H */
