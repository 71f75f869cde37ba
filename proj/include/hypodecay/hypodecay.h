/*
 * hypodecay — explicit decay rates for linear Fokker–Planck equations.
 *
 * C interface. Every handle is opaque and owned by the caller once returned;
 * release it with the matching *_destroy function. Matrices are row-major
 * d x d arrays. Functions return HD_OK or an error status; the message of the
 * most recent error on the calling thread is available from hd_last_error().
 *
 * Copyright 2026 The hypodecay Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#ifndef HYPODECAY_HYPODECAY_H_
#define HYPODECAY_HYPODECAY_H_

#include <stddef.h>

#if defined(_WIN32)
#  if defined(HD_BUILDING_LIBRARY)
#    define HD_API __declspec(dllexport)
#  else
#    define HD_API __declspec(dllimport)
#  endif
#else
#  define HD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hd_status {
  HD_OK = 0,
  HD_ERR_DIMENSION = 1,
  HD_ERR_INVALID_INPUT = 2,
  HD_ERR_NO_UNIQUE_SOLUTION = 3,
  HD_ERR_CONDITIONING = 4,
  HD_ERR_PARAMETER = 5,
  HD_ERR_INFEASIBLE_CERTIFICATE = 6,
  HD_ERR_RANGE = 7,
  HD_ERR_CAPACITY = 8,
  HD_ERR_DOMAIN = 9,
  HD_ERR_SINGULAR_INTEGRAND = 10,
  HD_ERR_DIVERGENT_MOMENT = 11,
  HD_ERR_INCONSISTENCY = 12,
  HD_ERR_SPECTRAL_CONSISTENCY = 13,
  HD_ERR_THEOREM_CHECK = 14,
  HD_ERR_PRECONDITION = 15,
  HD_ERR_UNDER_RESOLVED = 16,
  HD_ERR_PARSE = 17,
  HD_ERR_IO = 18,
  HD_ERR_NULL_ARGUMENT = 19,
  HD_ERR_INTERNAL = 99
} hd_status;

typedef struct hd_system hd_system;
typedef struct hd_scenario hd_scenario;
typedef struct hd_result hd_result;

HD_API const char* hd_version(void);
HD_API const char* hd_status_string(hd_status status);
/* Message of the last failed call on this thread ("" if none). */
HD_API const char* hd_last_error(void);

/* ---- systems --------------------------------------------------------- */

/* Validates (D, C); a system failing the structural conditions is still
 * created and reports accepted = 0. */
HD_API hd_status hd_system_create(int d, const double* D, const double* C, double tolerance,
                                  hd_system** out);
HD_API void hd_system_destroy(hd_system* sys);
HD_API hd_status hd_system_dim(const hd_system* sys, int* d);
HD_API hd_status hd_system_accepted(const hd_system* sys, int* accepted);
/* Equilibrium covariance K solving C K + K C^T = 2 D, and the residual norm
 * ||2 D - C K - K C^T||_2. Either output may be NULL. */
HD_API hd_status hd_system_equilibrium_covariance(const hd_system* sys, double* K,
                                                  double* residual);
/* x = T y maps the normalized frame to the original one. Any output may be NULL. */
HD_API hd_status hd_system_normalized(const hd_system* sys, double* T, double* D_tilde,
                                      double* C_tilde);
HD_API hd_status hd_system_spectrum(const hd_system* sys, double* mu, int* defect,
                                    double* c_tilde, double* c_hat);
/* Certificate P (normalized frame) with C~^T P + P C~ >= 2 (mu - nu) P. */
HD_API hd_status hd_system_certificate(const hd_system* sys, double nu, double* P,
                                       double* lambda, double* lmi_residual);

/* ---- functionals of N(mean, cov) relative to N(0, I) ------------------ */

/* grid_degree <= 0 selects the default quadrature. */
HD_API hd_status hd_gaussian_entropy(int d, const double* mean, const double* cov, double p,
                                     int grid_degree, double* out);
/* P == NULL means the identity. */
HD_API hd_status hd_gaussian_fisher(int d, const double* mean, const double* cov, double p,
                                    const double* P, int grid_degree, double* out);

/* ---- scalar diffusion rate condition ---------------------------------- */

/* Grid minimum of the smallest eigenvalue of the rate matrix on [-L, L]^d.
 * points_per_axis <= 0 selects the default. */
HD_API hd_status hd_a1_lambda(const char* phi, const char* diffusion, int d, double half_width,
                              int points_per_axis, double* lambda1);

/* ---- scenarios and commands ------------------------------------------- */

typedef enum hd_command {
  HD_CMD_VALIDATE = 0,
  HD_CMD_CERTIFY = 1,
  HD_CMD_SIMULATE = 2,
  HD_CMD_VERIFY = 3,
  HD_CMD_APPENDIX_A = 4
} hd_command;

typedef struct hd_run_options {
  const char* out_dir; /* NULL: use the scenario's */
  int grid_degree;     /* <= 0: use the scenario's */
  int has_nu;
  double nu;
  int write_files;
} hd_run_options;

HD_API hd_status hd_scenario_load(const char* path, hd_scenario** out);
HD_API hd_status hd_scenario_parse(const char* text, hd_scenario** out);
HD_API void hd_scenario_destroy(hd_scenario* sc);
HD_API const char* hd_scenario_name(const hd_scenario* sc);
HD_API const char* hd_scenario_help(void);

HD_API void hd_run_options_init(hd_run_options* opt);
/* On error *out is NULL and the status explains why. */
HD_API hd_status hd_run(const hd_scenario* sc, hd_command cmd, const hd_run_options* opt,
                        hd_result** out);
HD_API int hd_result_exit_code(const hd_result* r);
HD_API const char* hd_result_text(const hd_result* r);
HD_API size_t hd_result_file_count(const hd_result* r);
HD_API const char* hd_result_file(const hd_result* r, size_t i);
HD_API int hd_result_checks_failed(const hd_result* r);
HD_API void hd_result_destroy(hd_result* r);

/* Exit-code contract: 0 pass, 1 check failure, 2 configuration, 3 resolution. */
HD_API int hd_exit_code_for_status(hd_status status);

#ifdef __cplusplus
}
#endif

#endif /* HYPODECAY_HYPODECAY_H_ */
