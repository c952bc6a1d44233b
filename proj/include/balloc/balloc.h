// Copyright 2026 The balloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the balloc accountant. All functions return a
 * balloc_status; on failure balloc_last_error() describes the problem for the
 * calling thread. Handles are opaque and must be released with the matching
 * *_free function. */
#ifndef BALLOC_BALLOC_H_
#define BALLOC_BALLOC_H_

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define BALLOC_API __declspec(dllexport)
#else
#define BALLOC_API __attribute__((visibility("default")))
#endif

typedef enum {
  BALLOC_OK = 0,
  BALLOC_ERR_INVALID_ARGUMENT = 1,
  BALLOC_ERR_SINGULAR = 2,
  BALLOC_ERR_TOO_LARGE = 3,
  BALLOC_ERR_NUMERICAL = 4,
  BALLOC_ERR_UNACHIEVABLE = 5,
  BALLOC_ERR_IO = 6,
  BALLOC_ERR_INTERNAL = 7
} balloc_status;

typedef enum {
  BALLOC_METHOD_RENYI = 0,
  BALLOC_METHOD_CONDCOMP = 1,
  BALLOC_METHOD_BEST = 2,
  BALLOC_METHOD_MC = 3
} balloc_method;

typedef enum {
  BALLOC_STRATEGY_HYBRID = 0,
  BALLOC_STRATEGY_UNION = 1,
  BALLOC_STRATEGY_GLOBAL_MAX = 2
} balloc_strategy;

typedef struct balloc_matrix balloc_matrix;
typedef struct balloc_accountant balloc_accountant;

typedef struct {
  /* Renyi orders; NULL selects 2..64. */
  const int* alphas;
  int num_alphas;
  /* Cyclic bandwidth; 0 selects min(natural bandwidth, 8). */
  int bandwidth;
  double dp_budget;
  balloc_strategy strategy;
  /* PLD grid spacing; 0 selects it from max_support. */
  double grid_spacing;
  int max_support;
  /* condcomp bad-event budget at fixed sigma, and its share of delta when
   * calibrating. */
  double delta_e;
  double delta_e_fraction;
  long long mc_samples;
  double mc_confidence;
  int has_seed;
  unsigned long long seed;
} balloc_options;

typedef struct {
  double epsilon;
  double delta;
  double delta_remove;
  double delta_add;
  balloc_method method;
  balloc_method source;
  int alpha;
  double delta_e;
  double ci_low;
  double ci_high;
} balloc_point;

BALLOC_API const char* balloc_status_string(balloc_status status);
BALLOC_API const char* balloc_last_error(void);
BALLOC_API const char* balloc_method_name(balloc_method method);
BALLOC_API const char* balloc_version(void);

BALLOC_API balloc_status balloc_matrix_identity(int n, balloc_matrix** out);
BALLOC_API balloc_status balloc_matrix_toeplitz(int n, const double* coeffs, int len,
                                                balloc_matrix** out);
BALLOC_API balloc_status balloc_matrix_dense(int n, const double* row_major,
                                             balloc_matrix** out);
/* Banded square-root factorization: Toeplitz with `bandwidth` coefficients. */
BALLOC_API balloc_status balloc_matrix_bsr(int n, int bandwidth, balloc_matrix** out);
/* Inverse of the banded inverse-square-root Toeplitz matrix. */
BALLOC_API balloc_status balloc_matrix_bisr(int n, int bandwidth, balloc_matrix** out);
/* Inverse of the banded lower-triangular Toeplitz matrix with coefficients d. */
BALLOC_API balloc_status balloc_matrix_invert_banded(int n, const double* d, int len,
                                                     balloc_matrix** out);
BALLOC_API balloc_status balloc_matrix_load(const char* path, balloc_matrix** out);
BALLOC_API balloc_status balloc_matrix_save(const balloc_matrix* m, const char* path);
BALLOC_API balloc_status balloc_matrix_size(const balloc_matrix* m, int* n);
BALLOC_API balloc_status balloc_matrix_natural_bandwidth(const balloc_matrix* m, int* band);
BALLOC_API void balloc_matrix_free(balloc_matrix* m);

BALLOC_API balloc_status balloc_sqrt_toeplitz_coefficients(int length, double* out);
BALLOC_API balloc_status balloc_inv_sqrt_toeplitz_coefficients(int length, double* out);

BALLOC_API void balloc_options_default(balloc_options* options);

BALLOC_API balloc_status balloc_accountant_create(const balloc_matrix* m, int epochs,
                                                  int batches, const balloc_options* options,
                                                  balloc_accountant** out);
BALLOC_API balloc_status balloc_accountant_bandwidth(const balloc_accountant* a, int* band);
BALLOC_API void balloc_accountant_free(balloc_accountant* a);

BALLOC_API balloc_status balloc_account(const balloc_accountant* a, balloc_method method,
                                        double sigma, double epsilon, balloc_point* out);
/* epsilons ascending; out has room for n points. */
BALLOC_API balloc_status balloc_profile(const balloc_accountant* a, balloc_method method,
                                        double sigma, const double* epsilons, int n,
                                        balloc_point* out);
BALLOC_API balloc_status balloc_calibrate(const balloc_accountant* a, balloc_method method,
                                          double epsilon, double delta, double tol,
                                          double* sigma_out);

#ifdef __cplusplus
}
#endif

#endif /* BALLOC_BALLOC_H_ */
