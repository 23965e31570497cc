#ifndef STEINWEISS_H
#define STEINWEISS_H

/* C interface to the steinweiss library: condition checks, bilinear-form
 * quadrature, divergence certificates and parameter scans.
 *
 * Every function returns an sw_status. On failure sw_last_error() gives a
 * message for the calling thread. Strings returned through char** are
 * allocated by the library and must be released with sw_free_string(). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SW_BUILDING_LIBRARY)
#    define SW_API __declspec(dllexport)
#  else
#    define SW_API __declspec(dllimport)
#  endif
#else
#  define SW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sw_status {
  SW_OK = 0,
  SW_INVALID_ARGUMENT = 1, /* null pointer, unknown enum value */
  SW_DOMAIN = 2,           /* value outside the mathematical domain */
  SW_PARSE = 3,            /* malformed number, id or JSON */
  SW_REGIME = 4,           /* certificate outside its construction's regime */
  SW_UNSUPPORTED = 5,
  SW_BUDGET = 6,
  SW_DEGENERATE = 7,
  SW_IO = 8,
  SW_INTERNAL = 99
} sw_status;

typedef enum sw_geometry { SW_GEOMETRY_FULL = 0, SW_GEOMETRY_HALF = 1, SW_GEOMETRY_CODIM = 2 } sw_geometry;

typedef enum sw_method { SW_METHOD_AUTO = 0, SW_METHOD_MONTE_CARLO = 1, SW_METHOD_RADIAL = 2 } sw_method;

typedef enum sw_verdict {
  SW_VERDICT_DIVERGENT = 0,
  SW_VERDICT_BOUNDED_AT_SCALE = 1,
  SW_VERDICT_INCONCLUSIVE = 2
} sw_verdict;

typedef struct sw_params sw_params;
typedef struct sw_function sw_function;

typedef struct sw_options {
  uint64_t budget;
  uint64_t seed;
  int threads; /* 0 = hardware concurrency */
  sw_method method;
  double truncation_radius;
} sw_options;

typedef struct sw_certify_options {
  const double* schedule; /* NULL for the construction's default */
  size_t schedule_len;
  double eps;        /* cylinder family */
  int numeric_m_max; /* cylinder truncations quadratured numerically */
  const sw_function* f; /* scaling-law test functions, NULL for defaults */
  const sw_function* g;
} sw_certify_options;

SW_API const char* sw_version(void);
SW_API const char* sw_last_error(void);
SW_API void sw_free_string(char* s);

SW_API void sw_options_init(sw_options* opts);
SW_API void sw_certify_options_init(sw_certify_options* opts);

/* Numbers are text: "a/b" or an integer is exact, anything else a double. */
SW_API sw_status sw_params_create(sw_geometry geometry, int n, int k, const char* p, const char* r, const char* alpha,
                                  const char* beta, const char* lambda, sw_params** out);
SW_API void sw_params_destroy(sw_params* params);
/* The lambda making Balance hold; lambda of params is ignored. */
SW_API sw_status sw_solve_balance_lambda(const sw_params* params, char** out_lambda);
/* Condition report as JSON; *all_hold may be NULL. */
SW_API sw_status sw_check(const sw_params* params, int* all_hold, char** out_json);

/* Catalog id such as "annulus:3:1:6". */
SW_API sw_status sw_function_create(const char* id, sw_function** out);
SW_API void sw_function_destroy(sw_function* f);
SW_API sw_status sw_function_norm(const sw_function* f, double exponent, const sw_options* opts, char** out_json);

/* I(f, g) for the kernel of params; with quotient != 0 also the norms and
 * I / (|f|_p |g|_r). opts may be NULL. */
SW_API sw_status sw_evaluate(const sw_function* f, const sw_function* g, const sw_params* params,
                             const sw_options* opts, int quotient, char** out_json);

/* construction is a construction id such as "LambdaGeN". */
SW_API sw_status sw_certify(const char* construction, const sw_params* params, const sw_options* opts,
                            const sw_certify_options* copts, sw_verdict* verdict, char** out_json);

/* Runs a scan described by a JSON config; either output may be NULL. */
SW_API sw_status sw_scan(const char* config_json, char** out_csv, char** out_json);

SW_API sw_status sw_catalog(char** out_json);

#ifdef __cplusplus
}
#endif

#endif
