/* C interface to the mpcac library.
 *
 * Every function returns an mpcac_status. On failure, mpcac_last_error()
 * describes the problem for the calling thread. Strings returned through
 * `char**` out-parameters are owned by the caller and must be released with
 * mpcac_string_free(). JSON requests and results use the same documents as
 * the command-line tool.
 */
#ifndef MPCAC_H
#define MPCAC_H

#include <stddef.h>

#if defined(MPCAC_BUILDING_LIBRARY)
#define MPCAC_API __attribute__((visibility("default")))
#else
#define MPCAC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mpcac_status {
  MPCAC_OK = 0,
  MPCAC_ERR_PARSE = 1,            /* malformed expression */
  MPCAC_ERR_SCHEMA = 2,           /* malformed JSON document */
  MPCAC_ERR_DOMAIN = 3,           /* evaluation outside a function's domain */
  MPCAC_ERR_INVALID_ARGUMENT = 4, /* dimensions, signs, index sets */
  MPCAC_ERR_INFEASIBLE = 5,       /* point required to be feasible is not */
  MPCAC_ERR_LIMIT = 6,            /* enumeration cap exceeded */
  MPCAC_ERR_INTERNAL = 7
} mpcac_status;

typedef struct mpcac_problem mpcac_problem;
typedef struct mpcac_expr mpcac_expr;

MPCAC_API const char* mpcac_version(void);
MPCAC_API const char* mpcac_last_error(void);
MPCAC_API const char* mpcac_status_name(mpcac_status status);
MPCAC_API void mpcac_string_free(char* s);

/* Problems */
MPCAC_API mpcac_status mpcac_problem_load(const char* json_text, mpcac_problem** out);
MPCAC_API void mpcac_problem_free(mpcac_problem* p);
MPCAC_API int mpcac_problem_dimension(const mpcac_problem* p);
MPCAC_API int mpcac_problem_alpha(const mpcac_problem* p);
/* Hex SHA-256 of the text the problem was loaded from. */
MPCAC_API mpcac_status mpcac_problem_digest(const mpcac_problem* p, char** out);

/* Commands. `*pass` (may be NULL) receives 1 when the result passed:
 * the check held at its tolerance, the solve reached aw_tol, the witness
 * residual is within tol, or the oracle found a bounded minimum. */
MPCAC_API mpcac_status mpcac_check(const mpcac_problem* p, const char* request_json,
                                   char** result_json, int* pass);
MPCAC_API mpcac_status mpcac_solve(const mpcac_problem* p, const char* request_json,
                                   char** result_json, int* pass);
MPCAC_API mpcac_status mpcac_witness(const mpcac_problem* p, const char* request_json,
                                     char** result_json, int* pass);
MPCAC_API mpcac_status mpcac_oracle(const mpcac_problem* p, const char* request_json,
                                    char** result_json, int* pass);

/* Expressions over x1..xn */
MPCAC_API mpcac_status mpcac_expr_parse(const char* text, int n, mpcac_expr** out);
MPCAC_API void mpcac_expr_free(mpcac_expr* e);
MPCAC_API mpcac_status mpcac_expr_eval(const mpcac_expr* e, const double* x, size_t len,
                                       double* value);
/* Writes n partial derivatives to `grad`. */
MPCAC_API mpcac_status mpcac_expr_grad(const mpcac_expr* e, const double* x, size_t len,
                                       double* grad);
MPCAC_API mpcac_status mpcac_expr_to_string(const mpcac_expr* e, char** out);

/* Componentwise projection onto {wH >= 0, wG * wH = 0}. */
MPCAC_API mpcac_status mpcac_project_w(const double* aG, const double* aH, size_t len,
                                       double* wG, double* wH);

#ifdef __cplusplus
}
#endif

#endif /* MPCAC_H */
