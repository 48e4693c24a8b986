/* C ABI for the padic-irred classification and density library. */

#ifndef PADIC_IRRED_H
#define PADIC_IRRED_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Success.
 */
#define PADIC_OK 0

/**
 * Malformed arguments (bad prime, class expression, null pointer).
 */
#define PADIC_USAGE 1

/**
 * Parameters outside a theorem's hypotheses.
 */
#define PADIC_HYPOTHESIS 2

/**
 * Work limit reached before the requested level.
 */
#define PADIC_RESOURCE 3

/**
 * A verifier found a counterexample (the JSON is still written).
 */
#define PADIC_COUNTEREXAMPLE 4

/**
 * Internal panic; no output was written.
 */
#define PADIC_INTERNAL 5

/**
 * Opaque handle to one residue class of monic trace-zero polynomials.
 */
typedef struct PadicPoly PadicPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Exact closed-form density. `kind` is one of "prime-degree" (degree
 * taken from `r`), "quartic", "double-quadratic", "slope-half".
 */
int32_t padic_density(const char *kind, uint64_t p, uint64_t r, char **out_json);

/**
 * Level-by-level classification table. Pass `degree = 0` to take the
 * degree from `class_expr`; pass `work_limit = 0` for the default.
 */
int32_t padic_table(uint64_t p,
                    uint32_t degree,
                    const char *class_expr,
                    uint32_t kmax,
                    uint64_t work_limit,
                    char **out_json);

/**
 * Exact density bracket from finite-level certificates.
 */
int32_t padic_bracket(uint64_t p,
                      uint32_t degree,
                      const char *class_expr,
                      uint32_t kmax,
                      bool quotient_by_s,
                      uint64_t work_limit,
                      char **out_json);

/**
 * Runs one named verifier (`claim-1` .. `claim-6`, `case-counts`,
 * `table-2`) or, with a null `claim`, the whole desk-scale grid.
 * Returns PADIC_COUNTEREXAMPLE if any check fails; the JSON report is
 * written either way.
 */
int32_t padic_verify_claims(uint64_t p, const char *claim, char **out_json);

/**
 * Monte Carlo density diagnostic (statistical, non-certifying).
 */
int32_t padic_mc(uint64_t p,
                 uint32_t degree,
                 const char *class_expr,
                 uint64_t samples,
                 uint64_t seed,
                 uint32_t precision,
                 char **out_json);

/**
 * Builds a residue-class handle from the full ascending coefficient
 * vector (constant term first, leading 1 last) reduced mod p^level.
 * The x^{n-1} coefficient must be 0. Returns null on invalid input.
 */
struct PadicPoly *padic_poly_new(uint64_t p, uint32_t level, const uint64_t *coeffs, uintptr_t len);

/**
 * Classifies the residue class; writes a JSON certificate with the
 * label, reason, and witness factor pair when one exists.
 */
int32_t padic_poly_classify(const struct PadicPoly *poly, char **out_json);

/**
 * Releases a handle from `padic_poly_new`. Null is a no-op.
 */
void padic_poly_free(struct PadicPoly *poly);

/**
 * Releases a string written by any `out_json` parameter. Null is a no-op.
 */
void padic_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PADIC_IRRED_H */
