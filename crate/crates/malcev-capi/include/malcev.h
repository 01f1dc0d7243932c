#ifndef MALCEV_H
#define MALCEV_H

/* Generated by cbindgen from malcev-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define MALCEV_OK 0

// A required pointer argument was NULL.
#define MALCEV_ERR_NULL_ARGUMENT 1

// A string argument was not valid UTF-8.
#define MALCEV_ERR_UTF8 2

// Input could not be parsed (file, term, partition or condition document).
#define MALCEV_ERR_PARSE 3

// The inputs parsed but are mathematically unusable (not a congruence,
// size mismatch, unbound symbol, ...).
#define MALCEV_ERR_DOMAIN 4

// A configured budget or capacity was exceeded.
#define MALCEV_ERR_BUDGET 5

// Opaque algebra handle: the parsed algebra plus its element aliases.
typedef struct MalcevAlgebra MalcevAlgebra;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread. The pointer stays
// valid until the next failing call on the same thread; do not free it.
const char *malcev_last_error_message(void);

// Releases a string produced by this library.
//
// # Safety
// `s` must have been returned by a `malcev_*` function and not freed yet.
void malcev_string_free(char *s);

// Parses the algebra file format into a fresh handle.
//
// # Safety
// `text` must be a valid NUL-terminated string; `out` must be valid.
int32_t malcev_algebra_parse(const char *text, struct MalcevAlgebra **out);

// Releases an algebra handle.
//
// # Safety
// `h` must come from `malcev_algebra_parse` and not be freed twice.
void malcev_algebra_free(struct MalcevAlgebra *h);

// Universe size of the algebra, or 0 when the handle is NULL.
//
// # Safety
// `h` must be NULL or a live handle.
size_t malcev_algebra_size(const struct MalcevAlgebra *h);

// Renders the algebra in canonical file form.
//
// # Safety
// Pointer arguments as documented on the crate.
int32_t malcev_algebra_print(const struct MalcevAlgebra *h, char **out);

// Lists every congruence as a JSON array of block-notation strings, in
// lattice enumeration order.
//
// # Safety
// Pointer arguments as documented on the crate.
int32_t malcev_congruences(const struct MalcevAlgebra *h, char **out_json);

// Computes the TC-commutator `[alpha, beta]` of two congruences given in
// block notation; the result is a block-notation string.
//
// # Safety
// Pointer arguments as documented on the crate.
int32_t malcev_commutator(const struct MalcevAlgebra *h,
                          const char *alpha,
                          const char *beta,
                          char **out);

// Checks `lhs ≤ rhs` over every congruence assignment. `out_holds` receives
// 1 or 0; on failure `out_report` (optional) receives a JSON object naming
// the assignment and witness pair.
//
// # Safety
// Pointer arguments as documented on the crate.
int32_t malcev_check_eq_exhaustive(const struct MalcevAlgebra *h,
                                   const char *lhs,
                                   const char *rhs,
                                   int32_t *out_holds,
                                   char **out_report);

// Checks the commutator equation `lhs ≈_C rhs` for algebra terms such as
// `plus(x1,neg(x2))`. Same out-parameter conventions as
// `malcev_check_eq_exhaustive`.
//
// # Safety
// Pointer arguments as documented on the crate.
int32_t malcev_check_commutator_eq(const struct MalcevAlgebra *h,
                                   const char *lhs,
                                   const char *rhs,
                                   int32_t *out_holds,
                                   char **out_report);

// Runs the Pixley-Wille construction on `lhs ≤ rhs` and returns the
// machine-format JSON document. `k < 0` means no join fold; `commutator`
// non-zero emits `≈_C` equations.
//
// # Safety
// Pointer arguments as documented on the crate.
int32_t malcev_pixley_wille(const char *lhs,
                            const char *rhs,
                            int64_t k,
                            int32_t commutator,
                            char **out_json);

// Renders the herringbone term `y^n` in the crate's term syntax.
//
// # Safety
// Pointer arguments as documented on the crate.
int32_t malcev_herringbone(size_t n, char **out);

// Builds the labelled graph of a `{meet, composition}`-term; `dot` non-zero
// selects GraphViz output, otherwise one `xi -label-> xj` line per edge.
//
// # Safety
// Pointer arguments as documented on the crate.
int32_t malcev_graph(const char *term, int32_t dot, char **out);

// Searches the algebra for terms witnessing a machine-format condition
// document. `budget < 0` selects the default. `out_found` receives 1 when a
// witness exists and `out_json` a document with the terms; a proven absence
// sets `out_found` to 0 with a JSON explanation. Running out of budget is
// `MALCEV_ERR_BUDGET`.
//
// # Safety
// Pointer arguments as documented on the crate.
int32_t malcev_search_condition(const struct MalcevAlgebra *h,
                                const char *condition_json,
                                int64_t budget,
                                int32_t *out_found,
                                char **out_json);

// Runs the 8-element counterexample scenario over the given herringbone
// levels and returns the JSON report.
//
// # Safety
// `levels` must point to `levels_len` readable values (or be NULL with 0).
int32_t malcev_scenario_taylor_counterexample(const size_t *levels,
                                              size_t levels_len,
                                              char **out_json);

// Looks for a failing pairwise-trivial-meet assignment of `lhs ≤ rhs` on
// the 3-element set. `out_fails` receives 1 with a JSON description when a
// failure exists, 0 otherwise.
//
// # Safety
// Pointer arguments as documented on the crate.
int32_t malcev_check_fails_on_3set(const char *lhs,
                                   const char *rhs,
                                   int32_t *out_fails,
                                   char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MALCEV_H */
