#ifndef VAW_H
#define VAW_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VawStatus {
  VAW_STATUS_OK = 0,
  /**
   * A predicate or command evaluated to false or infeasible.
   */
  VAW_STATUS_FALSE = 2,
  VAW_STATUS_PARSE_ERROR = 3,
  VAW_STATUS_DOMAIN_ERROR = 4,
  VAW_STATUS_NULL_POINTER = 10,
  VAW_STATUS_INVALID_UTF8 = 11,
  VAW_STATUS_PANIC = 12,
} VawStatus;

/**
 * A selected free-field algebra.
 */
typedef struct VawAlgebra VawAlgebra;

/**
 * An element of some algebra.
 */
typedef struct VawElement VawElement;

/**
 * Message for the last failed call on this thread; empty after a success. Never null.
 */
const char *vaw_last_error(void);

/**
 * Parses an algebra description such as `wfree-sln:4`, `heis:2` or `oodd:3:1`.
 *
 * # Safety
 * `desc` must be a NUL-terminated string and `out` a valid pointer.
 */
enum VawStatus vaw_algebra_new(const char *desc, struct VawAlgebra **out);

/**
 * # Safety
 * `alg` must come from [`vaw_algebra_new`] and not be used afterwards. Null is ignored.
 */
void vaw_algebra_free(struct VawAlgebra *alg);

/**
 * Number of generators of the algebra.
 *
 * # Safety
 * `alg` must be a live handle and `out` a valid pointer.
 */
enum VawStatus vaw_algebra_generator_count(const struct VawAlgebra *alg, uintptr_t *out);

/**
 * Evaluates an expression in the element grammar.
 *
 * # Safety
 * `alg` must be a live handle, `expr` a NUL-terminated string, `out` a valid pointer.
 */
enum VawStatus vaw_element_parse(const struct VawAlgebra *alg,
                                 const char *expr,
                                 struct VawElement **out);

/**
 * # Safety
 * `x` must come from this library and not be used afterwards. Null is ignored.
 */
void vaw_element_free(struct VawElement *x);

/**
 * a_(n) b for any integer n; n = -1 is the normally ordered product.
 *
 * # Safety
 * `a`, `b` must be live handles and `out` a valid pointer.
 */
enum VawStatus vaw_element_nth_product(const struct VawElement *a,
                                       int64_t n,
                                       const struct VawElement *b,
                                       struct VawElement **out);

/**
 * :a b:
 *
 * # Safety
 * As for [`vaw_element_nth_product`].
 */
enum VawStatus vaw_element_normal_order(const struct VawElement *a,
                                        const struct VawElement *b,
                                        struct VawElement **out);

/**
 * # Safety
 * As for [`vaw_element_nth_product`].
 */
enum VawStatus vaw_element_add(const struct VawElement *a,
                               const struct VawElement *b,
                               struct VawElement **out);

/**
 * k-th derivative.
 *
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum VawStatus vaw_element_derivative(const struct VawElement *a,
                                      uint32_t k,
                                      struct VawElement **out);

/**
 * Writes whether the two elements are equal; elements of different algebras are unequal.
 *
 * # Safety
 * `a`, `b` must be live handles and `out` a valid pointer.
 */
enum VawStatus vaw_element_equal(const struct VawElement *a, const struct VawElement *b, bool *out);

/**
 * Element JSON, the same document the command line prints.
 *
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum VawStatus vaw_element_to_json(const struct VawElement *a, char **out);

/**
 * Human-readable rendering.
 *
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum VawStatus vaw_element_pretty(const struct VawElement *a, char **out);

/**
 * Runs a command-line invocation (without the program name) and returns its exit code;
 * the output is stored in `out`.
 *
 * # Safety
 * `argv` must hold `argc` NUL-terminated strings and `out` must be a valid pointer.
 */
int32_t vaw_run(uintptr_t argc, const char *const *argv, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is ignored.
 */
void vaw_string_free(char *s);

#endif  /* VAW_H */
