/* C interface for language bindings.
 *
 * A generator holds one exponential and one normal sampler, both seeded with
 * the same value, so that after zigfast_generator_seed(g, s) the exponential
 * stream equals `zigfast gen --dist exp --seed s` element for element (and
 * likewise for the normal stream).
 */
#ifndef ZIGFAST_ZIGFAST_H
#define ZIGFAST_ZIGFAST_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct zigfast_generator zigfast_generator;

/* Returns NULL on allocation or table-construction failure. */
zigfast_generator* zigfast_generator_new(uint64_t seed);
/* Seed from ZIGFAST_SEED, or time and process ids when it is unset. */
zigfast_generator* zigfast_generator_new_auto(void);
void zigfast_generator_free(zigfast_generator* gen);

void zigfast_generator_seed(zigfast_generator* gen, uint64_t seed);

/* Return 0 on success, nonzero if gen is NULL or out is NULL with n > 0. */
int zigfast_fill_exponential(zigfast_generator* gen, double* out, size_t n);
int zigfast_fill_normal(zigfast_generator* gen, double* out, size_t n);

#ifdef __cplusplus
}
#endif

#endif /* ZIGFAST_ZIGFAST_H */
