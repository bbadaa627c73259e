#include "zigfast/zigfast.h"

#include <new>
#include <span>

#include "zigfast/exp_sampler.hpp"
#include "zigfast/normal_sampler.hpp"

struct zigfast_generator {
    explicit zigfast_generator(std::uint64_t seed) : exponential(seed), normal(seed) {}

    zigfast::ExpSampler exponential;
    zigfast::NormalSampler normal;
};

extern "C" {

zigfast_generator* zigfast_generator_new(uint64_t seed) {
    try {
        return new zigfast_generator(seed);
    } catch (...) {
        return nullptr;
    }
}

zigfast_generator* zigfast_generator_new_auto(void) {
    try {
        return new zigfast_generator(zigfast::resolve_seed());
    } catch (...) {
        return nullptr;
    }
}

void zigfast_generator_free(zigfast_generator* gen) { delete gen; }

void zigfast_generator_seed(zigfast_generator* gen, uint64_t seed) {
    if (gen != nullptr) {
        gen->exponential.source().reseed(seed);
        gen->normal.source().reseed(seed);
    }
}

int zigfast_fill_exponential(zigfast_generator* gen, double* out, size_t n) {
    if (gen == nullptr || (out == nullptr && n > 0)) {
        return 1;
    }
    gen->exponential.fill(std::span<double>(out, n));
    return 0;
}

int zigfast_fill_normal(zigfast_generator* gen, double* out, size_t n) {
    if (gen == nullptr || (out == nullptr && n > 0)) {
        return 1;
    }
    gen->normal.fill(std::span<double>(out, n));
    return 0;
}

}  // extern "C"
