#include <doctest.h>

#include <vector>

#include "zigfast/exp_sampler.hpp"
#include "zigfast/normal_sampler.hpp"
#include "zigfast/zigfast.h"

using namespace zigfast;

TEST_SUITE("c_api") {

TEST_CASE("streams equal the C++ samplers with the same seed") {
    zigfast_generator* g = zigfast_generator_new(42);
    REQUIRE(g != nullptr);
    std::vector<double> e(1000);
    std::vector<double> n(1000);
    CHECK(zigfast_fill_exponential(g, e.data(), e.size()) == 0);
    CHECK(zigfast_fill_normal(g, n.data(), n.size()) == 0);
    ExpSampler es(42);
    NormalSampler ns(42);
    for (std::size_t k = 0; k < e.size(); ++k) {
        REQUIRE(e[k] == es());
        REQUIRE(n[k] == ns());
    }

    zigfast_generator_seed(g, 42);
    std::vector<double> again(1000);
    CHECK(zigfast_fill_exponential(g, again.data(), again.size()) == 0);
    CHECK(again == e);
    zigfast_generator_free(g);
}

TEST_CASE("null handling") {
    CHECK(zigfast_fill_exponential(nullptr, nullptr, 0) != 0);
    zigfast_generator* g = zigfast_generator_new(1);
    CHECK(zigfast_fill_normal(g, nullptr, 3) != 0);
    CHECK(zigfast_fill_normal(g, nullptr, 0) == 0);
    zigfast_generator_seed(nullptr, 3);
    zigfast_generator_free(g);
    zigfast_generator_free(nullptr);

    zigfast_generator* a = zigfast_generator_new_auto();
    CHECK(a != nullptr);
    zigfast_generator_free(a);
}

}
