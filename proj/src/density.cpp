#include "zigfast/density.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace zigfast {

std::string_view to_string(Distribution d) noexcept {
    switch (d) {
        case Distribution::Exponential:
            return "exponential";
        case Distribution::HalfNormal:
            return "half_normal";
    }
    return "unknown";
}

Distribution parse_distribution(std::string_view name) {
    if (name == "exp" || name == "exponential") {
        return Distribution::Exponential;
    }
    if (name == "normal" || name == "half_normal" || name == "halfnormal") {
        return Distribution::HalfNormal;
    }
    throw std::invalid_argument("unknown distribution: " + std::string(name));
}

DensitySpec DensitySpec::exponential() {
    DensitySpec spec;
    spec.kind = Distribution::Exponential;
    spec.density = [](Real x) { return std::exp(-x); };
    spec.inverse_density = [](Real y) { return -std::log(y); };
    spec.tail_mass = [](Real x) { return std::exp(-x); };
    spec.total_mass = 1;
    return spec;
}

DensitySpec DensitySpec::half_normal() {
    constexpr Real kSqrtHalfPi = 1.2533141373155002512078826424055226265L;  // sqrt(pi/2)
    DensitySpec spec;
    spec.kind = Distribution::HalfNormal;
    spec.density = [](Real x) { return std::exp(-x * x / 2); };
    spec.inverse_density = [](Real y) { return std::sqrt(-2 * std::log(y)); };
    spec.tail_mass = [](Real x) { return kSqrtHalfPi * std::erfc(x / std::numbers::sqrt2_v<Real>); };
    spec.total_mass = kSqrtHalfPi;
    return spec;
}

DensitySpec DensitySpec::of(Distribution d) {
    return d == Distribution::Exponential ? exponential() : half_normal();
}

}  // namespace zigfast
