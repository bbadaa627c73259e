#pragma once

#include <functional>
#include <string_view>

namespace zigfast {

/// Working precision for table construction. Tables are rounded to double
/// once construction finishes.
using Real = long double;

enum class Distribution { Exponential, HalfNormal };

std::string_view to_string(Distribution d) noexcept;

/// Accepts "exp", "exponential", "normal", "half_normal" and "halfnormal".
/// Throws std::invalid_argument otherwise.
Distribution parse_distribution(std::string_view name);

/// A monotone decreasing density on [0, inf) with P(0) = 1.
///
/// The density does not have to be normalized; `total_mass` carries the
/// integral so that layer areas can be expressed as total_mass / i_max.
struct DensitySpec {
    Distribution kind = Distribution::Exponential;
    std::function<Real(Real)> density;          // P(x)
    std::function<Real(Real)> inverse_density;  // x such that P(x) = y, y in (0, 1]
    std::function<Real(Real)> tail_mass;        // integral of P over [x, inf)
    Real total_mass = 1;

    /// P(x) = exp(-x), total mass 1.
    static DensitySpec exponential();
    /// P(x) = exp(-x^2/2), total mass sqrt(pi/2).
    static DensitySpec half_normal();
    static DensitySpec of(Distribution d);
};

}  // namespace zigfast
