#include "zigfast/traditional.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "zigfast/errors.hpp"

namespace zigfast {
namespace {

/// Widths x[1..n-1] from the bottom up for a given r, or nullopt when the
/// stack overshoots P(0) before all layers are placed (r is too small).
struct Chain {
    Real area = 0;
    std::vector<Real> widths;  // widths[i] = x[i] for i >= 1; widths[0] unused
    Real top_residual = 0;     // top box area minus v
};

std::optional<Chain> stack_layers(const DensitySpec& spec, std::uint32_t n, Real r) {
    Chain chain;
    chain.area = r * spec.density(r) + spec.tail_mass(r);
    chain.widths.assign(n, 0);
    chain.widths[n - 1] = r;
    for (std::uint32_t i = n - 1; i >= 2; --i) {
        const Real x = chain.widths[i];
        const Real y = spec.density(x) + chain.area / x;
        if (!(y < 1)) {
            return std::nullopt;
        }
        chain.widths[i - 1] = spec.inverse_density(y);
    }
    const Real top = chain.widths[1];
    chain.top_residual = top * (1 - spec.density(top)) - chain.area;
    return chain;
}

/// True when r is too small: the layers overshoot the peak.
bool overshoots(const DensitySpec& spec, std::uint32_t n, Real r) {
    const auto chain = stack_layers(spec, n, r);
    return !chain || chain->top_residual < 0;
}

}  // namespace

TraditionalTables solve_traditional(const DensitySpec& spec, std::uint32_t i_max, Real tol) {
    if (i_max < 4 || !std::has_single_bit(i_max)) {
        throw std::invalid_argument("i_max must be a power of two >= 4");
    }
    if (!spec.inverse_density) {
        throw InvalidSpec("traditional construction needs the inverse density");
    }

    Real hi = 1;
    int expansions = 0;
    while (overshoots(spec, i_max, hi)) {
        hi *= 2;
        if (++expansions > 16) {
            throw NonConvergence("could not bracket the base abscissa");
        }
    }
    Real lo = hi / 2;
    while (!overshoots(spec, i_max, lo)) {
        lo /= 2;
        if (++expansions > 64) {
            throw NonConvergence("could not bracket the base abscissa");
        }
    }
    for (int step = 0; step < 400; ++step) {
        const Real mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) {
            break;
        }
        (overshoots(spec, i_max, mid) ? lo : hi) = mid;
    }

    const auto chain = stack_layers(spec, i_max, hi);
    if (!chain || std::abs(chain->top_residual) > tol) {
        throw NonConvergence(fmt::format("top box misses the layer area by {}",
                                         chain ? static_cast<double>(chain->top_residual) : 1.0));
    }

    const Real r = hi;
    const Real v = chain->area;
    const Real pseudo_width = v / spec.density(r);

    TraditionalTables t;
    t.distribution = spec.kind;
    t.i_max = i_max;
    t.base_abscissa = static_cast<double>(r);
    t.layer_area = static_cast<double>(v);
    t.x.resize(i_max);
    t.f.resize(i_max);
    t.k.resize(i_max);
    t.x[0] = static_cast<double>(pseudo_width);
    t.f[0] = static_cast<double>(spec.density(0));
    t.k[0] = static_cast<double>(r / pseudo_width);
    for (std::uint32_t i = 1; i < i_max; ++i) {
        t.x[i] = static_cast<double>(chain->widths[i]);
        t.f[i] = static_cast<double>(spec.density(chain->widths[i]));
        t.k[i] = i == 1 ? 0.0 : static_cast<double>(chain->widths[i - 1] / chain->widths[i]);
    }

    // accept_below compares the raw word (exponential) or its magnitude
    // (normal); both x and y use the 2^-63 scale.
    const bool exponential = spec.kind == Distribution::Exponential;
    const long double word = exponential ? 18446744073709551616.0L : 9223372036854775808.0L;
    constexpr double kTwoPowMinus63 = 1.0 / 9223372036854775808.0;
    t.index_mask = i_max - 1;
    t.scaled_x.resize(i_max);
    t.accept_below.resize(i_max);
    t.scaled_df.assign(i_max, 0.0);
    for (std::uint32_t i = 0; i < i_max; ++i) {
        t.scaled_x[i] = t.x[i] * kTwoPowMinus63;
        t.accept_below[i] = static_cast<std::uint64_t>(static_cast<long double>(t.k[i]) * word);
        if (i > 0) {
            t.scaled_df[i] = (t.f[i - 1] - t.f[i]) * kTwoPowMinus63;
        }
    }
    return t;
}

std::shared_ptr<const TraditionalTables> default_traditional_tables(Distribution d) {
    static const auto exp_tables = std::make_shared<const TraditionalTables>(
        solve_traditional(DensitySpec::exponential(), 256));
    static const auto normal_tables = std::make_shared<const TraditionalTables>(
        solve_traditional(DensitySpec::half_normal(), 256));
    return d == Distribution::Exponential ? exp_tables : normal_tables;
}

}  // namespace zigfast
