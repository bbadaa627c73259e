#include "zigfast/tables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "zigfast/compensated_sum.hpp"
#include "zigfast/errors.hpp"

namespace zigfast {
namespace {

constexpr int kMaxBisectionSteps = 400;
constexpr int kGoldenSteps = 160;
constexpr Real kInvPhi = 0.6180339887498948482045868343656381177L;

void validate_density(const DensitySpec& spec) {
    if (!spec.density || !spec.tail_mass) {
        throw InvalidSpec("density spec is missing a function");
    }
    if (!(spec.total_mass > 0)) {
        throw InvalidSpec("total mass must be positive");
    }
    if (std::abs(spec.density(0) - 1) > 1e-15L) {
        throw InvalidSpec("density must satisfy P(0) = 1");
    }
    Real prev = spec.density(0);
    for (int k = 1; k <= 800; ++k) {
        const Real x = k / Real{20};
        const Real p = spec.density(x);
        if (!(p >= 0) || (prev > 0 && !(p < prev)) || p > prev) {
            throw InvalidSpec(fmt::format("density is not strictly decreasing near x = {}",
                                          static_cast<double>(x)));
        }
        prev = p;
    }
}

/// Argmax of a unimodal function on [lo, hi].
template <typename F>
Real golden_maximize(F&& fn, Real lo, Real hi) {
    Real a = lo + (1 - kInvPhi) * (hi - lo);
    Real b = lo + kInvPhi * (hi - lo);
    Real fa = fn(a);
    Real fb = fn(b);
    for (int step = 0; step < kGoldenSteps && hi - lo > 0; ++step) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + kInvPhi * (hi - lo);
            fb = fn(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = lo + (1 - kInvPhi) * (hi - lo);
            fa = fn(a);
        }
    }
    return fa < fb ? b : a;
}

bool within_two_ulps(Real lo, Real hi) {
    const Real inf = std::numeric_limits<Real>::infinity();
    return hi <= std::nextafter(std::nextafter(lo, inf), inf);
}

Real slot_area(const DensitySpec& spec, std::uint32_t i_max) {
    return spec.total_mass / static_cast<Real>(i_max);
}

}  // namespace

ZigguratTables solve_layers(const DensitySpec& spec, std::uint32_t i_max, Real tol) {
    if (i_max < 2 || !std::has_single_bit(i_max)) {
        throw std::invalid_argument("i_max must be a power of two >= 2");
    }
    if (!(tol > 0)) {
        throw std::invalid_argument("tolerance must be positive");
    }
    validate_density(spec);

    const Real area = slot_area(spec, i_max);
    std::vector<Real> xs;
    std::vector<Real> fs;
    Real prev_f = 0;
    Real prev_x = std::numeric_limits<Real>::infinity();

    while (true) {
        auto layer_area = [&](Real x) { return x * (spec.density(x) - prev_f); };

        // The bottom layer has no right neighbour, so its search interval is
        // found by doubling until we are past the peak and below the target.
        Real upper = prev_x;
        if (!std::isfinite(upper)) {
            upper = 1;
            int step = 0;
            while (layer_area(upper) >= area || layer_area(2 * upper) > layer_area(upper)) {
                upper *= 2;
                if (++step > 64) {
                    throw NonConvergence("could not bracket the bottom layer");
                }
            }
        }

        const Real peak = golden_maximize(layer_area, 0, upper);
        if (!(layer_area(peak) > area)) {
            break;
        }
        if (xs.size() >= i_max) {
            throw InvalidSpec("more layers than slots; density mass is inconsistent");
        }

        // Right branch: long thin layers.
        Real lo = peak;
        Real hi = upper;
        int step = 0;
        while (!within_two_ulps(lo, hi)) {
            const Real mid = lo + (hi - lo) / 2;
            if (mid <= lo || mid >= hi) {
                break;
            }
            (layer_area(mid) > area ? lo : hi) = mid;
            if (++step > kMaxBisectionSteps) {
                throw NonConvergence("layer bisection did not converge");
            }
        }
        const Real root = lo + (hi - lo) / 2;
        if (std::abs(layer_area(root) - area) > tol) {
            throw NonConvergence(fmt::format("layer {} area misses target by {}", xs.size() + 1,
                                             static_cast<double>(layer_area(root) - area)));
        }
        xs.push_back(root);
        fs.push_back(spec.density(root));
        prev_x = root;
        prev_f = fs.back();
    }

    ZigguratTables tables;
    tables.distribution = spec.kind;
    tables.i_max = i_max;
    tables.layer_count = static_cast<std::uint32_t>(xs.size());
    tables.x.reserve(xs.size() + 2);
    tables.f.reserve(xs.size() + 2);
    tables.x.push_back(kTailSentinel);
    tables.f.push_back(0.0);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        tables.x.push_back(static_cast<double>(xs[k]));
        tables.f.push_back(static_cast<double>(fs[k]));
    }
    tables.x.push_back(0.0);
    tables.f.push_back(static_cast<double>(spec.density(0)));

    const auto masses = overhang_areas(spec, tables);
    CompensatedSum<Real> total;
    for (Real m : masses) {
        total += m;
    }
    tables.a.reserve(masses.size());
    for (Real m : masses) {
        tables.a.push_back(static_cast<double>(m / total.value()));
    }

    if (spec.kind == Distribution::Exponential && tables.layer_count > 0) {
        tables.epsilon_max = static_cast<double>(compute_epsilon(spec, tables));
    }
    return tables;
}

std::vector<Real> overhang_areas(const DensitySpec& spec, const ZigguratTables& tables, Real tol) {
    const std::size_t layers = tables.layer_count;
    if (tables.x.size() != layers + 2 || tables.f.size() != layers + 2) {
        throw std::invalid_argument("tables have inconsistent sizes");
    }
    using Quadrature = boost::math::quadrature::gauss_kronrod<Real, 31>;
    const Real scale = slot_area(spec, tables.i_max);

    std::vector<Real> masses(layers + 1);
    for (std::size_t j = 0; j <= layers; ++j) {
        const Real lo = tables.x[j + 1];
        const Real floor = tables.f[j];
        Real closed = 0;
        Real hi = std::numeric_limits<Real>::infinity();
        if (j == 0) {
            closed = spec.tail_mass(lo);
        } else {
            hi = tables.x[j];
            closed = spec.tail_mass(lo) - spec.tail_mass(hi) - floor * (hi - lo);
        }

        Real error = 0;
        const Real quad = Quadrature::integrate([&](Real t) { return spec.density(t) - floor; }, lo,
                                                hi, 15, tol, &error);
        if (error > tol * scale || std::abs(quad - closed) > tol * scale) {
            throw QuadratureFailure(fmt::format(
                "slot {}: closed form {} vs quadrature {} (error estimate {})", j,
                static_cast<double>(closed), static_cast<double>(quad), static_cast<double>(error)));
        }
        masses[j] = closed;
    }
    return masses;
}

Real box_epsilon(const std::function<Real(Real)>& density, Real x_lo, Real x_hi, Real f_lo,
                 Real f_hi) {
    const Real width = x_hi - x_lo;
    const Real height = f_hi - f_lo;
    if (!(width > 0) || !(height > 0)) {
        throw std::invalid_argument("box must have positive width and height");
    }
    auto gap = [&](Real u) { return (1 - u) - (density(x_lo + u * width) - f_lo) / height; };

    constexpr int kProbes = 256;
    for (int k = 0; k <= kProbes; ++k) {
        const Real u = static_cast<Real>(k) / kProbes;
        if (gap(u) < -1e-12L) {
            throw CurvatureViolation(fmt::format("chord lies below the density at x = {}",
                                                 static_cast<double>(x_lo + u * width)));
        }
    }
    return std::max(gap(golden_maximize(gap, 0, 1)), Real{0});
}

Real compute_epsilon(const DensitySpec& spec, const ZigguratTables& tables) {
    Real widest = 0;
    for (std::size_t j = 1; j <= tables.layer_count; ++j) {
        widest = std::max(widest, box_epsilon(spec.density, tables.x[j + 1], tables.x[j],
                                              tables.f[j], tables.f[j + 1]));
    }
    return widest;
}

std::vector<std::string> check_tables(const ZigguratTables& t, Real area_tol) {
    std::vector<std::string> issues;
    const std::size_t layers = t.layer_count;
    if (t.i_max < 2 || !std::has_single_bit(t.i_max)) {
        issues.push_back("i_max is not a power of two >= 2");
    }
    if (layers >= t.i_max) {
        issues.push_back("layer_count must be below i_max");
    }
    if (t.x.size() != layers + 2 || t.f.size() != layers + 2 || t.a.size() != layers + 1) {
        issues.push_back("array sizes do not match layer_count");
        return issues;
    }

    const DensitySpec spec = DensitySpec::of(t.distribution);
    const Real area = slot_area(spec, t.i_max);

    if (t.x[0] != kTailSentinel || t.f[0] != 0.0) {
        issues.push_back("slot 0 sentinel is wrong");
    }
    if (t.x[layers + 1] != 0.0 || t.f[layers + 1] != 1.0) {
        issues.push_back("cap corner is not (0, P(0))");
    }
    for (std::size_t k = 1; k <= layers; ++k) {
        if (!(t.x[k + 1] < t.x[k])) {
            issues.push_back(fmt::format("x is not strictly decreasing at {}", k));
        }
        if (!(t.f[k] > t.f[k - 1])) {
            issues.push_back(fmt::format("f is not strictly increasing at {}", k));
        }
        // x[k] is itself rounded, so allow P's change across one ulp of x.
        const Real p = spec.density(t.x[k]);
        const Real slack = std::abs(spec.density(std::nextafter(t.x[k], 0.0)) - p);
        if (std::abs(p - t.f[k]) > 4 * std::numeric_limits<double>::epsilon() * p + slack) {
            issues.push_back(fmt::format("f[{}] is not P(x[{}])", k, k));
        }
        const Real got = static_cast<Real>(t.x[k]) * (static_cast<Real>(t.f[k]) - t.f[k - 1]);
        if (std::abs(got - area) > area_tol) {
            issues.push_back(fmt::format("layer {} area off by {}", k,
                                         static_cast<double>(got - area)));
        }
    }
    if (layers > 0 && !(t.f[layers] < t.f[layers + 1])) {
        issues.push_back("top layer reaches P(0)");
    }

    std::vector<Real> masses;
    try {
        masses = overhang_areas(spec, t);
    } catch (const Error& e) {
        issues.emplace_back(e.what());
        return issues;
    }
    CompensatedSum<Real> overhang;
    for (Real m : masses) {
        if (!(m > 0)) {
            issues.push_back("non-positive slot mass");
        }
        overhang += m;
    }
    const Real whole = overhang.value() + static_cast<Real>(layers) * area;
    if (std::abs(whole / spec.total_mass - 1) > 1e-12L) {
        issues.push_back(fmt::format("mass is not conserved: relative error {}",
                                     static_cast<double>(whole / spec.total_mass - 1)));
    }
    for (std::size_t j = 0; j <= layers; ++j) {
        const Real expected = masses[j] / overhang.value();
        if (std::abs(t.a[j] - expected) > 1e-13L * expected + 1e-18L) {
            issues.push_back(fmt::format("a[{}] does not match its quadrature mass", j));
        }
    }

    if (t.distribution == Distribution::Exponential && layers > 0) {
        if (!(t.epsilon_max > 0 && t.epsilon_max < 1)) {
            issues.push_back("epsilon_max outside (0, 1)");
        } else if (std::abs(compute_epsilon(spec, t) - t.epsilon_max) > 1e-12L) {
            issues.push_back("epsilon_max does not match the numeric maximum");
        }
    }
    return issues;
}

}  // namespace zigfast
