#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "zigfast/density.hpp"

namespace zigfast {

/// Geometry of a modified ziggurat: layers that lie entirely beneath P.
///
/// Layer k (1..layer_count) is the rectangle [0, x[k]] x [f[k-1], f[k]] with
/// area total_mass / i_max and its upper-right corner on the curve. The
/// remaining mass is split into layer_count + 1 slots; slot j is the box
/// x in [x[j+1], x[j]], y in [f[j], f[j+1]]:
///
///   slot 0            the unbounded tail right of x[1] (x[0] is a sentinel)
///   slot 1..L-1       the overhang right of layer j+1
///   slot L            the cap above the top layer, x in [0, x[L]]
///
/// so `x` and `f` carry layer_count + 2 entries with x[L+1] = 0 and
/// f[L+1] = P(0) = 1.
struct ZigguratTables {
    Distribution distribution = Distribution::Exponential;
    std::uint32_t i_max = 0;
    std::uint32_t layer_count = 0;  // L_max
    std::vector<double> x;
    std::vector<double> f;
    std::vector<double> a;        // slot masses, normalized to sum to 1
    double epsilon_max = 0;       // widest rejection band in box units; 0 when unused

    double tail_start() const { return x.at(1); }
    std::size_t slot_count() const { return a.size(); }

    bool operator==(const ZigguratTables&) const = default;
};

/// Stored in x[0]; never read by the bounded-box paths.
inline constexpr double kTailSentinel = 1.7976931348623157e308;

/// Default absolute tolerance on layer areas.
inline constexpr Real kDefaultLayerTolerance = 1e-15L;

/// Solves the layers bottom-up starting at the origin until no further layer
/// of area total_mass / i_max fits under P. Fills `a` via overhang_areas and,
/// for the exponential, `epsilon_max` via compute_epsilon.
///
/// Throws std::invalid_argument if i_max is not a power of two >= 2 or tol is
/// not positive, InvalidSpec if P is not decreasing, NonConvergence if a root
/// cannot be bracketed or refined to tol.
ZigguratTables solve_layers(const DensitySpec& spec, std::uint32_t i_max,
                            Real tol = kDefaultLayerTolerance);

/// Unnormalized slot masses (see ZigguratTables for the slot layout).
///
/// Closed forms through spec.tail_mass, each confirmed by adaptive
/// Gauss-Kronrod quadrature of P(x) - f[j]; throws QuadratureFailure if the
/// two disagree or the quadrature error estimate exceeds tol relative to the
/// slot area.
std::vector<Real> overhang_areas(const DensitySpec& spec, const ZigguratTables& tables,
                                 Real tol = 1e-12L);

/// Maximum vertical gap between the chord and P inside one box, in unit-box
/// coordinates. The chord joins (x_lo, f_hi) and (x_hi, f_lo).
///
/// Throws CurvatureViolation if the chord dips below P anywhere in the box.
Real box_epsilon(const std::function<Real(Real)>& density, Real x_lo, Real x_hi, Real f_lo,
                 Real f_hi);

/// Largest box_epsilon over slots 1..layer_count.
Real compute_epsilon(const DensitySpec& spec, const ZigguratTables& tables);

/// Human-readable invariant violations; empty when the tables are sound.
/// Checks layer areas, monotone geometry, slot masses against quadrature
/// and mass conservation.
std::vector<std::string> check_tables(const ZigguratTables& tables,
                                      Real area_tol = 1e-13L);

}  // namespace zigfast
