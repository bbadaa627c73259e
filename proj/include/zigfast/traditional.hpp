#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "zigfast/density.hpp"
#include "zigfast/path_counters.hpp"
#include "zigfast/uniform_source.hpp"

namespace zigfast {

/// Traditional (covering) ziggurat in the Marsaglia-Tsang layout.
///
/// Index 0 is the base strip [0, r] x [0, P(r)] plus the tail, presented as a
/// box of pseudo-width x[0] = v / P(r). Layer i >= 1 is [0, x[i]] x [f[i], f[i-1]]
/// with its lower-right corner on P; x[i_max - 1] = r and x[1] is the
/// narrowest layer, under f[0] = P(0). Every box has area v.
struct TraditionalTables {
    Distribution distribution = Distribution::Exponential;
    std::uint32_t i_max = 0;
    double base_abscissa = 0;  // r
    double layer_area = 0;     // v
    std::vector<double> x;
    std::vector<double> f;
    /// Fraction of box i that lies under P for every y: k[0] = r / x[0],
    /// k[1] = 0 (nothing is left of x = 0), k[i] = x[i-1] / x[i].
    std::vector<double> k;

    // Hot-path copies scaled by 2^-63: the exponential multiplies the top 63
    // bits of the word, the normal the word read as signed.
    std::uint64_t index_mask = 0;
    std::vector<double> scaled_x;
    std::vector<std::uint64_t> accept_below;  // k[i] in word units
    std::vector<double> scaled_df;            // (f[i-1] - f[i]) * 2^-63
};

/// Bisection on r so that i_max equal-area boxes stack exactly to P(0).
/// Throws NonConvergence if r cannot be bracketed or the top box misses v by
/// more than tol.
TraditionalTables solve_traditional(const DensitySpec& spec, std::uint32_t i_max,
                                    Real tol = 1e-12L);

/// i_max = 256, built on first use.
std::shared_ptr<const TraditionalTables> default_traditional_tables(Distribution d);

namespace detail {

inline constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;

/// Uniform on (0, 1], safe for log().
template <UniformBitSource Source>
inline double open_uniform(Source& src) {
    return static_cast<double>((src.next_u64() >> 11) + 1) * kTwoPowMinus53;
}

template <UniformBitSource Source, typename Counters>
double traditional_exp(const TraditionalTables& t, Source& src, Counters& counters) {
    // The tail restarts the sampler shifted by r; a running offset instead of
    // recursion keeps the whole sampler inlinable.
    double offset = 0;
    while (true) {
        const std::uint64_t u = src.next_u64();
        counters.hit(Path::LayerDraw);
        const std::uint64_t i = u & t.index_mask;
        const double x = high_bits_to_double(u) * t.scaled_x[i];
        if (u < t.accept_below[i]) [[likely]] {
            counters.hit(Path::Common);
            return offset + x;
        }
        if (i == 0) {
            counters.hit(Path::Tail);
            offset += t.base_abscissa;
            continue;
        }
        counters.hit(Path::BandTest);
        const double y = t.f[i] + high_bits_to_double(src.next_u64()) * t.scaled_df[i];
        if (y < std::exp(-x)) {
            return offset + x;
        }
        counters.hit(Path::Reject);
    }
}

template <UniformBitSource Source, typename Counters>
double traditional_normal(const TraditionalTables& t, Source& src, Counters& counters) {
    while (true) {
        const std::uint64_t u = src.next_u64();
        counters.hit(Path::LayerDraw);
        const std::uint64_t i = u & t.index_mask;
        const auto s = static_cast<std::int64_t>(u);
        const std::uint64_t magnitude = s < 0 ? ~u + 1 : u;
        const double x = static_cast<double>(s) * t.scaled_x[i];
        if (magnitude < t.accept_below[i]) [[likely]] {
            counters.hit(Path::Common);
            return x;
        }
        if (i == 0) {
            counters.hit(Path::Tail);
            const double r = t.base_abscissa;
            double dx = 0;
            double e = 0;
            do {
                counters.hit(Path::TailAttempt);
                dx = -std::log(open_uniform(src)) / r;
                e = -std::log(open_uniform(src));
            } while (e + e < dx * dx);
            return s < 0 ? -(r + dx) : r + dx;
        }
        counters.hit(Path::BandTest);
        const double y = t.f[i] + high_bits_to_double(src.next_u64()) * t.scaled_df[i];
        if (y < std::exp(-0.5 * x * x)) {
            return x;
        }
        counters.hit(Path::Reject);
    }
}

}  // namespace detail

template <UniformBitSource Source = DefaultSource, typename Counters = NoCounters>
class BasicTraditionalExpSampler {
  public:
    explicit BasicTraditionalExpSampler(
        Source source, std::shared_ptr<const TraditionalTables> tables =
                           default_traditional_tables(Distribution::Exponential))
        : tables_(std::move(tables)), source_(std::move(source)) {
        if (!tables_ || tables_->distribution != Distribution::Exponential) {
            throw std::invalid_argument("traditional exponential sampler needs exponential tables");
        }
    }

    explicit BasicTraditionalExpSampler(std::uint64_t seed)
        requires std::constructible_from<Source, std::uint64_t>
        : BasicTraditionalExpSampler(Source(seed)) {}

    double operator()() { return detail::traditional_exp(*tables_, source_, counters_); }

    void fill(std::span<double> out) {
        for (double& v : out) {
            v = detail::traditional_exp(*tables_, source_, counters_);
        }
    }

    const TraditionalTables& tables() const noexcept { return *tables_; }
    Counters& counters() noexcept { return counters_; }
    const Counters& counters() const noexcept { return counters_; }

  private:
    std::shared_ptr<const TraditionalTables> tables_;
    Source source_;
    [[no_unique_address]] Counters counters_{};
};

template <UniformBitSource Source = DefaultSource, typename Counters = NoCounters>
class BasicTraditionalNormalSampler {
  public:
    explicit BasicTraditionalNormalSampler(
        Source source, std::shared_ptr<const TraditionalTables> tables =
                           default_traditional_tables(Distribution::HalfNormal))
        : tables_(std::move(tables)), source_(std::move(source)) {
        if (!tables_ || tables_->distribution != Distribution::HalfNormal) {
            throw std::invalid_argument("traditional normal sampler needs half-normal tables");
        }
    }

    explicit BasicTraditionalNormalSampler(std::uint64_t seed)
        requires std::constructible_from<Source, std::uint64_t>
        : BasicTraditionalNormalSampler(Source(seed)) {}

    double operator()() { return detail::traditional_normal(*tables_, source_, counters_); }

    void fill(std::span<double> out) {
        for (double& v : out) {
            v = detail::traditional_normal(*tables_, source_, counters_);
        }
    }

    const TraditionalTables& tables() const noexcept { return *tables_; }
    Counters& counters() noexcept { return counters_; }
    const Counters& counters() const noexcept { return counters_; }

  private:
    std::shared_ptr<const TraditionalTables> tables_;
    Source source_;
    [[no_unique_address]] Counters counters_{};
};

using TraditionalExpSampler = BasicTraditionalExpSampler<>;
using TraditionalNormalSampler = BasicTraditionalNormalSampler<>;
using CountingTraditionalExpSampler = BasicTraditionalExpSampler<DefaultSource, PathCounters>;
using CountingTraditionalNormalSampler = BasicTraditionalNormalSampler<DefaultSource, PathCounters>;

}  // namespace zigfast
