#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>

#include "zigfast/exp_sampler.hpp"
#include "zigfast/path_counters.hpp"
#include "zigfast/sampler_tables.hpp"
#include "zigfast/uniform_source.hpp"

namespace zigfast {
namespace detail {

/// Plain rejection in bounded slot j of the half-normal: the density changes
/// curvature at x = 1, so there is no always-accept band.
template <UniformBitSource Source, typename Counters>
inline std::optional<double> normal_overhang(const SamplerTables& t, std::size_t j, Source& src,
                                             Counters& counters) {
    const double x = t.box_x0[j] + high_bits_to_double(src.next_u64()) * t.box_dx[j];
    const double y = t.box_f0[j] + high_bits_to_double(src.next_u64()) * t.box_df[j];
    counters.hit(Path::BandTest);
    if (y < std::exp(-0.5 * x * x)) {
        return x;
    }
    counters.hit(Path::Reject);
    return std::nullopt;
}

/// Normal tail beyond r from two unit exponentials: x = e1 / r is accepted
/// when 2 e2 > x^2, giving r + x.
template <UniformBitSource Source, typename Counters>
inline double normal_tail(double r, const SamplerTables& exp_tables, Source& src,
                          Counters& counters) {
    NoCounters quiet;
    while (true) {
        counters.hit(Path::TailAttempt);
        const double x = exp_variate(exp_tables, src, quiet) / r;
        const double e = exp_variate(exp_tables, src, quiet);
        if (e + e > x * x) {
            return r + x;
        }
    }
}

/// |z| for the exceptional case; the caller applies the sign. Rejection
/// retries the same box. Kept out of line so the fast path can hold the
/// generator state in registers.
template <UniformBitSource Source, typename Counters>
[[gnu::noinline, gnu::cold]] double normal_exceptional(const SamplerTables& t,
                                                       const SamplerTables& exp_tables,
                                                       Source& src, Counters& counters) {
    counters.hit(Path::SlotDraw);
    const std::size_t j = t.slots.sample(src.next_u64());
    if (j == 0) {
        counters.hit(Path::Tail);
        return normal_tail(t.tail_start, exp_tables, src, counters);
    }
    std::optional<double> x;
    do {
        x = normal_overhang(t, j, src, counters);
    } while (!x);
    return *x;
}

/// The word is read as a signed integer: its low bits pick the layer and the
/// signed value, times the pre-scaled layer length, is the result.
template <UniformBitSource Source, typename Counters>
inline double normal_variate(const SamplerTables& t, const SamplerTables& exp_tables, Source& src,
                             Counters& counters) {
    const std::uint64_t u = src.next_u64();
    counters.hit(Path::LayerDraw);
    const std::uint64_t i = u & t.index_mask;
    const auto s = static_cast<std::int64_t>(u);
    if (i < t.layer_count) [[likely]] {
        counters.hit(Path::Common);
        return static_cast<double>(s) * t.layer_x[i];
    }
    // Hand the rare path a copy so that src never escapes and its state can
    // stay in registers across the fast path.
    Source local = src;
    const double magnitude = normal_exceptional(t, exp_tables, local, counters);
    src = local;
    return s < 0 ? -magnitude : magnitude;
}

}  // namespace detail

/// Standard normal variates from the modified ziggurat on the half-normal
/// density, with the sign taken from the same word.
template <UniformBitSource Source = DefaultSource, typename Counters = NoCounters>
class BasicNormalSampler {
  public:
    explicit BasicNormalSampler(
        Source source, std::shared_ptr<const SamplerTables> tables = default_normal_tables(),
        std::shared_ptr<const SamplerTables> exp_tables = default_exp_tables())
        : tables_(std::move(tables)), exp_tables_(std::move(exp_tables)),
          source_(std::move(source)) {
        if (!tables_ || tables_->geometry.distribution != Distribution::HalfNormal) {
            throw std::invalid_argument("BasicNormalSampler needs half-normal tables");
        }
        if (!exp_tables_ || exp_tables_->geometry.distribution != Distribution::Exponential) {
            throw std::invalid_argument("BasicNormalSampler needs exponential tables for the tail");
        }
    }

    explicit BasicNormalSampler(std::uint64_t seed)
        requires std::constructible_from<Source, std::uint64_t>
        : BasicNormalSampler(Source(seed)) {}

    double operator()() {
        return detail::normal_variate(*tables_, *exp_tables_, source_, counters_);
    }

    void fill(std::span<double> out) {
        const SamplerTables& t = *tables_;
        const SamplerTables& e = *exp_tables_;
        for (double& v : out) {
            v = detail::normal_variate(t, e, source_, counters_);
        }
    }

    /// One rejection round in bounded slot j (1..layer_count); positive x.
    std::optional<double> overhang_sample(std::size_t j) {
        if (j == 0 || j > tables_->layer_count) {
            throw std::out_of_range("overhang slot must be in [1, layer_count]");
        }
        return detail::normal_overhang(*tables_, j, source_, counters_);
    }

    /// Positive draw from the tail beyond tail_start().
    double tail_sample() {
        return detail::normal_tail(tables_->tail_start, *exp_tables_, source_, counters_);
    }

    double tail_start() const noexcept { return tables_->tail_start; }
    const SamplerTables& tables() const noexcept { return *tables_; }
    Source& source() noexcept { return source_; }
    const Source& source() const noexcept { return source_; }
    Counters& counters() noexcept { return counters_; }
    const Counters& counters() const noexcept { return counters_; }

  private:
    std::shared_ptr<const SamplerTables> tables_;
    std::shared_ptr<const SamplerTables> exp_tables_;
    Source source_;
    [[no_unique_address]] Counters counters_{};
};

using NormalSampler = BasicNormalSampler<>;
using CountingNormalSampler = BasicNormalSampler<DefaultSource, PathCounters>;

}  // namespace zigfast
