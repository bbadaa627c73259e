#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>

#include "zigfast/path_counters.hpp"
#include "zigfast/sampler_tables.hpp"
#include "zigfast/uniform_source.hpp"

namespace zigfast {
namespace detail {

template <UniformBitSource Source, typename Counters>
[[gnu::noinline, gnu::cold]] double exp_exceptional(const SamplerTables& t, Source& src,
                                                    Counters& counters);

/// One exponential variate. The low index bits of the word pick a layer and
/// the whole word, times a pre-scaled layer length, is the result.
template <UniformBitSource Source, typename Counters>
inline double exp_variate(const SamplerTables& t, Source& src, Counters& counters) {
    const std::uint64_t u = src.next_u64();
    counters.hit(Path::LayerDraw);
    const std::uint64_t i = u & t.index_mask;
    if (i < t.layer_count) [[likely]] {
        counters.hit(Path::Common);
        return high_bits_to_double(u) * t.layer_x[i];
    }
    // A copy keeps src from escaping, so its state can live in registers.
    Source local = src;
    const double x = exp_exceptional(t, local, counters);
    src = local;
    return x;
}

/// Rejection step inside bounded slot j, in unit-box coordinates (ux, uy)
/// scaled by 2^64. The chord runs from (0, 1) to (1, 0) and e^-x lies below
/// it, so points above the chord are reflected across it. Points further
/// than epsilon below the chord are accepted without evaluating e^-x.
template <UniformBitSource Source, typename Counters>
inline std::optional<double> exp_overhang(const SamplerTables& t, std::size_t j, Source& src,
                                          Counters& counters) {
    std::uint64_t ux = src.next_u64();
    std::uint64_t uy = src.next_u64();
    if (uy > ~ux) {
        const std::uint64_t reflected_x = ~uy;
        uy = ~ux;
        ux = reflected_x;
    }
    const double x = t.box_x0[j] + high_bits_to_double(ux) * t.box_dx[j];
    if (~ux - uy > t.band_width) {
        counters.hit(Path::Immediate);
        assert(t.box_f0[j] + high_bits_to_double(uy) * t.box_df[j] < std::exp(-x));
        return x;
    }
    counters.hit(Path::BandTest);
    const double y = t.box_f0[j] + high_bits_to_double(uy) * t.box_df[j];
    if (y < std::exp(-x)) {
        return x;
    }
    counters.hit(Path::Reject);
    return std::nullopt;
}

/// Rejection in box j until a point is accepted. The box is kept: drawing a
/// new slot after a rejection would weight slots by their acceptance rate.
template <UniformBitSource Source, typename Counters>
double exp_box(const SamplerTables& t, std::size_t j, Source& src, Counters& counters) {
    if (const auto x = exp_overhang(t, j, src, counters)) {
        return *x;
    }
    return exp_box(t, j, src, counters);
}

/// Slot draw; the tail slot restarts the whole sampler shifted by the tail
/// start (the exponential is memoryless). Both branches are tail calls.
template <UniformBitSource Source, typename Counters>
[[gnu::noinline, gnu::cold]] double exp_exceptional(const SamplerTables& t, Source& src,
                                                    Counters& counters) {
    counters.hit(Path::SlotDraw);
    const std::size_t j = t.slots.sample(src.next_u64());
    if (j == 0) {
        counters.hit(Path::Tail);
        return t.tail_start + exp_variate(t, src, counters);
    }
    return exp_box(t, j, src, counters);
}

}  // namespace detail

/// Exponential(1) variates from the modified ziggurat.
///
/// Owns its uniform source, so one instance per thread. The tables are shared
/// and immutable.
template <UniformBitSource Source = DefaultSource, typename Counters = NoCounters>
class BasicExpSampler {
  public:
    explicit BasicExpSampler(Source source,
                             std::shared_ptr<const SamplerTables> tables = default_exp_tables())
        : tables_(std::move(tables)), source_(std::move(source)) {
        if (!tables_ || tables_->geometry.distribution != Distribution::Exponential) {
            throw std::invalid_argument("BasicExpSampler needs exponential tables");
        }
    }

    explicit BasicExpSampler(std::uint64_t seed)
        requires std::constructible_from<Source, std::uint64_t>
        : BasicExpSampler(Source(seed)) {}

    double operator()() { return detail::exp_variate(*tables_, source_, counters_); }

    void fill(std::span<double> out) {
        const SamplerTables& t = *tables_;
        for (double& v : out) {
            v = detail::exp_variate(t, source_, counters_);
        }
    }

    /// The path taken when the layer index falls outside the full layers.
    double sample_exceptional() { return detail::exp_exceptional(*tables_, source_, counters_); }

    /// One rejection round in bounded slot j (1..layer_count).
    std::optional<double> overhang_sample(std::size_t j) {
        if (j == 0 || j > tables_->layer_count) {
            throw std::out_of_range("overhang slot must be in [1, layer_count]");
        }
        return detail::exp_overhang(*tables_, j, source_, counters_);
    }

    double tail_sample() { return tables_->tail_start + (*this)(); }

    const SamplerTables& tables() const noexcept { return *tables_; }
    Source& source() noexcept { return source_; }
    const Source& source() const noexcept { return source_; }
    Counters& counters() noexcept { return counters_; }
    const Counters& counters() const noexcept { return counters_; }

  private:
    std::shared_ptr<const SamplerTables> tables_;
    Source source_;
    [[no_unique_address]] Counters counters_{};
};

using ExpSampler = BasicExpSampler<>;
using CountingExpSampler = BasicExpSampler<DefaultSource, PathCounters>;

}  // namespace zigfast
