#include "zigfast/sampler_tables.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "zigfast/path_counters.hpp"
#include "zigfast/uniform_source.hpp"

namespace zigfast {
namespace {

constexpr double kTwoPow64 = 18446744073709551616.0;
constexpr double kTwoPowMinus63 = 2.0 / kTwoPow64;

// Slack on the always-accept band. It covers rounding in x = x0 + u * dx,
// which is far below 1e-10 of a box height for every box we build.
constexpr double kBandSlack = 1e-10;

}  // namespace

std::string_view to_string(Path p) noexcept {
    switch (p) {
        case Path::LayerDraw:
            return "layer_draw";
        case Path::Common:
            return "common";
        case Path::SlotDraw:
            return "slot_draw";
        case Path::Immediate:
            return "overhang_immediate";
        case Path::BandTest:
            return "band_test";
        case Path::Reject:
            return "reject";
        case Path::Tail:
            return "tail";
        case Path::TailAttempt:
            return "tail_attempt";
    }
    return "unknown";
}

std::shared_ptr<const SamplerTables> prepare_tables(ZigguratTables tables) {
    const std::uint32_t layers = tables.layer_count;
    if (layers == 0) {
        throw std::invalid_argument("tables have no full layer; a sampler needs layer_count >= 1");
    }
    if (!std::has_single_bit(tables.i_max) || tables.i_max > (1u << kMaxIndexBits)) {
        throw std::invalid_argument("sampler tables need a power-of-two i_max <= 4096");
    }
    if (tables.x.size() != layers + 2 || tables.f.size() != layers + 2 ||
        tables.a.size() != layers + 1) {
        throw std::invalid_argument("tables have inconsistent sizes");
    }
    const bool exponential = tables.distribution == Distribution::Exponential;
    if (exponential && !(tables.epsilon_max > 0 && tables.epsilon_max < 1)) {
        throw std::invalid_argument("exponential tables need 0 < epsilon_max < 1");
    }

    auto out = std::make_shared<SamplerTables>();
    out->slots = build_alias(tables.a);
    out->layer_count = layers;
    out->index_bits = std::countr_zero(tables.i_max);
    out->index_mask = tables.i_max - 1;
    out->tail_start = tables.x[1];
    out->word_scale = kTwoPowMinus63;

    out->layer_x.resize(layers);
    for (std::uint32_t i = 0; i < layers; ++i) {
        out->layer_x[i] = tables.x[i + 1] * out->word_scale;
    }

    out->box_x0.assign(layers + 1, 0.0);
    out->box_dx.assign(layers + 1, 0.0);
    out->box_f0.assign(layers + 1, 0.0);
    out->box_df.assign(layers + 1, 0.0);
    for (std::uint32_t j = 1; j <= layers; ++j) {
        out->box_x0[j] = tables.x[j + 1];
        out->box_dx[j] = (tables.x[j] - tables.x[j + 1]) * kTwoPowMinus63;
        out->box_f0[j] = tables.f[j];
        out->box_df[j] = (tables.f[j + 1] - tables.f[j]) * kTwoPowMinus63;
    }

    if (exponential) {
        const double band = std::ceil((tables.epsilon_max + kBandSlack) * kTwoPow64);
        out->band_width = band >= kTwoPow64 ? ~std::uint64_t{0} : static_cast<std::uint64_t>(band);
    }
    out->geometry = std::move(tables);
    return out;
}

std::shared_ptr<const SamplerTables> default_exp_tables() {
    static const auto tables = prepare_tables(solve_layers(DensitySpec::exponential(), 256));
    return tables;
}

std::shared_ptr<const SamplerTables> default_normal_tables() {
    static const auto tables = prepare_tables(solve_layers(DensitySpec::half_normal(), 256));
    return tables;
}

}  // namespace zigfast
