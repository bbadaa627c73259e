#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "zigfast/alias_table.hpp"
#include "zigfast/tables.hpp"

namespace zigfast {

/// ZigguratTables plus everything the samplers read on their hot paths,
/// pre-multiplied so that a raw 64-bit word can be used as the uniform.
struct SamplerTables {
    ZigguratTables geometry;
    AliasTable slots;  // over geometry.a

    std::uint32_t layer_count = 0;
    int index_bits = 0;
    std::uint64_t index_mask = 0;  // low index_bits set, as split_index
    double tail_start = 0;

    /// layer_x[i] = x[i + 1] * 2^-63. The exponential multiplies it by the
    /// top 63 bits of the word, the normal by the word read as signed.
    std::vector<double> layer_x;
    double word_scale = 0;

    /// Slot j box, scaled by 2^-63 for the top 63 bits of a word:
    /// x = box_x0 + u * box_dx, y = box_f0 + u * box_df.
    std::vector<double> box_x0;
    std::vector<double> box_dx;
    std::vector<double> box_f0;
    std::vector<double> box_df;

    /// epsilon_max in 2^-64 units, rounded outward.
    std::uint64_t band_width = 0;
};

/// Throws std::invalid_argument for tables a sampler cannot use: no full
/// layer, i_max above 2^12, or a missing epsilon for the exponential.
std::shared_ptr<const SamplerTables> prepare_tables(ZigguratTables tables);

/// Built once on first use with i_max = 256.
std::shared_ptr<const SamplerTables> default_exp_tables();
std::shared_ptr<const SamplerTables> default_normal_tables();

}  // namespace zigfast
