#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace zigfast {

enum class Path : std::uint8_t {
    LayerDraw,    // a word drawn to pick a layer
    Common,       // returned straight from a layer
    SlotDraw,     // overhang/tail slot drawn from the alias table
    Immediate,    // overhang point accepted without evaluating P
    BandTest,     // P evaluated for an overhang point
    Reject,       // overhang point rejected
    Tail,         // tail slot entered
    TailAttempt,  // one round of the normal tail transform
};

inline constexpr std::size_t kPathCount = 8;

std::string_view to_string(Path p) noexcept;

/// Default counter policy; compiles away entirely.
struct NoCounters {
    static constexpr bool enabled = false;
    constexpr void hit(Path) noexcept {}
};

struct PathCounters {
    static constexpr bool enabled = true;

    std::array<std::uint64_t, kPathCount> hits{};

    void hit(Path p) noexcept { ++hits[static_cast<std::size_t>(p)]; }
    std::uint64_t operator[](Path p) const noexcept { return hits[static_cast<std::size_t>(p)]; }
    void reset() noexcept { hits.fill(0); }
    void merge(const PathCounters& other) noexcept {
        for (std::size_t k = 0; k < kPathCount; ++k) {
            hits[k] += other.hits[k];
        }
    }
};

}  // namespace zigfast
