#pragma once

#include <array>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

#include "zigfast/errors.hpp"

namespace zigfast {

/// Anything that yields 64 uniformly distributed bits per call. The samplers
/// depend on this concept only.
template <typename S>
concept UniformBitSource = requires(S& s) {
    { s.next_u64() } -> std::same_as<std::uint64_t>;
};

enum class GeneratorId : std::uint8_t { Xoshiro256PlusPlus = 1 };

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ (Blackman & Vigna) seeded through SplitMix64, so every
/// 64-bit seed, including 0, gives a valid non-zero state.
///
/// Also models UniformRandomBitGenerator for use with <random>.
class Xoshiro256pp {
  public:
    using result_type = std::uint64_t;
    static constexpr GeneratorId id = GeneratorId::Xoshiro256PlusPlus;

    constexpr explicit Xoshiro256pp(std::uint64_t seed = 0) noexcept { reseed(seed); }

    constexpr void reseed(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            word = splitmix64(sm);
        }
    }

    constexpr std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    constexpr result_type operator()() noexcept { return next_u64(); }
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr bool operator==(const Xoshiro256pp&) const = default;

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

using DefaultSource = Xoshiro256pp;
static_assert(UniformBitSource<DefaultSource>);

struct SplitIndex {
    std::uint32_t index;
    std::uint64_t word;  // unmodified; the multiply uses the full word
};

inline constexpr int kMaxIndexBits = 12;

/// Low `bits` bits of u as an index. Only the bits a double mantissa drops
/// from a 64-bit word may be reused, hence the 12-bit budget.
constexpr SplitIndex split_index(std::uint64_t u, int bits) {
    if (bits < 1 || bits > kMaxIndexBits) {
        throw BitBudgetExceeded("index bits must be in [1, 12]");
    }
    return {static_cast<std::uint32_t>(u & ((std::uint64_t{1} << bits) - 1)), u};
}

/// The top 63 bits of u as a double in [0, 2^63). Signed conversion is a
/// single instruction on x86-64, unlike the unsigned one.
constexpr double high_bits_to_double(std::uint64_t u) noexcept {
    return static_cast<double>(static_cast<std::int64_t>(u >> 1));
}

/// Seed material from wall-clock time, process id and parent process id.
std::uint64_t auto_seed() noexcept;

/// Parses ZIGFAST_SEED if set. Throws std::invalid_argument on a malformed
/// value.
std::optional<std::uint64_t> seed_from_env();

/// Parses a decimal u64; throws std::invalid_argument otherwise.
std::uint64_t parse_seed(std::string_view text);

/// ZIGFAST_SEED when set, otherwise auto_seed().
std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed = std::nullopt);

/// A source seeded by auto_seed(), ignoring the environment.
inline DefaultSource seed_auto() noexcept { return DefaultSource(auto_seed()); }

/// Independent per-shard seed derived from a base seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t shard) noexcept {
    std::uint64_t s = base ^ (0xD1B54A32D192ED03ULL * (shard + 1));
    return splitmix64(s);
}

}  // namespace zigfast
