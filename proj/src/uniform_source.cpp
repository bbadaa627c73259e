#include "zigfast/uniform_source.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <stdexcept>
#include <string>

#if defined(__unix__) || defined(__APPLE__)
#include <unistd.h>
#endif

namespace zigfast {
namespace {

std::uint64_t mix(std::uint64_t acc, std::uint64_t value) noexcept {
    std::uint64_t s = acc ^ value;
    return splitmix64(s);
}

}  // namespace

std::uint64_t auto_seed() noexcept {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    const auto nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(now).count();
    const auto ticks = std::chrono::steady_clock::now().time_since_epoch().count();

    std::uint64_t pid = 0x5A17;
    std::uint64_t ppid = 0xC0FFEE;  // fallback where there is no parent pid
#if defined(__unix__) || defined(__APPLE__)
    pid = static_cast<std::uint64_t>(::getpid());
    ppid = static_cast<std::uint64_t>(::getppid());
#endif
    std::uint64_t seed = mix(0, static_cast<std::uint64_t>(nanos));
    seed = mix(seed, static_cast<std::uint64_t>(ticks));
    seed = mix(seed, pid);
    seed = mix(seed, ppid << 32 | ppid >> 32);
    return seed;
}

std::uint64_t parse_seed(std::string_view text) {
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value, 10);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("seed must be a decimal unsigned 64-bit integer: " +
                                    std::string(text));
    }
    return value;
}

std::optional<std::uint64_t> seed_from_env() {
    const char* raw = std::getenv("ZIGFAST_SEED");
    if (raw == nullptr || *raw == '\0') {
        return std::nullopt;
    }
    return parse_seed(raw);
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed) {
    if (explicit_seed) {
        return *explicit_seed;
    }
    if (auto env = seed_from_env()) {
        return *env;
    }
    return auto_seed();
}

}  // namespace zigfast
