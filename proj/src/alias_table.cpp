#include "zigfast/alias_table.hpp"

#include <cmath>
#include <stdexcept>

#include "zigfast/compensated_sum.hpp"
#include "zigfast/errors.hpp"

namespace zigfast {

double AliasTable::implied_probability(std::size_t k) const {
    long double p = 0;
    for (std::size_t c = 0; c < prob_.size(); ++c) {
        if (c == k) {
            p += prob_[c];
        }
        if (alias_[c] == k && c != k) {
            p += 1.0L - prob_[c];
        }
    }
    return static_cast<double>(p / prob_.size());
}

AliasTable build_alias(std::span<const double> weights) {
    if (weights.empty()) {
        throw EmptyWeights("alias table needs at least one weight");
    }
    CompensatedSum<long double> total;
    for (double w : weights) {
        if (!(w >= 0) || !std::isfinite(w)) {
            throw std::invalid_argument("alias weights must be finite and non-negative");
        }
        total += w;
    }
    if (!(total.value() > 0)) {
        throw EmptyWeights("all alias weights are zero");
    }

    const std::size_t n = weights.size();
    std::vector<long double> scaled(n);
    std::vector<std::uint32_t> small;
    std::vector<std::uint32_t> large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        scaled[k] = weights[k] * static_cast<long double>(n) / total.value();
        (scaled[k] < 1 ? small : large).push_back(static_cast<std::uint32_t>(k));
    }

    AliasTable table;
    table.prob_.assign(n, 1.0);
    table.alias_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        table.alias_[k] = static_cast<std::uint32_t>(k);
    }

    while (!small.empty() && !large.empty()) {
        const auto s = small.back();
        small.pop_back();
        const auto l = large.back();
        table.prob_[s] = static_cast<double>(scaled[s]);
        table.alias_[s] = l;
        scaled[l] -= 1 - scaled[s];
        if (scaled[l] < 1) {
            large.pop_back();
            small.push_back(l);
        }
    }
    // Leftovers differ from 1 only by rounding; they keep prob 1 and alias self.

    constexpr long double kTwo64 = 18446744073709551616.0L;
    table.threshold_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const long double t = table.prob_[k] * kTwo64;
        table.threshold_[k] = t >= kTwo64 ? ~std::uint64_t{0} : static_cast<std::uint64_t>(t);
    }
    return table;
}

}  // namespace zigfast
