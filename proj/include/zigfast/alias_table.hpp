#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace zigfast {

/// Walker/Vose alias table: O(1) draws from a finite discrete distribution.
/// Immutable after construction and safe to share between threads.
class AliasTable {
  public:
    AliasTable() = default;

    std::size_t size() const noexcept { return prob_.size(); }
    std::span<const double> probabilities() const noexcept { return prob_; }
    std::span<const std::uint32_t> aliases() const noexcept { return alias_; }

    /// Standard two-uniform draw: a column in [0, size) and a coin in [0, 1).
    std::size_t sample(std::size_t column, double coin) const noexcept {
        return coin < prob_[column] ? column : alias_[column];
    }

    /// Single-word draw. The high half of word * size picks the column; the
    /// low half is the coin, compared in the integer domain.
    std::size_t sample(std::uint64_t word) const noexcept {
        const auto product = static_cast<unsigned __int128>(word) * prob_.size();
        const auto column = static_cast<std::size_t>(product >> 64);
        const auto coin = static_cast<std::uint64_t>(product);
        return coin < threshold_[column] ? column : alias_[column];
    }

    /// Probability that a draw returns k, reconstructed from the table.
    double implied_probability(std::size_t k) const;

  private:
    friend AliasTable build_alias(std::span<const double> weights);

    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
    std::vector<std::uint64_t> threshold_;
};

/// Throws EmptyWeights if all weights are zero and std::invalid_argument on a
/// negative or non-finite weight.
AliasTable build_alias(std::span<const double> weights);

}  // namespace zigfast
