#pragma once

#include <cmath>

namespace zigfast {

/// Neumaier's variant of Kahan summation. Merging two sums is exact up to
/// the final rounding, so sharded accumulators can be combined.
template <typename T>
class CompensatedSum {
  public:
    constexpr CompensatedSum() = default;
    constexpr explicit CompensatedSum(T initial) : sum_(initial) {}

    constexpr void add(T value) noexcept {
        const T t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value)) {
            compensation_ += (sum_ - t) + value;
        } else {
            compensation_ += (value - t) + sum_;
        }
        sum_ = t;
    }

    constexpr CompensatedSum& operator+=(T value) noexcept {
        add(value);
        return *this;
    }

    constexpr void merge(const CompensatedSum& other) noexcept {
        add(other.sum_);
        compensation_ += other.compensation_;
    }

    constexpr T value() const noexcept { return sum_ + compensation_; }

  private:
    T sum_{};
    T compensation_{};
};

}  // namespace zigfast
