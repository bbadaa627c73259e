#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "zigfast/compensated_sum.hpp"
#include "zigfast/density.hpp"

namespace zigfast {

inline constexpr int kMomentCount = 5;

/// Compensated sums of x, x^2, ..., x^5. Merging shards adds the sums.
class MomentAccumulator {
  public:
    void add(double x) noexcept {
        double p = x;
        for (auto& s : sums_) {
            s.add(p);
            p *= x;
        }
        ++count_;
    }

    void merge(const MomentAccumulator& other) noexcept {
        for (int k = 0; k < kMomentCount; ++k) {
            sums_[k].merge(other.sums_[k]);
        }
        count_ += other.count_;
    }

    std::uint64_t count() const noexcept { return count_; }
    /// Raw moment E[X^order], order in 1..5.
    double raw_moment(int order) const noexcept {
        return count_ == 0 ? 0.0 : sums_[order - 1].value() / static_cast<double>(count_);
    }

  private:
    std::array<CompensatedSum<double>, kMomentCount> sums_{};
    std::uint64_t count_ = 0;
};

/// Raw moment E[X^order] of the exponential(1) or standard normal (the
/// half-normal tables produce a symmetric normal).
double expected_raw_moment(Distribution d, int order);

struct QualityReport {
    Distribution distribution = Distribution::Exponential;
    std::uint64_t n = 0;
    std::array<double, kMomentCount> moments{};
    std::array<double, kMomentCount> expected{};
    std::array<double, kMomentCount> standard_errors{};  // analytic, not sample
    std::array<double, kMomentCount> z_scores{};
    double threshold = 6.0;
    bool pass = false;
};

/// z-scores from the analytic SE_k = sqrt((E[X^2k] - E[X^k]^2) / n).
QualityReport make_quality_report(Distribution d, const MomentAccumulator& acc,
                                  double threshold = 6.0);

std::string quality_report_json(const QualityReport& report);
std::string quality_report_text(const QualityReport& report);

struct KsResult {
    double statistic = 0;
    double p_value = 0;
};

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) e^(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

/// One-sample KS against a continuous CDF. Sorts a copy of the sample.
KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);

/// Two-sample KS with the effective size n m / (n + m).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct ChiSquareResult {
    double statistic = 0;
    double dof = 0;
    double p_value = 0;
};

/// Pearson chi-square of observed counts against expected probabilities
/// (which must sum to 1).
ChiSquareResult chi_square(std::span<const std::uint64_t> observed,
                           std::span<const double> probabilities);

}  // namespace zigfast
