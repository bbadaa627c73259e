#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zigfast/density.hpp"

namespace zigfast {

enum class Algorithm { Modified, Traditional, Std };

std::string_view to_string(Algorithm a) noexcept;
/// "modified", "traditional" or "std"; throws std::invalid_argument otherwise.
Algorithm parse_algorithm(std::string_view name);

struct BenchReport {
    Algorithm algorithm = Algorithm::Modified;
    Distribution distribution = Distribution::Exponential;
    std::uint64_t n = 0;
    int trials = 0;
    std::vector<double> trial_seconds;
    double median_seconds = 0;
    double throughput = 0;           // draws per second at the median
    double speedup_vs_baseline = 0;  // traditional median / this median; 0 without a baseline
    double aggregate = 0;            // the sum from the last trial
};

/// Generate-and-aggregate: n draws summed into one double per trial, trials
/// run round-robin across algorithms, medians reported. Speedups are taken
/// against Algorithm::Traditional when it is among `algorithms`.
///
/// Throws std::invalid_argument for trials < 3 or an empty algorithm list.
std::vector<BenchReport> run_benchmarks(std::span<const Algorithm> algorithms, Distribution d,
                                        std::uint64_t n, int trials, std::uint64_t seed);

std::string bench_reports_json(std::span<const BenchReport> reports);
std::string bench_reports_text(std::span<const BenchReport> reports);

}  // namespace zigfast
