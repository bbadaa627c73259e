#include "zigfast/bench.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <stdexcept>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

#include "zigfast/exp_sampler.hpp"
#include "zigfast/normal_sampler.hpp"
#include "zigfast/traditional.hpp"

namespace zigfast {
namespace {

template <typename Draw>
double aggregate(Draw&& draw, std::uint64_t n) {
    double sum = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
        sum += draw();
    }
    return sum;
}

struct Trial {
    double seconds;
    double sum;
};

template <typename Draw>
Trial timed(Draw&& draw, std::uint64_t n) {
    const auto start = std::chrono::steady_clock::now();
    const double sum = aggregate(draw, n);
    const auto stop = std::chrono::steady_clock::now();
    return {std::chrono::duration<double>(stop - start).count(), sum};
}

Trial run_trial(Algorithm a, Distribution d, std::uint64_t n, std::uint64_t seed) {
    const DefaultSource source(seed);
    const bool exponential = d == Distribution::Exponential;
    switch (a) {
        case Algorithm::Modified:
            if (exponential) {
                ExpSampler s(source);
                return timed([&] { return s(); }, n);
            } else {
                NormalSampler s(source);
                return timed([&] { return s(); }, n);
            }
        case Algorithm::Traditional:
            if (exponential) {
                TraditionalExpSampler s(source);
                return timed([&] { return s(); }, n);
            } else {
                TraditionalNormalSampler s(source);
                return timed([&] { return s(); }, n);
            }
        case Algorithm::Std: {
            DefaultSource engine = source;
            if (exponential) {
                std::exponential_distribution<double> dist(1.0);
                return timed([&] { return dist(engine); }, n);
            }
            std::normal_distribution<double> dist(0.0, 1.0);
            return timed([&] { return dist(engine); }, n);
        }
    }
    throw std::invalid_argument("unknown algorithm");
}

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : (values[mid - 1] + values[mid]) / 2;
}

}  // namespace

std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
        case Algorithm::Modified:
            return "modified";
        case Algorithm::Traditional:
            return "traditional";
        case Algorithm::Std:
            return "std";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "modified") {
        return Algorithm::Modified;
    }
    if (name == "traditional") {
        return Algorithm::Traditional;
    }
    if (name == "std") {
        return Algorithm::Std;
    }
    throw std::invalid_argument("unknown algorithm: " + std::string(name));
}

std::vector<BenchReport> run_benchmarks(std::span<const Algorithm> algorithms, Distribution d,
                                        std::uint64_t n, int trials, std::uint64_t seed) {
    if (algorithms.empty()) {
        throw std::invalid_argument("no algorithms to benchmark");
    }
    if (trials < 3) {
        throw std::invalid_argument("at least three trials are needed for a median");
    }
    std::vector<BenchReport> reports(algorithms.size());
    for (std::size_t k = 0; k < algorithms.size(); ++k) {
        reports[k].algorithm = algorithms[k];
        reports[k].distribution = d;
        reports[k].n = n;
        reports[k].trials = trials;
    }
    // Load the tables before timing anything.
    default_exp_tables();
    default_normal_tables();
    default_traditional_tables(d);

    for (int t = 0; t < trials; ++t) {
        for (auto& report : reports) {
            const Trial trial = run_trial(report.algorithm, d, n, derive_seed(seed, t));
            report.trial_seconds.push_back(trial.seconds);
            report.aggregate = trial.sum;
        }
    }

    const BenchReport* baseline = nullptr;
    for (auto& report : reports) {
        report.median_seconds = median(report.trial_seconds);
        report.throughput = report.median_seconds > 0 ? n / report.median_seconds : 0;
        if (report.algorithm == Algorithm::Traditional) {
            baseline = &report;
        }
    }
    if (baseline != nullptr) {
        for (auto& report : reports) {
            report.speedup_vs_baseline =
                report.median_seconds > 0 ? baseline->median_seconds / report.median_seconds : 0;
        }
    }
    return reports;
}

std::string bench_reports_json(std::span<const BenchReport> reports) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        nlohmann::ordered_json item;
        item["algorithm"] = std::string(to_string(r.algorithm));
        item["distribution"] = r.distribution == Distribution::Exponential ? "exponential" : "normal";
        item["n"] = r.n;
        item["trials"] = r.trials;
        item["trial_seconds"] = r.trial_seconds;
        item["median_seconds"] = r.median_seconds;
        item["throughput"] = r.throughput;
        item["speedup_vs_baseline"] = r.speedup_vs_baseline;
        item["aggregate"] = r.aggregate;
        doc.push_back(std::move(item));
    }
    return doc.dump(2);
}

std::string bench_reports_text(std::span<const BenchReport> reports) {
    std::string out = fmt::format("{:<12} {:<12} {:>12} {:>8} {:>12} {:>10} {:>9}\n", "algorithm",
                                  "distribution", "n", "trials", "median_s", "ns/draw", "speedup");
    for (const auto& r : reports) {
        out += fmt::format("{:<12} {:<12} {:>12} {:>8} {:>12.4f} {:>10.3f} {:>9.3f}\n",
                           to_string(r.algorithm),
                           r.distribution == Distribution::Exponential ? "exponential" : "normal",
                           r.n, r.trials, r.median_seconds,
                           r.n > 0 ? 1e9 * r.median_seconds / r.n : 0.0, r.speedup_vs_baseline);
    }
    return out;
}

}  // namespace zigfast
