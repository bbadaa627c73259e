// zigfast: table construction, bulk generation, quality runs, benchmarks and
// path statistics for the modified ziggurat samplers.

#include <algorithm>
#include <bit>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "zigfast/bench.hpp"
#include "zigfast/errors.hpp"
#include "zigfast/exp_sampler.hpp"
#include "zigfast/normal_sampler.hpp"
#include "zigfast/stats.hpp"
#include "zigfast/table_io.hpp"
#include "zigfast/tables.hpp"
#include "zigfast/traditional.hpp"

namespace {

using namespace zigfast;

constexpr int kExitPass = 0;
constexpr int kExitStatistical = 1;
constexpr int kExitOperational = 2;

struct Common {
    std::string dist = "exp";
    std::optional<std::uint64_t> seed;
    std::uint32_t imax = 256;
    std::string format = "text";
    std::string out;
    unsigned jobs = 1;
};

class OutputFile {
  public:
    explicit OutputFile(const std::string& path) {
        if (path.empty() || path == "-") {
            file_ = stdout;
        } else {
            file_ = std::fopen(path.c_str(), "wb");
            owned_ = true;
            if (file_ == nullptr) {
                throw std::runtime_error("cannot open " + path + " for writing");
            }
        }
    }
    OutputFile(const OutputFile&) = delete;
    OutputFile& operator=(const OutputFile&) = delete;
    ~OutputFile() {
        if (owned_) {
            std::fclose(file_);
        }
    }

    void write(const void* data, std::size_t size) {
        if (size > 0 && std::fwrite(data, 1, size, file_) != size) {
            throw std::runtime_error("write failed");
        }
    }
    void write(std::string_view text) { write(text.data(), text.size()); }

    void close() {
        if (std::fflush(file_) != 0) {
            throw std::runtime_error("flush failed");
        }
        if (owned_) {
            const int rc = std::fclose(file_);
            owned_ = false;
            if (rc != 0) {
                throw std::runtime_error("close failed");
            }
        }
    }

  private:
    std::FILE* file_ = nullptr;
    bool owned_ = false;
};

std::shared_ptr<const SamplerTables> sampler_tables(Distribution d, std::uint32_t imax) {
    if (imax == 256) {
        return d == Distribution::Exponential ? default_exp_tables() : default_normal_tables();
    }
    return prepare_tables(solve_layers(DensitySpec::of(d), imax));
}

/// Splits n into `jobs` shards, runs fn(shard, count, seed) on each in its own
/// thread and returns the results in shard order. Shard 0 uses the base seed
/// so that a single job reproduces `gen` with the same seed.
template <typename Fn>
auto run_shards(std::uint64_t n, unsigned jobs, std::uint64_t seed, Fn fn) {
    using Result = decltype(fn(std::uint64_t{}, std::uint64_t{}));
    jobs = std::max(1u, jobs);
    std::vector<Result> results(jobs);
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(jobs);
    for (unsigned k = 0; k < jobs; ++k) {
        const std::uint64_t count = n / jobs + (k < n % jobs ? 1 : 0);
        const std::uint64_t shard_seed = k == 0 ? seed : derive_seed(seed, k);
        auto body = [&, k, count, shard_seed] {
            try {
                results[k] = fn(count, shard_seed);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        };
        if (jobs == 1) {
            body();
        } else {
            threads.emplace_back(body);
        }
    }
    for (auto& t : threads) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return results;
}

template <typename Sampler>
MomentAccumulator accumulate(Sampler& s, std::uint64_t n) {
    MomentAccumulator acc;
    for (std::uint64_t k = 0; k < n; ++k) {
        acc.add(s());
    }
    return acc;
}

// tables

int cmd_tables(const Common& c, const std::string& check_path) {
    if (!check_path.empty()) {
        const ZigguratTables t = load_tables(check_path);
        const auto issues = check_tables(t);
        for (const auto& issue : issues) {
            fmt::print("violation: {}\n", issue);
        }
        fmt::print("{}: {} L_max {} i_max {}, {} violations\n", check_path,
                   to_string(t.distribution), t.layer_count, t.i_max, issues.size());
        return issues.empty() ? kExitPass : kExitStatistical;
    }

    const Distribution d = parse_distribution(c.dist);
    const ZigguratTables t = solve_layers(DensitySpec::of(d), c.imax);
    const double overhang = 1.0 - static_cast<double>(t.layer_count) / t.i_max;

    if (!c.out.empty()) {
        const TableFormat format = c.format == "binary" ? TableFormat::Binary : TableFormat::Json;
        save_tables(c.out, t, format);
    } else if (c.format == "json") {
        const auto bytes = serialize_tables(t, TableFormat::Json);
        std::fwrite(bytes.data(), 1, bytes.size(), stdout);
        std::fputc('\n', stdout);
        return kExitPass;
    }
    fmt::print("distribution {}\ni_max {}\nL_max {}\noverhang_mass {:.17g}\n", to_string(d),
               t.i_max, t.layer_count, overhang);
    if (d == Distribution::Exponential && t.layer_count > 0) {
        fmt::print("epsilon_max {:.17g}\n", t.epsilon_max);
    }
    if (t.layer_count > 0) {
        fmt::print("tail_start {:.17g}\n", t.tail_start());
    }
    return kExitPass;
}

// gen

template <typename Sampler>
void stream(Sampler& s, std::uint64_t n, bool binary, OutputFile& out) {
    constexpr std::size_t kChunk = 1 << 14;
    std::vector<double> values(kChunk);
    fmt::memory_buffer text;
    while (n > 0) {
        const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(n, kChunk));
        s.fill(std::span(values.data(), count));
        n -= count;
        if (binary) {
            if constexpr (std::endian::native == std::endian::big) {
                for (std::size_t k = 0; k < count; ++k) {
                    values[k] = std::bit_cast<double>(
                        __builtin_bswap64(std::bit_cast<std::uint64_t>(values[k])));
                }
            }
            out.write(values.data(), count * sizeof(double));
        } else {
            text.clear();
            for (std::size_t k = 0; k < count; ++k) {
                fmt::format_to(std::back_inserter(text), "{:.17g}\n", values[k]);
            }
            out.write(text.data(), text.size());
        }
    }
}

int cmd_gen(const Common& c, std::uint64_t n) {
    if (c.format != "text" && c.format != "f64le") {
        throw InvalidSpec("gen supports --format text or f64le");
    }
    const Distribution d = parse_distribution(c.dist);
    const std::uint64_t seed = resolve_seed(c.seed);
    const auto tables = sampler_tables(d, c.imax);
    const bool binary = c.format == "f64le";
    OutputFile out(c.out);
    if (d == Distribution::Exponential) {
        ExpSampler s(DefaultSource(seed), tables);
        stream(s, n, binary, out);
    } else {
        NormalSampler s(DefaultSource(seed), tables);
        stream(s, n, binary, out);
    }
    out.close();
    return kExitPass;
}

// quality

int cmd_quality(const Common& c, std::uint64_t n, double threshold) {
    const Distribution d = parse_distribution(c.dist);
    const std::uint64_t seed = resolve_seed(c.seed);
    const auto tables = sampler_tables(d, c.imax);
    const auto shards = run_shards(n, c.jobs, seed, [&](std::uint64_t count, std::uint64_t s) {
        if (d == Distribution::Exponential) {
            ExpSampler sampler(DefaultSource(s), tables);
            return accumulate(sampler, count);
        }
        NormalSampler sampler(DefaultSource(s), tables);
        return accumulate(sampler, count);
    });
    MomentAccumulator total;
    for (const auto& shard : shards) {
        total.merge(shard);
    }
    const QualityReport report = make_quality_report(d, total, threshold);
    OutputFile out(c.out);
    if (c.format == "json") {
        out.write(quality_report_json(report));
        out.write("\n");
    } else {
        out.write(fmt::format("seed {}\n", seed));
        out.write(quality_report_text(report));
    }
    out.close();
    return report.pass ? kExitPass : kExitStatistical;
}

// bench

int cmd_bench(const Common& c, std::uint64_t n, int trials, const std::vector<std::string>& algos) {
    std::vector<Algorithm> algorithms;
    for (const auto& name : algos) {
        algorithms.push_back(parse_algorithm(name));
    }
    const std::uint64_t seed = resolve_seed(c.seed);
    std::vector<Distribution> dists;
    if (c.dist == "both") {
        dists = {Distribution::Exponential, Distribution::HalfNormal};
    } else {
        dists = {parse_distribution(c.dist)};
    }

    std::vector<BenchReport> reports;
    for (Distribution d : dists) {
        auto part = run_benchmarks(algorithms, d, n, trials, seed);
        reports.insert(reports.end(), part.begin(), part.end());
    }
    OutputFile out(c.out);
    out.write(c.format == "json" ? bench_reports_json(reports) + "\n"
                                 : bench_reports_text(reports));
    out.close();
    return kExitPass;
}

// pathstats

template <typename Sampler>
PathCounters count_paths(Sampler& s, std::uint64_t n) {
    double sink = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
        sink += s();
    }
    volatile double keep = sink;
    (void)keep;
    return s.counters();
}

double ratio(std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

int cmd_pathstats(const Common& c, std::uint64_t n, const std::string& algorithm) {
    const Distribution d = parse_distribution(c.dist);
    const Algorithm algo = parse_algorithm(algorithm);
    if (algo == Algorithm::Std) {
        throw InvalidSpec("pathstats needs a ziggurat algorithm");
    }
    const std::uint64_t seed = resolve_seed(c.seed);
    const auto tables = sampler_tables(d, c.imax);
    std::shared_ptr<const TraditionalTables> trad;
    if (algo == Algorithm::Traditional) {
        trad = c.imax == 256 ? default_traditional_tables(d)
                             : std::make_shared<const TraditionalTables>(
                                   solve_traditional(DensitySpec::of(d), c.imax));
    }

    const auto shards = run_shards(n, c.jobs, seed, [&](std::uint64_t count, std::uint64_t s) {
        const bool exponential = d == Distribution::Exponential;
        if (algo == Algorithm::Traditional) {
            if (exponential) {
                BasicTraditionalExpSampler<DefaultSource, PathCounters> sampler(DefaultSource(s),
                                                                                trad);
                return count_paths(sampler, count);
            }
            BasicTraditionalNormalSampler<DefaultSource, PathCounters> sampler(DefaultSource(s),
                                                                               trad);
            return count_paths(sampler, count);
        }
        if (exponential) {
            CountingExpSampler sampler(DefaultSource(s), tables);
            return count_paths(sampler, count);
        }
        CountingNormalSampler sampler(DefaultSource(s), tables);
        return count_paths(sampler, count);
    });
    PathCounters total;
    for (const auto& shard : shards) {
        total.merge(shard);
    }

    const std::uint64_t layer = total[Path::LayerDraw];
    const std::uint64_t overhang_tests = total[Path::Immediate] + total[Path::BandTest];
    nlohmann::ordered_json j;
    j["algorithm"] = std::string(to_string(algo));
    j["distribution"] = std::string(to_string(d));
    j["n"] = n;
    j["seed"] = seed;
    nlohmann::ordered_json counts;
    for (std::size_t p = 0; p < kPathCount; ++p) {
        counts[std::string(to_string(static_cast<Path>(p)))] = total[static_cast<Path>(p)];
    }
    j["counts"] = counts;
    nlohmann::ordered_json fractions;
    fractions["common"] = ratio(total[Path::Common], layer);
    fractions["exceptional"] = 1.0 - ratio(total[Path::Common], layer);
    fractions["tail"] = ratio(total[Path::Tail], layer);
    if (algo == Algorithm::Modified) {
        fractions["slot_draw"] = ratio(total[Path::SlotDraw], layer);
        fractions["overhang_immediate"] = ratio(total[Path::Immediate], overhang_tests);
        fractions["overhang_band"] = ratio(total[Path::BandTest], overhang_tests);
    } else {
        fractions["rejection_test"] = ratio(total[Path::BandTest], layer);
    }
    fractions["reject"] = ratio(total[Path::Reject], layer);
    j["fractions"] = fractions;

    OutputFile out(c.out);
    if (c.format == "json") {
        out.write(j.dump(2) + "\n");
    } else {
        out.write(fmt::format("algorithm {}\ndistribution {}\nn {}\nseed {}\n",
                              to_string(algo), to_string(d), n, seed));
        for (const auto& [key, value] : fractions.items()) {
            out.write(fmt::format("{:<20} {:.6f}\n", key, value.get<double>()));
        }
    }
    out.close();
    return kExitPass;
}

void add_common(CLI::App* sub, Common& c, bool with_imax, bool with_jobs) {
    sub->add_option("--dist", c.dist, "exp or normal")->capture_default_str();
    sub->add_option("--seed", c.seed, "64-bit seed (default: $ZIGFAST_SEED, then auto)");
    sub->add_option("--out", c.out, "output file (default: stdout)");
    if (with_imax) {
        sub->add_option("--imax", c.imax, "number of ziggurat slots (power of two)")
            ->capture_default_str();
    }
    if (with_jobs) {
        sub->add_option("--jobs", c.jobs, "independent seeded shards")->check(CLI::Range(1u, 256u));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modified ziggurat samplers for exponential and normal variates"};
    app.require_subcommand(1);

    Common c;
    std::uint64_t n = 0;
    int trials = 3;
    double threshold = 6.0;
    std::string check_path;
    std::string algorithm = "modified";
    std::vector<std::string> algos{"modified", "traditional", "std"};

    auto* tables = app.add_subcommand("tables", "build, write or verify ziggurat tables");
    add_common(tables, c, true, false);
    tables->add_option("--format", c.format, "text, json or binary (file output)");
    tables->add_option("--check", check_path, "verify a table file by quadrature");

    auto* gen = app.add_subcommand("gen", "write variates");
    add_common(gen, c, true, false);
    gen->add_option("--n", n, "number of variates")->required();
    gen->add_option("--format", c.format, "text or f64le")->capture_default_str();

    auto* quality = app.add_subcommand("quality", "raw-moment quality check");
    add_common(quality, c, true, true);
    quality->add_option("--n", n, "number of variates")->required();
    quality->add_option("--format", c.format, "text or json")->capture_default_str();
    quality->add_option("--threshold", threshold, "|z| gate in standard errors")
        ->capture_default_str();

    auto* bench = app.add_subcommand("bench", "generate-and-aggregate timing");
    add_common(bench, c, false, false);
    bench->add_option("--n", n, "draws per trial")->required();
    bench->add_option("--trials", trials, "trials per algorithm (>= 3)")->capture_default_str();
    bench->add_option("--algorithms", algos, "modified, traditional, std")->delimiter(',');
    bench->add_option("--format", c.format, "text or json")->capture_default_str();

    auto* pathstats = app.add_subcommand("pathstats", "fractions of draws taking each path");
    add_common(pathstats, c, true, true);
    pathstats->add_option("--n", n, "number of variates")->required();
    pathstats->add_option("--algorithm", algorithm, "modified or traditional")
        ->capture_default_str();
    pathstats->add_option("--format", c.format, "text or json")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitOperational;
    }

    try {
        if (*tables) {
            return cmd_tables(c, check_path);
        }
        if (*gen) {
            return cmd_gen(c, n);
        }
        if (*quality) {
            return cmd_quality(c, n, threshold);
        }
        if (*bench) {
            return cmd_bench(c, n, trials, algos);
        }
        if (*pathstats) {
            return cmd_pathstats(c, n, algorithm);
        }
    } catch (const std::exception& e) {
        fmt::print(stderr, "zigfast: {}\n", e.what());
        return kExitOperational;
    }
    return kExitOperational;
}
