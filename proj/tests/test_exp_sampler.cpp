#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "zigfast/exp_sampler.hpp"
#include "zigfast/stats.hpp"
#include "zigfast/tables.hpp"

using namespace zigfast;

namespace {

/// Returns the same word forever.
struct FixedSource {
    std::uint64_t word = 0;
    std::uint64_t next_u64() noexcept { return word; }
};

long double box_area(const ZigguratTables& t, std::size_t j) {
    return (static_cast<long double>(t.x[j]) - t.x[j + 1]) *
           (static_cast<long double>(t.f[j + 1]) - t.f[j]);
}

long double box_mass(const ZigguratTables& t, std::size_t j) {
    const long double floor = t.f[j];
    return oracle::simpson([&](long double x) { return oracle::exp_density(x) - floor; }, t.x[j + 1],
                           t.x[j]);
}

}  // namespace

TEST_SUITE("exp_sampler") {

TEST_CASE("first five raw moments at N = 1e6") {
    ExpSampler s(20240101);
    MomentAccumulator acc;
    for (int k = 0; k < 1000000; ++k) {
        acc.add(s());
    }
    const QualityReport r = make_quality_report(Distribution::Exponential, acc);
    for (int k = 0; k < kMomentCount; ++k) {
        CAPTURE(k);
        CHECK(std::abs(r.z_scores[k]) <= 6.0);
    }
    CHECK(r.pass);
}

TEST_CASE("matches the exponential CDF (KS)") {
    ExpSampler s(11);
    std::vector<double> xs(1000000);
    s.fill(xs);
    const KsResult ks = ks_one_sample(xs, oracle::exp_cdf);
    CHECK(ks.p_value > 0.001);
    CHECK(*std::min_element(xs.begin(), xs.end()) >= 0.0);
}

TEST_CASE("common-path frequency is 252/256") {
    CountingExpSampler s(5);
    constexpr int kN = 10000000;
    for (int k = 0; k < kN; ++k) {
        s();
    }
    const auto& c = s.counters();
    const double draws = static_cast<double>(c[Path::LayerDraw]);
    const double common = c[Path::Common] / draws;
    const double p = 252.0 / 256.0;
    CHECK(std::abs(common - p) < 3 * oracle::binomial_se(p, draws));

    // Tail: exceptional with probability 4/256, then slot 0 with weight a[0].
    const double tail_p = 4.0 / 256.0 * s.tables().geometry.a[0];
    CHECK(std::abs(c[Path::Tail] / draws - tail_p) < 3 * oracle::binomial_se(tail_p, draws));

    // Fraction of overhang attempts that need exp(): the band below the chord
    // covers 2 eps - eps^2 of the reflected triangle.
    const double eps = s.tables().geometry.epsilon_max;
    const double attempts = static_cast<double>(c[Path::Immediate] + c[Path::BandTest]);
    const double band = 2 * eps - eps * eps;
    CHECK(std::abs(c[Path::BandTest] / attempts - band) < 4 * oracle::binomial_se(band, attempts));
}

TEST_CASE("zero word returns zero") {
    BasicExpSampler<FixedSource> s(FixedSource{0});
    CHECK(s() == 0.0);
}

TEST_CASE("fast path value is the word times the layer width") {
    const std::uint64_t word = 0x123456789abcde05ULL;  // low byte 5 -> layer 6 from the bottom
    BasicExpSampler<FixedSource> s(FixedSource{word});
    const auto& t = s.tables().geometry;
    const double expected = static_cast<double>(word >> 1) * (t.x[6] * 0x1p-63);
    CHECK(s() == expected);
    CHECK(s() < t.x[6]);
}

TEST_CASE("per-box acceptance ratio with reflection") {
    ExpSampler s(77);
    const auto& t = s.tables().geometry;
    constexpr int kN = 1000000;
    for (std::size_t j : {std::size_t{1}, std::size_t{2}, std::size_t{126}, std::size_t{252}}) {
        int accepted = 0;
        for (int k = 0; k < kN; ++k) {
            accepted += s.overhang_sample(j).has_value();
        }
        // Reflection folds the box onto its lower triangle.
        const double p = static_cast<double>(box_mass(t, j) / (box_area(t, j) / 2));
        CAPTURE(j);
        CHECK(std::abs(accepted / double(kN) - p) < 3 * oracle::binomial_se(p, kN));
    }
}

TEST_CASE("accepted points in a box follow the truncated density") {
    ExpSampler s(78);
    const auto& t = s.tables().geometry;
    for (std::size_t j : {std::size_t{1}, std::size_t{252}}) {
        const double lo = t.x[j + 1];
        const double hi = t.x[j];
        constexpr int kBins = 20;
        std::vector<double> counts(kBins);
        int n = 0;
        while (n < 1000000) {
            if (const auto x = s.overhang_sample(j)) {
                REQUIRE(*x >= lo);
                REQUIRE(*x <= hi);
                ++counts[std::min(kBins - 1, static_cast<int>((*x - lo) / (hi - lo) * kBins))];
                ++n;
            }
        }
        const long double mass = box_mass(t, j);
        const long double floor = t.f[j];
        double stat = 0;
        for (int b = 0; b < kBins; ++b) {
            const long double a = lo + (hi - lo) * b / kBins;
            const long double c = lo + (hi - lo) * (b + 1) / kBins;
            const double e = static_cast<double>(
                n * oracle::simpson([&](long double x) { return std::exp(-x) - floor; }, a, c, 200) /
                mass);
            stat += (counts[b] - e) * (counts[b] - e) / e;
        }
        CAPTURE(j);
        CHECK(oracle::chi_square_upper(stat, kBins - 1) > 0.001);
    }
}

TEST_CASE("band width covers every box's own epsilon") {
    const auto& t = default_exp_tables()->geometry;
    for (std::size_t j = 1; j <= t.layer_count; j += 7) {
        const long double eps =
            oracle::grid_epsilon(oracle::exp_density, t.x[j + 1], t.x[j], t.f[j], t.f[j + 1], 5000);
        CHECK(eps <= t.epsilon_max + 1e-12);
    }
    const double band = static_cast<double>(default_exp_tables()->band_width) * 0x1p-64;
    CHECK(band >= t.epsilon_max);
    CHECK(band < t.epsilon_max + 1e-9);
}

TEST_CASE("tail draws are the tail start plus an exponential") {
    ExpSampler s(99);
    const double r = s.tables().tail_start;
    std::vector<double> excess(200000);
    for (double& v : excess) {
        const double x = s.tail_sample();
        REQUIRE(x > r);
        v = x - r;
    }
    CHECK(ks_one_sample(excess, oracle::exp_cdf).p_value > 0.001);
}

TEST_CASE("exceptional path alone follows the overhang+tail mixture mean") {
    ExpSampler s(100);
    const auto& t = s.tables().geometry;
    // E[X | exceptional] = (mass-weighted mean of x over the slots) / total.
    long double num = std::exp(-static_cast<long double>(t.x[1])) * (t.x[1] + 1);
    long double den = std::exp(-static_cast<long double>(t.x[1]));
    for (std::size_t j = 1; j <= t.layer_count; ++j) {
        const long double floor = t.f[j];
        num += oracle::simpson([&](long double x) { return x * (std::exp(-x) - floor); },
                               t.x[j + 1], t.x[j], 200);
        den += box_mass(t, j);
    }
    const double mean = static_cast<double>(num / den);
    MomentAccumulator acc;
    for (int k = 0; k < 400000; ++k) {
        acc.add(s.sample_exceptional());
    }
    const double var = acc.raw_moment(2) - acc.raw_moment(1) * acc.raw_moment(1);
    CHECK(std::abs(acc.raw_moment(1) - mean) < 5 * std::sqrt(var / 400000));
}

TEST_CASE("fill is the same stream as repeated calls") {
    ExpSampler a(3);
    ExpSampler b(3);
    std::vector<double> buf(10000);
    a.fill(buf);
    for (double v : buf) {
        REQUIRE(v == b());
    }
    const auto before = a.source();
    a.fill(std::span<double>{});
    CHECK(a.source() == before);
}

TEST_CASE("fixed seed is deterministic") {
    ExpSampler a(123);
    ExpSampler b(123);
    ExpSampler c(124);
    bool differs = false;
    for (int k = 0; k < 1000; ++k) {
        const double x = a();
        REQUIRE(x == b());
        differs |= x != c();
    }
    CHECK(differs);
}

TEST_CASE("overhang slot range is checked") {
    ExpSampler s(1);
    CHECK_THROWS_AS(s.overhang_sample(0), std::out_of_range);
    CHECK_THROWS_AS(s.overhang_sample(253), std::out_of_range);
}

TEST_CASE("non-default slot counts sample correctly") {
    for (std::uint32_t i_max : {64u, 1024u}) {
        ExpSampler s(DefaultSource(9), prepare_tables(solve_layers(DensitySpec::exponential(), i_max)));
        MomentAccumulator acc;
        for (int k = 0; k < 500000; ++k) {
            acc.add(s());
        }
        CAPTURE(i_max);
        CHECK(make_quality_report(Distribution::Exponential, acc).pass);
    }
    CHECK_THROWS(prepare_tables(solve_layers(DensitySpec::exponential(), 2)));
    CHECK_THROWS(ExpSampler(DefaultSource(1), default_normal_tables()));
}

}
