#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "zigfast/normal_sampler.hpp"
#include "zigfast/stats.hpp"
#include "zigfast/tables.hpp"

using namespace zigfast;

namespace {

struct FixedSource {
    std::uint64_t word = 0;
    std::uint64_t next_u64() noexcept { return word; }
};

long double box_mass(const ZigguratTables& t, std::size_t j) {
    const long double floor = t.f[j];
    return oracle::simpson([&](long double x) { return oracle::half_normal_density(x) - floor; },
                           t.x[j + 1], t.x[j]);
}

long double box_area(const ZigguratTables& t, std::size_t j) {
    return (static_cast<long double>(t.x[j]) - t.x[j + 1]) *
           (static_cast<long double>(t.f[j + 1]) - t.f[j]);
}

}  // namespace

TEST_SUITE("normal_sampler") {

TEST_CASE("first five raw moments at N = 1e6") {
    NormalSampler s(20240102);
    MomentAccumulator acc;
    for (int k = 0; k < 1000000; ++k) {
        acc.add(s());
    }
    const QualityReport r = make_quality_report(Distribution::HalfNormal, acc);
    for (int k = 0; k < kMomentCount; ++k) {
        CAPTURE(k);
        CHECK(std::abs(r.z_scores[k]) <= 6.0);
    }
}

TEST_CASE("matches the normal CDF (KS) and is symmetric") {
    NormalSampler s(12);
    std::vector<double> xs(1000000);
    s.fill(xs);
    CHECK(ks_one_sample(xs, oracle::normal_cdf).p_value > 0.001);

    std::vector<double> pos;
    std::vector<double> neg;
    for (double x : xs) {
        (x < 0 ? neg : pos).push_back(std::abs(x));
    }
    const double n = static_cast<double>(xs.size());
    CHECK(std::abs(pos.size() / n - 0.5) < 3 * oracle::binomial_se(0.5, n));
    CHECK(ks_two_sample(pos, neg).p_value > 0.001);
}

TEST_CASE("variance over a 1e7 buffer") {
    NormalSampler s(13);
    std::vector<double> xs(10000000);
    s.fill(xs);
    MomentAccumulator acc;
    for (double x : xs) {
        acc.add(x);
    }
    const double var = acc.raw_moment(2) - acc.raw_moment(1) * acc.raw_moment(1);
    // Var of the sample variance is 2/N for the normal.
    CHECK(std::abs(var - 1) < 5 * std::sqrt(2.0 / 1e7));
}

TEST_CASE("common-path frequency is L_max/256") {
    CountingNormalSampler s(6);
    constexpr int kN = 10000000;
    for (int k = 0; k < kN; ++k) {
        s();
    }
    const auto& c = s.counters();
    const double draws = static_cast<double>(c[Path::LayerDraw]);
    const double p = s.tables().layer_count / 256.0;
    CHECK(s.tables().layer_count == 253);
    CHECK(std::abs(c[Path::Common] / draws - p) < 3 * oracle::binomial_se(p, draws));
    CHECK(c[Path::Immediate] == 0);

    const double tail_p = (1 - p) * s.tables().geometry.a[0];
    CHECK(std::abs(c[Path::Tail] / draws - tail_p) < 3 * oracle::binomial_se(tail_p, draws));
}

TEST_CASE("zero word returns zero and the sign follows the word") {
    BasicNormalSampler<FixedSource> zero(FixedSource{0});
    CHECK(zero() == 0.0);

    const std::uint64_t word = 0x4000000000000010ULL;  // layer index 0x10
    BasicNormalSampler<FixedSource> pos(FixedSource{word});
    BasicNormalSampler<FixedSource> neg(FixedSource{word | 0x8000000000000000ULL});  // -(2^62 - 0x10)
    const double a = pos();
    const double b = neg();
    CHECK(a > 0);
    CHECK(b < 0);
    CHECK(a == doctest::Approx(-b).epsilon(1e-15));
}

TEST_CASE("per-box acceptance ratio equals A/box") {
    NormalSampler s(79);
    const auto& t = s.tables().geometry;
    constexpr int kN = 1000000;
    for (std::size_t j : {std::size_t{1}, std::size_t{100}, std::size_t{200}, std::size_t{253}}) {
        int accepted = 0;
        for (int k = 0; k < kN; ++k) {
            accepted += s.overhang_sample(j).has_value();
        }
        const double p = static_cast<double>(box_mass(t, j) / box_area(t, j));
        CAPTURE(j);
        CHECK(std::abs(accepted / double(kN) - p) < 3 * oracle::binomial_se(p, kN));
    }
}

TEST_CASE("accepted points in a box follow the truncated density") {
    NormalSampler s(80);
    const auto& t = s.tables().geometry;
    for (std::size_t j : {std::size_t{1}, std::size_t{253}}) {
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
                n *
                oracle::simpson([&](long double x) { return oracle::half_normal_density(x) - floor; },
                                a, c, 200) /
                mass);
            stat += (counts[b] - e) * (counts[b] - e) / e;
        }
        CAPTURE(j);
        CHECK(oracle::chi_square_upper(stat, kBins - 1) > 0.001);
    }
}

TEST_CASE("tail draws follow the conditional normal tail") {
    CountingNormalSampler s(81);
    const double r = s.tail_start();
    CHECK(r == s.tables().geometry.x[1]);
    constexpr int kN = 1000000;
    std::vector<double> xs(kN);
    for (double& x : xs) {
        x = s.tail_sample();
        REQUIRE(x > r);
    }
    std::sort(xs.begin(), xs.end());
    double sup = 0;
    for (int k = 0; k < kN; ++k) {
        const double cdf = oracle::normal_tail_cdf(r, xs[k]);
        sup = std::max({sup, std::abs(cdf - double(k) / kN), std::abs(cdf - double(k + 1) / kN)});
    }
    CHECK(sup < 0.003);

    // One attempt draws x ~ Exp(rate r) and keeps it with probability
    // exp(-x^2 / 2), so P(accept) = integral of r e^{-r x} e^{-x^2/2}.
    const long double rr = r;
    const long double accept = oracle::simpson(
        [&](long double x) { return rr * std::exp(-rr * x - x * x / 2); }, 0, 40 / rr, 20000);
    const double attempts = static_cast<double>(s.counters()[Path::TailAttempt]);
    const double rate = kN / attempts;
    const double p = static_cast<double>(accept);
    CHECK(std::abs(rate - p) < 3 * oracle::binomial_se(p, attempts));
}

TEST_CASE("fill is the same stream as repeated calls") {
    NormalSampler a(4);
    NormalSampler b(4);
    std::vector<double> buf(10000);
    a.fill(buf);
    for (double v : buf) {
        REQUIRE(v == b());
    }
    const auto before = a.source();
    a.fill(std::span<double>{});
    CHECK(a.source() == before);
}

TEST_CASE("fixed seed is deterministic and outputs are finite") {
    NormalSampler a(321);
    NormalSampler b(321);
    for (int k = 0; k < 100000; ++k) {
        const double x = a();
        REQUIRE(std::isfinite(x));
        REQUIRE(x == b());
    }
}

TEST_CASE("constructor checks table kinds") {
    CHECK_THROWS(NormalSampler(DefaultSource(1), default_exp_tables()));
    CHECK_THROWS(NormalSampler(DefaultSource(1), default_normal_tables(), default_normal_tables()));
    NormalSampler s(1);
    CHECK_THROWS_AS(s.overhang_sample(0), std::out_of_range);
    CHECK_THROWS_AS(s.overhang_sample(254), std::out_of_range);
}

}
