#include "zigfast/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>
#include <json.hpp>

namespace zigfast {

double expected_raw_moment(Distribution d, int order) {
    if (order < 1) {
        throw std::invalid_argument("moment order must be positive");
    }
    if (d == Distribution::Exponential) {
        return std::tgamma(order + 1.0);  // k!
    }
    if (order % 2 == 1) {
        return 0.0;
    }
    double m = 1;  // (k - 1)!!
    for (int j = order - 1; j > 1; j -= 2) {
        m *= j;
    }
    return m;
}

QualityReport make_quality_report(Distribution d, const MomentAccumulator& acc, double threshold) {
    QualityReport r;
    r.distribution = d;
    r.n = acc.count();
    r.threshold = threshold;
    r.pass = r.n > 0;
    const double n = static_cast<double>(r.n);
    for (int k = 1; k <= kMomentCount; ++k) {
        const double mk = expected_raw_moment(d, k);
        const double m2k = expected_raw_moment(d, 2 * k);
        const std::size_t idx = static_cast<std::size_t>(k - 1);
        r.moments[idx] = acc.raw_moment(k);
        r.expected[idx] = mk;
        r.standard_errors[idx] = std::sqrt((m2k - mk * mk) / n);
        r.z_scores[idx] = (r.moments[idx] - mk) / r.standard_errors[idx];
        r.pass = r.pass && std::abs(r.z_scores[idx]) <= threshold;
    }
    return r;
}

std::string quality_report_json(const QualityReport& r) {
    nlohmann::ordered_json doc;
    doc["distribution"] = r.distribution == Distribution::Exponential ? "exponential" : "normal";
    doc["n"] = r.n;
    doc["moments"] = r.moments;
    doc["expected"] = r.expected;
    doc["standard_errors"] = r.standard_errors;
    doc["z_scores"] = r.z_scores;
    doc["threshold"] = r.threshold;
    doc["pass"] = r.pass;
    return doc.dump(2);
}

std::string quality_report_text(const QualityReport& r) {
    std::string out = fmt::format("Created {} {} distributed pseudo-random numbers...\n", r.n,
                                  r.distribution == Distribution::Exponential ? "exponential"
                                                                              : "standard normal");
    for (int k = 0; k < kMomentCount; ++k) {
        out += fmt::format("X{}: {:.6f}  (expected {:g}, SE {:.3g}, z {:+.2f})\n", k + 1,
                           r.moments[k], r.expected[k], r.standard_errors[k], r.z_scores[k]);
    }
    out += r.pass ? "PASS\n" : fmt::format("FAIL (|z| > {:g})\n", r.threshold);
    return out;
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0) {
        return 1.0;
    }
    if (lambda < 0.2) {
        return 1.0;  // the series converges slowly here and Q is 1 to double precision
    }
    double sum = 0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) {
            break;
        }
    }
    return std::clamp(2 * sum, 0.0, 1.0);
}

KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf) {
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double c = cdf(sorted[i]);
        d = std::max({d, (i + 1) / n - c, c - i / n});
    }
    const double sqrt_n = std::sqrt(n);
    return {d, kolmogorov_survival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double n = static_cast<double>(x.size());
    const double m = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v) {
            ++i;
        }
        while (j < y.size() && y[j] <= v) {
            ++j;
        }
        d = std::max(d, std::abs(i / n - j / m));
    }
    const double en = std::sqrt(n * m / (n + m));
    return {d, kolmogorov_survival((en + 0.12 + 0.11 / en) * d)};
}

ChiSquareResult chi_square(std::span<const std::uint64_t> observed,
                           std::span<const double> probabilities) {
    if (observed.size() != probabilities.size() || observed.size() < 2) {
        throw std::invalid_argument("chi-square needs matching bins, at least two");
    }
    const double total = static_cast<double>(
        std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
    ChiSquareResult r;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        const double expected = total * probabilities[k];
        const double diff = static_cast<double>(observed[k]) - expected;
        r.statistic += diff * diff / expected;
    }
    r.dof = static_cast<double>(observed.size() - 1);
    r.p_value = boost::math::gamma_q(r.dof / 2, r.statistic / 2);
    return r;
}

}  // namespace zigfast
