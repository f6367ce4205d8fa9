#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "chirp/errors.hpp"

namespace chirp {

inline double mean(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 denominator).
inline double sample_stddev(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

inline double median(std::vector<double> xs) {
    if (xs.empty()) throw ValidationError("median of empty sample");
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    if (n % 2 == 1) return xs[n / 2];
    return 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

/// Average ranks (1-based); ties share the mean of their rank range.
inline std::vector<double> average_ranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double shared = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

struct WilsonInterval {
    double rate = 0.0;
    double low = 0.0;
    double high = 0.0;
};

/// 95% Wilson score interval for a binomial proportion.
inline WilsonInterval wilson_interval(std::size_t successes, std::size_t n) {
    if (n == 0) throw ValidationError("wilson_interval: empty sample");
    constexpr double z = 1.959963984540054; // 97.5th percentile of the standard normal
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = p + z2 / (2.0 * nn);
    const double spread = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    WilsonInterval w;
    w.rate = p;
    w.low = std::max(0.0, (center - spread) / denom);
    w.high = std::min(1.0, (center + spread) / denom);
    return w;
}

} // namespace chirp
