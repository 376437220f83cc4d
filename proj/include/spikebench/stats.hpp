#pragma once

// Small statistics helpers shared across modules.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace spikebench {

inline double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean of empty sequence");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Unbiased sample variance (n-1 divisor); 0 for fewer than two samples.
inline double sample_variance(std::span<const double> x, double mu) {
    if (x.size() < 2) return 0.0;
    double s = 0.0;
    for (double v : x) s += (v - mu) * (v - mu);
    return s / static_cast<double>(x.size() - 1);
}

inline double sample_variance(std::span<const double> x) {
    return sample_variance(x, mean(x));
}

/// Pearson correlation; 0 when either side has zero variance.
inline double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("pearson_correlation: size mismatch");
    const double ma = mean(a);
    const double mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

/// Median of a copy; even counts average the two middle elements.
inline double median(std::vector<double> x) {
    if (x.empty()) throw std::invalid_argument("median of empty sequence");
    std::sort(x.begin(), x.end());
    const std::size_t m = x.size() / 2;
    if (x.size() % 2 == 1) return x[m];
    return 0.5 * (x[m - 1] + x[m]);
}

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

/// Kolmogorov-Smirnov distance between the empirical distribution of `x` and
/// a normal with the sample's own mean and variance (Lilliefors-style, no
/// small-sample correction -- only the ordering is used by callers).
/// Zero-variance samples score 0 by definition, so degenerate columns are
/// never "most non-Gaussian".
///
/// Moments are computed on the sorted copy, which makes the result invariant
/// to the order of pooled inputs.
inline double ks_normality_deviation(std::vector<double> x) {
    const std::size_t m = x.size();
    if (m < 2) return 0.0;
    std::sort(x.begin(), x.end());
    const double mu = mean(x);
    const double sd = std::sqrt(sample_variance(x, mu));
    if (sd <= 1e-12 * std::max(1.0, std::abs(mu))) return 0.0;
    double d = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double f = normal_cdf((x[i] - mu) / sd);
        const double lo = static_cast<double>(i) / static_cast<double>(m);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(m);
        d = std::max(d, std::max(hi - f, f - lo));
    }
    return d;
}

}  // namespace spikebench
