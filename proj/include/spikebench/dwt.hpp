#pragma once

// Orthonormal Haar multiresolution analysis plus the normality-deviation
// coefficient picker used by the wavelet feature extractor.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "spikebench/stats.hpp"

namespace spikebench {

/// Working length for the transform: smallest power of two >= len, capped at
/// 64. 66-sample spikes are truncated to 64; 22-sample approximations are
/// zero-padded to 32.
inline std::size_t haar_padded_length(std::size_t len) {
    if (len == 0) throw std::invalid_argument("haar_padded_length: empty input");
    std::size_t p = 1;
    while (p < len && p < 64) p <<= 1;
    return std::min<std::size_t>(p, 64);
}

/// Multi-level orthonormal Haar analysis. Per level,
/// approx[k] = (x[2k] + x[2k+1]) / sqrt(2) and
/// detail[k] = (x[2k] - x[2k+1]) / sqrt(2), recursing on the approximation.
/// Output layout: [approx_L, detail_L, ..., detail_1], total length equal to
/// the padded length, energy-preserving.
inline std::vector<double> haar_dwt(std::span<const double> s, int levels = 4) {
    if (levels < 1) throw std::invalid_argument("haar_dwt: levels must be >= 1");
    const std::size_t padded = haar_padded_length(s.size());
    if ((std::size_t{1} << levels) > padded) {
        throw std::invalid_argument("haar_dwt: decomposition too deep for input length");
    }
    const double sqrt2 = std::sqrt(2.0);
    std::vector<double> buf(padded, 0.0);
    const std::size_t ncopy = std::min(padded, s.size());
    std::copy(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(ncopy), buf.begin());

    std::vector<double> out(padded, 0.0);
    std::size_t m = padded;
    for (int level = 0; level < levels; ++level) {
        const std::size_t half = m / 2;
        for (std::size_t k = 0; k < half; ++k) {
            const double a = (buf[2 * k] + buf[2 * k + 1]) / sqrt2;
            const double d = (buf[2 * k] - buf[2 * k + 1]) / sqrt2;
            out[half + k] = d;
            buf[k] = a;  // buf[k] only read after both buf[2k], buf[2k+1]
        }
        m = half;
    }
    std::copy(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(m), out.begin());
    return out;
}

/// Picks the k coefficient columns whose distribution across spikes deviates
/// most from a fitted normal (KS distance), descending, smaller index on
/// ties. Needs at least 30 spikes.
inline std::vector<std::size_t> select_by_normality_deviation(
    const std::vector<std::vector<double>>& coefficients, std::size_t k = 10) {
    if (coefficients.size() < 30) throw std::invalid_argument("insufficient training data");
    const std::size_t cols = coefficients.front().size();
    for (const auto& row : coefficients) {
        if (row.size() != cols)
            throw std::invalid_argument("select_by_normality_deviation: ragged matrix");
    }
    std::vector<double> stat(cols, 0.0);
    std::vector<double> column(coefficients.size());
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i < coefficients.size(); ++i) column[i] = coefficients[i][j];
        stat[j] = ks_normality_deviation(column);
    }
    std::vector<std::size_t> idx(cols);
    for (std::size_t j = 0; j < cols; ++j) idx[j] = j;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (stat[a] != stat[b]) return stat[a] > stat[b];
        return a < b;
    });
    if (idx.size() > k) idx.resize(k);
    return idx;
}

}  // namespace spikebench
