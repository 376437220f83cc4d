#pragma once

// The spike approximation unit: cascaded discrete derivatives (FD/SD/TD),
// absolute-value peak ranking, and the non-uniform selection rule that keeps
// 22 of 66 samples. The retained set unions three-sample windows around the
// strongest curvature peaks (SD) with single samples at the strongest slope
// (FD) and higher-order (TD) peaks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "spikebench/waveform.hpp"

namespace spikebench {

/// Three cascaded difference sequences. Element i of fd corresponds to
/// source sample n = i + 1 (the "current sample" in s(n) - s(n-1));
/// sd is offset by 2 and td by 3.
struct DerivativeCascade {
    std::vector<double> fd;  // length N-1
    std::vector<double> sd;  // length N-2
    std::vector<double> td;  // length N-3
};

inline DerivativeCascade cascaded_derivatives(std::span<const double> s) {
    const std::size_t n = s.size();
    if (n < 4) throw std::invalid_argument("waveform too short for third derivative");
    DerivativeCascade c;
    c.fd.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) c.fd[i] = s[i + 1] - s[i];
    c.sd.resize(n - 2);
    for (std::size_t i = 0; i + 1 < c.fd.size(); ++i) c.sd[i] = c.fd[i + 1] - c.fd[i];
    c.td.resize(n - 3);
    for (std::size_t i = 0; i + 1 < c.sd.size(); ++i) c.td[i] = c.sd[i + 1] - c.sd[i];
    return c;
}

enum class DerivativeOrder { First, Second, Third };

/// Interior local maxima of |d|, ranked by magnitude.
struct RankedPeaks {
    std::vector<std::size_t> indices;  // positions within d, |d| descending
    DerivativeOrder source = DerivativeOrder::First;
};

/// Finds strict interior local maxima of the absolute sequence
/// (|d[i]| > |d[i-1]| and |d[i]| >= |d[i+1]|, so a plateau credits its first
/// index) and returns up to max_count of them ordered by |d| descending,
/// smaller index on ties. Boundary elements never qualify; sequences shorter
/// than 3 yield no peaks.
inline RankedPeaks rank_peaks(std::span<const double> d, std::size_t max_count,
                              DerivativeOrder source = DerivativeOrder::First) {
    RankedPeaks out;
    out.source = source;
    if (d.size() < 3) return out;
    for (std::size_t i = 1; i + 1 < d.size(); ++i) {
        if (std::abs(d[i]) > std::abs(d[i - 1]) && std::abs(d[i]) >= std::abs(d[i + 1])) {
            out.indices.push_back(i);
        }
    }
    std::stable_sort(out.indices.begin(), out.indices.end(),
                     [&](std::size_t a, std::size_t b) {
                         const double ma = std::abs(d[a]);
                         const double mb = std::abs(d[b]);
                         if (ma != mb) return ma > mb;
                         return a < b;
                     });
    if (out.indices.size() > max_count) out.indices.resize(max_count);
    return out;
}

/// Peak budget per derivative. Defaults give 4*3 + 7 + 3 = 22 samples.
struct SelectionRule {
    std::size_t sd_peaks = 4;
    std::size_t sd_window = 3;  // samples kept around each SD peak
    std::size_t fd_peaks = 7;
    std::size_t td_peaks = 3;
    std::size_t target_count = 22;
};

namespace detail {

/// Tracks selection state; insertions are priority-ordered so truncation to
/// the target simply drops the latest (lowest-priority) entries.
struct SelectionSet {
    std::vector<char> taken;
    std::vector<std::size_t> order;
    std::size_t target;

    SelectionSet(std::size_t n, std::size_t target_count)
        : taken(n, 0), order(), target(target_count) {
        order.reserve(target_count);
    }

    bool full() const { return order.size() >= target; }

    void try_add(std::size_t idx) {
        if (full() || idx >= taken.size() || taken[idx]) return;
        taken[idx] = 1;
        order.push_back(idx);
    }

    /// For an out-of-window candidate: walk inward from the clipped edge and
    /// take the nearest unselected sample instead.
    void add_clipped(std::ptrdiff_t idx) {
        if (full()) return;
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(taken.size());
        if (idx >= 0 && idx < n) {
            try_add(static_cast<std::size_t>(idx));
            return;
        }
        if (idx < 0) {
            for (std::ptrdiff_t j = 0; j < n; ++j) {
                if (!taken[static_cast<std::size_t>(j)]) {
                    try_add(static_cast<std::size_t>(j));
                    return;
                }
            }
        } else {
            for (std::ptrdiff_t j = n - 1; j >= 0; --j) {
                if (!taken[static_cast<std::size_t>(j)]) {
                    try_add(static_cast<std::size_t>(j));
                    return;
                }
            }
        }
    }
};

}  // namespace detail

/// Applies the selection rule to one spike and returns exactly
/// min(N, target_count) retained indices with their sample values.
///
/// Build order (highest priority first): SD windows, FD singles, TD singles;
/// on overlap shortfall, extension with next-ranked unused peaks in the order
/// SD, FD, TD; any remaining deficit is filled with the largest-|s| samples
/// (smaller index on ties). Window candidates falling outside [0, N-1] are
/// substituted by the nearest interior unselected sample.
inline ApproxSpike select_samples(const SpikeWaveform& s, const SelectionRule& rule = {}) {
    const std::size_t n = s.samples.size();
    const DerivativeCascade c = cascaded_derivatives(s.samples);
    const std::size_t target = std::min<std::size_t>(n, rule.target_count);

    const auto npos = static_cast<std::size_t>(-1);
    const RankedPeaks fd = rank_peaks(c.fd, npos, DerivativeOrder::First);
    const RankedPeaks sd = rank_peaks(c.sd, npos, DerivativeOrder::Second);
    const RankedPeaks td = rank_peaks(c.td, npos, DerivativeOrder::Third);

    // Map derivative positions to source-sample coordinates.
    auto src_fd = [](std::size_t i) { return i + 1; };
    auto src_sd = [](std::size_t i) { return i + 2; };
    auto src_td = [](std::size_t i) { return i + 3; };

    detail::SelectionSet sel(n, target);

    // SD windows: sd_window samples centred on the peak, left-heavy centring
    // for even windows.
    const std::ptrdiff_t left = static_cast<std::ptrdiff_t>((rule.sd_window - 1) / 2);
    for (std::size_t r = 0; r < std::min(rule.sd_peaks, sd.indices.size()); ++r) {
        const std::ptrdiff_t p = static_cast<std::ptrdiff_t>(src_sd(sd.indices[r]));
        for (std::ptrdiff_t off = -left;
             off < static_cast<std::ptrdiff_t>(rule.sd_window) - left; ++off) {
            sel.add_clipped(p + off);
        }
    }
    for (std::size_t r = 0; r < std::min(rule.fd_peaks, fd.indices.size()); ++r) {
        sel.try_add(src_fd(fd.indices[r]));
    }
    for (std::size_t r = 0; r < std::min(rule.td_peaks, td.indices.size()); ++r) {
        sel.try_add(src_td(td.indices[r]));
    }

    // Extension: next-ranked unused peaks, SD first, then FD, then TD.
    for (std::size_t r = rule.sd_peaks; r < sd.indices.size() && !sel.full(); ++r) {
        sel.try_add(src_sd(sd.indices[r]));
    }
    for (std::size_t r = rule.fd_peaks; r < fd.indices.size() && !sel.full(); ++r) {
        sel.try_add(src_fd(fd.indices[r]));
    }
    for (std::size_t r = rule.td_peaks; r < td.indices.size() && !sel.full(); ++r) {
        sel.try_add(src_td(td.indices[r]));
    }

    // Fill: largest-|s| unselected samples, smaller index on ties. This
    // always completes the set, so flat or degenerate spikes still yield
    // exactly `target` indices.
    if (!sel.full()) {
        std::vector<std::size_t> by_amp(n);
        for (std::size_t i = 0; i < n; ++i) by_amp[i] = i;
        std::stable_sort(by_amp.begin(), by_amp.end(), [&](std::size_t a, std::size_t b) {
            const double ma = std::abs(s.samples[a]);
            const double mb = std::abs(s.samples[b]);
            if (ma != mb) return ma > mb;
            return a < b;
        });
        for (std::size_t i : by_amp) {
            if (sel.full()) break;
            sel.try_add(i);
        }
    }

    ApproxSpike out;
    out.source_length = n;
    out.indices.assign(sel.order.begin(), sel.order.end());
    std::sort(out.indices.begin(), out.indices.end());
    out.values.resize(out.indices.size());
    for (std::size_t i = 0; i < out.indices.size(); ++i) {
        out.values[i] = s.samples[out.indices[i]];
    }
    return out;
}

struct OpCount {
    long long adds = 0;
    long long muls = 0;
};

/// Arithmetic cost of the approximation unit itself: three difference passes,
/// (n-1) + (n-2) + (n-3) additions and no multiplications.
inline OpCount approximation_cost(long long n) {
    if (n < 4) throw std::invalid_argument("approximation_cost: n must be at least 4");
    return {3 * n - 6, 0};
}

}  // namespace spikebench
