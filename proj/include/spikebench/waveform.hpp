#pragma once

// Core waveform types shared by the whole chain: a detected, peak-aligned,
// amplitude-normalized spike window and its non-uniformly sampled
// approximation. All operations are pure; values are safe to share across
// threads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace spikebench {

enum class AlignMode { AbsolutePeak, PositivePeak };

/// A detected spike window. `sample_period` is in seconds (2 ms / N for the
/// default corpus); `peak_index` tracks the absolute-maximum sample.
struct SpikeWaveform {
    std::vector<double> samples;
    double sample_period = 0.0;
    std::size_t peak_index = 0;
};

/// Index of the waveform peak; ties resolve to the smallest index.
inline std::size_t find_peak(std::span<const double> s, AlignMode mode = AlignMode::AbsolutePeak) {
    if (s.empty()) throw std::invalid_argument("find_peak: empty waveform");
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double a = mode == AlignMode::AbsolutePeak ? std::abs(s[i]) : s[i];
        const double b = mode == AlignMode::AbsolutePeak ? std::abs(s[best]) : s[best];
        if (a > b) best = i;
    }
    return best;
}

/// Scales so that max(|samples|) == 1. Throws on an all-zero window.
inline SpikeWaveform normalize_amplitude(const SpikeWaveform& w) {
    double peak = 0.0;
    for (double v : w.samples) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) throw std::invalid_argument("degenerate waveform");
    SpikeWaveform out = w;
    for (double& v : out.samples) v /= peak;
    return out;
}

/// Shifts the waveform so its peak lands on `target_index`. No wraparound:
/// samples pushed past either edge are discarded and the vacated end is
/// zero-filled, so the length never changes.
inline SpikeWaveform align_peak(const SpikeWaveform& w, std::size_t target_index,
                                AlignMode mode = AlignMode::AbsolutePeak) {
    const std::size_t n = w.samples.size();
    if (target_index >= n) throw std::invalid_argument("align_peak: target index out of range");
    const std::size_t peak = find_peak(w.samples, mode);
    SpikeWaveform out;
    out.sample_period = w.sample_period;
    out.peak_index = target_index;
    out.samples.assign(n, 0.0);
    const std::ptrdiff_t shift =
        static_cast<std::ptrdiff_t>(target_index) - static_cast<std::ptrdiff_t>(peak);
    for (std::size_t i = 0; i < n; ++i) {
        const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(i) - shift;
        if (src >= 0 && src < static_cast<std::ptrdiff_t>(n)) {
            out.samples[i] = w.samples[static_cast<std::size_t>(src)];
        }
    }
    return out;
}

/// The retained-index view of a spike: P = min(N, 22) of the original N
/// samples. Values are copied verbatim from the source (no interpolation).
struct ApproxSpike {
    std::size_t source_length = 0;
    std::vector<std::size_t> indices;
    std::vector<double> values;
};

/// Piecewise-linear reconstruction of an ApproxSpike back to its source
/// length; held constant before the first and after the last retained index.
inline std::vector<double> reconstruct_linear(const ApproxSpike& a) {
    if (a.indices.empty()) throw std::invalid_argument("reconstruct_linear: empty approximation");
    std::vector<double> out(a.source_length, 0.0);
    std::size_t seg = 0;
    for (std::size_t t = 0; t < a.source_length; ++t) {
        if (t <= a.indices.front()) {
            out[t] = a.values.front();
            continue;
        }
        if (t >= a.indices.back()) {
            out[t] = a.values.back();
            continue;
        }
        while (a.indices[seg + 1] < t) ++seg;
        const double x0 = static_cast<double>(a.indices[seg]);
        const double x1 = static_cast<double>(a.indices[seg + 1]);
        const double f = (static_cast<double>(t) - x0) / (x1 - x0);
        out[t] = a.values[seg] + f * (a.values[seg + 1] - a.values[seg]);
    }
    return out;
}

}  // namespace spikebench
