#pragma once

// The on-chip feature extractors: adaptive discrete derivatives (ADD),
// zero-crossing features (ZCF), and the plain spike-shape pass-through.
// All of them accept both full and approximated spikes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikebench/stats.hpp"

namespace spikebench {

enum class FeatureKind { Add, Zcf, Shape, Dwt, Uglf, Upca };

inline const char* to_string(FeatureKind k) {
    switch (k) {
        case FeatureKind::Add: return "add";
        case FeatureKind::Zcf: return "zcf";
        case FeatureKind::Shape: return "shape";
        case FeatureKind::Dwt: return "dwt";
        case FeatureKind::Uglf: return "uglf";
        case FeatureKind::Upca: return "upca";
    }
    return "?";
}

inline FeatureKind parse_feature_kind(const std::string& name) {
    if (name == "add") return FeatureKind::Add;
    if (name == "zcf") return FeatureKind::Zcf;
    if (name == "shape") return FeatureKind::Shape;
    if (name == "dwt") return FeatureKind::Dwt;
    if (name == "uglf") return FeatureKind::Uglf;
    if (name == "upca") return FeatureKind::Upca;
    throw std::invalid_argument("unknown extractor '" + name + "'");
}

struct FeatureVector {
    std::vector<double> values;
    FeatureKind extractor = FeatureKind::Shape;

    std::size_t dim() const { return values.size(); }
};

/// Slope trace at one time scale: out[n - delta] = amp * (s(n) - s(n - delta)).
inline std::vector<double> add_coefficients(std::span<const double> s, std::size_t delta,
                                            double amp = 1.0) {
    if (delta < 1 || delta > 7) throw std::invalid_argument("add_coefficients: delta outside 1..7");
    if (delta >= s.size()) throw std::invalid_argument("add_coefficients: delta exceeds spike length");
    std::vector<double> out(s.size() - delta);
    for (std::size_t n = delta; n < s.size(); ++n) {
        out[n - delta] = amp * (s[n] - s[n - delta]);
    }
    return out;
}

/// Scale-selection config: the 1..7 delta range split into three frequency
/// sub-bands, one scale chosen per band.
struct AddConfig {
    double amp = 1.0;
    std::array<std::vector<std::size_t>, 3> subbands = {{{1, 2}, {3, 4, 5}, {6, 7}}};
};

struct AddScales {
    std::size_t d1 = 1;
    std::size_t d2 = 3;
    std::size_t d3 = 6;

    std::array<std::size_t, 3> all() const { return {d1, d2, d3}; }
};

/// Per sub-band, picks the delta whose pooled coefficient distribution
/// deviates most from normality (KS to a fitted normal); exact ties go to the
/// smaller delta. Pooling is order-free.
inline AddScales select_add_scales(const std::vector<std::vector<double>>& spikes,
                                   const AddConfig& cfg = {}) {
    if (spikes.size() < 30) throw std::invalid_argument("insufficient training data");
    std::array<std::size_t, 3> pick{};
    for (std::size_t b = 0; b < 3; ++b) {
        double best_stat = -1.0;
        std::size_t best_delta = 0;
        for (std::size_t delta : cfg.subbands[b]) {
            std::vector<double> pool;
            for (const auto& s : spikes) {
                const auto coeffs = add_coefficients(s, delta, cfg.amp);
                pool.insert(pool.end(), coeffs.begin(), coeffs.end());
            }
            const double stat = ks_normality_deviation(std::move(pool));
            if (stat > best_stat) {
                best_stat = stat;
                best_delta = delta;
            }
        }
        pick[b] = best_delta;
    }
    return {pick[0], pick[1], pick[2]};
}

/// ADD feature vector: the three slope traces at the selected scales,
/// concatenated.
inline FeatureVector add_features(std::span<const double> s, const AddScales& scales,
                                  double amp = 1.0) {
    FeatureVector fv;
    fv.extractor = FeatureKind::Add;
    for (std::size_t delta : scales.all()) {
        const auto coeffs = add_coefficients(s, delta, amp);
        fv.values.insert(fv.values.end(), coeffs.begin(), coeffs.end());
    }
    return fv;
}

/// Zero-crossing features. The spike is segmented into maximal same-sign
/// lobes (zeros attach to the preceding lobe; leading zeros belong to no
/// lobe). Six values: dominant positive-lobe area, dominant negative-lobe
/// area, global positive peak index, global negative peak index, and the two
/// dominant-lobe widths. Lobe areas are plain sample sums; missing lobes
/// contribute zeros.
inline FeatureVector zcf_features(std::span<const double> s) {
    if (s.size() < 2) throw std::invalid_argument("zcf_features: spike too short");

    struct Lobe {
        int sign = 0;
        double area = 0.0;
        std::size_t width = 0;
    };
    std::vector<Lobe> lobes;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const int sign = s[i] > 0.0 ? 1 : (s[i] < 0.0 ? -1 : 0);
        if (sign == 0) {
            if (!lobes.empty()) {
                lobes.back().area += s[i];
                lobes.back().width += 1;
            }
            continue;
        }
        if (lobes.empty() || lobes.back().sign != sign) {
            lobes.push_back({sign, 0.0, 0});
        }
        lobes.back().area += s[i];
        lobes.back().width += 1;
    }

    double pos_area = 0.0, neg_area = 0.0;
    double pos_width = 0.0, neg_width = 0.0;
    for (const Lobe& l : lobes) {
        if (l.sign > 0 && l.area > pos_area) {
            pos_area = l.area;
            pos_width = static_cast<double>(l.width);
        } else if (l.sign < 0 && l.area < neg_area) {
            neg_area = l.area;
            neg_width = static_cast<double>(l.width);
        }
    }

    double pos_peak = 0.0, neg_peak = 0.0;
    bool has_pos = false, has_neg = false;
    std::size_t pos_idx = 0, neg_idx = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] > 0.0 && (!has_pos || s[i] > pos_peak)) {
            has_pos = true;
            pos_peak = s[i];
            pos_idx = i;
        }
        if (s[i] < 0.0 && (!has_neg || s[i] < neg_peak)) {
            has_neg = true;
            neg_peak = s[i];
            neg_idx = i;
        }
    }

    FeatureVector fv;
    fv.extractor = FeatureKind::Zcf;
    fv.values = {pos_area,
                 neg_area,
                 has_pos ? static_cast<double>(pos_idx) : 0.0,
                 has_neg ? static_cast<double>(neg_idx) : 0.0,
                 pos_width,
                 neg_width};
    return fv;
}

/// All samples of the (peak-aligned) spike, unchanged.
inline FeatureVector spike_shape_features(std::span<const double> s) {
    FeatureVector fv;
    fv.extractor = FeatureKind::Shape;
    fv.values.assign(s.begin(), s.end());
    return fv;
}

}  // namespace spikebench
