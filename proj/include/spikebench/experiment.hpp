#pragma once

// The experiment runner: per recording channel, optionally approximate the
// spikes, fit the channel's extractor, extract, cluster with k-means, and
// score the classification error against ground truth, attaching the cost
// model's operation counts. Cells are independent and deterministic per
// seed.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "spikebench/approx.hpp"
#include "spikebench/cer.hpp"
#include "spikebench/cost.hpp"
#include "spikebench/dwt.hpp"
#include "spikebench/features.hpp"
#include "spikebench/kmeans.hpp"
#include "spikebench/projections.hpp"
#include "spikebench/simgen.hpp"

namespace spikebench {

struct ExtractorParams {
    std::size_t proj_k = 3;     // uGLF/uPCA output dimensions
    std::size_t knn = 5;        // uGLF graph neighbourhood
    std::size_t dwt_keep = 10;  // selected wavelet coefficients
    int dwt_levels = 4;
    AddConfig add;
};

/// Immutable fitted state for one (channel, extractor, length) cell.
struct FittedExtractor {
    FeatureKind kind = FeatureKind::Shape;
    std::size_t input_length = 0;
    AddScales add_scales;                  // Add
    double add_amp = 1.0;                  // Add
    std::vector<std::size_t> dwt_indices;  // Dwt
    int dwt_levels = 4;                    // Dwt
    Projection projection;                 // Uglf / Upca
};

inline FittedExtractor fit_extractor(FeatureKind kind,
                                     const std::vector<std::vector<double>>& train,
                                     const ExtractorParams& params = {}) {
    if (train.empty()) throw std::invalid_argument("fit_extractor: no training spikes");
    FittedExtractor fe;
    fe.kind = kind;
    fe.input_length = train.front().size();
    switch (kind) {
        case FeatureKind::Add:
            fe.add_scales = select_add_scales(train, params.add);
            fe.add_amp = params.add.amp;
            break;
        case FeatureKind::Zcf:
        case FeatureKind::Shape:
            break;  // stateless
        case FeatureKind::Dwt: {
            std::vector<std::vector<double>> coeffs;
            coeffs.reserve(train.size());
            for (const auto& s : train) coeffs.push_back(haar_dwt(s, params.dwt_levels));
            fe.dwt_indices = select_by_normality_deviation(coeffs, params.dwt_keep);
            fe.dwt_levels = params.dwt_levels;
            break;
        }
        case FeatureKind::Uglf:
            fe.projection = fit_uglf(train, params.proj_k, params.knn);
            break;
        case FeatureKind::Upca:
            fe.projection = fit_upca(train, params.proj_k);
            break;
    }
    return fe;
}

inline FeatureVector extract_features(const FittedExtractor& fe, std::span<const double> s) {
    if (s.size() != fe.input_length) {
        throw std::invalid_argument("extract_features: length differs from fitted length");
    }
    switch (fe.kind) {
        case FeatureKind::Add: return add_features(s, fe.add_scales, fe.add_amp);
        case FeatureKind::Zcf: return zcf_features(s);
        case FeatureKind::Shape: return spike_shape_features(s);
        case FeatureKind::Dwt: {
            const auto coeffs = haar_dwt(s, fe.dwt_levels);
            FeatureVector fv;
            fv.extractor = FeatureKind::Dwt;
            fv.values.reserve(fe.dwt_indices.size());
            for (std::size_t idx : fe.dwt_indices) fv.values.push_back(coeffs[idx]);
            return fv;
        }
        case FeatureKind::Uglf:
        case FeatureKind::Upca: return project(fe.projection, s);
    }
    throw std::invalid_argument("extract_features: unknown extractor");
}

enum class ApproxMode { Off, On, Both };

/// Retained-index mask for a whole recording channel: the selection rule
/// applied to the channel's mean absolute waveform. Individual spikes keep
/// per-spike selections (the unit's contract), but clustering needs every
/// spike of a channel sampled at the same positions, so the channel pipeline
/// refreshes one mask per channel block, like the updated extractors.
inline std::vector<std::size_t> select_channel_mask(
    const std::vector<std::vector<double>>& spikes, const SelectionRule& rule = {}) {
    if (spikes.empty()) throw std::invalid_argument("select_channel_mask: no spikes");
    SpikeWaveform mean_abs;
    mean_abs.samples.assign(spikes.front().size(), 0.0);
    for (const auto& s : spikes) {
        if (s.size() != mean_abs.samples.size()) {
            throw std::invalid_argument("select_channel_mask: ragged spikes");
        }
        for (std::size_t i = 0; i < s.size(); ++i) mean_abs.samples[i] += std::abs(s[i]);
    }
    for (double& v : mean_abs.samples) v /= static_cast<double>(spikes.size());
    mean_abs.peak_index = find_peak(mean_abs.samples);
    return select_samples(mean_abs, rule).indices;
}

inline ApproxMode parse_approx_mode(const std::string& name) {
    if (name == "off") return ApproxMode::Off;
    if (name == "on") return ApproxMode::On;
    if (name == "both") return ApproxMode::Both;
    throw std::invalid_argument("unknown approx mode '" + name + "' (expected on, off or both)");
}

/// One report cell: a (sigma, channel, extractor, length) combination.
struct CellReport {
    double sigma = 0.0;
    int channel = 0;
    FeatureKind extractor = FeatureKind::Shape;
    int n_samples = 0;
    double cer = 0.0;
    CostReport cost;
};

struct ExperimentOptions {
    int z = 3;
    int restarts = 10;
    bool standardize = true;  // z-score mixed-unit feature spaces before clustering
    ExtractorParams params;
    SelectionRule rule;
    int k_channels = 9;    // cost-model constants
    int w_waveforms = 3;
};

namespace detail {

/// Whether an extractor mixes measurement units across its dimensions.
/// Zero-crossing features put lobe areas, peak indices and widths side by
/// side, so Euclidean distances need per-dimension scaling there. Every
/// other extractor emits homogeneous amplitude-unit values with isotropic
/// noise (orthonormal or near-orthonormal views of the spike), where
/// z-scoring would only amplify noise-dominated dimensions.
inline bool mixed_unit_features(FeatureKind kind) { return kind == FeatureKind::Zcf; }

/// Per-dimension z-scoring ahead of the Euclidean clustering step.
/// Constant dimensions are left centred at zero.
inline void standardize_features(std::vector<std::vector<double>>& feats) {
    if (feats.empty()) return;
    const std::size_t dim = feats.front().size();
    const auto m = static_cast<double>(feats.size());
    for (std::size_t d = 0; d < dim; ++d) {
        double mu = 0.0;
        for (const auto& f : feats) mu += f[d];
        mu /= m;
        double var = 0.0;
        for (const auto& f : feats) var += (f[d] - mu) * (f[d] - mu);
        const double sd = std::sqrt(var / m);
        const double scale = sd > 1e-12 * std::max(1.0, std::abs(mu)) ? 1.0 / sd : 0.0;
        for (auto& f : feats) f[d] = (f[d] - mu) * scale;
    }
}

inline CellReport evaluate_cell(const std::vector<std::vector<double>>& spikes,
                                const std::vector<int>& truth, double sigma, int channel,
                                FeatureKind kind, bool approximated, int n_original,
                                const ExperimentOptions& opt, std::uint64_t seed) {
    const FittedExtractor fe = fit_extractor(kind, spikes, opt.params);
    std::vector<std::vector<double>> feats;
    feats.reserve(spikes.size());
    for (const auto& s : spikes) feats.push_back(extract_features(fe, s).values);
    if (opt.standardize && mixed_unit_features(kind)) standardize_features(feats);

    const std::uint64_t cell_seed = derive_seed(
        seed, {static_cast<std::uint64_t>(channel), static_cast<std::uint64_t>(kind),
               static_cast<std::uint64_t>(spikes.front().size()),
               std::bit_cast<std::uint64_t>(sigma)});
    const KMeansResult km = kmeans(feats, opt.z, opt.restarts, cell_seed);

    CellReport cell;
    cell.sigma = sigma;
    cell.channel = channel;
    cell.extractor = kind;
    cell.n_samples = static_cast<int>(spikes.front().size());
    cell.cer = classification_error(km.labels, truth);
    cell.cost = fe_cost(kind, cell.n_samples, opt.k_channels, opt.w_waveforms,
                        approximated ? n_original : 0);
    return cell;
}

}  // namespace detail

/// Runs every requested (channel, extractor, length) cell on one labeled
/// stream, scoring CER against template ground truth. `sigma_label` is the
/// noise level recorded in the report rows.
inline std::vector<CellReport> run_experiment(const std::vector<LabeledSpike>& stream,
                                              const std::vector<FeatureKind>& extractors,
                                              ApproxMode approx, double sigma_label,
                                              std::uint64_t seed,
                                              const ExperimentOptions& opt = {}) {
    if (stream.empty()) throw std::invalid_argument("run_experiment: empty stream");
    if (extractors.empty()) throw std::invalid_argument("run_experiment: no extractors");

    std::map<int, std::vector<std::size_t>> by_channel;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        by_channel[stream[i].channel_id].push_back(i);
    }

    std::vector<CellReport> cells;
    for (const auto& [channel, idxs] : by_channel) {
        std::vector<std::vector<double>> full;
        std::vector<int> truth;
        full.reserve(idxs.size());
        truth.reserve(idxs.size());
        for (std::size_t i : idxs) {
            full.push_back(stream[i].waveform.samples);
            truth.push_back(stream[i].template_id);
        }
        const int n_original = static_cast<int>(full.front().size());

        std::vector<std::vector<double>> approximated;
        if (approx != ApproxMode::Off) {
            const std::vector<std::size_t> mask = select_channel_mask(full, opt.rule);
            approximated.reserve(idxs.size());
            for (const auto& spike : full) {
                std::vector<double> values(mask.size());
                for (std::size_t k = 0; k < mask.size(); ++k) values[k] = spike[mask[k]];
                approximated.push_back(std::move(values));
            }
        }

        for (FeatureKind kind : extractors) {
            if (approx != ApproxMode::On) {
                cells.push_back(detail::evaluate_cell(full, truth, sigma_label, channel, kind,
                                                      false, n_original, opt, seed));
            }
            if (approx != ApproxMode::Off) {
                cells.push_back(detail::evaluate_cell(approximated, truth, sigma_label, channel,
                                                      kind, true, n_original, opt, seed));
            }
        }
    }
    return cells;
}

/// Adds noise at `sigma` to every spike of a base stream, deterministically
/// per (seed, sigma bits) so results do not depend on the position of sigma
/// in a sweep list. Window positions are kept (noise does not re-trigger
/// alignment, matching the generator). sigma = 0 returns the stream as-is.
inline std::vector<LabeledSpike> renoise_stream(const std::vector<LabeledSpike>& base,
                                                double sigma, std::uint64_t seed) {
    if (sigma == 0.0) return base;
    SeededRng rng(derive_seed(seed, {0x6e6f'6973'65ULL, std::bit_cast<std::uint64_t>(sigma)}));
    std::vector<LabeledSpike> out;
    out.reserve(base.size());
    for (const LabeledSpike& spike : base) {
        LabeledSpike noisy = spike;
        add_gaussian_noise(noisy.waveform.samples, sigma, rng);
        noisy.waveform.peak_index = find_peak(noisy.waveform.samples);
        out.push_back(std::move(noisy));
    }
    return out;
}

/// Full sweep: for each sigma, noise the base corpus and run every cell.
inline std::vector<CellReport> run_sweep(const std::vector<LabeledSpike>& base,
                                         const std::vector<double>& sigmas,
                                         const std::vector<FeatureKind>& extractors,
                                         ApproxMode approx, std::uint64_t seed,
                                         const ExperimentOptions& opt = {}) {
    if (sigmas.empty()) throw std::invalid_argument("run_sweep: no noise levels");
    std::vector<CellReport> cells;
    for (double sigma : sigmas) {
        const auto noised = renoise_stream(base, sigma, seed);
        auto batch = run_experiment(noised, extractors, approx, sigma, seed, opt);
        cells.insert(cells.end(), batch.begin(), batch.end());
    }
    return cells;
}

/// Channel-mean CER per (sigma, extractor, length), ordered by that key.
struct SummaryRow {
    double sigma = 0.0;
    FeatureKind extractor = FeatureKind::Shape;
    int n_samples = 0;
    double mean_cer = 0.0;
    long long n_add = 0;
    long long n_mul = 0;
    long long comp = 0;
};

inline std::vector<SummaryRow> summarize(const std::vector<CellReport>& cells) {
    std::map<std::tuple<double, int, int>, std::pair<SummaryRow, int>> acc;
    for (const CellReport& c : cells) {
        const auto key = std::make_tuple(c.sigma, static_cast<int>(c.extractor), -c.n_samples);
        auto& [row, count] = acc[key];
        if (count == 0) {
            row.sigma = c.sigma;
            row.extractor = c.extractor;
            row.n_samples = c.n_samples;
            row.n_add = c.cost.n_add;
            row.n_mul = c.cost.n_mul;
            row.comp = c.cost.comp();
        }
        row.mean_cer += c.cer;
        count += 1;
    }
    std::vector<SummaryRow> rows;
    rows.reserve(acc.size());
    for (auto& [key, entry] : acc) {
        entry.first.mean_cer /= entry.second;
        rows.push_back(entry.first);
    }
    return rows;
}

}  // namespace spikebench
