#pragma once

// File formats and serialization. All floating-point output goes through
// std::to_chars (shortest round-trip form) so that files regenerate
// byte-identically for identical inputs.
//
// Formats:
//   waveform file:   header "n_samples=<N>,period_us=<float>", then one
//                    spike per line as comma-separated samples.
//   approx file:     same header, then "indices=<i;...>,values=<v;...>".
//   stream file:     one header line echoing the full config (seed included),
//                    then "channel,template_id,<samples...>".
//   config file:     flat key=value lines, '#' comments.
//   report CSVs:     see the write_* helpers.

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "spikebench/experiment.hpp"
#include "spikebench/features.hpp"
#include "spikebench/projections.hpp"
#include "spikebench/simgen.hpp"
#include "spikebench/version.hpp"
#include "spikebench/waveform.hpp"

namespace spikebench {

inline std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view text) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::runtime_error("bad number '" + std::string(text) + "'");
    }
    return v;
}

template <typename Int>
inline Int parse_integer(std::string_view text) {
    Int v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::runtime_error("bad integer '" + std::string(text) + "'");
    }
    return v;
}

inline std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(text.substr(start));
            return parts;
        }
        parts.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

// ---------------------------------------------------------------------------
// FNV-1a 64-bit content digests (offset 14695981039346656037, prime
// 1099511628211), printed as 16 hex digits.

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string digest_hex(std::uint64_t h) {
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline std::string file_digest(const std::string& path) {
    return digest_hex(fnv1a64(read_file(path)));
}

// ---------------------------------------------------------------------------
// Waveform files

inline std::string serialize_waveforms(std::span<const SpikeWaveform> spikes) {
    if (spikes.empty()) throw std::invalid_argument("serialize_waveforms: no spikes");
    std::string out = "n_samples=" + std::to_string(spikes.front().samples.size()) +
                      ",period_us=" + format_double(spikes.front().sample_period * 1e6) + "\n";
    for (const SpikeWaveform& w : spikes) {
        for (std::size_t i = 0; i < w.samples.size(); ++i) {
            if (i) out += ',';
            out += format_double(w.samples[i]);
        }
        out += '\n';
    }
    return out;
}

inline std::vector<SpikeWaveform> parse_waveforms(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty waveform file");
    const auto header = split(line, ',');
    if (header.size() != 2 || !header[0].starts_with("n_samples=") ||
        !header[1].starts_with("period_us=")) {
        throw std::runtime_error("bad waveform header '" + line + "'");
    }
    const auto n = parse_integer<std::size_t>(header[0].substr(10));
    const double period_us = parse_double(header[1].substr(10));
    std::vector<SpikeWaveform> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        SpikeWaveform w;
        w.sample_period = period_us * 1e-6;
        for (const auto part : split(line, ',')) w.samples.push_back(parse_double(part));
        if (w.samples.size() != n) throw std::runtime_error("waveform length differs from header");
        w.peak_index = find_peak(w.samples);
        out.push_back(std::move(w));
    }
    return out;
}

// ---------------------------------------------------------------------------
// ApproxSpike files

inline std::string serialize_approx(std::span<const ApproxSpike> spikes, double period_us) {
    if (spikes.empty()) throw std::invalid_argument("serialize_approx: no spikes");
    std::string out = "n_samples=" + std::to_string(spikes.front().source_length) +
                      ",period_us=" + format_double(period_us) + "\n";
    for (const ApproxSpike& a : spikes) {
        out += "indices=";
        for (std::size_t i = 0; i < a.indices.size(); ++i) {
            if (i) out += ';';
            out += std::to_string(a.indices[i]);
        }
        out += ",values=";
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            if (i) out += ';';
            out += format_double(a.values[i]);
        }
        out += '\n';
    }
    return out;
}

inline std::pair<std::vector<ApproxSpike>, double> parse_approx(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty approx file");
    const auto header = split(line, ',');
    if (header.size() != 2 || !header[0].starts_with("n_samples=")) {
        throw std::runtime_error("bad approx header '" + line + "'");
    }
    const auto n = parse_integer<std::size_t>(header[0].substr(10));
    const double period_us = parse_double(header[1].substr(10));
    std::vector<ApproxSpike> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::size_t comma = line.find(",values=");
        if (!line.starts_with("indices=") || comma == std::string::npos) {
            throw std::runtime_error("bad approx line '" + line + "'");
        }
        ApproxSpike a;
        a.source_length = n;
        for (const auto part : split(std::string_view(line).substr(8, comma - 8), ';')) {
            a.indices.push_back(parse_integer<std::size_t>(part));
        }
        for (const auto part : split(std::string_view(line).substr(comma + 8), ';')) {
            a.values.push_back(parse_double(part));
        }
        if (a.indices.size() != a.values.size()) {
            throw std::runtime_error("approx line index/value count mismatch");
        }
        out.push_back(std::move(a));
    }
    return {std::move(out), period_us};
}

// ---------------------------------------------------------------------------
// Stream files

struct StreamHeader {
    std::uint64_t seed = 1;
    double sigma_n = 0.0;
    int spikes_per_template = 100;
    int n_samples = 66;
    double duration_ms = 2.0;
    std::size_t align_index = 20;
    AlignMode align_mode = AlignMode::AbsolutePeak;
    std::string channels = "default";
    std::string rng = kRngAlgorithm;
    std::string version = kVersion;
};

inline StreamHeader stream_header_from_config(const StreamConfig& cfg) {
    StreamHeader h;
    h.seed = cfg.seed;
    h.sigma_n = cfg.sigma_n;
    h.spikes_per_template =
        cfg.channels.empty() ? 0 : cfg.channels.front().spikes_per_template;
    h.n_samples = cfg.channels.empty() ? 66 : cfg.channels.front().templates[0].n_samples;
    h.duration_ms = cfg.channels.empty() ? 2.0 : cfg.channels.front().templates[0].duration_ms;
    h.align_index = cfg.align_index;
    h.align_mode = cfg.align_mode;
    return h;
}

inline std::string serialize_stream_header(const StreamHeader& h) {
    return "# spikebench-stream v" + std::string(h.version) + " seed=" + std::to_string(h.seed) +
           " sigma_n=" + format_double(h.sigma_n) +
           " spikes_per_template=" + std::to_string(h.spikes_per_template) +
           " n_samples=" + std::to_string(h.n_samples) +
           " duration_ms=" + format_double(h.duration_ms) +
           " align_index=" + std::to_string(h.align_index) +
           " align_mode=" + (h.align_mode == AlignMode::AbsolutePeak ? "abs" : "pos") +
           " channels=" + h.channels + " rng=" + h.rng + "\n";
}

inline std::string serialize_stream(const StreamConfig& cfg, std::span<const LabeledSpike> stream,
                                    std::string channels_tag = "default") {
    StreamHeader h = stream_header_from_config(cfg);
    h.channels = std::move(channels_tag);
    std::string out = serialize_stream_header(h);
    for (const LabeledSpike& s : stream) {
        out += std::to_string(s.channel_id);
        out += ',';
        out += std::to_string(s.template_id);
        for (const double v : s.waveform.samples) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

inline std::pair<StreamHeader, std::vector<LabeledSpike>> parse_stream(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line) || !line.starts_with("# spikebench-stream ")) {
        throw std::runtime_error("bad stream header");
    }
    StreamHeader h;
    for (const auto token : split(line, ' ')) {
        const std::size_t eq = token.find('=');
        if (eq == std::string_view::npos) continue;
        const auto key = token.substr(0, eq);
        const auto val = token.substr(eq + 1);
        if (key == "seed") h.seed = parse_integer<std::uint64_t>(val);
        else if (key == "sigma_n") h.sigma_n = parse_double(val);
        else if (key == "spikes_per_template") h.spikes_per_template = parse_integer<int>(val);
        else if (key == "n_samples") h.n_samples = parse_integer<int>(val);
        else if (key == "duration_ms") h.duration_ms = parse_double(val);
        else if (key == "align_index") h.align_index = parse_integer<std::size_t>(val);
        else if (key == "align_mode")
            h.align_mode = val == "pos" ? AlignMode::PositivePeak : AlignMode::AbsolutePeak;
        else if (key == "channels") h.channels = std::string(val);
        else if (key == "rng") h.rng = std::string(val);
    }
    std::vector<LabeledSpike> stream;
    const double period = h.duration_ms * 1e-3 / h.n_samples;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        const auto parts = split(line, ',');
        if (parts.size() != static_cast<std::size_t>(h.n_samples) + 2) {
            throw std::runtime_error("stream line sample count differs from header");
        }
        LabeledSpike s;
        s.channel_id = parse_integer<int>(parts[0]);
        s.template_id = parse_integer<int>(parts[1]);
        if (s.template_id < 0 || s.template_id > 2) {
            throw std::runtime_error("stream template_id outside 0..2");
        }
        s.waveform.sample_period = period;
        s.waveform.samples.reserve(static_cast<std::size_t>(h.n_samples));
        for (std::size_t i = 2; i < parts.size(); ++i) {
            s.waveform.samples.push_back(parse_double(parts[i]));
        }
        s.waveform.peak_index = find_peak(s.waveform.samples, h.align_mode);
        stream.push_back(std::move(s));
    }
    return {std::move(h), std::move(stream)};
}

// ---------------------------------------------------------------------------
// Generator config files (flat key=value)

struct GeneratorConfig {
    std::uint64_t seed = 1;
    double sigma_n = 0.0;
    int spikes_per_template = 100;
    std::size_t align_index = 20;
    AlignMode align_mode = AlignMode::AbsolutePeak;
    std::string channels = "default";
};

inline GeneratorConfig parse_generator_config(const std::string& content) {
    GeneratorConfig cfg;
    std::istringstream in(content);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
            line.pop_back();
        }
        std::size_t start = 0;
        while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
        if (start == line.size()) continue;
        const std::string_view entry = std::string_view(line).substr(start);
        const std::size_t eq = entry.find('=');
        if (eq == std::string_view::npos) {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     " is not key=value: '" + std::string(entry) + "'");
        }
        const auto key = entry.substr(0, eq);
        const auto val = entry.substr(eq + 1);
        if (key == "seed") cfg.seed = parse_integer<std::uint64_t>(val);
        else if (key == "sigma_n") {
            cfg.sigma_n = parse_double(val);
            if (cfg.sigma_n < 0.0) throw std::runtime_error("sigma_n must be non-negative");
        } else if (key == "spikes_per_template") {
            cfg.spikes_per_template = parse_integer<int>(val);
            if (cfg.spikes_per_template < 1) {
                throw std::runtime_error("spikes_per_template must be positive");
            }
        } else if (key == "align_index") cfg.align_index = parse_integer<std::size_t>(val);
        else if (key == "align_mode") {
            if (val == "abs") cfg.align_mode = AlignMode::AbsolutePeak;
            else if (val == "pos") cfg.align_mode = AlignMode::PositivePeak;
            else throw std::runtime_error("align_mode must be abs or pos");
        } else if (key == "channels") {
            if (val != "default") {
                throw std::runtime_error("channels must be 'default' (custom template sets are a "
                                         "programmatic API)");
            }
        } else {
            throw std::runtime_error("unknown config key '" + std::string(key) + "'");
        }
    }
    return cfg;
}

inline StreamConfig build_stream_config(const GeneratorConfig& g) {
    StreamConfig cfg;
    cfg.seed = g.seed;
    cfg.sigma_n = g.sigma_n;
    cfg.align_index = g.align_index;
    cfg.align_mode = g.align_mode;
    cfg.channels =
        build_default_channels(g.seed, g.spikes_per_template, g.align_index, g.align_mode);
    return cfg;
}

// ---------------------------------------------------------------------------
// Report CSVs

inline std::string serialize_cells_csv(std::span<const CellReport> cells) {
    std::string out = "sigma,channel,extractor,n_samples,cer,n_add,n_mul,comp\n";
    for (const CellReport& c : cells) {
        out += format_double(c.sigma);
        out += ',' + std::to_string(c.channel);
        out += ',';
        out += to_string(c.extractor);
        out += ',' + std::to_string(c.n_samples);
        out += ',' + format_double(c.cer);
        out += ',' + std::to_string(c.cost.n_add);
        out += ',' + std::to_string(c.cost.n_mul);
        out += ',' + std::to_string(c.cost.comp());
        out += '\n';
    }
    return out;
}

inline std::string serialize_summary_csv(std::span<const SummaryRow> rows) {
    std::string out = "sigma,extractor,n_samples,mean_cer,n_add,n_mul,comp\n";
    for (const SummaryRow& r : rows) {
        out += format_double(r.sigma);
        out += ',';
        out += to_string(r.extractor);
        out += ',' + std::to_string(r.n_samples);
        out += ',' + format_double(r.mean_cer);
        out += ',' + std::to_string(r.n_add);
        out += ',' + std::to_string(r.n_mul);
        out += ',' + std::to_string(r.comp);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fitted projections and feature vectors

inline std::string serialize_projection(const Projection& p) {
    std::string out = "kind=" + std::string(to_string(p.kind)) + ",k=" + std::to_string(p.k()) +
                      ",n=" + std::to_string(p.n()) + ",channel=" + std::to_string(p.channel_id) +
                      "\n";
    for (const auto& row : p.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

inline Projection parse_projection(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty projection file");
    Projection p;
    std::size_t k = 0, n = 0;
    for (const auto token : split(line, ',')) {
        const std::size_t eq = token.find('=');
        if (eq == std::string_view::npos) throw std::runtime_error("bad projection header");
        const auto key = token.substr(0, eq);
        const auto val = token.substr(eq + 1);
        if (key == "kind") p.kind = val == "uglf" ? ProjectionKind::Uglf : ProjectionKind::Upca;
        else if (key == "k") k = parse_integer<std::size_t>(val);
        else if (key == "n") n = parse_integer<std::size_t>(val);
        else if (key == "channel") p.channel_id = parse_integer<int>(val);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto part : split(line, ',')) row.push_back(parse_double(part));
        if (row.size() != n) throw std::runtime_error("projection row length differs from header");
        p.rows.push_back(std::move(row));
    }
    if (p.rows.size() != k) throw std::runtime_error("projection row count differs from header");
    return p;
}

inline std::string serialize_features_csv(std::span<const FeatureVector> features,
                                          std::span<const std::string> spike_ids) {
    if (features.size() != spike_ids.size()) {
        throw std::invalid_argument("serialize_features_csv: id/vector count mismatch");
    }
    if (features.empty()) throw std::invalid_argument("serialize_features_csv: no features");
    std::string out = "# features extractor=" + std::string(to_string(features[0].extractor)) +
                      " dim=" + std::to_string(features[0].dim()) + "\n";
    for (std::size_t i = 0; i < features.size(); ++i) {
        out += spike_ids[i];
        for (const double v : features[i].values) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

}  // namespace spikebench
