// spikebench CLI: generate synthetic labeled spike streams, run
// CER/complexity sweeps over the feature extractors with the approximation
// unit on or off, and dump per-spike approximation tables.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spikebench/approx.hpp"
#include "spikebench/cost.hpp"
#include "spikebench/experiment.hpp"
#include "spikebench/io.hpp"
#include "spikebench/simgen.hpp"
#include "spikebench/stats.hpp"
#include "spikebench/svg_plot.hpp"
#include "spikebench/version.hpp"

namespace sb = spikebench;
using nlohmann::json;

namespace {

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    long long elapsed_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::optional<std::uint64_t> env_seed_override() {
    const char* env = std::getenv("SPIKE_SEED");
    if (!env) return std::nullopt;
    return sb::parse_integer<std::uint64_t>(env);
}

void write_manifest(const std::string& path, const std::string& command, std::uint64_t seed,
                    const json& config_echo, long long timing_ms,
                    const std::vector<std::string>& outputs) {
    json manifest;
    manifest["command"] = command;
    manifest["version"] = sb::kVersion;
    manifest["seed"] = seed;
    manifest["config"] = config_echo;
    manifest["timing_ms"] = timing_ms;
    manifest["outputs"] = json::array();
    for (const std::string& out : outputs) {
        manifest["outputs"].push_back({{"path", out}, {"digest", sb::file_digest(out)}});
    }
    sb::write_file(path, manifest.dump(2) + "\n");
}

std::vector<double> parse_sigma_list(const std::string& csv) {
    std::vector<double> out;
    for (const auto part : sb::split(csv, ',')) {
        if (part.empty()) continue;
        const double s = sb::parse_double(part);
        if (s < 0.0) throw std::runtime_error("sigma must be non-negative");
        out.push_back(s);
    }
    if (out.empty()) throw std::runtime_error("empty sigma list");
    return out;
}

std::vector<sb::FeatureKind> parse_extractor_list(const std::string& csv) {
    std::vector<sb::FeatureKind> out;
    for (const auto part : sb::split(csv, ',')) {
        if (part.empty()) continue;
        out.push_back(sb::parse_feature_kind(std::string(part)));
    }
    if (out.empty()) throw std::runtime_error("empty extractor list");
    return out;
}

int cmd_generate(const std::string& config_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed_flag) {
    Timer timer;
    sb::GeneratorConfig gen = sb::parse_generator_config(sb::read_file(config_path));
    if (const auto env = env_seed_override()) gen.seed = *env;
    if (seed_flag) gen.seed = *seed_flag;

    const sb::StreamConfig cfg = sb::build_stream_config(gen);
    const std::vector<sb::LabeledSpike> stream = sb::generate_stream(cfg);
    sb::write_file(out_path, sb::serialize_stream(cfg, stream));

    json echo;
    echo["seed"] = gen.seed;
    echo["sigma_n"] = gen.sigma_n;
    echo["spikes_per_template"] = gen.spikes_per_template;
    echo["align_index"] = gen.align_index;
    echo["align_mode"] = gen.align_mode == sb::AlignMode::AbsolutePeak ? "abs" : "pos";
    echo["channels"] = "default";
    echo["rng"] = sb::kRngAlgorithm;
    write_manifest(out_path + ".manifest.json", "generate", gen.seed, echo, timer.elapsed_ms(),
                   {out_path});
    std::cout << "wrote " << stream.size() << " spikes to " << out_path << "\n";
    return 0;
}

int cmd_sweep(const std::string& stream_path, const std::string& sigmas_csv,
              const std::string& extractors_csv, const std::string& approx_name,
              const std::string& out_dir, std::optional<std::uint64_t> seed_flag) {
    Timer timer;
    const auto [header, stream] = sb::parse_stream(sb::read_file(stream_path));
    if (stream.empty()) throw std::runtime_error("stream file has no spikes");
    const std::vector<double> sigmas = parse_sigma_list(sigmas_csv);
    const std::vector<sb::FeatureKind> extractors = parse_extractor_list(extractors_csv);
    const sb::ApproxMode approx = sb::parse_approx_mode(approx_name);

    std::uint64_t seed = header.seed;
    if (const auto env = env_seed_override()) seed = *env;
    if (seed_flag) seed = *seed_flag;

    std::filesystem::create_directories(out_dir);

    const std::vector<sb::CellReport> cells =
        sb::run_sweep(stream, sigmas, extractors, approx, seed);
    const std::vector<sb::SummaryRow> summary = sb::summarize(cells);

    const std::string report_path = out_dir + "/report.csv";
    const std::string summary_path = out_dir + "/summary.csv";
    sb::write_file(report_path, sb::serialize_cells_csv(cells));
    sb::write_file(summary_path, sb::serialize_summary_csv(summary));

    // noise-robustness table: mean CER versus noise level per (extractor, length)
    std::string cer_sigma_csv = "sigma,extractor,n_samples,mean_cer\n";
    std::map<std::pair<int, int>, sb::PlotSeries> sigma_series;
    for (const sb::SummaryRow& r : summary) {
        cer_sigma_csv += sb::format_double(r.sigma);
        cer_sigma_csv += ',';
        cer_sigma_csv += sb::to_string(r.extractor);
        cer_sigma_csv += ',' + std::to_string(r.n_samples);
        cer_sigma_csv += ',' + sb::format_double(r.mean_cer) + '\n';
        auto& series = sigma_series[{static_cast<int>(r.extractor), -r.n_samples}];
        series.name = std::string(sb::to_string(r.extractor)) + " n=" +
                      std::to_string(r.n_samples);
        series.dashed = r.n_samples != 66;
        series.points.emplace_back(r.sigma, r.mean_cer);
    }
    const std::string cer_sigma_path = out_dir + "/cer_vs_sigma.csv";
    sb::write_file(cer_sigma_path, cer_sigma_csv);

    // accuracy-cost table: mean CER (over sigmas and channels) versus weighted cost
    struct CompPoint {
        double cer_sum = 0.0;
        int count = 0;
        long long comp = 0;
    };
    std::map<std::pair<int, int>, CompPoint> comp_points;
    for (const sb::SummaryRow& r : summary) {
        auto& pt = comp_points[{static_cast<int>(r.extractor), -r.n_samples}];
        pt.cer_sum += r.mean_cer;
        pt.count += 1;
        pt.comp = r.comp;
    }
    std::string cer_comp_csv = "extractor,n_samples,comp,mean_cer\n";
    std::map<int, sb::PlotSeries> comp_series;
    for (const auto& [key, pt] : comp_points) {
        const auto kind = static_cast<sb::FeatureKind>(key.first);
        const int n = -key.second;
        const double cer = pt.cer_sum / pt.count;
        cer_comp_csv += sb::to_string(kind);
        cer_comp_csv += ',' + std::to_string(n);
        cer_comp_csv += ',' + std::to_string(pt.comp);
        cer_comp_csv += ',' + sb::format_double(cer) + '\n';
        auto& series = comp_series[key.first];
        series.name = sb::to_string(kind);
        series.points.emplace_back(static_cast<double>(pt.comp), cer);
    }
    const std::string cer_comp_path = out_dir + "/cer_vs_comp.csv";
    sb::write_file(cer_comp_path, cer_comp_csv);

    std::vector<sb::PlotSeries> sigma_chart;
    for (auto& [key, s] : sigma_series) sigma_chart.push_back(std::move(s));
    const std::string sigma_chart_path = out_dir + "/cer_vs_sigma.svg";
    sb::write_file(sigma_chart_path,
                   sb::render_chart(sigma_chart, {"classification error vs noise level", "sigma_n",
                                           "mean CER", false}));

    std::vector<sb::PlotSeries> comp_chart;
    for (auto& [key, s] : comp_series) comp_chart.push_back(std::move(s));
    const std::string comp_chart_path = out_dir + "/cer_vs_comp.svg";
    sb::write_file(comp_chart_path,
                   sb::render_chart(comp_chart, {"classification error vs computational cost",
                                           "Comp = N_add + 10*N_mul (log scale)", "mean CER",
                                           true}));

    // Cost-model notes, including the DWT multiply-term shrinkage line.
    std::string notes = sb::dwt_mult_reduction_note() + "\n";
    const sb::CostReport upca66 = sb::fe_cost(sb::FeatureKind::Upca, 66);
    const sb::CostReport upca22 = sb::fe_cost(sb::FeatureKind::Upca, 22);
    notes += "upca weighted multiply cost: " + std::to_string(upca66.weighted_mul()) +
             " at n=66 -> " + std::to_string(upca22.weighted_mul()) + " at n=22 (" +
             [&] {
                 char buf[16];
                 std::snprintf(buf, sizeof(buf), "%.1f",
                               static_cast<double>(upca66.weighted_mul()) /
                                   static_cast<double>(upca22.weighted_mul()));
                 return std::string(buf);
             }() +
             "X)\n";
    notes += "approximation unit overhead: " +
             std::to_string(sb::approximation_cost(header.n_samples).adds) +
             " additions per spike at n=" + std::to_string(header.n_samples) + "\n";
    const std::string notes_path = out_dir + "/cost_notes.txt";
    sb::write_file(notes_path, notes);
    std::cout << notes;

    json echo;
    echo["stream"] = stream_path;
    echo["stream_seed"] = header.seed;
    echo["sigmas"] = sigmas;
    {
        json names = json::array();
        for (const auto fe : extractors) names.push_back(sb::to_string(fe));
        echo["extractors"] = names;
    }
    echo["approx"] = approx_name;
    write_manifest(out_dir + "/manifest.json", "sweep", seed, echo, timer.elapsed_ms(),
                   {report_path, summary_path, cer_sigma_path, cer_comp_path, sigma_chart_path,
                    comp_chart_path, notes_path});
    std::cout << "wrote " << cells.size() << " report rows to " << out_dir << "\n";
    return 0;
}

int cmd_approx_demo(const std::string& stream_path, const std::string& out_path) {
    Timer timer;
    const auto [header, stream] = sb::parse_stream(sb::read_file(stream_path));
    if (stream.empty()) throw std::runtime_error("stream file has no spikes");

    std::string csv = "spike,channel,template_id,n_samples,n_retained,correlation,indices,samples\n";
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const sb::LabeledSpike& s = stream[i];
        const sb::ApproxSpike a = sb::select_samples(s.waveform);
        const std::vector<double> recon = sb::reconstruct_linear(a);
        const double corr = sb::pearson_correlation(recon, s.waveform.samples);
        csv += std::to_string(i);
        csv += ',' + std::to_string(s.channel_id);
        csv += ',' + std::to_string(s.template_id);
        csv += ',' + std::to_string(s.waveform.samples.size());
        csv += ',' + std::to_string(a.indices.size());
        csv += ',' + sb::format_double(corr);
        csv += ',';
        for (std::size_t j = 0; j < a.indices.size(); ++j) {
            if (j) csv += ';';
            csv += std::to_string(a.indices[j]);
        }
        csv += ',';
        for (std::size_t j = 0; j < s.waveform.samples.size(); ++j) {
            if (j) csv += ';';
            csv += sb::format_double(s.waveform.samples[j]);
        }
        csv += '\n';
    }
    sb::write_file(out_path, csv);

    json echo;
    echo["stream"] = stream_path;
    echo["stream_seed"] = header.seed;
    write_manifest(out_path + ".manifest.json", "approx-demo", header.seed, echo,
                   timer.elapsed_ms(), {out_path});
    std::cout << "wrote " << stream.size() << " rows to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spike stream generation and sorting-accuracy/cost benchmarks"};
    app.require_subcommand(1);

    std::string config_path, out_path, stream_path, out_dir;
    std::string sigmas_csv, extractors_csv = "add,zcf,shape,dwt,uglf,upca";
    std::string approx_name = "both";
    std::optional<std::uint64_t> seed_flag;

    CLI::App* generate = app.add_subcommand("generate", "render a labeled synthetic spike stream");
    generate->add_option("--config", config_path, "flat key=value config file")->required();
    generate->add_option("--out", out_path, "output stream path")->required();
    generate->add_option("--seed", seed_flag,
                         "seed override (flag beats SPIKE_SEED beats config)");

    CLI::App* sweep = app.add_subcommand("sweep", "CER and cost sweep over noise levels");
    sweep->add_option("--stream", stream_path, "input stream file")->required();
    sweep->add_option("--sigmas", sigmas_csv, "comma-separated noise levels")->required();
    sweep->add_option("--extractors", extractors_csv,
                      "comma-separated extractor names (add,zcf,shape,dwt,uglf,upca)");
    sweep->add_option("--approx", approx_name, "approximation unit: on, off or both");
    sweep->add_option("--out", out_dir, "output directory")->required();
    sweep->add_option("--seed", seed_flag, "seed override");

    CLI::App* demo = app.add_subcommand("approx-demo", "per-spike retained-sample table");
    demo->add_option("--stream", stream_path, "input stream file")->required();
    demo->add_option("--out", out_path, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 1;
    }

    try {
        if (generate->parsed()) return cmd_generate(config_path, out_path, seed_flag);
        if (sweep->parsed()) {
            return cmd_sweep(stream_path, sigmas_csv, extractors_csv, approx_name, out_dir,
                             seed_flag);
        }
        if (demo->parsed()) return cmd_approx_demo(stream_path, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
