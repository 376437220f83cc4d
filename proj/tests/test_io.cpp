#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "corpus.hpp"
#include "spikebench/approx.hpp"
#include "spikebench/io.hpp"
#include "spikebench/rng.hpp"

using namespace spikebench;

TEST_CASE("doubles round-trip through the shortest form") {
    SeededRng rng(501);
    for (int trial = 0; trial < 200; ++trial) {
        const double v = rng.next_gaussian() * std::pow(10.0, rng.next_double() * 12 - 6);
        REQUIRE(parse_double(format_double(v)) == v);
    }
    REQUIRE(format_double(0.5) == "0.5");
    REQUIRE_THROWS(parse_double("1.5x"));
}

TEST_CASE("waveform files round-trip") {
    const auto templates = corpus::default_templates(1);
    const std::vector<SpikeWaveform> subset(templates.begin(), templates.begin() + 5);
    const std::string text = serialize_waveforms(subset);
    REQUIRE(text.starts_with("n_samples=66,period_us="));
    const auto parsed = parse_waveforms(text);
    REQUIRE(parsed.size() == subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i) {
        REQUIRE(parsed[i].samples == subset[i].samples);
        REQUIRE(parsed[i].sample_period == Catch::Approx(subset[i].sample_period).epsilon(1e-12));
    }
}

TEST_CASE("approx files round-trip bit-exactly") {
    const auto templates = corpus::default_templates(1);
    std::vector<ApproxSpike> approx;
    for (std::size_t i = 0; i < 5; ++i) approx.push_back(select_samples(templates[i]));
    const std::string text = serialize_approx(approx, 2000.0 / 66.0);
    const auto [parsed, period] = parse_approx(text);
    REQUIRE(parsed.size() == approx.size());
    for (std::size_t i = 0; i < approx.size(); ++i) {
        REQUIRE(parsed[i].indices == approx[i].indices);
        REQUIRE(parsed[i].values == approx[i].values);
        REQUIRE(parsed[i].source_length == 66);
    }
    REQUIRE(text.find("indices=") != std::string::npos);
    REQUIRE(text.find(",values=") != std::string::npos);
}

TEST_CASE("stream files round-trip with their header echo") {
    StreamConfig cfg = corpus::default_config(5, 3, 0.1);
    const auto stream = generate_stream(cfg);
    const std::string text = serialize_stream(cfg, stream);
    const auto [header, parsed] = parse_stream(text);
    REQUIRE(header.seed == 5);
    REQUIRE(header.sigma_n == 0.1);
    REQUIRE(header.spikes_per_template == 3);
    REQUIRE(header.n_samples == 66);
    REQUIRE(header.align_index == 20);
    REQUIRE(header.channels == "default");
    REQUIRE(header.rng == std::string(kRngAlgorithm));
    REQUIRE(parsed.size() == stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
        REQUIRE(parsed[i].channel_id == stream[i].channel_id);
        REQUIRE(parsed[i].template_id == stream[i].template_id);
        REQUIRE(parsed[i].waveform.samples == stream[i].waveform.samples);
    }
}

TEST_CASE("stream parsing validates structure") {
    REQUIRE_THROWS_WITH(parse_stream("nonsense\n"),
                        Catch::Matchers::ContainsSubstring("bad stream header"));
    StreamConfig cfg = corpus::default_config(5, 1, 0.0);
    std::string text = serialize_stream(cfg, generate_stream(cfg));
    text += "1,1,0.5\n";  // truncated sample row
    REQUIRE_THROWS_WITH(parse_stream(text),
                        Catch::Matchers::ContainsSubstring("sample count"));
}

TEST_CASE("generator config parsing applies defaults and rejects unknown keys") {
    const auto cfg = parse_generator_config("seed=9\nsigma_n=0.2\n# comment\n\n"
                                            "spikes_per_template=12\nalign_mode=pos\n");
    REQUIRE(cfg.seed == 9);
    REQUIRE(cfg.sigma_n == 0.2);
    REQUIRE(cfg.spikes_per_template == 12);
    REQUIRE(cfg.align_index == 20);
    REQUIRE(cfg.align_mode == AlignMode::PositivePeak);

    REQUIRE_THROWS_WITH(parse_generator_config("sead=9\n"),
                        Catch::Matchers::ContainsSubstring("unknown config key 'sead'"));
    REQUIRE_THROWS_WITH(parse_generator_config("sigma_n=-1\n"),
                        Catch::Matchers::ContainsSubstring("non-negative"));
    REQUIRE_THROWS_WITH(parse_generator_config("seed 9\n"),
                        Catch::Matchers::ContainsSubstring("key=value"));
    REQUIRE_THROWS_WITH(parse_generator_config("channels=custom\n"),
                        Catch::Matchers::ContainsSubstring("default"));
}

TEST_CASE("projection serialization round-trips") {
    Projection p;
    p.kind = ProjectionKind::Uglf;
    p.channel_id = 4;
    p.rows = {{0.1, -0.2, 0.97}, {0.5, 0.5, -0.3}};
    const std::string text = serialize_projection(p);
    REQUIRE(text.starts_with("kind=uglf,k=2,n=3,channel=4\n"));
    const auto parsed = parse_projection(text);
    REQUIRE(parsed.kind == ProjectionKind::Uglf);
    REQUIRE(parsed.channel_id == 4);
    REQUIRE(parsed.rows == p.rows);
}

TEST_CASE("feature csv rows are keyed by spike id") {
    std::vector<FeatureVector> fvs(2);
    fvs[0].extractor = FeatureKind::Zcf;
    fvs[0].values = {1.0, 2.0};
    fvs[1].extractor = FeatureKind::Zcf;
    fvs[1].values = {3.0, 4.0};
    const std::vector<std::string> ids{"ch1-0", "ch1-1"};
    const std::string text = serialize_features_csv(fvs, ids);
    REQUIRE(text == "# features extractor=zcf dim=2\nch1-0,1,2\nch1-1,3,4\n");
}

TEST_CASE("fnv1a digests are stable") {
    REQUIRE(digest_hex(fnv1a64("")) == "cbf29ce484222325");
    REQUIRE(digest_hex(fnv1a64("abc")) == "e71fa2190541574b");
}

TEST_CASE("report csv layout") {
    CellReport cell;
    cell.sigma = 0.1;
    cell.channel = 3;
    cell.extractor = FeatureKind::Dwt;
    cell.n_samples = 22;
    cell.cer = 0.015;
    cell.cost = fe_cost(FeatureKind::Dwt, 22, 9, 3, 66);
    const std::string text = serialize_cells_csv(std::vector<CellReport>{cell});
    REQUIRE(text ==
            "sigma,channel,extractor,n_samples,cer,n_add,n_mul,comp\n"
            "0.1,3,dwt,22,0.015,358,166,2018\n");
}
