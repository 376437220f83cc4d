#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "corpus.hpp"
#include "oracles.hpp"
#include "spikebench/approx.hpp"
#include "spikebench/features.hpp"
#include "spikebench/rng.hpp"

using namespace spikebench;

TEST_CASE("add_coefficients at delta 1 equals the first difference") {
    SeededRng rng(5);
    std::vector<double> s(30);
    for (double& v : s) v = rng.next_gaussian();
    REQUIRE(add_coefficients(s, 1) == cascaded_derivatives(s).fd);
}

TEST_CASE("add_coefficients basic cases") {
    REQUIRE(add_coefficients(std::vector<double>{0, 2, 4, 6}, 2) == std::vector<double>{4, 4});
    const std::vector<double> constant(12, 3.0);
    for (std::size_t d = 1; d <= 7; ++d) {
        const auto c = add_coefficients(constant, d);
        REQUIRE(c.size() == constant.size() - d);
        for (double v : c) REQUIRE(v == 0.0);
    }
    REQUIRE_THROWS(add_coefficients(std::vector<double>{1, 2, 3}, 5));
    REQUIRE_THROWS(add_coefficients(std::vector<double>(20, 0.0), 0));
    REQUIRE_THROWS(add_coefficients(std::vector<double>(20, 0.0), 8));
}

TEST_CASE("scale selection falls back to the smallest delta on exact ties") {
    // constant spikes give zero coefficients at every scale: statistic 0,
    // tie resolved toward the smaller delta in each sub-band
    const std::vector<std::vector<double>> spikes(35, std::vector<double>(40, 2.0));
    const auto scales = select_add_scales(spikes);
    REQUIRE(scales.d1 == 1);
    REQUIRE(scales.d2 == 3);
    REQUIRE(scales.d3 == 6);
}

TEST_CASE("scale selection finds the bimodal scale in the middle band") {
    // two anti-phase template classes: a period-6 sinusoid makes the
    // delta = 3 slope trace swing hardest, so its pooled distribution is the
    // most strongly bimodal of the middle band
    SeededRng rng(41);
    std::vector<std::vector<double>> spikes;
    for (int i = 0; i < 200; ++i) {
        const double polarity = i % 2 == 0 ? 1.0 : -1.0;
        std::vector<double> s(48);
        for (std::size_t n = 0; n < s.size(); ++n) {
            s[n] = polarity * std::sin(2.0 * M_PI * static_cast<double>(n) / 6.0) +
                   0.3 * rng.next_gaussian();
        }
        spikes.push_back(std::move(s));
    }
    const auto scales = select_add_scales(spikes);
    REQUIRE(scales.d2 == 3);

    // ordering agreement with the independently coded statistic, per band
    const AddConfig cfg;
    for (std::size_t b = 0; b < 3; ++b) {
        double best_stat = -1.0;
        std::size_t best_delta = 0;
        for (std::size_t delta : cfg.subbands[b]) {
            std::vector<double> pool;
            for (const auto& s : spikes) {
                const auto c = add_coefficients(s, delta);
                pool.insert(pool.end(), c.begin(), c.end());
            }
            const double stat = oracle::ks_fitted_normal(pool);
            if (stat > best_stat) {
                best_stat = stat;
                best_delta = delta;
            }
        }
        const auto got = select_add_scales(spikes);
        const std::size_t want = b == 0 ? got.d1 : (b == 1 ? got.d2 : got.d3);
        REQUIRE(want == best_delta);
    }
}

TEST_CASE("scale selection ignores spike order") {
    SeededRng rng(43);
    std::vector<std::vector<double>> spikes;
    for (int i = 0; i < 60; ++i) {
        std::vector<double> s(40);
        for (double& v : s) v = rng.next_gaussian();
        if (i % 2 == 0) {
            for (std::size_t n = 0; n < s.size(); ++n) s[n] += std::sin(0.4 * n);
        }
        spikes.push_back(std::move(s));
    }
    auto shuffled = spikes;
    rng.shuffle(shuffled);
    const auto a = select_add_scales(spikes);
    const auto b = select_add_scales(shuffled);
    REQUIRE(a.all() == b.all());
}

TEST_CASE("scale selection needs enough spikes") {
    const std::vector<std::vector<double>> tiny(29, std::vector<double>(40, 1.0));
    REQUIRE_THROWS_WITH(select_add_scales(tiny),
                        Catch::Matchers::ContainsSubstring("insufficient"));
}

TEST_CASE("add feature vector concatenates the selected traces") {
    std::vector<double> s(30);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(0.3 * static_cast<double>(i));
    const AddScales scales{1, 4, 7};
    const auto fv = add_features(s, scales);
    REQUIRE(fv.extractor == FeatureKind::Add);
    REQUIRE(fv.dim() == (30 - 1) + (30 - 4) + (30 - 7));
    REQUIRE(fv.values[0] == s[1] - s[0]);
    REQUIRE(fv.values[29] == s[4] - s[0]);
}

TEST_CASE("zcf on simple lobes") {
    const auto fv = zcf_features(std::vector<double>{1, 1, -1, -1});
    REQUIRE(fv.values == std::vector<double>{2.0, -2.0, 0.0, 2.0, 2.0, 2.0});
}

TEST_CASE("zcf all-positive spike has empty negative fields") {
    const auto fv = zcf_features(std::vector<double>{0.5, 1.0, 0.25});
    REQUIRE(fv.values[1] == 0.0);
    REQUIRE(fv.values[3] == 0.0);
    REQUIRE(fv.values[5] == 0.0);
    REQUIRE(fv.values[0] == 1.75);
    REQUIRE(fv.values[2] == 1.0);
    REQUIRE(fv.values[4] == 3.0);
}

TEST_CASE("zcf attaches zeros to the preceding lobe") {
    const auto fv = zcf_features(std::vector<double>{0.0, 1.0, 0.0, -1.0});
    REQUIRE(fv.values[0] == 1.0);   // positive lobe [1, 0]
    REQUIRE(fv.values[4] == 2.0);   // its width includes the trailing zero
    REQUIRE(fv.values[1] == -1.0);
    REQUIRE(fv.values[5] == 1.0);
}

TEST_CASE("zcf matches the independent lobe walk on corpus templates") {
    for (const auto& t : corpus::default_templates(1)) {
        const auto fv = zcf_features(t.samples);
        const auto ref = oracle::lobe_walk(t.samples);
        REQUIRE(fv.values[0] == ref.pos_area);
        REQUIRE(fv.values[1] == ref.neg_area);
        REQUIRE(fv.values[2] == ref.pos_idx);
        REQUIRE(fv.values[3] == ref.neg_idx);
        REQUIRE(fv.values[4] == ref.pos_width);
        REQUIRE(fv.values[5] == ref.neg_width);
    }
}

TEST_CASE("negating a spike swaps the zcf lobe features exactly") {
    SeededRng rng(47);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<double> s(50);
        for (double& v : s) v = rng.next_gaussian();
        if (trial % 3 == 0) s[rng.next_index(50)] = 0.0;
        std::vector<double> neg(s);
        for (double& v : neg) v = -v;
        const auto a = zcf_features(s).values;
        const auto b = zcf_features(neg).values;
        REQUIRE(b[0] == -a[1]);
        REQUIRE(b[1] == -a[0]);
        REQUIRE(b[2] == a[3]);
        REQUIRE(b[3] == a[2]);
        REQUIRE(b[4] == a[5]);
        REQUIRE(b[5] == a[4]);
    }
}

TEST_CASE("spike shape is the identity") {
    const std::vector<double> s{1, 2, 3};
    REQUIRE(spike_shape_features(s).values == s);
    const auto t = corpus::default_templates(1).front();
    REQUIRE(spike_shape_features(t.samples).dim() == 66);
    const auto a = select_samples(t);
    REQUIRE(spike_shape_features(a.values).dim() == 22);
}

TEST_CASE("extractor names round-trip") {
    for (FeatureKind k : {FeatureKind::Add, FeatureKind::Zcf, FeatureKind::Shape,
                          FeatureKind::Dwt, FeatureKind::Uglf, FeatureKind::Upca}) {
        REQUIRE(parse_feature_kind(to_string(k)) == k);
    }
    REQUIRE_THROWS_WITH(parse_feature_kind("pca"),
                        Catch::Matchers::ContainsSubstring("unknown extractor"));
}
