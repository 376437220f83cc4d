#pragma once

// Lloyd's k-means with k-means++ seeding and multiple restarts, fully
// deterministic per seed.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "spikebench/rng.hpp"

namespace spikebench {

struct KMeansResult {
    std::vector<int> labels;
    std::vector<std::vector<double>> centroids;
    double inertia = 0.0;  // sum of squared distances to assigned centroids
};

namespace detail {

inline double sq_dist(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

inline void assign_labels(const std::vector<std::vector<double>>& pts,
                          const std::vector<std::vector<double>>& centroids,
                          std::vector<int>& labels) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
        int best = 0;
        double best_d = sq_dist(pts[i], centroids[0]);
        for (std::size_t c = 1; c < centroids.size(); ++c) {
            const double d = sq_dist(pts[i], centroids[c]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        labels[i] = best;
    }
}

}  // namespace detail

/// One seeded restart: k-means++ initialization, then Lloyd iterations until
/// the largest centroid shift drops below 1e-9 or `max_iters` is reached.
/// Empty clusters are re-seeded at the point farthest from its own centroid.
/// If `inertia_trace` is given it records the assignment cost after every
/// iteration (non-increasing by construction).
inline KMeansResult kmeans_single(const std::vector<std::vector<double>>& pts, int z,
                                  SeededRng& rng, int max_iters = 300,
                                  std::vector<double>* inertia_trace = nullptr) {
    const std::size_t m = pts.size();
    const std::size_t dim = pts.front().size();

    // k-means++ seeding
    std::vector<std::vector<double>> centroids;
    centroids.reserve(static_cast<std::size_t>(z));
    centroids.push_back(pts[rng.next_index(m)]);
    std::vector<double> d2(m);
    for (std::size_t i = 0; i < m; ++i) d2[i] = detail::sq_dist(pts[i], centroids[0]);
    while (centroids.size() < static_cast<std::size_t>(z)) {
        double total = 0.0;
        for (double v : d2) total += v;
        std::size_t pick;
        if (total <= 0.0) {
            pick = rng.next_index(m);  // all remaining points coincide with a centroid
        } else {
            const double threshold = rng.next_double() * total;
            double acc = 0.0;
            pick = m - 1;
            for (std::size_t i = 0; i < m; ++i) {
                acc += d2[i];
                if (acc > threshold) {
                    pick = i;
                    break;
                }
            }
        }
        centroids.push_back(pts[pick]);
        for (std::size_t i = 0; i < m; ++i) {
            d2[i] = std::min(d2[i], detail::sq_dist(pts[i], centroids.back()));
        }
    }

    std::vector<int> labels(m, 0);
    for (int iter = 0; iter < max_iters; ++iter) {
        detail::assign_labels(pts, centroids, labels);
        if (inertia_trace) {
            double cost = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                cost += detail::sq_dist(pts[i], centroids[static_cast<std::size_t>(labels[i])]);
            }
            inertia_trace->push_back(cost);
        }

        std::vector<std::vector<double>> next(static_cast<std::size_t>(z),
                                              std::vector<double>(dim, 0.0));
        std::vector<std::size_t> counts(static_cast<std::size_t>(z), 0);
        for (std::size_t i = 0; i < m; ++i) {
            const auto c = static_cast<std::size_t>(labels[i]);
            counts[c] += 1;
            for (std::size_t d = 0; d < dim; ++d) next[c][d] += pts[i][d];
        }
        for (int c = 0; c < z; ++c) {
            const auto cu = static_cast<std::size_t>(c);
            if (counts[cu] > 0) {
                for (std::size_t d = 0; d < dim; ++d) {
                    next[cu][d] /= static_cast<double>(counts[cu]);
                }
            } else {
                // farthest point from its assigned (new) centroid takes over
                double worst = -1.0;
                std::size_t worst_i = 0;
                for (std::size_t i = 0; i < m; ++i) {
                    const auto li = static_cast<std::size_t>(labels[i]);
                    if (counts[li] == 0) continue;
                    const double d = detail::sq_dist(pts[i], next[li]);
                    if (d > worst) {
                        worst = d;
                        worst_i = i;
                    }
                }
                next[cu] = pts[worst_i];
            }
        }

        double shift = 0.0;
        for (int c = 0; c < z; ++c) {
            shift = std::max(shift,
                             detail::sq_dist(centroids[static_cast<std::size_t>(c)],
                                             next[static_cast<std::size_t>(c)]));
        }
        centroids = std::move(next);
        if (std::sqrt(shift) < 1e-9) break;
    }

    KMeansResult out;
    out.centroids = std::move(centroids);
    out.labels.resize(m);
    detail::assign_labels(pts, out.centroids, out.labels);
    out.inertia = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        out.inertia +=
            detail::sq_dist(pts[i], out.centroids[static_cast<std::size_t>(out.labels[i])]);
    }
    return out;
}

/// Best of `restarts` seeded runs by inertia (earlier restart wins ties).
inline KMeansResult kmeans(const std::vector<std::vector<double>>& pts, int z = 3,
                           int restarts = 10, std::uint64_t seed = 1) {
    if (z < 1) throw std::invalid_argument("kmeans: z must be positive");
    if (pts.size() < static_cast<std::size_t>(z)) {
        throw std::invalid_argument("kmeans: fewer points than clusters");
    }
    const std::size_t dim = pts.front().size();
    for (const auto& p : pts) {
        if (p.size() != dim) throw std::invalid_argument("kmeans: ragged points");
    }
    SeededRng rng(derive_seed(seed, {0x6b6d65616e73ULL}));
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        KMeansResult run = kmeans_single(pts, z, rng);
        if (run.inertia < best.inertia) best = std::move(run);
    }
    return best;
}

}  // namespace spikebench
