#pragma once

// The two trainable linear extractors: updated PCA (covariance
// eigendecomposition) and updated graph-Laplacian features (generalized
// symmetric eigenproblem on a kNN heat-kernel graph). Refit per recording
// channel; projection afterwards is pure.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "spikebench/features.hpp"

namespace spikebench {

enum class ProjectionKind { Uglf, Upca };

inline const char* to_string(ProjectionKind k) {
    return k == ProjectionKind::Uglf ? "uglf" : "upca";
}

/// A fitted K x N linear map. Rows are unit-norm; for uPCA they are mutually
/// orthogonal. `eigenvalues` carries the per-row spectrum of the fitting
/// problem (variance for uPCA, Laplacian-to-variance ratio for uGLF).
struct Projection {
    std::vector<std::vector<double>> rows;
    ProjectionKind kind = ProjectionKind::Upca;
    std::vector<double> eigenvalues;
    int channel_id = -1;
    std::size_t fitted_count = 0;

    std::size_t k() const { return rows.size(); }
    std::size_t n() const { return rows.empty() ? 0 : rows.front().size(); }
};

namespace detail {

inline Eigen::MatrixXd spikes_as_columns(const std::vector<std::vector<double>>& spikes) {
    if (spikes.empty()) throw std::invalid_argument("no training spikes");
    const std::size_t n = spikes.front().size();
    Eigen::MatrixXd x(n, spikes.size());
    for (std::size_t j = 0; j < spikes.size(); ++j) {
        if (spikes[j].size() != n) throw std::invalid_argument("ragged training spikes");
        for (std::size_t i = 0; i < n; ++i) x(i, j) = spikes[j][i];
    }
    return x;
}

/// Sign convention: the largest-magnitude entry of each row is positive
/// (smallest index on magnitude ties). Keeps fitted matrices byte-stable.
inline void fix_row_sign(Eigen::VectorXd& v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    }
    if (v[best] < 0.0) v = -v;
}

inline std::vector<double> to_row(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace detail

/// Covariance eigendecomposition of the centred training spikes; the
/// projection keeps the k leading eigenvectors (descending eigenvalue).
inline Projection fit_upca(const std::vector<std::vector<double>>& spikes, std::size_t k = 3) {
    if (spikes.size() < k + 1) throw std::invalid_argument("fit_upca: need at least k+1 spikes");
    const Eigen::MatrixXd x = detail::spikes_as_columns(spikes);
    const Eigen::Index n = x.rows();
    const Eigen::Index m = x.cols();
    if (static_cast<Eigen::Index>(k) > n) throw std::invalid_argument("fit_upca: k exceeds dimension");

    const Eigen::VectorXd mu = x.rowwise().mean();
    const Eigen::MatrixXd xc = x.colwise() - mu;
    const Eigen::MatrixXd cov = (xc * xc.transpose()) / static_cast<double>(m - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) throw std::runtime_error("fit_upca: eigen solve failed");

    Projection p;
    p.kind = ProjectionKind::Upca;
    p.fitted_count = spikes.size();
    for (std::size_t r = 0; r < k; ++r) {
        const Eigen::Index col = n - 1 - static_cast<Eigen::Index>(r);  // descending eigenvalue
        Eigen::VectorXd v = es.eigenvectors().col(col);
        detail::fix_row_sign(v);
        p.rows.push_back(detail::to_row(v));
        p.eigenvalues.push_back(es.eigenvalues()[col]);
    }
    return p;
}

/// The two sides of the uGLF eigenproblem, exposed so that tests can check
/// the residual of the returned eigenpairs against the same matrices the fit
/// used. A = X L X^T (graph smoothness), B = X X^T + eps I (ridged variance).
struct UglfMatrices {
    Eigen::MatrixXd a;
    Eigen::MatrixXd b;
    double epsilon = 0.0;
};

inline UglfMatrices uglf_matrices(const std::vector<std::vector<double>>& spikes,
                                  std::size_t knn = 5) {
    const Eigen::MatrixXd x = detail::spikes_as_columns(spikes);
    const Eigen::Index n = x.rows();
    const Eigen::Index m = x.cols();

    // Pairwise distances and the heat-kernel bandwidth (median distance).
    Eigen::MatrixXd dist(m, m);
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
    for (Eigen::Index i = 0; i < m; ++i) {
        dist(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double d = (x.col(i) - x.col(j)).norm();
            dist(i, j) = d;
            dist(j, i) = d;
            flat.push_back(d);
        }
    }
    double t = median(std::move(flat));
    if (!(t > 0.0)) t = 1.0;  // all-duplicate corpus

    // Symmetric kNN graph, w_ij = exp(-d^2 / (2 t^2)).
    const std::size_t kn = std::min<std::size_t>(knn, static_cast<std::size_t>(m - 1));
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, m);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) order[static_cast<std::size_t>(j)] = j;
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            if (a == i) return false;
            if (b == i) return true;
            if (dist(i, a) != dist(i, b)) return dist(i, a) < dist(i, b);
            return a < b;
        });
        for (std::size_t r = 0; r < kn; ++r) {
            const Eigen::Index j = order[r];
            const double wij = std::exp(-dist(i, j) * dist(i, j) / (2.0 * t * t));
            w(i, j) = wij;
            w(j, i) = wij;
        }
    }

    const Eigen::MatrixXd lap = Eigen::MatrixXd(w.rowwise().sum().asDiagonal()) - w;
    const Eigen::VectorXd mu = x.rowwise().mean();
    const Eigen::MatrixXd xc = x.colwise() - mu;

    UglfMatrices out;
    out.a = xc * lap * xc.transpose();
    Eigen::MatrixXd c = xc * xc.transpose();
    if (!(c.trace() > 0.0)) throw std::runtime_error("singular covariance despite ridge");
    out.epsilon = 1e-8 * c.trace() / static_cast<double>(n);
    out.b = c + out.epsilon * Eigen::MatrixXd::Identity(n, n);
    return out;
}

/// Graph-Laplacian features: solve (X L X^T) v = lambda (X X^T + eps I) v and
/// keep the k eigenvectors of smallest lambda (smooth on the graph relative
/// to their variance). When the graph carries no geometric information
/// (exact-duplicate corpora make X L X^T vanish), every direction is equally
/// smooth and the fit falls back to the max-variance directions; the reported
/// eigenvalues are 0 and the residual identity still holds.
inline Projection fit_uglf(const std::vector<std::vector<double>>& spikes, std::size_t k = 3,
                           std::size_t knn = 5) {
    const std::size_t min_spikes = std::max<std::size_t>(30, knn + 2);
    if (spikes.size() < min_spikes) throw std::invalid_argument("insufficient training data");
    const UglfMatrices mats = uglf_matrices(spikes, knn);
    const Eigen::Index n = mats.a.rows();
    if (static_cast<Eigen::Index>(k) > n) throw std::invalid_argument("fit_uglf: k exceeds dimension");

    Projection p;
    p.kind = ProjectionKind::Uglf;
    p.fitted_count = spikes.size();

    const Eigen::MatrixXd c = mats.b - mats.epsilon * Eigen::MatrixXd::Identity(n, n);
    if (mats.a.trace() <= 1e-12 * std::max(1.0, c.trace())) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c);
        if (es.info() != Eigen::Success) throw std::runtime_error("fit_uglf: eigen solve failed");
        for (std::size_t r = 0; r < k; ++r) {
            Eigen::VectorXd v = es.eigenvectors().col(n - 1 - static_cast<Eigen::Index>(r));
            detail::fix_row_sign(v);
            p.rows.push_back(detail::to_row(v));
            p.eigenvalues.push_back(0.0);
        }
        return p;
    }

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(mats.a, mats.b);
    if (ges.info() != Eigen::Success) throw std::runtime_error("singular covariance despite ridge");
    for (std::size_t r = 0; r < k; ++r) {
        Eigen::VectorXd v = ges.eigenvectors().col(static_cast<Eigen::Index>(r));  // ascending
        v.normalize();
        detail::fix_row_sign(v);
        p.rows.push_back(detail::to_row(v));
        p.eigenvalues.push_back(ges.eigenvalues()[static_cast<Eigen::Index>(r)]);
    }
    return p;
}

/// Applies a fitted projection: values = matrix * s.
inline FeatureVector project(const Projection& p, std::span<const double> s) {
    if (s.size() != p.n()) throw std::invalid_argument("project: dimension mismatch");
    FeatureVector fv;
    fv.extractor = p.kind == ProjectionKind::Uglf ? FeatureKind::Uglf : FeatureKind::Upca;
    fv.values.resize(p.k());
    for (std::size_t r = 0; r < p.k(); ++r) {
        double acc = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) acc += p.rows[r][i] * s[i];
        fv.values[r] = acc;
    }
    return fv;
}

}  // namespace spikebench
