#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "multifuse/errors.hpp"
#include "multifuse/model.hpp"

namespace multifuse {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Cross-diffusion settings: local neighborhood size and iteration count.
struct SnfConfig {
    int k_neighbors = 20;
    int iterations = 20;
};

/// Diagnostics of one fusion run.
struct SnfLog {
    std::vector<double> iteration_deltas;          // max elementwise change per iteration
    std::vector<double> view_divergence;           // max cross-view difference per iteration
    std::vector<std::pair<int, int>> isolated;     // (layer, node) rows diffused as identity
};

/// Global kernel: off-diagonal mass of each row scaled to 1/2, diagonal 1/2.
/// Rows without off-diagonal mass become identity rows. Every row sums to 1.
inline Matrix full_kernel(const SimilarityMatrix& w) {
    const int n = w.n();
    Matrix p = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double off_sum = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) off_sum += w.values(i, j);
        if (off_sum > 0.0) {
            for (int j = 0; j < n; ++j)
                if (j != i) p(i, j) = w.values(i, j) / (2.0 * off_sum);
            p(i, i) = 0.5;
        } else {
            p(i, i) = 1.0;
        }
    }
    return p;
}

namespace detail {

/// Indices of the k largest off-diagonal entries of row i; ties prefer the
/// smaller column index so results never depend on sort internals.
inline std::vector<int> top_k_neighbors(const SimilarityMatrix& w, int i, int k) {
    const int n = w.n();
    std::vector<int> candidates;
    candidates.reserve(static_cast<std::size_t>(n - 1));
    for (int j = 0; j < n; ++j)
        if (j != i) candidates.push_back(j);
    std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end(),
                      [&](int a, int b) {
                          const double wa = w.values(i, a);
                          const double wb = w.values(i, b);
                          if (wa != wb) return wa > wb;
                          return a < b;
                      });
    candidates.resize(static_cast<std::size_t>(k));
    return candidates;
}

} // namespace detail

/// Local kernel: each row keeps only its k strongest neighbors, renormalized
/// to sum 1. A row whose selected neighborhood carries no weight is an error
/// at this entry point; the fusion loop handles such rows itself.
inline SparseMatrix knn_kernel(const SimilarityMatrix& w, int k) {
    const int n = w.n();
    if (k < 1 || k > n - 1)
        throw ConfigError("k_neighbors must be in [1, n-1], got " + std::to_string(k) +
                          " for n = " + std::to_string(n));
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i) {
        const auto neighbors = detail::top_k_neighbors(w, i, k);
        double sum = 0.0;
        for (const int j : neighbors) sum += w.values(i, j);
        if (!(sum > 0.0))
            throw DegenerateNeighborhoodError("row " + std::to_string(i) + " ('" +
                                              w.node_ids[static_cast<std::size_t>(i)] +
                                              "') has an all-zero neighborhood");
        for (const int j : neighbors) {
            const double v = w.values(i, j) / sum;
            if (v > 0.0) entries.emplace_back(i, j, v);
        }
    }
    SparseMatrix s(n, n);
    s.setFromTriplets(entries.begin(), entries.end());
    return s;
}

namespace detail {

/// kNN kernel for the fusion loop: isolated rows become identity rows (they
/// ride through the diffusion unchanged) and are recorded.
inline SparseMatrix local_kernel_with_identity(const SimilarityMatrix& w, int k, int layer,
                                               SnfLog* log) {
    const int n = w.n();
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i) {
        const auto neighbors = top_k_neighbors(w, i, k);
        double sum = 0.0;
        for (const int j : neighbors) sum += w.values(i, j);
        if (sum > 0.0) {
            for (const int j : neighbors) {
                const double v = w.values(i, j) / sum;
                if (v > 0.0) entries.emplace_back(i, j, v);
            }
        } else {
            entries.emplace_back(i, i, 1.0);
            if (log) log->isolated.emplace_back(layer, i);
        }
    }
    SparseMatrix s(n, n);
    s.setFromTriplets(entries.begin(), entries.end());
    return s;
}

/// Re-applies the full-kernel shape in place: diagonal 1/2, off-diagonal
/// scaled row-wise to mass 1/2, identity rows where there is no mass.
inline void renormalize_rows(Matrix& p) {
    const int n = static_cast<int>(p.rows());
    for (int i = 0; i < n; ++i) {
        double off_sum = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) off_sum += p(i, j);
        if (off_sum > 0.0) {
            const double scale = 1.0 / (2.0 * off_sum);
            for (int j = 0; j < n; ++j)
                if (j != i) p(i, j) *= scale;
            p(i, i) = 0.5;
        } else {
            for (int j = 0; j < n; ++j) p(i, j) = 0.0;
            p(i, i) = 1.0;
        }
    }
}

inline void symmetrize_in_place(Matrix& p) {
    const int n = static_cast<int>(p.rows());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (p(i, j) + p(j, i));
            p(i, j) = avg;
            p(j, i) = avg;
        }
    }
}

} // namespace detail

/// Similarity network fusion by cross diffusion. Each view's global kernel is
/// diffused through its own local kNN kernel against the mean of the other
/// views, renormalized and symmetrized every iteration; the fused result is
/// the symmetrized mean of the views after the final iteration.
inline SimilarityMatrix snf(const MultiplexBundle& bundle, const SnfConfig& cfg,
                            SnfLog* log = nullptr) {
    validate_bundle(bundle);
    const int views = static_cast<int>(bundle.layers.size());
    if (views < 2) throw ConfigError("snf needs at least 2 layers, got " + std::to_string(views));
    const int n = bundle.n();
    if (cfg.iterations < 1)
        throw ConfigError("iterations must be >= 1, got " + std::to_string(cfg.iterations));
    if (cfg.k_neighbors < 1 || cfg.k_neighbors > n - 1)
        throw ConfigError("k_neighbors must be in [1, n-1], got " + std::to_string(cfg.k_neighbors) +
                          " for n = " + std::to_string(n));

    std::vector<Matrix> p(static_cast<std::size_t>(views));
    std::vector<SparseMatrix> s(static_cast<std::size_t>(views));
    for (int v = 0; v < views; ++v) {
        p[static_cast<std::size_t>(v)] = full_kernel(bundle.layers[static_cast<std::size_t>(v)]);
        s[static_cast<std::size_t>(v)] = detail::local_kernel_with_identity(
            bundle.layers[static_cast<std::size_t>(v)], cfg.k_neighbors, v, log);
    }

    std::vector<Matrix> next(static_cast<std::size_t>(views));
    for (int t = 0; t < cfg.iterations; ++t) {
        for (int v = 0; v < views; ++v) {
            Matrix mean_others = Matrix::Zero(n, n);
            for (int u = 0; u < views; ++u)
                if (u != v) mean_others += p[static_cast<std::size_t>(u)];
            mean_others /= static_cast<double>(views - 1);
            Matrix diffused = s[static_cast<std::size_t>(v)] * mean_others;
            next[static_cast<std::size_t>(v)] = diffused * s[static_cast<std::size_t>(v)].transpose();
            detail::renormalize_rows(next[static_cast<std::size_t>(v)]);
            detail::symmetrize_in_place(next[static_cast<std::size_t>(v)]);
        }
        if (log) {
            double delta = 0.0;
            for (int v = 0; v < views; ++v)
                delta = std::max(delta, (next[static_cast<std::size_t>(v)] -
                                         p[static_cast<std::size_t>(v)])
                                            .cwiseAbs()
                                            .maxCoeff());
            log->iteration_deltas.push_back(delta);
            double divergence = 0.0;
            for (int u = 0; u < views; ++u)
                for (int v = u + 1; v < views; ++v)
                    divergence = std::max(divergence, (next[static_cast<std::size_t>(u)] -
                                                       next[static_cast<std::size_t>(v)])
                                                          .cwiseAbs()
                                                          .maxCoeff());
            log->view_divergence.push_back(divergence);
        }
        std::swap(p, next);
    }

    Matrix fused = Matrix::Zero(n, n);
    for (int v = 0; v < views; ++v) fused += p[static_cast<std::size_t>(v)];
    fused /= static_cast<double>(views);
    return validate_similarity(symmetrize(fused, bundle.node_ids));
}

/// Weight alpha = T2 / (T1 + T2) from the total similarity mass of the two
/// matrices: the denser matrix automatically receives the lower weight.
inline double boyack_alpha(const SimilarityMatrix& s1, const SimilarityMatrix& s2) {
    require_aligned(s1.node_ids, s2.node_ids, "boyack_alpha");
    const double t1 = s1.values.sum();
    const double t2 = s2.values.sum();
    if (!(t1 + t2 > 0.0)) throw ZeroMassError("both matrices have zero total similarity");
    return t2 / (t1 + t2);
}

/// alpha * s1 + (1 - alpha) * s2.
inline SimilarityMatrix convex_combination(const SimilarityMatrix& s1, const SimilarityMatrix& s2,
                                           double alpha) {
    require_aligned(s1.node_ids, s2.node_ids, "convex_combination");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw DomainError("alpha must be in [0,1], got " + std::to_string(alpha));
    SimilarityMatrix out{alpha * s1.values + (1.0 - alpha) * s2.values, s1.node_ids};
    return out;
}

/// cos(w * arccos(s1) + (1-w) * arccos(s2)), elementwise. Inputs must lie in
/// [-1, 1]; with w in {0,1} the respective input is reproduced to rounding.
inline SimilarityMatrix glanzel_combination(const SimilarityMatrix& s1, const SimilarityMatrix& s2,
                                            double w = 0.5) {
    require_aligned(s1.node_ids, s2.node_ids, "glanzel_combination");
    if (!(w >= 0.0 && w <= 1.0)) throw DomainError("w must be in [0,1], got " + std::to_string(w));
    const int n = s1.n();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!(s1.values(i, j) >= -1.0 && s1.values(i, j) <= 1.0) ||
                !(s2.values(i, j) >= -1.0 && s2.values(i, j) <= 1.0))
                throw DomainError("arccos transform needs entries in [-1,1], offending cell (" +
                                  std::to_string(i) + "," + std::to_string(j) + ")");
        }
    }
    SimilarityMatrix out{Matrix(n, n), s1.node_ids};
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double v = std::cos(w * std::acos(s1.values(i, j)) +
                                      (1.0 - w) * std::acos(s2.values(i, j)));
            out.values(i, j) = v;
            out.values(j, i) = v;
        }
    }
    return out;
}

} // namespace multifuse
