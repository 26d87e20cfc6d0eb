#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "multifuse/errors.hpp"
#include "multifuse/model.hpp"
#include "multifuse/rng.hpp"

namespace multifuse {

/// Undirected weighted graph as a dense symmetric adjacency matrix. Graphs
/// built from similarity matrices carry a zero diagonal; aggregated Louvain
/// graphs use the diagonal to hold intra-community weight (ordered-pair
/// convention, so total weight m stays sum()/2).
struct WeightedGraph {
    Matrix adjacency;
    std::vector<std::string> node_ids;

    int n() const { return static_cast<int>(adjacency.rows()); }
    double total_weight() const { return adjacency.sum() / 2.0; }
};

struct LouvainLog {
    std::vector<double> phase_modularity; // plain Q after each level's local-moving phase
};

/// Strips self-loops and wraps the similarity matrix as a clustering graph.
inline WeightedGraph graph_from_similarity(const SimilarityMatrix& s) {
    WeightedGraph g{zero_diagonal(s).values, s.node_ids};
    if (!(g.adjacency.sum() > 0.0))
        throw EmptyGraphError("similarity matrix has no positive off-diagonal weight");
    return g;
}

namespace detail {

/// Community aggregates of a labeled graph. Sums are accumulated row-by-row
/// in index order: a community covering everything reproduces the exact
/// floating-point value of the global sums, which makes Q of the
/// one-community partition exactly zero.
struct CommunityAggregates {
    std::vector<double> internal_weight; // ordered-pair weight inside each community
    std::vector<double> degree_sum;      // sum of weighted degrees per community
    double total = 0.0;                  // sum of all degrees == 2m
};

inline CommunityAggregates aggregate_communities(const Matrix& adjacency,
                                                 const std::vector<int>& labels,
                                                 int n_communities) {
    const int n = static_cast<int>(adjacency.rows());
    CommunityAggregates agg;
    agg.internal_weight.assign(static_cast<std::size_t>(n_communities), 0.0);
    agg.degree_sum.assign(static_cast<std::size_t>(n_communities), 0.0);
    for (int i = 0; i < n; ++i) {
        const int ci = labels[static_cast<std::size_t>(i)];
        double degree = 0.0;
        double internal = 0.0;
        for (int j = 0; j < n; ++j) {
            const double w = adjacency(i, j);
            degree += w;
            if (labels[static_cast<std::size_t>(j)] == ci) internal += w;
        }
        agg.degree_sum[static_cast<std::size_t>(ci)] += degree;
        agg.internal_weight[static_cast<std::size_t>(ci)] += internal;
        agg.total += degree;
    }
    return agg;
}

inline double modularity_from_aggregates(const CommunityAggregates& agg, double resolution) {
    double q = 0.0;
    for (std::size_t c = 0; c < agg.internal_weight.size(); ++c) {
        const double frac = agg.degree_sum[c] / agg.total;
        q += agg.internal_weight[c] / agg.total - resolution * frac * frac;
    }
    return q;
}

} // namespace detail

/// Newman-Girvan modularity Q of a partition over a weighted graph.
inline double modularity(const WeightedGraph& g, const Partition& p, double resolution = 1.0) {
    require_aligned(g.node_ids, p.node_ids, "modularity");
    if (!(g.adjacency.sum() > 0.0)) throw EmptyGraphError("graph has no weight");
    const Partition cp = canonicalize(p);
    const auto agg = detail::aggregate_communities(g.adjacency, cp.labels, cp.cluster_count());
    return detail::modularity_from_aggregates(agg, resolution);
}

namespace detail {

/// One Louvain local-moving phase on a working graph. labels are updated in
/// place; returns true when at least one node changed community.
inline bool local_moving_phase(const Matrix& adjacency, std::vector<int>& labels, Rng& rng,
                               double resolution, double gain_tol) {
    const int n = static_cast<int>(adjacency.rows());
    const Eigen::VectorXd degrees = adjacency.rowwise().sum();
    const double m2 = degrees.sum(); // 2m
    const double m = m2 / 2.0;

    std::vector<double> community_degree(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        community_degree[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] += degrees(i);

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<double> weight_to(static_cast<std::size_t>(n), 0.0);
    std::vector<int> touched;
    touched.reserve(static_cast<std::size_t>(n));

    bool any_move = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (const int i : order) {
            const int old_comm = labels[static_cast<std::size_t>(i)];

            touched.clear();
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const double w = adjacency(i, j);
                if (w == 0.0) continue;
                const int cj = labels[static_cast<std::size_t>(j)];
                if (weight_to[static_cast<std::size_t>(cj)] == 0.0) touched.push_back(cj);
                weight_to[static_cast<std::size_t>(cj)] += w;
            }

            // take i out of its community before scoring candidates
            community_degree[static_cast<std::size_t>(old_comm)] -= degrees(i);

            // score(C) differs from the true delta-Q of joining C by a
            // C-independent constant, so comparisons are exact
            const auto score = [&](int c) {
                return weight_to[static_cast<std::size_t>(c)] / m -
                       resolution * degrees(i) * community_degree[static_cast<std::size_t>(c)] /
                           (2.0 * m * m);
            };

            // candidates must clear the stay score by more than gain_tol;
            // scanning in ascending id order with a strict > comparison makes
            // the smallest community id win ties
            std::sort(touched.begin(), touched.end());
            int best_comm = old_comm;
            double best_score = score(old_comm) + gain_tol;
            for (const int c : touched) {
                if (c == old_comm) continue;
                const double s = score(c);
                if (s > best_score) {
                    best_score = s;
                    best_comm = c;
                }
            }

            community_degree[static_cast<std::size_t>(best_comm)] += degrees(i);
            labels[static_cast<std::size_t>(i)] = best_comm;
            if (best_comm != old_comm) {
                moved = true;
                any_move = true;
            }

            for (const int c : touched) weight_to[static_cast<std::size_t>(c)] = 0.0;
        }
    }
    return any_move;
}

} // namespace detail

/// Louvain community detection: local moving until no gain above 1e-12, then
/// community aggregation, repeated until a level produces no move. The node
/// visit order is shuffled deterministically from the seed.
inline Partition louvain(const WeightedGraph& g, std::uint64_t seed, double resolution = 1.0,
                         LouvainLog* log = nullptr) {
    const int n = g.n();
    if (!(g.adjacency.sum() > 0.0)) throw EmptyGraphError("graph has no weight");
    constexpr double kGainTol = 1e-12;

    Rng rng(seed);
    Matrix working = g.adjacency;
    std::vector<int> node_to_community(static_cast<std::size_t>(n));
    std::iota(node_to_community.begin(), node_to_community.end(), 0);

    while (true) {
        const int level_n = static_cast<int>(working.rows());
        std::vector<int> labels(static_cast<std::size_t>(level_n));
        std::iota(labels.begin(), labels.end(), 0);

        const bool improved = detail::local_moving_phase(working, labels, rng, resolution, kGainTol);

        // canonicalize level labels so aggregation indices are 0..c-1
        Partition level{labels, {}};
        level.node_ids.resize(static_cast<std::size_t>(level_n));
        level = canonicalize(std::move(level));
        const int c = level.cluster_count();

        if (log) {
            const auto agg = detail::aggregate_communities(working, level.labels, c);
            log->phase_modularity.push_back(detail::modularity_from_aggregates(agg, 1.0));
        }

        for (auto& comm : node_to_community)
            comm = level.labels[static_cast<std::size_t>(comm)];

        if (!improved || c == level_n) break;

        // aggregate: communities become nodes; the diagonal keeps the
        // ordered-pair internal weight so Q is preserved across levels
        Matrix reduced = Matrix::Zero(c, c);
        for (int i = 0; i < level_n; ++i) {
            const int ci = level.labels[static_cast<std::size_t>(i)];
            for (int j = 0; j < level_n; ++j)
                reduced(ci, level.labels[static_cast<std::size_t>(j)]) += working(i, j);
        }
        working = std::move(reduced);
    }

    return canonicalize(Partition{std::move(node_to_community), g.node_ids});
}

} // namespace multifuse
