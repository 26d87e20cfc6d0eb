#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "multifuse/errors.hpp"
#include "multifuse/model.hpp"
#include "multifuse/parallel.hpp"

namespace multifuse {

/// Euclidean distance matrix between node embeddings (matrix rows): the
/// n-sample view of a similarity matrix that the distance-correlation
/// statistics consume.
struct EmbeddedDistances {
    Matrix d;
    std::vector<std::string> node_ids;

    int n() const { return static_cast<int>(d.rows()); }
};

struct DcorResult {
    double dcor = 0.0;
    double dcor_sq = 0.0;
};

struct PdcorResult {
    double pdcor = 0.0;      // bias-corrected partial distance correlation, in [-1,1]
    double pdcor_root = 0.0; // sqrt of the nonnegative part
};

/// Embeds each node as its similarity-matrix row and returns all pairwise
/// Euclidean distances. Symmetry and the zero diagonal hold exactly; the
/// triangle inequality holds because the construction is Euclidean.
inline EmbeddedDistances embed_rows(const SimilarityMatrix& s) {
    const int n = s.n();
    EmbeddedDistances out{Matrix(n, n), s.node_ids};
    detail::parallel_for(0, n, [&](int i) {
        out.d(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double dist = (s.values.row(i) - s.values.row(j)).norm();
            out.d(i, j) = dist;
            out.d(j, i) = dist;
        }
    });
    return out;
}

namespace detail {

inline void require_same_samples(const EmbeddedDistances& a, const EmbeddedDistances& b,
                                 const char* context) {
    if (a.n() != b.n())
        throw DimensionMismatchError(std::string(context) + ": sample sizes " +
                                     std::to_string(a.n()) + " and " + std::to_string(b.n()));
    require_aligned(a.node_ids, b.node_ids, context);
}

/// Classical double centering: subtract row and column means, add the grand mean.
inline Matrix double_center(const Matrix& d) {
    const Eigen::VectorXd row_means = d.rowwise().mean();
    const Eigen::RowVectorXd col_means = d.colwise().mean();
    const double grand = d.mean();
    Matrix centered = d;
    centered.colwise() -= row_means;
    centered.rowwise() -= col_means;
    centered.array() += grand;
    return centered;
}

/// U-centering: off-diagonal cells lose row and column sums scaled by n-2
/// and regain the grand sum scaled by (n-1)(n-2); the diagonal is zero.
inline Matrix u_center(const Matrix& d) {
    const int n = static_cast<int>(d.rows());
    const Eigen::VectorXd row_sums = d.rowwise().sum();
    const Eigen::RowVectorXd col_sums = d.colwise().sum();
    const double grand = d.sum();
    Matrix centered(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                centered(i, j) = 0.0;
            } else {
                centered(i, j) = d(i, j) - row_sums(i) / (n - 2) - col_sums(j) / (n - 2) +
                                 grand / (static_cast<double>(n - 1) * (n - 2));
            }
        }
    }
    return centered;
}

/// Inner product of U-centered matrices: (1/(n(n-3))) * sum_{i!=j} x_ij y_ij.
inline double u_inner(const Matrix& x, const Matrix& y) {
    const int n = static_cast<int>(x.rows());
    return (x.array() * y.array()).sum() / (static_cast<double>(n) * (n - 3));
}

/// Bias-corrected distance correlation R* from U-centered matrices; 0 when a
/// self inner product vanishes.
inline double bias_corrected_r(const Matrix& x, const Matrix& y) {
    const double vx = u_inner(x, x);
    const double vy = u_inner(y, y);
    if (vx <= 0.0 || vy <= 0.0) return 0.0;
    return u_inner(x, y) / std::sqrt(vx * vy);
}

} // namespace detail

/// Generalized distance correlation between two embedded samples. Both the
/// square root form and the squared form are returned because published
/// tables are reported in either convention.
inline DcorResult distance_correlation(const EmbeddedDistances& a, const EmbeddedDistances& b) {
    detail::require_same_samples(a, b, "distance_correlation");
    const int n = a.n();
    const double n_sq = static_cast<double>(n) * static_cast<double>(n);
    const Matrix ca = detail::double_center(a.d);
    const Matrix cb = detail::double_center(b.d);
    const double dcov_sq = (ca.array() * cb.array()).sum() / n_sq;
    const double dvar_a = (ca.array() * ca.array()).sum() / n_sq;
    const double dvar_b = (cb.array() * cb.array()).sum() / n_sq;
    DcorResult out;
    if (dvar_a > 0.0 && dvar_b > 0.0) {
        out.dcor_sq = dcov_sq / std::sqrt(dvar_a * dvar_b);
        out.dcor_sq = std::clamp(out.dcor_sq, 0.0, 1.0);
        out.dcor = std::sqrt(out.dcor_sq);
    }
    return out;
}

/// Bias-corrected partial distance correlation of a and b with z projected
/// out. Vanishing denominator factors (|R*(x,z)| ~ 1, i.e. conditioning on a
/// copy of the variable) return 0; 1e-12 absorbs the floating-point residue
/// of those |R*| ~ 1 cases.
inline PdcorResult partial_distance_correlation(const EmbeddedDistances& a,
                                                const EmbeddedDistances& b,
                                                const EmbeddedDistances& z) {
    detail::require_same_samples(a, b, "partial_distance_correlation");
    detail::require_same_samples(a, z, "partial_distance_correlation");
    if (a.n() < 4)
        throw InsufficientSampleError("partial distance correlation requires n >= 4, got " +
                                      std::to_string(a.n()));
    const Matrix ua = detail::u_center(a.d);
    const Matrix ub = detail::u_center(b.d);
    const Matrix uz = detail::u_center(z.d);
    const double rab = detail::bias_corrected_r(ua, ub);
    const double raz = detail::bias_corrected_r(ua, uz);
    const double rbz = detail::bias_corrected_r(ub, uz);
    const double da = 1.0 - raz * raz;
    const double db = 1.0 - rbz * rbz;
    PdcorResult out;
    if (da < 1e-12 || db < 1e-12) return out;
    out.pdcor = std::clamp((rab - raz * rbz) / std::sqrt(da * db), -1.0, 1.0);
    out.pdcor_root = std::sqrt(std::max(0.0, out.pdcor));
    return out;
}

namespace detail {

/// Contingency table of co-memberships between two canonicalized partitions.
inline std::vector<std::vector<std::int64_t>> contingency(const Partition& p, const Partition& q) {
    const int r = p.cluster_count();
    const int c = q.cluster_count();
    std::vector<std::vector<std::int64_t>> table(static_cast<std::size_t>(r),
                                                 std::vector<std::int64_t>(static_cast<std::size_t>(c), 0));
    for (int i = 0; i < p.n(); ++i)
        ++table[static_cast<std::size_t>(p.labels[static_cast<std::size_t>(i)])]
               [static_cast<std::size_t>(q.labels[static_cast<std::size_t>(i)])];
    return table;
}

} // namespace detail

/// Cramer's V between two partitions, invariant under cluster relabeling
/// (both sides are canonicalized before the chi-square sum, so relabeled
/// inputs take bit-identical summation paths). Two single-cluster partitions
/// associate perfectly (1); a single-cluster against anything else carries no
/// association signal (0).
inline double cramers_v(const Partition& p, const Partition& q) {
    require_aligned(p.node_ids, q.node_ids, "cramers_v");
    const Partition cp = canonicalize(p);
    const Partition cq = canonicalize(q);
    const auto table = detail::contingency(cp, cq);
    const int r = static_cast<int>(table.size());
    const int c = r > 0 ? static_cast<int>(table[0].size()) : 0;
    if (r == 1 && c == 1) return 1.0;
    if (r <= 1 || c <= 1) return 0.0;

    const auto n = static_cast<double>(cp.n());
    std::vector<double> row_sums(static_cast<std::size_t>(r), 0.0);
    std::vector<double> col_sums(static_cast<std::size_t>(c), 0.0);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) {
            const auto o = static_cast<double>(table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            row_sums[static_cast<std::size_t>(i)] += o;
            col_sums[static_cast<std::size_t>(j)] += o;
        }
    double chi_sq = 0.0;
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < c; ++j) {
            const double expected = row_sums[static_cast<std::size_t>(i)] *
                                    col_sums[static_cast<std::size_t>(j)] / n;
            if (expected <= 0.0) continue;
            const auto o = static_cast<double>(table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            const double diff = o - expected;
            chi_sq += diff * diff / expected;
        }
    }
    const double v = std::sqrt(chi_sq / (n * std::min(r - 1, c - 1)));
    return std::min(v, 1.0);
}

/// Pair-counting adjusted Rand index. Identical partitions score 1 (also in
/// the degenerate all-singleton / single-cluster cases where the chance
/// correction is 0/0); expectation under random labeling is 0.
inline double adjusted_rand(const Partition& p, const Partition& q) {
    require_aligned(p.node_ids, q.node_ids, "adjusted_rand");
    const Partition cp = canonicalize(p);
    const Partition cq = canonicalize(q);
    const auto table = detail::contingency(cp, cq);
    const auto n = static_cast<double>(cp.n());
    if (cp.n() < 2) return 1.0;

    const auto comb2 = [](double x) { return x * (x - 1.0) / 2.0; };
    double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    std::vector<double> col_sums(table.empty() ? 0 : table[0].size(), 0.0);
    for (const auto& row : table) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const auto o = static_cast<double>(row[j]);
            sum_cells += comb2(o);
            row_sum += o;
            col_sums[j] += o;
        }
        sum_rows += comb2(row_sum);
    }
    for (const double cs : col_sums) sum_cols += comb2(cs);

    const double total_pairs = comb2(n);
    const double expected = sum_rows * sum_cols / total_pairs;
    const double max_index = 0.5 * (sum_rows + sum_cols);
    const double denom = max_index - expected;
    if (denom == 0.0) {
        // both partitions trivial in the same way: they are identical
        return cp.labels == cq.labels ? 1.0 : 0.0;
    }
    return (sum_cells - expected) / denom;
}

} // namespace multifuse
