#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "multifuse/errors.hpp"

namespace multifuse {

using Matrix = Eigen::MatrixXd;

/// Absolute tolerance under which near-symmetric matrices are accepted and
/// averaged to exact symmetry.
inline constexpr double kSymmetryTol = 1e-12;

/// Square symmetric nonnegative matrix of pairwise article similarities,
/// together with the node identifiers its rows/columns refer to.
struct SimilarityMatrix {
    Matrix values;
    std::vector<std::string> node_ids;

    int n() const { return static_cast<int>(values.rows()); }
};

/// Binary articles x cited-references incidence. Each row holds the sorted
/// column indices of the article's references.
struct BipartiteIncidence {
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
    std::vector<std::vector<int>> rows;

    int n_rows() const { return static_cast<int>(rows.size()); }
    int n_cols() const { return static_cast<int>(col_ids.size()); }
};

/// Row-stochastic articles x features matrix with sparse rows: each row is a
/// list of (column, weight) pairs sorted by column, weights in [0,1] summing
/// to 1. Works equally for word relative frequencies and topic distributions.
struct DistributionMatrix {
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
    std::vector<std::vector<std::pair<int, double>>> rows;

    int n_rows() const { return static_cast<int>(rows.size()); }
    int n_cols() const { return static_cast<int>(col_ids.size()); }
};

/// Cluster label per node.
struct Partition {
    std::vector<int> labels;
    std::vector<std::string> node_ids;

    int n() const { return static_cast<int>(labels.size()); }
    int cluster_count() const {
        const std::unordered_set<int> distinct(labels.begin(), labels.end());
        return static_cast<int>(distinct.size());
    }
};

/// Ordered set of similarity layers over one shared node index.
struct MultiplexBundle {
    std::vector<SimilarityMatrix> layers;
    std::vector<std::string> node_ids;

    int n() const { return static_cast<int>(node_ids.size()); }
};

/// Zero-padded identifiers "n000", "n001", ... used by generators and tests.
inline std::vector<std::string> default_node_ids(int n, const std::string& prefix = "n") {
    int width = 1;
    for (int v = n - 1; v >= 10; v /= 10) ++width;
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(std::max(n, 0)));
    for (int i = 0; i < n; ++i) {
        std::string digits = std::to_string(i);
        ids.push_back(prefix + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits);
    }
    return ids;
}

/// Asserts element-wise identifier equality between two aligned structures.
inline void require_aligned(const std::vector<std::string>& a,
                            const std::vector<std::string>& b,
                            const std::string& context) {
    if (a.size() != b.size())
        throw AlignmentError(context + ": id lists have sizes " + std::to_string(a.size()) +
                             " and " + std::to_string(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != b[i])
            throw AlignmentError(context + ": id mismatch at position " + std::to_string(i) +
                                 " ('" + a[i] + "' vs '" + b[i] + "')");
    }
}

/// Checks every SimilarityMatrix invariant and returns the matrix with
/// residual asymmetry below kSymmetryTol averaged away, so downstream code
/// can rely on exact symmetry.
inline SimilarityMatrix validate_similarity(SimilarityMatrix m) {
    const auto rows = m.values.rows();
    const auto cols = m.values.cols();
    if (rows != cols)
        throw DimensionMismatchError("similarity matrix is " + std::to_string(rows) + "x" +
                                     std::to_string(cols) + ", expected square");
    const int n = static_cast<int>(rows);
    if (static_cast<int>(m.node_ids.size()) != n)
        throw DimensionMismatchError("similarity matrix has " + std::to_string(n) +
                                     " rows but " + std::to_string(m.node_ids.size()) + " node ids");

    std::unordered_set<std::string> seen;
    seen.reserve(m.node_ids.size());
    for (const auto& id : m.node_ids) {
        if (!seen.insert(id).second) throw DuplicateIdError("duplicate node id '" + id + "'");
    }

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double v = m.values(i, j);
            if (!std::isfinite(v))
                throw NonFiniteError("non-finite entry at (" + std::to_string(i) + "," +
                                     std::to_string(j) + ")");
            if (v < 0.0)
                throw NegativeEntryError("negative entry " + std::to_string(v) + " at (" +
                                         std::to_string(i) + "," + std::to_string(j) + ")");
        }
    }

    double max_asym = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            max_asym = std::max(max_asym, std::abs(m.values(i, j) - m.values(j, i)));
    if (max_asym > kSymmetryTol) {
        std::ostringstream os;
        os << "max |m(i,j)-m(j,i)| = " << max_asym << " exceeds tolerance " << kSymmetryTol;
        throw AsymmetryError(os.str());
    }

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (m.values(i, j) + m.values(j, i));
            m.values(i, j) = avg;
            m.values(j, i) = avg;
        }
    }
    return m;
}

/// (m + m^T) / 2 with both mirror cells assigned from one computation, so the
/// result is exactly symmetric and the operation is exactly idempotent.
inline SimilarityMatrix symmetrize(const Matrix& m, std::vector<std::string> node_ids) {
    if (m.rows() != m.cols())
        throw DimensionMismatchError("cannot symmetrize a " + std::to_string(m.rows()) + "x" +
                                     std::to_string(m.cols()) + " matrix");
    const int n = static_cast<int>(m.rows());
    if (static_cast<int>(node_ids.size()) != n)
        throw DimensionMismatchError("symmetrize: " + std::to_string(node_ids.size()) +
                                     " node ids for " + std::to_string(n) + " rows");
    SimilarityMatrix out{Matrix(n, n), std::move(node_ids)};
    for (int i = 0; i < n; ++i) {
        const double d = m(i, i);
        if (!std::isfinite(d)) throw NonFiniteError("non-finite diagonal entry at " + std::to_string(i));
        out.values(i, i) = d;
        for (int j = i + 1; j < n; ++j) {
            const double a = m(i, j);
            const double b = m(j, i);
            if (!std::isfinite(a) || !std::isfinite(b))
                throw NonFiniteError("non-finite entry at (" + std::to_string(i) + "," +
                                     std::to_string(j) + ")");
            const double avg = 0.5 * (a + b);
            out.values(i, j) = avg;
            out.values(j, i) = avg;
        }
    }
    return out;
}

inline SimilarityMatrix symmetrize(const Matrix& m) {
    return symmetrize(m, default_node_ids(static_cast<int>(m.rows())));
}

inline SimilarityMatrix symmetrize(const SimilarityMatrix& m) {
    return symmetrize(m.values, m.node_ids);
}

/// Removes self-similarities; off-diagonal entries are untouched.
inline SimilarityMatrix zero_diagonal(SimilarityMatrix m) {
    m.values.diagonal().setZero();
    return m;
}

/// Relabels clusters to a contiguous 0..c-1 range in order of first
/// occurrence by node index.
inline Partition canonicalize(Partition p) {
    std::unordered_map<int, int> relabel;
    relabel.reserve(p.labels.size());
    int next = 0;
    for (auto& l : p.labels) {
        const auto [it, inserted] = relabel.emplace(l, next);
        if (inserted) ++next;
        l = it->second;
    }
    return p;
}

/// Checks that all layers share the bundle's node index in identical order.
inline void validate_bundle(const MultiplexBundle& bundle) {
    for (std::size_t v = 0; v < bundle.layers.size(); ++v) {
        const auto& layer = bundle.layers[v];
        if (layer.n() != bundle.n())
            throw AlignmentError("layer " + std::to_string(v) + " has " +
                                 std::to_string(layer.n()) + " nodes, bundle has " +
                                 std::to_string(bundle.n()));
        require_aligned(layer.node_ids, bundle.node_ids, "bundle layer " + std::to_string(v));
    }
}

/// Checks DistributionMatrix invariants: cells in [0,1], rows sum to 1 +- 1e-9.
inline void validate_distribution(const DistributionMatrix& d) {
    if (d.rows.size() != d.row_ids.size())
        throw DimensionMismatchError("distribution matrix has " + std::to_string(d.rows.size()) +
                                     " rows but " + std::to_string(d.row_ids.size()) + " row ids");
    for (std::size_t i = 0; i < d.rows.size(); ++i) {
        double sum = 0.0;
        int prev_col = -1;
        for (const auto& [col, w] : d.rows[i]) {
            if (col <= prev_col || col >= d.n_cols())
                throw DimensionMismatchError("row '" + d.row_ids[i] +
                                             "' has out-of-order or out-of-range column index");
            prev_col = col;
            if (!(w >= 0.0 && w <= 1.0) || !std::isfinite(w))
                throw DomainError("row '" + d.row_ids[i] + "' has weight outside [0,1]");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw DomainError("row '" + d.row_ids[i] + "' sums to " + std::to_string(sum) +
                              ", expected 1");
    }
}

} // namespace multifuse
