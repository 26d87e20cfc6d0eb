#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "multifuse/errors.hpp"
#include "multifuse/ingest.hpp"
#include "multifuse/model.hpp"
#include "multifuse/parallel.hpp"

namespace multifuse {

namespace detail {

/// Neumaier compensated accumulator. Keeps the pairwise L1 sums effectively
/// exact, which makes the total-variation layer insensitive to feature
/// (column) permutations instead of drifting in the last ulp.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline int intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
    int count = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (a[i] > b[j]) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

} // namespace detail

/// Jaccard coefficient |A_i & A_j| / |A_i | A_j| over cited-reference sets.
/// Diagonal is 1; output entries lie in [0,1] and the matrix is exactly
/// symmetric by construction.
inline SimilarityMatrix jaccard_layer(const BipartiteIncidence& b) {
    const int n = b.n_rows();
    for (int i = 0; i < n; ++i)
        if (b.rows[static_cast<std::size_t>(i)].empty())
            throw EmptyArticleError("article '" + b.row_ids[static_cast<std::size_t>(i)] +
                                    "' has no cited references");

    SimilarityMatrix out{Matrix(n, n), b.row_ids};
    detail::parallel_for(0, n, [&](int i) {
        const auto& ai = b.rows[static_cast<std::size_t>(i)];
        out.values(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
            const auto& aj = b.rows[static_cast<std::size_t>(j)];
            const int inter = detail::intersection_size(ai, aj);
            const int uni = static_cast<int>(ai.size() + aj.size()) - inter;
            const double v = static_cast<double>(inter) / static_cast<double>(uni);
            out.values(i, j) = v;
            out.values(j, i) = v;
        }
    });
    return out;
}

/// Row-normalizes integer counts into relative frequencies.
inline DistributionMatrix relative_frequencies(const CountTable& t) {
    DistributionMatrix out;
    out.row_ids = t.row_ids;
    out.col_ids = t.col_ids;
    out.rows.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        std::int64_t total = 0;
        for (const auto& [col, value] : t.rows[r]) total += value;
        if (total <= 0)
            throw ZeroRowError("article '" + t.row_ids[r] + "' has no positive counts");
        std::vector<std::pair<int, double>> row;
        row.reserve(t.rows[r].size());
        for (const auto& [col, value] : t.rows[r])
            row.emplace_back(col, static_cast<double>(value) / static_cast<double>(total));
        out.rows.push_back(std::move(row));
    }
    return out;
}

/// Similarity 1 - (1/2) * sum_l |p_il - p_jl| between row distributions. The
/// sum runs over the union of the two rows' nonzero features, which equals
/// the full-vocabulary sum because absent features contribute |0-0|.
inline SimilarityMatrix total_variation_layer(const DistributionMatrix& d) {
    const int n = d.n_rows();
    SimilarityMatrix out{Matrix(n, n), d.row_ids};
    detail::parallel_for(0, n, [&](int i) {
        const auto& pi = d.rows[static_cast<std::size_t>(i)];
        out.values(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
            const auto& pj = d.rows[static_cast<std::size_t>(j)];
            detail::CompensatedSum l1;
            std::size_t a = 0, b = 0;
            while (a < pi.size() && b < pj.size()) {
                if (pi[a].first < pj[b].first) {
                    l1.add(std::abs(pi[a].second));
                    ++a;
                } else if (pi[a].first > pj[b].first) {
                    l1.add(std::abs(pj[b].second));
                    ++b;
                } else {
                    l1.add(std::abs(pi[a].second - pj[b].second));
                    ++a;
                    ++b;
                }
            }
            for (; a < pi.size(); ++a) l1.add(std::abs(pi[a].second));
            for (; b < pj.size(); ++b) l1.add(std::abs(pj[b].second));
            const double v = std::max(0.0, 1.0 - 0.5 * l1.value());
            out.values(i, j) = v;
            out.values(j, i) = v;
        }
    });
    return out;
}

} // namespace multifuse
