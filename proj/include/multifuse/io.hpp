#pragma once

#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "multifuse/errors.hpp"
#include "multifuse/ingest.hpp"
#include "multifuse/model.hpp"

namespace multifuse {

/// Shortest round-trippable decimal form of a double.
inline std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_display(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary); // binary keeps '\n' endings everywhere
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

inline std::filesystem::path ids_sidecar(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p.replace_extension(".ids");
    return p;
}

} // namespace detail

/// Writes a matrix as headerless full-precision CSV plus a `.ids` sidecar
/// holding one node id per line.
inline void write_matrix_csv(const std::filesystem::path& csv_path, const SimilarityMatrix& m) {
    auto out = detail::open_out(csv_path);
    const int n = m.n();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j > 0) out << ',';
            out << format_full(m.values(i, j));
        }
        out << '\n';
    }
    auto ids = detail::open_out(detail::ids_sidecar(csv_path));
    for (const auto& id : m.node_ids) ids << id << '\n';
}

/// Reads a headerless matrix CSV and its `.ids` sidecar.
inline SimilarityMatrix read_matrix_csv(const std::filesystem::path& csv_path) {
    const auto lines = detail::read_lines(csv_path.string());
    const int n = static_cast<int>(lines.size());
    SimilarityMatrix m{Matrix(n, n), {}};
    for (int i = 0; i < n; ++i) {
        const auto fields = detail::split_fields(lines[static_cast<std::size_t>(i)].text, ',');
        if (static_cast<int>(fields.size()) != n)
            detail::fail_line(csv_path.string(), lines[static_cast<std::size_t>(i)],
                              "expected " + std::to_string(n) + " columns, got " +
                                  std::to_string(fields.size()));
        for (int j = 0; j < n; ++j) {
            try {
                std::size_t consumed = 0;
                m.values(i, j) = std::stod(fields[static_cast<std::size_t>(j)], &consumed);
                if (consumed != fields[static_cast<std::size_t>(j)].size())
                    detail::fail_line(csv_path.string(), lines[static_cast<std::size_t>(i)],
                                      "malformed value");
            } catch (const ParseError&) {
                throw;
            } catch (const std::exception&) {
                detail::fail_line(csv_path.string(), lines[static_cast<std::size_t>(i)],
                                  "malformed value");
            }
        }
    }
    const auto ids_path = detail::ids_sidecar(csv_path);
    for (const auto& line : detail::read_lines(ids_path.string())) m.node_ids.push_back(line.text);
    if (static_cast<int>(m.node_ids.size()) != n)
        throw ParseError(ids_path.string() + ": " + std::to_string(m.node_ids.size()) +
                         " ids for a " + std::to_string(n) + "-row matrix");
    return m;
}

/// Partition as `node_id,cluster_id` CSV with a header line.
inline void write_partition_csv(const std::filesystem::path& path, const Partition& p) {
    auto out = detail::open_out(path);
    out << "node_id,cluster_id\n";
    for (int i = 0; i < p.n(); ++i)
        out << p.node_ids[static_cast<std::size_t>(i)] << ','
            << p.labels[static_cast<std::size_t>(i)] << '\n';
}

inline Partition read_partition_csv(const std::filesystem::path& path) {
    Partition p;
    bool header = true;
    for (const auto& line : detail::read_lines(path.string())) {
        if (header) {
            header = false;
            continue;
        }
        const auto fields = detail::split_fields(line.text, ',');
        if (fields.size() != 2) detail::fail_line(path.string(), line, "expected 2 fields");
        try {
            p.labels.push_back(std::stoi(fields[1]));
        } catch (const std::exception&) {
            detail::fail_line(path.string(), line, "malformed cluster id");
        }
        p.node_ids.push_back(fields[0]);
    }
    return p;
}

/// Distribution rows as `article_id,feature,weight` triples, the same format
/// read_distribution_table accepts.
inline void write_distribution_csv(const std::filesystem::path& path, const DistributionMatrix& d) {
    auto out = detail::open_out(path);
    for (int r = 0; r < d.n_rows(); ++r)
        for (const auto& [col, w] : d.rows[static_cast<std::size_t>(r)])
            out << d.row_ids[static_cast<std::size_t>(r)] << ','
                << d.col_ids[static_cast<std::size_t>(col)] << ',' << format_full(w) << '\n';
}

/// Tab-separated weighted edge list `source<TAB>target<TAB>weight<TAB>cluster`
/// over the upper triangle. The cluster column holds the shared cluster id of
/// the endpoints, or -1 for edges crossing clusters. Edges with weight below
/// the threshold are dropped; returns the number dropped.
inline std::int64_t write_edge_list(const std::filesystem::path& path, const SimilarityMatrix& s,
                                    const Partition& p, double threshold = 0.0) {
    require_aligned(s.node_ids, p.node_ids, "write_edge_list");
    auto out = detail::open_out(path);
    std::int64_t dropped = 0;
    const int n = s.n();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double w = s.values(i, j);
            if (w <= 0.0) continue;
            if (w < threshold) {
                ++dropped;
                continue;
            }
            const int ci = p.labels[static_cast<std::size_t>(i)];
            const int cj = p.labels[static_cast<std::size_t>(j)];
            out << s.node_ids[static_cast<std::size_t>(i)] << '\t'
                << s.node_ids[static_cast<std::size_t>(j)] << '\t' << format_full(w) << '\t'
                << (ci == cj ? ci : -1) << '\n';
        }
    }
    return dropped;
}

/// Long-format cross-tabulation `cluster_a,cluster_b,count` of two aligned
/// partitions, for alluvial-style plotting in external tools.
inline void write_crosstab(const std::filesystem::path& path, const Partition& a,
                           const Partition& b) {
    require_aligned(a.node_ids, b.node_ids, "write_crosstab");
    std::map<std::pair<int, int>, std::int64_t> cells;
    for (int i = 0; i < a.n(); ++i)
        ++cells[{a.labels[static_cast<std::size_t>(i)], b.labels[static_cast<std::size_t>(i)]}];
    auto out = detail::open_out(path);
    out << "cluster_a,cluster_b,count\n";
    for (const auto& [key, count] : cells)
        out << key.first << ',' << key.second << ',' << count << '\n';
}

} // namespace multifuse
