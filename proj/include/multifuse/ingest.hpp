#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "multifuse/errors.hpp"
#include "multifuse/model.hpp"

namespace multifuse {

/// Nonnegative integer counts of terms per article; only positive cells are
/// stored, each row sorted by column index. A row may be empty (all counts
/// zero); normalization rejects it downstream.
struct CountTable {
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
    std::vector<std::vector<std::pair<int, std::int64_t>>> rows;

    int n_rows() const { return static_cast<int>(rows.size()); }
    int n_cols() const { return static_cast<int>(col_ids.size()); }
};

struct IngestOptions {
    char delimiter = ',';   // '\t' for TSV exports
    bool drop_empty = false; // drop articles without references instead of erroring
};

namespace detail {

struct RawLine {
    std::size_t number = 0;
    std::string text;
};

/// Reads all content lines of a UTF-8 text file; empty lines are skipped,
/// trailing '\r' is stripped so CRLF files parse identically.
inline std::vector<RawLine> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::vector<RawLine> lines;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        lines.push_back({number, line});
    }
    return lines;
}

inline std::vector<std::string> split_fields(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delimiter, start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

[[noreturn]] inline void fail_line(const std::string& path, const RawLine& line,
                                   const std::string& reason) {
    throw ParseError(path + ":" + std::to_string(line.number) + ": " + reason + ": '" +
                     line.text + "'");
}

inline void log_note(std::vector<std::string>* log, std::string note) {
    if (log) log->push_back(std::move(note));
}

} // namespace detail

/// Parses `article_id,reference_id` pairs into a binary incidence. Duplicate
/// pairs collapse; a line with an empty reference field declares an article
/// with no references. Articles left without references raise
/// EmptyArticleError listing their ids, or are dropped (and logged) when
/// opts.drop_empty is set. Row and column order is lexicographic in the ids,
/// so the result is independent of line order.
inline BipartiteIncidence read_citation_edges(const std::string& path,
                                              const IngestOptions& opts = {},
                                              std::vector<std::string>* log = nullptr) {
    std::map<std::string, std::set<std::string>> refs_by_article;
    for (const auto& line : detail::read_lines(path)) {
        const auto fields = detail::split_fields(line.text, opts.delimiter);
        if (fields.size() != 2) detail::fail_line(path, line, "expected 2 fields");
        if (fields[0].empty()) detail::fail_line(path, line, "empty article id");
        auto& refs = refs_by_article[fields[0]];
        if (!fields[1].empty()) refs.insert(fields[1]);
    }

    std::vector<std::string> empty_articles;
    for (const auto& [article, refs] : refs_by_article)
        if (refs.empty()) empty_articles.push_back(article);
    if (!empty_articles.empty()) {
        std::string listing;
        for (const auto& id : empty_articles) {
            if (!listing.empty()) listing += ", ";
            listing += id;
        }
        if (!opts.drop_empty)
            throw EmptyArticleError(path + ": articles without cited references: " + listing);
        detail::log_note(log, "dropped articles without cited references: " + listing);
        for (const auto& id : empty_articles) refs_by_article.erase(id);
    }

    std::map<std::string, int> col_index;
    for (const auto& [article, refs] : refs_by_article)
        for (const auto& r : refs) col_index.emplace(r, 0);
    int next = 0;
    for (auto& [ref, idx] : col_index) idx = next++;

    BipartiteIncidence out;
    out.col_ids.reserve(col_index.size());
    for (const auto& [ref, idx] : col_index) out.col_ids.push_back(ref);
    for (const auto& [article, refs] : refs_by_article) {
        out.row_ids.push_back(article);
        std::vector<int> row;
        row.reserve(refs.size());
        for (const auto& r : refs) row.push_back(col_index.at(r));
        out.rows.push_back(std::move(row)); // set order maps to sorted indices
    }
    return out;
}

/// Parses `article_id,term,count` triples; repeated triples sum. Counts must
/// be nonnegative integers.
inline CountTable read_count_table(const std::string& path, const IngestOptions& opts = {}) {
    std::map<std::string, std::map<std::string, std::int64_t>> counts;
    for (const auto& line : detail::read_lines(path)) {
        const auto fields = detail::split_fields(line.text, opts.delimiter);
        if (fields.size() != 3) detail::fail_line(path, line, "expected 3 fields");
        if (fields[0].empty()) detail::fail_line(path, line, "empty article id");
        if (fields[1].empty()) detail::fail_line(path, line, "empty term");
        std::int64_t value = 0;
        try {
            std::size_t consumed = 0;
            value = std::stoll(fields[2], &consumed);
            if (consumed != fields[2].size()) detail::fail_line(path, line, "malformed count");
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            detail::fail_line(path, line, "malformed count");
        }
        if (value < 0)
            throw NegativeCountError(path + ":" + std::to_string(line.number) +
                                     ": negative count: '" + line.text + "'");
        counts[fields[0]][fields[1]] += value;
    }

    std::map<std::string, int> col_index;
    for (const auto& [article, terms] : counts)
        for (const auto& [term, value] : terms)
            if (value > 0) col_index.emplace(term, 0);
    int next = 0;
    for (auto& [term, idx] : col_index) idx = next++;

    CountTable out;
    out.col_ids.reserve(col_index.size());
    for (const auto& [term, idx] : col_index) out.col_ids.push_back(term);
    for (const auto& [article, terms] : counts) {
        out.row_ids.push_back(article);
        std::vector<std::pair<int, std::int64_t>> row;
        for (const auto& [term, value] : terms)
            if (value > 0) row.emplace_back(col_index.at(term), value);
        out.rows.push_back(std::move(row));
    }
    return out;
}

/// Removes terms whose document frequency (number of articles with a positive
/// count) is below min_docs or above max_doc_fraction * n_rows. Rows left
/// without terms are dropped and reported through the log.
inline CountTable filter_vocabulary(const CountTable& t, int min_docs = 3,
                                    double max_doc_fraction = 0.95,
                                    std::vector<std::string>* log = nullptr) {
    if (min_docs < 0) throw ConfigError("min_docs must be >= 0");
    if (!(max_doc_fraction >= 0.0 && max_doc_fraction <= 1.0))
        throw ConfigError("max_doc_fraction must be in [0,1]");

    std::vector<int> doc_freq(static_cast<std::size_t>(t.n_cols()), 0);
    for (const auto& row : t.rows)
        for (const auto& [col, value] : row) ++doc_freq[static_cast<std::size_t>(col)];

    const double max_docs = max_doc_fraction * t.n_rows();
    std::vector<int> remap(static_cast<std::size_t>(t.n_cols()), -1);
    CountTable out;
    for (int c = 0; c < t.n_cols(); ++c) {
        const int df = doc_freq[static_cast<std::size_t>(c)];
        if (df < min_docs || static_cast<double>(df) > max_docs) continue;
        remap[static_cast<std::size_t>(c)] = static_cast<int>(out.col_ids.size());
        out.col_ids.push_back(t.col_ids[static_cast<std::size_t>(c)]);
    }
    if (out.col_ids.empty() && t.n_cols() > 0)
        throw AllTermsRemovedError("vocabulary filter removed all " +
                                   std::to_string(t.n_cols()) + " terms");

    for (int r = 0; r < t.n_rows(); ++r) {
        std::vector<std::pair<int, std::int64_t>> row;
        for (const auto& [col, value] : t.rows[static_cast<std::size_t>(r)]) {
            const int mapped = remap[static_cast<std::size_t>(col)];
            if (mapped >= 0) row.emplace_back(mapped, value);
        }
        if (row.empty() && !t.rows[static_cast<std::size_t>(r)].empty()) {
            detail::log_note(log, "article '" + t.row_ids[static_cast<std::size_t>(r)] +
                                      "' lost all terms in vocabulary filtering; row dropped");
            continue;
        }
        out.row_ids.push_back(t.row_ids[static_cast<std::size_t>(r)]);
        out.rows.push_back(std::move(row));
    }
    return out;
}

/// Parses `article_id,feature,weight` triples with nonnegative weights and
/// renormalizes each row to sum 1. Renormalization is logged whenever a raw
/// row sum deviates from 1 by more than 1e-6.
inline DistributionMatrix read_distribution_table(const std::string& path,
                                                  const IngestOptions& opts = {},
                                                  std::vector<std::string>* log = nullptr) {
    std::map<std::string, std::map<std::string, double>> weights;
    for (const auto& line : detail::read_lines(path)) {
        const auto fields = detail::split_fields(line.text, opts.delimiter);
        if (fields.size() != 3) detail::fail_line(path, line, "expected 3 fields");
        if (fields[0].empty()) detail::fail_line(path, line, "empty article id");
        if (fields[1].empty()) detail::fail_line(path, line, "empty feature");
        double value = 0.0;
        try {
            std::size_t consumed = 0;
            value = std::stod(fields[2], &consumed);
            if (consumed != fields[2].size()) detail::fail_line(path, line, "malformed weight");
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            detail::fail_line(path, line, "malformed weight");
        }
        if (!std::isfinite(value)) detail::fail_line(path, line, "non-finite weight");
        if (value < 0.0) detail::fail_line(path, line, "negative weight");
        weights[fields[0]][fields[1]] += value;
    }

    std::map<std::string, int> col_index;
    for (const auto& [article, feats] : weights)
        for (const auto& [feat, value] : feats) col_index.emplace(feat, 0);
    int next = 0;
    for (auto& [feat, idx] : col_index) idx = next++;

    DistributionMatrix out;
    out.col_ids.reserve(col_index.size());
    for (const auto& [feat, idx] : col_index) out.col_ids.push_back(feat);
    for (const auto& [article, feats] : weights) {
        double sum = 0.0;
        for (const auto& [feat, value] : feats) sum += value;
        if (sum <= 0.0)
            throw ZeroRowError(path + ": article '" + article + "' has zero total weight");
        if (std::abs(sum - 1.0) > 1e-6) {
            std::ostringstream os;
            os << "renormalized article '" << article << "' (raw sum " << sum << ")";
            detail::log_note(log, os.str());
        }
        out.row_ids.push_back(article);
        std::vector<std::pair<int, double>> row;
        row.reserve(feats.size());
        for (const auto& [feat, value] : feats) row.emplace_back(col_index.at(feat), value / sum);
        out.rows.push_back(std::move(row));
    }
    return out;
}

} // namespace multifuse
