#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "multifuse/errors.hpp"
#include "multifuse/ingest.hpp"
#include "multifuse/model.hpp"
#include "multifuse/rng.hpp"

namespace multifuse {

/// Collapsed-Gibbs LDA settings. alpha < 0 selects the 50/K convention.
struct LdaConfig {
    int k_topics = 10;
    double alpha = -1.0;
    double beta = 0.01;
    int sweeps = 1000;
    int burn_in = 500;
    std::uint64_t seed = 0;

    double resolved_alpha() const { return alpha < 0.0 ? 50.0 / k_topics : alpha; }

    void validate() const {
        if (k_topics < 1) throw ConfigError("k_topics must be >= 1");
        if (!(resolved_alpha() > 0.0)) throw ConfigError("alpha must be > 0");
        if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
        if (burn_in < 0) throw ConfigError("burn_in must be >= 0");
        if (sweeps <= burn_in) throw ConfigError("sweeps must exceed burn_in");
    }
};

/// Zero-padded topic labels "topic_00", ... so emitted distribution files
/// keep their column order under lexicographic re-reading.
inline std::vector<std::string> topic_labels(int k) {
    return default_node_ids(k, "topic_");
}

/// Fits LDA by collapsed Gibbs sampling and returns the per-document topic
/// distribution, estimated as the average over post-burn-in sweeps of
/// (n_dk + alpha) / (n_d + K * alpha). Deterministic for a fixed seed.
inline DistributionMatrix fit_lda(const CountTable& t, const LdaConfig& cfg) {
    cfg.validate();
    const int docs = t.n_rows();
    const int vocab = t.n_cols();
    const int k = cfg.k_topics;
    const double alpha = cfg.resolved_alpha();
    const double beta = cfg.beta;

    // token expansion in row/column order
    std::vector<int> token_doc;
    std::vector<int> token_word;
    for (int d = 0; d < docs; ++d) {
        for (const auto& [word, count] : t.rows[static_cast<std::size_t>(d)]) {
            for (std::int64_t c = 0; c < count; ++c) {
                token_doc.push_back(d);
                token_word.push_back(word);
            }
        }
    }
    const auto tokens = static_cast<std::int64_t>(token_doc.size());
    if (docs == 0 || vocab == 0 || tokens == 0)
        throw EmptyCorpusError("corpus has no documents, terms, or tokens");

    std::vector<std::int64_t> doc_topic(static_cast<std::size_t>(docs) * static_cast<std::size_t>(k), 0);
    std::vector<std::int64_t> topic_word(static_cast<std::size_t>(k) * static_cast<std::size_t>(vocab), 0);
    std::vector<std::int64_t> topic_total(static_cast<std::size_t>(k), 0);
    std::vector<std::int64_t> doc_total(static_cast<std::size_t>(docs), 0);
    std::vector<int> assignment(static_cast<std::size_t>(tokens));

    Rng rng(cfg.seed);
    for (std::int64_t i = 0; i < tokens; ++i) {
        const int z = rng.uniform_int(k);
        assignment[static_cast<std::size_t>(i)] = z;
        const int d = token_doc[static_cast<std::size_t>(i)];
        const int w = token_word[static_cast<std::size_t>(i)];
        ++doc_topic[static_cast<std::size_t>(d) * static_cast<std::size_t>(k) + static_cast<std::size_t>(z)];
        ++topic_word[static_cast<std::size_t>(z) * static_cast<std::size_t>(vocab) + static_cast<std::size_t>(w)];
        ++topic_total[static_cast<std::size_t>(z)];
        ++doc_total[static_cast<std::size_t>(d)];
    }

    std::vector<double> theta_acc(static_cast<std::size_t>(docs) * static_cast<std::size_t>(k), 0.0);
    std::vector<double> weights(static_cast<std::size_t>(k), 0.0);
    const double vocab_beta = vocab * beta;

    for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
        for (std::int64_t i = 0; i < tokens; ++i) {
            const int d = token_doc[static_cast<std::size_t>(i)];
            const int w = token_word[static_cast<std::size_t>(i)];
            const int old_z = assignment[static_cast<std::size_t>(i)];
            auto* dt = &doc_topic[static_cast<std::size_t>(d) * static_cast<std::size_t>(k)];
            --dt[old_z];
            --topic_word[static_cast<std::size_t>(old_z) * static_cast<std::size_t>(vocab) + static_cast<std::size_t>(w)];
            --topic_total[static_cast<std::size_t>(old_z)];

            double total = 0.0;
            for (int z = 0; z < k; ++z) {
                const double wz =
                    (static_cast<double>(dt[z]) + alpha) *
                    (static_cast<double>(topic_word[static_cast<std::size_t>(z) * static_cast<std::size_t>(vocab) +
                                                    static_cast<std::size_t>(w)]) + beta) /
                    (static_cast<double>(topic_total[static_cast<std::size_t>(z)]) + vocab_beta);
                total += wz;
                weights[static_cast<std::size_t>(z)] = total;
            }
            const double u = rng.uniform() * total;
            int new_z = k - 1;
            for (int z = 0; z < k; ++z) {
                if (u < weights[static_cast<std::size_t>(z)]) {
                    new_z = z;
                    break;
                }
            }

            assignment[static_cast<std::size_t>(i)] = new_z;
            ++dt[new_z];
            ++topic_word[static_cast<std::size_t>(new_z) * static_cast<std::size_t>(vocab) + static_cast<std::size_t>(w)];
            ++topic_total[static_cast<std::size_t>(new_z)];
        }
        if (sweep >= cfg.burn_in) {
            for (int d = 0; d < docs; ++d) {
                const double denom = static_cast<double>(doc_total[static_cast<std::size_t>(d)]) + k * alpha;
                for (int z = 0; z < k; ++z)
                    theta_acc[static_cast<std::size_t>(d) * static_cast<std::size_t>(k) + static_cast<std::size_t>(z)] +=
                        (static_cast<double>(doc_topic[static_cast<std::size_t>(d) * static_cast<std::size_t>(k) +
                                                       static_cast<std::size_t>(z)]) + alpha) / denom;
            }
        }
    }

    const double samples = cfg.sweeps - cfg.burn_in;
    DistributionMatrix theta;
    theta.row_ids = t.row_ids;
    theta.col_ids = topic_labels(k);
    theta.rows.resize(static_cast<std::size_t>(docs));
    for (int d = 0; d < docs; ++d) {
        auto& row = theta.rows[static_cast<std::size_t>(d)];
        row.reserve(static_cast<std::size_t>(k));
        for (int z = 0; z < k; ++z)
            row.emplace_back(z, theta_acc[static_cast<std::size_t>(d) * static_cast<std::size_t>(k) +
                                          static_cast<std::size_t>(z)] / samples);
    }
    return theta;
}

} // namespace multifuse
