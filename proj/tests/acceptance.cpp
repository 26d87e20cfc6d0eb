// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances and thresholds are pinned in code.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "multifuse/cli.hpp"
#include "multifuse/multifuse.hpp"

#include "oracles.hpp"

using namespace multifuse;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Criterion {
    std::string name;
    bool pass = true;
    std::ostringstream detail;

    explicit Criterion(std::string n) : name(std::move(n)) {}

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
};

SimilarityMatrix random_similarity(int n, Rng& rng) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) {
            const double v = rng.uniform();
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return {m, default_node_ids(n)};
}

EmbeddedDistances random_embedding(int n, int dim, Rng& rng) {
    Matrix points(n, dim);
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < dim; ++d) points(i, d) = rng.normal();
    EmbeddedDistances e{Matrix(n, n), default_node_ids(n)};
    for (int i = 0; i < n; ++i) {
        e.d(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double dist = (points.row(i) - points.row(j)).norm();
            e.d(i, j) = dist;
            e.d(j, i) = dist;
        }
    }
    return e;
}

std::vector<int> random_labels(int n, int clusters, Rng& rng) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (auto& l : labels) l = rng.uniform_int(clusters);
    return labels;
}

// ---------------------------------------------------------------------------
// 1. formula oracles
// ---------------------------------------------------------------------------
Criterion criterion_formula_oracles() {
    Criterion c("1. formula oracles (>=100 random instances each, 1e-10, <30s)");
    const auto start = Clock::now();
    Rng rng(1001);
    constexpr double tol = 1e-10;

    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + rng.uniform_int(18);

        { // jaccard
            const int features = 4 + rng.uniform_int(30);
            BipartiteIncidence b;
            for (int i = 0; i < n; ++i) b.row_ids.push_back("a" + std::to_string(i));
            for (int f = 0; f < features; ++f) b.col_ids.push_back("r" + std::to_string(f));
            b.rows.resize(static_cast<std::size_t>(n));
            for (auto& row : b.rows) {
                std::set<int> chosen{rng.uniform_int(features)};
                const int extra = rng.uniform_int(features);
                for (int e = 0; e < extra; ++e) chosen.insert(rng.uniform_int(features));
                row.assign(chosen.begin(), chosen.end());
            }
            const auto s = jaccard_layer(b);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    std::set<std::string> ai, aj;
                    for (const int f : b.rows[static_cast<std::size_t>(i)])
                        ai.insert(b.col_ids[static_cast<std::size_t>(f)]);
                    for (const int f : b.rows[static_cast<std::size_t>(j)])
                        aj.insert(b.col_ids[static_cast<std::size_t>(f)]);
                    c.require(std::abs(s.values(i, j) - oracle::jaccard(ai, aj)) <= tol,
                              "jaccard oracle mismatch");
                }
        }

        { // total variation
            const int cols = 3 + rng.uniform_int(15);
            DistributionMatrix d;
            for (int i = 0; i < n; ++i) d.row_ids.push_back("a" + std::to_string(i));
            for (int col = 0; col < cols; ++col) d.col_ids.push_back("f" + std::to_string(col));
            d.rows.resize(static_cast<std::size_t>(n));
            for (auto& row : d.rows) {
                double sum = 0.0;
                for (int col = 0; col < cols; ++col)
                    if (rng.uniform() < 0.6) {
                        const double w = rng.uniform() + 1e-3;
                        row.emplace_back(col, w);
                        sum += w;
                    }
                if (row.empty()) {
                    row.emplace_back(0, 1.0);
                    sum = 1.0;
                }
                for (auto& [col, w] : row) w /= sum;
            }
            const auto s = total_variation_layer(d);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    std::vector<double> pi(static_cast<std::size_t>(cols), 0.0);
                    std::vector<double> pj(static_cast<std::size_t>(cols), 0.0);
                    for (const auto& [col, w] : d.rows[static_cast<std::size_t>(i)])
                        pi[static_cast<std::size_t>(col)] = w;
                    for (const auto& [col, w] : d.rows[static_cast<std::size_t>(j)])
                        pj[static_cast<std::size_t>(col)] = w;
                    c.require(std::abs(s.values(i, j) -
                                       oracle::total_variation_similarity(pi, pj)) <= tol,
                              "total variation oracle mismatch");
                }
        }

        { // modularity
            Matrix a = Matrix::Zero(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (rng.uniform() < 0.6) {
                        const double w = rng.uniform();
                        a(i, j) = w;
                        a(j, i) = w;
                    }
            if (!(a.sum() > 0)) a(0, 1) = a(1, 0) = 1.0;
            const WeightedGraph g{a, default_node_ids(n)};
            const auto labels = random_labels(n, 1 + rng.uniform_int(4), rng);
            const Partition p{labels, g.node_ids};
            c.require(std::abs(modularity(g, p) - oracle::modularity(a, labels)) <= tol,
                      "modularity oracle mismatch");
        }

        { // cramers_v and adjusted_rand
            const auto pl = random_labels(n, 1 + rng.uniform_int(4), rng);
            const auto ql = random_labels(n, 1 + rng.uniform_int(4), rng);
            const Partition p{pl, default_node_ids(n)};
            const Partition q{ql, default_node_ids(n)};
            c.require(std::abs(cramers_v(p, q) - oracle::cramers_v(pl, ql)) <= tol,
                      "cramers_v oracle mismatch");
            c.require(std::abs(adjusted_rand(p, q) - oracle::adjusted_rand(pl, ql)) <= tol,
                      "adjusted_rand oracle mismatch");
        }

        { // dcor and pdcor
            const int m = std::max(6, n);
            const auto a = random_embedding(m, 1 + rng.uniform_int(3), rng);
            const auto b = random_embedding(m, 1 + rng.uniform_int(3), rng);
            const auto z = random_embedding(m, 1 + rng.uniform_int(3), rng);
            c.require(std::abs(distance_correlation(a, b).dcor - oracle::dcor(a.d, b.d)) <= tol,
                      "dcor oracle mismatch");
            c.require(std::abs(partial_distance_correlation(a, b, z).pdcor -
                               oracle::pdcor(a.d, b.d, z.d)) <= tol,
                      "pdcor oracle mismatch");
        }
    }

    const double elapsed = seconds_since(start);
    c.require(elapsed < 30.0, "oracle suite took " + std::to_string(elapsed) + "s (limit 30)");
    c.detail << (c.detail.str().empty() ? "" : "; ") << "elapsed " << elapsed << "s";
    return c;
}

// ---------------------------------------------------------------------------
// 2. exact-value suite
// ---------------------------------------------------------------------------
Criterion criterion_exact_values() {
    Criterion c("2. exact-value suite");

    { // Cramer's V on contingency [[8,2],[2,8]]
        Partition p, q;
        p.node_ids = q.node_ids = default_node_ids(20);
        for (int i = 0; i < 20; ++i) {
            const bool row = i < 10;
            p.labels.push_back(row ? 0 : 1);
            const bool diag = (row && i < 8) || (!row && i >= 12);
            q.labels.push_back(diag == row ? 0 : 1);
        }
        c.require(std::abs(cramers_v(p, q) - 0.6) <= 1e-12, "V([[8,2],[2,8]]) != 0.6");
    }

    { // modularity of two disconnected 10-cliques, correct split
        const int size = 10, n = 20;
        Matrix a = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && (i < size) == (j < size)) a(i, j) = 1.0;
        const WeightedGraph g{a, default_node_ids(n)};
        std::vector<int> split(n, 0);
        for (int i = size; i < n; ++i) split[static_cast<std::size_t>(i)] = 1;
        c.require(modularity(g, Partition{split, g.node_ids}) == 0.5, "clique Q != 0.5");
        c.require(modularity(g, Partition{std::vector<int>(n, 0), g.node_ids}) == 0.0,
                  "one-community Q != 0");
    }

    { // glanzel closed form
        Matrix one(2, 2), zero(2, 2);
        one << 1, 1, 1, 1;
        zero << 0, 0, 0, 0;
        const auto g = glanzel_combination({one, {"a", "b"}}, {zero, {"a", "b"}}, 0.5);
        c.require(std::abs(g.values(0, 1) - std::cos(std::acos(-1.0) / 4)) <= 1e-12,
                  "glanzel(1,0,0.5) != cos(pi/4)");
    }

    { // boyack alpha for T1=3, T2=1
        Matrix a(2, 2), b(2, 2);
        a << 1, 0.5, 0.5, 1;        // sums to 3
        b << 0.25, 0.25, 0.25, 0.25; // sums to 1
        c.require(boyack_alpha({a, {"x", "y"}}, {b, {"x", "y"}}) == 0.25, "alpha != 0.25");
    }

    { // total variation of (0.5,0.5,0) vs (0.25,0.25,0.5)
        DistributionMatrix d;
        d.row_ids = {"a", "b"};
        d.col_ids = {"f0", "f1", "f2"};
        d.rows = {{{0, 0.5}, {1, 0.5}}, {{0, 0.25}, {1, 0.25}, {2, 0.5}}};
        c.require(std::abs(total_variation_layer(d).values(0, 1) - 0.5) <= 1e-12,
                  "TV != 0.5");
    }
    return c;
}

// ---------------------------------------------------------------------------
// 3. SNF structural suite
// ---------------------------------------------------------------------------
Criterion criterion_snf_structure() {
    Criterion c("3. SNF structural suite");
    Rng rng(3003);

    { // identical-layer coupling
        const auto w = random_similarity(30, rng);
        SnfLog log;
        snf(MultiplexBundle{{w, w}, w.node_ids}, SnfConfig{10, 20}, &log);
        for (const double d : log.view_divergence)
            c.require(d < 1e-12, "view divergence " + std::to_string(d));
    }

    { // symmetry and nonnegativity on 50 random bundles
        for (int trial = 0; trial < 50; ++trial) {
            const int n = 8 + rng.uniform_int(25);
            MultiplexBundle bundle;
            bundle.node_ids = default_node_ids(n);
            const int layers = 2 + rng.uniform_int(2);
            for (int v = 0; v < layers; ++v) bundle.layers.push_back(random_similarity(n, rng));
            try {
                snf(bundle, SnfConfig{std::min(6, n - 1), 5});
            } catch (const Error& e) {
                c.require(false, std::string("random bundle failed validation: ") + e.what());
            }
        }
    }

    { // two-block contrast on planted bundles, all of 10 seeds
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            PlantedSpec spec;
            spec.blocks = {30, 30};
            spec.layers = {LayerNoise{0.8, 0.2, 0.1, {}}, LayerNoise{0.8, 0.2, 0.1, {}}};
            spec.seed = seed;
            const auto planted = planted_multiplex(spec);
            const auto fused = snf(planted.bundle, SnfConfig{10, 10});
            double win = 0, between = 0;
            int cw = 0, cb = 0;
            for (int i = 0; i < 60; ++i)
                for (int j = i + 1; j < 60; ++j) {
                    if (planted.truth.labels[static_cast<std::size_t>(i)] ==
                        planted.truth.labels[static_cast<std::size_t>(j)]) {
                        win += fused.values(i, j);
                        ++cw;
                    } else {
                        between += fused.values(i, j);
                        ++cb;
                    }
                }
            c.require(win / cw > between / cb,
                      "two-block contrast failed at seed " + std::to_string(seed));
        }
    }

    { // paper-scale fusion wall time
        PlantedSpec spec;
        spec.blocks = {672, 672};
        spec.layers = {LayerNoise{0.6, 0.2, 0.15, {}}, LayerNoise{0.7, 0.3, 0.15, {}}};
        spec.seed = 7;
        const auto planted = planted_multiplex(spec);
        const auto start = Clock::now();
        snf(planted.bundle, SnfConfig{20, 20});
        const double elapsed = seconds_since(start);
        c.require(elapsed < 60.0,
                  "n=1344 fusion took " + std::to_string(elapsed) + "s (limit 60)");
        c.detail << (c.detail.str().empty() ? "" : "; ") << "n=1344 fusion " << elapsed << "s";
    }
    return c;
}

// ---------------------------------------------------------------------------
// 4. fusion benefit on complementary structure
// ---------------------------------------------------------------------------
Criterion criterion_fusion_benefit() {
    Criterion c("4. fusion benefit (complementary_pair k=4, n=200, sigma=0.05)");
    int fused_wins = 0;
    double mean_fused = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto planted = complementary_pair(200, 4, seed, 0.05);
        const auto ari = [&](const SimilarityMatrix& m) {
            return adjusted_rand(louvain(graph_from_similarity(m), seed), planted.truth);
        };
        const double a1 = ari(planted.bundle.layers[0]);
        const double a2 = ari(planted.bundle.layers[1]);
        const double af = ari(snf(planted.bundle, SnfConfig{20, 20}));
        mean_fused += af;
        if (af >= std::max(a1, a2)) ++fused_wins;
    }
    mean_fused /= 10.0;
    c.require(fused_wins >= 8, "fused >= max(single) in only " + std::to_string(fused_wins) + "/10");
    c.require(mean_fused >= 0.9, "mean fused ARI " + std::to_string(mean_fused) + " < 0.9");
    c.detail << "wins " << fused_wins << "/10, mean fused ARI " << mean_fused;
    return c;
}

// ---------------------------------------------------------------------------
// 5. baseline near-identity vs SNF distinctness
// ---------------------------------------------------------------------------
Criterion criterion_baseline_structure() {
    Criterion c("5. fixed-weight and arccos-cos baselines nearly identical, SNF apart");
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        PlantedSpec spec;
        spec.blocks = {30, 30, 30, 30};
        spec.layers = {LayerNoise{0.5, 0.05, 0.08, {0, 0, 1, 2}, 0.35},
                       LayerNoise{0.9, 0.45, 0.08, {0, 1, 1, 2}, 0.8}};
        spec.seed = seed;
        const auto planted = planted_multiplex(spec);
        const auto& s1 = planted.bundle.layers[0];
        const auto& s2 = planted.bundle.layers[1];
        const double t1 = s1.values.sum();
        const double t2 = s2.values.sum();
        const auto orient = [&](double w) {
            const double lo = std::min(w, 1.0 - w), hi = std::max(w, 1.0 - w);
            return t1 >= t2 ? lo : hi;
        };
        const std::vector<SimilarityMatrix> baselines = {
            convex_combination(s1, s2, orient(0.5)),
            convex_combination(s1, s2, orient(0.333)),
            convex_combination(s1, s2, orient(0.2)),
            glanzel_combination(s1, s2, 0.5)};
        std::vector<EmbeddedDistances> emb;
        for (const auto& m : baselines) emb.push_back(embed_rows(m));
        double min_pair = 1.0;
        for (std::size_t i = 0; i < emb.size(); ++i)
            for (std::size_t j = i + 1; j < emb.size(); ++j)
                min_pair = std::min(min_pair, distance_correlation(emb[i], emb[j]).dcor);
        const auto fused = snf(planted.bundle, SnfConfig{20, 20});
        const double d_snf = distance_correlation(embed_rows(fused), emb[0]).dcor;
        if (min_pair >= 0.95 && d_snf < min_pair) ++ok;
    }
    c.require(ok >= 9, "only " + std::to_string(ok) + "/10 seeds satisfied the structure");
    c.detail << ok << "/10 seeds";
    return c;
}

// ---------------------------------------------------------------------------
// 6. statistics sanity
// ---------------------------------------------------------------------------
Criterion criterion_statistics_sanity() {
    Criterion c("6. statistics sanity");
    Rng rng(6006);

    const auto a = random_embedding(12, 3, rng);
    const auto b = random_embedding(12, 2, rng);
    c.require(std::abs(partial_distance_correlation(a, b, b).pdcor) <= 1e-10,
              "pdcor(a,b;b) != 0");
    c.require(std::abs(distance_correlation(a, a).dcor - 1.0) <= 1e-12, "dcor(a,a) != 1");

    for (int trial = 0; trial < 100; ++trial) {
        const int n = 4 + rng.uniform_int(25);
        const auto pl = random_labels(n, 1 + rng.uniform_int(5), rng);
        const auto ql = random_labels(n, 1 + rng.uniform_int(5), rng);
        const Partition p{pl, default_node_ids(n)};
        const Partition q{ql, default_node_ids(n)};
        const double base = cramers_v(p, q);

        auto relabel = [&](std::vector<int> labels, int stride, int offset) {
            for (auto& l : labels) l = offset + stride * l;
            return labels;
        };
        const Partition pr{relabel(pl, 7, 100), p.node_ids};
        const Partition qr{relabel(ql, -3, 50), q.node_ids};
        c.require(cramers_v(pr, qr) == base, "label-permutation changed Cramer's V");
    }
    return c;
}

// ---------------------------------------------------------------------------
// 7. pipeline determinism
// ---------------------------------------------------------------------------
std::map<std::string, std::uint64_t> hash_tree(const fs::path& root) {
    std::map<std::string, std::uint64_t> hashes;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::uint64_t h = 1469598103934665603ull; // FNV-1a
        char ch = 0;
        while (in.get(ch)) {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ull;
        }
        hashes[fs::relative(entry.path(), root).string()] = h;
    }
    return hashes;
}

Criterion criterion_determinism() {
    Criterion c("7. pipeline determinism (two consecutive runs hash-identical)");
    const fs::path base = fs::temp_directory_path() / "multifuse_acceptance_determinism";
    fs::remove_all(base);
    fs::create_directories(base);
    const fs::path out = base / "out";

    // synthetic inputs
    {
        std::ofstream edges(base / "edges.csv");
        for (int i = 0; i < 30; ++i) {
            const std::string id = "a" + std::to_string(100 + i);
            const int group = i / 10;
            for (int r = 0; r < 4; ++r)
                edges << id << ",r" << (group * 4 + r) << "\n";
            edges << id << ",r" << (12 + i % 3) << "\n";
        }
        std::ofstream counts(base / "counts.csv");
        for (int i = 0; i < 30; ++i) {
            const std::string id = "a" + std::to_string(100 + i);
            const int group = i / 10;
            for (int w = 0; w < 9; ++w)
                counts << id << ",w" << w << "," << (w / 3 == group ? 6 + i % 4 : 1) << "\n";
        }
        std::ofstream config(base / "run.json");
        config << "{\n\"schema_version\": 1,\n\"output_dir\": \"" << out.string()
               << "\",\n\"seed\": 11,\n"
               << "\"layers\": [\n"
               << " {\"name\": \"cited_refs\", \"recipe\": \"citation\", \"path\": \""
               << (base / "edges.csv").string() << "\"},\n"
               << " {\"name\": \"topics\", \"recipe\": \"topics\", \"path\": \""
               << (base / "counts.csv").string()
               << "\", \"min_docs\": 0, \"max_doc_fraction\": 1.0, \"k_topics\": [2, 3],"
               << " \"sweeps\": 60, \"burn_in\": 20}\n"
               << "],\n\"fuse_layers\": [\"cited_refs\", \"topics_2\"],\n"
               << "\"snf\": {\"k_neighbors\": 5, \"iterations\": 8},\n"
               << "\"synth_bench\": {\"n\": 40, \"k\": 4, \"sigma\": 0.02, \"seeds\": 3},\n"
               << "\"export\": {\"matrix\": \"fused_snf\", \"partitions\": [\"cited_refs\", \"topics_2\"]}\n}\n";
    }

    const std::string config = (base / "run.json").string();
    const std::vector<std::vector<std::string>> commands = {
        {"build", "--config", config},   {"fuse", "--config", config},
        {"cluster", "--config", config}, {"compare", "--config", config},
        {"synth-bench", "--config", config}, {"export", "--config", config}};

    const auto run_all = [&]() {
        // the commands print display tables; keep the criterion output clean
        std::ostringstream sink;
        auto* saved = std::cout.rdbuf(sink.rdbuf());
        bool ok = true;
        for (const auto& cmd : commands)
            if (cli::run(cmd) != 0) {
                ok = false;
                break;
            }
        std::cout.rdbuf(saved);
        return ok;
    };

    c.require(run_all(), "first pipeline run failed");
    const auto first = hash_tree(out);
    c.require(run_all(), "second pipeline run failed");
    const auto second = hash_tree(out);

    c.require(first == second, "outputs differ between consecutive runs");
    c.require(!first.empty(), "no outputs were produced");
    c.detail << first.size() << " files hash-identical across reruns";
    fs::remove_all(base);
    return c;
}

// ---------------------------------------------------------------------------
// 8. LDA contract
// ---------------------------------------------------------------------------
Criterion criterion_lda_contract() {
    Criterion c("8. LDA contract");

    { // K=1 degeneracy exact + row stochasticity
        CountTable t;
        t.row_ids = {"d0", "d1"};
        t.col_ids = {"w0", "w1"};
        t.rows = {{{0, 4}, {1, 1}}, {{1, 3}}};
        LdaConfig cfg;
        cfg.k_topics = 1;
        cfg.sweeps = 20;
        cfg.burn_in = 5;
        cfg.seed = 2;
        const auto theta = fit_lda(t, cfg);
        for (const auto& row : theta.rows) c.require(row[0].second == 1.0, "K=1 not exact");
    }

    { // disjoint-vocabulary separation over 10 seeds
        CountTable corpus;
        corpus.row_ids = {"doc0", "doc1"};
        for (int w = 0; w < 40; ++w) corpus.col_ids.push_back("w" + std::to_string(w));
        corpus.rows.resize(2);
        for (int w = 0; w < 20; ++w) corpus.rows[0].emplace_back(w, 1);
        for (int w = 20; w < 40; ++w) corpus.rows[1].emplace_back(w, 1);

        int good = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            LdaConfig cfg;
            cfg.k_topics = 2;
            cfg.alpha = 0.1;
            cfg.beta = 0.1;
            cfg.sweeps = 500;
            cfg.burn_in = 400;
            cfg.seed = seed;
            const auto theta = fit_lda(corpus, cfg);
            double w00 = theta.rows[0][0].second, w01 = theta.rows[0][1].second;
            double w10 = theta.rows[1][0].second, w11 = theta.rows[1][1].second;
            const int arg0 = w00 >= w01 ? 0 : 1;
            const int arg1 = w10 >= w11 ? 0 : 1;
            const double max0 = std::max(w00, w01), max1 = std::max(w10, w11);
            c.require(std::abs(w00 + w01 - 1.0) <= 1e-9, "theta row not stochastic");
            if (arg0 != arg1 && max0 >= 0.9 && max1 >= 0.9) ++good;
        }
        c.require(good >= 9, "separation in only " + std::to_string(good) + "/10 seeds");
        c.detail << "separation " << good << "/10 seeds";
    }

    { // timing: 1000 sweeps on a 1000-document x 5000-term corpus
        const int docs = 1000, vocab = 5000, tokens_per_doc = 60;
        CountTable t;
        t.rows.resize(static_cast<std::size_t>(docs));
        for (int d = 0; d < docs; ++d) t.row_ids.push_back("d" + std::to_string(d));
        for (int w = 0; w < vocab; ++w) t.col_ids.push_back("w" + std::to_string(w));
        for (int d = 0; d < docs; ++d) {
            std::map<int, std::int64_t> counts;
            for (int k = 0; k < tokens_per_doc; ++k) ++counts[(d * tokens_per_doc + k) % vocab];
            for (const auto& [w, count] : counts)
                t.rows[static_cast<std::size_t>(d)].emplace_back(w, count);
        }
        LdaConfig cfg;
        cfg.k_topics = 10;
        cfg.sweeps = 1000;
        cfg.burn_in = 500;
        cfg.seed = 5;
        const auto start = Clock::now();
        const auto theta = fit_lda(t, cfg);
        const double elapsed = seconds_since(start);
        c.require(elapsed < 300.0,
                  "large LDA fit took " + std::to_string(elapsed) + "s (limit 300)");
        for (const auto& row : theta.rows) {
            double sum = 0.0;
            for (const auto& [col, w] : row) sum += w;
            c.require(std::abs(sum - 1.0) <= 1e-9, "large fit row not stochastic");
        }
        c.detail << (c.detail.str().empty() ? "" : "; ") << "large fit " << elapsed << "s";
    }
    return c;
}

} // namespace

int main() {
    std::vector<std::function<Criterion()>> criteria = {
        criterion_formula_oracles, criterion_exact_values,      criterion_snf_structure,
        criterion_fusion_benefit,  criterion_baseline_structure, criterion_statistics_sanity,
        criterion_determinism,     criterion_lda_contract};

    int failures = 0;
    for (auto& run : criteria) {
        const Criterion c = run();
        std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name;
        if (!c.detail.str().empty()) std::cout << "  [" << c.detail.str() << "]";
        std::cout << "\n";
        if (!c.pass) ++failures;
    }
    if (failures > 0) std::cout << failures << " criterion(s) failed\n";
    return failures;
}
