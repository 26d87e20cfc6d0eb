#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "multifuse/assoc.hpp"
#include "multifuse/cluster.hpp"
#include "multifuse/errors.hpp"
#include "multifuse/fusion.hpp"
#include "multifuse/ingest.hpp"
#include "multifuse/io.hpp"
#include "multifuse/model.hpp"
#include "multifuse/similarity.hpp"
#include "multifuse/synth.hpp"
#include "multifuse/topics.hpp"

namespace multifuse::cli {

namespace fs = std::filesystem;

inline constexpr int kSchemaVersion = 1;

/// One similarity layer to build. `recipe` selects the construction:
/// citation (Jaccard over cited references), words (total variation over
/// word frequencies), topics (total variation over LDA distributions, one
/// matrix per K), precomputed (a ready-made input; `format` chooses between
/// a matrix CSV with .ids sidecar and an article/feature/weight distribution
/// table that becomes a total-variation layer).
struct LayerSpec {
    std::string name;
    std::string recipe;
    std::string path;
    std::string format = "matrix"; // precomputed only: matrix | distributions
    int min_docs = 3;
    double max_doc_fraction = 0.95;
    std::vector<int> k_topics = {20};
    double alpha = -1.0;
    double beta = 0.01;
    int sweeps = 1000;
    int burn_in = 500;
};

struct BaselineConfig {
    bool convex_auto = true;
    std::vector<double> convex_weights = {0.5, 0.333, 0.2};
    bool glanzel = true;
    double glanzel_w = 0.5;
};

struct SynthBenchConfig {
    int n = 200;
    int k = 4;
    double sigma = 0.05;
    int seeds = 10;
    std::uint64_t first_seed = 0;
    double mu_in = 0.9;
    double mu_out = 0.1;
};

struct ExportConfig {
    std::string matrix = "fused_snf";
    std::vector<std::string> partitions;
    double threshold = 0.0;
};

struct RunConfig {
    fs::path output_dir = "out";
    std::uint64_t seed = 42;
    bool tsv = false;
    bool drop_empty = false;
    std::vector<LayerSpec> layers;
    SnfConfig snf;
    BaselineConfig baselines;
    std::vector<std::string> fuse_layers; // empty: all built layers
    double resolution = 1.0;
    std::vector<std::string> cluster_targets; // empty: every built matrix
    SynthBenchConfig synth;
    ExportConfig exports;

    IngestOptions ingest_options() const {
        return IngestOptions{tsv ? '\t' : ',', drop_empty};
    }
};

namespace detail {

using multifuse::detail::open_out;
using nlohmann::json;

template <typename T>
void read_key(const json& j, const char* key, T& out) {
    if (const auto it = j.find(key); it != j.end()) out = it->get<T>();
}

inline void parse_layer(const json& j, LayerSpec& layer) {
    read_key(j, "name", layer.name);
    read_key(j, "recipe", layer.recipe);
    read_key(j, "path", layer.path);
    read_key(j, "min_docs", layer.min_docs);
    read_key(j, "max_doc_fraction", layer.max_doc_fraction);
    if (const auto it = j.find("k_topics"); it != j.end()) {
        layer.k_topics.clear();
        if (it->is_array())
            layer.k_topics = it->get<std::vector<int>>();
        else
            layer.k_topics.push_back(it->get<int>());
    }
    read_key(j, "alpha", layer.alpha);
    read_key(j, "beta", layer.beta);
    read_key(j, "sweeps", layer.sweeps);
    read_key(j, "burn_in", layer.burn_in);
    read_key(j, "format", layer.format);
    if (layer.name.empty()) throw ConfigError("layer entry without a name");
    static const std::vector<std::string> recipes = {"citation", "words", "topics", "precomputed"};
    if (std::find(recipes.begin(), recipes.end(), layer.recipe) == recipes.end())
        throw ConfigError("layer '" + layer.name + "' has unknown recipe '" + layer.recipe + "'");
    if (layer.format != "matrix" && layer.format != "distributions")
        throw ConfigError("layer '" + layer.name + "' has unknown format '" + layer.format + "'");
    if (layer.path.empty()) throw ConfigError("layer '" + layer.name + "' needs a path");
}

} // namespace detail

/// Loads the JSON run configuration. Unknown keys are ignored; the
/// schema_version field is mandatory and pinned.
inline RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    detail::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
    if (!j.contains("schema_version"))
        throw ConfigError("config '" + path.string() + "' lacks schema_version");
    if (j["schema_version"].get<int>() != kSchemaVersion)
        throw ConfigError("config schema_version " + j["schema_version"].dump() +
                          " unsupported, expected " + std::to_string(kSchemaVersion));

    RunConfig cfg;
    std::string out_dir;
    detail::read_key(j, "output_dir", out_dir);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    detail::read_key(j, "seed", cfg.seed);
    detail::read_key(j, "tsv", cfg.tsv);
    detail::read_key(j, "drop_empty", cfg.drop_empty);
    if (const auto it = j.find("layers"); it != j.end()) {
        for (const auto& entry : *it) {
            LayerSpec layer;
            detail::parse_layer(entry, layer);
            cfg.layers.push_back(std::move(layer));
        }
    }
    if (const auto it = j.find("snf"); it != j.end()) {
        detail::read_key(*it, "k_neighbors", cfg.snf.k_neighbors);
        detail::read_key(*it, "iterations", cfg.snf.iterations);
    }
    if (const auto it = j.find("baselines"); it != j.end()) {
        detail::read_key(*it, "convex_auto", cfg.baselines.convex_auto);
        detail::read_key(*it, "convex_weights", cfg.baselines.convex_weights);
        detail::read_key(*it, "glanzel", cfg.baselines.glanzel);
        detail::read_key(*it, "glanzel_w", cfg.baselines.glanzel_w);
    }
    detail::read_key(j, "fuse_layers", cfg.fuse_layers);
    if (const auto it = j.find("cluster"); it != j.end()) {
        detail::read_key(*it, "resolution", cfg.resolution);
        detail::read_key(*it, "targets", cfg.cluster_targets);
    }
    if (const auto it = j.find("synth_bench"); it != j.end()) {
        detail::read_key(*it, "n", cfg.synth.n);
        detail::read_key(*it, "k", cfg.synth.k);
        detail::read_key(*it, "sigma", cfg.synth.sigma);
        detail::read_key(*it, "seeds", cfg.synth.seeds);
        detail::read_key(*it, "first_seed", cfg.synth.first_seed);
        detail::read_key(*it, "mu_in", cfg.synth.mu_in);
        detail::read_key(*it, "mu_out", cfg.synth.mu_out);
    }
    if (const auto it = j.find("export"); it != j.end()) {
        detail::read_key(*it, "matrix", cfg.exports.matrix);
        detail::read_key(*it, "partitions", cfg.exports.partitions);
        detail::read_key(*it, "threshold", cfg.exports.threshold);
    }
    return cfg;
}

namespace detail {

/// All command outputs are written under a staging directory first. On
/// success the files move into the output directory; on failure the staging
/// directory moves to a fresh quarantine subdirectory, so partial outputs
/// never overwrite previous results.
class Stage {
public:
    Stage(fs::path output_dir, std::string command)
        : output_dir_(std::move(output_dir)),
          command_(std::move(command)),
          root_(output_dir_ / (".staging_" + command_)) {
        fs::remove_all(root_);
        fs::create_directories(root_);
    }

    fs::path path(const std::string& relative) {
        const fs::path p = root_ / relative;
        fs::create_directories(p.parent_path());
        return p;
    }

    void commit() {
        std::vector<fs::path> files;
        for (const auto& entry : fs::recursive_directory_iterator(root_))
            if (entry.is_regular_file()) files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            const fs::path relative = fs::relative(file, root_);
            const fs::path target = output_dir_ / relative;
            fs::create_directories(target.parent_path());
            fs::rename(file, target);
        }
        fs::remove_all(root_);
        committed_ = true;
    }

    ~Stage() {
        if (committed_) return;
        // quarantine whatever was written before the failure
        try {
            fs::path base = output_dir_ / "quarantine" / command_;
            fs::create_directories(base.parent_path());
            fs::path target = base;
            for (int suffix = 2; fs::exists(target); ++suffix)
                target = base.string() + "-" + std::to_string(suffix);
            fs::rename(root_, target);
        } catch (...) {
            // quarantining is best effort; the original error already propagates
        }
    }

private:
    fs::path output_dir_;
    std::string command_;
    fs::path root_;
    bool committed_ = false;
};

/// Deterministic log sink: plain lines, no timestamps, so reruns are
/// byte-identical.
class RunLog {
public:
    explicit RunLog(fs::path path) : path_(std::move(path)) {}

    void line(const std::string& text) { lines_.push_back(text); }

    void flush() {
        auto out = open_out(path_);
        for (const auto& l : lines_) out << l << '\n';
    }

private:
    fs::path path_;
    std::vector<std::string> lines_;
};

inline std::string layer_file(const std::string& name) { return "layers/" + name + ".csv"; }
inline std::string fused_file(const std::string& name) { return "fused/" + name + ".csv"; }

inline std::string weight_tag(double w) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", w);
    return buf;
}

/// Sorted stems of every matrix CSV below dir (non-recursive).
inline std::vector<std::string> matrix_stems(const fs::path& dir) {
    std::vector<std::string> stems;
    if (!fs::is_directory(dir)) return stems;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto& p = entry.path();
        if (p.extension() != ".csv") continue;
        if (p.stem().string().ends_with("_theta")) continue;
        stems.push_back(p.stem().string());
    }
    std::sort(stems.begin(), stems.end());
    return stems;
}

/// Matrices available to cluster/compare/export: layer outputs first, fused
/// outputs second, each sorted by name.
struct MatrixInventory {
    std::vector<std::pair<std::string, fs::path>> entries;

    static MatrixInventory scan(const fs::path& output_dir) {
        MatrixInventory inv;
        for (const auto& stem : matrix_stems(output_dir / "layers"))
            inv.entries.emplace_back(stem, output_dir / "layers" / (stem + ".csv"));
        for (const auto& stem : matrix_stems(output_dir / "fused"))
            inv.entries.emplace_back(stem, output_dir / "fused" / (stem + ".csv"));
        return inv;
    }

    const fs::path* find(const std::string& name) const {
        for (const auto& [stem, path] : entries)
            if (stem == name) return &path;
        return nullptr;
    }
};

/// Resolves the layer names a fuse run operates on: the explicit list, or
/// every matrix in layers/.
inline std::vector<std::string> resolve_fuse_layers(const RunConfig& cfg) {
    if (!cfg.fuse_layers.empty()) return cfg.fuse_layers;
    return matrix_stems(cfg.output_dir / "layers");
}

inline SimilarityMatrix load_matrix(const fs::path& path) {
    return validate_similarity(read_matrix_csv(path));
}

} // namespace detail

/// `build`: construct every configured similarity layer and write it under
/// layers/, plus a build log with sizes, densities, and ingest notes.
inline void cmd_build(const RunConfig& cfg) {
    if (cfg.layers.empty()) throw ConfigError("no layers configured");
    detail::Stage stage(cfg.output_dir, "build");
    detail::RunLog log(stage.path("logs/build.log"));
    const IngestOptions opts = cfg.ingest_options();

    const auto report_matrix = [&](const std::string& name, const SimilarityMatrix& m) {
        const int n = m.n();
        std::int64_t positive = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (m.values(i, j) > 0.0) ++positive;
        const double pairs = static_cast<double>(n) * (n - 1) / 2.0;
        log.line("matrix " + name + ": n=" + std::to_string(n) +
                 " off_diagonal_density=" + format_full(pairs > 0 ? positive / pairs : 0.0));
        write_matrix_csv(stage.path(detail::layer_file(name)), m);
    };

    for (const auto& layer : cfg.layers) {
        std::vector<std::string> notes;
        if (layer.recipe == "citation") {
            const auto incidence = read_citation_edges(layer.path, opts, &notes);
            log.line("layer " + layer.name + ": citation source '" + layer.path + "', " +
                     std::to_string(incidence.n_rows()) + " articles x " +
                     std::to_string(incidence.n_cols()) + " references");
            report_matrix(layer.name, jaccard_layer(incidence));
        } else if (layer.recipe == "words" || layer.recipe == "topics") {
            const auto raw = read_count_table(layer.path, opts);
            const auto filtered =
                filter_vocabulary(raw, layer.min_docs, layer.max_doc_fraction, &notes);
            log.line("layer " + layer.name + ": counts source '" + layer.path + "', vocabulary " +
                     std::to_string(raw.n_cols()) + " -> " + std::to_string(filtered.n_cols()) +
                     " terms, " + std::to_string(filtered.n_rows()) + " articles");
            if (layer.recipe == "words") {
                report_matrix(layer.name, total_variation_layer(relative_frequencies(filtered)));
            } else {
                for (const int k : layer.k_topics) {
                    LdaConfig lda{k,           layer.alpha,   layer.beta,
                                  layer.sweeps, layer.burn_in, cfg.seed + static_cast<std::uint64_t>(k)};
                    const auto theta = fit_lda(filtered, lda);
                    const std::string name = layer.name + "_" + std::to_string(k);
                    log.line("layer " + name + ": lda k=" + std::to_string(k) +
                             " alpha=" + format_full(lda.resolved_alpha()) +
                             " beta=" + format_full(lda.beta) +
                             " sweeps=" + std::to_string(lda.sweeps) +
                             " burn_in=" + std::to_string(lda.burn_in) +
                             " seed=" + std::to_string(lda.seed));
                    write_distribution_csv(stage.path("layers/" + name + "_theta.csv"), theta);
                    report_matrix(name, total_variation_layer(theta));
                }
            }
        } else if (layer.recipe == "precomputed") {
            if (layer.format == "distributions") {
                const auto theta = read_distribution_table(layer.path, opts, &notes);
                log.line("layer " + layer.name + ": precomputed distributions '" + layer.path +
                         "', " + std::to_string(theta.n_rows()) + " articles x " +
                         std::to_string(theta.n_cols()) + " features");
                report_matrix(layer.name, total_variation_layer(theta));
            } else {
                log.line("layer " + layer.name + ": precomputed matrix '" + layer.path + "'");
                report_matrix(layer.name, detail::load_matrix(layer.path));
            }
        }
        for (const auto& note : notes) log.line("note " + layer.name + ": " + note);
    }

    log.flush();
    stage.commit();
}

/// `fuse`: SNF over the configured layers plus the enabled hybrid baselines
/// (pairwise only). The log records isolated nodes, per-iteration deltas,
/// totals T1/T2, and every applied combination weight.
inline void cmd_fuse(const RunConfig& cfg) {
    const auto names = detail::resolve_fuse_layers(cfg);
    if (names.size() < 2)
        throw ConfigError("fuse needs at least 2 built layers, found " +
                          std::to_string(names.size()));
    detail::Stage stage(cfg.output_dir, "fuse");
    detail::RunLog log(stage.path("logs/fuse.log"));

    MultiplexBundle bundle;
    for (const auto& name : names) {
        const fs::path path = cfg.output_dir / detail::layer_file(name);
        if (!fs::exists(path))
            throw ConfigError("fuse layer '" + name + "' not built ('" + path.string() +
                              "' missing); run build first");
        bundle.layers.push_back(detail::load_matrix(path));
    }
    bundle.node_ids = bundle.layers.front().node_ids;
    validate_bundle(bundle);

    {
        std::string joined;
        for (const auto& name : names) joined += (joined.empty() ? "" : ", ") + name;
        log.line("fusing layers: " + joined);
        log.line("snf k_neighbors=" + std::to_string(cfg.snf.k_neighbors) +
                 " iterations=" + std::to_string(cfg.snf.iterations));
    }

    SnfLog snf_log;
    const auto fused = snf(bundle, cfg.snf, &snf_log);
    for (const auto& [layer, node] : snf_log.isolated)
        log.line("isolated node in layer " + names[static_cast<std::size_t>(layer)] + ": " +
                 bundle.node_ids[static_cast<std::size_t>(node)]);
    for (std::size_t t = 0; t < snf_log.iteration_deltas.size(); ++t)
        log.line("iteration " + std::to_string(t + 1) +
                 " delta=" + format_full(snf_log.iteration_deltas[t]));
    write_matrix_csv(stage.path(detail::fused_file("fused_snf")), fused);

    if (names.size() == 2) {
        const auto& s1 = bundle.layers[0];
        const auto& s2 = bundle.layers[1];
        const double t1 = s1.values.sum();
        const double t2 = s2.values.sum();
        log.line("totals " + names[0] + " T1=" + format_full(t1) + ", " + names[1] +
                 " T2=" + format_full(t2));
        if (cfg.baselines.convex_auto) {
            const double alpha = boyack_alpha(s1, s2);
            log.line("baseline convex_auto: alpha=" + format_full(alpha) + " (weight of " +
                     names[0] + ")");
            write_matrix_csv(stage.path(detail::fused_file("convex_auto")),
                             convex_combination(s1, s2, alpha));
        }
        for (const double w : cfg.baselines.convex_weights) {
            // the matrix with the larger total receives the smaller weight
            const double lighter = std::min(w, 1.0 - w);
            const double heavier = std::max(w, 1.0 - w);
            const double alpha = t1 >= t2 ? lighter : heavier;
            const std::string name = "convex_" + detail::weight_tag(w);
            log.line("baseline " + name + ": alpha=" + format_full(alpha) + " (weight of " +
                     names[0] + ")");
            write_matrix_csv(stage.path(detail::fused_file(name)),
                             convex_combination(s1, s2, alpha));
        }
        if (cfg.baselines.glanzel) {
            const std::string name = "glanzel_" + detail::weight_tag(cfg.baselines.glanzel_w);
            log.line("baseline " + name + ": w=" + format_full(cfg.baselines.glanzel_w));
            write_matrix_csv(stage.path(detail::fused_file(name)),
                             glanzel_combination(s1, s2, cfg.baselines.glanzel_w));
        }
    } else {
        log.line("baselines skipped: defined for exactly 2 layers, got " +
                 std::to_string(names.size()));
    }

    log.flush();
    stage.commit();
}

/// `cluster`: Louvain partition per target matrix plus a summary table
/// (matrix, cluster count, modularity). Per-phase modularity goes to the log.
inline void cmd_cluster(const RunConfig& cfg) {
    const auto inventory = detail::MatrixInventory::scan(cfg.output_dir);
    std::vector<std::pair<std::string, fs::path>> targets;
    if (cfg.cluster_targets.empty()) {
        targets = inventory.entries;
    } else {
        for (const auto& name : cfg.cluster_targets) {
            const fs::path* path = inventory.find(name);
            if (!path) throw ConfigError("cluster target '" + name + "' not found");
            targets.emplace_back(name, *path);
        }
    }
    if (targets.empty()) throw ConfigError("no matrices to cluster; run build/fuse first");

    detail::Stage stage(cfg.output_dir, "cluster");
    detail::RunLog log(stage.path("logs/cluster.log"));
    log.line("note: similarity diagonals are stripped before clustering");
    std::ostringstream summary;
    summary << "matrix,clusters,modularity\n";
    std::cout << "matrix  clusters  modularity\n";

    std::string first_error;
    for (const auto& [name, path] : targets) {
        try {
            const auto matrix = detail::load_matrix(path);
            const auto graph = graph_from_similarity(matrix);
            LouvainLog louvain_log;
            const auto partition = louvain(graph, cfg.seed, cfg.resolution, &louvain_log);
            const double q = modularity(graph, partition);
            write_partition_csv(stage.path("partitions/" + name + ".csv"), partition);
            summary << name << ',' << partition.cluster_count() << ',' << format_full(q) << '\n';
            std::cout << name << "  " << partition.cluster_count() << "  " << format_display(q)
                      << '\n';
            std::string phases;
            for (const double pq : louvain_log.phase_modularity)
                phases += (phases.empty() ? "" : " ") + format_full(pq);
            log.line("matrix " + name + ": seed=" + std::to_string(cfg.seed) +
                     " resolution=" + format_full(cfg.resolution) + " phase_modularity=" + phases);
        } catch (const Error& e) {
            // keep an error row in the summary; the command still fails
            summary << name << ",error," << e.what() << '\n';
            log.line("matrix " + name + ": error: " + e.what());
            if (first_error.empty()) first_error = "matrix '" + name + "': " + e.what();
        }
    }

    {
        auto out = detail::open_out(stage.path("reports/cluster_summary.csv"));
        out << summary.str();
    }
    log.flush();
    if (!first_error.empty()) throw Error(first_error);
    stage.commit();
}

/// `compare`: distance-correlation table over all matrices, partial distance
/// correlation of each fused matrix against the two fused input layers (both
/// conditioning directions), and Cramer's V over all partition pairs.
inline void cmd_compare(const RunConfig& cfg) {
    const auto inventory = detail::MatrixInventory::scan(cfg.output_dir);
    if (inventory.entries.empty())
        throw ConfigError("no matrices to compare; run build/fuse first");

    detail::Stage stage(cfg.output_dir, "compare");
    detail::RunLog log(stage.path("logs/compare.log"));
    const std::string convention =
        "# convention: nodes are embedded as similarity-matrix rows before distance statistics";

    std::vector<std::string> names;
    std::vector<EmbeddedDistances> embeddings;
    for (const auto& [name, path] : inventory.entries) {
        names.push_back(name);
        embeddings.push_back(embed_rows(detail::load_matrix(path)));
    }

    {
        auto out = detail::open_out(stage.path("reports/dcor.csv"));
        out << convention << '\n' << "a,b,dcor,dcor_sq\n";
        std::cout << "dcor (3 decimals):\n";
        for (std::size_t i = 0; i < embeddings.size(); ++i) {
            for (std::size_t j = i; j < embeddings.size(); ++j) {
                const auto r = distance_correlation(embeddings[i], embeddings[j]);
                out << names[i] << ',' << names[j] << ',' << format_full(r.dcor) << ','
                    << format_full(r.dcor_sq) << '\n';
                std::cout << "  " << names[i] << " ~ " << names[j] << ": "
                          << format_display(r.dcor) << '\n';
            }
        }
    }

    const auto fuse_names = detail::resolve_fuse_layers(cfg);
    const auto fused_stems = detail::matrix_stems(cfg.output_dir / "fused");
    if (fuse_names.size() == 2 && !fused_stems.empty()) {
        const auto index_of = [&](const std::string& name) -> std::optional<std::size_t> {
            for (std::size_t i = 0; i < names.size(); ++i)
                if (names[i] == name) return i;
            return std::nullopt;
        };
        const auto a = index_of(fuse_names[0]);
        const auto b = index_of(fuse_names[1]);
        if (!a || !b) {
            log.line("pdcor skipped: fused input layers not among built matrices");
        } else {
            auto out = detail::open_out(stage.path("reports/pdcor.csv"));
            out << convention << '\n' << "fused,target,conditioned_on,pdcor,pdcor_sqrt\n";
            for (const auto& stem : fused_stems) {
                const auto f = index_of(stem);
                if (!f) continue;
                const auto row = [&](std::size_t target, std::size_t given) {
                    const auto r = partial_distance_correlation(embeddings[*f],
                                                                embeddings[target],
                                                                embeddings[given]);
                    out << stem << ',' << names[target] << ',' << names[given] << ','
                        << format_full(r.pdcor) << ',' << format_full(r.pdcor_root) << '\n';
                };
                row(*a, *b);
                row(*b, *a);
            }
        }
    } else {
        log.line("pdcor skipped: needs exactly 2 fused input layers");
    }

    const auto partition_stems = detail::matrix_stems(cfg.output_dir / "partitions");
    if (partition_stems.size() >= 2) {
        std::vector<Partition> partitions;
        for (const auto& stem : partition_stems)
            partitions.push_back(
                read_partition_csv(cfg.output_dir / "partitions" / (stem + ".csv")));
        auto out = detail::open_out(stage.path("reports/cramers_v.csv"));
        out << "a,b,cramers_v\n";
        for (std::size_t i = 0; i < partitions.size(); ++i)
            for (std::size_t j = i; j < partitions.size(); ++j)
                out << partition_stems[i] << ',' << partition_stems[j] << ','
                    << format_full(cramers_v(partitions[i], partitions[j])) << '\n';
    } else {
        log.line("cramers_v skipped: fewer than 2 partitions present");
    }

    log.line(convention.substr(2));
    log.flush();
    stage.commit();
}

/// `synth-bench`: per-seed adjusted Rand of every method (single layers, SNF,
/// enabled baselines) against planted truth on complementary-pair bundles,
/// plus a mean/wins summary.
inline void cmd_synth_bench(const RunConfig& cfg) {
    if (cfg.synth.seeds < 1) throw SpecError("synth_bench needs seeds >= 1");
    detail::Stage stage(cfg.output_dir, "synth-bench");
    detail::RunLog log(stage.path("logs/synth-bench.log"));
    log.line("complementary_pair n=" + std::to_string(cfg.synth.n) +
             " k=" + std::to_string(cfg.synth.k) + " sigma=" + format_full(cfg.synth.sigma) +
             " mu_in=" + format_full(cfg.synth.mu_in) + " mu_out=" + format_full(cfg.synth.mu_out) +
             " seeds=" + std::to_string(cfg.synth.seeds) + " first_seed=" +
             std::to_string(cfg.synth.first_seed));

    std::vector<std::string> methods = {"layer1", "layer2", "snf"};
    if (cfg.baselines.convex_auto) methods.push_back("convex_auto");
    for (const double w : cfg.baselines.convex_weights)
        methods.push_back("convex_" + detail::weight_tag(w));
    if (cfg.baselines.glanzel)
        methods.push_back("glanzel_" + detail::weight_tag(cfg.baselines.glanzel_w));

    std::map<std::string, std::vector<double>> scores;
    const auto cluster_ari = [&](const SimilarityMatrix& m, const Partition& truth,
                                 std::uint64_t seed) {
        const auto partition = louvain(graph_from_similarity(m), seed, cfg.resolution);
        return adjusted_rand(partition, truth);
    };

    for (int s = 0; s < cfg.synth.seeds; ++s) {
        const std::uint64_t seed = cfg.synth.first_seed + static_cast<std::uint64_t>(s);
        const auto planted = complementary_pair(cfg.synth.n, cfg.synth.k, seed, cfg.synth.sigma,
                                                cfg.synth.mu_in, cfg.synth.mu_out);
        if (s == 0) {
            // first seed's bundle and ground truth in the standard formats,
            // for inspection and external plotting
            for (std::size_t v = 0; v < planted.bundle.layers.size(); ++v)
                write_matrix_csv(stage.path("synth/layer" + std::to_string(v + 1) + ".csv"),
                                 planted.bundle.layers[v]);
            write_partition_csv(stage.path("synth/truth.csv"), planted.truth);
        }
        const auto& s1 = planted.bundle.layers[0];
        const auto& s2 = planted.bundle.layers[1];
        SnfConfig snf_cfg = cfg.snf;
        snf_cfg.k_neighbors = std::min(snf_cfg.k_neighbors, planted.bundle.n() - 1);

        scores["layer1"].push_back(cluster_ari(s1, planted.truth, seed));
        scores["layer2"].push_back(cluster_ari(s2, planted.truth, seed));
        scores["snf"].push_back(cluster_ari(snf(planted.bundle, snf_cfg), planted.truth, seed));
        if (cfg.baselines.convex_auto)
            scores["convex_auto"].push_back(cluster_ari(
                convex_combination(s1, s2, boyack_alpha(s1, s2)), planted.truth, seed));
        for (const double w : cfg.baselines.convex_weights) {
            const double t1 = s1.values.sum();
            const double t2 = s2.values.sum();
            const double alpha = t1 >= t2 ? std::min(w, 1.0 - w) : std::max(w, 1.0 - w);
            scores["convex_" + detail::weight_tag(w)].push_back(
                cluster_ari(convex_combination(s1, s2, alpha), planted.truth, seed));
        }
        if (cfg.baselines.glanzel)
            scores["glanzel_" + detail::weight_tag(cfg.baselines.glanzel_w)].push_back(
                cluster_ari(glanzel_combination(s1, s2, cfg.baselines.glanzel_w), planted.truth,
                            seed));
    }

    {
        auto out = detail::open_out(stage.path("reports/synth_bench.csv"));
        out << "seed,method,ari\n";
        for (int s = 0; s < cfg.synth.seeds; ++s)
            for (const auto& method : methods)
                out << (cfg.synth.first_seed + static_cast<std::uint64_t>(s)) << ',' << method
                    << ',' << format_full(scores[method][static_cast<std::size_t>(s)]) << '\n';
    }
    {
        auto out = detail::open_out(stage.path("reports/synth_bench_summary.csv"));
        out << "method,mean_ari,wins\n";
        std::cout << "method  mean_ari  wins\n";
        for (const auto& method : methods) {
            double mean = 0.0;
            int wins = 0;
            for (int s = 0; s < cfg.synth.seeds; ++s) {
                const double ari = scores[method][static_cast<std::size_t>(s)];
                mean += ari;
                double best = ari;
                for (const auto& other : methods)
                    best = std::max(best, scores[other][static_cast<std::size_t>(s)]);
                if (ari == best) ++wins;
            }
            mean /= cfg.synth.seeds;
            out << method << ',' << format_full(mean) << ',' << wins << '\n';
            std::cout << method << "  " << format_display(mean) << "  " << wins << '\n';
        }
    }

    log.flush();
    stage.commit();
}

/// `export`: weighted edge list of a matrix with its partition's cluster
/// attribute, and a long-format cross-tabulation of two partitions.
inline void cmd_export(const RunConfig& cfg) {
    detail::Stage stage(cfg.output_dir, "export");
    detail::RunLog log(stage.path("logs/export.log"));

    const auto inventory = detail::MatrixInventory::scan(cfg.output_dir);
    const fs::path* matrix_path = inventory.find(cfg.exports.matrix);
    if (!matrix_path)
        throw ConfigError("export matrix '" + cfg.exports.matrix + "' not found");
    const fs::path partition_path =
        cfg.output_dir / "partitions" / (cfg.exports.matrix + ".csv");
    if (!fs::exists(partition_path))
        throw ConfigError("partition for '" + cfg.exports.matrix + "' not found; run cluster");

    const auto matrix = detail::load_matrix(*matrix_path);
    const auto partition = read_partition_csv(partition_path);
    const auto dropped =
        write_edge_list(stage.path("exports/edges_" + cfg.exports.matrix + ".tsv"), matrix,
                        partition, cfg.exports.threshold);
    log.line("edge list " + cfg.exports.matrix + ": threshold=" +
             format_full(cfg.exports.threshold) + " dropped=" + std::to_string(dropped));

    if (cfg.exports.partitions.size() >= 2) {
        const auto& pa = cfg.exports.partitions[0];
        const auto& pb = cfg.exports.partitions[1];
        const auto load = [&](const std::string& name) {
            const fs::path path = cfg.output_dir / "partitions" / (name + ".csv");
            if (!fs::exists(path))
                throw ConfigError("export partition '" + name + "' not found");
            return read_partition_csv(path);
        };
        write_crosstab(stage.path("exports/crosstab_" + pa + "_vs_" + pb + ".csv"), load(pa),
                       load(pb));
        log.line("crosstab: " + pa + " vs " + pb);
    } else {
        log.line("crosstab skipped: export.partitions lists fewer than 2 names");
    }

    log.flush();
    stage.commit();
}

/// Full command-line surface. Parses arguments, loads the config, applies
/// flag overrides, dispatches the subcommand, and maps every library error to
/// a nonzero exit status.
inline int run(const std::vector<std::string>& args) {
    CLI::App app{"multilayer article-similarity fusion pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    int k_neighbors = 0;
    int iterations = 0;
    double resolution = 0.0;
    double threshold = 0.0;
    bool tsv = false;
    bool drop_empty = false;
    SynthBenchConfig synth_flags;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "JSON run configuration");
        cmd->add_option("-o,--output-dir", output_dir, "output directory (overrides config)");
        cmd->add_option("--seed", seed, "global seed (overrides config)");
        cmd->add_option("--k-neighbors", k_neighbors, "SNF neighborhood size");
        cmd->add_option("--iterations", iterations, "SNF iteration count");
        cmd->add_option("--resolution", resolution, "Louvain resolution");
        cmd->add_flag("--tsv", tsv, "tab-separated inputs");
        cmd->add_flag("--drop-empty", drop_empty, "drop articles without cited references");
        return cmd;
    };

    auto* build = add_common(app.add_subcommand("build", "construct similarity layers"));
    auto* fuse = add_common(app.add_subcommand("fuse", "fuse layers (SNF + baselines)"));
    auto* cluster = add_common(app.add_subcommand("cluster", "Louvain partitions per matrix"));
    auto* compare = add_common(app.add_subcommand("compare", "association statistics"));
    auto* synth_bench =
        add_common(app.add_subcommand("synth-bench", "planted-partition recovery benchmark"));
    auto* exporter = add_common(app.add_subcommand("export", "graph exchange files"));

    synth_bench->add_option("--synth-n", synth_flags.n, "nodes");
    synth_bench->add_option("--synth-k", synth_flags.k, "planted blocks (even, >= 4)");
    synth_bench->add_option("--synth-sigma", synth_flags.sigma, "similarity jitter");
    synth_bench->add_option("--synth-seeds", synth_flags.seeds, "number of seeds");
    synth_bench->add_option("--synth-first-seed", synth_flags.first_seed, "first seed");
    exporter->add_option("--threshold", threshold, "drop edges below this weight");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        const auto passed = [&](CLI::App* cmd, const std::string& flag) {
            return cmd->count(flag) > 0;
        };
        CLI::App* active = app.get_subcommands().front();
        if (passed(active, "--output-dir")) cfg.output_dir = output_dir;
        if (passed(active, "--seed")) cfg.seed = seed;
        if (passed(active, "--k-neighbors")) cfg.snf.k_neighbors = k_neighbors;
        if (passed(active, "--iterations")) cfg.snf.iterations = iterations;
        if (passed(active, "--resolution")) cfg.resolution = resolution;
        if (passed(active, "--tsv")) cfg.tsv = tsv;
        if (passed(active, "--drop-empty")) cfg.drop_empty = drop_empty;

        if (active == synth_bench) {
            if (passed(active, "--synth-n")) cfg.synth.n = synth_flags.n;
            if (passed(active, "--synth-k")) cfg.synth.k = synth_flags.k;
            if (passed(active, "--synth-sigma")) cfg.synth.sigma = synth_flags.sigma;
            if (passed(active, "--synth-seeds")) cfg.synth.seeds = synth_flags.seeds;
            if (passed(active, "--synth-first-seed")) cfg.synth.first_seed = synth_flags.first_seed;
        }
        if (active == exporter && passed(active, "--threshold"))
            cfg.exports.threshold = threshold;

        fs::create_directories(cfg.output_dir);
        if (active == build)
            cmd_build(cfg);
        else if (active == fuse)
            cmd_fuse(cfg);
        else if (active == cluster)
            cmd_cluster(cfg);
        else if (active == compare)
            cmd_compare(cfg);
        else if (active == synth_bench)
            cmd_synth_bench(cfg);
        else if (active == exporter)
            cmd_export(cfg);
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace multifuse::cli
