#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "multifuse/errors.hpp"
#include "multifuse/model.hpp"
#include "multifuse/rng.hpp"

namespace multifuse {

/// Noise model of one planted layer. merge_map sends each ground-truth block
/// to the effective block this layer can resolve (empty = identity), so a
/// layer can be made blind to part of the planted structure. Pairs joined by
/// the merge center at mu_merged; the default (mu_merged < 0) is mu_in, which
/// makes merged blocks exactly indistinguishable in this layer.
struct LayerNoise {
    double mu_in = 0.9;
    double mu_out = 0.1;
    double sigma = 0.05;
    std::vector<int> merge_map;
    double mu_merged = -1.0;

    double merged_level() const { return mu_merged < 0.0 ? mu_in : mu_merged; }
};

/// Planted-partition multiplex: block sizes, one noise model per layer, seed.
struct PlantedSpec {
    std::vector<int> blocks;
    std::vector<LayerNoise> layers;
    std::uint64_t seed = 0;

    int n() const { return std::accumulate(blocks.begin(), blocks.end(), 0); }
};

struct PlantedResult {
    MultiplexBundle bundle;
    Partition truth;
};

namespace detail {

inline void validate_spec(const PlantedSpec& spec) {
    if (spec.blocks.empty()) throw SpecError("planted spec needs at least one block");
    for (const int b : spec.blocks)
        if (b < 1) throw SpecError("block sizes must be >= 1");
    if (spec.layers.empty()) throw SpecError("planted spec needs at least one layer");
    for (std::size_t v = 0; v < spec.layers.size(); ++v) {
        const auto& layer = spec.layers[v];
        if (!(layer.mu_out >= 0.0 && layer.mu_out <= layer.mu_in && layer.mu_in <= 1.0))
            throw SpecError("layer " + std::to_string(v) + " needs 0 <= mu_out <= mu_in <= 1");
        if (!(layer.merged_level() >= layer.mu_out && layer.merged_level() <= layer.mu_in))
            throw SpecError("layer " + std::to_string(v) +
                            " needs mu_out <= mu_merged <= mu_in");
        if (!(layer.sigma >= 0.0))
            throw SpecError("layer " + std::to_string(v) + " needs sigma >= 0");
        if (!layer.merge_map.empty()) {
            if (layer.merge_map.size() != spec.blocks.size())
                throw SpecError("layer " + std::to_string(v) +
                                " merge_map must list every ground-truth block");
            for (const int m : layer.merge_map)
                if (m < 0) throw SpecError("merge_map labels must be >= 0");
        }
    }
}

} // namespace detail

/// Draws each layer as a clamped Gaussian around mu_in (same effective block
/// after the layer's merge_map) or mu_out, with unit diagonal. One RNG stream
/// consumed in fixed layer/pair order keeps the result seed-deterministic.
inline PlantedResult planted_multiplex(const PlantedSpec& spec) {
    detail::validate_spec(spec);
    const int n = spec.n();

    std::vector<int> block_of(static_cast<std::size_t>(n));
    {
        int node = 0;
        for (std::size_t b = 0; b < spec.blocks.size(); ++b)
            for (int k = 0; k < spec.blocks[b]; ++k) block_of[static_cast<std::size_t>(node++)] = static_cast<int>(b);
    }

    PlantedResult out;
    out.bundle.node_ids = default_node_ids(n);
    out.truth = Partition{block_of, out.bundle.node_ids};

    Rng rng(spec.seed);
    for (const auto& layer : spec.layers) {
        const auto effective = [&](int node) {
            const int b = block_of[static_cast<std::size_t>(node)];
            return layer.merge_map.empty() ? b : layer.merge_map[static_cast<std::size_t>(b)];
        };
        SimilarityMatrix sim{Matrix(n, n), out.bundle.node_ids};
        for (int i = 0; i < n; ++i) {
            sim.values(i, i) = 1.0;
            for (int j = i + 1; j < n; ++j) {
                const bool same_block =
                    block_of[static_cast<std::size_t>(i)] == block_of[static_cast<std::size_t>(j)];
                const bool same_effective = effective(i) == effective(j);
                const double mu = same_block        ? layer.mu_in
                                  : same_effective  ? layer.merged_level()
                                                    : layer.mu_out;
                const double v = std::clamp(mu + layer.sigma * rng.normal(), 0.0, 1.0);
                sim.values(i, j) = v;
                sim.values(j, i) = v;
            }
        }
        out.bundle.layers.push_back(std::move(sim));
    }
    return out;
}

/// Two-layer multiplex in which each layer effectively resolves only half of
/// the k planted blocks: layer 1 merges neighbor pairs (0,1),(2,3),... and
/// layer 2 the shifted pairs (1,2),(3,4),...,(k-1,0). Merged pairs sit at
/// mu_merged, close enough to mu_in that single-layer modularity clustering
/// keeps them together (the margin is wide: collapsing wins whenever
/// mu_merged is above roughly half of mu_in), while the fused view compounds
/// the gap across the layers and separates all k blocks.
inline PlantedResult complementary_pair(int n, int k, std::uint64_t seed, double sigma = 0.05,
                                        double mu_in = 0.9, double mu_out = 0.1,
                                        double mu_merged = 0.7) {
    if (k < 4 || k % 2 != 0) throw SpecError("complementary_pair needs an even k >= 4");
    if (n < k) throw SpecError("complementary_pair needs n >= k");

    PlantedSpec spec;
    spec.seed = seed;
    spec.blocks.assign(static_cast<std::size_t>(k), n / k);
    for (int b = 0; b < n % k; ++b) ++spec.blocks[static_cast<std::size_t>(b)];

    LayerNoise layer1{mu_in, mu_out, sigma, {}, mu_merged};
    LayerNoise layer2{mu_in, mu_out, sigma, {}, mu_merged};
    layer1.merge_map.resize(static_cast<std::size_t>(k));
    layer2.merge_map.resize(static_cast<std::size_t>(k));
    for (int b = 0; b < k; ++b) {
        layer1.merge_map[static_cast<std::size_t>(b)] = b / 2;
        layer2.merge_map[static_cast<std::size_t>(b)] = b == 0 ? k / 2 - 1 : (b + 1) / 2 - 1;
    }
    spec.layers = {layer1, layer2};
    return planted_multiplex(spec);
}

} // namespace multifuse
