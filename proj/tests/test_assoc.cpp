#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "multifuse/assoc.hpp"
#include "multifuse/rng.hpp"
#include "multifuse/synth.hpp"

#include "oracles.hpp"

using namespace multifuse;

namespace {

/// Euclidean distances of a random point cloud: a guaranteed-valid metric.
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

Partition random_partition(int n, int clusters, Rng& rng) {
    Partition p;
    p.node_ids = default_node_ids(n);
    p.labels.resize(static_cast<std::size_t>(n));
    for (auto& l : p.labels) l = rng.uniform_int(clusters);
    return p;
}

} // namespace

TEST_CASE("embed_rows distances follow the Euclidean construction") {
    Matrix ident = Matrix::Identity(2, 2);
    const auto e = embed_rows({ident, {"a", "b"}});
    CHECK(e.d(0, 1) == std::sqrt(2.0));
    CHECK(e.d(0, 0) == 0.0);

    Matrix same(2, 2);
    same << 0.3, 0.7, 0.3, 0.7;
    const auto s = embed_rows({same, {"a", "b"}});
    CHECK(s.d(0, 1) == 0.0); // identical rows
}

TEST_CASE("embed_rows satisfies metric invariants") {
    Rng rng(5);
    const auto e = embed_rows(random_similarity(10, rng));
    for (int i = 0; i < 10; ++i) {
        CHECK(e.d(i, i) == 0.0);
        for (int j = 0; j < 10; ++j) {
            CHECK(e.d(i, j) >= 0.0);
            CHECK(e.d(i, j) == e.d(j, i));
            for (int k = 0; k < 10; ++k)
                CHECK(e.d(i, j) <= e.d(i, k) + e.d(k, j) + 1e-12);
        }
    }
}

TEST_CASE("distance correlation of a sample with itself is one") {
    Rng rng(7);
    const auto e = random_embedding(12, 3, rng);
    const auto r = distance_correlation(e, e);
    CHECK(r.dcor == Catch::Approx(1.0).margin(1e-12));
    CHECK(r.dcor_sq == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("distance correlation is invariant to embedding scale") {
    Rng rng(11);
    const auto s = random_similarity(10, rng);
    SimilarityMatrix scaled{3.7 * s.values, s.node_ids};
    const auto r = distance_correlation(embed_rows(s), embed_rows(scaled));
    CHECK(r.dcor == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("distance correlation matches the brute-force oracle") {
    Rng rng(13);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 4 + rng.uniform_int(17);
        const auto a = random_embedding(n, 1 + rng.uniform_int(4), rng);
        const auto b = random_embedding(n, 1 + rng.uniform_int(4), rng);
        const auto r = distance_correlation(a, b);
        CHECK(r.dcor == Catch::Approx(oracle::dcor(a.d, b.d)).margin(1e-10));
        CHECK(r.dcor_sq == Catch::Approx(r.dcor * r.dcor).margin(1e-12));
        CHECK(r.dcor >= 0.0);
        CHECK(r.dcor <= 1.0);
    }
}

TEST_CASE("distance correlation is symmetric and permutation-invariant") {
    Rng rng(17);
    const int n = 9;
    const auto a = random_embedding(n, 2, rng);
    const auto b = random_embedding(n, 3, rng);
    CHECK(distance_correlation(a, b).dcor == distance_correlation(b, a).dcor);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    EmbeddedDistances pa{Matrix(n, n), {}}, pb{Matrix(n, n), {}};
    for (int i = 0; i < n; ++i) {
        pa.node_ids.push_back(a.node_ids[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
        pb.node_ids = pa.node_ids;
        for (int j = 0; j < n; ++j) {
            pa.d(i, j) = a.d(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
            pb.d(i, j) = b.d(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
    }
    pb.node_ids = pa.node_ids;
    CHECK(distance_correlation(pa, pb).dcor ==
          Catch::Approx(distance_correlation(a, b).dcor).margin(1e-12));
}

TEST_CASE("dimension and alignment mismatches are rejected") {
    Rng rng(19);
    const auto a = random_embedding(6, 2, rng);
    const auto b = random_embedding(7, 2, rng);
    CHECK_THROWS_AS(distance_correlation(a, b), DimensionMismatchError);
    auto c = random_embedding(6, 2, rng);
    c.node_ids[0] = "other";
    CHECK_THROWS_AS(distance_correlation(a, c), AlignmentError);
}

TEST_CASE("conditioning on a copy of the variable zeroes the partial correlation") {
    Rng rng(23);
    const auto a = random_embedding(10, 2, rng);
    const auto b = random_embedding(10, 2, rng);
    const auto r = partial_distance_correlation(a, b, b);
    CHECK(std::abs(r.pdcor) <= 1e-10);
}

TEST_CASE("partial distance correlation is symmetric in a and b") {
    Rng rng(29);
    const auto a = random_embedding(9, 2, rng);
    const auto b = random_embedding(9, 3, rng);
    const auto z = random_embedding(9, 1, rng);
    CHECK(partial_distance_correlation(a, b, z).pdcor ==
          partial_distance_correlation(b, a, z).pdcor);
}

TEST_CASE("partial distance correlation matches the U-centering oracle") {
    Rng rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 6 + rng.uniform_int(13);
        const auto a = random_embedding(n, 2, rng);
        const auto b = random_embedding(n, 2, rng);
        const auto z = random_embedding(n, 2, rng);
        const auto r = partial_distance_correlation(a, b, z);
        CHECK(r.pdcor == Catch::Approx(oracle::pdcor(a.d, b.d, z.d)).margin(1e-10));
        CHECK(r.pdcor >= -1.0);
        CHECK(r.pdcor <= 1.0);
        CHECK(r.pdcor_root == std::sqrt(std::max(0.0, r.pdcor)));
    }
}

TEST_CASE("partial distance correlation needs four samples") {
    Rng rng(37);
    const auto a = random_embedding(3, 2, rng);
    CHECK_THROWS_AS(partial_distance_correlation(a, a, a), InsufficientSampleError);
}

TEST_CASE("cramers_v on identical partitions is one for any labeling") {
    Partition p{{0, 0, 1, 1, 2}, default_node_ids(5)};
    Partition q{{7, 7, 3, 3, 9}, default_node_ids(5)}; // same partition, other labels
    CHECK(cramers_v(p, p) == 1.0);
    CHECK(cramers_v(p, q) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("cramers_v detects exact independence") {
    // contingency [[25,25],[25,25]]
    Partition p, q;
    p.node_ids = q.node_ids = default_node_ids(100);
    for (int i = 0; i < 100; ++i) {
        p.labels.push_back(i < 50 ? 0 : 1);
        q.labels.push_back(i % 2);
    }
    CHECK(cramers_v(p, q) == 0.0);
}

TEST_CASE("cramers_v hand-computed chi-square value") {
    // contingency [[8,2],[2,8]], n=20: chi2 = 7.2, V = sqrt(0.36) = 0.6
    Partition p, q;
    p.node_ids = q.node_ids = default_node_ids(20);
    for (int i = 0; i < 20; ++i) {
        const bool row = i < 10;
        p.labels.push_back(row ? 0 : 1);
        const bool diag = (row && i < 8) || (!row && i >= 12);
        q.labels.push_back(diag == row ? 0 : 1);
    }
    CHECK(cramers_v(p, q) == Catch::Approx(0.6).margin(1e-12));
    CHECK(cramers_v(p, q) == oracle::cramers_v(p.labels, q.labels));
}

TEST_CASE("cramers_v is exactly invariant under cluster relabeling") {
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 5 + rng.uniform_int(30);
        const auto p = random_partition(n, 1 + rng.uniform_int(5), rng);
        const auto q = random_partition(n, 1 + rng.uniform_int(5), rng);
        const double base = cramers_v(p, q);

        Partition relabeled = q;
        for (auto& l : relabeled.labels) l = 1000 - 17 * l;
        CHECK(cramers_v(p, relabeled) == base);
    }
}

TEST_CASE("cramers_v degenerate conventions") {
    Partition single{{0, 0, 0}, default_node_ids(3)};
    Partition split{{0, 1, 0}, default_node_ids(3)};
    CHECK(cramers_v(single, single) == 1.0);
    CHECK(cramers_v(single, split) == 0.0);
    Partition other{{4, 4, 4}, default_node_ids(3)};
    CHECK(cramers_v(single, other) == 1.0);
    Partition misaligned{{0, 1, 0}, {"x", "y", "z"}};
    CHECK_THROWS_AS(cramers_v(single, misaligned), AlignmentError);
}

TEST_CASE("adjusted_rand endpoints and degenerate conventions") {
    Partition p{{0, 0, 1, 1}, default_node_ids(4)};
    Partition same{{5, 5, 2, 2}, default_node_ids(4)};
    CHECK(adjusted_rand(p, same) == 1.0);

    Partition one{{0, 0, 0, 0}, default_node_ids(4)};
    Partition singletons{{0, 1, 2, 3}, default_node_ids(4)};
    CHECK(adjusted_rand(one, singletons) == 0.0);
    CHECK(adjusted_rand(one, one) == 1.0);
    CHECK(adjusted_rand(singletons, singletons) == 1.0);
}

TEST_CASE("adjusted_rand matches pair counting on a hand instance and random data") {
    Partition p{{0, 0, 0, 1, 1, 1, 2, 2}, default_node_ids(8)};
    Partition q{{0, 0, 1, 1, 1, 2, 2, 2}, default_node_ids(8)};
    CHECK(adjusted_rand(p, q) == Catch::Approx(oracle::adjusted_rand(p.labels, q.labels)).margin(1e-12));

    Rng rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 4 + rng.uniform_int(25);
        const auto a = random_partition(n, 1 + rng.uniform_int(5), rng);
        const auto b = random_partition(n, 1 + rng.uniform_int(5), rng);
        CHECK(adjusted_rand(a, b) ==
              Catch::Approx(oracle::adjusted_rand(a.labels, b.labels)).margin(1e-12));
    }
}

TEST_CASE("dcor separates same-structure from different-structure realizations") {
    int violations = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        PlantedSpec same_a;
        same_a.blocks = {30, 30};
        same_a.layers = {LayerNoise{0.8, 0.2, 0.1, {}}, LayerNoise{0.8, 0.2, 0.1, {}}};
        same_a.seed = seed * 3 + 1;
        // different structure: three unequal blocks over the same node count
        PlantedSpec diff;
        diff.blocks = {10, 20, 30};
        diff.layers = {LayerNoise{0.8, 0.2, 0.1, {}}};
        diff.seed = seed * 3 + 2;

        const auto r1 = planted_multiplex(same_a);
        const auto r2 = planted_multiplex(diff);
        const auto e_same_1 = embed_rows(r1.bundle.layers[0]);
        const auto e_same_2 = embed_rows(r1.bundle.layers[1]);
        const auto e_diff = embed_rows(r2.bundle.layers[0]);
        const double within = distance_correlation(e_same_1, e_same_2).dcor;
        const double across = distance_correlation(e_same_1, e_diff).dcor;
        if (!(within > across)) ++violations;
    }
    CHECK(violations <= 1);
}
