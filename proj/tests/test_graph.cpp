#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <set>

#include "trimsearch/core/ground_truth.hpp"
#include "trimsearch/core/synthetic.hpp"
#include "trimsearch/graph/hnsw.hpp"
#include "trimsearch/graph/search.hpp"
#include "trimsearch/pq/pq.hpp"
#include "trimsearch/trim/calibration.hpp"

#include "support/test_util.hpp"

using namespace trimsearch;

namespace {

VectorDataset uniform_2d(std::size_t n, std::uint64_t seed) {
    VectorDataset ds(2, n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (auto& v : ds.data)
        v = u(rng);
    return ds;
}

struct TrimFixture {
    VectorDataset ds;
    graph::GraphIndex g;
    trim::LandmarkStore lm;
    trim::PruningProfile profile;

    TrimFixture(std::size_t n, std::size_t dim, std::uint64_t seed, std::size_t m,
                std::size_t c) {
        ds = make_normal_dataset(n, dim, seed);
        g = graph::build_graph(ds, 8, 100, seed + 1);
        pq::PqParams params;
        params.m = m;
        params.c = c;
        params.kmeans_iters = 8;
        params.seed = seed + 2;
        lm = trim::build_landmarks(ds, pq::train(ds, params));
        trim::AnalyticSampleParams ap;
        ap.sample_x = 200;
        ap.draws_per_x = 4000;
        ap.seed = seed + 3;
        profile = trim::calibrate_gamma(trim::sample_analytic_cdfs(ds, lm, ap), 1.0);
    }
};

} // namespace

TEST_CASE("build_graph structure invariants") {
    SECTION("single node") {
        VectorDataset ds = make_normal_dataset(1, 4, 3);
        const auto g = graph::build_graph(ds, 4, 10, 1);
        CHECK(g.count == 1);
        CHECK(g.entry == 0);
        CHECK(g.neighbors(0, 0).empty());
    }

    SECTION("degree caps and no self loops") {
        VectorDataset ds = make_normal_dataset(500, 8, 5);
        const auto g = graph::build_graph(ds, 6, 60, 2);
        for (std::size_t lvl = 0; lvl <= g.max_level; ++lvl) {
            const std::size_t cap = g.max_degree(lvl);
            for (std::size_t i = 0; i < g.count; ++i) {
                const auto& adj = g.neighbors(lvl, static_cast<std::uint32_t>(i));
                CHECK(adj.size() <= cap);
                for (std::uint32_t v : adj) {
                    CHECK(v != i);
                    CHECK(v < g.count);
                }
            }
        }
    }

    SECTION("M < 2 rejected") {
        VectorDataset ds = make_normal_dataset(10, 4, 3);
        CHECK_THROWS_AS(graph::build_graph(ds, 1, 10, 1), std::invalid_argument);
    }

    SECTION("level 0 reaches every node") {
        VectorDataset ds = make_normal_dataset(800, 8, 9);
        const auto g = graph::build_graph(ds, 8, 80, 4);
        CHECK(graph::reachable_from_entry(g) == g.count);
    }

    SECTION("deterministic given seed") {
        VectorDataset ds = make_normal_dataset(200, 6, 8);
        const auto a = graph::build_graph(ds, 6, 40, 7);
        const auto b = graph::build_graph(ds, 6, 40, 7);
        CHECK(a.entry == b.entry);
        CHECK(a.layers == b.layers);
    }
}

TEST_CASE("baseline search recalls exactly with exhaustive ef on a small corpus") {
    VectorDataset ds = uniform_2d(100, 33);
    const auto g = graph::build_graph(ds, 8, 100, 1);
    VectorDataset qs = uniform_2d(20, 34);
    for (std::size_t qi = 0; qi < qs.count; ++qi) {
        const auto res = graph::search_baseline_knn(g, ds, qs.row(qi), 10, ds.count);
        const auto truth = brute_force_knn(ds, qs.row(qi), 10);
        REQUIRE(res.ids.size() == 10);
        for (std::size_t i = 0; i < 10; ++i)
            CHECK(res.ids[i] == truth[i].id);
        CHECK(res.counters.dc == res.counters.evaluated); // baseline computes everything
        CHECK(res.counters.pruned == 0);
    }
}

TEST_CASE("baseline search trivia") {
    VectorDataset ds = make_normal_dataset(300, 8, 44);
    const auto g = graph::build_graph(ds, 8, 80, 2);

    SECTION("query equal to a data row returns it at distance 0") {
        const auto res = graph::search_baseline_knn(g, ds, ds.row(123), 1, 64);
        REQUIRE_FALSE(res.ids.empty());
        CHECK(res.ids[0] == 123);
        CHECK(res.dist_sq[0] == 0.0f);
    }

    SECTION("k > ef rejected") {
        CHECK_THROWS_AS(graph::search_baseline_knn(g, ds, ds.row(0), 20, 10),
                        std::invalid_argument);
    }
}

TEST_CASE("TRIM graph search with gamma=0 and exhaustive ef equals brute force") {
    TrimFixture fx(600, 16, 100, 4, 32);
    const auto zero = trim::PruningProfile::manual(0.0);
    VectorDataset qs = make_normal_dataset(25, 16, 101);

    SECTION("kNN") {
        for (std::size_t qi = 0; qi < qs.count; ++qi) {
            const auto res =
                graph::search_trim_knn(fx.g, fx.ds, fx.lm, zero, qs.row(qi), 10, fx.ds.count);
            const auto truth = brute_force_knn(fx.ds, qs.row(qi), 10);
            REQUIRE(res.ids.size() == 10);
            for (std::size_t i = 0; i < 10; ++i)
                CHECK(res.ids[i] == truth[i].id);
        }
    }

    SECTION("range") {
        const float radius = 4.2f;
        for (std::size_t qi = 0; qi < qs.count; ++qi) {
            const auto res = graph::search_trim_range(fx.g, fx.ds, fx.lm, zero, qs.row(qi),
                                                      radius, fx.ds.count);
            const auto truth = brute_force_range(fx.ds, qs.row(qi), radius);
            REQUIRE(res.ids.size() == truth.size());
            for (std::size_t i = 0; i < truth.size(); ++i)
                CHECK(res.ids[i] == truth[i].id);
        }
    }
}

TEST_CASE("TRIM search counters and result-queue invariants") {
    TrimFixture fx(800, 32, 200, 8, 64);
    VectorDataset qs = make_normal_dataset(15, 32, 201);
    const std::size_t ef = 60;

    for (std::size_t qi = 0; qi < qs.count; ++qi) {
        const auto res = graph::search_trim_knn(fx.g, fx.ds, fx.lm, fx.profile, qs.row(qi), 10, ef);

        // accounting identity: every evaluation ends in exact or pruned
        CHECK(res.counters.dc + res.counters.pruned == res.counters.evaluated);
        const double ratio = res.counters.pruning_ratio();
        CHECK(ratio >= 0.0);
        CHECK(ratio <= 1.0);

        // R sorted ascending, unique ids
        std::set<std::uint32_t> seen;
        for (std::size_t i = 0; i < res.ids.size(); ++i) {
            seen.insert(res.ids[i]);
            if (i > 0)
                CHECK(res.dist_sq[i - 1] <= res.dist_sq[i]);
        }
        CHECK(seen.size() == res.ids.size());

        // exact distances in R are true distances
        for (std::size_t i = 0; i < res.ids.size(); ++i)
            CHECK(res.dist_sq[i] == euclidean_sq(qs.row(qi), fx.ds.row(res.ids[i])));
    }
}

TEST_CASE("TRIM computes no more exact distances than the baseline at matched ef") {
    // Clustered corpus: the distance spread of real embedding data, where
    // bound-ordered traversal matches the baseline's. On near-isometric data
    // (i.i.d. normal at low d) the relaxed bounds are too loose to steer.
    const std::size_t d = 64;
    VectorDataset centers = make_normal_dataset(120, d, 310);
    VectorDataset ds = make_blob_dataset(centers, 4000, 0.35f, 311);
    VectorDataset qs = make_blob_dataset(centers, 30, 0.35f, 312);
    VectorDataset cal_qs = make_blob_dataset(centers, 400, 0.35f, 313);

    const auto g = graph::build_graph(ds, 8, 100, 314);
    pq::PqParams params;
    params.m = d / 4;
    params.c = 128;
    params.kmeans_iters = 8;
    params.seed = 315;
    const auto lm = trim::build_landmarks(ds, pq::train(ds, params));
    trim::EmpiricalSampleParams ep;
    ep.sample_x = 400;
    ep.queries_per_x = 200;
    ep.seed = 316;
    const auto profile =
        trim::calibrate_gamma(trim::sample_one_minus_z_empirical(ds, lm, cal_qs, ep), 1.0);

    for (std::size_t ef : {20UL, 60UL}) {
        std::uint64_t trim_total = 0, base_total = 0;
        for (std::size_t qi = 0; qi < qs.count; ++qi) {
            const auto t = graph::search_trim_knn(g, ds, lm, profile, qs.row(qi), 10, ef);
            const auto b = graph::search_baseline_knn(g, ds, qs.row(qi), 10, ef);
            CHECK(t.counters.dc <= b.counters.dc);
            trim_total += t.counters.dc;
            base_total += b.counters.dc;
        }
        CHECK(trim_total < base_total);
    }
}

TEST_CASE("TRIM range search prunes but never loses results at p=1") {
    TrimFixture fx(1500, 32, 400, 8, 64);
    VectorDataset qs = make_normal_dataset(12, 32, 401);
    const float radius = 6.5f;
    double found = 0, truth_n = 0;
    for (std::size_t qi = 0; qi < qs.count; ++qi) {
        const auto res = graph::search_trim_range(fx.g, fx.ds, fx.lm, fx.profile, qs.row(qi),
                                                  radius, 80);
        const auto truth = brute_force_range(fx.ds, qs.row(qi), radius);
        std::set<std::uint32_t> truth_ids;
        for (const auto& s : truth)
            truth_ids.insert(s.id);
        for (std::uint32_t id : res.ids)
            CHECK(truth_ids.count(id) == 1); // only exactly-verified members
        found += static_cast<double>(res.ids.size());
        truth_n += static_cast<double>(truth.size());
        CHECK(res.counters.dc + res.counters.pruned == res.counters.evaluated);
    }
    CHECK(found >= 0.9 * truth_n); // high accuracy at p=1 on this desk corpus
}

TEST_CASE("TRIM search parameter validation") {
    TrimFixture fx(200, 16, 500, 4, 32);
    VectorDataset qs = make_normal_dataset(1, 16, 501);
    CHECK_THROWS_AS(graph::search_trim_knn(fx.g, fx.ds, fx.lm, fx.profile, qs.row(0), 20, 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(graph::search_trim_knn(fx.g, fx.ds, fx.lm, trim::PruningProfile{},
                                           qs.row(0), 5, 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(graph::search_trim_range(fx.g, fx.ds, fx.lm, fx.profile, qs.row(0), -1.0f,
                                             10),
                    std::invalid_argument);
}

TEST_CASE("graph serialization round trip preserves search behavior") {
    VectorDataset ds = make_normal_dataset(400, 8, 600);
    const auto g = graph::build_graph(ds, 8, 60, 3);
    const auto path = testutil::temp_path("graph") + ".bin";
    g.save(path);
    const auto back = graph::GraphIndex::load(path);
    CHECK(back.count == g.count);
    CHECK(back.M == g.M);
    CHECK(back.entry == g.entry);
    CHECK(back.max_level == g.max_level);
    CHECK(back.layers == g.layers);

    SECTION("byte-identical re-serialization") {
        const auto path2 = testutil::temp_path("graph2") + ".bin";
        back.save(path2);
        std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
        const std::string sa((std::istreambuf_iterator<char>(a)),
                             std::istreambuf_iterator<char>());
        const std::string sb((std::istreambuf_iterator<char>(b)),
                             std::istreambuf_iterator<char>());
        CHECK(sa == sb);
    }
}
