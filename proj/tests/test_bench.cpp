#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "trimsearch/bench/gt_cache.hpp"
#include "trimsearch/bench/metrics.hpp"
#include "trimsearch/bench/radius.hpp"
#include "trimsearch/bench/sweep.hpp"
#include "trimsearch/core/synthetic.hpp"
#include "trimsearch/graph/hnsw.hpp"
#include "trimsearch/trim/calibration.hpp"

#include "support/test_util.hpp"

using namespace trimsearch;

TEST_CASE("recall_at_k") {
    CHECK(bench::recall_at_k({1, 2, 3}, {1, 2, 3}, 3) == 1.0);
    CHECK(bench::recall_at_k({1, 2, 3}, {7, 8, 9}, 3) == 0.0);
    CHECK_THAT(bench::recall_at_k({1, 2, 3}, {3, 9, 1}, 3),
               Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-12));
    // longer approx lists are truncated to k before intersecting
    CHECK(bench::recall_at_k({1, 2}, {5, 6, 1, 2}, 2) == 0.0);
    CHECK_THROWS_AS(bench::recall_at_k({1}, {1}, 2), std::invalid_argument);
}

TEST_CASE("tie-tolerant recall counts ids at the k-th distance") {
    const std::vector<std::uint32_t> exact{10, 11, 12, 13};
    const std::vector<float> dist{1.0f, 2.0f, 3.0f, 3.0f}; // 12 and 13 tie at k=3
    CHECK(bench::recall_at_k_ties(exact, dist, {10, 11, 13}, 3) == 1.0);
    CHECK(bench::recall_at_k(exact, {10, 11, 13}, 3) < 1.0);
}

TEST_CASE("ap_at_e") {
    CHECK(*bench::ap_at_e({1, 2, 3}, {1, 2, 3}) == 1.0);
    CHECK(*bench::ap_at_e({1, 2, 3}, {}) == 0.0);
    std::vector<std::uint32_t> exact(10), approx(9);
    for (std::uint32_t i = 0; i < 10; ++i)
        exact[i] = i;
    for (std::uint32_t i = 0; i < 9; ++i)
        approx[i] = i;
    CHECK_THAT(*bench::ap_at_e(exact, approx), Catch::Matchers::WithinAbs(0.9, 1e-12));
    CHECK_FALSE(bench::ap_at_e({}, {1}).has_value()); // undefined, excluded upstream
    // intersection form stays within [0,1] even with false positives
    CHECK(*bench::ap_at_e({1}, {1, 2, 3}) == 1.0);
}

TEST_CASE("pick_radius_for_fraction") {
    SECTION("uniform 1-D data, query at 0.5, e=0.5 gives radius near 0.25") {
        VectorDataset ds(1, 20000);
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<float> u(0.0f, 1.0f);
        for (auto& v : ds.data)
            v = u(rng);
        VectorDataset q(1, 1);
        q.mutable_row(0)[0] = 0.5f;
        const float r = bench::pick_radius_for_fraction(ds, q, 0.5, 20000, 1, 9);
        CHECK_THAT(r, Catch::Matchers::WithinAbs(0.25, 0.01));
    }

    SECTION("e=1 returns at least the max sampled distance") {
        VectorDataset ds = make_normal_dataset(500, 4, 5);
        VectorDataset qs = make_normal_dataset(10, 4, 6);
        const float r = bench::pick_radius_for_fraction(ds, qs, 1.0, 500, 10, 7);
        for (std::size_t qi = 0; qi < qs.count; ++qi)
            CHECK(brute_force_range(ds, qs.row(qi), r).size() == ds.count);
    }

    SECTION("requested fraction is reproduced within 20% on held-out queries") {
        VectorDataset ds = make_normal_dataset(4000, 8, 8);
        VectorDataset cal_q = make_normal_dataset(100, 8, 9);
        VectorDataset held_q = make_normal_dataset(50, 8, 10);
        const double e = 0.05;
        const float r = bench::pick_radius_for_fraction(ds, cal_q, e, 2000, 100, 11);
        double got = 0.0;
        for (std::size_t qi = 0; qi < held_q.count; ++qi)
            got += static_cast<double>(brute_force_range(ds, held_q.row(qi), r).size());
        got /= static_cast<double>(held_q.count) * static_cast<double>(ds.count);
        CHECK_THAT(got, Catch::Matchers::WithinAbs(e, 0.2 * e));
    }

    SECTION("errors") {
        VectorDataset ds = make_normal_dataset(10, 2, 1);
        CHECK_THROWS_AS(bench::pick_radius_for_fraction(ds, ds, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(bench::pick_radius_for_fraction(ds, ds, 1.5), std::invalid_argument);
    }
}

TEST_CASE("ground truth cache round trips through the filesystem") {
    VectorDataset ds = make_normal_dataset(200, 8, 12);
    VectorDataset qs = make_normal_dataset(5, 8, 13);
    const auto dir = testutil::temp_path("gtcache");
    const auto a = bench::load_or_compute_gt(ds, qs, "knn", 5, dir);
    const auto b = bench::load_or_compute_gt(ds, qs, "knn", 5, dir); // cache hit
    CHECK(a.ids == b.ids);
    CHECK(a.dist_sq == b.dist_sq);
    const auto direct = ground_truth_knn(ds, qs, 5);
    CHECK(a.ids == direct.ids);
}

namespace {

struct SweepFixture {
    VectorDataset centers = make_normal_dataset(32, 16, 70);
    VectorDataset ds = make_blob_dataset(centers, 1200, 0.4f, 71);
    VectorDataset qs = make_blob_dataset(centers, 25, 0.4f, 72);
    graph::GraphIndex g = graph::build_graph(ds, 8, 60, 73);
    trim::LandmarkStore lm;
    trim::PruningProfile profile;
    GroundTruth gt;

    SweepFixture() {
        pq::PqParams params;
        params.m = 4;
        params.c = 32;
        params.kmeans_iters = 8;
        params.seed = 74;
        lm = trim::build_landmarks(ds, pq::train(ds, params));
        trim::EmpiricalSampleParams ep;
        ep.sample_x = 200;
        ep.queries_per_x = 100;
        ep.seed = 75;
        VectorDataset cal_qs = make_blob_dataset(centers, 200, 0.4f, 76);
        profile =
            trim::calibrate_gamma(trim::sample_one_minus_z_empirical(ds, lm, cal_qs, ep), 1.0);
        gt = ground_truth_knn(ds, qs, 10);
    }

    bench::SweepSpec spec() {
        bench::SweepSpec s;
        s.dataset_label = "blobs";
        s.base = &ds;
        s.queries = &qs;
        s.gt = &gt;
        s.k = 10;
        s.graph = &g;
        s.landmarks = &lm;
        s.profiles = {profile};
        return s;
    }
};

std::string strip_qps(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        const auto pos = line.rfind(',');
        out << line.substr(0, pos) << "\n";
    }
    return out.str();
}

} // namespace

TEST_CASE("run_sweep emits one row per grid point with the fixed schema") {
    SweepFixture fx;
    auto spec = fx.spec();
    spec.backends = {"graph_trim"};
    spec.ef_grid = {20};
    const auto rows = bench::run_sweep(spec);
    REQUIRE(rows.size() == 1);
    std::ostringstream out;
    bench::write_csv(out, rows);
    const std::string csv = out.str();
    CHECK(csv.rfind("backend,dataset,query_type,k_or_radius,p,gamma,ef,nprobe,recall,ap,"
                    "pruning_ratio,edc,dc,mean_io,qps\n",
                    0) == 0);
    CHECK(rows[0].backend == "graph_trim");
    CHECK(rows[0].ef == "20");
    CHECK(rows[0].nprobe == "-");
    CHECK(rows[0].mean_io == "-");
    CHECK(std::stod(rows[0].recall) >= 0.0);
    CHECK(std::stod(rows[0].pruning_ratio) >= 0.0);
    CHECK(std::stod(rows[0].pruning_ratio) <= 1.0);
}

TEST_CASE("sweep rows are deterministic except the qps column") {
    SweepFixture fx;
    auto spec = fx.spec();
    spec.backends = {"graph_trim", "graph_baseline"};
    spec.ef_grid = {15, 30};
    std::ostringstream a, b;
    bench::write_csv(a, bench::run_sweep(spec));
    bench::write_csv(b, bench::run_sweep(spec));
    CHECK(strip_qps(a.str()) == strip_qps(b.str()));
}

TEST_CASE("recall is monotone nondecreasing over the ef grid") {
    SweepFixture fx;
    auto spec = fx.spec();
    spec.backends = {"graph_baseline"};
    spec.ef_grid = {10, 20, 40, 80};
    const auto rows = bench::run_sweep(spec);
    REQUIRE(rows.size() == 4);
    double prev = 0.0;
    for (const auto& row : rows) {
        const double r = std::stod(row.recall);
        CHECK(r >= prev - 0.005);
        prev = std::max(prev, r);
    }
}

TEST_CASE("sweep input validation") {
    SweepFixture fx;
    auto spec = fx.spec();
    spec.backends = {"warp_drive"};
    spec.ef_grid = {10};
    CHECK_THROWS_AS(bench::run_sweep(spec), std::invalid_argument);

    auto spec2 = fx.spec();
    spec2.backends = {"graph_trim"};
    spec2.ef_grid.clear();
    CHECK_THROWS_AS(bench::run_sweep(spec2), std::invalid_argument);

    auto spec3 = fx.spec();
    spec3.backends = {"graph_trim"};
    spec3.ef_grid = {10};
    spec3.profiles.clear();
    CHECK_THROWS_AS(bench::run_sweep(spec3), std::invalid_argument);
}
