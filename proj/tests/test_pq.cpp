#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>

#include "trimsearch/core/synthetic.hpp"
#include "trimsearch/pq/kmeans.hpp"
#include "trimsearch/pq/pq.hpp"

#include "support/test_util.hpp"

using namespace trimsearch;

TEST_CASE("kmeans with k=1 returns the mean") {
    VectorDataset ds = make_normal_dataset(100, 3, 1);
    const auto km = pq::kmeans(ds.data.data(), ds.count, ds.dim, 1, 10, 42);
    for (std::size_t j = 0; j < ds.dim; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < ds.count; ++i)
            mean += ds.row(i)[j];
        mean /= static_cast<double>(ds.count);
        CHECK_THAT(km.centroids[j], Catch::Matchers::WithinAbs(mean, 1e-4));
    }
}

TEST_CASE("kmeans SSE is monotone nonincreasing") {
    VectorDataset ds = make_normal_dataset(400, 8, 5);
    const auto km = pq::kmeans(ds.data.data(), ds.count, ds.dim, 16, 20, 9);
    for (std::size_t i = 1; i < km.sse_per_iter.size(); ++i)
        CHECK(km.sse_per_iter[i] <= km.sse_per_iter[i - 1] * (1.0 + 1e-12));
}

TEST_CASE("kmeans recovers well-separated blobs") {
    VectorDataset centers(2, 2);
    centers.mutable_row(0)[0] = -5.0f;
    centers.mutable_row(0)[1] = 0.0f;
    centers.mutable_row(1)[0] = 5.0f;
    centers.mutable_row(1)[1] = 0.0f;
    VectorDataset ds = make_blob_dataset(centers, 600, 0.3f, 7);
    const auto km = pq::kmeans(ds.data.data(), ds.count, ds.dim, 2, 25, 3);
    // each learned centroid lands within 0.1 of one true blob mean
    for (std::size_t c = 0; c < 2; ++c) {
        const float cx = km.centroids[c * 2];
        const bool near_left = std::abs(cx + 5.0f) < 0.1f;
        const bool near_right = std::abs(cx - 5.0f) < 0.1f;
        CHECK((near_left || near_right));
    }
    CHECK(km.centroids[0] * km.centroids[2] < 0.0f); // opposite blobs
}

TEST_CASE("pq train degenerate cases") {
    VectorDataset ds = make_normal_dataset(64, 8, 21);

    SECTION("c=1 gives the subspace means and all-zero codes") {
        pq::PqParams params;
        params.m = 2;
        params.c = 1;
        params.kmeans_iters = 5;
        const auto cb = pq::train(ds, params);
        const auto code = pq::encode(cb, ds.row(0));
        CHECK(code == pq::PqCode{0, 0});
    }

    SECTION("c = n_train on distinct rows reconstructs exactly") {
        VectorDataset small = make_normal_dataset(8, 4, 2);
        pq::PqParams params;
        params.m = 1;
        params.c = 8;
        params.kmeans_iters = 10;
        const auto cb = pq::train(small, params);
        double worst = 0.0;
        for (std::size_t i = 0; i < small.count; ++i) {
            const auto code = pq::encode(cb, small.row(i));
            const auto dec = pq::decode(cb, code);
            worst = std::max(worst,
                             static_cast<double>(euclidean_sq(small.row(i), VectorView(dec))));
        }
        CHECK(worst < 1e-8);
        CHECK(cb.training_mse < 1e-8);
    }

    SECTION("errors") {
        pq::PqParams params;
        params.m = 16; // > dim
        CHECK_THROWS_AS(pq::train(ds, params), std::invalid_argument);
        pq::PqParams p2;
        p2.m = 2;
        p2.c = 256; // > n_train
        CHECK_THROWS_AS(pq::train(ds, p2), std::invalid_argument);
    }
}

TEST_CASE("uneven subspace split is front-loaded") {
    const auto sub = pq::split_sub_dims(10, 3);
    REQUIRE(sub.size() == 3);
    CHECK(sub[0] == 4);
    CHECK(sub[1] == 3);
    CHECK(sub[2] == 3);
}

TEST_CASE("encode picks the nearest centroid per axis") {
    // hand-built codebook: m=2, c=2, 2-D, centroids {0, 1} on each axis
    pq::PqCodebook cb;
    cb.params.m = 2;
    cb.params.c = 2;
    cb.dim = 2;
    cb.sub_dims = {1, 1};
    cb.sub_offsets = {0, 1};
    cb.centroids = {{0.0f, 1.0f}, {0.0f, 1.0f}};
    const std::vector<float> x{0.9f, 0.1f};
    const auto code = pq::encode(cb, VectorView(x));
    CHECK(code == pq::PqCode{1, 0});
}

TEST_CASE("decode/encode fixed points and reconstruction identity") {
    VectorDataset ds = make_normal_dataset(300, 8, 77);
    pq::PqParams params;
    params.m = 4;
    params.c = 16;
    params.kmeans_iters = 15;
    params.seed = 5;
    const auto cb = pq::train(ds, params);

    SECTION("decode of all-zero code concatenates first centroids") {
        const auto dec = pq::decode(cb, pq::PqCode{0, 0, 0, 0});
        for (std::size_t j = 0; j < 4; ++j)
            CHECK(dec[cb.sub_offsets[j]] == cb.centroid(j, 0)[0]);
    }

    SECTION("decode then encode is a fixed point") {
        const auto code = pq::encode(cb, ds.row(3));
        const auto l = pq::decode(cb, code);
        const auto again = pq::encode(cb, VectorView(l));
        const auto l2 = pq::decode(cb, again);
        CHECK(euclidean_sq(VectorView(l), VectorView(l2)) == 0.0f);
    }

    SECTION("reconstruction error equals per-subspace nearest-centroid sum") {
        for (std::size_t i = 0; i < 20; ++i) {
            const auto code = pq::encode(cb, ds.row(i));
            const auto l = pq::decode(cb, code);
            const float err = euclidean_sq(ds.row(i), VectorView(l));
            float direct = 0.0f;
            for (std::size_t j = 0; j < cb.m(); ++j) {
                float best = std::numeric_limits<float>::max();
                for (std::size_t c = 0; c < cb.c(); ++c)
                    best = std::min(best, euclidean_sq(ds.row(i).data() + cb.sub_offsets[j],
                                                       cb.centroid(j, c), cb.sub_dims[j]));
                direct += best;
            }
            CHECK_THAT(err, Catch::Matchers::WithinRel(direct, 1e-4f));
        }
    }

    SECTION("index out of range rejected") {
        CHECK_THROWS_AS(pq::decode(cb, pq::PqCode{16, 0, 0, 0}), std::invalid_argument);
    }
}

TEST_CASE("encoding optimality by exhaustive enumeration (m<=2, c<=4)") {
    VectorDataset ds = make_normal_dataset(40, 4, 31);
    pq::PqParams params;
    params.m = 2;
    params.c = 4;
    params.kmeans_iters = 10;
    const auto cb = pq::train(ds, params);
    for (std::size_t i = 0; i < ds.count; ++i) {
        const auto code = pq::encode(cb, ds.row(i));
        const auto best = pq::decode(cb, code);
        const float best_err = euclidean_sq(ds.row(i), VectorView(best));
        for (std::uint8_t a = 0; a < 4; ++a) {
            for (std::uint8_t b = 0; b < 4; ++b) {
                const auto alt = pq::decode(cb, pq::PqCode{a, b});
                const float err = euclidean_sq(ds.row(i), VectorView(alt));
                CHECK(best_err <= err * (1.0f + 1e-5f));
            }
        }
    }
}

TEST_CASE("ADC lookup equals distance to the decoded landmark") {
    VectorDataset ds = make_normal_dataset(500, 12, 8);
    pq::PqParams params;
    params.m = 3; // uneven split: 4,4,4
    params.c = 32;
    params.kmeans_iters = 10;
    const auto cb = pq::train(ds, params);
    VectorDataset qs = make_normal_dataset(20, 12, 9);
    std::mt19937_64 rng(10);
    for (std::size_t qi = 0; qi < qs.count; ++qi) {
        const auto table = pq::build_distance_table(cb, qs.row(qi));
        for (int trial = 0; trial < 20; ++trial) {
            const auto code = pq::encode(cb, ds.row(rng() % ds.count));
            const float via_table = pq::adc_lookup(table, code);
            const auto l = pq::decode(cb, code);
            const float direct = euclidean_sq(qs.row(qi), VectorView(l));
            CHECK_THAT(via_table, Catch::Matchers::WithinRel(direct, 1e-3f));
        }
    }
}

TEST_CASE("distance table trivial cases") {
    VectorDataset ds = make_normal_dataset(100, 4, 12);
    pq::PqParams params;
    params.m = 1;
    params.c = 8;
    params.kmeans_iters = 10;
    const auto cb = pq::train(ds, params);

    SECTION("m=1 table is the plain squared distance to each centroid") {
        const auto table = pq::build_distance_table(cb, ds.row(0));
        for (std::size_t c = 0; c < cb.c(); ++c) {
            const float direct = euclidean_sq(ds.row(0).data(), cb.centroid(0, c), 4);
            CHECK(table.at(0, c) == direct);
        }
    }

    SECTION("query equal to a centroid attains zero") {
        VectorView c0(cb.centroid(0, 3), 4);
        const auto table = pq::build_distance_table(cb, c0);
        CHECK(table.at(0, 3) == 0.0f);
        CHECK(pq::adc_lookup(table, pq::PqCode{3}) == 0.0f);
    }

    SECTION("adc of hand-filled table sums entries") {
        pq::DistanceTable t;
        t.m = 2;
        t.c = 2;
        t.entries = {0.0f, 4.0f, 9.0f, 0.0f};
        CHECK(pq::adc_lookup(t, pq::PqCode{1, 0}) == 13.0f);
    }
}

TEST_CASE("training is deterministic given the seed") {
    VectorDataset ds = make_normal_dataset(300, 8, 55);
    pq::PqParams params;
    params.m = 2;
    params.c = 16;
    params.kmeans_iters = 12;
    params.seed = 99;
    const auto cb1 = pq::train(ds, params);
    const auto cb2 = pq::train(ds, params);
    CHECK(cb1.centroids == cb2.centroids); // bit-for-bit
}

TEST_CASE("codebook serialization round trip") {
    VectorDataset ds = make_normal_dataset(200, 10, 14);
    pq::PqParams params;
    params.m = 3;
    params.c = 8;
    params.kmeans_iters = 8;
    const auto cb = pq::train(ds, params);
    const auto path = testutil::temp_path("codebook") + ".bin";
    {
        auto out = detail::open_output(path);
        pq::save_codebook(out, cb);
    }
    auto in = detail::open_input(path);
    const auto back = pq::load_codebook(in);
    CHECK(back.dim == cb.dim);
    CHECK(back.sub_dims == cb.sub_dims);
    CHECK(back.centroids == cb.centroids);
    CHECK(back.training_mse == cb.training_mse);
}
