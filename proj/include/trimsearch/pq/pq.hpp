#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "trimsearch/core/dataset.hpp"
#include "trimsearch/core/distance.hpp"
#include "trimsearch/core/io_util.hpp"
#include "trimsearch/pq/kmeans.hpp"

namespace trimsearch::pq {

using PqCode = std::vector<std::uint8_t>;

struct PqParams {
    std::size_t m = 8;            // subspaces
    std::size_t c = 256;          // centroids per subspace; byte codes require c <= 256
    std::size_t kmeans_iters = 25;
    std::uint64_t seed = 1;
    std::size_t train_sample = 0; // 0 -> min(n, 100*c) rows per training pass

    void validate(std::size_t dim) const {
        if (m == 0 || m > dim)
            throw std::invalid_argument("PqParams: need 1 <= m <= dim");
        if (c == 0 || c > 256)
            throw std::invalid_argument("PqParams: need 1 <= c <= 256 for byte codes");
        if (kmeans_iters == 0)
            throw std::invalid_argument("PqParams: kmeans_iters must be positive");
    }
};

/// Per-subspace k-means codebooks. When m does not divide d the first
/// (d mod m) subspaces carry one extra coordinate.
struct PqCodebook {
    PqParams params;
    std::size_t dim = 0;
    std::vector<std::size_t> sub_dims;    // m entries summing to dim
    std::vector<std::size_t> sub_offsets; // m entries, coordinate offsets
    std::vector<std::vector<float>> centroids; // per subspace: c * sub_dims[j]
    double training_mse = 0.0;            // mean squared reconstruction error on the training rows

    std::size_t m() const { return params.m; }
    std::size_t c() const { return params.c; }

    const float* centroid(std::size_t j, std::size_t i) const {
        return centroids[j].data() + i * sub_dims[j];
    }
};

inline std::vector<std::size_t> split_sub_dims(std::size_t dim, std::size_t m) {
    std::vector<std::size_t> sub(m, dim / m);
    for (std::size_t j = 0; j < dim % m; ++j)
        ++sub[j];
    return sub;
}

/// Trains per-subspace codebooks. Deterministic for a given seed; when the
/// dataset exceeds params.train_sample a seeded uniform row sample is used.
inline PqCodebook train(const VectorDataset& ds, const PqParams& params) {
    params.validate(ds.dim);
    std::size_t sample_n = params.train_sample;
    if (sample_n == 0)
        sample_n = std::min(ds.count, 100 * params.c);
    sample_n = std::min(sample_n, ds.count);
    if (sample_n < params.c)
        throw std::invalid_argument("pq::train: need at least c training rows");

    std::vector<std::size_t> rows(ds.count);
    std::iota(rows.begin(), rows.end(), 0);
    if (sample_n < ds.count) {
        std::mt19937_64 rng(params.seed ^ 0x9e3779b97f4a7c15ull);
        for (std::size_t i = 0; i < sample_n; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, ds.count - 1);
            std::swap(rows[i], rows[pick(rng)]);
        }
        rows.resize(sample_n);
    }

    PqCodebook cb;
    cb.params = params;
    cb.dim = ds.dim;
    cb.sub_dims = split_sub_dims(ds.dim, params.m);
    cb.sub_offsets.resize(params.m);
    std::size_t off = 0;
    for (std::size_t j = 0; j < params.m; ++j) {
        cb.sub_offsets[j] = off;
        off += cb.sub_dims[j];
    }
    cb.centroids.resize(params.m);

    double total_sse = 0.0;
    std::vector<float> slice;
    for (std::size_t j = 0; j < params.m; ++j) {
        const std::size_t sd = cb.sub_dims[j];
        slice.resize(sample_n * sd);
        for (std::size_t i = 0; i < sample_n; ++i) {
            const float* src = ds.data.data() + rows[i] * ds.dim + cb.sub_offsets[j];
            std::copy_n(src, sd, slice.data() + i * sd);
        }
        KMeansResult km = kmeans(slice.data(), sample_n, sd, params.c, params.kmeans_iters,
                                 params.seed + 0x51edull * j);
        cb.centroids[j] = std::move(km.centroids);
        total_sse += km.sse_per_iter.empty() ? 0.0 : km.sse_per_iter.back();
    }
    cb.training_mse = total_sse / static_cast<double>(sample_n);
    return cb;
}

/// Nearest centroid per subspace (squared Euclidean, ties to lowest index).
inline PqCode encode(const PqCodebook& cb, VectorView x) {
    if (x.size() != cb.dim)
        throw std::invalid_argument("pq::encode: dimension mismatch");
    PqCode code(cb.m());
    for (std::size_t j = 0; j < cb.m(); ++j) {
        const float* xs = x.data() + cb.sub_offsets[j];
        std::uint32_t best = 0;
        float best_d = std::numeric_limits<float>::max();
        for (std::size_t i = 0; i < cb.c(); ++i) {
            const float d = euclidean_sq(xs, cb.centroid(j, i), cb.sub_dims[j]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<std::uint32_t>(i);
            }
        }
        code[j] = static_cast<std::uint8_t>(best);
    }
    return code;
}

/// Concatenation of the selected centroids: the landmark vector for `code`.
inline std::vector<float> decode(const PqCodebook& cb, const PqCode& code) {
    if (code.size() != cb.m())
        throw std::invalid_argument("pq::decode: code length mismatch");
    std::vector<float> out(cb.dim);
    for (std::size_t j = 0; j < cb.m(); ++j) {
        if (code[j] >= cb.c())
            throw std::invalid_argument("pq::decode: centroid index out of range");
        std::copy_n(cb.centroid(j, code[j]), cb.sub_dims[j], out.data() + cb.sub_offsets[j]);
    }
    return out;
}

/// Squared distances from the query's subspace slices to every centroid.
struct DistanceTable {
    std::size_t m = 0;
    std::size_t c = 0;
    std::vector<float> entries; // m * c

    float at(std::size_t j, std::size_t i) const { return entries[j * c + i]; }
};

inline DistanceTable build_distance_table(const PqCodebook& cb, VectorView q) {
    if (q.size() != cb.dim)
        throw std::invalid_argument("pq::build_distance_table: dimension mismatch");
    DistanceTable t;
    t.m = cb.m();
    t.c = cb.c();
    t.entries.resize(t.m * t.c);
    for (std::size_t j = 0; j < t.m; ++j) {
        const float* qs = q.data() + cb.sub_offsets[j];
        float* row = t.entries.data() + j * t.c;
        for (std::size_t i = 0; i < t.c; ++i)
            row[i] = euclidean_sq(qs, cb.centroid(j, i), cb.sub_dims[j]);
    }
    return t;
}

/// Γ(l, q)^2 for the landmark decoded from `code`; exact because the landmark
/// is a concatenation of centroids.
inline float adc_lookup(const DistanceTable& t, const PqCode& code) {
    if (code.size() != t.m)
        throw std::invalid_argument("pq::adc_lookup: code length mismatch");
    float acc = 0.0f;
    const float* e = t.entries.data();
    for (std::size_t j = 0; j < t.m; ++j)
        acc += e[j * t.c + code[j]];
    return acc;
}

inline float adc_lookup(const DistanceTable& t, const std::uint8_t* code) {
    float acc = 0.0f;
    const float* e = t.entries.data();
    for (std::size_t j = 0; j < t.m; ++j)
        acc += e[j * t.c + code[j]];
    return acc;
}

inline void save_codebook(std::ostream& out, const PqCodebook& cb) {
    trimsearch::detail::write_le(out, static_cast<std::uint32_t>(cb.m()));
    trimsearch::detail::write_le(out, static_cast<std::uint32_t>(cb.c()));
    trimsearch::detail::write_le(out, static_cast<std::uint32_t>(cb.dim));
    for (std::size_t j = 0; j < cb.m(); ++j)
        trimsearch::detail::write_le(out, static_cast<std::uint32_t>(cb.sub_dims[j]));
    for (std::size_t j = 0; j < cb.m(); ++j)
        trimsearch::detail::write_le_array(out, cb.centroids[j].data(), cb.centroids[j].size());
    trimsearch::detail::write_le(out, cb.training_mse);
    trimsearch::detail::write_le(out, cb.params.seed);
    trimsearch::detail::write_le(out, static_cast<std::uint32_t>(cb.params.kmeans_iters));
}

inline PqCodebook load_codebook(std::istream& in) {
    PqCodebook cb;
    cb.params.m = trimsearch::detail::read_le_or_throw<std::uint32_t>(in, "codebook m");
    cb.params.c = trimsearch::detail::read_le_or_throw<std::uint32_t>(in, "codebook c");
    cb.dim = trimsearch::detail::read_le_or_throw<std::uint32_t>(in, "codebook dim");
    cb.sub_dims.resize(cb.params.m);
    for (auto& sd : cb.sub_dims)
        sd = trimsearch::detail::read_le_or_throw<std::uint32_t>(in, "codebook sub_dim");
    if (std::accumulate(cb.sub_dims.begin(), cb.sub_dims.end(), std::size_t{0}) != cb.dim)
        throw DataError("codebook sub_dims do not sum to dim");
    cb.sub_offsets.resize(cb.params.m);
    std::size_t off = 0;
    for (std::size_t j = 0; j < cb.params.m; ++j) {
        cb.sub_offsets[j] = off;
        off += cb.sub_dims[j];
    }
    cb.centroids.resize(cb.params.m);
    for (std::size_t j = 0; j < cb.params.m; ++j) {
        cb.centroids[j].resize(cb.params.c * cb.sub_dims[j]);
        trimsearch::detail::read_le_array_or_throw(in, cb.centroids[j].data(), cb.centroids[j].size(),
                                       "codebook centroids");
    }
    cb.training_mse = trimsearch::detail::read_le_or_throw<double>(in, "codebook mse");
    cb.params.seed = trimsearch::detail::read_le_or_throw<std::uint64_t>(in, "codebook seed");
    cb.params.kmeans_iters = trimsearch::detail::read_le_or_throw<std::uint32_t>(in, "codebook iters");
    return cb;
}

} // namespace trimsearch::pq
