#pragma once

#include <cstdint>
#include <random>

#include "trimsearch/core/dataset.hpp"

namespace trimsearch {

/// i.i.d. standard-normal rows. Deterministic for a given seed.
inline VectorDataset make_normal_dataset(std::size_t n, std::size_t dim, std::uint64_t seed) {
    VectorDataset ds(dim, n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> dist(0.0f, 1.0f);
    for (auto& v : ds.data)
        v = dist(rng);
    return ds;
}

/// Gaussian blobs around `centers` rows; each row is assigned round-robin.
inline VectorDataset make_blob_dataset(const VectorDataset& centers, std::size_t n,
                                       float sigma, std::uint64_t seed) {
    VectorDataset ds(centers.dim, n);
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> noise(0.0f, sigma);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = centers.row(i % centers.count);
        float* r = ds.mutable_row(i);
        for (std::size_t j = 0; j < ds.dim; ++j)
            r[j] = c[j] + noise(rng);
    }
    return ds;
}

} // namespace trimsearch
