#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "trimsearch/core/distance.hpp"
#include "trimsearch/core/parallel.hpp"

namespace trimsearch::pq {

struct KMeansResult {
    std::size_t k = 0;
    std::size_t dim = 0;
    std::vector<float> centroids;       // k * dim
    std::vector<std::uint32_t> assign;  // n
    std::vector<double> sse_per_iter;   // within-cluster SSE after each update

    const float* centroid(std::size_t c) const { return centroids.data() + c * dim; }
};

namespace detail {

inline std::uint32_t nearest_centroid(const float* x, const std::vector<float>& centroids,
                                      std::size_t k, std::size_t dim, float* best_out = nullptr) {
    std::uint32_t best = 0;
    float best_d = std::numeric_limits<float>::max();
    for (std::size_t c = 0; c < k; ++c) {
        const float d = euclidean_sq(x, centroids.data() + c * dim, dim);
        if (d < best_d) { // ties keep the lowest index
            best_d = d;
            best = static_cast<std::uint32_t>(c);
        }
    }
    if (best_out)
        *best_out = best_d;
    return best;
}

// k-means++ seeding: first centroid uniform, the rest D^2-weighted.
inline std::vector<float> kmeanspp_init(const float* data, std::size_t n, std::size_t dim,
                                        std::size_t k, std::mt19937_64& rng) {
    std::vector<float> centroids(k * dim);
    std::uniform_int_distribution<std::size_t> uni(0, n - 1);
    const std::size_t first = uni(rng);
    std::copy_n(data + first * dim, dim, centroids.begin());

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i)
        d2[i] = euclidean_sq(data + i * dim, centroids.data(), dim);

    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (double v : d2)
            total += v;
        std::size_t chosen;
        if (total <= 0.0) {
            chosen = uni(rng); // all mass collapsed; fall back to uniform
        } else {
            std::uniform_real_distribution<double> ud(0.0, total);
            double target = ud(rng);
            chosen = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                target -= d2[i];
                if (target <= 0.0) {
                    chosen = i;
                    break;
                }
            }
        }
        float* dst = centroids.data() + c * dim;
        std::copy_n(data + chosen * dim, dim, dst);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = euclidean_sq(data + i * dim, dst, dim);
            d2[i] = std::min(d2[i], d);
        }
    }
    return centroids;
}

} // namespace detail

/// Lloyd iterations with k-means++ seeding. Deterministic for a given seed and
/// any worker count. Empty clusters are repaired by moving in the point
/// currently farthest from its centroid.
inline KMeansResult kmeans(const float* data, std::size_t n, std::size_t dim, std::size_t k,
                           std::size_t iters, std::uint64_t seed) {
    if (k == 0 || n < k)
        throw std::invalid_argument("kmeans: need at least k training points");
    KMeansResult res;
    res.k = k;
    res.dim = dim;
    std::mt19937_64 rng(seed);
    res.centroids = detail::kmeanspp_init(data, n, dim, k, rng);
    res.assign.assign(n, 0);

    std::vector<float> point_dist(n, 0.0f);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t it = 0; it < iters; ++it) {
        parallel_for(n, [&](std::size_t i) {
            res.assign[i] =
                detail::nearest_centroid(data + i * dim, res.centroids, k, dim, &point_dist[i]);
        });

        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::size_t i = 0; i < n; ++i)
            ++sizes[res.assign[i]];

        // Repair empty clusters before the update so every centroid stays live.
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0)
                continue;
            std::size_t worst = 0;
            float worst_d = -1.0f;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[res.assign[i]] > 1 && point_dist[i] > worst_d) {
                    worst_d = point_dist[i];
                    worst = i;
                }
            }
            --sizes[res.assign[worst]];
            res.assign[worst] = static_cast<std::uint32_t>(c);
            sizes[c] = 1;
            point_dist[worst] = 0.0f;
        }

        std::vector<double> sums(k * dim, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const float* x = data + i * dim;
            double* s = sums.data() + res.assign[i] * dim;
            for (std::size_t j = 0; j < dim; ++j)
                s[j] += x[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            float* dst = res.centroids.data() + c * dim;
            const double inv = 1.0 / static_cast<double>(sizes[c]);
            for (std::size_t j = 0; j < dim; ++j)
                dst[j] = static_cast<float>(sums[c * dim + j] * inv);
        }

        double sse = 0.0;
        parallel_for(n, [&](std::size_t i) {
            point_dist[i] = euclidean_sq(data + i * dim,
                                         res.centroids.data() + res.assign[i] * dim, dim);
        });
        for (std::size_t i = 0; i < n; ++i)
            sse += point_dist[i];
        res.sse_per_iter.push_back(sse);
    }

    parallel_for(n, [&](std::size_t i) {
        res.assign[i] = detail::nearest_centroid(data + i * dim, res.centroids, k, dim);
    });
    return res;
}

} // namespace trimsearch::pq
