#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "trimsearch/core/dataset.hpp"
#include "trimsearch/core/distance.hpp"
#include "trimsearch/core/parallel.hpp"
#include "trimsearch/core/vecs_io.hpp"

namespace trimsearch {

/// Exact answers for a batch of queries: per-query id lists (sorted ascending
/// by squared distance, ties by ascending id) plus the squared distances.
struct GroundTruth {
    std::vector<std::vector<std::uint32_t>> ids;
    std::vector<std::vector<float>> dist_sq;

    void save(const std::string& ids_path, const std::string& dist_path) const {
        write_ivecs(ids_path, ids);
        write_fvecs_rows(dist_path, dist_sq);
    }

    static GroundTruth load(const std::string& ids_path, const std::string& dist_path) {
        GroundTruth gt;
        gt.ids = load_ivecs_rows(ids_path);
        gt.dist_sq = load_fvecs_rows(dist_path);
        if (gt.ids.size() != gt.dist_sq.size())
            throw DataError("ground truth id/distance files disagree on query count");
        return gt;
    }
};

/// One result entry: squared distance plus id, ordered ascending with ties
/// broken by ascending id. This ordering is used everywhere results are ranked.
struct ScoredId {
    float dist_sq;
    std::uint32_t id;

    bool operator<(const ScoredId& o) const {
        if (dist_sq != o.dist_sq)
            return dist_sq < o.dist_sq;
        return id < o.id;
    }
    bool operator>(const ScoredId& o) const { return o < *this; }
    bool operator==(const ScoredId& o) const { return dist_sq == o.dist_sq && id == o.id; }
};

/// Exact k nearest ids of q, sorted ascending by squared distance, ties by id.
inline std::vector<ScoredId> brute_force_knn(const VectorDataset& ds, VectorView q,
                                             std::size_t k) {
    if (q.size() != ds.dim)
        throw std::invalid_argument("brute_force_knn: dimension mismatch");
    if (k == 0 || k > ds.count)
        throw std::invalid_argument("brute_force_knn: k out of range");
    std::vector<ScoredId> heap; // max-heap on ScoredId ordering, worst on top
    heap.reserve(k + 1);
    for (std::size_t i = 0; i < ds.count; ++i) {
        const float d = euclidean_sq(q.data(), ds.data.data() + i * ds.dim, ds.dim);
        const ScoredId cand{d, static_cast<std::uint32_t>(i)};
        if (heap.size() < k) {
            heap.push_back(cand);
            std::push_heap(heap.begin(), heap.end());
        } else if (cand < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = cand;
            std::push_heap(heap.begin(), heap.end());
        }
    }
    std::sort_heap(heap.begin(), heap.end());
    return heap;
}

/// Exact set of ids with Γ(v,q) <= radius (plain, non-squared radius).
inline std::vector<ScoredId> brute_force_range(const VectorDataset& ds, VectorView q,
                                               float radius) {
    if (q.size() != ds.dim)
        throw std::invalid_argument("brute_force_range: dimension mismatch");
    if (radius < 0.0f)
        throw std::invalid_argument("brute_force_range: negative radius");
    const float r_sq = radius * radius;
    std::vector<ScoredId> out;
    for (std::size_t i = 0; i < ds.count; ++i) {
        const float d = euclidean_sq(q.data(), ds.data.data() + i * ds.dim, ds.dim);
        if (std::sqrt(d) <= radius || d <= r_sq)
            out.push_back({d, static_cast<std::uint32_t>(i)});
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Batch kNN ground truth; queries are processed in parallel, output order is
/// deterministic regardless of worker count.
inline GroundTruth ground_truth_knn(const VectorDataset& ds, const VectorDataset& queries,
                                    std::size_t k) {
    GroundTruth gt;
    gt.ids.resize(queries.count);
    gt.dist_sq.resize(queries.count);
    parallel_for(queries.count, [&](std::size_t qi) {
        auto res = brute_force_knn(ds, queries.row(qi), k);
        auto& ids = gt.ids[qi];
        auto& d = gt.dist_sq[qi];
        ids.reserve(res.size());
        d.reserve(res.size());
        for (const auto& s : res) {
            ids.push_back(s.id);
            d.push_back(s.dist_sq);
        }
    });
    return gt;
}

inline GroundTruth ground_truth_range(const VectorDataset& ds, const VectorDataset& queries,
                                      float radius) {
    GroundTruth gt;
    gt.ids.resize(queries.count);
    gt.dist_sq.resize(queries.count);
    parallel_for(queries.count, [&](std::size_t qi) {
        auto res = brute_force_range(ds, queries.row(qi), radius);
        auto& ids = gt.ids[qi];
        auto& d = gt.dist_sq[qi];
        for (const auto& s : res) {
            ids.push_back(s.id);
            d.push_back(s.dist_sq);
        }
    });
    return gt;
}

} // namespace trimsearch
