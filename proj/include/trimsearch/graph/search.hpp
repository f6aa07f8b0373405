#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "trimsearch/core/counters.hpp"
#include "trimsearch/core/dataset.hpp"
#include "trimsearch/core/distance.hpp"
#include "trimsearch/core/ground_truth.hpp"
#include "trimsearch/graph/hnsw.hpp"
#include "trimsearch/pq/pq.hpp"
#include "trimsearch/trim/calibration.hpp"
#include "trimsearch/trim/landmarks.hpp"
#include "trimsearch/trim/lower_bound.hpp"

namespace trimsearch::graph {

struct SearchResult {
    std::vector<std::uint32_t> ids;
    std::vector<float> dist_sq;
    SearchCounters counters;
};

namespace detail_search {

constexpr float kInf = std::numeric_limits<float>::infinity();

using MinHeap = std::priority_queue<ScoredId, std::vector<ScoredId>, std::greater<ScoredId>>;
using MaxHeap = std::priority_queue<ScoredId>;

// Greedy descent through the upper layers; returns the level-0 entry and its
// exact squared distance. Every exact computation is counted.
inline ScoredId descend_to_level0(const GraphIndex& g, const VectorDataset& ds, VectorView q,
                                  SearchCounters& c) {
    std::uint32_t cur = g.entry;
    float cur_d = euclidean_sq(q.data(), ds.row(cur).data(), ds.dim);
    ++c.dc;
    ++c.evaluated;
    for (std::size_t lvl = g.max_level; lvl > 0; --lvl) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::uint32_t v : g.neighbors(lvl, cur)) {
                const float d = euclidean_sq(q.data(), ds.row(v).data(), ds.dim);
                ++c.dc;
                ++c.evaluated;
                if (d < cur_d || (d == cur_d && v < cur)) {
                    cur_d = d;
                    cur = v;
                    changed = true;
                }
            }
        }
    }
    return {cur_d, cur};
}

inline SearchResult collect_sorted(MaxHeap r, SearchCounters counters) {
    std::vector<ScoredId> tmp;
    tmp.reserve(r.size());
    while (!r.empty()) {
        tmp.push_back(r.top());
        r.pop();
    }
    std::sort(tmp.begin(), tmp.end());
    SearchResult out;
    out.counters = counters;
    out.ids.reserve(tmp.size());
    out.dist_sq.reserve(tmp.size());
    for (const auto& s : tmp) {
        out.ids.push_back(s.id);
        out.dist_sq.push_back(s.dist_sq);
    }
    return out;
}

} // namespace detail_search

/// Standard best-first search: every visited neighbor gets an exact distance.
inline SearchResult search_baseline_knn(const GraphIndex& g, const VectorDataset& ds,
                                        VectorView q, std::size_t k, std::size_t ef) {
    using namespace detail_search;
    if (k == 0 || k > ef)
        throw std::invalid_argument("search_baseline_knn: need 1 <= k <= ef");
    if (g.count == 0)
        throw std::invalid_argument("search_baseline_knn: empty graph");

    SearchCounters counters;
    const ScoredId entry = descend_to_level0(g, ds, q, counters);

    std::vector<char> visited(g.count, 0);
    visited[entry.id] = 1;
    MinHeap cand;
    MaxHeap top; // candidate queue of size ef, worst on top
    cand.push(entry);
    top.push(entry);

    while (!cand.empty()) {
        const ScoredId cur = cand.top();
        if (top.size() == ef && cur.dist_sq > top.top().dist_sq)
            break;
        cand.pop();
        ++counters.hops;
        for (std::uint32_t v : g.neighbors(0, cur.id)) {
            if (visited[v])
                continue;
            visited[v] = 1;
            const float d = euclidean_sq(q.data(), ds.row(v).data(), ds.dim);
            ++counters.dc;
            ++counters.evaluated;
            if (top.size() < ef || ScoredId{d, v} < top.top()) {
                cand.push({d, v});
                top.push({d, v});
                if (top.size() > ef)
                    top.pop();
            }
        }
    }

    while (top.size() > k)
        top.pop();
    return collect_sorted(std::move(top), counters);
}

/// Baseline range search: best-first with exact distances everywhere, result
/// queue unbounded, same termination rule as the kNN search.
inline SearchResult search_baseline_range(const GraphIndex& g, const VectorDataset& ds,
                                          VectorView q, float radius, std::size_t ef) {
    using namespace detail_search;
    if (radius < 0.0f)
        throw std::invalid_argument("search_baseline_range: negative radius");
    const float radius_sq = radius * radius;

    SearchCounters counters;
    const ScoredId entry = descend_to_level0(g, ds, q, counters);

    std::vector<char> visited(g.count, 0);
    visited[entry.id] = 1;
    MinHeap cand;
    MaxHeap top;
    cand.push(entry);
    top.push(entry);
    std::vector<ScoredId> results;
    if (entry.dist_sq <= radius_sq)
        results.push_back(entry);

    while (!cand.empty()) {
        const ScoredId cur = cand.top();
        if (top.size() == ef && cur.dist_sq > top.top().dist_sq)
            break;
        cand.pop();
        ++counters.hops;
        for (std::uint32_t v : g.neighbors(0, cur.id)) {
            if (visited[v])
                continue;
            visited[v] = 1;
            const float d = euclidean_sq(q.data(), ds.row(v).data(), ds.dim);
            ++counters.dc;
            ++counters.evaluated;
            if (d <= radius_sq)
                results.push_back({d, v});
            if (top.size() < ef || ScoredId{d, v} < top.top()) {
                cand.push({d, v});
                top.push({d, v});
                if (top.size() > ef)
                    top.pop();
            }
        }
    }

    std::sort(results.begin(), results.end());
    SearchResult out;
    out.counters = counters;
    for (const auto& s : results) {
        out.ids.push_back(s.id);
        out.dist_sq.push_back(s.dist_sq);
    }
    return out;
}

/// Graph kNN with relaxed-lower-bound pruning. The search queue S is ordered
/// by bound, the candidate queue C by hybrid key (exact where known, bound
/// otherwise), the result queue R by exact distance only.
inline SearchResult search_trim_knn(const GraphIndex& g, const VectorDataset& ds,
                                    const trim::LandmarkStore& lm,
                                    const trim::PruningProfile& profile, VectorView q,
                                    std::size_t k, std::size_t ef) {
    using namespace detail_search;
    if (k == 0 || k > ef)
        throw std::invalid_argument("search_trim_knn: need 1 <= k <= ef");
    if (!profile.calibrated())
        throw std::invalid_argument("search_trim_knn: uncalibrated pruning profile");
    if (lm.count != ds.count)
        throw std::invalid_argument("search_trim_knn: landmark store size mismatch");
    const float gamma = static_cast<float>(profile.gamma);

    SearchCounters counters;
    const pq::DistanceTable table = pq::build_distance_table(lm.codebook, q);
    const ScoredId entry = descend_to_level0(g, ds, q, counters);

    std::vector<char> visited(g.count, 0);
    visited[entry.id] = 1;

    MinHeap search_q; // S: keyed by bound, unbounded
    MaxHeap cand;     // C: hybrid keys, capacity ef
    MaxHeap result;   // R: exact keys, capacity k

    const float entry_glq = std::sqrt(pq::adc_lookup(table, lm.code(entry.id)));
    ++counters.edc;
    search_q.push({trim::relaxed_lb(entry_glq, lm.lx_dist[entry.id], gamma), entry.id});
    cand.push(entry);
    result.push(entry);

    float max_dis = result.size() == k ? result.top().dist_sq : kInf;
    float max_can_dis = cand.size() == ef ? cand.top().dist_sq : kInf;

    while (!search_q.empty()) {
        const ScoredId cur = search_q.top();
        search_q.pop();
        if (cand.size() == ef && cur.dist_sq > max_can_dis)
            break;
        ++counters.hops;
        for (std::uint32_t v : g.neighbors(0, cur.id)) {
            if (visited[v])
                continue;
            visited[v] = 1;
            ++counters.evaluated;
            const float glq = std::sqrt(pq::adc_lookup(table, lm.code(v)));
            ++counters.edc;
            const float plb = trim::relaxed_lb(glq, lm.lx_dist[v], gamma);
            if (cand.size() < ef || plb < max_dis) {
                const float d = euclidean_sq(q.data(), ds.row(v).data(), ds.dim);
                ++counters.dc;
                search_q.push({plb, v});
                cand.push({d, v});
                if (cand.size() > ef)
                    cand.pop();
                if (cand.size() == ef)
                    max_can_dis = cand.top().dist_sq;
                result.push({d, v});
                if (result.size() > k)
                    result.pop();
                if (result.size() == k)
                    max_dis = result.top().dist_sq;
            } else {
                ++counters.pruned;
                if (plb < max_can_dis) {
                    search_q.push({plb, v});
                    cand.push({plb, v});
                    if (cand.size() > ef)
                        cand.pop();
                    if (cand.size() == ef)
                        max_can_dis = cand.top().dist_sq;
                }
            }
        }
    }

    return collect_sorted(std::move(result), counters);
}

/// Graph range search with relaxed-bound pruning: exact distances only when
/// the candidate queue is not full or the bound is within the radius.
inline SearchResult search_trim_range(const GraphIndex& g, const VectorDataset& ds,
                                      const trim::LandmarkStore& lm,
                                      const trim::PruningProfile& profile, VectorView q,
                                      float radius, std::size_t ef) {
    using namespace detail_search;
    if (radius < 0.0f)
        throw std::invalid_argument("search_trim_range: negative radius");
    if (!profile.calibrated())
        throw std::invalid_argument("search_trim_range: uncalibrated pruning profile");
    const float gamma = static_cast<float>(profile.gamma);
    const float radius_sq = radius * radius;

    SearchCounters counters;
    const pq::DistanceTable table = pq::build_distance_table(lm.codebook, q);
    const ScoredId entry = descend_to_level0(g, ds, q, counters);

    std::vector<char> visited(g.count, 0);
    visited[entry.id] = 1;

    MinHeap search_q;
    MaxHeap cand;
    std::vector<ScoredId> results;

    const float entry_glq = std::sqrt(pq::adc_lookup(table, lm.code(entry.id)));
    ++counters.edc;
    search_q.push({trim::relaxed_lb(entry_glq, lm.lx_dist[entry.id], gamma), entry.id});
    cand.push(entry);
    if (entry.dist_sq <= radius_sq)
        results.push_back(entry);

    float max_can_dis = cand.size() == ef ? cand.top().dist_sq : kInf;

    while (!search_q.empty()) {
        const ScoredId cur = search_q.top();
        search_q.pop();
        if (cand.size() == ef && cur.dist_sq > max_can_dis)
            break;
        ++counters.hops;
        for (std::uint32_t v : g.neighbors(0, cur.id)) {
            if (visited[v])
                continue;
            visited[v] = 1;
            ++counters.evaluated;
            const float glq = std::sqrt(pq::adc_lookup(table, lm.code(v)));
            ++counters.edc;
            const float plb = trim::relaxed_lb(glq, lm.lx_dist[v], gamma);
            if (cand.size() < ef || plb <= radius_sq) {
                const float d = euclidean_sq(q.data(), ds.row(v).data(), ds.dim);
                ++counters.dc;
                if (d <= radius_sq)
                    results.push_back({d, v});
                search_q.push({plb, v});
                cand.push({d, v});
                if (cand.size() > ef)
                    cand.pop();
                if (cand.size() == ef)
                    max_can_dis = cand.top().dist_sq;
            } else {
                ++counters.pruned;
                if (plb < max_can_dis) {
                    search_q.push({plb, v});
                    cand.push({plb, v});
                    if (cand.size() > ef)
                        cand.pop();
                    if (cand.size() == ef)
                        max_can_dis = cand.top().dist_sq;
                }
            }
        }
    }

    std::sort(results.begin(), results.end());
    SearchResult out;
    out.counters = counters;
    for (const auto& s : results) {
        out.ids.push_back(s.id);
        out.dist_sq.push_back(s.dist_sq);
    }
    return out;
}

} // namespace trimsearch::graph
