#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

#include "trimsearch/core/counters.hpp"
#include "trimsearch/core/dataset.hpp"
#include "trimsearch/core/distance.hpp"
#include "trimsearch/core/ground_truth.hpp"
#include "trimsearch/disksim/block_store.hpp"
#include "trimsearch/disksim/layout.hpp"
#include "trimsearch/disksim/lru.hpp"
#include "trimsearch/pq/pq.hpp"
#include "trimsearch/trim/calibration.hpp"
#include "trimsearch/trim/landmarks.hpp"
#include "trimsearch/trim/lower_bound.hpp"

namespace trimsearch::disksim {

struct IoCounters {
    std::uint64_t neighbor_block_reads = 0;
    std::uint64_t data_block_reads = 0;
    std::uint64_t cache_hits = 0;

    std::uint64_t total_reads() const { return neighbor_block_reads + data_block_reads; }

    IoCounters& operator+=(const IoCounters& o) {
        neighbor_block_reads += o.neighbor_block_reads;
        data_block_reads += o.data_block_reads;
        cache_hits += o.cache_hits;
        return *this;
    }
};

struct DiskResult {
    std::vector<std::uint32_t> ids;
    std::vector<float> dist_sq;
    SearchCounters counters;
    IoCounters io;
};

using AdjacencyCache = LruCache<std::uint32_t, std::vector<std::uint32_t>>;
using BlockPresenceCache = LruCache<std::uint32_t, char>;

namespace detail_disk {

// Bounded search queue ordered by ADC estimate: pop-min to expand, evict-max
// to hold at most ef entries.
class BoundedMinQueue {
  public:
    explicit BoundedMinQueue(std::size_t cap) : cap_(cap) {}

    bool empty() const { return set_.empty(); }

    ScoredId pop_min() {
        const ScoredId s = *set_.begin();
        set_.erase(set_.begin());
        return s;
    }

    void push(const ScoredId& s) {
        set_.insert(s);
        if (set_.size() > cap_)
            set_.erase(std::prev(set_.end()));
    }

  private:
    std::size_t cap_;
    std::set<ScoredId> set_;
};

// Fetches x's adjacency via the LRU cache; a miss reads the neighbor block
// and caches every resident adjacency list it contains.
inline std::vector<std::uint32_t> fetch_adjacency(const BlockLayout& lay, const BlockStore& store,
                                                  AdjacencyCache& cache, std::uint32_t x,
                                                  IoCounters& io,
                                                  std::vector<std::uint8_t>& buf) {
    if (const auto* adj = cache.get(x)) {
        ++io.cache_hits;
        return *adj;
    }
    const std::uint32_t nb = lay.node_block[x];
    store.read_block(lay.data_blocks.size() + nb, buf.data());
    ++io.neighbor_block_reads;
    ParsedBlock parsed = parse_neighbor_block(lay, nb, buf.data());
    std::vector<std::uint32_t> result;
    for (std::size_t i = 0; i < parsed.ids.size(); ++i) {
        if (parsed.ids[i] == x)
            result = parsed.adjacency[i];
        cache.put(parsed.ids[i], std::move(parsed.adjacency[i]));
    }
    return result;
}

} // namespace detail_disk

/// Algorithm-2 style disk kNN: navigate by ADC estimates, fetch adjacency from
/// neighbor blocks (LRU cached), and read a node's data block only when its
/// relaxed lower bound can still improve the result queue. Every read data
/// block is exact-refined wholesale.
inline DiskResult search_disk_knn(const BlockLayout& lay, const BlockStore& store,
                                  const trim::LandmarkStore& lm,
                                  const trim::PruningProfile& profile, VectorView q,
                                  std::size_t k, std::size_t ef, AdjacencyCache& cache,
                                  bool prune_data_blocks = true) {
    if (lay.kind != LayoutKind::Decoupled)
        throw std::invalid_argument("search_disk_knn: TRIM path requires the decoupled layout");
    if (k == 0 || k > ef)
        throw std::invalid_argument("search_disk_knn: need 1 <= k <= ef");
    if (!profile.calibrated())
        throw std::invalid_argument("search_disk_knn: uncalibrated pruning profile");
    if (q.size() != lay.dim)
        throw std::invalid_argument("search_disk_knn: dimension mismatch");
    const float gamma = static_cast<float>(profile.gamma);

    DiskResult res;
    const pq::DistanceTable table = pq::build_distance_table(lm.codebook, q);

    detail_disk::BoundedMinQueue search_q(ef);
    std::priority_queue<ScoredId> result; // size k, worst on top
    float max_dis = std::numeric_limits<float>::infinity();
    std::vector<char> visited(lay.count, 0);
    std::vector<char> block_read(lay.data_blocks.size(), 0);
    std::vector<std::uint8_t> buf(lay.block_size);

    const float entry_pq = pq::adc_lookup(table, lm.code(lay.entry));
    ++res.counters.edc;
    search_q.push({entry_pq, lay.entry});
    visited[lay.entry] = 1;

    while (!search_q.empty()) {
        const ScoredId cur = search_q.pop_min();
        ++res.counters.hops;

        const auto adj =
            detail_disk::fetch_adjacency(lay, store, cache, cur.id, res.io, buf);
        for (std::uint32_t v : adj) {
            if (visited[v])
                continue;
            visited[v] = 1;
            const float est = pq::adc_lookup(table, lm.code(v));
            ++res.counters.edc;
            search_q.push({est, v});
        }

        ++res.counters.evaluated;
        const float plb = trim::relaxed_lb(std::sqrt(cur.dist_sq), lm.lx_dist[cur.id], gamma);
        if (prune_data_blocks && result.size() == k && max_dis < plb) {
            ++res.counters.pruned;
            continue;
        }
        const std::uint32_t db = lay.vec_block[cur.id];
        if (block_read[db])
            continue; // residents were already refined
        block_read[db] = 1;
        store.read_block(db, buf.data());
        ++res.io.data_block_reads;
        const ParsedBlock parsed = parse_data_block(lay, db, buf.data());
        for (std::size_t i = 0; i < parsed.ids.size(); ++i) {
            const float d = euclidean_sq(q.data(), parsed.vectors[i].data(), lay.dim);
            ++res.counters.dc;
            const ScoredId cand{d, parsed.ids[i]};
            if (result.size() < k) {
                result.push(cand);
                if (result.size() == k)
                    max_dis = result.top().dist_sq;
            } else if (cand < result.top()) {
                result.pop();
                result.push(cand);
                max_dis = result.top().dist_sq;
            }
        }
    }

    std::vector<ScoredId> sorted;
    sorted.reserve(result.size());
    while (!result.empty()) {
        sorted.push_back(result.top());
        result.pop();
    }
    std::sort(sorted.begin(), sorted.end());
    for (const auto& s : sorted) {
        res.ids.push_back(s.id);
        res.dist_sq.push_back(s.dist_sq);
    }
    return res;
}

/// Range variant: unbounded result set, data block read iff the relaxed bound
/// is within the squared radius. Single pass, no re-enqueueing.
inline DiskResult search_disk_range(const BlockLayout& lay, const BlockStore& store,
                                    const trim::LandmarkStore& lm,
                                    const trim::PruningProfile& profile, VectorView q,
                                    float radius, std::size_t ef, AdjacencyCache& cache) {
    if (lay.kind != LayoutKind::Decoupled)
        throw std::invalid_argument("search_disk_range: TRIM path requires the decoupled layout");
    if (radius < 0.0f)
        throw std::invalid_argument("search_disk_range: negative radius");
    if (!profile.calibrated())
        throw std::invalid_argument("search_disk_range: uncalibrated pruning profile");
    const float gamma = static_cast<float>(profile.gamma);
    const float radius_sq = radius * radius;

    DiskResult res;
    const pq::DistanceTable table = pq::build_distance_table(lm.codebook, q);

    detail_disk::BoundedMinQueue search_q(ef);
    std::vector<ScoredId> results;
    std::vector<char> visited(lay.count, 0);
    std::vector<char> block_read(lay.data_blocks.size(), 0);
    std::vector<std::uint8_t> buf(lay.block_size);

    const float entry_pq = pq::adc_lookup(table, lm.code(lay.entry));
    ++res.counters.edc;
    search_q.push({entry_pq, lay.entry});
    visited[lay.entry] = 1;

    while (!search_q.empty()) {
        const ScoredId cur = search_q.pop_min();
        ++res.counters.hops;

        const auto adj =
            detail_disk::fetch_adjacency(lay, store, cache, cur.id, res.io, buf);
        for (std::uint32_t v : adj) {
            if (visited[v])
                continue;
            visited[v] = 1;
            const float est = pq::adc_lookup(table, lm.code(v));
            ++res.counters.edc;
            search_q.push({est, v});
        }

        ++res.counters.evaluated;
        const float plb = trim::relaxed_lb(std::sqrt(cur.dist_sq), lm.lx_dist[cur.id], gamma);
        if (plb > radius_sq) {
            ++res.counters.pruned;
            continue;
        }
        const std::uint32_t db = lay.vec_block[cur.id];
        if (block_read[db])
            continue;
        block_read[db] = 1;
        store.read_block(db, buf.data());
        ++res.io.data_block_reads;
        const ParsedBlock parsed = parse_data_block(lay, db, buf.data());
        for (std::size_t i = 0; i < parsed.ids.size(); ++i) {
            const float d = euclidean_sq(q.data(), parsed.vectors[i].data(), lay.dim);
            ++res.counters.dc;
            if (d <= radius_sq)
                results.push_back({d, parsed.ids[i]});
        }
    }

    std::sort(results.begin(), results.end());
    for (const auto& s : results) {
        res.ids.push_back(s.id);
        res.dist_sq.push_back(s.dist_sq);
    }
    return res;
}

/// Non-TRIM reference on the coupled layout: every expanded node costs one
/// coupled block fetch (cache deduplicated); the whole block is exact-refined
/// on first touch; ADC estimates steer the search queue.
inline DiskResult replay_baseline_disk(const BlockLayout& lay, const BlockStore& store,
                                       const trim::LandmarkStore& lm, VectorView q,
                                       std::size_t k, std::size_t ef,
                                       BlockPresenceCache& cache) {
    if (lay.kind != LayoutKind::Coupled)
        throw std::invalid_argument("replay_baseline_disk: requires the coupled layout");
    if (k == 0 || k > ef)
        throw std::invalid_argument("replay_baseline_disk: need 1 <= k <= ef");
    if (q.size() != lay.dim)
        throw std::invalid_argument("replay_baseline_disk: dimension mismatch");

    DiskResult res;
    const pq::DistanceTable table = pq::build_distance_table(lm.codebook, q);

    detail_disk::BoundedMinQueue search_q(ef);
    std::priority_queue<ScoredId> result;
    float max_dis = std::numeric_limits<float>::infinity();
    std::vector<char> visited(lay.count, 0);
    std::vector<char> block_refined(lay.data_blocks.size(), 0);
    std::vector<std::uint8_t> buf(lay.block_size);

    const float entry_pq = pq::adc_lookup(table, lm.code(lay.entry));
    ++res.counters.edc;
    search_q.push({entry_pq, lay.entry});
    visited[lay.entry] = 1;

    while (!search_q.empty()) {
        const ScoredId cur = search_q.pop_min();
        ++res.counters.hops;
        ++res.counters.evaluated;

        const std::uint32_t b = lay.vec_block[cur.id];
        if (cache.contains(b)) {
            ++res.io.cache_hits;
            cache.get(b); // refresh recency
        } else {
            ++res.io.data_block_reads;
            cache.put(b, 1);
        }
        store.read_block(b, buf.data()); // simulated fetch; counted above
        const ParsedBlock parsed = parse_data_block(lay, b, buf.data());

        for (std::size_t i = 0; i < parsed.ids.size(); ++i) {
            if (parsed.ids[i] != cur.id)
                continue;
            for (std::uint32_t v : parsed.adjacency[i]) {
                if (visited[v])
                    continue;
                visited[v] = 1;
                const float est = pq::adc_lookup(table, lm.code(v));
                ++res.counters.edc;
                search_q.push({est, v});
            }
            break;
        }

        if (!block_refined[b]) {
            block_refined[b] = 1;
            for (std::size_t i = 0; i < parsed.ids.size(); ++i) {
                const float d = euclidean_sq(q.data(), parsed.vectors[i].data(), lay.dim);
                ++res.counters.dc;
                const ScoredId cand{d, parsed.ids[i]};
                if (result.size() < k) {
                    result.push(cand);
                    if (result.size() == k)
                        max_dis = result.top().dist_sq;
                } else if (cand < result.top()) {
                    result.pop();
                    result.push(cand);
                    max_dis = result.top().dist_sq;
                }
            }
        }
        (void)max_dis;
    }

    std::vector<ScoredId> sorted;
    sorted.reserve(result.size());
    while (!result.empty()) {
        sorted.push_back(result.top());
        result.pop();
    }
    std::sort(sorted.begin(), sorted.end());
    for (const auto& s : sorted) {
        res.ids.push_back(s.id);
        res.dist_sq.push_back(s.dist_sq);
    }
    return res;
}

} // namespace trimsearch::disksim
