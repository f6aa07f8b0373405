#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "trimsearch/core/dataset.hpp"
#include "trimsearch/core/distance.hpp"
#include "trimsearch/core/ground_truth.hpp"
#include "trimsearch/core/io_util.hpp"

namespace trimsearch::graph {

/// Multi-layer proximity graph (HNSW). Level 0 holds every node with degree
/// cap 2M; upper levels cap at M. Immutable once built.
struct GraphIndex {
    std::size_t count = 0;
    std::size_t M = 16;
    std::size_t ef_construction = 200;
    std::uint32_t entry = 0;
    std::size_t max_level = 0;
    // layers[level][node] -> neighbor ids; nodes absent from a level have empty lists
    std::vector<std::vector<std::vector<std::uint32_t>>> layers;

    const std::vector<std::uint32_t>& neighbors(std::size_t level, std::uint32_t node) const {
        return layers[level][node];
    }

    std::size_t max_degree(std::size_t level) const { return level == 0 ? 2 * M : M; }

    void save(const std::string& path) const {
        auto out = detail::open_output(path);
        detail::write_le(out, static_cast<std::uint64_t>(count));
        detail::write_le(out, static_cast<std::uint32_t>(M));
        detail::write_le(out, static_cast<std::uint32_t>(max_level + 1));
        detail::write_le(out, entry);
        detail::write_le(out, static_cast<std::uint32_t>(ef_construction));
        for (std::size_t lvl = 0; lvl <= max_level; ++lvl) {
            std::uint64_t off = 0;
            for (std::size_t i = 0; i < count; ++i) {
                detail::write_le(out, off);
                off += layers[lvl][i].size();
            }
            detail::write_le(out, off);
            for (std::size_t i = 0; i < count; ++i)
                detail::write_le_array(out, layers[lvl][i].data(), layers[lvl][i].size());
        }
        if (!out)
            throw DataError("write failed: " + path);
    }

    static GraphIndex load(const std::string& path) {
        auto in = detail::open_input(path);
        GraphIndex g;
        g.count = detail::read_le_or_throw<std::uint64_t>(in, "graph count");
        g.M = detail::read_le_or_throw<std::uint32_t>(in, "graph M");
        const std::uint32_t levels = detail::read_le_or_throw<std::uint32_t>(in, "graph levels");
        g.entry = detail::read_le_or_throw<std::uint32_t>(in, "graph entry");
        g.ef_construction = detail::read_le_or_throw<std::uint32_t>(in, "graph efc");
        if (levels == 0)
            throw DataError(path + ": graph with zero levels");
        g.max_level = levels - 1;
        g.layers.resize(levels);
        std::vector<std::uint64_t> offsets(g.count + 1);
        for (std::uint32_t lvl = 0; lvl < levels; ++lvl) {
            for (auto& o : offsets)
                o = detail::read_le_or_throw<std::uint64_t>(in, "graph offsets");
            g.layers[lvl].resize(g.count);
            for (std::size_t i = 0; i < g.count; ++i) {
                const std::uint64_t deg = offsets[i + 1] - offsets[i];
                g.layers[lvl][i].resize(deg);
                detail::read_le_array_or_throw(in, g.layers[lvl][i].data(), deg, "graph ids");
            }
        }
        return g;
    }
};

namespace detail_build {

// Max-heap on ScoredId keeps the worst candidate on top.
using MaxHeap = std::priority_queue<ScoredId>;

struct VisitedSet {
    std::vector<std::uint32_t> stamp;
    std::uint32_t epoch = 0;

    explicit VisitedSet(std::size_t n) : stamp(n, 0) {}

    void next() { ++epoch; }
    bool test_and_set(std::uint32_t id) {
        if (stamp[id] == epoch)
            return true;
        stamp[id] = epoch;
        return false;
    }
};

// Best-first scan of one layer; returns up to ef closest nodes as a max-heap.
inline MaxHeap search_layer(const VectorDataset& ds,
                            const std::vector<std::vector<std::uint32_t>>& adj, VectorView q,
                            std::uint32_t entry, std::size_t ef, VisitedSet& visited) {
    visited.next();
    MaxHeap top;
    std::priority_queue<ScoredId, std::vector<ScoredId>, std::greater<ScoredId>> cand;
    const float d0 = euclidean_sq(q.data(), ds.row(entry).data(), ds.dim);
    visited.test_and_set(entry);
    top.push({d0, entry});
    cand.push({d0, entry});
    while (!cand.empty()) {
        const ScoredId cur = cand.top();
        if (cur.dist_sq > top.top().dist_sq && top.size() == ef)
            break;
        cand.pop();
        for (std::uint32_t v : adj[cur.id]) {
            if (visited.test_and_set(v))
                continue;
            const float d = euclidean_sq(q.data(), ds.row(v).data(), ds.dim);
            if (top.size() < ef || d < top.top().dist_sq ||
                (d == top.top().dist_sq && v < top.top().id)) {
                cand.push({d, v});
                top.push({d, v});
                if (top.size() > ef)
                    top.pop();
            }
        }
    }
    return top;
}

// HNSW neighbor-selection heuristic: keep candidates that are closer to the
// query than to any already-kept neighbor.
inline std::vector<ScoredId> select_neighbors(const VectorDataset& ds,
                                              std::vector<ScoredId> candidates, std::size_t M) {
    std::sort(candidates.begin(), candidates.end());
    std::vector<ScoredId> kept;
    kept.reserve(M);
    for (const ScoredId& c : candidates) {
        if (kept.size() >= M)
            break;
        bool ok = true;
        for (const ScoredId& s : kept) {
            const float d = euclidean_sq(ds.row(c.id).data(), ds.row(s.id).data(), ds.dim);
            if (d < c.dist_sq) {
                ok = false;
                break;
            }
        }
        if (ok)
            kept.push_back(c);
    }
    return kept;
}

} // namespace detail_build

/// Builds an HNSW graph over the dataset. Deterministic for a given seed
/// (levels come from one seeded generator, insertions are sequential).
inline GraphIndex build_graph(const VectorDataset& ds, std::size_t M,
                              std::size_t ef_construction, std::uint64_t seed) {
    if (M < 2)
        throw std::invalid_argument("build_graph: M must be >= 2");
    if (ds.count == 0)
        throw std::invalid_argument("build_graph: empty dataset");
    if (ef_construction == 0)
        throw std::invalid_argument("build_graph: ef_construction must be positive");

    GraphIndex g;
    g.count = ds.count;
    g.M = M;
    g.ef_construction = ef_construction;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double mult = 1.0 / std::log(static_cast<double>(M));
    std::vector<std::size_t> node_level(ds.count);
    std::size_t top = 0;
    for (std::size_t i = 0; i < ds.count; ++i) {
        double u = uni(rng);
        if (u <= 0.0)
            u = std::numeric_limits<double>::min();
        node_level[i] = static_cast<std::size_t>(-std::log(u) * mult);
        top = std::max(top, node_level[i]);
    }
    g.layers.assign(top + 1, {});
    for (auto& layer : g.layers)
        layer.resize(ds.count);

    g.entry = 0;
    g.max_level = node_level[0];
    detail_build::VisitedSet visited(ds.count);

    auto connect = [&](std::size_t lvl, std::uint32_t a, std::uint32_t b) {
        auto& adj = g.layers[lvl][a];
        adj.push_back(b);
        const std::size_t cap = g.max_degree(lvl);
        if (adj.size() <= cap)
            return;
        // over capacity: re-select with the same diversity heuristic
        std::vector<ScoredId> cands;
        cands.reserve(adj.size());
        for (std::uint32_t v : adj)
            cands.push_back({euclidean_sq(ds.row(a).data(), ds.row(v).data(), ds.dim), v});
        auto kept = detail_build::select_neighbors(ds, std::move(cands), cap);
        adj.clear();
        for (const auto& s : kept)
            adj.push_back(s.id);
    };

    for (std::size_t i = 1; i < ds.count; ++i) {
        const VectorView q = ds.row(i);
        const std::size_t lvl_i = node_level[i];
        std::uint32_t cur = g.entry;

        if (lvl_i < g.max_level) {
            float cur_d = euclidean_sq(q.data(), ds.row(cur).data(), ds.dim);
            for (std::size_t lvl = g.max_level; lvl > lvl_i; --lvl) {
                bool changed = true;
                while (changed) {
                    changed = false;
                    for (std::uint32_t v : g.layers[lvl][cur]) {
                        const float d = euclidean_sq(q.data(), ds.row(v).data(), ds.dim);
                        if (d < cur_d) {
                            cur_d = d;
                            cur = v;
                            changed = true;
                        }
                    }
                }
            }
        }

        for (std::size_t lvl = std::min(lvl_i, g.max_level) + 1; lvl-- > 0;) {
            auto top_heap =
                detail_build::search_layer(ds, g.layers[lvl], q, cur, ef_construction, visited);
            std::vector<ScoredId> cands;
            cands.reserve(top_heap.size());
            while (!top_heap.empty()) {
                cands.push_back(top_heap.top());
                top_heap.pop();
            }
            auto selected = detail_build::select_neighbors(ds, std::move(cands), M);
            for (const auto& s : selected) {
                if (s.id == i)
                    continue;
                g.layers[lvl][i].push_back(s.id);
                connect(lvl, s.id, static_cast<std::uint32_t>(i));
            }
            if (!selected.empty())
                cur = selected.front().id;
        }

        if (lvl_i > g.max_level) {
            g.max_level = lvl_i;
            g.entry = static_cast<std::uint32_t>(i);
        }
    }

    // Levels above the realized top stay empty only if no node reached them.
    g.layers.resize(g.max_level + 1);
    return g;
}

/// Number of nodes reachable from the entry on level 0 (diagnostic).
inline std::size_t reachable_from_entry(const GraphIndex& g) {
    std::vector<char> seen(g.count, 0);
    std::vector<std::uint32_t> stack{g.entry};
    seen[g.entry] = 1;
    std::size_t n = 0;
    while (!stack.empty()) {
        const std::uint32_t x = stack.back();
        stack.pop_back();
        ++n;
        for (std::uint32_t v : g.neighbors(0, x)) {
            if (!seen[v]) {
                seen[v] = 1;
                stack.push_back(v);
            }
        }
    }
    return n;
}

} // namespace trimsearch::graph
