#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "trimsearch/core/counters.hpp"
#include "trimsearch/core/dataset.hpp"
#include "trimsearch/core/distance.hpp"
#include "trimsearch/core/ground_truth.hpp"
#include "trimsearch/core/io_util.hpp"
#include "trimsearch/core/parallel.hpp"
#include "trimsearch/pq/kmeans.hpp"
#include "trimsearch/pq/pq.hpp"
#include "trimsearch/trim/calibration.hpp"
#include "trimsearch/trim/landmarks.hpp"
#include "trimsearch/trim/lower_bound.hpp"

namespace trimsearch::ivf {

/// One inverted list as parallel arrays; entries are appended in ascending id
/// order at build time and never reordered.
struct InvertedList {
    std::vector<std::uint32_t> ids;
    std::vector<std::uint8_t> codes; // ids.size() * m
    std::vector<float> lx_dist;

    std::size_t size() const { return ids.size(); }
};

struct IvfIndex {
    std::size_t dim = 0;
    std::size_t nlist = 0;
    pq::PqCodebook codebook; // trained on raw vectors, shared across lists
    std::vector<float> coarse_centroids; // nlist * dim
    std::vector<InvertedList> lists;

    const float* coarse(std::size_t c) const { return coarse_centroids.data() + c * dim; }

    std::size_t total_entries() const {
        std::size_t n = 0;
        for (const auto& l : lists)
            n += l.size();
        return n;
    }

    void save(const std::string& path) const {
        auto out = detail::open_output(path);
        detail::write_le(out, static_cast<std::uint64_t>(dim));
        detail::write_le(out, static_cast<std::uint64_t>(nlist));
        pq::save_codebook(out, codebook);
        detail::write_le_array(out, coarse_centroids.data(), coarse_centroids.size());
        std::uint64_t off = 0;
        for (const auto& l : lists) {
            detail::write_le(out, off);
            off += l.size();
        }
        detail::write_le(out, off);
        for (const auto& l : lists) {
            const std::size_t m = codebook.m();
            for (std::size_t i = 0; i < l.size(); ++i) {
                detail::write_le(out, l.ids[i]);
                out.write(reinterpret_cast<const char*>(l.codes.data() + i * m),
                          static_cast<std::streamsize>(m));
                detail::write_le(out, l.lx_dist[i]);
            }
        }
        if (!out)
            throw DataError("write failed: " + path);
    }

    static IvfIndex load(const std::string& path) {
        auto in = detail::open_input(path);
        IvfIndex ix;
        ix.dim = detail::read_le_or_throw<std::uint64_t>(in, "ivf dim");
        ix.nlist = detail::read_le_or_throw<std::uint64_t>(in, "ivf nlist");
        ix.codebook = pq::load_codebook(in);
        ix.coarse_centroids.resize(ix.dim * ix.nlist);
        detail::read_le_array_or_throw(in, ix.coarse_centroids.data(),
                                       ix.coarse_centroids.size(), "ivf centroids");
        std::vector<std::uint64_t> offsets(ix.nlist + 1);
        for (auto& o : offsets)
            o = detail::read_le_or_throw<std::uint64_t>(in, "ivf offsets");
        ix.lists.resize(ix.nlist);
        const std::size_t m = ix.codebook.m();
        for (std::size_t c = 0; c < ix.nlist; ++c) {
            const std::size_t cnt = offsets[c + 1] - offsets[c];
            auto& l = ix.lists[c];
            l.ids.resize(cnt);
            l.codes.resize(cnt * m);
            l.lx_dist.resize(cnt);
            for (std::size_t i = 0; i < cnt; ++i) {
                l.ids[i] = detail::read_le_or_throw<std::uint32_t>(in, "ivf entry id");
                if (!in.read(reinterpret_cast<char*>(l.codes.data() + i * m),
                             static_cast<std::streamsize>(m)))
                    throw DataError("truncated ivf entry code");
                l.lx_dist[i] = detail::read_le_or_throw<float>(in, "ivf entry lx");
            }
        }
        return ix;
    }
};

/// Builds the inverted file from a prebuilt landmark store: coarse k-means on
/// a seeded sample, then every row filed under its nearest coarse centroid.
inline IvfIndex build_ivf(const VectorDataset& ds, std::size_t nlist,
                          const trim::LandmarkStore& lm, std::uint64_t seed,
                          std::size_t coarse_iters = 10) {
    if (nlist == 0 || nlist > ds.count)
        throw std::invalid_argument("build_ivf: need 1 <= nlist <= n");
    if (lm.count != ds.count)
        throw std::invalid_argument("build_ivf: landmark store size mismatch");

    const std::size_t sample_n = std::min(ds.count, std::max<std::size_t>(nlist, 50 * nlist));
    std::vector<std::size_t> rows(ds.count);
    std::iota(rows.begin(), rows.end(), 0);
    std::mt19937_64 rng(seed ^ 0x94d049bb133111ebull);
    for (std::size_t i = 0; i < sample_n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, ds.count - 1);
        std::swap(rows[i], rows[pick(rng)]);
    }
    std::vector<float> sample(sample_n * ds.dim);
    for (std::size_t i = 0; i < sample_n; ++i)
        std::copy_n(ds.row(rows[i]).data(), ds.dim, sample.data() + i * ds.dim);

    IvfIndex ix;
    ix.dim = ds.dim;
    ix.nlist = nlist;
    ix.codebook = lm.codebook;
    pq::KMeansResult km = pq::kmeans(sample.data(), sample_n, ds.dim, nlist, coarse_iters, seed);
    ix.coarse_centroids = std::move(km.centroids);

    std::vector<std::uint32_t> assign(ds.count);
    parallel_for(ds.count, [&](std::size_t i) {
        assign[i] = pq::detail::nearest_centroid(ds.row(i).data(), ix.coarse_centroids, nlist,
                                                 ds.dim);
    });

    ix.lists.resize(nlist);
    const std::size_t m = lm.codebook.m();
    for (std::size_t i = 0; i < ds.count; ++i) {
        auto& l = ix.lists[assign[i]];
        l.ids.push_back(static_cast<std::uint32_t>(i));
        l.codes.insert(l.codes.end(), lm.code(i), lm.code(i) + m);
        l.lx_dist.push_back(lm.lx_dist[i]);
    }
    return ix;
}

/// Convenience overload: trains PQ and landmarks internally.
inline IvfIndex build_ivf(const VectorDataset& ds, std::size_t nlist,
                          const pq::PqParams& params, std::uint64_t seed) {
    const pq::PqCodebook cb = pq::train(ds, params);
    const trim::LandmarkStore lm = trim::build_landmarks(ds, cb);
    return build_ivf(ds, nlist, lm, seed);
}

struct IvfResult {
    std::vector<std::uint32_t> ids;
    std::vector<float> dist_sq;
    SearchCounters counters;
    std::uint64_t coarse_dc = 0; // coarse-centroid distance computations
};

namespace detail_ivf {

inline std::vector<std::uint32_t> probe_order(const IvfIndex& ix, VectorView q,
                                              std::size_t nprobe, std::uint64_t& coarse_dc) {
    std::vector<ScoredId> scored(ix.nlist);
    for (std::size_t c = 0; c < ix.nlist; ++c) {
        scored[c] = {euclidean_sq(q.data(), ix.coarse(c), ix.dim),
                     static_cast<std::uint32_t>(c)};
    }
    coarse_dc += ix.nlist;
    std::sort(scored.begin(), scored.end());
    std::vector<std::uint32_t> order;
    order.reserve(std::min(nprobe, ix.nlist));
    for (std::size_t i = 0; i < std::min(nprobe, ix.nlist); ++i)
        order.push_back(scored[i].id);
    return order;
}

} // namespace detail_ivf

/// Two-phase IVFPQ: rank every probed entry by ADC estimate, refine the best
/// k_prime with exact distances, return the top k.
inline IvfResult search_baseline_ivfpq(const IvfIndex& ix, const VectorDataset& ds, VectorView q,
                                       std::size_t k, std::size_t nprobe, std::size_t k_prime) {
    if (k == 0 || k > k_prime)
        throw std::invalid_argument("search_baseline_ivfpq: need 1 <= k <= k_prime");
    if (nprobe == 0)
        throw std::invalid_argument("search_baseline_ivfpq: nprobe must be positive");

    IvfResult res;
    const auto order = detail_ivf::probe_order(ix, q, nprobe, res.coarse_dc);
    const pq::DistanceTable table = pq::build_distance_table(ix.codebook, q);

    std::vector<ScoredId> candidates;
    for (std::uint32_t c : order) {
        const auto& l = ix.lists[c];
        const std::size_t m = ix.codebook.m();
        for (std::size_t i = 0; i < l.size(); ++i) {
            const float est = pq::adc_lookup(table, l.codes.data() + i * m);
            ++res.counters.edc;
            ++res.counters.evaluated;
            candidates.push_back({est, l.ids[i]});
        }
    }
    if (k > candidates.size())
        throw std::invalid_argument("search_baseline_ivfpq: k exceeds probed vectors");

    const std::size_t refine_n = std::min(k_prime, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + refine_n, candidates.end());
    candidates.resize(refine_n);

    std::vector<ScoredId> refined;
    refined.reserve(refine_n);
    for (const auto& c : candidates) {
        const float d = euclidean_sq(q.data(), ds.row(c.id).data(), ds.dim);
        ++res.counters.dc;
        refined.push_back({d, c.id});
    }
    res.counters.pruned = res.counters.evaluated - res.counters.dc;
    std::sort(refined.begin(), refined.end());
    refined.resize(std::min(k, refined.size()));
    for (const auto& s : refined) {
        res.ids.push_back(s.id);
        res.dist_sq.push_back(s.dist_sq);
    }
    return res;
}

/// Single-pass TRIM kNN over the probed lists: R is seeded with the first k
/// entries in probe order, then every further entry is exact-evaluated only
/// when its relaxed estimate beats the current k-th distance. There is no
/// candidate-count parameter.
inline IvfResult search_trim_ivf_knn(const IvfIndex& ix, const VectorDataset& ds,
                                     const trim::PruningProfile& profile, VectorView q,
                                     std::size_t k, std::size_t nprobe) {
    if (k == 0)
        throw std::invalid_argument("search_trim_ivf_knn: k must be positive");
    if (!profile.calibrated())
        throw std::invalid_argument("search_trim_ivf_knn: uncalibrated pruning profile");
    const float gamma = static_cast<float>(profile.gamma);

    IvfResult res;
    const auto order = detail_ivf::probe_order(ix, q, nprobe, res.coarse_dc);
    const pq::DistanceTable table = pq::build_distance_table(ix.codebook, q);

    std::priority_queue<ScoredId> result; // size k, worst on top
    float max_dis = std::numeric_limits<float>::infinity();

    for (std::uint32_t c : order) {
        const auto& l = ix.lists[c];
        const std::size_t m = ix.codebook.m();
        for (std::size_t i = 0; i < l.size(); ++i) {
            ++res.counters.evaluated;
            if (result.size() < k) {
                const float d = euclidean_sq(q.data(), ds.row(l.ids[i]).data(), ds.dim);
                ++res.counters.dc;
                result.push({d, l.ids[i]});
                if (result.size() == k)
                    max_dis = result.top().dist_sq;
                continue;
            }
            const float glq = std::sqrt(pq::adc_lookup(table, l.codes.data() + i * m));
            ++res.counters.edc;
            const float est = trim::relaxed_lb(glq, l.lx_dist[i], gamma);
            if (est < max_dis) {
                const float d = euclidean_sq(q.data(), ds.row(l.ids[i]).data(), ds.dim);
                ++res.counters.dc;
                const ScoredId cand{d, l.ids[i]};
                if (cand < result.top()) {
                    result.pop();
                    result.push(cand);
                    max_dis = result.top().dist_sq;
                }
            } else {
                ++res.counters.pruned;
            }
        }
    }
    if (result.size() < k)
        throw std::invalid_argument("search_trim_ivf_knn: k exceeds probed vectors");

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

/// Single-pass TRIM range search: exact evaluation iff the relaxed estimate is
/// within the squared radius; membership requires the exact distance to pass.
inline IvfResult search_trim_ivf_range(const IvfIndex& ix, const VectorDataset& ds,
                                       const trim::PruningProfile& profile, VectorView q,
                                       float radius, std::size_t nprobe) {
    if (radius < 0.0f)
        throw std::invalid_argument("search_trim_ivf_range: negative radius");
    if (!profile.calibrated())
        throw std::invalid_argument("search_trim_ivf_range: uncalibrated pruning profile");
    const float gamma = static_cast<float>(profile.gamma);
    const float radius_sq = radius * radius;

    IvfResult res;
    const auto order = detail_ivf::probe_order(ix, q, nprobe, res.coarse_dc);
    const pq::DistanceTable table = pq::build_distance_table(ix.codebook, q);

    std::vector<ScoredId> results;
    for (std::uint32_t c : order) {
        const auto& l = ix.lists[c];
        const std::size_t m = ix.codebook.m();
        for (std::size_t i = 0; i < l.size(); ++i) {
            ++res.counters.evaluated;
            const float glq = std::sqrt(pq::adc_lookup(table, l.codes.data() + i * m));
            ++res.counters.edc;
            const float est = trim::relaxed_lb(glq, l.lx_dist[i], gamma);
            if (est <= radius_sq) {
                const float d = euclidean_sq(q.data(), ds.row(l.ids[i]).data(), ds.dim);
                ++res.counters.dc;
                if (d <= radius_sq)
                    results.push_back({d, l.ids[i]});
            } else {
                ++res.counters.pruned;
            }
        }
    }
    std::sort(results.begin(), results.end());
    for (const auto& s : results) {
        res.ids.push_back(s.id);
        res.dist_sq.push_back(s.dist_sq);
    }
    return res;
}

} // namespace trimsearch::ivf
