#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "trimsearch/core/dataset.hpp"
#include "trimsearch/core/distance.hpp"
#include "trimsearch/trim/empirical_cdf.hpp"

namespace trimsearch::bench {

/// Radius whose range query returns about e_fraction of the corpus per query:
/// the e_fraction quantile of pooled query-to-data distances over a sample.
inline float pick_radius_for_fraction(const VectorDataset& ds, const VectorDataset& queries,
                                      double e_fraction, std::size_t sample_rows = 2000,
                                      std::size_t sample_queries = 200, std::uint64_t seed = 1) {
    if (!(e_fraction > 0.0) || e_fraction > 1.0)
        throw std::invalid_argument("pick_radius_for_fraction: e_fraction must be in (0,1]");
    if (ds.count == 0 || queries.count == 0)
        throw std::invalid_argument("pick_radius_for_fraction: empty input");

    std::mt19937_64 rng(seed);
    const std::size_t n_rows = std::min(sample_rows, ds.count);
    const std::size_t n_q = std::min(sample_queries, queries.count);

    std::vector<std::size_t> rows(ds.count);
    std::iota(rows.begin(), rows.end(), 0);
    for (std::size_t i = 0; i < n_rows; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, ds.count - 1);
        std::swap(rows[i], rows[pick(rng)]);
    }
    std::vector<std::size_t> qs(queries.count);
    std::iota(qs.begin(), qs.end(), 0);
    for (std::size_t i = 0; i < n_q; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, queries.count - 1);
        std::swap(qs[i], qs[pick(rng)]);
    }

    std::vector<double> pooled;
    pooled.reserve(n_rows * n_q);
    for (std::size_t a = 0; a < n_q; ++a) {
        const VectorView q = queries.row(qs[a]);
        for (std::size_t b = 0; b < n_rows; ++b)
            pooled.push_back(std::sqrt(euclidean_sq(q, ds.row(rows[b]))));
    }
    if (pooled.empty())
        throw std::invalid_argument("pick_radius_for_fraction: degenerate sample");
    trim::EmpiricalCdf cdf(std::move(pooled));
    return static_cast<float>(cdf.quantile(e_fraction));
}

} // namespace trimsearch::bench
