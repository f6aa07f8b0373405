#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "trimsearch/core/dataset.hpp"
#include "trimsearch/core/distance.hpp"

namespace trimsearch {

struct SampleStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double stddev = 0.0;

    static SampleStats from(const std::vector<double>& xs) {
        SampleStats s;
        if (xs.empty())
            return s;
        s.min = xs[0];
        s.max = xs[0];
        double sum = 0.0;
        for (double v : xs) {
            s.min = std::min(s.min, v);
            s.max = std::max(s.max, v);
            sum += v;
        }
        s.mean = sum / static_cast<double>(xs.size());
        double var = 0.0;
        for (double v : xs)
            var += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(var / static_cast<double>(xs.size()));
        return s;
    }
};

/// Distance-concentration diagnostic for one truncated dimensionality.
struct ConcentrationRow {
    std::size_t dim = 0;
    SampleStats pair_distance;      // Γ(x, y) over random row pairs
    SampleStats strict_bound_width; // |Γ(l,q) − Γ(l,x)| over random row triples
};

/// Measures how pairwise distances and triangle-inequality bound widths behave
/// as dimensionality grows. Truncation keeps the leading coordinates, so one
/// dataset serves every requested dim.
inline std::vector<ConcentrationRow> concentration_profile(const VectorDataset& ds,
                                                           const std::vector<std::size_t>& dims,
                                                           std::size_t sample_pairs,
                                                           std::uint64_t seed = 1) {
    if (sample_pairs == 0)
        throw std::invalid_argument("concentration_profile: sample_pairs must be positive");
    if (ds.count < 3)
        throw std::invalid_argument("concentration_profile: need at least 3 rows");
    for (std::size_t d : dims) {
        if (d == 0 || d > ds.dim)
            throw std::invalid_argument("concentration_profile: requested dim out of range");
    }

    std::vector<ConcentrationRow> rows;
    rows.reserve(dims.size());
    for (std::size_t d : dims) {
        std::mt19937_64 rng(seed + d);
        std::uniform_int_distribution<std::size_t> pick(0, ds.count - 1);
        std::vector<double> dists;
        std::vector<double> widths;
        dists.reserve(sample_pairs);
        widths.reserve(sample_pairs);
        for (std::size_t s = 0; s < sample_pairs; ++s) {
            std::size_t i = pick(rng);
            std::size_t j = pick(rng);
            while (j == i)
                j = pick(rng);
            dists.push_back(std::sqrt(euclidean_sq(ds.row(i).data(), ds.row(j).data(), d)));

            const std::size_t l = pick(rng);
            std::size_t q = pick(rng);
            while (q == l)
                q = pick(rng);
            std::size_t x = pick(rng);
            while (x == l || x == q)
                x = pick(rng);
            const double glq = std::sqrt(euclidean_sq(ds.row(l).data(), ds.row(q).data(), d));
            const double glx = std::sqrt(euclidean_sq(ds.row(l).data(), ds.row(x).data(), d));
            widths.push_back(std::abs(glq - glx));
        }
        ConcentrationRow row;
        row.dim = d;
        row.pair_distance = SampleStats::from(dists);
        row.strict_bound_width = SampleStats::from(widths);
        rows.push_back(row);
    }
    return rows;
}

} // namespace trimsearch
