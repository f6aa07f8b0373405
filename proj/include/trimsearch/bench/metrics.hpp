#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace trimsearch::bench {

/// |exact[0..k) ∩ approx[0..k)| / k. The approximate list is truncated to its
/// first k entries before intersecting.
inline double recall_at_k(const std::vector<std::uint32_t>& exact,
                          const std::vector<std::uint32_t>& approx, std::size_t k) {
    if (k == 0 || exact.size() < k)
        throw std::invalid_argument("recall_at_k: need |exact| >= k >= 1");
    std::unordered_set<std::uint32_t> top(exact.begin(), exact.begin() + k);
    std::size_t hits = 0;
    const std::size_t limit = std::min(k, approx.size());
    for (std::size_t i = 0; i < limit; ++i)
        hits += top.count(approx[i]);
    return static_cast<double>(hits) / static_cast<double>(k);
}

/// Tie-tolerant variant: any returned id whose exact distance equals the k-th
/// exact distance also counts as a hit. Requires the ground-truth distances
/// aligned with `exact`.
inline double recall_at_k_ties(const std::vector<std::uint32_t>& exact,
                               const std::vector<float>& exact_dist_sq,
                               const std::vector<std::uint32_t>& approx, std::size_t k) {
    if (k == 0 || exact.size() < k || exact_dist_sq.size() < k)
        throw std::invalid_argument("recall_at_k_ties: need |exact| >= k >= 1");
    const float kth = exact_dist_sq[k - 1];
    std::unordered_set<std::uint32_t> qualifying(exact.begin(), exact.begin() + k);
    for (std::size_t i = k; i < exact.size() && exact_dist_sq[i] <= kth; ++i)
        qualifying.insert(exact[i]);
    std::size_t hits = 0;
    const std::size_t limit = std::min(k, approx.size());
    for (std::size_t i = 0; i < limit; ++i)
        hits += qualifying.count(approx[i]);
    return static_cast<double>(hits) / static_cast<double>(k);
}

/// |approx ∩ exact| / |exact|. Undefined (nullopt) when the exact set is
/// empty; such queries are excluded from averages.
inline std::optional<double> ap_at_e(const std::vector<std::uint32_t>& exact,
                                     const std::vector<std::uint32_t>& approx) {
    if (exact.empty())
        return std::nullopt;
    std::unordered_set<std::uint32_t> truth(exact.begin(), exact.end());
    std::size_t hits = 0;
    for (std::uint32_t id : approx)
        hits += truth.count(id);
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

} // namespace trimsearch::bench
