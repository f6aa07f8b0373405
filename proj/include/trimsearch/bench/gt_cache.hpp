#pragma once

#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>

#include "trimsearch/core/dataset.hpp"
#include "trimsearch/core/ground_truth.hpp"

namespace trimsearch::bench {

/// FNV-1a over the raw float buffer plus shape; identifies a dataset for
/// ground-truth caching.
inline std::uint64_t dataset_hash(const VectorDataset& ds) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const unsigned char* p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    const std::uint64_t dim = ds.dim, count = ds.count;
    mix(reinterpret_cast<const unsigned char*>(&dim), sizeof(dim));
    mix(reinterpret_cast<const unsigned char*>(&count), sizeof(count));
    mix(reinterpret_cast<const unsigned char*>(ds.data.data()), ds.data.size() * sizeof(float));
    return h;
}

/// Loads cached ground truth keyed by (base hash, query hash, query params),
/// computing and persisting it on a miss. `cache_dir` is created on demand.
inline GroundTruth load_or_compute_gt(const VectorDataset& base, const VectorDataset& queries,
                                      const std::string& query_type, double k_or_radius,
                                      const std::string& cache_dir) {
    std::ostringstream name;
    name << "gt_" << std::hex << dataset_hash(base) << "_" << dataset_hash(queries) << "_"
         << query_type << "_" << std::defaultfloat << k_or_radius;
    const std::filesystem::path dir(cache_dir);
    const std::string ids_path = (dir / (name.str() + ".ivecs")).string();
    const std::string dist_path = (dir / (name.str() + ".fvecs")).string();
    if (std::filesystem::exists(ids_path) && std::filesystem::exists(dist_path))
        return GroundTruth::load(ids_path, dist_path);

    GroundTruth gt;
    if (query_type == "knn")
        gt = ground_truth_knn(base, queries, static_cast<std::size_t>(k_or_radius));
    else
        gt = ground_truth_range(base, queries, static_cast<float>(k_or_radius));
    std::filesystem::create_directories(dir);
    gt.save(ids_path, dist_path);
    return gt;
}

} // namespace trimsearch::bench
