#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "trimsearch/core/io_util.hpp"

namespace trimsearch::cli {

/// All experiment knobs, with defaults matching the documented parameter
/// choices (M=16, ef_construction=500, C=256; m and nlist filled by the
/// dimension/size rules below when left at 0).
struct RunConfig {
    // [dataset]
    std::string dataset_label = "dataset";
    std::string base_path;
    std::string queries_path;
    std::string element_kind = "auto"; // auto|float32|uint8|int32
    bool normalize = false;

    // [pq]
    std::size_t pq_m = 0; // 0 -> dimension rule
    std::size_t pq_c = 256;
    std::size_t pq_iters = 25;
    std::uint64_t pq_seed = 1;
    std::size_t pq_train_sample = 0; // 0 -> min(n, 100*c)

    // [graph]
    std::size_t graph_m = 16;
    std::size_t graph_ef_construction = 500;
    std::uint64_t graph_seed = 1;

    // [ivf]
    std::size_t ivf_nlist = 0; // 0 -> size rule
    std::size_t ivf_coarse_iters = 10;
    std::uint64_t ivf_seed = 1;

    // [trim]
    double trim_p = 1.0;
    std::string trim_strategy = "empirical_direct"; // or normal_analytic
    std::size_t trim_sample_x = 1000;
    std::size_t trim_samples_per_x = 0; // 0 -> 200 empirical / 10000 analytic
    bool trim_pooled = false;
    std::uint64_t trim_seed = 1;

    // [disk]
    std::size_t disk_block_size = 4096;
    double disk_cache_frac = 0.1;
    std::string disk_layout = "decoupled";

    // [query]
    std::string query_type = "knn";
    std::size_t query_k = 10;
    double query_radius = 0.0;
    double query_e_fraction = 0.0;
    std::size_t query_ef = 100;
    std::size_t query_nprobe = 8;
    std::size_t query_k_prime = 0; // 0 -> 10*k

    // [sweep]
    std::vector<std::string> sweep_backends = {"graph_trim", "graph_baseline"};
    std::vector<double> sweep_p_grid = {1.0};
    std::vector<std::size_t> sweep_ef_grid = {50, 100, 200};
    std::vector<std::size_t> sweep_nprobe_grid = {4, 8, 16};

    // [paths]
    std::string landmarks_path;
    std::string graph_path;
    std::string ivf_path;
    std::string disk_prefix;
    std::string profile_path;
    std::string gt_ids_path;
    std::string gt_dist_path;
    std::string out_path;

    // [run]
    unsigned threads = 0; // 0 -> hardware
};

/// m rule from the reference parameter setting: one-eighth of the dimension
/// for wide (>=960-d) datasets, one quarter otherwise.
inline std::size_t default_pq_m(std::size_t dim) {
    const std::size_t m = dim >= 960 ? dim / 8 : dim / 4;
    return std::max<std::size_t>(1, m);
}

/// nlist rule for small corpora: min(4096, floor(sqrt(n)) * 4), capped at n.
inline std::size_t default_nlist(std::size_t n) {
    const auto root = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
    const std::size_t rule = std::min<std::size_t>(4096, root * 4);
    return std::max<std::size_t>(1, std::min(rule, n));
}

namespace detail_cfg {

inline std::string strip(std::string s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.erase(s.begin());
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.pop_back();
    return s;
}

inline bool parse_bool(const std::string& v, const std::string& where) {
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw DataError(where + ": expected a boolean, got '" + v + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& v, const std::string& where) {
    std::vector<T> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = strip(item);
        if (item.empty())
            continue;
        try {
            if constexpr (std::is_same_v<T, double>)
                out.push_back(std::stod(item));
            else if constexpr (std::is_same_v<T, std::size_t>)
                out.push_back(std::stoull(item));
            else
                out.push_back(item);
        } catch (const std::exception&) {
            throw DataError(where + ": bad list element '" + item + "'");
        }
    }
    if (out.empty())
        throw DataError(where + ": empty list");
    return out;
}

} // namespace detail_cfg

/// Parses a key=value sectioned config file. Unknown keys are hard errors;
/// out-of-range values report the offending line.
inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open config: " + path);
    RunConfig cfg;
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = path + ":" + std::to_string(lineno);
        std::string s = detail_cfg::strip(line);
        if (s.empty() || s[0] == '#' || s[0] == ';')
            continue;
        if (s.front() == '[' && s.back() == ']') {
            section = detail_cfg::strip(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw DataError(where + ": expected key = value");
        const std::string key = section + "." + detail_cfg::strip(s.substr(0, eq));
        const std::string value = detail_cfg::strip(s.substr(eq + 1));

        auto to_u64 = [&](const std::string& v) -> std::uint64_t {
            try {
                return std::stoull(v);
            } catch (const std::exception&) {
                throw DataError(where + ": expected an integer for " + key);
            }
        };
        auto to_f64 = [&](const std::string& v) -> double {
            try {
                return std::stod(v);
            } catch (const std::exception&) {
                throw DataError(where + ": expected a number for " + key);
            }
        };

        if (key == "dataset.label") cfg.dataset_label = value;
        else if (key == "dataset.base") cfg.base_path = value;
        else if (key == "dataset.queries") cfg.queries_path = value;
        else if (key == "dataset.kind") cfg.element_kind = value;
        else if (key == "dataset.normalize") cfg.normalize = detail_cfg::parse_bool(value, where);
        else if (key == "pq.m") cfg.pq_m = to_u64(value);
        else if (key == "pq.c") {
            cfg.pq_c = to_u64(value);
            if (cfg.pq_c == 0 || cfg.pq_c > 256)
                throw DataError(where + ": pq.c must be in [1,256]");
        }
        else if (key == "pq.kmeans_iters") cfg.pq_iters = to_u64(value);
        else if (key == "pq.seed") cfg.pq_seed = to_u64(value);
        else if (key == "pq.train_sample") cfg.pq_train_sample = to_u64(value);
        else if (key == "graph.M") cfg.graph_m = to_u64(value);
        else if (key == "graph.ef_construction") cfg.graph_ef_construction = to_u64(value);
        else if (key == "graph.seed") cfg.graph_seed = to_u64(value);
        else if (key == "ivf.nlist") cfg.ivf_nlist = to_u64(value);
        else if (key == "ivf.coarse_iters") cfg.ivf_coarse_iters = to_u64(value);
        else if (key == "ivf.seed") cfg.ivf_seed = to_u64(value);
        else if (key == "trim.p") {
            cfg.trim_p = to_f64(value);
            if (cfg.trim_p < 0.0 || cfg.trim_p > 1.0)
                throw DataError(where + ": trim.p must be in [0,1]");
        }
        else if (key == "trim.strategy") {
            if (value != "normal_analytic" && value != "empirical_direct")
                throw DataError(where + ": trim.strategy must be normal_analytic or "
                                        "empirical_direct");
            cfg.trim_strategy = value;
        }
        else if (key == "trim.sample_x") cfg.trim_sample_x = to_u64(value);
        else if (key == "trim.samples_per_x") cfg.trim_samples_per_x = to_u64(value);
        else if (key == "trim.pooled") cfg.trim_pooled = detail_cfg::parse_bool(value, where);
        else if (key == "trim.seed") cfg.trim_seed = to_u64(value);
        else if (key == "disk.block_size") {
            cfg.disk_block_size = to_u64(value);
            if (cfg.disk_block_size < 512)
                throw DataError(where + ": disk.block_size must be >= 512");
        }
        else if (key == "disk.cache_frac") {
            cfg.disk_cache_frac = to_f64(value);
            if (cfg.disk_cache_frac < 0.0 || cfg.disk_cache_frac > 1.0)
                throw DataError(where + ": disk.cache_frac must be in [0,1]");
        }
        else if (key == "disk.layout") {
            if (value != "coupled" && value != "decoupled")
                throw DataError(where + ": disk.layout must be coupled or decoupled");
            cfg.disk_layout = value;
        }
        else if (key == "query.type") {
            if (value != "knn" && value != "range")
                throw DataError(where + ": query.type must be knn or range");
            cfg.query_type = value;
        }
        else if (key == "query.k") cfg.query_k = to_u64(value);
        else if (key == "query.radius") cfg.query_radius = to_f64(value);
        else if (key == "query.e_fraction") {
            cfg.query_e_fraction = to_f64(value);
            if (cfg.query_e_fraction < 0.0 || cfg.query_e_fraction > 1.0)
                throw DataError(where + ": query.e_fraction must be in [0,1]");
        }
        else if (key == "query.ef") cfg.query_ef = to_u64(value);
        else if (key == "query.nprobe") cfg.query_nprobe = to_u64(value);
        else if (key == "query.k_prime") cfg.query_k_prime = to_u64(value);
        else if (key == "sweep.backends")
            cfg.sweep_backends = detail_cfg::parse_list<std::string>(value, where);
        else if (key == "sweep.p_grid") {
            cfg.sweep_p_grid = detail_cfg::parse_list<double>(value, where);
            for (double p : cfg.sweep_p_grid)
                if (p < 0.0 || p > 1.0)
                    throw DataError(where + ": sweep.p_grid values must be in [0,1]");
        }
        else if (key == "sweep.ef_grid")
            cfg.sweep_ef_grid = detail_cfg::parse_list<std::size_t>(value, where);
        else if (key == "sweep.nprobe_grid")
            cfg.sweep_nprobe_grid = detail_cfg::parse_list<std::size_t>(value, where);
        else if (key == "paths.landmarks") cfg.landmarks_path = value;
        else if (key == "paths.graph") cfg.graph_path = value;
        else if (key == "paths.ivf") cfg.ivf_path = value;
        else if (key == "paths.disk_prefix") cfg.disk_prefix = value;
        else if (key == "paths.profile") cfg.profile_path = value;
        else if (key == "paths.gt_ids") cfg.gt_ids_path = value;
        else if (key == "paths.gt_dist") cfg.gt_dist_path = value;
        else if (key == "paths.out") cfg.out_path = value;
        else if (key == "run.threads") cfg.threads = static_cast<unsigned>(to_u64(value));
        else
            throw DataError(where + ": unknown key '" + key + "'");
    }
    return cfg;
}

} // namespace trimsearch::cli
