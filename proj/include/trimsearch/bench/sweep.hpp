#pragma once

#include <chrono>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "trimsearch/bench/metrics.hpp"
#include "trimsearch/core/counters.hpp"
#include "trimsearch/core/dataset.hpp"
#include "trimsearch/core/ground_truth.hpp"
#include "trimsearch/core/parallel.hpp"
#include "trimsearch/disksim/disk_search.hpp"
#include "trimsearch/graph/search.hpp"
#include "trimsearch/ivf/ivf.hpp"

namespace trimsearch::bench {

/// One CSV row of the sweep report. Non-applicable fields carry "-".
struct SweepRow {
    std::string backend;
    std::string dataset;
    std::string query_type;
    std::string k_or_radius;
    std::string p = "-";
    std::string gamma = "-";
    std::string ef = "-";
    std::string nprobe = "-";
    std::string recall = "-";
    std::string ap = "-";
    std::string pruning_ratio = "-";
    std::string edc = "-";
    std::string dc = "-";
    std::string mean_io = "-";
    std::string qps = "-";
};

inline const char* sweep_csv_header() {
    return "backend,dataset,query_type,k_or_radius,p,gamma,ef,nprobe,recall,ap,"
           "pruning_ratio,edc,dc,mean_io,qps";
}

inline std::string to_csv(const SweepRow& r) {
    std::ostringstream ss;
    ss << r.backend << ',' << r.dataset << ',' << r.query_type << ',' << r.k_or_radius << ','
       << r.p << ',' << r.gamma << ',' << r.ef << ',' << r.nprobe << ',' << r.recall << ','
       << r.ap << ',' << r.pruning_ratio << ',' << r.edc << ',' << r.dc << ',' << r.mean_io
       << ',' << r.qps;
    return ss.str();
}

namespace detail_sweep {

inline std::string fmt(double v, int prec = 6) {
    std::ostringstream ss;
    ss << std::setprecision(prec) << v;
    return ss.str();
}

struct Aggregate {
    double recall_sum = 0.0;
    double ap_sum = 0.0;
    std::size_t ap_defined = 0;
    std::size_t n = 0;
    SearchCounters counters;
    disksim::IoCounters io;
    double seconds = 0.0;

    void fill(SweepRow& row, const std::string& query_type) const {
        const double nq = static_cast<double>(n);
        if (query_type == "knn")
            row.recall = fmt(recall_sum / nq);
        else if (ap_defined > 0)
            row.ap = fmt(ap_sum / static_cast<double>(ap_defined));
        row.pruning_ratio = fmt(counters.pruning_ratio());
        row.edc = fmt(static_cast<double>(counters.edc) / nq);
        row.dc = fmt(static_cast<double>(counters.dc) / nq);
        if (io.total_reads() > 0 || io.cache_hits > 0)
            row.mean_io = fmt(static_cast<double>(io.total_reads()) / nq);
        if (seconds > 0.0)
            row.qps = fmt(nq / seconds);
    }
};

} // namespace detail_sweep

/// Everything a sweep grid point may need; null members disable the backends
/// that would use them.
struct SweepSpec {
    std::string dataset_label = "dataset";
    const VectorDataset* base = nullptr;
    const VectorDataset* queries = nullptr;
    const GroundTruth* gt = nullptr; // kNN or range truth matching query_type

    std::string query_type = "knn"; // "knn" | "range"
    std::size_t k = 10;
    float radius = 0.0f;

    std::vector<std::string> backends; // graph_trim, graph_baseline, ivf_trim,
                                       // ivf_baseline, disk_trim, disk_baseline
    std::vector<trim::PruningProfile> profiles; // one row set per profile (trim backends)
    std::vector<std::size_t> ef_grid;           // graph + disk backends
    std::vector<std::size_t> nprobe_grid;       // ivf backends
    std::size_t k_prime = 0;                    // ivf baseline; 0 -> 10*k

    const graph::GraphIndex* graph = nullptr;
    const trim::LandmarkStore* landmarks = nullptr;
    const ivf::IvfIndex* ivf = nullptr;
    const disksim::BlockLayout* disk_layout = nullptr;          // decoupled
    const disksim::BlockStore* disk_store = nullptr;
    const disksim::BlockLayout* disk_layout_coupled = nullptr;  // baseline replay
    const disksim::BlockStore* disk_store_coupled = nullptr;
    double cache_frac = 0.1;
};

namespace detail_sweep {

template <typename RunQuery>
Aggregate run_queries(const SweepSpec& spec, RunQuery&& run) {
    Aggregate agg;
    const std::size_t nq = spec.queries->count;
    std::vector<double> recalls(nq, 0.0);
    std::vector<double> aps(nq, -1.0);
    std::vector<SearchCounters> counters(nq);
    std::vector<disksim::IoCounters> ios(nq);
    const auto t0 = std::chrono::steady_clock::now();
    parallel_for(nq, [&](std::size_t qi) {
        std::vector<std::uint32_t> ids;
        run(qi, ids, counters[qi], ios[qi]);
        if (spec.query_type == "knn") {
            recalls[qi] = recall_at_k(spec.gt->ids[qi], ids, spec.k);
        } else {
            const auto ap = ap_at_e(spec.gt->ids[qi], ids);
            aps[qi] = ap ? *ap : -1.0;
        }
    });
    agg.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    agg.n = nq;
    for (std::size_t qi = 0; qi < nq; ++qi) {
        agg.recall_sum += recalls[qi];
        if (aps[qi] >= 0.0) {
            agg.ap_sum += aps[qi];
            ++agg.ap_defined;
        }
        agg.counters += counters[qi];
        agg.io += ios[qi];
    }
    return agg;
}

} // namespace detail_sweep

/// Runs the whole grid and returns one row per (backend, profile, ef|nprobe)
/// point. Rows are deterministic under fixed seeds except the qps column.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    if (!spec.base || !spec.queries || !spec.gt)
        throw std::invalid_argument("run_sweep: base, queries and ground truth are required");
    if (spec.query_type != "knn" && spec.query_type != "range")
        throw std::invalid_argument("run_sweep: query_type must be knn or range");

    std::vector<SweepRow> rows;
    const std::string kor = spec.query_type == "knn" ? std::to_string(spec.k)
                                                     : detail_sweep::fmt(spec.radius);

    auto base_row = [&](const std::string& backend) {
        SweepRow row;
        row.backend = backend;
        row.dataset = spec.dataset_label;
        row.query_type = spec.query_type;
        row.k_or_radius = kor;
        return row;
    };

    for (const std::string& backend : spec.backends) {
        const bool is_trim = backend.find("baseline") == std::string::npos;
        const bool is_graph = backend.rfind("graph", 0) == 0;
        const bool is_ivf = backend.rfind("ivf", 0) == 0;
        const bool is_disk = backend.rfind("disk", 0) == 0;
        if (!is_graph && !is_ivf && !is_disk)
            throw std::invalid_argument("run_sweep: unknown backend " + backend);

        std::vector<trim::PruningProfile> profiles = spec.profiles;
        if (!is_trim) {
            profiles.clear();
            profiles.push_back(trim::PruningProfile::manual(0.0)); // placeholder, unused
        }
        if (is_trim && profiles.empty())
            throw std::invalid_argument("run_sweep: trim backend needs calibrated profiles");

        for (const auto& profile : profiles) {
            const auto& grid = is_ivf ? spec.nprobe_grid : spec.ef_grid;
            if (grid.empty())
                throw std::invalid_argument("run_sweep: empty parameter grid for " + backend);
            for (std::size_t param : grid) {
                SweepRow row = base_row(backend);
                if (is_trim) {
                    row.p = detail_sweep::fmt(profile.p);
                    row.gamma = detail_sweep::fmt(profile.gamma);
                }
                detail_sweep::Aggregate agg;
                if (is_graph) {
                    if (!spec.graph || (is_trim && !spec.landmarks))
                        throw std::invalid_argument("run_sweep: graph backend missing artifacts");
                    row.ef = std::to_string(param);
                    agg = detail_sweep::run_queries(spec, [&](std::size_t qi, auto& ids,
                                                              auto& counters, auto&) {
                        const VectorView q = spec.queries->row(qi);
                        graph::SearchResult r;
                        if (spec.query_type == "knn")
                            r = is_trim ? graph::search_trim_knn(*spec.graph, *spec.base,
                                                                 *spec.landmarks, profile, q,
                                                                 spec.k, param)
                                        : graph::search_baseline_knn(*spec.graph, *spec.base, q,
                                                                     spec.k, param);
                        else
                            r = is_trim ? graph::search_trim_range(*spec.graph, *spec.base,
                                                                   *spec.landmarks, profile, q,
                                                                   spec.radius, param)
                                        : graph::search_baseline_range(*spec.graph, *spec.base,
                                                                       q, spec.radius, param);
                        ids = std::move(r.ids);
                        counters = r.counters;
                    });
                } else if (is_ivf) {
                    if (!spec.ivf)
                        throw std::invalid_argument("run_sweep: ivf backend missing artifacts");
                    row.nprobe = std::to_string(param);
                    const std::size_t k_prime = spec.k_prime ? spec.k_prime : 10 * spec.k;
                    agg = detail_sweep::run_queries(spec, [&](std::size_t qi, auto& ids,
                                                              auto& counters, auto&) {
                        const VectorView q = spec.queries->row(qi);
                        ivf::IvfResult r;
                        if (spec.query_type == "knn")
                            r = is_trim ? ivf::search_trim_ivf_knn(*spec.ivf, *spec.base,
                                                                   profile, q, spec.k, param)
                                        : ivf::search_baseline_ivfpq(*spec.ivf, *spec.base, q,
                                                                     spec.k, param, k_prime);
                        else {
                            if (!is_trim)
                                throw std::invalid_argument(
                                    "run_sweep: ivf_baseline supports knn only");
                            r = ivf::search_trim_ivf_range(*spec.ivf, *spec.base, profile, q,
                                                           spec.radius, param);
                        }
                        ids = std::move(r.ids);
                        counters = r.counters;
                    });
                } else {
                    row.ef = std::to_string(param);
                    if (is_trim) {
                        if (!spec.disk_layout || !spec.disk_store || !spec.landmarks)
                            throw std::invalid_argument(
                                "run_sweep: disk backend missing artifacts");
                        const std::size_t cache_cap = static_cast<std::size_t>(
                            spec.cache_frac * static_cast<double>(spec.disk_layout->count));
                        agg = detail_sweep::run_queries(spec, [&](std::size_t qi, auto& ids,
                                                                  auto& counters, auto& io) {
                            const VectorView q = spec.queries->row(qi);
                            disksim::AdjacencyCache cache(cache_cap);
                            disksim::DiskResult r;
                            if (spec.query_type == "knn")
                                r = disksim::search_disk_knn(*spec.disk_layout, *spec.disk_store,
                                                             *spec.landmarks, profile, q, spec.k,
                                                             param, cache);
                            else
                                r = disksim::search_disk_range(*spec.disk_layout,
                                                               *spec.disk_store, *spec.landmarks,
                                                               profile, q, spec.radius, param,
                                                               cache);
                            ids = std::move(r.ids);
                            counters = r.counters;
                            io = r.io;
                        });
                    } else {
                        if (!spec.disk_layout_coupled || !spec.disk_store_coupled ||
                            !spec.landmarks)
                            throw std::invalid_argument(
                                "run_sweep: disk_baseline missing artifacts");
                        if (spec.query_type != "knn")
                            throw std::invalid_argument(
                                "run_sweep: disk_baseline supports knn only");
                        const std::size_t cache_cap = static_cast<std::size_t>(
                            spec.cache_frac *
                            static_cast<double>(disksim::total_blocks(*spec.disk_layout_coupled)));
                        agg = detail_sweep::run_queries(spec, [&](std::size_t qi, auto& ids,
                                                                  auto& counters, auto& io) {
                            const VectorView q = spec.queries->row(qi);
                            disksim::BlockPresenceCache cache(cache_cap);
                            auto r = disksim::replay_baseline_disk(*spec.disk_layout_coupled,
                                                                   *spec.disk_store_coupled,
                                                                   *spec.landmarks, q, spec.k,
                                                                   param, cache);
                            ids = std::move(r.ids);
                            counters = r.counters;
                            io = r.io;
                        });
                    }
                }
                agg.fill(row, spec.query_type);
                rows.push_back(row);
            }
            if (!is_trim)
                break; // baselines ignore the profile axis
        }
    }
    return rows;
}

inline void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << sweep_csv_header() << "\n";
    for (const auto& r : rows)
        out << to_csv(r) << "\n";
}

} // namespace trimsearch::bench
