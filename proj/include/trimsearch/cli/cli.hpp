#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trimsearch/bench/gt_cache.hpp"
#include "trimsearch/bench/metrics.hpp"
#include "trimsearch/bench/radius.hpp"
#include "trimsearch/bench/sweep.hpp"
#include "trimsearch/cli/config.hpp"
#include "trimsearch/core/concentration.hpp"
#include "trimsearch/core/dataset.hpp"
#include "trimsearch/core/ground_truth.hpp"
#include "trimsearch/core/parallel.hpp"
#include "trimsearch/core/synthetic.hpp"
#include "trimsearch/core/vecs_io.hpp"
#include "trimsearch/disksim/disk_search.hpp"
#include "trimsearch/graph/search.hpp"
#include "trimsearch/ivf/ivf.hpp"
#include "trimsearch/pq/pq.hpp"
#include "trimsearch/trim/calibration.hpp"

namespace trimsearch::cli {

namespace detail_cli {

inline bool g_quiet = false;

inline void log(const std::string& msg) {
    if (!g_quiet)
        std::cerr << "[trimsearch] " << msg << "\n";
}

inline VectorDataset load_dataset(const std::string& path, const std::string& kind,
                                  bool normalize = false) {
    const ElementKind ek =
        kind == "auto" ? element_kind_from_path(path) : element_kind_from_string(kind);
    VectorDataset ds = load_vecs(path, ek);
    if (normalize)
        ds.normalize_rows();
    log("loaded " + std::to_string(ds.count) + " x " + std::to_string(ds.dim) + " from " + path);
    return ds;
}

inline pq::PqParams pq_params_from(const RunConfig& cfg, std::size_t dim) {
    pq::PqParams params;
    params.m = cfg.pq_m == 0 ? default_pq_m(dim) : cfg.pq_m;
    params.c = cfg.pq_c;
    params.kmeans_iters = cfg.pq_iters;
    params.seed = cfg.pq_seed;
    params.train_sample = cfg.pq_train_sample;
    return params;
}

inline std::vector<trim::EmpiricalCdf> sample_cdfs(const RunConfig& cfg, const VectorDataset& ds,
                                                   const trim::LandmarkStore& lm,
                                                   const VectorDataset* queries) {
    if (cfg.trim_strategy == "normal_analytic") {
        trim::AnalyticSampleParams params;
        params.sample_x = cfg.trim_sample_x;
        params.draws_per_x = cfg.trim_samples_per_x ? cfg.trim_samples_per_x : 10000;
        params.seed = cfg.trim_seed;
        return trim::sample_analytic_cdfs(ds, lm, params);
    }
    if (!queries)
        throw std::invalid_argument("empirical_direct calibration requires --queries");
    trim::EmpiricalSampleParams params;
    params.sample_x = cfg.trim_sample_x;
    params.queries_per_x = cfg.trim_samples_per_x ? cfg.trim_samples_per_x : 200;
    params.pooled = cfg.trim_pooled;
    params.seed = cfg.trim_seed;
    return trim::sample_one_minus_z_empirical(ds, lm, *queries, params);
}

inline trim::PruningProfile finish_profile(trim::PruningProfile prof, const RunConfig& cfg) {
    prof.strategy = cfg.trim_strategy;
    prof.seed = cfg.trim_seed;
    return prof;
}

} // namespace detail_cli

/// Entry point behind main(); returns the process exit code.
/// 0 = success, 1 = usage error, 2 = data/validation error.
inline int run(int argc, const char* const* argv) {
    using namespace detail_cli;

    CLI::App app{"vector search with PQ-landmark triangle-inequality pruning"};
    app.require_subcommand(1);

    std::string config_path;
    unsigned threads = 0;
    if (const char* env = std::getenv("TRIMSEARCH_THREADS"))
        threads = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    app.add_option("--config", config_path, "key=value sectioned config file")
        ->expected(1);
    app.add_flag("--quiet", g_quiet, "suppress progress logging");
    app.add_option("--threads", threads, "worker thread cap (TRIMSEARCH_THREADS)");

    RunConfig cfg;
    // Callbacks run after parsing, so each one starts by materializing the
    // effective config (file first, then command-line overrides).
    auto ensure_cfg = [&] {
        if (!config_path.empty())
            cfg = parse_config(config_path);
        thread_cap().store(threads ? threads : cfg.threads);
    };

    // ---- ingest ----
    auto* ingest = app.add_subcommand("ingest", "convert/validate a vecs file or synthesize data");
    std::string in_path, in_kind = "auto", out_path;
    bool normalize = false;
    std::size_t synth_n = 0, synth_dim = 0;
    std::uint64_t synth_seed = 1;
    ingest->add_option("--input", in_path, "input .fvecs/.bvecs/.ivecs file");
    ingest->add_option("--kind", in_kind, "element kind: auto|float32|uint8|int32");
    ingest->add_option("--out", out_path, "output .fvecs path")->required();
    ingest->add_flag("--normalize", normalize, "scale rows to unit norm");
    ingest->add_option("--synthetic-normal", synth_n, "generate N standard-normal rows instead");
    ingest->add_option("--dim", synth_dim, "dimension for synthetic data");
    ingest->add_option("--seed", synth_seed, "seed for synthetic data");
    ingest->callback([&] {
        ensure_cfg();
        VectorDataset ds;
        if (synth_n > 0) {
            if (synth_dim == 0)
                throw std::invalid_argument("ingest: --synthetic-normal requires --dim");
            ds = make_normal_dataset(synth_n, synth_dim, synth_seed);
        } else if (!in_path.empty()) {
            ds = load_dataset(in_path, in_kind);
        } else {
            throw std::invalid_argument("ingest: need --input or --synthetic-normal");
        }
        if (normalize)
            ds.normalize_rows();
        ds.validate();
        write_fvecs(out_path, ds);
        log("wrote " + out_path);
    });

    // ---- gt ----
    auto* gt_cmd = app.add_subcommand("gt", "exact ground truth via brute force");
    std::string gt_base, gt_queries, gt_kind = "auto", gt_out_ids, gt_out_dist;
    std::size_t gt_k = 0;
    double gt_radius = -1.0, gt_efrac = 0.0;
    gt_cmd->add_option("--base", gt_base, "corpus vecs file")->required();
    gt_cmd->add_option("--queries", gt_queries, "query vecs file")->required();
    gt_cmd->add_option("--kind", gt_kind, "element kind of both files");
    gt_cmd->add_option("--k", gt_k, "kNN ground truth for this k");
    gt_cmd->add_option("--radius", gt_radius, "range ground truth at this radius");
    gt_cmd->add_option("--e-fraction", gt_efrac, "pick radius so this fraction qualifies");
    gt_cmd->add_option("--out-ids", gt_out_ids, "output ivecs of ids")->required();
    gt_cmd->add_option("--out-dist", gt_out_dist, "output fvecs of squared distances")
        ->required();
    gt_cmd->callback([&] {
        ensure_cfg();
        const VectorDataset base = load_dataset(gt_base, gt_kind);
        const VectorDataset queries = load_dataset(gt_queries, gt_kind);
        GroundTruth gt;
        if (gt_k > 0) {
            gt = ground_truth_knn(base, queries, gt_k);
        } else {
            float radius = static_cast<float>(gt_radius);
            if (gt_radius < 0.0 && gt_efrac > 0.0) {
                radius = bench::pick_radius_for_fraction(base, queries, gt_efrac);
                log("picked radius " + std::to_string(radius));
            } else if (gt_radius < 0.0) {
                throw std::invalid_argument("gt: need one of --k, --radius, --e-fraction");
            }
            gt = ground_truth_range(base, queries, radius);
        }
        gt.save(gt_out_ids, gt_out_dist);
        log("wrote " + gt_out_ids + " and " + gt_out_dist);
    });

    // ---- train-pq ----
    auto* train_cmd = app.add_subcommand("train-pq", "train PQ codebook and landmark store");
    std::string tp_base, tp_out, tp_kind = "auto";
    std::size_t tp_m = 0;
    train_cmd->add_option("--base", tp_base, "corpus vecs file")->required();
    train_cmd->add_option("--kind", tp_kind, "element kind");
    train_cmd->add_option("--m", tp_m, "subspace count (default: dimension rule)");
    train_cmd->add_option("--out", tp_out, "output landmark store path")->required();
    train_cmd->callback([&] {
        ensure_cfg();
        const VectorDataset base = load_dataset(tp_base, tp_kind, cfg.normalize);
        pq::PqParams params = pq_params_from(cfg, base.dim);
        if (tp_m > 0)
            params.m = tp_m;
        const pq::PqCodebook cb = pq::train(base, params);
        log("trained codebook m=" + std::to_string(cb.m()) + " c=" + std::to_string(cb.c()) +
            " mse=" + std::to_string(cb.training_mse));
        const trim::LandmarkStore lm = trim::build_landmarks(base, cb);
        lm.save(tp_out);
        log("wrote " + tp_out);
    });

    // ---- calibrate ----
    auto* cal_cmd = app.add_subcommand("calibrate", "fit gamma for a confidence level p");
    std::string cal_base, cal_lm, cal_queries, cal_out, cal_strategy, cal_kind = "auto";
    double cal_p = -1.0;
    cal_cmd->add_option("--base", cal_base, "corpus vecs file")->required();
    cal_cmd->add_option("--kind", cal_kind, "element kind");
    cal_cmd->add_option("--landmarks", cal_lm, "landmark store path")->required();
    cal_cmd->add_option("--queries", cal_queries, "query sample (empirical strategy)");
    cal_cmd->add_option("--p", cal_p, "confidence level in [0,1]");
    cal_cmd->add_option("--strategy", cal_strategy, "normal_analytic | empirical_direct");
    cal_cmd->add_option("--out", cal_out, "output profile path")->required();
    cal_cmd->callback([&] {
        ensure_cfg();
        if (cal_p >= 0.0) {
            if (cal_p > 1.0)
                throw std::invalid_argument("calibrate: p must be in [0,1]");
            cfg.trim_p = cal_p;
        }
        if (!cal_strategy.empty()) {
            if (cal_strategy != "normal_analytic" && cal_strategy != "empirical_direct")
                throw std::invalid_argument("calibrate: unknown strategy " + cal_strategy);
            cfg.trim_strategy = cal_strategy;
        }
        const VectorDataset base = load_dataset(cal_base, cal_kind, cfg.normalize);
        const trim::LandmarkStore lm = trim::LandmarkStore::load(cal_lm);
        std::unique_ptr<VectorDataset> queries;
        if (!cal_queries.empty())
            queries = std::make_unique<VectorDataset>(load_dataset(cal_queries, cal_kind));
        const auto cdfs = sample_cdfs(cfg, base, lm, queries.get());
        trim::PruningProfile prof = finish_profile(trim::calibrate_gamma(cdfs, cfg.trim_p), cfg);
        prof.save(cal_out);
        log("calibrated gamma=" + std::to_string(prof.gamma) + " at p=" +
            std::to_string(prof.p) + " -> " + cal_out);
    });

    // ---- build ----
    auto* build = app.add_subcommand("build", "build an index artifact");
    build->require_subcommand(1);

    auto* bg = build->add_subcommand("graph", "HNSW graph index");
    std::string bg_base, bg_out, bg_kind = "auto";
    bg->add_option("--base", bg_base, "corpus vecs file")->required();
    bg->add_option("--kind", bg_kind, "element kind");
    bg->add_option("--out", bg_out, "output graph path")->required();
    bg->callback([&] {
        ensure_cfg();
        const VectorDataset base = load_dataset(bg_base, bg_kind, cfg.normalize);
        const auto g = graph::build_graph(base, cfg.graph_m, cfg.graph_ef_construction,
                                          cfg.graph_seed);
        g.save(bg_out);
        log("wrote " + bg_out + " (levels=" + std::to_string(g.max_level + 1) + ")");
    });

    auto* bi = build->add_subcommand("ivf", "inverted-file index with PQ entries");
    std::string bi_base, bi_lm, bi_out, bi_kind = "auto";
    std::size_t bi_nlist = 0;
    bi->add_option("--base", bi_base, "corpus vecs file")->required();
    bi->add_option("--kind", bi_kind, "element kind");
    bi->add_option("--landmarks", bi_lm, "landmark store path")->required();
    bi->add_option("--nlist", bi_nlist, "coarse cluster count (default: size rule)");
    bi->add_option("--out", bi_out, "output index path")->required();
    bi->callback([&] {
        ensure_cfg();
        const VectorDataset base = load_dataset(bi_base, bi_kind, cfg.normalize);
        const trim::LandmarkStore lm = trim::LandmarkStore::load(bi_lm);
        std::size_t nlist = bi_nlist ? bi_nlist : cfg.ivf_nlist;
        if (nlist == 0)
            nlist = default_nlist(base.count);
        const auto ix = ivf::build_ivf(base, nlist, lm, cfg.ivf_seed, cfg.ivf_coarse_iters);
        ix.save(bi_out);
        log("wrote " + bi_out + " (nlist=" + std::to_string(nlist) + ")");
    });

    auto* bd = build->add_subcommand("disk", "block layout + block file for disk simulation");
    std::string bd_base, bd_graph, bd_prefix, bd_layout, bd_kind = "auto";
    std::size_t bd_block_size = 0;
    bd->add_option("--base", bd_base, "corpus vecs file")->required();
    bd->add_option("--kind", bd_kind, "element kind");
    bd->add_option("--graph", bd_graph, "graph index path")->required();
    bd->add_option("--layout", bd_layout, "coupled | decoupled");
    bd->add_option("--block-size", bd_block_size, "block size in bytes (>= 512)");
    bd->add_option("--out-prefix", bd_prefix, "writes <prefix>.blocks and <prefix>.manifest")
        ->required();
    bd->callback([&] {
        ensure_cfg();
        if (!bd_layout.empty())
            cfg.disk_layout = bd_layout;
        if (bd_block_size) {
            if (bd_block_size < 512)
                throw std::invalid_argument("build disk: block size must be >= 512");
            cfg.disk_block_size = bd_block_size;
        }
        const VectorDataset base = load_dataset(bd_base, bd_kind, cfg.normalize);
        const auto g = graph::GraphIndex::load(bd_graph);
        const auto kind = disksim::layout_kind_from_string(cfg.disk_layout);
        const auto lay = disksim::build_layout(g, base, kind, cfg.disk_block_size);
        disksim::FileBlockStore store(bd_prefix + ".blocks", lay.block_size,
                                      disksim::total_blocks(lay), true);
        disksim::write_blocks(lay, g, base, store);
        lay.save_manifest(bd_prefix + ".manifest");
        log("wrote " + bd_prefix + ".blocks (" + std::to_string(disksim::total_blocks(lay)) +
            " blocks) and manifest");
    });

    // ---- query ----
    auto* query_cmd = app.add_subcommand("query", "run one backend/grid point, print a CSV row");
    std::string q_backend, q_base, q_queries, q_kind = "auto", q_lm, q_profile, q_graph, q_ivf,
                q_disk_prefix, q_type, q_gt_ids, q_out;
    std::size_t q_k = 0, q_ef = 0, q_nprobe = 0, q_kprime = 0;
    double q_radius = -1.0, q_efrac = 0.0, q_cache_frac = -1.0;
    query_cmd->add_option("--backend", q_backend,
                          "graph|graph-baseline|ivf|ivf-baseline|disk|disk-baseline")
        ->required();
    query_cmd->add_option("--base", q_base, "corpus vecs file")->required();
    query_cmd->add_option("--queries", q_queries, "query vecs file")->required();
    query_cmd->add_option("--kind", q_kind, "element kind");
    query_cmd->add_option("--type", q_type, "knn | range");
    query_cmd->add_option("--k", q_k, "neighbors for knn");
    query_cmd->add_option("--radius", q_radius, "radius for range");
    query_cmd->add_option("--e-fraction", q_efrac, "derive radius from a corpus fraction");
    query_cmd->add_option("--ef", q_ef, "search queue size (graph/disk)");
    query_cmd->add_option("--nprobe", q_nprobe, "probed lists (ivf)");
    query_cmd->add_option("--k-prime", q_kprime, "refinement count (ivf baseline)");
    query_cmd->add_option("--landmarks", q_lm, "landmark store path");
    query_cmd->add_option("--profile", q_profile, "pruning profile path");
    query_cmd->add_option("--graph", q_graph, "graph index path");
    query_cmd->add_option("--ivf", q_ivf, "ivf index path");
    query_cmd->add_option("--disk-prefix", q_disk_prefix, "disk artifact prefix");
    query_cmd->add_option("--gt-ids", q_gt_ids, "ground truth ids (ivecs) for recall/ap");
    query_cmd->add_option("--cache-frac", q_cache_frac, "adjacency cache fraction (disk)");
    query_cmd->add_option("--out", q_out, "write CSV here instead of stdout");
    query_cmd->callback([&] {
        ensure_cfg();
        const VectorDataset base = load_dataset(q_base, q_kind, cfg.normalize);
        const VectorDataset queries = load_dataset(q_queries, q_kind);
        if (!q_type.empty())
            cfg.query_type = q_type;
        if (q_k)
            cfg.query_k = q_k;
        if (q_ef)
            cfg.query_ef = q_ef;
        if (q_nprobe)
            cfg.query_nprobe = q_nprobe;
        if (q_kprime)
            cfg.query_k_prime = q_kprime;
        if (q_cache_frac >= 0.0)
            cfg.disk_cache_frac = q_cache_frac;
        float radius = static_cast<float>(q_radius >= 0.0 ? q_radius : cfg.query_radius);
        if (cfg.query_type == "range" && q_efrac > 0.0) {
            radius = bench::pick_radius_for_fraction(base, queries, q_efrac);
            log("picked radius " + std::to_string(radius));
        }

        bench::SweepSpec spec;
        spec.dataset_label = cfg.dataset_label;
        spec.base = &base;
        spec.queries = &queries;
        spec.query_type = cfg.query_type;
        spec.k = cfg.query_k;
        spec.radius = radius;
        spec.k_prime = cfg.query_k_prime;
        spec.cache_frac = cfg.disk_cache_frac;

        std::string backend = q_backend;
        for (auto& ch : backend)
            if (ch == '-')
                ch = '_';
        if (backend == "graph" || backend == "ivf" || backend == "disk")
            backend += "_trim";
        spec.backends = {backend};

        GroundTruth gt;
        if (!q_gt_ids.empty()) {
            gt.ids = load_ivecs_rows(q_gt_ids);
            gt.dist_sq.resize(gt.ids.size());
        } else {
            gt = bench::load_or_compute_gt(base, queries, cfg.query_type,
                                           cfg.query_type == "knn"
                                               ? static_cast<double>(cfg.query_k)
                                               : static_cast<double>(radius),
                                           ".trimsearch_gt_cache");
        }
        spec.gt = &gt;

        trim::LandmarkStore lm;
        if (!q_lm.empty()) {
            lm = trim::LandmarkStore::load(q_lm);
            spec.landmarks = &lm;
        }
        trim::PruningProfile prof;
        if (!q_profile.empty()) {
            prof = trim::PruningProfile::load(q_profile);
            spec.profiles = {prof};
        }
        graph::GraphIndex g;
        if (!q_graph.empty()) {
            g = graph::GraphIndex::load(q_graph);
            spec.graph = &g;
        }
        ivf::IvfIndex ix;
        if (!q_ivf.empty()) {
            ix = ivf::IvfIndex::load(q_ivf);
            spec.ivf = &ix;
        }
        disksim::BlockLayout lay;
        std::unique_ptr<disksim::FileBlockStore> store;
        if (!q_disk_prefix.empty()) {
            lay = disksim::BlockLayout::load_manifest(q_disk_prefix + ".manifest");
            store = std::make_unique<disksim::FileBlockStore>(
                q_disk_prefix + ".blocks", lay.block_size, disksim::total_blocks(lay), false);
            if (lay.kind == disksim::LayoutKind::Decoupled) {
                spec.disk_layout = &lay;
                spec.disk_store = store.get();
            } else {
                spec.disk_layout_coupled = &lay;
                spec.disk_store_coupled = store.get();
            }
        }
        spec.ef_grid = {cfg.query_ef};
        spec.nprobe_grid = {cfg.query_nprobe};

        const auto rows = bench::run_sweep(spec);
        if (q_out.empty()) {
            bench::write_csv(std::cout, rows);
        } else {
            std::ofstream out(q_out);
            if (!out)
                throw DataError("cannot open for writing: " + q_out);
            bench::write_csv(out, rows);
            log("wrote " + q_out);
        }
    });

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "full grid from the config file");
    std::string sw_out;
    sweep_cmd->add_option("--out", sw_out, "CSV output path (default stdout)");
    sweep_cmd->callback([&] {
        ensure_cfg();
        if (config_path.empty())
            throw std::invalid_argument("sweep: --config is required");
        if (cfg.base_path.empty() || cfg.queries_path.empty())
            throw DataError("sweep: config must set dataset.base and dataset.queries");
        const VectorDataset base = load_dataset(cfg.base_path, cfg.element_kind, cfg.normalize);
        const VectorDataset queries = load_dataset(cfg.queries_path, cfg.element_kind);

        bench::SweepSpec spec;
        spec.dataset_label = cfg.dataset_label;
        spec.base = &base;
        spec.queries = &queries;
        spec.query_type = cfg.query_type;
        spec.k = cfg.query_k;
        spec.k_prime = cfg.query_k_prime;
        spec.cache_frac = cfg.disk_cache_frac;
        spec.backends = cfg.sweep_backends;
        spec.ef_grid = cfg.sweep_ef_grid;
        spec.nprobe_grid = cfg.sweep_nprobe_grid;

        float radius = static_cast<float>(cfg.query_radius);
        if (cfg.query_type == "range" && cfg.query_e_fraction > 0.0) {
            radius = bench::pick_radius_for_fraction(base, queries, cfg.query_e_fraction);
            log("picked radius " + std::to_string(radius));
        }
        spec.radius = radius;

        GroundTruth gt;
        if (!cfg.gt_ids_path.empty() && !cfg.gt_dist_path.empty()) {
            gt = GroundTruth::load(cfg.gt_ids_path, cfg.gt_dist_path);
        } else {
            gt = bench::load_or_compute_gt(base, queries, cfg.query_type,
                                           cfg.query_type == "knn"
                                               ? static_cast<double>(cfg.query_k)
                                               : static_cast<double>(radius),
                                           ".trimsearch_gt_cache");
        }
        spec.gt = &gt;

        trim::LandmarkStore lm;
        if (!cfg.landmarks_path.empty()) {
            lm = trim::LandmarkStore::load(cfg.landmarks_path);
            spec.landmarks = &lm;
        }
        graph::GraphIndex g;
        if (!cfg.graph_path.empty()) {
            g = graph::GraphIndex::load(cfg.graph_path);
            spec.graph = &g;
        }
        ivf::IvfIndex ix;
        if (!cfg.ivf_path.empty()) {
            ix = ivf::IvfIndex::load(cfg.ivf_path);
            spec.ivf = &ix;
        }
        disksim::BlockLayout lay;
        std::unique_ptr<disksim::FileBlockStore> store;
        if (!cfg.disk_prefix.empty()) {
            lay = disksim::BlockLayout::load_manifest(cfg.disk_prefix + ".manifest");
            store = std::make_unique<disksim::FileBlockStore>(
                cfg.disk_prefix + ".blocks", lay.block_size, disksim::total_blocks(lay), false);
            if (lay.kind == disksim::LayoutKind::Decoupled) {
                spec.disk_layout = &lay;
                spec.disk_store = store.get();
            } else {
                spec.disk_layout_coupled = &lay;
                spec.disk_store_coupled = store.get();
            }
        }

        const bool needs_profiles =
            std::any_of(spec.backends.begin(), spec.backends.end(), [](const std::string& b) {
                return b.find("baseline") == std::string::npos;
            });
        if (needs_profiles) {
            if (spec.landmarks == nullptr)
                throw DataError("sweep: trim backends need paths.landmarks");
            const auto cdfs = sample_cdfs(cfg, base, lm, &queries);
            for (double p : cfg.sweep_p_grid)
                spec.profiles.push_back(finish_profile(trim::calibrate_gamma(cdfs, p), cfg));
        }

        const auto rows = bench::run_sweep(spec);
        const std::string out_path = !sw_out.empty() ? sw_out : cfg.out_path;
        if (out_path.empty()) {
            bench::write_csv(std::cout, rows);
        } else {
            std::ofstream out(out_path);
            if (!out)
                throw DataError("cannot open for writing: " + out_path);
            bench::write_csv(out, rows);
            log("wrote " + out_path);
        }
    });

    // ---- diag-concentration ----
    auto* diag = app.add_subcommand("diag-concentration",
                                    "distance-concentration diagnostic across dimensions");
    std::string dg_dims = "2,8,32,128", dg_base, dg_kind = "auto";
    std::size_t dg_n = 2000, dg_pairs = 20000;
    std::uint64_t dg_seed = 1;
    diag->add_option("--dims", dg_dims, "comma list of dimensions");
    diag->add_option("--n", dg_n, "synthetic corpus size");
    diag->add_option("--sample-pairs", dg_pairs, "sampled pairs/triples per dimension");
    diag->add_option("--seed", dg_seed, "seed");
    diag->add_option("--base", dg_base, "use this corpus instead of synthetic data");
    diag->add_option("--kind", dg_kind, "element kind");
    diag->callback([&] {
        ensure_cfg();
        const auto dims = detail_cfg::parse_list<std::size_t>(dg_dims, "--dims");
        VectorDataset ds;
        if (!dg_base.empty()) {
            ds = load_dataset(dg_base, dg_kind);
        } else {
            const std::size_t dmax = *std::max_element(dims.begin(), dims.end());
            ds = make_normal_dataset(dg_n, dmax, dg_seed);
        }
        const auto rows = concentration_profile(ds, dims, dg_pairs, dg_seed);
        std::cout << "dim,dist_mean,dist_stddev,stddev_over_mean,bound_mean,bound_over_dist\n";
        for (const auto& r : rows) {
            std::cout << r.dim << ',' << r.pair_distance.mean << ',' << r.pair_distance.stddev
                      << ',' << r.pair_distance.stddev / r.pair_distance.mean << ','
                      << r.strict_bound_width.mean << ','
                      << r.strict_bound_width.mean / r.pair_distance.mean << "\n";
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace trimsearch::cli
