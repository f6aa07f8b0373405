#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "trimsearch/core/dataset.hpp"
#include "trimsearch/core/distance.hpp"
#include "trimsearch/core/io_util.hpp"
#include "trimsearch/core/parallel.hpp"
#include "trimsearch/trim/empirical_cdf.hpp"
#include "trimsearch/trim/landmarks.hpp"

namespace trimsearch::trim {

/// Triangle geometry of a data vector and its landmark, reduced to the two
/// scalars that determine the angle distribution under standard-normal queries.
struct LandmarkGeometry {
    double h1 = 0.0; // signed projection of l onto unit(x - l)
    double h2 = 0.0; // remaining landmark mass, sqrt(|l|^2 - h1^2)

    static LandmarkGeometry from(VectorView x, VectorView l) {
        if (x.size() != l.size())
            throw std::invalid_argument("LandmarkGeometry: dimension mismatch");
        double nr_sq = 0.0, nl_sq = 0.0, proj = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = static_cast<double>(x[i]) - l[i];
            nr_sq += r * r;
            nl_sq += static_cast<double>(l[i]) * l[i];
            proj += r * l[i];
        }
        if (nr_sq <= 0.0)
            throw std::invalid_argument("LandmarkGeometry: x equals its landmark");
        LandmarkGeometry g;
        g.h1 = proj / std::sqrt(nr_sq);
        g.h2 = std::sqrt(std::max(nl_sq - g.h1 * g.h1, 0.0));
        return g;
    }
};

/// One draw of the three independent components behind Z^2 when the query is
/// standard normal: a ~ chi2_1(h1^2), b ~ chi2_1(h2^2), c_sum ~ chi2_{d-3}.
struct NormalQuerySample {
    double a = 0.0;
    double b = 0.0;
    double c_sum = 0.0;
};

inline NormalQuerySample draw_normal_query_sample(const LandmarkGeometry& geom, std::size_t d,
                                                  std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::chi_squared_distribution<double> chi(static_cast<double>(d - 3));
    NormalQuerySample s;
    const double q1 = normal(rng) + geom.h1;
    const double q2 = normal(rng) - geom.h2;
    s.a = q1 * q1;
    s.b = q2 * q2;
    s.c_sum = chi(rng);
    return s;
}

/// Samples Z^2 = a/(a+b+c) from the three one-dimensional components and maps
/// it to a CDF of 1-Z. The mapping realizes the transform
///   F_{1-Z}(y) = 1/2 -+ 1/2 * F_{Z^2}((1-y)^2)
/// exactly, by materializing both branches 1-sqrt(z^2) and 1+sqrt(z^2) for
/// every draw.
inline EmpiricalCdf sample_one_minus_z_analytic(const LandmarkGeometry& geom, std::size_t d,
                                                std::size_t n_samples, std::uint64_t seed) {
    if (d < 4)
        throw std::invalid_argument("sample_one_minus_z_analytic: requires d >= 4");
    if (n_samples == 0)
        throw std::invalid_argument("sample_one_minus_z_analytic: n_samples must be positive");
    std::mt19937_64 rng(seed);
    std::vector<double> values;
    values.reserve(2 * n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const NormalQuerySample s = draw_normal_query_sample(geom, d, rng);
        const double z2 = s.a / (s.a + s.b + s.c_sum);
        const double r = std::sqrt(z2);
        values.push_back(1.0 - r);
        values.push_back(1.0 + r);
    }
    return EmpiricalCdf(std::move(values));
}

struct EmpiricalSampleParams {
    std::size_t sample_x = 1000;     // data vectors sampled
    std::size_t queries_per_x = 200; // query draws per data vector
    bool pooled = false;             // pool all pairs into one CDF
    std::uint64_t seed = 1;
};

/// Directly samples 1 - cos(x-l, q-l) over (data vector, query) pairs.
/// Pairs with a degenerate edge (Γ(l,x)=0 or Γ(l,q)=0) contribute nothing.
inline std::vector<EmpiricalCdf> sample_one_minus_z_empirical(const VectorDataset& ds,
                                                              const LandmarkStore& lm,
                                                              const VectorDataset& queries,
                                                              const EmpiricalSampleParams& params) {
    if (queries.count == 0)
        throw std::invalid_argument("sample_one_minus_z_empirical: need at least one query");
    if (queries.dim != ds.dim)
        throw std::invalid_argument("sample_one_minus_z_empirical: query dimension mismatch");
    const std::size_t n_x = std::min(params.sample_x, ds.count);

    std::vector<std::size_t> xs(ds.count);
    std::iota(xs.begin(), xs.end(), 0);
    std::mt19937_64 pick_rng(params.seed ^ 0xc2b2ae3d27d4eb4full);
    for (std::size_t i = 0; i < n_x; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, ds.count - 1);
        std::swap(xs[i], xs[pick(pick_rng)]);
    }

    std::vector<std::vector<double>> values(n_x);
    parallel_for(n_x, [&](std::size_t xi) {
        const std::size_t row = xs[xi];
        const std::vector<float> l = pq::decode(lm.codebook, lm.code_vec(row));
        const VectorView x = ds.row(row);
        std::vector<double> diff(ds.dim);
        double nx_sq = 0.0;
        for (std::size_t j = 0; j < ds.dim; ++j) {
            diff[j] = static_cast<double>(x[j]) - l[j];
            nx_sq += diff[j] * diff[j];
        }
        if (nx_sq <= 0.0)
            return; // landmark coincides with x: bound is exact, no angle exists
        const double nx = std::sqrt(nx_sq);
        std::mt19937_64 rng(params.seed + 0x9e3779b9ull * (xi + 1));
        std::uniform_int_distribution<std::size_t> pick_q(0, queries.count - 1);
        auto& out = values[xi];
        out.reserve(params.queries_per_x);
        for (std::size_t s = 0; s < params.queries_per_x; ++s) {
            const VectorView q = queries.row(pick_q(rng));
            double nq_sq = 0.0, dp = 0.0;
            for (std::size_t j = 0; j < ds.dim; ++j) {
                const double e = static_cast<double>(q[j]) - l[j];
                nq_sq += e * e;
                dp += e * diff[j];
            }
            if (nq_sq <= 0.0)
                continue;
            out.push_back(1.0 - dp / (nx * std::sqrt(nq_sq)));
        }
    });

    std::vector<EmpiricalCdf> cdfs;
    if (params.pooled) {
        std::vector<double> pool;
        for (auto& v : values)
            pool.insert(pool.end(), v.begin(), v.end());
        if (pool.empty())
            throw DataError("sample_one_minus_z_empirical: all sampled pairs degenerate");
        cdfs.emplace_back(std::move(pool));
    } else {
        for (auto& v : values) {
            if (!v.empty())
                cdfs.emplace_back(std::move(v));
        }
        if (cdfs.empty())
            throw DataError("sample_one_minus_z_empirical: all sampled pairs degenerate");
    }
    return cdfs;
}

struct AnalyticSampleParams {
    std::size_t sample_x = 1000;
    std::size_t draws_per_x = 10000;
    std::uint64_t seed = 1;
};

/// Analytic-strategy CDFs for a sample of data vectors: one CDF per sampled
/// vector, each derived from its landmark geometry.
inline std::vector<EmpiricalCdf> sample_analytic_cdfs(const VectorDataset& ds,
                                                      const LandmarkStore& lm,
                                                      const AnalyticSampleParams& params) {
    if (ds.dim < 4)
        throw std::invalid_argument("analytic strategy requires d >= 4");
    const std::size_t n_x = std::min(params.sample_x, ds.count);
    std::vector<std::size_t> xs(ds.count);
    std::iota(xs.begin(), xs.end(), 0);
    std::mt19937_64 pick_rng(params.seed ^ 0xc2b2ae3d27d4eb4full);
    for (std::size_t i = 0; i < n_x; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, ds.count - 1);
        std::swap(xs[i], xs[pick(pick_rng)]);
    }

    std::vector<std::vector<double>> values(n_x);
    parallel_for(n_x, [&](std::size_t xi) {
        const std::size_t row = xs[xi];
        const std::vector<float> l = pq::decode(lm.codebook, lm.code_vec(row));
        if (lm.lx_dist[row] <= 0.0f)
            return;
        const LandmarkGeometry geom = LandmarkGeometry::from(ds.row(row), VectorView(l));
        const EmpiricalCdf cdf = sample_one_minus_z_analytic(
            geom, ds.dim, params.draws_per_x, params.seed + 0x9e3779b9ull * (xi + 1));
        values[xi] = cdf.samples();
    });

    std::vector<EmpiricalCdf> cdfs;
    for (auto& v : values) {
        if (!v.empty())
            cdfs.emplace_back(std::move(v));
    }
    if (cdfs.empty())
        throw DataError("sample_analytic_cdfs: all sampled vectors degenerate");
    return cdfs;
}

/// Calibrated relaxation factor plus the provenance needed to reproduce it.
struct PruningProfile {
    double p = -1.0;
    double gamma = -1.0;
    std::string strategy = "none";
    std::uint64_t seed = 0;
    std::size_t sample_x = 0;
    std::size_t samples_per_x = 0;

    bool calibrated() const { return gamma >= 0.0; }

    static PruningProfile manual(double gamma_value) {
        if (gamma_value < 0.0)
            throw std::invalid_argument("PruningProfile::manual: gamma must be nonnegative");
        PruningProfile prof;
        prof.gamma = gamma_value;
        prof.strategy = "manual";
        return prof;
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out)
            throw DataError("cannot open for writing: " + path);
        out.precision(17);
        out << "trimsearch-profile v1\n";
        out << "p = " << p << "\n";
        out << "gamma = " << gamma << "\n";
        out << "strategy = " << strategy << "\n";
        out << "seed = " << seed << "\n";
        out << "sample_x = " << sample_x << "\n";
        out << "samples_per_x = " << samples_per_x << "\n";
    }

    static PruningProfile load(const std::string& path) {
        std::ifstream in(path);
        if (!in)
            throw DataError("cannot open for reading: " + path);
        std::string header;
        std::getline(in, header);
        if (header != "trimsearch-profile v1")
            throw DataError(path + ": not a pruning profile file");
        PruningProfile prof;
        std::string line;
        while (std::getline(in, line)) {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            std::string key = line.substr(0, eq);
            std::string value = line.substr(eq + 1);
            auto strip = [](std::string& s) {
                while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
                    s.erase(s.begin());
                while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
                    s.pop_back();
            };
            strip(key);
            strip(value);
            if (key == "p")
                prof.p = std::stod(value);
            else if (key == "gamma")
                prof.gamma = std::stod(value);
            else if (key == "strategy")
                prof.strategy = value;
            else if (key == "seed")
                prof.seed = std::stoull(value);
            else if (key == "sample_x")
                prof.sample_x = std::stoull(value);
            else if (key == "samples_per_x")
                prof.samples_per_x = std::stoull(value);
            else
                throw DataError(path + ": unknown profile key '" + key + "'");
        }
        return prof;
    }
};

/// Global gamma for confidence p: the (1-p) quantile per sampled vector,
/// minimized over the sample. p=1 therefore maps to the smallest observed
/// 1-Z value.
inline PruningProfile calibrate_gamma(const std::vector<EmpiricalCdf>& cdfs, double p) {
    if (cdfs.empty())
        throw std::invalid_argument("calibrate_gamma: no CDFs");
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("calibrate_gamma: p must be in [0,1]");
    double gamma = std::numeric_limits<double>::max();
    for (const auto& cdf : cdfs)
        gamma = std::min(gamma, cdf.quantile(1.0 - p));
    PruningProfile prof;
    prof.p = p;
    prof.gamma = std::max(gamma, 0.0); // float roundoff can push 1-cos a hair below 0
    prof.sample_x = cdfs.size();
    prof.samples_per_x = cdfs.front().size();
    return prof;
}

} // namespace trimsearch::trim
