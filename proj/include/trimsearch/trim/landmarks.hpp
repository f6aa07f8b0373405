#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "trimsearch/core/dataset.hpp"
#include "trimsearch/core/distance.hpp"
#include "trimsearch/core/io_util.hpp"
#include "trimsearch/core/parallel.hpp"
#include "trimsearch/pq/pq.hpp"

namespace trimsearch::trim {

/// Per-vector landmark data: the PQ code identifying the landmark and the
/// precomputed plain distance Γ(l, x). Immutable after build.
struct LandmarkStore {
    pq::PqCodebook codebook;
    std::size_t count = 0;
    std::vector<std::uint8_t> codes; // count * m
    std::vector<float> lx_dist;      // count, non-squared

    const std::uint8_t* code(std::size_t i) const { return codes.data() + i * codebook.m(); }

    pq::PqCode code_vec(std::size_t i) const {
        return pq::PqCode(code(i), code(i) + codebook.m());
    }

    void save(const std::string& path) const {
        auto out = detail::open_output(path);
        pq::save_codebook(out, codebook);
        detail::write_le(out, static_cast<std::uint64_t>(count));
        out.write(reinterpret_cast<const char*>(codes.data()),
                  static_cast<std::streamsize>(codes.size()));
        detail::write_le_array(out, lx_dist.data(), lx_dist.size());
        if (!out)
            throw DataError("write failed: " + path);
    }

    static LandmarkStore load(const std::string& path) {
        auto in = detail::open_input(path);
        LandmarkStore lm;
        lm.codebook = pq::load_codebook(in);
        lm.count = detail::read_le_or_throw<std::uint64_t>(in, "landmark count");
        lm.codes.resize(lm.count * lm.codebook.m());
        if (!in.read(reinterpret_cast<char*>(lm.codes.data()),
                     static_cast<std::streamsize>(lm.codes.size())))
            throw DataError("truncated landmark codes: " + path);
        lm.lx_dist.resize(lm.count);
        detail::read_le_array_or_throw(in, lm.lx_dist.data(), lm.count, "landmark distances");
        return lm;
    }
};

/// Encodes every row and stores Γ(l, x) for it.
inline LandmarkStore build_landmarks(const VectorDataset& ds, const pq::PqCodebook& cb) {
    if (ds.dim != cb.dim)
        throw std::invalid_argument("build_landmarks: dimension mismatch");
    LandmarkStore lm;
    lm.codebook = cb;
    lm.count = ds.count;
    lm.codes.resize(ds.count * cb.m());
    lm.lx_dist.resize(ds.count);
    parallel_for(ds.count, [&](std::size_t i) {
        const pq::PqCode code = pq::encode(cb, ds.row(i));
        std::copy(code.begin(), code.end(), lm.codes.begin() + i * cb.m());
        const std::vector<float> l = pq::decode(cb, code);
        lm.lx_dist[i] = std::sqrt(euclidean_sq(ds.row(i), VectorView(l)));
    });
    return lm;
}

} // namespace trimsearch::trim
