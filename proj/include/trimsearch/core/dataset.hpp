#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "trimsearch/core/io_util.hpp"

namespace trimsearch {

using VectorView = std::span<const float>;

/// A dense float32 dataset, row-major. Rows are implicitly ids 0..count-1.
/// Immutable after construction; safe for concurrent reads.
struct VectorDataset {
    std::size_t dim = 0;
    std::size_t count = 0;
    std::vector<float> data; // dim * count floats

    VectorDataset() = default;
    VectorDataset(std::size_t d, std::size_t n) : dim(d), count(n), data(d * n, 0.0f) {}

    VectorView row(std::size_t i) const { return {data.data() + i * dim, dim}; }
    float* mutable_row(std::size_t i) { return data.data() + i * dim; }

    bool empty() const { return count == 0; }

    /// Rejects non-finite values and shape mismatches. Call after filling `data`.
    void validate() const {
        if (dim == 0)
            throw DataError("dataset dimension must be >= 1");
        if (data.size() != dim * count)
            throw DataError("dataset buffer size does not match dim*count");
        for (float v : data) {
            if (!std::isfinite(v))
                throw DataError("dataset contains a non-finite value");
        }
    }

    /// Scales every row to unit L2 norm. Zero rows are left untouched.
    void normalize_rows() {
        for (std::size_t i = 0; i < count; ++i) {
            float* r = mutable_row(i);
            double sq = 0.0;
            for (std::size_t j = 0; j < dim; ++j)
                sq += static_cast<double>(r[j]) * r[j];
            if (sq <= 0.0)
                continue;
            const float inv = static_cast<float>(1.0 / std::sqrt(sq));
            for (std::size_t j = 0; j < dim; ++j)
                r[j] *= inv;
        }
    }
};

} // namespace trimsearch
