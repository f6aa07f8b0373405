#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

namespace trimsearch {

/// Squared Euclidean distance between two raw float arrays of length `dim`.
/// Callers take square roots explicitly where a formula needs the plain distance.
inline float euclidean_sq(const float* a, const float* b, std::size_t dim) {
    float acc0 = 0.0f, acc1 = 0.0f, acc2 = 0.0f, acc3 = 0.0f;
    std::size_t i = 0;
    for (; i + 4 <= dim; i += 4) {
        const float d0 = a[i] - b[i];
        const float d1 = a[i + 1] - b[i + 1];
        const float d2 = a[i + 2] - b[i + 2];
        const float d3 = a[i + 3] - b[i + 3];
        acc0 += d0 * d0;
        acc1 += d1 * d1;
        acc2 += d2 * d2;
        acc3 += d3 * d3;
    }
    for (; i < dim; ++i) {
        const float d = a[i] - b[i];
        acc0 += d * d;
    }
    return (acc0 + acc1) + (acc2 + acc3);
}

inline float euclidean_sq(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("euclidean_sq: dimension mismatch");
    return euclidean_sq(a.data(), b.data(), a.size());
}

inline float euclidean(std::span<const float> a, std::span<const float> b) {
    return std::sqrt(euclidean_sq(a, b));
}

inline float l2_norm_sq(std::span<const float> a) {
    float acc = 0.0f;
    for (float v : a)
        acc += v * v;
    return acc;
}

inline float dot(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: dimension mismatch");
    float acc = 0.0f;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i] * b[i];
    return acc;
}

} // namespace trimsearch
