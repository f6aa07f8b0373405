#pragma once

#include <stdexcept>

namespace trimsearch::trim {

/// Triangle-inequality lower bound on Γ(q,x)^2 from the landmark triangle:
/// (Γ(l,q) − Γ(l,x))^2. Inputs are plain (non-squared) distances.
inline float strict_lb(float gl_q, float gl_x) {
    if (gl_q < 0.0f || gl_x < 0.0f)
        throw std::invalid_argument("strict_lb: distances must be nonnegative");
    const float d = gl_q - gl_x;
    return d * d;
}

/// Relaxed bound: strict_lb + 2*gamma*Γ(l,q)*Γ(l,x). Equals Γ(q,x)^2 exactly
/// when gamma = 1 − cos(theta) for the actual triangle.
inline float relaxed_lb(float gl_q, float gl_x, float gamma) {
    if (gamma < 0.0f)
        throw std::invalid_argument("relaxed_lb: gamma must be nonnegative");
    return strict_lb(gl_q, gl_x) + 2.0f * gamma * gl_q * gl_x;
}

/// Prune iff the bound strictly exceeds the squared-distance threshold.
inline bool prune_decision(float lb, float threshold_sq) {
    return lb > threshold_sq;
}

} // namespace trimsearch::trim
