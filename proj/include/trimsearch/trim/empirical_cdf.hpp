#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace trimsearch::trim {

/// Empirical CDF backed by a sorted sample array. Evaluation interpolates
/// linearly between order statistics; quantiles invert the interpolation, so
/// quantile(0) is the sample minimum and quantile(1) the maximum.
class EmpiricalCdf {
  public:
    EmpiricalCdf() = default;

    explicit EmpiricalCdf(std::vector<double> samples) : samples_(std::move(samples)) {
        if (samples_.empty())
            throw std::invalid_argument("EmpiricalCdf: empty sample");
        std::sort(samples_.begin(), samples_.end());
    }

    std::size_t size() const { return samples_.size(); }
    double min() const { return samples_.front(); }
    double max() const { return samples_.back(); }
    const std::vector<double>& samples() const { return samples_; }

    /// P(X <= v), linearly interpolated over the sorted sample.
    double cdf(double v) const {
        const std::size_t n = samples_.size();
        if (v <= samples_.front())
            return v < samples_.front() ? 0.0 : 0.0;
        if (v >= samples_.back())
            return 1.0;
        if (n == 1)
            return v < samples_[0] ? 0.0 : 1.0;
        // first index with samples_[i] >= v
        const auto it = std::lower_bound(samples_.begin(), samples_.end(), v);
        const std::size_t hi = static_cast<std::size_t>(it - samples_.begin());
        const std::size_t lo = hi - 1;
        const double span = samples_[hi] - samples_[lo];
        const double frac = span > 0.0 ? (v - samples_[lo]) / span : 0.0;
        return (static_cast<double>(lo) + frac) / static_cast<double>(n - 1);
    }

    /// Inverse of cdf(); p in [0,1].
    double quantile(double p) const {
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("EmpiricalCdf::quantile: p must be in [0,1]");
        const std::size_t n = samples_.size();
        if (n == 1)
            return samples_[0];
        const double pos = p * static_cast<double>(n - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        if (lo + 1 >= n)
            return samples_.back();
        const double frac = pos - static_cast<double>(lo);
        return samples_[lo] + frac * (samples_[lo + 1] - samples_[lo]);
    }

    /// Two-sample Kolmogorov-Smirnov distance (sup-norm of the step CDFs).
    static double ks_distance(const EmpiricalCdf& a, const EmpiricalCdf& b) {
        const auto& xa = a.samples_;
        const auto& xb = b.samples_;
        const double na = static_cast<double>(xa.size());
        const double nb = static_cast<double>(xb.size());
        std::size_t ia = 0, ib = 0;
        double max_diff = 0.0;
        while (ia < xa.size() && ib < xb.size()) {
            const double v = std::min(xa[ia], xb[ib]);
            while (ia < xa.size() && xa[ia] <= v)
                ++ia;
            while (ib < xb.size() && xb[ib] <= v)
                ++ib;
            max_diff = std::max(max_diff,
                                std::abs(static_cast<double>(ia) / na -
                                         static_cast<double>(ib) / nb));
        }
        return max_diff;
    }

  private:
    std::vector<double> samples_;
};

} // namespace trimsearch::trim
