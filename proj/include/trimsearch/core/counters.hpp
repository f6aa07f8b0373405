#pragma once

#include <cstdint>

namespace trimsearch {

/// Per-query instrumentation. `evaluated` counts candidate-evaluation events;
/// every event ends in exactly one of `dc` (exact distance computed) or
/// `pruned` (skipped via a lower bound), so dc + pruned == evaluated.
struct SearchCounters {
    std::uint64_t dc = 0;        // exact distance computations
    std::uint64_t edc = 0;       // estimated (ADC / bound) computations
    std::uint64_t pruned = 0;    // candidates skipped without an exact computation
    std::uint64_t evaluated = 0; // candidate evaluation events
    std::uint64_t hops = 0;      // nodes expanded (graph/disk traversals)

    double pruning_ratio() const {
        const std::uint64_t denom = pruned + dc;
        return denom == 0 ? 0.0 : static_cast<double>(pruned) / static_cast<double>(denom);
    }

    SearchCounters& operator+=(const SearchCounters& o) {
        dc += o.dc;
        edc += o.edc;
        pruned += o.pruned;
        evaluated += o.evaluated;
        hops += o.hops;
        return *this;
    }
};

} // namespace trimsearch
