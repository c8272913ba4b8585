#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace lrc {

struct PackEntry {
    std::size_t seq = 0;  // index into the input length list
    int used = 0;         // length occupied in the pack (clipped to capacity)
};

/// Order-preserving assignment of sequences to fixed-capacity packs, plus the
/// utilization metrics used to compare against the pad-and-clip baseline.
struct PackPlan {
    int capacity = 0;
    std::vector<std::vector<PackEntry>> packs;
    std::vector<std::size_t> clipped;  // sequences longer than capacity
    double utilization = 1.0;
    double pad_utilization = 1.0;
    double iteration_ratio = 1.0;  // sequences per pack, the speedup proxy
};

/// Greedy next-fit in input order: a sequence joins the current pack when it
/// fits, otherwise the pack closes and a new one starts. Oversized sequences
/// are clipped to capacity and flagged. Next-fit is optimal among contiguous
/// order-preserving partitions.
inline PackPlan pack_sequences(std::span<const int> lengths, int capacity) {
    if (capacity < 1) throw std::invalid_argument("pack_sequences: capacity must be >= 1");
    for (int len : lengths) {
        if (len < 1) throw std::invalid_argument("pack_sequences: non-positive length");
    }

    PackPlan plan;
    plan.capacity = capacity;
    if (lengths.empty()) return plan;

    long long packed_total = 0;
    int current_fill = capacity + 1;  // forces a fresh pack on the first sequence
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        int used = lengths[i];
        if (used > capacity) {
            used = capacity;
            plan.clipped.push_back(i);
        }
        if (current_fill + used > capacity) {
            plan.packs.emplace_back();
            current_fill = 0;
        }
        plan.packs.back().push_back({i, used});
        current_fill += used;
        packed_total += used;
    }

    plan.utilization = static_cast<double>(packed_total) /
                       (static_cast<double>(plan.packs.size()) * capacity);
    plan.pad_utilization = static_cast<double>(packed_total) /
                           (static_cast<double>(lengths.size()) * capacity);
    plan.iteration_ratio =
        static_cast<double>(lengths.size()) / static_cast<double>(plan.packs.size());
    return plan;
}

struct PaddingComparison {
    double pack_util = 1.0;
    double pad_util = 1.0;
    double iteration_ratio = 1.0;
};

/// Packing vs the pad-and-clip baseline on the same workload. The baseline
/// spends one capacity-sized slot per sequence.
inline PaddingComparison compare_padding(std::span<const int> lengths, int capacity) {
    const PackPlan plan = pack_sequences(lengths, capacity);
    if (lengths.empty()) return {};
    return {plan.utilization, plan.pad_utilization, plan.iteration_ratio};
}

}  // namespace lrc
