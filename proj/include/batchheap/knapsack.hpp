#pragma once

// Branch-and-bound 0/1 knapsack on the concurrent heap. Workers repeatedly
// delete a batch of best-benefit nodes (max order via negated keys), expand
// take/skip children, prune against the shared best, and insert survivors.
// An optional garbage-collection pass drains the heap and drops nodes whose
// bound can no longer beat the best once the heap outgrows a threshold.

#include <cstdint>
#include <vector>

#include "batchheap/heap.hpp"

namespace batchheap {

enum class KnapsackType {
    StronglyCorrelated,
    AlmostStronglyCorrelated,
    EvenOdd,
    SubsetSum,
};

const char* knapsack_type_name(KnapsackType type);

struct KnapsackInstance {
    KnapsackType type = KnapsackType::SubsetSum;
    std::uint32_t n = 0;
    std::uint32_t range = 0;
    std::vector<std::uint32_t> weight;
    std::vector<std::uint32_t> benefit;
    std::uint64_t capacity = 0;
};

// Martello-style instance families. Weights are uniform in [1, R];
// strongly correlated: b = w + R/10; almost strongly correlated: b uniform
// in [w + R/10 - R/500, w + R/10 + R/500]; even-odd: strongly correlated
// with even weights and odd capacity; subset sum: b = w. Capacity n*R/4.
KnapsackInstance generate_knapsack(KnapsackType type, std::uint32_t n,
                                   std::uint32_t range, std::uint64_t seed);

// Dynamic-programming oracle (1-D rolling table, O(n*W) time, O(W) space).
std::uint64_t knapsack_dp(const KnapsackInstance& instance);

// Upper bound via the fractional relaxation over items [level, n) of the
// density-sorted view; admissible for any completion of (weight, benefit).
std::uint64_t knapsack_bound(const KnapsackInstance& sorted_view,
                             std::uint32_t level, std::uint64_t weight,
                             std::uint64_t benefit);

// Returns a copy of the instance with items ordered by decreasing
// benefit/weight density (the order knapsack_bound assumes).
KnapsackInstance density_sorted(const KnapsackInstance& instance);

struct BbConfig {
    std::uint32_t workers = 2;
    std::uint64_t gc_threshold = 1 << 16;  // keys; 0 disables GC
    std::uint32_t heap_node_capacity = 32;
};

struct BbOutcome {
    std::uint64_t best = 0;
    std::uint64_t explored = 0;
    std::uint64_t gc_passes = 0;
};

BbOutcome knapsack_bb(const KnapsackInstance& instance,
                      const BbConfig& config);

}  // namespace batchheap
