#pragma once

// Single-source shortest paths driven by the concurrent heap. Small rounds
// sweep the whole active set; once the active set exceeds the threshold the
// entries move through the heap so the nearest nodes are explored first,
// which cuts wasted relaxations. A plain FIFO-frontier variant provides the
// visit-count baseline, and Dijkstra is the exactness oracle.

#include <cstdint>
#include <limits>
#include <vector>

#include "batchheap/graph.hpp"
#include "batchheap/heap.hpp"

namespace batchheap {

inline constexpr std::uint64_t kUnreachable =
    std::numeric_limits<std::uint64_t>::max();

struct SsspResult {
    std::vector<std::uint64_t> dist;  // kUnreachable when not reachable
    std::uint64_t visits = 0;         // node explorations performed
};

struct SsspConfig {
    std::uint64_t threshold = 10'000;  // active-set size that engages the heap
    std::uint32_t workers = 4;
    std::uint32_t heap_node_capacity = 32;
};

SsspResult sssp(const Graph& graph, std::uint32_t source,
                const SsspConfig& config);

// Same relaxation discipline without the heap: every round sweeps the whole
// active set in insertion order.
SsspResult sssp_fifo(const Graph& graph, std::uint32_t source,
                     std::uint32_t workers);

// Textbook Dijkstra, the exactness oracle.
std::vector<std::uint64_t> dijkstra(const Graph& graph, std::uint32_t source);

}  // namespace batchheap
