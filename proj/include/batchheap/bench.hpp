#pragma once

// Benchmark harness: parameter-sweep runs over the concurrent heap with
// exact instrumentation counters and CSV reports. Every timed run is
// preceded by a correctness pass (quiescent invariants + multiset
// conservation) on the same seed; timing wraps the op loop only.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "batchheap/heap.hpp"
#include "batchheap/workload.hpp"

namespace batchheap {

struct WorkloadSpec {
    Variant variant = Variant::TD;
    std::uint32_t k = 64;
    std::uint32_t workers = 4;
    std::uint64_t total_keys = 1'000'000;
    KeyOrder key_order = KeyOrder::Random;
    OpPattern op_pattern = OpPattern::InsertAllThenDeleteAll;
    std::uint32_t initial_levels = 0;  // pre-inserted complete heap levels
    std::uint32_t full_batch_pct = 100;
    std::uint64_t seed = 1;
    HeapOptions options{};
};

struct BenchRow {
    WorkloadSpec spec;
    double wall_seconds = 0.0;
    std::uint64_t ops = 0;
    double ops_per_second = 0.0;
    double mean_nodes_traversed = 0.0;
    HeapCounters counters;
};

BenchRow run_workload(const WorkloadSpec& spec);

// One row per grid point; throws on the first correctness failure, naming
// the failing spec.
std::vector<BenchRow> run_sweep(std::span<const WorkloadSpec> grid);

void write_csv(std::ostream& out, std::span<const BenchRow> rows);

}  // namespace batchheap
