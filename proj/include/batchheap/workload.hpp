#pragma once

// Concurrent workload drivers: the instrumented mixed-op stress runner used
// by the linearizability suite, and the deterministic key generators shared
// with the benchmark harness. Workers start behind a barrier and a watchdog
// aborts the process if a run wedges (deadlock evidence).

#include <cstdint>
#include <vector>

#include "batchheap/heap.hpp"
#include "batchheap/history.hpp"

namespace batchheap {

struct StressSpec {
    Variant variant = Variant::TD;
    std::uint32_t k = 4;
    std::uint32_t workers = 4;
    std::uint64_t ops_per_worker = 1000;
    std::uint32_t partial_pct = 20;  // % of inserts smaller than k
    std::uint64_t seed = 1;
    Key key_range = Key{1} << 32;
    HeapOptions options{};
    std::uint32_t watchdog_seconds = 30;
};

struct StressOutcome {
    History history;
    HeapCounters counters;
    InvariantReport invariants;
    bool multiset_ok = false;
    std::string multiset_detail;

    bool ok() const { return invariants.ok && multiset_ok; }
};

StressOutcome run_stress(const StressSpec& spec);

enum class KeyOrder { Random, Ascend, Descend };
enum class OpPattern { InsertAllThenDeleteAll, InsDelPairs };

const char* key_order_name(KeyOrder order);
const char* op_pattern_name(OpPattern pattern);

// Deterministic for a fixed seed; ascend/descend are exactly sorted.
std::vector<Key> generate_keys(KeyOrder order, std::uint64_t n,
                               std::uint64_t seed);

}  // namespace batchheap
