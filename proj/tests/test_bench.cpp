#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "batchheap/bench.hpp"
#include "doctest.h"

using namespace batchheap;

TEST_CASE("generate_keys orders and determinism") {
    auto asc = generate_keys(KeyOrder::Ascend, 5, 1);
    CHECK(std::is_sorted(asc.begin(), asc.end()));
    auto desc = generate_keys(KeyOrder::Descend, 5, 1);
    CHECK(std::is_sorted(desc.rbegin(), desc.rend()));
    auto r1 = generate_keys(KeyOrder::Random, 100'000, 42);
    auto r2 = generate_keys(KeyOrder::Random, 100'000, 42);
    CHECK(r1 == r2);
    CHECK(generate_keys(KeyOrder::Random, 1000, 43) != r1);
}

TEST_CASE("sweep yields one row per grid point") {
    std::vector<WorkloadSpec> grid;
    for (std::uint32_t k : {1u, 4u}) {
        for (std::uint32_t workers : {1u, 2u}) {
            WorkloadSpec spec;
            spec.variant = Variant::TD;
            spec.k = k;
            spec.workers = workers;
            spec.total_keys = 4000;
            spec.seed = 5;
            grid.push_back(spec);
        }
    }
    auto rows = run_sweep(grid);
    CHECK(rows.size() == 4);
    for (const auto& row : rows) CHECK(row.ops > 0);

    std::ostringstream csv;
    write_csv(csv, rows);
    std::size_t lines = 0;
    for (char c : csv.str())
        if (c == '\n') ++lines;
    CHECK(lines == 5);  // header + 4 rows
    CHECK(csv.str().rfind("variant,k,workers,", 0) == 0);
}

TEST_CASE("identical spec and seed reproduce identical counters") {
    WorkloadSpec spec;
    spec.variant = Variant::BU;
    spec.k = 8;
    spec.workers = 1;
    spec.total_keys = 20'000;
    spec.full_batch_pct = 70;
    spec.seed = 99;
    auto a = run_workload(spec);
    auto b = run_workload(spec);
    CHECK(a.ops == b.ops);
    CHECK(a.counters.merges == b.counters.merges);
    CHECK(a.counters.elided_merges == b.counters.elided_merges);
    CHECK(a.counters.propagation_node_visits ==
          b.counters.propagation_node_visits);
    CHECK(a.counters.early_stops == b.counters.early_stops);
    CHECK(a.counters.max_partial_len == b.counters.max_partial_len);
}

TEST_CASE("ascending inserts traverse no more than descending (bu)") {
    auto run_order = [](KeyOrder order) {
        WorkloadSpec spec;
        spec.variant = Variant::BU;
        spec.k = 16;
        spec.workers = 1;
        spec.total_keys = 64'000;
        spec.key_order = order;
        spec.op_pattern = OpPattern::InsertAllThenDeleteAll;
        spec.seed = 3;
        return run_workload(spec);
    };
    auto asc = run_order(KeyOrder::Ascend);
    auto desc = run_order(KeyOrder::Descend);
    CHECK(asc.mean_nodes_traversed < desc.mean_nodes_traversed);
    CHECK(asc.counters.early_stops > 0);
}

TEST_CASE("partial batches need more operations for the same keys") {
    auto run_frac = [](std::uint32_t pct) {
        WorkloadSpec spec;
        spec.variant = Variant::TD;
        spec.k = 8;
        spec.workers = 2;
        spec.total_keys = 16'000;
        spec.full_batch_pct = pct;
        spec.seed = 12;
        return run_workload(spec);
    };
    auto full = run_frac(100);
    auto quarter = run_frac(25);
    CHECK(quarter.counters.inserts > full.counters.inserts);
}

TEST_CASE("initial levels pre-seed the heap") {
    WorkloadSpec spec;
    spec.variant = Variant::TD;
    spec.k = 4;
    spec.workers = 1;
    spec.total_keys = 4000;
    spec.initial_levels = 5;
    spec.op_pattern = OpPattern::InsDelPairs;
    spec.seed = 8;
    auto row = run_workload(spec);
    CHECK(row.ops > 0);
}
