#include "batchheap/bench.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

namespace batchheap {

namespace {

struct WorkerPlan {
    std::vector<std::vector<Key>> batches;
};

// Deterministically chop each worker's key share into full/partial batches.
std::vector<WorkerPlan> plan_batches(const WorkloadSpec& spec,
                                     std::span<const Key> keys) {
    std::vector<WorkerPlan> plans(spec.workers);
    const std::uint64_t share = keys.size() / spec.workers;
    std::uint64_t begin = 0;
    for (std::uint32_t w = 0; w < spec.workers; ++w) {
        std::uint64_t end =
            (w + 1 == spec.workers) ? keys.size() : begin + share;
        std::mt19937_64 rng(spec.seed ^ (0xb5297a4d3f512d6bULL + w));
        std::uniform_int_distribution<int> pct(0, 99);
        std::uniform_int_distribution<std::size_t> part(
            1, spec.k > 1 ? spec.k - 1 : 1);
        std::uint64_t at = begin;
        while (at < end) {
            std::size_t len = spec.k;
            if (spec.k > 1 &&
                pct(rng) >= static_cast<int>(spec.full_batch_pct))
                len = part(rng);
            len = std::min<std::uint64_t>(len, end - at);
            plans[w].batches.emplace_back(keys.begin() + at,
                                          keys.begin() + at + len);
            at += len;
        }
        begin = end;
    }
    return plans;
}

struct RunResult {
    double wall_seconds = 0.0;
    std::uint64_t ops = 0;
    HeapCounters counters;
    bool checked_ok = true;
    std::string check_detail;
};

RunResult run_once(const WorkloadSpec& spec, bool verify) {
    std::vector<Key> keys =
        generate_keys(spec.key_order, spec.total_keys, spec.seed);
    const std::uint64_t seed_nodes =
        spec.initial_levels ? (std::uint64_t{1} << spec.initial_levels) - 1 : 0;
    const std::uint64_t max_nodes =
        seed_nodes + spec.total_keys / spec.k + spec.workers + 2;

    GeneralizedHeap heap(spec.variant, spec.k,
                         static_cast<std::uint32_t>(max_nodes), spec.options);

    std::vector<Key> seed_keys = generate_keys(
        KeyOrder::Random, seed_nodes * spec.k, spec.seed ^ 0x5851f42d4c957f2dULL);
    for (std::uint64_t at = 0; at < seed_keys.size(); at += spec.k)
        heap.insert(std::span<const Key>(seed_keys).subspan(at, spec.k));
    heap.reset_counters();

    auto plans = plan_batches(spec, keys);
    std::atomic<std::uint64_t> remaining{0};
    std::vector<std::vector<Key>> deleted(spec.workers);

    std::barrier start(spec.workers + 1);
    std::vector<std::thread> threads;

    for (std::uint32_t w = 0; w < spec.workers; ++w) {
        threads.emplace_back([&, w] {
            start.arrive_and_wait();
            auto& mine = plans[w].batches;
            if (spec.op_pattern == OpPattern::InsertAllThenDeleteAll) {
                for (const auto& batch : mine) {
                    heap.insert(batch);
                    remaining.fetch_add(batch.size(),
                                        std::memory_order_relaxed);
                }
                start.arrive_and_wait();  // all inserts done
                for (;;) {
                    if (remaining.load(std::memory_order_relaxed) == 0) break;
                    auto result = heap.try_delete_min();
                    if (!result) {
                        std::this_thread::yield();
                        continue;
                    }
                    remaining.fetch_sub(result->size(),
                                        std::memory_order_relaxed);
                    if (verify)
                        deleted[w].insert(deleted[w].end(), result->begin(),
                                          result->end());
                }
            } else {
                for (const auto& batch : mine) {
                    heap.insert(batch);
                    auto result = heap.try_delete_min();
                    if (verify && result)
                        deleted[w].insert(deleted[w].end(), result->begin(),
                                          result->end());
                }
            }
        });
    }

    const auto begin_time = std::chrono::steady_clock::now();
    start.arrive_and_wait();
    if (spec.op_pattern == OpPattern::InsertAllThenDeleteAll) {
        remaining.fetch_add(seed_keys.size(), std::memory_order_relaxed);
        start.arrive_and_wait();
    }
    for (auto& thread : threads) thread.join();
    const auto end_time = std::chrono::steady_clock::now();

    RunResult result;
    result.wall_seconds =
        std::chrono::duration<double>(end_time - begin_time).count();
    result.counters = heap.counters();
    result.ops = result.counters.inserts + result.counters.deletes;

    if (verify) {
        auto invariants = heap.check_invariants();
        if (!invariants.ok) {
            result.checked_ok = false;
            result.check_detail = invariants.detail;
            return result;
        }
        std::vector<Key> inserted(keys);
        inserted.insert(inserted.end(), seed_keys.begin(), seed_keys.end());
        std::vector<Key> accounted = heap.collect_resident();
        for (auto& d : deleted)
            accounted.insert(accounted.end(), d.begin(), d.end());
        std::sort(inserted.begin(), inserted.end());
        std::sort(accounted.begin(), accounted.end());
        if (inserted != accounted) {
            result.checked_ok = false;
            result.check_detail = "multiset conservation failed";
        }
    }
    return result;
}

std::string spec_name(const WorkloadSpec& spec) {
    return std::string(variant_name(spec.variant)) + " k=" +
           std::to_string(spec.k) + " workers=" + std::to_string(spec.workers) +
           " keys=" + std::to_string(spec.total_keys) + " seed=" +
           std::to_string(spec.seed);
}

}  // namespace

BenchRow run_workload(const WorkloadSpec& spec) {
    RunResult checked = run_once(spec, /*verify=*/true);
    if (!checked.checked_ok)
        throw std::runtime_error("correctness pass failed for " +
                                 spec_name(spec) + ": " +
                                 checked.check_detail);
    RunResult timed = run_once(spec, /*verify=*/false);

    BenchRow row;
    row.spec = spec;
    row.wall_seconds = timed.wall_seconds;
    row.ops = timed.ops;
    row.ops_per_second =
        timed.wall_seconds > 0 ? timed.ops / timed.wall_seconds : 0.0;
    row.counters = timed.counters;
    const std::uint64_t prop_ops =
        timed.counters.inserts + timed.counters.deletes;
    row.mean_nodes_traversed =
        prop_ops ? static_cast<double>(timed.counters.propagation_node_visits) /
                       prop_ops
                 : 0.0;
    return row;
}

std::vector<BenchRow> run_sweep(std::span<const WorkloadSpec> grid) {
    std::vector<BenchRow> rows;
    rows.reserve(grid.size());
    for (const WorkloadSpec& spec : grid) rows.push_back(run_workload(spec));
    return rows;
}

void write_csv(std::ostream& out, std::span<const BenchRow> rows) {
    out << "variant,k,workers,total_keys,key_order,op_pattern,initial_levels,"
           "full_batch_pct,seed,wall_seconds,ops,throughput_ops_s,"
           "mean_nodes_traversed,merge_count,early_stop_count,"
           "max_partial_occupancy\n";
    for (const BenchRow& row : rows) {
        const WorkloadSpec& s = row.spec;
        out << variant_name(s.variant) << ',' << s.k << ',' << s.workers << ','
            << s.total_keys << ',' << key_order_name(s.key_order) << ','
            << op_pattern_name(s.op_pattern) << ',' << s.initial_levels << ','
            << s.full_batch_pct << ',' << s.seed << ',' << row.wall_seconds
            << ',' << row.ops << ',' << row.ops_per_second << ','
            << row.mean_nodes_traversed << ',' << row.counters.merges << ','
            << row.counters.early_stops << ','
            << row.counters.max_partial_len << '\n';
    }
}

}  // namespace batchheap
