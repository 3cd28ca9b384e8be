#include "batchheap/workload.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <random>
#include <thread>

#include "batchheap/instrumentation.hpp"

namespace batchheap {

namespace {

// Aborts the whole process if the guarded section outlives the budget;
// stress tests treat that as a deadlock.
class Watchdog {
  public:
    explicit Watchdog(std::uint32_t seconds) : budget_(seconds) {
        if (budget_ == 0) return;
        thread_ = std::thread([this] {
            std::unique_lock<std::mutex> lock(mutex_);
            if (!done_cv_.wait_for(lock, std::chrono::seconds(budget_),
                                   [this] { return done_; })) {
                std::fprintf(stderr,
                             "watchdog: run exceeded %u s, aborting\n",
                             budget_);
                std::abort();
            }
        });
    }
    ~Watchdog() {
        if (budget_ == 0) return;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            done_ = true;
        }
        done_cv_.notify_all();
        thread_.join();
    }

  private:
    std::uint32_t budget_;
    std::mutex mutex_;
    std::condition_variable done_cv_;
    bool done_ = false;
    std::thread thread_;
};

bool multiset_equal(std::vector<Key> a, std::vector<Key> b,
                    std::string& detail) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a == b) return true;
    detail = "multiset mismatch: inserted " + std::to_string(a.size()) +
             " keys vs accounted " + std::to_string(b.size());
    if (a.size() == b.size()) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] != b[i]) {
                detail += "; first difference at index " + std::to_string(i);
                break;
            }
        }
    }
    return false;
}

}  // namespace

StressOutcome run_stress(const StressSpec& spec) {
    const std::uint64_t max_batches =
        spec.workers * spec.ops_per_worker + 2;
    Recorder recorder;
    GeneralizedHeap heap(spec.variant, spec.k,
                         static_cast<std::uint32_t>(max_batches),
                         spec.options, &recorder);
    GeneralizedHeap* heap_ptr = &heap;

    std::vector<std::vector<Key>> inserted(spec.workers);
    std::vector<std::vector<Key>> deleted(spec.workers);
    std::barrier start(spec.workers + 1);
    std::vector<std::thread> threads;
    threads.reserve(spec.workers);

    for (std::uint32_t w = 0; w < spec.workers; ++w) {
        threads.emplace_back([&, w] {
            Recorder::WorkerScope scope(recorder, w);
            std::mt19937_64 rng(spec.seed * 0x9e3779b97f4a7c15ULL + w);
            std::uniform_int_distribution<Key> key_dist(0, spec.key_range - 1);
            std::uniform_int_distribution<int> coin(0, 1);
            std::uniform_int_distribution<int> pct(0, 99);
            start.arrive_and_wait();
            std::vector<Key> batch;
            for (std::uint64_t i = 0; i < spec.ops_per_worker; ++i) {
                if (coin(rng) == 0) {
                    std::size_t len = spec.k;
                    if (spec.k > 1 &&
                        pct(rng) < static_cast<int>(spec.partial_pct)) {
                        std::uniform_int_distribution<std::size_t> part(
                            1, spec.k - 1);
                        len = part(rng);
                    }
                    batch.clear();
                    for (std::size_t j = 0; j < len; ++j)
                        batch.push_back(key_dist(rng));
                    heap_ptr->insert(batch);
                    inserted[w].insert(inserted[w].end(), batch.begin(),
                                       batch.end());
                } else {
                    auto result = heap_ptr->try_delete_min();
                    if (result)
                        deleted[w].insert(deleted[w].end(), result->begin(),
                                          result->end());
                }
            }
        });
    }

    {
        Watchdog watchdog(spec.watchdog_seconds);
        start.arrive_and_wait();
        for (auto& thread : threads) thread.join();
    }

    StressOutcome outcome;
    outcome.history = recorder.finish(spec.variant, spec.k);
    outcome.counters = heap_ptr->counters();
    outcome.invariants = heap_ptr->check_invariants();

    std::vector<Key> all_inserted;
    std::vector<Key> accounted = heap_ptr->collect_resident();
    for (std::uint32_t w = 0; w < spec.workers; ++w) {
        all_inserted.insert(all_inserted.end(), inserted[w].begin(),
                            inserted[w].end());
        accounted.insert(accounted.end(), deleted[w].begin(),
                         deleted[w].end());
    }
    outcome.multiset_ok = multiset_equal(std::move(all_inserted),
                                         std::move(accounted),
                                         outcome.multiset_detail);
    return outcome;
}

const char* key_order_name(KeyOrder order) {
    switch (order) {
        case KeyOrder::Random: return "random";
        case KeyOrder::Ascend: return "ascend";
        case KeyOrder::Descend: return "descend";
    }
    return "?";
}

const char* op_pattern_name(OpPattern pattern) {
    return pattern == OpPattern::InsertAllThenDeleteAll ? "insall" : "pairs";
}

std::vector<Key> generate_keys(KeyOrder order, std::uint64_t n,
                               std::uint64_t seed) {
    std::vector<Key> keys(n);
    switch (order) {
        case KeyOrder::Random: {
            std::mt19937_64 rng(seed);
            std::uniform_int_distribution<Key> dist(0, (Key{1} << 32) - 1);
            for (auto& key : keys) key = dist(rng);
            break;
        }
        case KeyOrder::Ascend:
            for (std::uint64_t i = 0; i < n; ++i) keys[i] = i;
            break;
        case KeyOrder::Descend:
            for (std::uint64_t i = 0; i < n; ++i) keys[i] = n - i;
            break;
    }
    return keys;
}

}  // namespace batchheap
