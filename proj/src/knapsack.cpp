#include "batchheap/knapsack.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <numeric>
#include <random>
#include <thread>

namespace batchheap {

const char* knapsack_type_name(KnapsackType type) {
    switch (type) {
        case KnapsackType::StronglyCorrelated: return "sc";
        case KnapsackType::AlmostStronglyCorrelated: return "asc";
        case KnapsackType::EvenOdd: return "esc";
        case KnapsackType::SubsetSum: return "ss";
    }
    return "?";
}

KnapsackInstance generate_knapsack(KnapsackType type, std::uint32_t n,
                                   std::uint32_t range, std::uint64_t seed) {
    if (n < 1 || range < 10)
        throw ConfigError("knapsack generator needs n >= 1 and range >= 10");
    KnapsackInstance instance;
    instance.type = type;
    instance.n = n;
    instance.range = range;
    instance.weight.resize(n);
    instance.benefit.resize(n);

    std::mt19937_64 rng(seed);
    const std::uint32_t shift = range / 10;
    const std::uint32_t band = range / 500;
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint32_t w =
            std::uniform_int_distribution<std::uint32_t>(1, range)(rng);
        std::uint32_t b = 0;
        switch (type) {
            case KnapsackType::StronglyCorrelated:
                b = w + shift;
                break;
            case KnapsackType::AlmostStronglyCorrelated: {
                const std::uint32_t lo =
                    (w + shift > band) ? w + shift - band : 1;
                b = std::uniform_int_distribution<std::uint32_t>(
                    lo, w + shift + band)(rng);
                break;
            }
            case KnapsackType::EvenOdd:
                w = 2 * std::uniform_int_distribution<std::uint32_t>(
                            1, std::max(1u, range / 2))(rng);
                b = w + shift;
                break;
            case KnapsackType::SubsetSum:
                b = w;
                break;
        }
        instance.weight[i] = w;
        instance.benefit[i] = b;
    }
    instance.capacity = static_cast<std::uint64_t>(n) * range / 4;
    if (type == KnapsackType::EvenOdd) instance.capacity |= 1;  // odd W
    return instance;
}

std::uint64_t knapsack_dp(const KnapsackInstance& instance) {
    std::vector<std::uint64_t> table(instance.capacity + 1, 0);
    for (std::uint32_t i = 0; i < instance.n; ++i) {
        const std::uint32_t w = instance.weight[i];
        const std::uint32_t b = instance.benefit[i];
        if (w > instance.capacity) continue;
        for (std::uint64_t cap = instance.capacity; cap >= w; --cap)
            table[cap] = std::max(table[cap], table[cap - w] + b);
    }
    return table[instance.capacity];
}

KnapsackInstance density_sorted(const KnapsackInstance& instance) {
    std::vector<std::uint32_t> order(instance.n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) {
                  // b_a/w_a > b_b/w_b without division
                  const auto lhs = static_cast<std::uint64_t>(
                                       instance.benefit[a]) *
                                   instance.weight[b];
                  const auto rhs = static_cast<std::uint64_t>(
                                       instance.benefit[b]) *
                                   instance.weight[a];
                  if (lhs != rhs) return lhs > rhs;
                  return a < b;
              });
    KnapsackInstance sorted = instance;
    for (std::uint32_t i = 0; i < instance.n; ++i) {
        sorted.weight[i] = instance.weight[order[i]];
        sorted.benefit[i] = instance.benefit[order[i]];
    }
    return sorted;
}

std::uint64_t knapsack_bound(const KnapsackInstance& sorted_view,
                             std::uint32_t level, std::uint64_t weight,
                             std::uint64_t benefit) {
    std::uint64_t room = sorted_view.capacity - weight;
    std::uint64_t bound = benefit;
    for (std::uint32_t i = level; i < sorted_view.n; ++i) {
        const std::uint32_t w = sorted_view.weight[i];
        if (w <= room) {
            room -= w;
            bound += sorted_view.benefit[i];
        } else {
            // fractional fill; floor keeps the bound integral and admissible
            bound += room * sorted_view.benefit[i] / w;
            break;
        }
    }
    return bound;
}

namespace {

struct BbNode {
    std::uint32_t level;
    std::uint32_t weight;
    std::uint32_t benefit;
    std::uint32_t bound;
};

// Chunked per-worker arena: owners bump-allocate into fixed chunks and
// publish chunk pointers; readers only dereference published chunks, so no
// locks are needed and handles stay valid for the whole run.
class NodeArena {
  public:
    static constexpr std::uint32_t kOffsetBits = 12;
    static constexpr std::uint32_t kChunkSize = 1u << kOffsetBits;
    static constexpr std::uint32_t kChunkBits = 14;
    static constexpr std::uint32_t kMaxChunks = 1u << kChunkBits;
    static constexpr std::uint32_t kMaxWorkers = 15;

    explicit NodeArena(std::uint32_t workers) : per_worker_(workers) {
        for (auto& pw : per_worker_)
            pw.chunks =
                std::make_unique<std::atomic<BbNode*>[]>(kMaxChunks);
    }

    std::uint32_t alloc(std::uint32_t worker, const BbNode& node) {
        PerWorker& pw = per_worker_[worker];
        const std::uint32_t index = pw.next++;
        const std::uint32_t chunk = index >> kOffsetBits;
        const std::uint32_t offset = index & (kChunkSize - 1);
        if (chunk >= kMaxChunks)
            throw CapacityError("branch-and-bound arena exhausted");
        if (offset == 0)
            pw.chunks[chunk].store(new BbNode[kChunkSize],
                                   std::memory_order_release);
        pw.chunks[chunk].load(std::memory_order_relaxed)[offset] = node;
        return (worker << (kChunkBits + kOffsetBits)) | index;
    }

    const BbNode& get(std::uint32_t handle) const {
        const std::uint32_t worker = handle >> (kChunkBits + kOffsetBits);
        const std::uint32_t index =
            handle & ((1u << (kChunkBits + kOffsetBits)) - 1);
        const BbNode* chunk = per_worker_[worker]
                                  .chunks[index >> kOffsetBits]
                                  .load(std::memory_order_acquire);
        return chunk[index & (kChunkSize - 1)];
    }

    ~NodeArena() {
        for (auto& pw : per_worker_) {
            for (std::uint32_t c = 0; c < kMaxChunks; ++c) {
                BbNode* chunk = pw.chunks[c].load(std::memory_order_relaxed);
                if (!chunk) break;
                delete[] chunk;
            }
        }
    }

  private:
    struct PerWorker {
        std::unique_ptr<std::atomic<BbNode*>[]> chunks;
        std::uint32_t next = 0;
    };
    std::vector<PerWorker> per_worker_;
};

constexpr std::uint64_t kBenefitCeiling = 0xFFFF'FFFEULL;

Key encode_node(std::uint32_t benefit, std::uint32_t handle) {
    // Max-benefit order on a min-heap; handle breaks ties deterministically.
    return ((kBenefitCeiling - benefit) << 32) | handle;
}

void atomic_max_u64(std::atomic<std::uint64_t>& cell, std::uint64_t value) {
    std::uint64_t seen = cell.load(std::memory_order_relaxed);
    while (seen < value && !cell.compare_exchange_weak(
                               seen, value, std::memory_order_relaxed))
        ;
}

}  // namespace

BbOutcome knapsack_bb(const KnapsackInstance& instance,
                      const BbConfig& config) {
    if (instance.n < 1) throw ConfigError("empty knapsack instance");
    if (config.workers < 1 || config.workers > NodeArena::kMaxWorkers)
        throw ConfigError("knapsack workers must be in [1, 15]");
    const KnapsackInstance sorted = density_sorted(instance);
    const std::uint32_t k = config.heap_node_capacity;

    GeneralizedHeap heap(Variant::BU, k, 1u << 18);
    NodeArena arena(config.workers);

    std::atomic<std::uint64_t> best{0};
    std::atomic<std::uint64_t> explored{0};
    std::atomic<std::int64_t> outstanding{0};
    std::atomic<bool> done{false};
    std::atomic<bool> gc_wanted{false};
    std::atomic<std::uint32_t> gc_generation{0};
    std::atomic<std::uint32_t> parked{0};
    std::atomic<std::uint32_t> active_workers{config.workers};
    std::atomic<std::uint64_t> gc_passes{0};

    {
        BbNode root{0, 0, 0,
                    static_cast<std::uint32_t>(
                        knapsack_bound(sorted, 0, 0, 0))};
        const std::uint32_t handle = arena.alloc(0, root);
        outstanding.fetch_add(1, std::memory_order_relaxed);
        const Key key = encode_node(root.benefit, handle);
        heap.insert(std::span<const Key>(&key, 1));
    }

    auto run_gc = [&] {
        std::vector<std::uint32_t> handles;
        while (auto batch = heap.try_delete_min())
            for (Key key : *batch)
                handles.push_back(static_cast<std::uint32_t>(key));
        const std::uint64_t best_now = best.load(std::memory_order_acquire);
        std::vector<Key> keep;
        for (std::uint32_t handle : handles) {
            const BbNode& node = arena.get(handle);
            if (node.bound > best_now)
                keep.push_back(encode_node(node.benefit, handle));
            else
                outstanding.fetch_sub(1, std::memory_order_acq_rel);
        }
        for (std::size_t at = 0; at < keep.size(); at += k)
            heap.insert(std::span<const Key>(keep).subspan(
                at, std::min<std::size_t>(k, keep.size() - at)));
        gc_passes.fetch_add(1, std::memory_order_relaxed);
    };

    auto worker_fn = [&](std::uint32_t w) {
        bool gc_coordinator = false;
        std::vector<Key> buffer;
        buffer.reserve(k);
        auto flush = [&] {
            if (buffer.empty()) return;
            heap.insert(buffer);
            buffer.clear();
        };

        while (!done.load(std::memory_order_acquire)) {
            if (gc_wanted.load(std::memory_order_acquire)) {
                if (gc_coordinator) {
                    while (parked.load(std::memory_order_acquire) + 1 <
                               active_workers.load(std::memory_order_acquire) &&
                           !done.load(std::memory_order_acquire))
                        std::this_thread::yield();
                    if (!done.load(std::memory_order_acquire)) run_gc();
                    gc_coordinator = false;
                    gc_wanted.store(false, std::memory_order_release);
                    gc_generation.fetch_add(1, std::memory_order_release);
                } else {
                    const std::uint32_t gen =
                        gc_generation.load(std::memory_order_acquire);
                    parked.fetch_add(1, std::memory_order_acq_rel);
                    while (gc_generation.load(std::memory_order_acquire) ==
                               gen &&
                           gc_wanted.load(std::memory_order_acquire) &&
                           !done.load(std::memory_order_acquire))
                        std::this_thread::yield();
                    parked.fetch_sub(1, std::memory_order_acq_rel);
                }
                continue;
            }

            auto batch = heap.try_delete_min();
            if (!batch) {
                if (outstanding.load(std::memory_order_acquire) == 0) {
                    done.store(true, std::memory_order_release);
                    break;
                }
                std::this_thread::yield();
                continue;
            }

            for (Key key : *batch) {
                const auto handle = static_cast<std::uint32_t>(key);
                const BbNode node = arena.get(handle);
                const std::uint64_t best_now =
                    best.load(std::memory_order_acquire);
                if (node.bound <= best_now || node.level >= sorted.n) {
                    outstanding.fetch_sub(1, std::memory_order_acq_rel);
                    continue;
                }
                explored.fetch_add(1, std::memory_order_relaxed);
                const std::uint32_t w_i = sorted.weight[node.level];
                const std::uint32_t b_i = sorted.benefit[node.level];

                // take child
                const std::uint64_t take_weight =
                    std::uint64_t{node.weight} + w_i;
                if (take_weight <= sorted.capacity) {
                    BbNode take{node.level + 1,
                                static_cast<std::uint32_t>(take_weight),
                                node.benefit + b_i, 0};
                    atomic_max_u64(best, take.benefit);
                    take.bound = static_cast<std::uint32_t>(knapsack_bound(
                        sorted, take.level, take.weight, take.benefit));
                    if (take.bound >
                        best.load(std::memory_order_acquire)) {
                        const std::uint32_t h = arena.alloc(w, take);
                        outstanding.fetch_add(1, std::memory_order_acq_rel);
                        buffer.push_back(encode_node(take.benefit, h));
                        if (buffer.size() >= k) flush();
                    }
                }
                // skip child
                BbNode skip{node.level + 1, node.weight, node.benefit, 0};
                skip.bound = static_cast<std::uint32_t>(knapsack_bound(
                    sorted, skip.level, skip.weight, skip.benefit));
                if (skip.bound > best.load(std::memory_order_acquire)) {
                    const std::uint32_t h = arena.alloc(w, skip);
                    outstanding.fetch_add(1, std::memory_order_acq_rel);
                    buffer.push_back(encode_node(skip.benefit, h));
                    if (buffer.size() >= k) flush();
                }
                outstanding.fetch_sub(1, std::memory_order_acq_rel);
            }
            flush();

            if (config.gc_threshold > 0 &&
                heap.peek_stats().key_count > config.gc_threshold) {
                bool expected = false;
                if (gc_wanted.compare_exchange_strong(
                        expected, true, std::memory_order_acq_rel))
                    gc_coordinator = true;
            }
        }
        active_workers.fetch_sub(1, std::memory_order_acq_rel);
    };

    std::vector<std::thread> threads;
    for (std::uint32_t w = 0; w < config.workers; ++w)
        threads.emplace_back(worker_fn, w);
    for (auto& thread : threads) thread.join();

    BbOutcome outcome;
    outcome.best = best.load(std::memory_order_relaxed);
    outcome.explored = explored.load(std::memory_order_relaxed);
    outcome.gc_passes = gc_passes.load(std::memory_order_relaxed);
    return outcome;
}

}  // namespace batchheap
