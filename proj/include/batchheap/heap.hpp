#pragma once

// Concurrent generalized heap: a binary min-heap whose nodes each hold k
// sorted keys, stored as a flat array with per-node multi-state locks.
// Two protocol variants share the storage:
//
//   TD: top-down insert / top-down delete. An insert claims its target slot
//       (AVAIL->TARGET) under the root lock, then walks root->target with
//       hand-over-hand locks, merging its batch into each path node. A
//       delete refilling the root from an in-flight target marks it
//       (TARGET->MARKED); the inserter answers by shipping its carried batch
//       directly into the root and terminating (MARKED->AVAIL).
//
//   BU: bottom-up insert / top-down delete. An insert parks its batch at the
//       target (INUSE), then climbs: park (INUSE->INSHOLD), lock parent,
//       re-take the parked slot (INSHOLD->INUSE). A deleter that takes a
//       parked slot releases it as DELMOD; the returning inserter skips
//       upward on DELMOD/AVAIL since the deleter already heapified below.
//
// Lock discipline: every operation acquires ancestors before descendants
// within its held set, at most three nodes at a time (parent + two
// children), so waits never cycle. The partial buffer, size counters and
// target selection are guarded by the root lock.
//
// insert/delete_min are safe for arbitrary concurrent use. peek_stats is a
// monitoring snapshot; collect_resident/check_invariants require quiescence.

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "batchheap/batch.hpp"
#include "batchheap/bitrev.hpp"
#include "batchheap/history.hpp"
#include "batchheap/instrumentation.hpp"

namespace batchheap {

struct HeapOptions {
    // Skip MergeAndSort when batch ranges do not interleave (swap or no-op
    // instead). Disabling changes work counters, never results.
    bool elide_merges = true;
};

struct HeapCounters {
    std::uint64_t inserts = 0;
    std::uint64_t deletes = 0;
    std::uint64_t merges = 0;
    std::uint64_t elided_merges = 0;
    std::uint64_t early_stops = 0;
    std::uint64_t propagation_node_visits = 0;
    std::uint64_t coop_handoffs = 0;
    std::uint64_t max_partial_len = 0;
};

struct HeapPeek {
    std::uint64_t node_count = 0;
    std::uint64_t key_count = 0;
    std::uint64_t partial_len = 0;
    std::uint64_t level_count = 0;
};

struct InvariantReport {
    bool ok = true;
    std::string detail;
};

class GeneralizedHeap {
  public:
    GeneralizedHeap(Variant variant, std::uint32_t k, std::uint32_t max_nodes,
                    HeapOptions options = {}, Recorder* recorder = nullptr);

    GeneralizedHeap(const GeneralizedHeap&) = delete;
    GeneralizedHeap& operator=(const GeneralizedHeap&) = delete;

    // Inserts 1..k keys (all < kMaxKey). Throws CapacityError before any
    // mutation if a full batch is needed and the node array is full.
    void insert(std::span<const Key> items);

    // Returns the k smallest keys at the linearization point; fewer when the
    // heap holds fewer than k keys. Throws EmptyHeapError when empty.
    std::vector<Key> delete_min();
    // Same, but returns nullopt instead of throwing on empty.
    std::optional<std::vector<Key>> try_delete_min();

    HeapPeek peek_stats() const;
    HeapCounters counters() const;
    void reset_counters();

    Variant variant() const { return variant_; }
    std::uint32_t node_capacity() const { return k_; }
    std::uint32_t max_nodes() const { return max_nodes_; }

    // Next target slot by bit-reversal rank order. Quiescent helper.
    std::uint64_t select_insert_target() const;

    // Quiescent-only: all resident keys (nodes + partial buffer), unordered.
    std::vector<Key> collect_resident() const;
    // Quiescent-only: checks properties 1-3, state words, sentinel fill.
    InvariantReport check_invariants() const;

  private:
    enum : std::uint32_t {
        kAvail = 0,
        kInUse = 1,
        kTarget = 2,
        kMarked = 3,
        kInsHold = 4,
        kDelMod = 5,
    };

    struct HeldChild {
        std::uint64_t slot = 0;
        bool locked = false;
        bool empty = true;
        std::uint32_t release_as = kAvail;
    };

    std::span<Key> node_span(std::uint64_t slot);
    std::span<const Key> node_span(std::uint64_t slot) const;
    bool node_is_sentinel(std::uint64_t slot) const;
    void write_node(std::uint64_t slot, std::span<const Key> keys);
    void fill_sentinel(std::uint64_t slot);

    std::uint32_t state(std::uint64_t slot) const;
    bool cas_state(std::uint64_t slot, std::uint32_t expected,
                   std::uint32_t desired);
    void lock_avail(std::uint64_t slot);
    void unlock(std::uint64_t slot, std::uint32_t release_as = kAvail);

    std::optional<std::vector<Key>> do_delete(bool throw_on_empty);
    void insert_td(std::vector<Key>& batch, std::uint64_t target);
    void insert_bu(std::vector<Key>& batch, std::uint64_t target);
    void ship_to_root(std::vector<Key>& batch, std::uint64_t target,
                      std::uint64_t held);
    void abandon_park(std::uint64_t slot);
    void refill_root_from(std::uint64_t last);
    void remerge_root_with_partial();
    void heapify_down();
    HeldChild acquire_child(std::uint64_t slot);
    void release_child(const HeldChild& child);

    // Batch being carried down meets a path node: node keeps the k smallest.
    void merge_step_down(std::vector<Key>& batch, std::uint64_t slot);
    // Parked batch meets its parent: parent keeps the k smallest.
    void merge_step_up(std::uint64_t child, std::uint64_t parent);
    void note_partial_len();

    Variant variant_;
    std::uint32_t k_;
    std::uint32_t max_nodes_;
    std::uint64_t slot_count_;
    HeapOptions options_;
    Recorder* recorder_;

    std::vector<Key> keys_;
    std::unique_ptr<std::atomic<std::uint32_t>[]> states_;

    // Root-lock guarded; atomics so monitoring peeks stay race-free.
    std::atomic<std::uint64_t> node_count_{0};
    std::atomic<std::uint64_t> insert_count_{0};
    std::atomic<std::uint64_t> delete_count_{0};
    std::atomic<std::uint64_t> partial_len_{0};
    PartialBuffer partial_;

    struct Counters {
        std::atomic<std::uint64_t> inserts{0};
        std::atomic<std::uint64_t> deletes{0};
        std::atomic<std::uint64_t> merges{0};
        std::atomic<std::uint64_t> elided_merges{0};
        std::atomic<std::uint64_t> early_stops{0};
        std::atomic<std::uint64_t> propagation_node_visits{0};
        std::atomic<std::uint64_t> coop_handoffs{0};
        std::atomic<std::uint64_t> max_partial_len{0};
    };
    mutable Counters counters_;
};

}  // namespace batchheap
