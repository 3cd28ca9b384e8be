#pragma once

// Single-threaded references: SeqHeap mirrors the generalized heap's storage
// and merge rules without any locking (properties 1-3 hold after every
// operation), and MultisetOracle is the ground-truth sorted multiset used by
// tests and the linearizability checkers.

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "batchheap/batch.hpp"
#include "batchheap/bitrev.hpp"
#include "batchheap/history.hpp"

namespace batchheap {

struct InvariantReportLite {
    bool ok = true;
    std::string detail;
};

class SeqHeap {
  public:
    SeqHeap(std::uint32_t k, std::uint32_t max_nodes);

    void insert_td(std::span<const Key> items);
    void insert_bu(std::span<const Key> items);
    std::vector<Key> delete_min();

    std::uint64_t node_count() const { return node_count_; }
    std::uint64_t key_count() const {
        return node_count_ * k_ + partial_.size();
    }
    std::span<const Key> partial() const { return partial_.keys(); }
    std::vector<Key> collect_resident() const;
    InvariantReportLite check_properties() const;

    // MergeAndSort invocations beyond target placement (early-stop probe).
    std::uint64_t merge_count() const { return merges_; }

  private:
    // Returns false when the new keys fit in the partial buffer (no full
    // batch to propagate); batch/rank are set otherwise.
    bool root_phase(std::span<const Key> items, std::vector<Key>& batch,
                    std::uint64_t& rank);
    std::span<Key> node_span(std::uint64_t slot);
    std::span<const Key> node_span(std::uint64_t slot) const;
    void fill_sentinel(std::uint64_t slot);

    std::uint32_t k_;
    std::uint32_t max_nodes_;
    std::uint64_t slot_count_;
    std::vector<Key> keys_;
    std::uint64_t node_count_ = 0;
    PartialBuffer partial_;
    std::uint64_t merges_ = 0;
};

class MultisetOracle {
  public:
    void insert(std::span<const Key> items) {
        keys_.insert(items.begin(), items.end());
    }
    // Removes and returns the min(k, size) smallest keys; empty result means
    // the heap was empty (the empty-heap error case).
    std::vector<Key> delete_min(std::uint32_t k) {
        std::vector<Key> out;
        for (std::uint32_t i = 0; i < k && !keys_.empty(); ++i) {
            out.push_back(*keys_.begin());
            keys_.erase(keys_.begin());
        }
        return out;
    }
    std::size_t size() const { return keys_.size(); }

  private:
    std::multiset<Key> keys_;
};

// Replays a sequential op list through the multiset oracle; returns one
// entry per delete, in order. An empty entry stands for the empty-heap
// error.
std::vector<std::vector<Key>> replay(const std::vector<OpRecord>& ordered,
                                     std::uint32_t k);

}  // namespace batchheap
