#pragma once

// Batch primitives: sorted fixed-capacity key sequences, the merge/split
// kernel used by every heap operation, and the partial buffer that absorbs
// non-multiple-of-k residue. Pure functions, no shared state.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace batchheap {

using Key = std::uint64_t;

// Largest representable value is reserved as the empty-slot sentinel.
// User keys must be strictly smaller.
inline constexpr Key kMaxKey = std::numeric_limits<Key>::max();

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyHeapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Node capacity must be a power of two in [1, 1024].
inline bool valid_node_capacity(std::uint32_t k) {
    return k >= 1 && k <= 1024 && (k & (k - 1)) == 0;
}

inline bool is_sorted_keys(std::span<const Key> keys) {
    return std::is_sorted(keys.begin(), keys.end());
}

// Sorts up to k keys into a partial batch. Rejects empty or oversized input.
std::vector<Key> sort_batch(std::span<const Key> items, std::uint32_t k);

// Stable two-pointer merge of two sorted sequences; ties take from a first.
void merge_sorted(std::span<const Key> a, std::span<const Key> b,
                  std::span<Key> out);

// Merge two sorted sequences and split at k: hi gets the min(k, |a|+|b|)
// smallest keys, lo the remainder. max(hi) <= min(lo) whenever lo is
// nonempty.
struct MergeSplit {
    std::vector<Key> hi;
    std::vector<Key> lo;
};
MergeSplit merge_and_sort(std::span<const Key> a, std::span<const Key> b,
                          std::uint32_t k);

// False iff the two batches' ranges do not interleave, i.e. the merge would
// be the identity or a pure swap and the caller can skip it.
inline bool needs_merge(std::span<const Key> a, std::span<const Key> b) {
    if (a.empty() || b.empty()) return false;
    if (a.back() <= b.front()) return false;
    if (b.back() <= a.front()) return false;
    return true;
}

// Side buffer of up to k-1 sorted keys, all >= the root's maximum at
// quiescence. Only ever touched under the root lock.
class PartialBuffer {
  public:
    explicit PartialBuffer(std::uint32_t k) : k_(k) {}

    std::span<const Key> keys() const { return keys_; }
    std::size_t size() const { return keys_.size(); }
    bool empty() const { return keys_.empty(); }
    void clear() { keys_.clear(); }

    void assign(std::vector<Key> sorted) {
        if (sorted.size() > k_ - 1)
            throw CapacityError("partial buffer overflow: " +
                                std::to_string(sorted.size()));
        keys_ = std::move(sorted);
    }

  private:
    std::uint32_t k_;
    std::vector<Key> keys_;
};

}  // namespace batchheap
