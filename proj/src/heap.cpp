#include "batchheap/heap.hpp"

#include <algorithm>
#include <cassert>
#include <thread>

namespace batchheap {

namespace {

#if defined(__x86_64__) || defined(__i386__)
inline void cpu_relax() { __builtin_ia32_pause(); }
#else
inline void cpu_relax() { std::atomic_signal_fence(std::memory_order_seq_cst); }
#endif

// Bounded spin with exponential backoff, then yield.
class Backoff {
  public:
    void pause() {
        if (round_ < 6) {
            for (unsigned i = 0; i < (1u << round_); ++i) cpu_relax();
            ++round_;
        } else {
            std::this_thread::yield();
        }
    }

  private:
    unsigned round_ = 0;
};

void atomic_max(std::atomic<std::uint64_t>& cell, std::uint64_t value) {
    std::uint64_t seen = cell.load(std::memory_order_relaxed);
    while (seen < value &&
           !cell.compare_exchange_weak(seen, value, std::memory_order_relaxed))
        ;
}

}  // namespace

GeneralizedHeap::GeneralizedHeap(Variant variant, std::uint32_t k,
                                 std::uint32_t max_nodes, HeapOptions options,
                                 Recorder* recorder)
    : variant_(variant),
      k_(k),
      max_nodes_(max_nodes),
      options_(options),
      recorder_(recorder),
      partial_(k) {
    if (!valid_node_capacity(k))
        throw ConfigError("node capacity must be a power of two in [1,1024], got " +
                          std::to_string(k));
    if (max_nodes < 1 || max_nodes > (1u << 30))
        throw ConfigError("max_nodes must be in [1, 2^30]");
    // Allocate whole levels so every rank <= max_nodes has a slot.
    slot_count_ = (std::uint64_t{1} << std::bit_width(std::uint64_t{max_nodes})) - 1;
    keys_.assign(slot_count_ * k_, kMaxKey);
    states_ = std::make_unique<std::atomic<std::uint32_t>[]>(slot_count_ + 1);
    for (std::uint64_t i = 0; i <= slot_count_; ++i)
        states_[i].store(kAvail, std::memory_order_relaxed);
}

std::span<Key> GeneralizedHeap::node_span(std::uint64_t slot) {
    return {keys_.data() + (slot - 1) * k_, k_};
}

std::span<const Key> GeneralizedHeap::node_span(std::uint64_t slot) const {
    return {keys_.data() + (slot - 1) * k_, k_};
}

bool GeneralizedHeap::node_is_sentinel(std::uint64_t slot) const {
    return node_span(slot).front() == kMaxKey;
}

void GeneralizedHeap::write_node(std::uint64_t slot,
                                 std::span<const Key> keys) {
    assert(keys.size() == k_);
    std::copy(keys.begin(), keys.end(), node_span(slot).begin());
}

void GeneralizedHeap::fill_sentinel(std::uint64_t slot) {
    auto node = node_span(slot);
    std::fill(node.begin(), node.end(), kMaxKey);
}

std::uint32_t GeneralizedHeap::state(std::uint64_t slot) const {
    return states_[slot].load(std::memory_order_acquire);
}

bool GeneralizedHeap::cas_state(std::uint64_t slot, std::uint32_t expected,
                                std::uint32_t desired) {
    return states_[slot].compare_exchange_weak(expected, desired,
                                               std::memory_order_acq_rel,
                                               std::memory_order_relaxed);
}

void GeneralizedHeap::lock_avail(std::uint64_t slot) {
    Backoff backoff;
    for (;;) {
        std::uint32_t expected = kAvail;
        if (states_[slot].compare_exchange_weak(expected, kInUse,
                                                std::memory_order_acq_rel,
                                                std::memory_order_relaxed))
            break;
        backoff.pause();
    }
    if (recorder_) recorder_->lock_acquired(static_cast<std::uint32_t>(slot));
}

void GeneralizedHeap::unlock(std::uint64_t slot, std::uint32_t release_as) {
    if (recorder_) recorder_->lock_released(static_cast<std::uint32_t>(slot));
    states_[slot].store(release_as, std::memory_order_release);
}

void GeneralizedHeap::note_partial_len() {
    partial_len_.store(partial_.size(), std::memory_order_relaxed);
    atomic_max(counters_.max_partial_len, partial_.size());
}

// ---------------------------------------------------------------- insert --

void GeneralizedHeap::insert(std::span<const Key> items) {
    std::vector<Key> sorted = sort_batch(items, k_);
    if (recorder_) recorder_->op_begin(OpKind::Insert, sorted);
    lock_avail(1);

    const bool full_batch = sorted.size() + partial_.size() >= k_;
    if (full_batch &&
        node_count_.load(std::memory_order_relaxed) == max_nodes_) {
        unlock(1);
        if (recorder_) recorder_->op_abort();
        throw CapacityError("heap full: " + std::to_string(max_nodes_) +
                            " nodes");
    }
    counters_.inserts.fetch_add(1, std::memory_order_relaxed);

    std::vector<Key> combined(sorted.size() + partial_.size());
    merge_sorted(sorted, partial_.keys(), combined);

    if (!full_batch) {
        // Everything stays buffered; re-establish property 3 against the
        // root if one exists.
        if (node_count_.load(std::memory_order_relaxed) >= 1) {
            if (options_.elide_merges &&
                combined.front() >= node_span(1).back()) {
                counters_.elided_merges.fetch_add(1,
                                                  std::memory_order_relaxed);
                partial_.assign(std::move(combined));
            } else {
                auto split = merge_and_sort(node_span(1), combined, k_);
                counters_.merges.fetch_add(1, std::memory_order_relaxed);
                write_node(1, split.hi);
                partial_.assign(std::move(split.lo));
            }
        } else {
            partial_.assign(std::move(combined));
        }
        note_partial_len();
        unlock(1);
        if (recorder_) recorder_->op_end({});
        return;
    }

    std::vector<Key> batch(combined.begin(), combined.begin() + k_);
    partial_.assign({combined.begin() + k_, combined.end()});
    note_partial_len();

    insert_count_.fetch_add(1, std::memory_order_relaxed);
    const std::uint64_t rank =
        node_count_.fetch_add(1, std::memory_order_relaxed) + 1;

    if (rank == 1) {
        write_node(1, batch);
        counters_.propagation_node_visits.fetch_add(1,
                                                    std::memory_order_relaxed);
        unlock(1);
        if (recorder_) recorder_->op_end({});
        return;
    }

    const std::uint64_t target = slot_for_rank(rank);
    if (variant_ == Variant::TD)
        insert_td(batch, target);
    else
        insert_bu(batch, target);
    if (recorder_) recorder_->op_end({});
}

void GeneralizedHeap::merge_step_down(std::vector<Key>& batch,
                                      std::uint64_t slot) {
    auto node = node_span(slot);
    assert(batch.size() == k_);
    if (options_.elide_merges && !needs_merge(node, batch)) {
        counters_.elided_merges.fetch_add(1, std::memory_order_relaxed);
        if (node.back() <= batch.front()) return;  // already ordered
        std::swap_ranges(node.begin(), node.end(), batch.begin());
        return;
    }
    std::vector<Key> merged(node.size() + batch.size());
    merge_sorted(node, batch, merged);
    std::copy(merged.begin(), merged.begin() + k_, node.begin());
    batch.assign(merged.begin() + k_, merged.end());
    counters_.merges.fetch_add(1, std::memory_order_relaxed);
}

void GeneralizedHeap::ship_to_root(std::vector<Key>& batch,
                                   std::uint64_t target, std::uint64_t held) {
    // A deleter holds the root waiting on our target; hand the carried batch
    // over as the refill (it reads the root only after seeing AVAIL).
    assert(held != 1);
    write_node(1, batch);
    counters_.coop_handoffs.fetch_add(1, std::memory_order_relaxed);
    states_[target].store(kAvail, std::memory_order_release);
    unlock(held);
}

void GeneralizedHeap::insert_td(std::vector<Key>& batch,
                                std::uint64_t target) {
    // Claim the target while still holding the root. The slot is empty; only
    // transient heapify locks can delay the claim.
    Backoff claim;
    for (;;) {
        std::uint32_t expected = kAvail;
        if (states_[target].compare_exchange_weak(expected, kTarget,
                                                  std::memory_order_acq_rel,
                                                  std::memory_order_relaxed))
            break;
        claim.pause();
    }

    // The root is the first node on the insert path.
    merge_step_down(batch, 1);
    counters_.propagation_node_visits.fetch_add(1, std::memory_order_relaxed);

    const auto path = path_to_slot(target);
    std::uint64_t cur = 1;  // held
    for (std::size_t i = 1; i < path.size(); ++i) {
        const std::uint64_t next = path[i];
        if (cur != 1 && state(target) == kMarked) {
            ship_to_root(batch, target, cur);
            return;
        }
        if (next == target) {
            Backoff backoff;
            for (;;) {
                std::uint32_t s = state(target);
                if (s == kTarget) {
                    if (cas_state(target, kTarget, kInUse)) {
                        if (recorder_)
                            recorder_->lock_acquired(
                                static_cast<std::uint32_t>(target));
                        unlock(cur);
                        write_node(target, batch);
                        counters_.propagation_node_visits.fetch_add(
                            1, std::memory_order_relaxed);
                        unlock(target);
                        return;
                    }
                } else if (s == kMarked) {
                    ship_to_root(batch, target, cur);
                    return;
                } else {
                    backoff.pause();
                }
            }
        }
        // Interior path node. A TARGET/MARKED slot here is frozen empty
        // while we hold its ancestor (its owner is queued behind us), so it
        // is skipped without locking; merging with it would be a no-op.
        Backoff backoff;
        bool skipped = false;
        for (;;) {
            std::uint32_t s = state(next);
            if (s == kAvail) {
                if (cas_state(next, kAvail, kInUse)) break;
            } else if (s == kTarget || s == kMarked) {
                skipped = true;
                break;
            } else {
                backoff.pause();
            }
        }
        if (skipped) continue;  // keep holding cur past the empty slot
        if (recorder_) recorder_->lock_acquired(static_cast<std::uint32_t>(next));
        assert(!node_is_sentinel(next));
        merge_step_down(batch, next);
        counters_.propagation_node_visits.fetch_add(1,
                                                    std::memory_order_relaxed);
        unlock(cur);
        cur = next;
    }
}

void GeneralizedHeap::insert_bu(std::vector<Key>& batch,
                                std::uint64_t target) {
    // Park the batch at the target before letting go of the root.
    Backoff claim;
    for (;;) {
        std::uint32_t s = state(target);
        if (s == kAvail && cas_state(target, kAvail, kInUse)) break;
        if (s == kDelMod && cas_state(target, kDelMod, kInUse)) break;
        claim.pause();
    }
    if (recorder_) recorder_->lock_acquired(static_cast<std::uint32_t>(target));
    write_node(target, batch);
    counters_.propagation_node_visits.fetch_add(1, std::memory_order_relaxed);
    unlock(1);

    std::uint64_t cur = target;  // held
    while (cur != 1) {
        const std::uint64_t parent = cur / 2;
        // Park: others may take the slot; DELMOD on return means a deleter
        // already folded our batch into its heapify.
        if (recorder_) recorder_->lock_released(static_cast<std::uint32_t>(cur));
        states_[cur].store(kInsHold, std::memory_order_release);

        Backoff lock_parent;
        for (;;) {
            std::uint32_t s = state(parent);
            if (s == kAvail && cas_state(parent, kAvail, kInUse)) break;
            if (s == kDelMod && cas_state(parent, kDelMod, kInUse)) break;
            lock_parent.pause();  // INUSE or a foreign INSHOLD: wait it out
        }
        if (recorder_)
            recorder_->lock_acquired(static_cast<std::uint32_t>(parent));

        if (node_is_sentinel(parent)) {
            // Parent was deleted, so the whole subtree including our parked
            // slot has been consumed; nothing left to fix.
            unlock(parent);
            abandon_park(cur);
            return;
        }

        bool owned = false;
        Backoff reacquire;
        for (;;) {
            std::uint32_t s = state(cur);
            if (s == kInsHold) {
                if (cas_state(cur, kInsHold, kInUse)) {
                    owned = true;
                    break;
                }
            } else if (s == kDelMod) {
                if (cas_state(cur, kDelMod, kAvail)) break;
            } else if (s == kAvail) {
                break;
            } else {
                reacquire.pause();  // INUSE: a deleter is working on it
            }
        }

        if (owned) {
            if (recorder_)
                recorder_->lock_acquired(static_cast<std::uint32_t>(cur));
            auto cur_keys = node_span(cur);
            auto parent_keys = node_span(parent);
            if (cur_keys.front() >= parent_keys.back()) {
                counters_.early_stops.fetch_add(1, std::memory_order_relaxed);
                unlock(cur);
                unlock(parent);
                return;
            }
            merge_step_up(cur, parent);
            counters_.propagation_node_visits.fetch_add(
                1, std::memory_order_relaxed);
            unlock(cur);
        }
        cur = parent;
    }
    unlock(1);
}

void GeneralizedHeap::merge_step_up(std::uint64_t child,
                                    std::uint64_t parent) {
    auto child_keys = node_span(child);
    auto parent_keys = node_span(parent);
    if (options_.elide_merges && !needs_merge(child_keys, parent_keys)) {
        // Not early-stopped, so the pair is fully inverted: a swap fixes it.
        counters_.elided_merges.fetch_add(1, std::memory_order_relaxed);
        std::swap_ranges(child_keys.begin(), child_keys.end(),
                         parent_keys.begin());
        return;
    }
    std::vector<Key> merged(child_keys.size() + parent_keys.size());
    merge_sorted(child_keys, parent_keys, merged);
    std::copy(merged.begin(), merged.begin() + k_, parent_keys.begin());
    std::copy(merged.begin() + k_, merged.end(), child_keys.begin());
    counters_.merges.fetch_add(1, std::memory_order_relaxed);
}

void GeneralizedHeap::abandon_park(std::uint64_t slot) {
    // Our parked slot was consumed. Normalize a leftover DELMOD marker; an
    // INSHOLD here belongs to a later insert that re-claimed the slot.
    Backoff backoff;
    for (;;) {
        std::uint32_t s = state(slot);
        if (s == kDelMod) {
            if (cas_state(slot, kDelMod, kAvail)) return;
        } else if (s == kAvail || s == kInsHold) {
            return;
        } else {
            backoff.pause();
        }
    }
}

// ---------------------------------------------------------------- delete --

std::vector<Key> GeneralizedHeap::delete_min() {
    auto result = do_delete(/*throw_on_empty=*/true);
    return std::move(*result);
}

std::optional<std::vector<Key>> GeneralizedHeap::try_delete_min() {
    return do_delete(/*throw_on_empty=*/false);
}

std::optional<std::vector<Key>> GeneralizedHeap::do_delete(
    bool throw_on_empty) {
    if (recorder_) recorder_->op_begin(OpKind::Delete, {});
    lock_avail(1);

    const std::uint64_t nodes = node_count_.load(std::memory_order_relaxed);
    if (nodes == 0) {
        if (partial_.empty()) {
            unlock(1);
            if (recorder_) recorder_->op_end({});
            if (throw_on_empty) throw EmptyHeapError("delete_min: heap empty");
            return std::nullopt;
        }
        // Fewer than k keys in the whole heap: they all live here.
        std::vector<Key> result(partial_.keys().begin(),
                                partial_.keys().end());
        partial_.clear();
        note_partial_len();
        delete_count_.fetch_add(1, std::memory_order_relaxed);
        counters_.deletes.fetch_add(1, std::memory_order_relaxed);
        unlock(1);
        if (recorder_) recorder_->op_end(result);
        return result;
    }

    std::vector<Key> result(node_span(1).begin(), node_span(1).end());
    assert(result.back() != kMaxKey);
    delete_count_.fetch_add(1, std::memory_order_relaxed);
    counters_.deletes.fetch_add(1, std::memory_order_relaxed);
    node_count_.store(nodes - 1, std::memory_order_relaxed);

    if (nodes == 1) {
        fill_sentinel(1);
        unlock(1);
        if (recorder_) recorder_->op_end(result);
        return result;
    }

    refill_root_from(slot_for_rank(nodes));
    remerge_root_with_partial();
    heapify_down();
    if (recorder_) recorder_->op_end(result);
    if (result.back() == kMaxKey)
        throw std::logic_error("sentinel escaped into delete result");
    return result;
}

void GeneralizedHeap::refill_root_from(std::uint64_t last) {
    Backoff backoff;
    if (variant_ == Variant::TD) {
        for (;;) {
            std::uint32_t s = state(last);
            if (s == kAvail) {
                if (cas_state(last, kAvail, kInUse)) {
                    if (recorder_)
                        recorder_->lock_acquired(
                            static_cast<std::uint32_t>(last));
                    write_node(1, node_span(last));
                    fill_sentinel(last);
                    unlock(last);
                    return;
                }
            } else if (s == kTarget) {
                if (cas_state(last, kTarget, kMarked)) {
                    // The inserter writes its carried batch into the root
                    // and acknowledges with AVAIL.
                    Backoff wait;
                    while (states_[last].load(std::memory_order_acquire) !=
                           kAvail)
                        wait.pause();
                    return;
                }
            } else {
                backoff.pause();  // INUSE: owner arriving or heapify passing
            }
        }
    }
    for (;;) {
        std::uint32_t s = state(last);
        if (s == kAvail) {
            if (cas_state(last, kAvail, kInUse)) {
                if (recorder_)
                    recorder_->lock_acquired(static_cast<std::uint32_t>(last));
                write_node(1, node_span(last));
                fill_sentinel(last);
                unlock(last);
                return;
            }
        } else if (s == kInsHold) {
            // Take the in-flight batch; DELMOD tells the inserter we did.
            if (cas_state(last, kInsHold, kInUse)) {
                if (recorder_)
                    recorder_->lock_acquired(static_cast<std::uint32_t>(last));
                write_node(1, node_span(last));
                fill_sentinel(last);
                unlock(last, kDelMod);
                return;
            }
        } else if (s == kDelMod) {
            if (cas_state(last, kDelMod, kInUse)) {
                if (recorder_)
                    recorder_->lock_acquired(static_cast<std::uint32_t>(last));
                write_node(1, node_span(last));
                fill_sentinel(last);
                unlock(last);
                return;
            }
        } else {
            backoff.pause();
        }
    }
}

void GeneralizedHeap::remerge_root_with_partial() {
    if (partial_.empty()) return;
    auto root = node_span(1);
    if (options_.elide_merges && partial_.keys().front() >= root.back()) {
        counters_.elided_merges.fetch_add(1, std::memory_order_relaxed);
        return;
    }
    auto split = merge_and_sort(root, partial_.keys(), k_);
    counters_.merges.fetch_add(1, std::memory_order_relaxed);
    write_node(1, split.hi);
    partial_.assign(std::move(split.lo));
    note_partial_len();
}

GeneralizedHeap::HeldChild GeneralizedHeap::acquire_child(
    std::uint64_t slot) {
    HeldChild held;
    held.slot = slot;
    if (slot > slot_count_) return held;
    Backoff backoff;
    for (;;) {
        std::uint32_t s = state(slot);
        if (s == kAvail) {
            if (cas_state(slot, kAvail, kInUse)) {
                held.locked = true;
                held.release_as = kAvail;
                break;
            }
        } else if (variant_ == Variant::TD &&
                   (s == kTarget || s == kMarked)) {
            // Frozen empty while we hold the parent: the claiming inserter
            // cannot arrive without passing through us.
            return held;
        } else if (variant_ == Variant::BU && s == kInsHold) {
            if (cas_state(slot, kInsHold, kInUse)) {
                held.locked = true;
                held.release_as = kDelMod;
                break;
            }
        } else if (variant_ == Variant::BU && s == kDelMod) {
            if (cas_state(slot, kDelMod, kInUse)) {
                held.locked = true;
                held.release_as = kAvail;
                break;
            }
        } else {
            backoff.pause();
        }
    }
    if (recorder_) recorder_->lock_acquired(static_cast<std::uint32_t>(slot));
    held.empty = node_is_sentinel(slot);
    return held;
}

void GeneralizedHeap::release_child(const HeldChild& child) {
    if (child.locked) unlock(child.slot, child.release_as);
}

void GeneralizedHeap::heapify_down() {
    std::uint64_t cur = 1;  // held
    std::uint32_t cur_release = kAvail;
    std::vector<Key> merged(2 * k_);
    for (;;) {
        HeldChild left = acquire_child(2 * cur);
        HeldChild right = acquire_child(2 * cur + 1);
        if (left.empty && right.empty) {
            release_child(left);
            release_child(right);
            unlock(cur, cur_release);
            return;
        }
        auto cur_keys = node_span(cur);
        const Key left_min =
            left.empty ? kMaxKey : node_span(left.slot).front();
        const Key right_min =
            right.empty ? kMaxKey : node_span(right.slot).front();
        if (cur_keys.back() <= left_min && cur_keys.back() <= right_min) {
            counters_.early_stops.fetch_add(1, std::memory_order_relaxed);
            release_child(left);
            release_child(right);
            unlock(cur, cur_release);
            return;
        }

        // Merge the children; lo lands in the child whose max was larger
        // (right on ties), hi in the other, which we then descend into.
        HeldChild* hi_child;
        HeldChild* lo_child;
        if (left.empty) {
            hi_child = &right;
            lo_child = &left;
        } else if (right.empty) {
            hi_child = &left;
            lo_child = &right;
        } else {
            auto lkeys = node_span(left.slot);
            auto rkeys = node_span(right.slot);
            const bool lo_is_left = lkeys.back() > rkeys.back();
            hi_child = lo_is_left ? &right : &left;
            lo_child = lo_is_left ? &left : &right;
            if (options_.elide_merges && !needs_merge(lkeys, rkeys)) {
                counters_.elided_merges.fetch_add(1,
                                                  std::memory_order_relaxed);
            } else {
                merge_sorted(lkeys, rkeys, merged);
                std::copy(merged.begin(), merged.begin() + k_,
                          node_span(hi_child->slot).begin());
                std::copy(merged.begin() + k_, merged.end(),
                          node_span(lo_child->slot).begin());
                counters_.merges.fetch_add(1, std::memory_order_relaxed);
            }
        }

        auto hi_keys = node_span(hi_child->slot);
        if (options_.elide_merges && !needs_merge(cur_keys, hi_keys)) {
            // Early stop above rules out the ordered case, so this is a
            // full inversion.
            counters_.elided_merges.fetch_add(1, std::memory_order_relaxed);
            std::swap_ranges(cur_keys.begin(), cur_keys.end(),
                             hi_keys.begin());
        } else {
            merge_sorted(cur_keys, hi_keys, merged);
            std::copy(merged.begin(), merged.begin() + k_, cur_keys.begin());
            std::copy(merged.begin() + k_, merged.end(), hi_keys.begin());
            counters_.merges.fetch_add(1, std::memory_order_relaxed);
        }

        counters_.propagation_node_visits.fetch_add(1,
                                                    std::memory_order_relaxed);
        release_child(*lo_child);
        unlock(cur, cur_release);
        cur = hi_child->slot;
        cur_release = hi_child->release_as;
    }
}

// ----------------------------------------------------------------- stats --

HeapPeek GeneralizedHeap::peek_stats() const {
    HeapPeek peek;
    peek.node_count = node_count_.load(std::memory_order_relaxed);
    peek.partial_len = partial_len_.load(std::memory_order_relaxed);
    peek.key_count = peek.node_count * k_ + peek.partial_len;
    peek.level_count = peek.node_count ? std::bit_width(peek.node_count) : 0;
    return peek;
}

HeapCounters GeneralizedHeap::counters() const {
    HeapCounters out;
    out.inserts = counters_.inserts.load(std::memory_order_relaxed);
    out.deletes = counters_.deletes.load(std::memory_order_relaxed);
    out.merges = counters_.merges.load(std::memory_order_relaxed);
    out.elided_merges =
        counters_.elided_merges.load(std::memory_order_relaxed);
    out.early_stops = counters_.early_stops.load(std::memory_order_relaxed);
    out.propagation_node_visits =
        counters_.propagation_node_visits.load(std::memory_order_relaxed);
    out.coop_handoffs =
        counters_.coop_handoffs.load(std::memory_order_relaxed);
    out.max_partial_len =
        counters_.max_partial_len.load(std::memory_order_relaxed);
    return out;
}

void GeneralizedHeap::reset_counters() {
    counters_.inserts.store(0, std::memory_order_relaxed);
    counters_.deletes.store(0, std::memory_order_relaxed);
    counters_.merges.store(0, std::memory_order_relaxed);
    counters_.elided_merges.store(0, std::memory_order_relaxed);
    counters_.early_stops.store(0, std::memory_order_relaxed);
    counters_.propagation_node_visits.store(0, std::memory_order_relaxed);
    counters_.coop_handoffs.store(0, std::memory_order_relaxed);
    counters_.max_partial_len.store(0, std::memory_order_relaxed);
}

std::uint64_t GeneralizedHeap::select_insert_target() const {
    const std::uint64_t nodes = node_count_.load(std::memory_order_relaxed);
    if (nodes == max_nodes_) throw CapacityError("heap full");
    return slot_for_rank(nodes + 1);
}

std::vector<Key> GeneralizedHeap::collect_resident() const {
    std::vector<Key> keys;
    const std::uint64_t nodes = node_count_.load(std::memory_order_relaxed);
    keys.reserve(nodes * k_ + partial_.size());
    for (std::uint64_t rank = 1; rank <= nodes; ++rank) {
        auto node = node_span(slot_for_rank(rank));
        keys.insert(keys.end(), node.begin(), node.end());
    }
    keys.insert(keys.end(), partial_.keys().begin(), partial_.keys().end());
    return keys;
}

InvariantReport GeneralizedHeap::check_invariants() const {
    InvariantReport report;
    auto fail = [&](std::string detail) {
        report.ok = false;
        if (!report.detail.empty()) report.detail += "; ";
        report.detail += std::move(detail);
    };

    const std::uint64_t nodes = node_count_.load(std::memory_order_relaxed);
    std::vector<bool> occupied(slot_count_ + 1, false);
    for (std::uint64_t rank = 1; rank <= nodes; ++rank)
        occupied[slot_for_rank(rank)] = true;

    for (std::uint64_t slot = 1; slot <= slot_count_; ++slot) {
        const std::uint32_t s = states_[slot].load(std::memory_order_acquire);
        if (s != kAvail)
            fail("slot " + std::to_string(slot) + " state " +
                 std::to_string(s) + " != AVAIL at quiescence");
        auto keys = node_span(slot);
        if (!occupied[slot]) {
            if (keys.front() != kMaxKey)
                fail("unoccupied slot " + std::to_string(slot) +
                     " holds keys");
            continue;
        }
        if (!is_sorted_keys(keys))
            fail("slot " + std::to_string(slot) + " unsorted");  // property 2
        if (keys.back() == kMaxKey)
            fail("slot " + std::to_string(slot) + " contains sentinel");
        if (slot > 1) {
            auto parent = node_span(slot / 2);
            if (!occupied[slot / 2])
                fail("slot " + std::to_string(slot) + " parent unoccupied");
            else if (keys.front() < parent.back())
                fail("property 1 violated between " + std::to_string(slot) +
                     " and parent");
        }
    }
    if (!is_sorted_keys(partial_.keys())) fail("partial buffer unsorted");
    if (partial_.size() > k_ - 1) fail("partial buffer overflow");
    if (nodes >= 1 && !partial_.empty() &&
        partial_.keys().front() < node_span(1).back())
        fail("property 3 violated");  // partial must dominate the root
    return report;
}

}  // namespace batchheap
