#include "batchheap/seq_heap.hpp"

#include <algorithm>
#include <bit>
#include <cassert>

namespace batchheap {

SeqHeap::SeqHeap(std::uint32_t k, std::uint32_t max_nodes)
    : k_(k), max_nodes_(max_nodes), partial_(k) {
    if (!valid_node_capacity(k))
        throw ConfigError("node capacity must be a power of two in [1,1024]");
    if (max_nodes < 1) throw ConfigError("max_nodes must be >= 1");
    slot_count_ = (std::uint64_t{1} << std::bit_width(std::uint64_t{max_nodes})) - 1;
    keys_.assign(slot_count_ * k_, kMaxKey);
}

std::span<Key> SeqHeap::node_span(std::uint64_t slot) {
    return {keys_.data() + (slot - 1) * k_, k_};
}

std::span<const Key> SeqHeap::node_span(std::uint64_t slot) const {
    return {keys_.data() + (slot - 1) * k_, k_};
}

void SeqHeap::fill_sentinel(std::uint64_t slot) {
    auto node = node_span(slot);
    std::fill(node.begin(), node.end(), kMaxKey);
}

bool SeqHeap::root_phase(std::span<const Key> items, std::vector<Key>& batch,
                         std::uint64_t& rank) {
    std::vector<Key> sorted = sort_batch(items, k_);
    if (sorted.size() + partial_.size() >= k_ && node_count_ == max_nodes_)
        throw CapacityError("heap full");

    std::vector<Key> combined(sorted.size() + partial_.size());
    merge_sorted(sorted, partial_.keys(), combined);
    if (combined.size() < k_) {
        if (node_count_ >= 1 && combined.front() < node_span(1).back()) {
            auto split = merge_and_sort(node_span(1), combined, k_);
            ++merges_;
            std::copy(split.hi.begin(), split.hi.end(), node_span(1).begin());
            partial_.assign(std::move(split.lo));
        } else {
            partial_.assign(std::move(combined));
        }
        return false;
    }
    batch.assign(combined.begin(), combined.begin() + k_);
    partial_.assign({combined.begin() + k_, combined.end()});
    rank = ++node_count_;
    return true;
}

void SeqHeap::insert_td(std::span<const Key> items) {
    std::vector<Key> batch;
    std::uint64_t rank = 0;
    if (!root_phase(items, batch, rank)) return;

    const std::uint64_t target = slot_for_rank(rank);
    for (std::uint32_t slot : path_to_slot(target)) {
        if (slot == target) {
            std::copy(batch.begin(), batch.end(), node_span(slot).begin());
            return;
        }
        auto node = node_span(slot);
        if (!needs_merge(node, batch)) {
            if (node.back() <= batch.front()) continue;
            std::swap_ranges(node.begin(), node.end(), batch.begin());
            continue;
        }
        std::vector<Key> merged(2 * k_);
        merge_sorted(node, batch, merged);
        std::copy(merged.begin(), merged.begin() + k_, node.begin());
        batch.assign(merged.begin() + k_, merged.end());
        ++merges_;
    }
}

void SeqHeap::insert_bu(std::span<const Key> items) {
    std::vector<Key> batch;
    std::uint64_t rank = 0;
    if (!root_phase(items, batch, rank)) return;

    std::uint64_t cur = slot_for_rank(rank);
    std::copy(batch.begin(), batch.end(), node_span(cur).begin());
    while (cur != 1) {
        const std::uint64_t parent = cur / 2;
        auto cur_keys = node_span(cur);
        auto parent_keys = node_span(parent);
        if (cur_keys.front() >= parent_keys.back()) return;  // early stop
        if (!needs_merge(cur_keys, parent_keys)) {
            std::swap_ranges(cur_keys.begin(), cur_keys.end(),
                             parent_keys.begin());
        } else {
            std::vector<Key> merged(2 * k_);
            merge_sorted(cur_keys, parent_keys, merged);
            std::copy(merged.begin(), merged.begin() + k_,
                      parent_keys.begin());
            std::copy(merged.begin() + k_, merged.end(), cur_keys.begin());
            ++merges_;
        }
        cur = parent;
    }
}

std::vector<Key> SeqHeap::delete_min() {
    if (node_count_ == 0) {
        if (partial_.empty()) throw EmptyHeapError("delete_min: heap empty");
        std::vector<Key> result(partial_.keys().begin(),
                                partial_.keys().end());
        partial_.clear();
        return result;
    }
    std::vector<Key> result(node_span(1).begin(), node_span(1).end());
    const std::uint64_t old_rank = node_count_--;
    if (old_rank == 1) {
        fill_sentinel(1);
        return result;
    }

    const std::uint64_t last = slot_for_rank(old_rank);
    std::copy(node_span(last).begin(), node_span(last).end(),
              node_span(1).begin());
    fill_sentinel(last);

    if (!partial_.empty() && partial_.keys().front() < node_span(1).back()) {
        auto split = merge_and_sort(node_span(1), partial_.keys(), k_);
        ++merges_;
        std::copy(split.hi.begin(), split.hi.end(), node_span(1).begin());
        partial_.assign(std::move(split.lo));
    }

    std::vector<Key> merged(2 * k_);
    std::uint64_t cur = 1;
    for (;;) {
        const std::uint64_t l = 2 * cur, r = 2 * cur + 1;
        const bool lempty = l > slot_count_ || node_span(l).front() == kMaxKey;
        const bool rempty = r > slot_count_ || node_span(r).front() == kMaxKey;
        if (lempty && rempty) return result;
        auto cur_keys = node_span(cur);
        const Key lmin = lempty ? kMaxKey : node_span(l).front();
        const Key rmin = rempty ? kMaxKey : node_span(r).front();
        if (cur_keys.back() <= lmin && cur_keys.back() <= rmin)
            return result;  // early stop

        std::uint64_t hi_slot;
        if (lempty) {
            hi_slot = r;
        } else if (rempty) {
            hi_slot = l;
        } else {
            auto lkeys = node_span(l), rkeys = node_span(r);
            const bool lo_is_left = lkeys.back() > rkeys.back();
            hi_slot = lo_is_left ? r : l;
            if (needs_merge(lkeys, rkeys)) {
                merge_sorted(lkeys, rkeys, merged);
                std::copy(merged.begin(), merged.begin() + k_,
                          node_span(hi_slot).begin());
                std::copy(merged.begin() + k_, merged.end(),
                          node_span(lo_is_left ? l : r).begin());
                ++merges_;
            }
        }
        auto hi_keys = node_span(hi_slot);
        if (!needs_merge(cur_keys, hi_keys)) {
            std::swap_ranges(cur_keys.begin(), cur_keys.end(),
                             hi_keys.begin());
        } else {
            merge_sorted(cur_keys, hi_keys, merged);
            std::copy(merged.begin(), merged.begin() + k_, cur_keys.begin());
            std::copy(merged.begin() + k_, merged.end(), hi_keys.begin());
            ++merges_;
        }
        cur = hi_slot;
    }
}

std::vector<Key> SeqHeap::collect_resident() const {
    std::vector<Key> out;
    out.reserve(key_count());
    for (std::uint64_t rank = 1; rank <= node_count_; ++rank) {
        auto node = node_span(slot_for_rank(rank));
        out.insert(out.end(), node.begin(), node.end());
    }
    out.insert(out.end(), partial_.keys().begin(), partial_.keys().end());
    return out;
}

InvariantReportLite SeqHeap::check_properties() const {
    InvariantReportLite report;
    auto fail = [&](std::string detail) {
        report.ok = false;
        if (!report.detail.empty()) report.detail += "; ";
        report.detail += std::move(detail);
    };
    std::vector<bool> occupied(slot_count_ + 1, false);
    for (std::uint64_t rank = 1; rank <= node_count_; ++rank)
        occupied[slot_for_rank(rank)] = true;
    for (std::uint64_t slot = 1; slot <= slot_count_; ++slot) {
        auto keys = node_span(slot);
        if (!occupied[slot]) {
            if (keys.front() != kMaxKey)
                fail("unoccupied slot " + std::to_string(slot) + " holds keys");
            continue;
        }
        if (!is_sorted_keys(keys))
            fail("slot " + std::to_string(slot) + " unsorted");
        if (keys.back() == kMaxKey)
            fail("slot " + std::to_string(slot) + " contains sentinel");
        if (slot > 1 && keys.front() < node_span(slot / 2).back())
            fail("property 1 violated at slot " + std::to_string(slot));
    }
    if (!is_sorted_keys(partial_.keys())) fail("partial buffer unsorted");
    if (node_count_ >= 1 && !partial_.empty() &&
        partial_.keys().front() < node_span(1).back())
        fail("property 3 violated");
    return report;
}

std::vector<std::vector<Key>> replay(const std::vector<OpRecord>& ordered,
                                     std::uint32_t k) {
    MultisetOracle oracle;
    std::vector<std::vector<Key>> deletes;
    for (const OpRecord& op : ordered) {
        if (op.op == OpKind::Insert)
            oracle.insert(op.keys);
        else
            deletes.push_back(oracle.delete_min(k));
    }
    return deletes;
}

}  // namespace batchheap
