#include "batchheap/batch.hpp"

#include <cassert>

namespace batchheap {

std::vector<Key> sort_batch(std::span<const Key> items, std::uint32_t k) {
    if (items.empty())
        throw CapacityError("sort_batch: empty input");
    if (items.size() > k)
        throw CapacityError("sort_batch: " + std::to_string(items.size()) +
                            " keys exceed node capacity " + std::to_string(k));
    for (Key key : items)
        if (key >= kMaxKey)
            throw std::invalid_argument("sort_batch: key reaches sentinel");
    std::vector<Key> out(items.begin(), items.end());
    std::sort(out.begin(), out.end());
    return out;
}

void merge_sorted(std::span<const Key> a, std::span<const Key> b,
                  std::span<Key> out) {
    assert(out.size() == a.size() + b.size());
    assert(is_sorted_keys(a) && is_sorted_keys(b));
    std::size_t i = 0, j = 0, o = 0;
    while (i < a.size() && j < b.size())
        out[o++] = (b[j] < a[i]) ? b[j++] : a[i++];
    while (i < a.size()) out[o++] = a[i++];
    while (j < b.size()) out[o++] = b[j++];
}

MergeSplit merge_and_sort(std::span<const Key> a, std::span<const Key> b,
                          std::uint32_t k) {
    assert(a.size() + b.size() >= 1);
    std::vector<Key> merged(a.size() + b.size());
    merge_sorted(a, b, merged);
    const std::size_t cut = std::min<std::size_t>(k, merged.size());
    MergeSplit result;
    result.hi.assign(merged.begin(), merged.begin() + cut);
    result.lo.assign(merged.begin() + cut, merged.end());
    return result;
}

}  // namespace batchheap
