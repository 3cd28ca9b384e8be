#pragma once

// Bit-reversal target selection. Node slots are 1-based with the root at 1;
// level L spans slots [2^L, 2^(L+1)). The r-th node ever resident (rank r,
// 1-based) lives at slot 2^L + reverse(r - 2^L) so that consecutive inserts
// at one level descend into alternating subtrees and their insert paths
// share only ancestors above the level. Deletes walk ranks backwards.

#include <bit>
#include <cstdint>
#include <vector>

namespace batchheap {

inline std::uint64_t bit_reverse(std::uint64_t x, unsigned bits) {
    std::uint64_t out = 0;
    for (unsigned i = 0; i < bits; ++i) {
        out = (out << 1) | (x & 1);
        x >>= 1;
    }
    return out;
}

// floor(log2(rank)); rank >= 1.
inline unsigned level_of_rank(std::uint64_t rank) {
    return std::bit_width(rank) - 1;
}

inline std::uint64_t slot_for_rank(std::uint64_t rank) {
    const unsigned level = level_of_rank(rank);
    const std::uint64_t base = std::uint64_t{1} << level;
    return base + bit_reverse(rank - base, level);
}

// Root-to-slot index path (slot's ancestors by repeated halving).
inline std::vector<std::uint32_t> path_to_slot(std::uint64_t slot) {
    std::vector<std::uint32_t> path;
    for (std::uint64_t n = slot; n >= 1; n /= 2)
        path.push_back(static_cast<std::uint32_t>(n));
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace batchheap
