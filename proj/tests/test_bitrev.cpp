#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>

#include "batchheap/bitrev.hpp"
#include "doctest.h"

using namespace batchheap;

TEST_CASE("bit_reverse of 3-bit counters") {
    std::vector<std::uint64_t> offsets;
    for (std::uint64_t c = 0; c < 8; ++c) offsets.push_back(bit_reverse(c, 3));
    CHECK(offsets == std::vector<std::uint64_t>{0, 4, 2, 6, 1, 5, 3, 7});
}

TEST_CASE("single-slot level") {
    CHECK(bit_reverse(0, 0) == 0);
    CHECK(slot_for_rank(1) == 1);
}

TEST_CASE("slot_for_rank is a per-level bijection") {
    for (unsigned level = 0; level <= 7; ++level) {
        std::set<std::uint64_t> slots;
        const std::uint64_t base = 1ull << level;
        for (std::uint64_t rank = base; rank < 2 * base; ++rank) {
            const std::uint64_t slot = slot_for_rank(rank);
            CHECK(slot >= base);
            CHECK(slot < 2 * base);
            slots.insert(slot);
        }
        CHECK(slots.size() == base);
    }
}

TEST_CASE("path_to_slot shape") {
    auto path = path_to_slot(11);
    CHECK(path.front() == 1);
    CHECK(path.back() == 11);
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        CHECK(path[i] == path[i + 1] / 2);
}

TEST_CASE("consecutive targets share only the root, levels up to 64 slots") {
    // Brute-force path intersection for consecutive ranks within one level.
    for (unsigned level = 1; level <= 6; ++level) {
        const std::uint64_t base = 1ull << level;
        for (std::uint64_t rank = base; rank + 1 < 2 * base; ++rank) {
            auto p1 = path_to_slot(slot_for_rank(rank));
            auto p2 = path_to_slot(slot_for_rank(rank + 1));
            std::set<std::uint32_t> s1(p1.begin(), p1.end());
            std::size_t shared = 0;
            for (std::uint32_t node : p2) shared += s1.count(node);
            CHECK(shared == 1);  // the root only
        }
    }
}
