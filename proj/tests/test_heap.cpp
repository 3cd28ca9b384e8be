#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>

#include "batchheap/heap.hpp"
#include "batchheap/seq_heap.hpp"
#include "doctest.h"

using namespace batchheap;

namespace {

std::vector<Key> random_keys(std::mt19937_64& rng, std::size_t n,
                             Key range = 1'000'000) {
    std::uniform_int_distribution<Key> dist(0, range);
    std::vector<Key> keys(n);
    for (auto& key : keys) key = dist(rng);
    return keys;
}

}  // namespace

TEST_CASE("construction") {
    GeneralizedHeap heap(Variant::TD, 4, 1024);
    CHECK(heap.peek_stats().key_count == 0);
    CHECK(heap.peek_stats().level_count == 0);

    GeneralizedHeap tiny(Variant::BU, 1, 8);
    CHECK(tiny.peek_stats().node_count == 0);

    CHECK_THROWS_AS(GeneralizedHeap(Variant::TD, 3, 8), ConfigError);
    CHECK_THROWS_AS(GeneralizedHeap(Variant::TD, 4, 0), ConfigError);
}

TEST_CASE("first batch lands at the root") {
    GeneralizedHeap heap(Variant::TD, 2, 16);
    heap.insert(std::vector<Key>{5, 1});
    CHECK(heap.delete_min() == std::vector<Key>{1, 5});
}

TEST_CASE("partial insert merges through root, property 3") {
    GeneralizedHeap heap(Variant::TD, 2, 16);
    heap.insert(std::vector<Key>{5, 1});  // root=[1,5]
    heap.insert(std::vector<Key>{3});     // root=[1,3], partial=[5]
    auto peek = heap.peek_stats();
    CHECK(peek.node_count == 1);
    CHECK(peek.partial_len == 1);
    CHECK(heap.check_invariants().ok);
    CHECK(heap.delete_min() == std::vector<Key>{1, 3});
    CHECK(heap.delete_min() == std::vector<Key>{5});
}

TEST_CASE("delete on fewer than k keys returns the remainder") {
    GeneralizedHeap heap(Variant::BU, 2, 16);
    heap.insert(std::vector<Key>{7});
    CHECK(heap.delete_min() == std::vector<Key>{7});
    CHECK_THROWS_AS(heap.delete_min(), EmptyHeapError);
    CHECK_FALSE(heap.try_delete_min().has_value());
}

TEST_CASE("single-child heapify") {
    GeneralizedHeap heap(Variant::TD, 2, 16);
    heap.insert(std::vector<Key>{1, 2});
    heap.insert(std::vector<Key>{3, 4});
    CHECK(heap.delete_min() == std::vector<Key>{1, 2});
    CHECK(heap.delete_min() == std::vector<Key>{3, 4});
}

TEST_CASE("512 random keys keep invariants and conserve the multiset") {
    for (Variant variant : {Variant::TD, Variant::BU}) {
        GeneralizedHeap heap(variant, 4, 1024);
        std::mt19937_64 rng(99);
        std::vector<Key> inserted;
        for (int batch = 0; batch < 128; ++batch) {
            auto keys = random_keys(rng, 4);
            inserted.insert(inserted.end(), keys.begin(), keys.end());
            heap.insert(keys);
        }
        auto report = heap.check_invariants();
        INFO(report.detail);
        CHECK(report.ok);
        auto resident = heap.collect_resident();
        std::sort(resident.begin(), resident.end());
        std::sort(inserted.begin(), inserted.end());
        CHECK(resident == inserted);
    }
}

TEST_CASE("heapsort oracle: drain equals sorted input") {
    for (Variant variant : {Variant::TD, Variant::BU}) {
        const std::uint32_t k = 4;
        GeneralizedHeap heap(variant, k, 1024);
        std::mt19937_64 rng(1234);
        auto keys = random_keys(rng, 1024);
        for (std::size_t at = 0; at < keys.size(); at += k)
            heap.insert(std::span<const Key>(keys).subspan(at, k));
        std::vector<Key> drained;
        for (int i = 0; i < 256; ++i) {
            auto batch = heap.delete_min();
            REQUIRE(std::is_sorted(batch.begin(), batch.end()));
            if (!drained.empty()) REQUIRE(drained.back() <= batch.front());
            drained.insert(drained.end(), batch.begin(), batch.end());
        }
        std::sort(keys.begin(), keys.end());
        CHECK(drained == keys);
        CHECK(heap.peek_stats().key_count == 0);
    }
}

TEST_CASE("peek_stats counts") {
    GeneralizedHeap heap(Variant::TD, 2, 64);
    std::vector<Key> five{10, 20, 30, 40, 50};
    heap.insert(std::span<const Key>(five).subspan(0, 2));
    heap.insert(std::span<const Key>(five).subspan(2, 2));
    heap.insert(std::span<const Key>(five).subspan(4, 1));
    auto peek = heap.peek_stats();
    CHECK(peek.node_count == 2);
    CHECK(peek.key_count == 5);
    CHECK(peek.partial_len == 1);
    CHECK(peek.level_count == 2);
}

TEST_CASE("peek_stats matches sequential oracle after random ops") {
    std::mt19937_64 rng(555);
    GeneralizedHeap heap(Variant::BU, 4, 512);
    SeqHeap oracle(4, 512);
    for (int step = 0; step < 400; ++step) {
        if (rng() & 1) {
            auto keys = random_keys(rng, 1 + rng() % 4, 5000);
            heap.insert(keys);
            oracle.insert_bu(keys);
        } else {
            auto got = heap.try_delete_min();
            if (oracle.key_count() == 0) {
                CHECK_FALSE(got.has_value());
            } else {
                REQUIRE(got.has_value());
                CHECK(*got == oracle.delete_min());
            }
        }
        CHECK(heap.peek_stats().node_count == oracle.node_count());
        CHECK(heap.peek_stats().key_count == oracle.key_count());
    }
}

TEST_CASE("select_insert_target follows bit-reversal ranks") {
    GeneralizedHeap heap(Variant::TD, 2, 16);
    CHECK(heap.select_insert_target() == 1);
    heap.insert(std::vector<Key>{1, 2});
    CHECK(heap.select_insert_target() == 2);
    heap.insert(std::vector<Key>{3, 4});
    CHECK(heap.select_insert_target() == 3);
    heap.insert(std::vector<Key>{5, 6});
    CHECK(heap.select_insert_target() == 4);
    heap.insert(std::vector<Key>{7, 8});
    CHECK(heap.select_insert_target() == 6);  // bit-reversed offset order
}

TEST_CASE("capacity error before mutation") {
    GeneralizedHeap heap(Variant::TD, 2, 2);
    heap.insert(std::vector<Key>{1, 2});
    heap.insert(std::vector<Key>{3, 4});
    auto before = heap.collect_resident();
    CHECK_THROWS_AS(heap.insert(std::vector<Key>{5, 6}), CapacityError);
    CHECK(heap.collect_resident() == before);
    // a partial insert that fits the buffer still succeeds
    heap.insert(std::vector<Key>{9});
    CHECK(heap.peek_stats().key_count == 5);
    CHECK_THROWS_AS(heap.select_insert_target(), CapacityError);
}

TEST_CASE("forced early stop: batch above global max touches one node") {
    GeneralizedHeap heap(Variant::BU, 4, 64);
    heap.insert(std::vector<Key>{1, 2, 3, 4});
    heap.insert(std::vector<Key>{5, 6, 7, 8});
    heap.reset_counters();
    heap.insert(std::vector<Key>{100, 101, 102, 103});
    auto counters = heap.counters();
    CHECK(counters.propagation_node_visits == 1);
    CHECK(counters.early_stops == 1);
}

TEST_CASE("elision toggle changes counters, never results") {
    std::mt19937_64 seed_rng(2024);
    const auto keys = random_keys(seed_rng, 512, 300);
    std::vector<std::vector<Key>> drained[2];
    HeapCounters counters[2];
    for (int mode = 0; mode < 2; ++mode) {
        HeapOptions options;
        options.elide_merges = mode == 0;
        GeneralizedHeap heap(Variant::TD, 4, 512, options);
        for (std::size_t at = 0; at < keys.size(); at += 4)
            heap.insert(std::span<const Key>(keys).subspan(at, 4));
        while (auto batch = heap.try_delete_min())
            drained[mode].push_back(*batch);
        counters[mode] = heap.counters();
    }
    CHECK(drained[0] == drained[1]);
    CHECK(counters[0].elided_merges > 0);
    CHECK(counters[1].elided_merges == 0);
    CHECK(counters[1].merges > counters[0].merges);
}

TEST_CASE("k=1 degenerates to a conventional heap") {
    for (Variant variant : {Variant::TD, Variant::BU}) {
        GeneralizedHeap heap(variant, 1, 4096);
        MultisetOracle oracle;
        std::mt19937_64 rng(9);
        for (int step = 0; step < 2000; ++step) {
            if (rng() & 1) {
                const Key key = rng() % 500;
                heap.insert(std::vector<Key>{key});
                oracle.insert(std::vector<Key>{key});
            } else {
                auto got = heap.try_delete_min();
                auto expected = oracle.delete_min(1);
                if (expected.empty())
                    CHECK_FALSE(got.has_value());
                else
                    CHECK(*got == expected);
            }
        }
        CHECK(heap.check_invariants().ok);
    }
}
