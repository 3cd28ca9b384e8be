#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <queue>
#include <random>

#include "batchheap/seq_heap.hpp"
#include "doctest.h"

using namespace batchheap;

namespace {

std::vector<Key> random_batch(std::mt19937_64& rng, std::size_t len,
                              Key range = 1000) {
    std::uniform_int_distribution<Key> dist(0, range);
    std::vector<Key> keys(len);
    for (auto& key : keys) key = dist(rng);
    return keys;
}

OpRecord ins_op(std::vector<Key> keys) {
    OpRecord op;
    op.op = OpKind::Insert;
    std::sort(keys.begin(), keys.end());
    op.keys = std::move(keys);
    return op;
}

OpRecord del_op() {
    OpRecord op;
    op.op = OpKind::Delete;
    return op;
}

}  // namespace

TEST_CASE("td insert then delete returns the k smallest") {
    SeqHeap heap(2, 64);
    heap.insert_td(std::vector<Key>{9, 8});
    heap.insert_td(std::vector<Key>{1, 2});
    CHECK(heap.delete_min() == std::vector<Key>{1, 2});
}

TEST_CASE("partial-batch insert keeps property 3") {
    SeqHeap heap(2, 64);
    heap.insert_td(std::vector<Key>{5, 1});
    CHECK(heap.delete_min() == std::vector<Key>{1, 5});

    heap.insert_td(std::vector<Key>{5, 1});
    heap.insert_td(std::vector<Key>{3});
    CHECK(heap.partial().size() == 1);
    CHECK(heap.partial().front() == 5);
    CHECK(heap.delete_min() == std::vector<Key>{1, 3});
}

TEST_CASE("both insert variants are multiset-equivalent after every prefix") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::uint32_t k = 1u << (rng() % 4);
        SeqHeap td(k, 4096), bu(k, 4096);
        for (int step = 0; step < 40; ++step) {
            auto batch = random_batch(rng, 1 + rng() % k);
            td.insert_td(batch);
            bu.insert_bu(batch);
            auto a = td.collect_resident();
            auto b = bu.collect_resident();
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            REQUIRE(a == b);
            REQUIRE(td.check_properties().ok);
            REQUIRE(bu.check_properties().ok);
        }
    }
}

TEST_CASE("ascending bottom-up inserts never merge beyond placement") {
    SeqHeap heap(4, 256);
    Key next = 0;
    for (int batch = 0; batch < 32; ++batch) {
        std::vector<Key> keys{next, next + 1, next + 2, next + 3};
        next += 4;
        heap.insert_bu(keys);
    }
    CHECK(heap.merge_count() == 0);
    CHECK(heap.check_properties().ok);
}

TEST_CASE("SeqHeap delete trace equals multiset oracle on random histories") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10'000; ++trial) {
        const std::uint32_t k = 1u << (rng() % 3);
        SeqHeap heap(k, 256);
        MultisetOracle oracle;
        const bool use_bu = rng() & 1;
        for (int step = 0; step < 20; ++step) {
            if (rng() & 1) {
                auto batch = random_batch(rng, 1 + rng() % k, 50);
                use_bu ? heap.insert_bu(batch) : heap.insert_td(batch);
                oracle.insert(batch);
            } else {
                std::vector<Key> expected = oracle.delete_min(k);
                if (expected.empty()) {
                    CHECK_THROWS_AS(heap.delete_min(), EmptyHeapError);
                } else {
                    REQUIRE(heap.delete_min() == expected);
                }
            }
        }
    }
}

TEST_CASE("k=1 matches a textbook binary heap step for step") {
    std::mt19937_64 rng(23);
    SeqHeap td(1, 4096), bu(1, 4096);
    std::priority_queue<Key, std::vector<Key>, std::greater<>> textbook;
    for (int step = 0; step < 3000; ++step) {
        if (rng() & 1) {
            const Key key = rng() % 100;
            td.insert_td(std::vector<Key>{key});
            bu.insert_bu(std::vector<Key>{key});
            textbook.push(key);
        } else if (!textbook.empty()) {
            const Key expected = textbook.top();
            textbook.pop();
            CHECK(td.delete_min() == std::vector<Key>{expected});
            CHECK(bu.delete_min() == std::vector<Key>{expected});
        }
    }
}

TEST_CASE("replay semantics") {
    SUBCASE("k=1") {
        auto trace = replay({ins_op({3}), ins_op({1}), del_op()}, 1);
        REQUIRE(trace.size() == 1);
        CHECK(trace[0] == std::vector<Key>{1});
    }
    SUBCASE("empty-heap error is an empty trace entry") {
        auto trace = replay({ins_op({1, 2}), del_op(), del_op()}, 2);
        REQUIRE(trace.size() == 2);
        CHECK(trace[0] == std::vector<Key>{1, 2});
        CHECK(trace[1].empty());
    }
    SUBCASE("random history agrees with SeqHeap") {
        std::mt19937_64 rng(5);
        std::vector<OpRecord> ops;
        SeqHeap heap(2, 256);
        std::vector<std::vector<Key>> heap_trace;
        for (int step = 0; step < 50; ++step) {
            if (rng() & 1) {
                auto batch = random_batch(rng, 1 + rng() % 2, 30);
                heap.insert_td(batch);
                ops.push_back(ins_op(batch));
            } else {
                ops.push_back(del_op());
                try {
                    heap_trace.push_back(heap.delete_min());
                } catch (const EmptyHeapError&) {
                    heap_trace.push_back({});
                }
            }
        }
        CHECK(replay(ops, 2) == heap_trace);
    }
}
