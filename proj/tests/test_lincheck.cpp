#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <sstream>

#include "batchheap/lincheck.hpp"
#include "batchheap/workload.hpp"
#include "doctest.h"

using namespace batchheap;

namespace {

StressSpec small_spec(Variant variant, std::uint64_t seed,
                      std::uint32_t workers = 3,
                      std::uint64_t ops_per_worker = 4) {
    StressSpec spec;
    spec.variant = variant;
    spec.k = 2;
    spec.workers = workers;
    spec.ops_per_worker = ops_per_worker;
    spec.partial_pct = 40;
    spec.seed = seed;
    spec.key_range = 12;  // duplicates stress the checkers
    return spec;
}

// Hand-built sequential history: ins(keys) then del returning them.
History tiny_history(Variant variant, std::uint32_t k) {
    History history;
    history.variant = variant;
    history.k = k;
    std::uint64_t ts = 1;
    OpRecord ins;
    ins.worker = 0;
    ins.opid = 1;
    ins.op = OpKind::Insert;
    ins.keys = {1, 2};
    ins.invoke_ts = ts++;
    ins.root_acquire_ts = ts++;
    ins.root_release_ts = ts++;
    ins.last_acquire_ts = ins.root_acquire_ts;
    ins.last_release_ts = ins.root_release_ts;
    ins.respond_ts = ts++;
    OpRecord del;
    del.worker = 0;
    del.opid = 2;
    del.op = OpKind::Delete;
    del.keys = {1, 2};
    del.invoke_ts = ts++;
    del.root_acquire_ts = ts++;
    del.root_release_ts = ts++;
    del.last_acquire_ts = del.root_acquire_ts;
    del.last_release_ts = del.root_release_ts;
    del.respond_ts = ts++;
    history.ops = {ins, del};
    return history;
}

}  // namespace

TEST_CASE("record well-formedness on a short run") {
    auto outcome = run_stress(small_spec(Variant::TD, 1, 1, 2));
    const History& history = outcome.history;
    CHECK(history.ops.size() == 2);
    CHECK(history.event_count() == 8);  // 4 per op in the TD variant
    CHECK_NOTHROW(history.validate());
}

TEST_CASE("multi-worker records carry full event quadruples") {
    auto outcome = run_stress(small_spec(Variant::TD, 2, 4, 20));
    CHECK(outcome.history.ops.size() == 80);
    CHECK(outcome.history.event_count() == 4 * 80);
    for (const OpRecord& op : outcome.history.ops) {
        CHECK(op.invoke_ts < op.root_acquire_ts);
        CHECK(op.root_acquire_ts < op.root_release_ts);
        CHECK(op.root_release_ts < op.respond_ts);
    }
}

TEST_CASE("single-threaded histories pass trivially") {
    CHECK(check_td(tiny_history(Variant::TD, 2)).pass);
    CHECK(check_bu(tiny_history(Variant::BU, 2)).pass);
    CHECK(check_exhaustive(tiny_history(Variant::TD, 2)).pass);
}

TEST_CASE("stress histories pass the constructive checkers") {
    for (int seed = 0; seed < 20; ++seed) {
        auto td = run_stress(small_spec(Variant::TD, 100 + seed, 4, 30));
        auto td_check = check_td(td.history);
        INFO(td_check.detail);
        CHECK(td_check.pass);

        auto bu = run_stress(small_spec(Variant::BU, 200 + seed, 4, 30));
        auto bu_check = check_bu(bu.history);
        INFO(bu_check.detail);
        CHECK(bu_check.pass);
        auto window = check_bu_overlap_windows(bu.history);
        INFO(window.detail);
        CHECK(window.ok);
    }
}

TEST_CASE("witness replays to identical delete results") {
    auto outcome = run_stress(small_spec(Variant::BU, 7, 4, 25));
    auto result = check_bu(outcome.history);
    REQUIRE(result.pass);
    auto trace = replay(result.witness, outcome.history.k);
    std::size_t at = 0;
    for (const OpRecord& op : result.witness) {
        if (op.op != OpKind::Delete) continue;
        CHECK(op.keys == trace[at]);
        ++at;
    }
}

TEST_CASE("mutation: swapping two different delete results fails") {
    for (Variant variant : {Variant::TD, Variant::BU}) {
        // find a run with two distinct delete results
        for (std::uint64_t seed = 1;; ++seed) {
            auto outcome = run_stress(small_spec(variant, seed, 3, 20));
            History history = outcome.history;
            std::vector<std::size_t> dels;
            for (std::size_t i = 0; i < history.ops.size(); ++i)
                if (history.ops[i].op == OpKind::Delete &&
                    !history.ops[i].keys.empty())
                    dels.push_back(i);
            bool mutated = false;
            for (std::size_t a = 0; a < dels.size() && !mutated; ++a)
                for (std::size_t b = a + 1; b < dels.size() && !mutated; ++b)
                    if (history.ops[dels[a]].keys !=
                        history.ops[dels[b]].keys) {
                        std::swap(history.ops[dels[a]].keys,
                                  history.ops[dels[b]].keys);
                        mutated = true;
                    }
            if (!mutated) continue;
            auto verdict = variant == Variant::TD ? check_td(history)
                                                  : check_bu(history);
            CHECK_FALSE(verdict.pass);
            break;
        }
    }
}

TEST_CASE("exhaustive rejects real-time order violations") {
    History history = tiny_history(Variant::TD, 2);
    // delete (whose response precedes the insert's invocation) returns the
    // insert's keys: impossible in any valid reordering
    std::swap(history.ops[0], history.ops[1]);
    history.ops[0].worker = 1;  // del first in real time
    auto& del = history.ops[0];
    auto& ins = history.ops[1];
    del.invoke_ts = 1;
    del.root_acquire_ts = 2;
    del.root_release_ts = 3;
    del.last_acquire_ts = 2;
    del.last_release_ts = 3;
    del.respond_ts = 4;
    ins.invoke_ts = 5;
    ins.root_acquire_ts = 6;
    ins.root_release_ts = 7;
    ins.last_acquire_ts = 6;
    ins.last_release_ts = 7;
    ins.respond_ts = 8;
    CHECK_FALSE(check_exhaustive(history).pass);
}

TEST_CASE("exhaustive accepts overlapping ins/del that must commute") {
    History history;
    history.variant = Variant::TD;
    history.k = 1;
    OpRecord ins;
    ins.worker = 0;
    ins.opid = 1;
    ins.op = OpKind::Insert;
    ins.keys = {1};
    ins.invoke_ts = 1;
    ins.root_acquire_ts = 3;
    ins.root_release_ts = 5;
    ins.last_acquire_ts = 3;
    ins.last_release_ts = 5;
    ins.respond_ts = 7;
    OpRecord del;
    del.worker = 1;
    del.opid = 1;
    del.op = OpKind::Delete;
    del.keys = {1};
    del.invoke_ts = 2;
    del.root_acquire_ts = 4;
    del.root_release_ts = 6;
    del.last_acquire_ts = 4;
    del.last_release_ts = 6;
    del.respond_ts = 8;
    history.ops = {ins, del};
    CHECK(check_exhaustive(history).pass);
}

TEST_CASE("constructive PASS implies exhaustive PASS on small histories") {
    std::mt19937_64 rng(4242);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const Variant variant = (trial & 1) ? Variant::BU : Variant::TD;
        auto spec = small_spec(variant, rng(), 2 + trial % 3, 4);
        auto outcome = run_stress(spec);
        if (outcome.history.ops.size() > 16) continue;
        auto constructive = variant == Variant::TD
                                ? check_td(outcome.history)
                                : check_bu(outcome.history);
        REQUIRE(constructive.pass);
        auto exhaustive = check_exhaustive(outcome.history);
        CHECK(exhaustive.pass);
        ++checked;
    }
    CHECK(checked > 100);
}

TEST_CASE("history too large for the exhaustive checker") {
    auto outcome = run_stress(small_spec(Variant::TD, 3, 4, 10));
    REQUIRE(outcome.history.ops.size() > 20);
    CHECK_THROWS_AS(check_exhaustive(outcome.history), std::length_error);
}

TEST_CASE("serialization round trip") {
    auto outcome = run_stress(small_spec(Variant::BU, 77, 3, 10));
    const History& original = outcome.history;
    std::stringstream buffer;
    original.serialize(buffer);

    History parsed = History::parse(buffer, original.variant, original.k);
    REQUIRE(parsed.ops.size() == original.ops.size());
    auto parsed_check = check_bu(parsed);
    auto original_check = check_bu(original);
    CHECK(parsed_check.pass == original_check.pass);

    // field-level fidelity
    for (std::size_t i = 0; i < parsed.ops.size(); ++i) {
        CHECK(parsed.ops[i].invoke_ts == original.ops[i].invoke_ts);
        CHECK(parsed.ops[i].respond_ts == original.ops[i].respond_ts);
        CHECK(parsed.ops[i].root_acquire_ts ==
              original.ops[i].root_acquire_ts);
        CHECK(parsed.ops[i].last_release_ts ==
              original.ops[i].last_release_ts);
        CHECK(parsed.ops[i].keys == original.ops[i].keys);
    }
}
