#pragma once

// Concurrent-execution histories: per-operation invocation/response plus the
// instrumented lock events the linearizability checkers order by. Histories
// serialize to a line-oriented text format, one event per line:
//
//   ts worker opid kind op key1,key2,...
//
// kind is one of inv res acR reR acL reL; op is ins or del; an empty key
// list is written as "-". TD histories carry 4 events per op (inv acR reR
// res); BU histories additionally carry acL/reL for inserts.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "batchheap/batch.hpp"

namespace batchheap {

enum class Variant : std::uint8_t { TD, BU };

inline const char* variant_name(Variant v) {
    return v == Variant::TD ? "td" : "bu";
}

enum class OpKind : std::uint8_t { Insert, Delete };

struct InstrumentationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LockSpan {
    std::uint32_t node = 0;
    std::uint64_t acquire_ts = 0;
    std::uint64_t release_ts = 0;
};

struct OpRecord {
    std::uint32_t worker = 0;
    std::uint64_t opid = 0;
    OpKind op = OpKind::Insert;
    // INS argument or DEL result (empty for a delete on an empty heap).
    std::vector<Key> keys;
    std::uint64_t invoke_ts = 0;
    std::uint64_t respond_ts = 0;
    std::uint64_t root_acquire_ts = 0;  // acR
    std::uint64_t root_release_ts = 0;  // reR
    std::uint64_t last_acquire_ts = 0;  // acL: acquire of the last-released lock
    std::uint64_t last_release_ts = 0;  // reL
    // Full lock trace in acquire order. Populated by the recorder only;
    // not part of the serialized form.
    std::vector<LockSpan> locks;
};

struct History {
    Variant variant = Variant::TD;
    std::uint32_t k = 1;
    std::vector<OpRecord> ops;

    std::size_t event_count() const;
    void serialize(std::ostream& out) const;
    static History parse(std::istream& in, Variant variant, std::uint32_t k);

    // Checks the per-op event discipline: inv < acR <= reR < res, acL/reL
    // inside the op window, every lock released, timestamps distinct.
    void validate() const;
};

}  // namespace batchheap
