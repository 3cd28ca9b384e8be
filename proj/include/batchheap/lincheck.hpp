#pragma once

// Linearizability verification. The constructive checkers order a recorded
// history the way the protocol serializes it (TD: by root release; BU:
// inserts by last-lock release, deletes by root release), place each
// linearization point inside the corresponding lock window, and replay the
// order against the multiset oracle. check_exhaustive searches all valid
// reorderings of small histories and is used to cross-validate the
// constructive checkers.

#include <cstdint>
#include <string>
#include <vector>

#include "batchheap/history.hpp"

namespace batchheap {

struct CheckResult {
    bool pass = false;
    std::string detail;
    // The witness sequential history (ops in linearized order). Replaying it
    // through the oracle reproduces every delete result exactly.
    std::vector<OpRecord> witness;
};

CheckResult check_td(const History& history);
CheckResult check_bu(const History& history);

// Wing&Gong-style search over all real-time-valid reorderings; memoized on
// the linearized subset. Throws std::length_error above 20 operations.
CheckResult check_exhaustive(const History& history);

struct TraceCheck {
    bool ok = true;
    std::string detail;
};

// No two workers ever hold the same node simultaneously (per-node lock
// spans must not overlap).
TraceCheck check_mutual_exclusion(const History& history);

// Within each op's held set, ancestors are always acquired before their
// descendants.
TraceCheck check_lock_order(const History& history);

// For every delete i and insert j whose last-lock/root windows intersect,
// min(insert keys) >= max(delete result).
TraceCheck check_bu_overlap_windows(const History& history);

}  // namespace batchheap
