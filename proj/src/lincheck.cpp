#include "batchheap/lincheck.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "batchheap/seq_heap.hpp"

namespace batchheap {

namespace {

std::string describe_op(const OpRecord& op) {
    return std::string(op.op == OpKind::Insert ? "ins" : "del") + " #" +
           std::to_string(op.opid) + " worker " + std::to_string(op.worker);
}

std::string keys_brief(const std::vector<Key>& keys) {
    std::string out = "[";
    for (std::size_t i = 0; i < keys.size() && i < 4; ++i) {
        if (i) out += ",";
        out += std::to_string(keys[i]);
    }
    if (keys.size() > 4) out += ",...";
    return out + "]";
}

CheckResult replay_in_order(std::vector<OpRecord> ordered, std::uint32_t k) {
    CheckResult result;
    MultisetOracle oracle;
    for (const OpRecord& op : ordered) {
        if (op.op == OpKind::Insert) {
            oracle.insert(op.keys);
            continue;
        }
        std::vector<Key> expected = oracle.delete_min(k);
        if (expected != op.keys) {
            result.pass = false;
            result.detail = describe_op(op) + " returned " +
                            keys_brief(op.keys) + " but the oracle gives " +
                            keys_brief(expected);
            return result;
        }
    }
    result.pass = true;
    result.witness = std::move(ordered);
    return result;
}

}  // namespace

CheckResult check_td(const History& history) {
    std::vector<OpRecord> ordered = history.ops;
    std::sort(ordered.begin(), ordered.end(),
              [](const OpRecord& a, const OpRecord& b) {
                  return a.root_release_ts < b.root_release_ts;
              });
    // Root windows serialize every op, so linearization points placed at the
    // window midpoints appear in this exact order.
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        if (ordered[i].root_acquire_ts < ordered[i - 1].root_release_ts) {
            CheckResult result;
            result.detail = "root windows overlap between " +
                            describe_op(ordered[i - 1]) + " and " +
                            describe_op(ordered[i]);
            return result;
        }
    }
    return replay_in_order(std::move(ordered), history.k);
}

CheckResult check_bu(const History& history) {
    std::vector<OpRecord> ordered = history.ops;
    auto order_key = [](const OpRecord& op) {
        return op.op == OpKind::Insert ? op.last_release_ts
                                       : op.root_release_ts;
    };
    std::sort(ordered.begin(), ordered.end(),
              [&](const OpRecord& a, const OpRecord& b) {
                  const std::uint64_t ka = order_key(a), kb = order_key(b);
                  if (ka != kb) return ka < kb;
                  return a.worker < b.worker;  // ties broken arbitrarily
              });
    return replay_in_order(std::move(ordered), history.k);
}

CheckResult check_exhaustive(const History& history) {
    const std::size_t n = history.ops.size();
    if (n > 20)
        throw std::length_error("check_exhaustive: history has " +
                                std::to_string(n) + " ops (max 20)");
    const std::uint32_t k = history.k;
    const std::vector<OpRecord>& ops = history.ops;

    std::unordered_set<std::uint32_t> dead;  // masks known not to extend
    std::multiset<Key> state;
    std::vector<std::size_t> order;
    order.reserve(n);

    auto eligible = [&](std::size_t e, std::uint32_t mask) {
        // e may come next only if no still-pending op finished before e
        // was invoked (real-time order).
        for (std::size_t f = 0; f < n; ++f) {
            if (f == e || (mask >> f) & 1) continue;
            if (ops[f].respond_ts < ops[e].invoke_ts) return false;
        }
        return true;
    };

    auto dfs = [&](auto&& self, std::uint32_t mask) -> bool {
        if (order.size() == n) return true;
        if (dead.contains(mask)) return false;
        for (std::size_t e = 0; e < n; ++e) {
            if ((mask >> e) & 1) continue;
            if (!eligible(e, mask)) continue;
            const OpRecord& op = ops[e];
            if (op.op == OpKind::Insert) {
                state.insert(op.keys.begin(), op.keys.end());
                order.push_back(e);
                if (self(self, mask | (1u << e))) return true;
                order.pop_back();
                for (Key key : op.keys) state.erase(state.find(key));
            } else {
                const std::size_t take = std::min<std::size_t>(k, state.size());
                if (op.keys.size() != take) continue;
                bool match = true;
                auto it = state.begin();
                for (std::size_t i = 0; i < take; ++i, ++it)
                    if (*it != op.keys[i]) {
                        match = false;
                        break;
                    }
                if (!match) continue;
                for (Key key : op.keys) state.erase(state.find(key));
                order.push_back(e);
                if (self(self, mask | (1u << e))) return true;
                order.pop_back();
                state.insert(op.keys.begin(), op.keys.end());
            }
        }
        dead.insert(mask);
        return false;
    };

    CheckResult result;
    if (dfs(dfs, 0)) {
        result.pass = true;
        for (std::size_t index : order) result.witness.push_back(ops[index]);
    } else {
        result.detail = "no valid linearization exists";
    }
    return result;
}

TraceCheck check_mutual_exclusion(const History& history) {
    struct Span {
        std::uint64_t acquire, release;
        const OpRecord* op;
    };
    std::map<std::uint32_t, std::vector<Span>> per_node;
    for (const OpRecord& op : history.ops)
        for (const LockSpan& span : op.locks)
            per_node[span.node].push_back({span.acquire_ts, span.release_ts, &op});

    TraceCheck check;
    for (auto& [node, spans] : per_node) {
        std::sort(spans.begin(), spans.end(),
                  [](const Span& a, const Span& b) {
                      return a.acquire < b.acquire;
                  });
        for (std::size_t i = 1; i < spans.size(); ++i) {
            if (spans[i].acquire < spans[i - 1].release) {
                check.ok = false;
                check.detail = "node " + std::to_string(node) +
                               " held concurrently by " +
                               describe_op(*spans[i - 1].op) + " and " +
                               describe_op(*spans[i].op);
                return check;
            }
        }
    }
    return check;
}

namespace {
bool is_ancestor(std::uint32_t a, std::uint32_t d) {
    while (d > a) d /= 2;
    return d == a;
}
}  // namespace

TraceCheck check_lock_order(const History& history) {
    TraceCheck check;
    for (const OpRecord& op : history.ops) {
        for (std::size_t i = 0; i < op.locks.size(); ++i) {
            for (std::size_t j = i + 1; j < op.locks.size(); ++j) {
                const LockSpan& a = op.locks[i];
                const LockSpan& b = op.locks[j];
                const bool overlap = a.acquire_ts < b.release_ts &&
                                     b.acquire_ts < a.release_ts;
                if (!overlap) continue;
                // locks are sorted by acquire, so a was taken first; it must
                // not be a descendant of b.
                if (a.node != b.node && is_ancestor(b.node, a.node)) {
                    check.ok = false;
                    check.detail = describe_op(op) + " acquired node " +
                                   std::to_string(a.node) +
                                   " before its ancestor " +
                                   std::to_string(b.node);
                    return check;
                }
            }
        }
    }
    return check;
}

TraceCheck check_bu_overlap_windows(const History& history) {
    TraceCheck check;
    for (const OpRecord& del : history.ops) {
        if (del.op != OpKind::Delete || del.keys.empty()) continue;
        const Key del_max = del.keys.back();
        for (const OpRecord& ins : history.ops) {
            if (ins.op != OpKind::Insert || ins.keys.empty()) continue;
            const bool intersects =
                ins.last_acquire_ts <= del.root_release_ts &&
                del.root_acquire_ts <= ins.last_release_ts;
            if (!intersects) continue;
            if (ins.keys.front() < del_max) {
                check.ok = false;
                check.detail = "overlap lemma violated: " + describe_op(ins) +
                               " min " + std::to_string(ins.keys.front()) +
                               " < " + describe_op(del) + " max " +
                               std::to_string(del_max);
                return check;
            }
        }
    }
    return check;
}

}  // namespace batchheap
