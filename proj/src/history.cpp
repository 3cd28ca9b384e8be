#include "batchheap/history.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace batchheap {

namespace {

struct FlatEvent {
    std::uint64_t ts;
    std::uint32_t worker;
    std::uint64_t opid;
    const char* kind;
    OpKind op;
    const std::vector<Key>* keys;
};

std::string join_keys(const std::vector<Key>& keys) {
    if (keys.empty()) return "-";
    std::string out;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(keys[i]);
    }
    return out;
}

std::vector<Key> split_keys(const std::string& field) {
    std::vector<Key> keys;
    if (field == "-") return keys;
    std::size_t pos = 0;
    while (pos < field.size()) {
        std::size_t comma = field.find(',', pos);
        if (comma == std::string::npos) comma = field.size();
        keys.push_back(std::stoull(field.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return keys;
}

}  // namespace

std::size_t History::event_count() const {
    std::size_t count = 0;
    for (const OpRecord& op : ops) {
        count += 4;
        if (variant == Variant::BU && op.op == OpKind::Insert) count += 2;
    }
    return count;
}

void History::serialize(std::ostream& out) const {
    std::vector<FlatEvent> events;
    events.reserve(event_count());
    static const std::vector<Key> no_keys;
    for (const OpRecord& op : ops) {
        const std::vector<Key>* keys = &op.keys;
        events.push_back({op.invoke_ts, op.worker, op.opid, "inv", op.op,
                          op.op == OpKind::Insert ? keys : &no_keys});
        events.push_back(
            {op.root_acquire_ts, op.worker, op.opid, "acR", op.op, &no_keys});
        events.push_back(
            {op.root_release_ts, op.worker, op.opid, "reR", op.op, &no_keys});
        if (variant == Variant::BU && op.op == OpKind::Insert) {
            events.push_back({op.last_acquire_ts, op.worker, op.opid, "acL",
                              op.op, &no_keys});
            events.push_back({op.last_release_ts, op.worker, op.opid, "reL",
                              op.op, &no_keys});
        }
        events.push_back({op.respond_ts, op.worker, op.opid, "res", op.op,
                          op.op == OpKind::Delete ? keys : &no_keys});
    }
    std::sort(events.begin(), events.end(),
              [](const FlatEvent& a, const FlatEvent& b) { return a.ts < b.ts; });
    for (const FlatEvent& e : events) {
        out << e.ts << ' ' << e.worker << ' ' << e.opid << ' ' << e.kind << ' '
            << (e.op == OpKind::Insert ? "ins" : "del") << ' '
            << join_keys(*e.keys) << '\n';
    }
}

History History::parse(std::istream& in, Variant variant, std::uint32_t k) {
    History history;
    history.variant = variant;
    history.k = k;
    std::map<std::pair<std::uint32_t, std::uint64_t>, OpRecord> partial;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::uint64_t ts, opid;
        std::uint32_t worker;
        std::string kind, op_name, key_field;
        if (!(fields >> ts >> worker >> opid >> kind >> op_name >> key_field))
            throw InstrumentationError("history parse error at line " +
                                       std::to_string(line_no));
        OpRecord& rec = partial[{worker, opid}];
        rec.worker = worker;
        rec.opid = opid;
        rec.op = op_name == "ins" ? OpKind::Insert : OpKind::Delete;
        if (kind == "inv") {
            rec.invoke_ts = ts;
            if (rec.op == OpKind::Insert) rec.keys = split_keys(key_field);
        } else if (kind == "res") {
            rec.respond_ts = ts;
            if (rec.op == OpKind::Delete) rec.keys = split_keys(key_field);
        } else if (kind == "acR") {
            rec.root_acquire_ts = ts;
        } else if (kind == "reR") {
            rec.root_release_ts = ts;
        } else if (kind == "acL") {
            rec.last_acquire_ts = ts;
        } else if (kind == "reL") {
            rec.last_release_ts = ts;
        } else {
            throw InstrumentationError("unknown event kind '" + kind +
                                       "' at line " + std::to_string(line_no));
        }
    }
    for (auto& [id, rec] : partial) {
        if (rec.last_release_ts == 0) {
            rec.last_acquire_ts = rec.root_acquire_ts;
            rec.last_release_ts = rec.root_release_ts;
        }
        history.ops.push_back(std::move(rec));
    }
    std::sort(history.ops.begin(), history.ops.end(),
              [](const OpRecord& a, const OpRecord& b) {
                  return a.invoke_ts < b.invoke_ts;
              });
    history.validate();
    return history;
}

void History::validate() const {
    std::vector<std::uint64_t> seen;
    for (const OpRecord& op : ops) {
        const std::string where = "op " + std::to_string(op.opid) +
                                  " of worker " + std::to_string(op.worker);
        if (op.invoke_ts == 0 || op.respond_ts == 0 ||
            op.root_acquire_ts == 0 || op.root_release_ts == 0)
            throw InstrumentationError("missing event in " + where);
        if (!(op.invoke_ts < op.root_acquire_ts &&
              op.root_acquire_ts < op.root_release_ts &&
              op.root_release_ts < op.respond_ts))
            throw InstrumentationError("event order violated in " + where);
        if (!(op.invoke_ts < op.last_acquire_ts &&
              op.last_acquire_ts < op.last_release_ts &&
              op.last_release_ts < op.respond_ts))
            throw InstrumentationError("last-lock window invalid in " + where);
        for (const LockSpan& span : op.locks) {
            if (span.release_ts == 0 || span.acquire_ts >= span.release_ts)
                throw InstrumentationError("unreleased lock in " + where);
        }
        seen.push_back(op.invoke_ts);
        seen.push_back(op.respond_ts);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw InstrumentationError("duplicate timestamps in history");
}

}  // namespace batchheap
