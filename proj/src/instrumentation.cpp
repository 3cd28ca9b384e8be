#include "batchheap/instrumentation.hpp"

#include <algorithm>

namespace batchheap {

namespace {
struct TlsBinding {
    const Recorder* recorder = nullptr;
    void* log = nullptr;
};
thread_local TlsBinding tls_binding;
}  // namespace

struct Recorder::WorkerLog {
    std::uint32_t worker = 0;
    std::uint64_t next_opid = 1;
    bool op_open = false;
    OpRecord pending;
    std::vector<LockSpan> open_locks;
    std::vector<OpRecord> done;
};

Recorder::WorkerScope::WorkerScope(Recorder& recorder, std::uint32_t worker) {
    prev_recorder_ = tls_binding.recorder;
    prev_log_ = tls_binding.log;
    auto log = std::make_unique<WorkerLog>();
    log->worker = worker;
    log->done.reserve(1024);
    tls_binding.recorder = &recorder;
    tls_binding.log = log.get();
    std::lock_guard<std::mutex> guard(recorder.registry_mutex_);
    recorder.logs_.push_back(std::move(log));
}

Recorder::WorkerScope::~WorkerScope() {
    tls_binding.recorder = prev_recorder_;
    tls_binding.log = prev_log_;
}

Recorder::WorkerLog& Recorder::current() {
    if (tls_binding.recorder != this || tls_binding.log == nullptr)
        throw InstrumentationError("thread not bound to recorder");
    return *static_cast<WorkerLog*>(tls_binding.log);
}

void Recorder::op_begin(OpKind op, std::span<const Key> args) {
    WorkerLog& log = current();
    if (log.op_open) throw InstrumentationError("nested op_begin");
    log.op_open = true;
    log.pending = OpRecord{};
    log.pending.worker = log.worker;
    log.pending.opid = log.next_opid;
    log.pending.op = op;
    log.pending.keys.assign(args.begin(), args.end());
    log.open_locks.clear();
    log.pending.invoke_ts = clock_.fetch_add(1, std::memory_order_seq_cst);
}

void Recorder::lock_acquired(std::uint32_t node) {
    WorkerLog& log = current();
    LockSpan span;
    span.node = node;
    span.acquire_ts = clock_.fetch_add(1, std::memory_order_seq_cst);
    log.open_locks.push_back(span);
}

void Recorder::lock_released(std::uint32_t node) {
    WorkerLog& log = current();
    const std::uint64_t ts = clock_.fetch_add(1, std::memory_order_seq_cst);
    for (auto it = log.open_locks.rbegin(); it != log.open_locks.rend(); ++it) {
        if (it->node == node && it->release_ts == 0) {
            it->release_ts = ts;
            log.pending.locks.push_back(*it);
            return;
        }
    }
    throw InstrumentationError("release without acquire on node " +
                               std::to_string(node));
}

void Recorder::op_end(std::span<const Key> result) {
    WorkerLog& log = current();
    if (!log.op_open) throw InstrumentationError("op_end without op_begin");
    OpRecord& rec = log.pending;
    if (rec.op == OpKind::Delete)
        rec.keys.assign(result.begin(), result.end());
    rec.respond_ts = clock_.fetch_add(1, std::memory_order_seq_cst);

    std::sort(rec.locks.begin(), rec.locks.end(),
              [](const LockSpan& a, const LockSpan& b) {
                  return a.acquire_ts < b.acquire_ts;
              });
    for (const LockSpan& span : rec.locks) {
        if (span.node == 1 && rec.root_acquire_ts == 0) {
            rec.root_acquire_ts = span.acquire_ts;
            rec.root_release_ts = span.release_ts;
        }
        if (span.release_ts > rec.last_release_ts) {
            rec.last_release_ts = span.release_ts;
            rec.last_acquire_ts = span.acquire_ts;
        }
    }
    log.done.push_back(std::move(rec));
    log.op_open = false;
    log.next_opid++;
}

void Recorder::op_abort() {
    WorkerLog& log = current();
    log.op_open = false;
    log.open_locks.clear();
}

History Recorder::finish(Variant variant, std::uint32_t k) {
    History history;
    history.variant = variant;
    history.k = k;
    std::lock_guard<std::mutex> guard(registry_mutex_);
    for (const auto& log : logs_) {
        if (log->op_open)
            throw InstrumentationError("worker finished with op in flight");
        for (const OpRecord& rec : log->done) history.ops.push_back(rec);
    }
    std::sort(history.ops.begin(), history.ops.end(),
              [](const OpRecord& a, const OpRecord& b) {
                  return a.invoke_ts < b.invoke_ts;
              });
    history.validate();
    return history;
}

}  // namespace batchheap
