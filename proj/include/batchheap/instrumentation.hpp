#pragma once

// Event recording for linearizability checking. Each worker thread binds
// itself to the recorder once; events then append to that worker's private
// log with timestamps drawn from one global atomic counter, so the merged
// history is totally ordered and consistent with the lock-induced
// happens-before order. No cross-worker synchronization on the hot path.

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "batchheap/history.hpp"

namespace batchheap {

class Recorder {
  public:
    Recorder() = default;
    Recorder(const Recorder&) = delete;
    Recorder& operator=(const Recorder&) = delete;

    // Binds the calling thread to a worker id for this recorder's lifetime
    // on that thread. Events from unbound threads throw.
    class WorkerScope {
      public:
        WorkerScope(Recorder& recorder, std::uint32_t worker);
        ~WorkerScope();
        WorkerScope(const WorkerScope&) = delete;
        WorkerScope& operator=(const WorkerScope&) = delete;

      private:
        const Recorder* prev_recorder_;
        void* prev_log_;
    };

    void op_begin(OpKind op, std::span<const Key> args);
    void lock_acquired(std::uint32_t node);
    void lock_released(std::uint32_t node);
    void op_end(std::span<const Key> result);
    // Drops the in-flight op (failed precondition, no effect on the heap).
    void op_abort();

    // Merges all worker logs after the run has quiesced (workers joined).
    History finish(Variant variant, std::uint32_t k);

  private:
    struct WorkerLog;
    WorkerLog& current();

    std::atomic<std::uint64_t> clock_{1};
    std::mutex registry_mutex_;
    std::vector<std::unique_ptr<WorkerLog>> logs_;
};

}  // namespace batchheap
