#include "batchheap/sssp.hpp"

#include <algorithm>
#include <atomic>
#include <memory>
#include <mutex>
#include <queue>
#include <thread>

namespace batchheap {

namespace {

constexpr std::uint64_t kMaxEncodableDist = 0xFFFF'FFFEULL;

Key encode(std::uint64_t dist, std::uint32_t node) {
    if (dist > kMaxEncodableDist)
        throw std::overflow_error("distance exceeds encodable range");
    return (dist << 32) | node;
}

struct ActiveEntry {
    std::uint64_t dist;
    std::uint32_t node;
};

// Chunked parallel loop; falls back to inline execution for small inputs.
template <typename Fn>
void parallel_chunks(std::uint32_t workers, std::size_t count, Fn&& fn) {
    if (workers <= 1 || count < 2048) {
        fn(0, count);
        return;
    }
    std::atomic<std::size_t> next{0};
    const std::size_t chunk =
        std::max<std::size_t>(512, count / (std::size_t{workers} * 8));
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::uint32_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (;;) {
                const std::size_t begin =
                    next.fetch_add(chunk, std::memory_order_relaxed);
                if (begin >= count) return;
                fn(begin, std::min(begin + chunk, count));
            }
        });
    }
    for (auto& thread : threads) thread.join();
}

class Relaxer {
  public:
    Relaxer(const Graph& graph, std::uint32_t source, std::uint32_t workers)
        : graph_(graph),
          workers_(workers),
          dist_(std::make_unique<std::atomic<std::uint64_t>[]>(
              graph.node_count())) {
        for (std::uint32_t v = 0; v < graph.node_count(); ++v)
            dist_[v].store(kUnreachable, std::memory_order_relaxed);
        dist_[source].store(0, std::memory_order_relaxed);
    }

    // Processes entries, appending activations to `next`. Returns the number
    // of non-stale explorations.
    std::uint64_t process(const std::vector<ActiveEntry>& entries,
                          std::vector<ActiveEntry>& next) {
        std::atomic<std::uint64_t> visits{0};
        std::mutex merge_mutex;
        parallel_chunks(workers_, entries.size(),
                        [&](std::size_t begin, std::size_t end) {
            std::vector<ActiveEntry> local;
            std::uint64_t local_visits = 0;
            for (std::size_t i = begin; i < end; ++i) {
                const ActiveEntry entry = entries[i];
                if (entry.dist >
                    dist_[entry.node].load(std::memory_order_relaxed))
                    continue;  // stale
                ++local_visits;
                for (const Graph::Neighbor& edge :
                     graph_.neighbors(entry.node)) {
                    const std::uint64_t cand = entry.dist + edge.weight;
                    std::uint64_t seen =
                        dist_[edge.node].load(std::memory_order_relaxed);
                    bool improved = false;
                    while (cand < seen) {
                        if (dist_[edge.node].compare_exchange_weak(
                                seen, cand, std::memory_order_relaxed)) {
                            improved = true;
                            break;
                        }
                    }
                    if (improved) local.push_back({cand, edge.node});
                }
            }
            visits.fetch_add(local_visits, std::memory_order_relaxed);
            std::lock_guard<std::mutex> lock(merge_mutex);
            next.insert(next.end(), local.begin(), local.end());
        });
        return visits.load(std::memory_order_relaxed);
    }

    std::vector<std::uint64_t> snapshot() const {
        std::vector<std::uint64_t> out(graph_.node_count());
        for (std::uint32_t v = 0; v < graph_.node_count(); ++v)
            out[v] = dist_[v].load(std::memory_order_relaxed);
        return out;
    }

  private:
    const Graph& graph_;
    std::uint32_t workers_;
    std::unique_ptr<std::atomic<std::uint64_t>[]> dist_;
};

}  // namespace

SsspResult sssp(const Graph& graph, std::uint32_t source,
                const SsspConfig& config) {
    if (source >= graph.node_count())
        throw std::out_of_range("sssp: source out of range");
    const std::uint32_t k = config.heap_node_capacity;
    const std::uint64_t max_nodes = std::max<std::uint64_t>(
        1024, (graph.edge_count() + graph.node_count()) * 4 / k + 64);
    GeneralizedHeap heap(Variant::BU, k,
                         static_cast<std::uint32_t>(max_nodes));

    Relaxer relaxer(graph, source, config.workers);
    std::vector<ActiveEntry> active{{0, source}};
    std::vector<ActiveEntry> next;
    std::uint64_t pending = 0;  // keys currently in the heap
    std::uint64_t visits = 0;

    while (!active.empty() || pending > 0) {
        std::vector<ActiveEntry> process_set;
        if (pending == 0 && active.size() <= config.threshold) {
            process_set = std::move(active);
            active = {};
        } else {
            // Funnel the active set through the heap and take the nearest
            // `threshold` keys for this round.
            std::vector<Key> keys(active.size());
            for (std::size_t i = 0; i < active.size(); ++i)
                keys[i] = encode(active[i].dist, active[i].node);
            parallel_chunks(config.workers, keys.size(),
                            [&](std::size_t begin, std::size_t end) {
                for (std::size_t at = begin; at < end; at += k)
                    heap.insert(std::span<const Key>(keys).subspan(
                        at, std::min<std::size_t>(k, end - at)));
            });
            pending += keys.size();
            active.clear();

            const std::uint64_t want =
                std::min<std::uint64_t>(pending,
                                        std::max<std::uint64_t>(
                                            config.threshold, k));
            std::atomic<std::int64_t> pops{
                static_cast<std::int64_t>((want + k - 1) / k)};
            std::mutex merge_mutex;
            std::vector<std::thread> poppers;
            const std::uint32_t pop_workers =
                std::max<std::uint32_t>(1, config.workers);
            std::atomic<std::uint64_t> collected{0};
            std::vector<std::vector<Key>> popped(pop_workers);
            for (std::uint32_t w = 0; w < pop_workers; ++w) {
                poppers.emplace_back([&, w] {
                    while (pops.fetch_sub(1, std::memory_order_relaxed) > 0) {
                        auto batch = heap.try_delete_min();
                        if (!batch) return;
                        collected.fetch_add(batch->size(),
                                            std::memory_order_relaxed);
                        popped[w].insert(popped[w].end(), batch->begin(),
                                         batch->end());
                    }
                });
            }
            for (auto& thread : poppers) thread.join();
            pending -= collected.load(std::memory_order_relaxed);
            for (auto& keys_w : popped)
                for (Key key : keys_w)
                    process_set.push_back(
                        {key >> 32, static_cast<std::uint32_t>(key)});
        }
        next.clear();
        visits += relaxer.process(process_set, next);
        active.insert(active.end(), next.begin(), next.end());
    }

    SsspResult result;
    result.dist = relaxer.snapshot();
    result.visits = visits;
    return result;
}

SsspResult sssp_fifo(const Graph& graph, std::uint32_t source,
                     std::uint32_t workers) {
    if (source >= graph.node_count())
        throw std::out_of_range("sssp: source out of range");
    Relaxer relaxer(graph, source, workers);
    std::vector<ActiveEntry> active{{0, source}};
    std::vector<ActiveEntry> next;
    std::uint64_t visits = 0;
    while (!active.empty()) {
        next.clear();
        visits += relaxer.process(active, next);
        active = next;
    }
    SsspResult result;
    result.dist = relaxer.snapshot();
    result.visits = visits;
    return result;
}

std::vector<std::uint64_t> dijkstra(const Graph& graph,
                                    std::uint32_t source) {
    std::vector<std::uint64_t> dist(graph.node_count(), kUnreachable);
    using Item = std::pair<std::uint64_t, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[source] = 0;
    queue.push({0, source});
    while (!queue.empty()) {
        auto [d, v] = queue.top();
        queue.pop();
        if (d != dist[v]) continue;
        for (const Graph::Neighbor& edge : graph.neighbors(v)) {
            const std::uint64_t cand = d + edge.weight;
            if (cand < dist[edge.node]) {
                dist[edge.node] = cand;
                queue.push({cand, edge.node});
            }
        }
    }
    return dist;
}

}  // namespace batchheap
