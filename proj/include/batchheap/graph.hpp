#pragma once

// Weighted directed graphs in CSR form, with Matrix Market and DIMACS .gr
// loaders plus the synthetic generators used by the SSSP suite. Weights are
// non-negative integers; undirected inputs are duplicated into both
// directions.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace batchheap {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Edge {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    std::uint32_t weight = 0;
};

class Graph {
  public:
    Graph() = default;
    Graph(std::uint32_t nodes, std::vector<Edge> edges);

    std::uint32_t node_count() const { return node_count_; }
    std::uint64_t edge_count() const { return targets_.size(); }

    struct Neighbor {
        std::uint32_t node;
        std::uint32_t weight;
    };
    std::span<const Neighbor> neighbors(std::uint32_t node) const {
        return {adjacency_.data() + offsets_[node],
                offsets_[node + 1] - offsets_[node]};
    }

  private:
    std::uint32_t node_count_ = 0;
    std::vector<std::uint64_t> offsets_;
    std::vector<std::uint32_t> targets_;  // kept for edge_count only
    std::vector<Neighbor> adjacency_;
};

enum class GraphFormat { MatrixMarket, DimacsGr };

Graph load_graph(const std::string& path, GraphFormat format);
void save_matrix_market(const std::string& path, std::uint32_t nodes,
                        const std::vector<Edge>& directed_edges);

// Generators (all weights deterministic for a seed).
Graph path_graph(std::uint32_t nodes, std::uint64_t seed);
Graph star_graph(std::uint32_t leaves, std::uint64_t seed);
Graph grid_graph(std::uint32_t rows, std::uint32_t cols, std::uint64_t seed);
// Undirected random geometric graph on the unit square; radius picked to
// keep the expected degree near `target_degree`.
Graph random_geometric_graph(std::uint32_t nodes, double target_degree,
                             std::uint64_t seed);

}  // namespace batchheap
