#include "batchheap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <span>
#include <sstream>

namespace batchheap {

Graph::Graph(std::uint32_t nodes, std::vector<Edge> edges)
    : node_count_(nodes) {
    offsets_.assign(nodes + 1, 0);
    for (const Edge& e : edges) {
        if (e.from >= nodes || e.to >= nodes)
            throw ParseError("edge endpoint out of range");
        offsets_[e.from + 1]++;
    }
    for (std::uint32_t v = 0; v < nodes; ++v) offsets_[v + 1] += offsets_[v];
    adjacency_.resize(edges.size());
    targets_.resize(edges.size());
    std::vector<std::uint64_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const Edge& e : edges) {
        adjacency_[cursor[e.from]] = {e.to, e.weight};
        targets_[cursor[e.from]] = e.to;
        cursor[e.from]++;
    }
}

namespace {

std::uint32_t parse_weight(double w, std::size_t line_no) {
    if (w < 0)
        throw ParseError("negative weight at line " + std::to_string(line_no));
    return static_cast<std::uint32_t>(std::llround(w));
}

Graph load_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
        throw ParseError("missing MatrixMarket banner at line 1");
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (object != "matrix" || format != "coordinate")
        throw ParseError("unsupported MatrixMarket header");
    const bool pattern = field == "pattern";
    const bool symmetric = symmetry == "symmetric";

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream sizes(line);
    std::uint64_t rows = 0, cols = 0, entries = 0;
    if (!(sizes >> rows >> cols >> entries))
        throw ParseError("bad size line at line " + std::to_string(line_no));
    if (rows != cols) throw ParseError("adjacency matrix must be square");

    std::vector<Edge> edges;
    edges.reserve(symmetric ? 2 * entries : entries);
    for (std::uint64_t i = 0; i < entries; ++i) {
        do {
            if (!std::getline(in, line))
                throw ParseError("unexpected end of file at line " +
                                 std::to_string(line_no));
            ++line_no;
        } while (line.empty() || line[0] == '%');
        std::istringstream entry(line);
        std::uint64_t u = 0, v = 0;
        double w = 1.0;
        if (!(entry >> u >> v))
            throw ParseError("bad entry at line " + std::to_string(line_no));
        if (!pattern && !(entry >> w))
            throw ParseError("missing value at line " + std::to_string(line_no));
        if (u == 0 || v == 0 || u > rows || v > rows)
            throw ParseError("index out of range at line " +
                             std::to_string(line_no));
        const std::uint32_t weight = parse_weight(w, line_no);
        const auto from = static_cast<std::uint32_t>(u - 1);
        const auto to = static_cast<std::uint32_t>(v - 1);
        if (from == to) continue;  // self loops contribute nothing to sssp
        edges.push_back({from, to, weight});
        if (symmetric) edges.push_back({to, from, weight});
    }
    return Graph(static_cast<std::uint32_t>(rows), std::move(edges));
}

Graph load_dimacs_gr(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::uint64_t nodes = 0, arcs = 0;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream fields(line);
        char kind;
        fields >> kind;
        if (kind == 'p') {
            std::string sp;
            if (!(fields >> sp >> nodes >> arcs) || sp != "sp")
                throw ParseError("bad problem line at line " +
                                 std::to_string(line_no));
            edges.reserve(arcs);
        } else if (kind == 'a') {
            std::uint64_t u = 0, v = 0;
            long long w = 0;
            if (!(fields >> u >> v >> w))
                throw ParseError("bad arc at line " + std::to_string(line_no));
            if (w < 0)
                throw ParseError("negative weight at line " +
                                 std::to_string(line_no));
            if (nodes == 0 || u == 0 || v == 0 || u > nodes || v > nodes)
                throw ParseError("arc out of range at line " +
                                 std::to_string(line_no));
            edges.push_back({static_cast<std::uint32_t>(u - 1),
                             static_cast<std::uint32_t>(v - 1),
                             static_cast<std::uint32_t>(w)});
        } else {
            throw ParseError("unknown record '" + std::string(1, kind) +
                             "' at line " + std::to_string(line_no));
        }
    }
    return Graph(static_cast<std::uint32_t>(nodes), std::move(edges));
}

std::uint32_t random_weight(std::mt19937_64& rng) {
    return std::uniform_int_distribution<std::uint32_t>(1, 1000)(rng);
}

}  // namespace

Graph load_graph(const std::string& path, GraphFormat format) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return format == GraphFormat::MatrixMarket ? load_matrix_market(in)
                                               : load_dimacs_gr(in);
}

void save_matrix_market(const std::string& path, std::uint32_t nodes,
                        const std::vector<Edge>& directed_edges) {
    std::ofstream out(path);
    out << "%%MatrixMarket matrix coordinate integer general\n";
    out << nodes << ' ' << nodes << ' ' << directed_edges.size() << '\n';
    for (const Edge& e : directed_edges)
        out << e.from + 1 << ' ' << e.to + 1 << ' ' << e.weight << '\n';
}

Graph path_graph(std::uint32_t nodes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    for (std::uint32_t v = 0; v + 1 < nodes; ++v) {
        const std::uint32_t w = random_weight(rng);
        edges.push_back({v, v + 1, w});
        edges.push_back({v + 1, v, w});
    }
    return Graph(nodes, std::move(edges));
}

Graph star_graph(std::uint32_t leaves, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Edge> edges;
    for (std::uint32_t leaf = 1; leaf <= leaves; ++leaf) {
        const std::uint32_t w = random_weight(rng);
        edges.push_back({0, leaf, w});
        edges.push_back({leaf, 0, w});
    }
    return Graph(leaves + 1, std::move(edges));
}

Graph grid_graph(std::uint32_t rows, std::uint32_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto id = [cols](std::uint32_t r, std::uint32_t c) { return r * cols + c; };
    std::vector<Edge> edges;
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t c = 0; c < cols; ++c) {
            if (c + 1 < cols) {
                const std::uint32_t w = random_weight(rng);
                edges.push_back({id(r, c), id(r, c + 1), w});
                edges.push_back({id(r, c + 1), id(r, c), w});
            }
            if (r + 1 < rows) {
                const std::uint32_t w = random_weight(rng);
                edges.push_back({id(r, c), id(r + 1, c), w});
                edges.push_back({id(r + 1, c), id(r, c), w});
            }
        }
    }
    return Graph(rows * cols, std::move(edges));
}

Graph random_geometric_graph(std::uint32_t nodes, double target_degree,
                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> xs(nodes), ys(nodes);
    for (std::uint32_t v = 0; v < nodes; ++v) {
        xs[v] = unit(rng);
        ys[v] = unit(rng);
    }
    // Expected neighbors within radius r is ~ n * pi * r^2.
    const double radius =
        std::sqrt(target_degree / (nodes * 3.14159265358979323846));
    const std::uint32_t cells =
        std::max<std::uint32_t>(1, static_cast<std::uint32_t>(1.0 / radius));
    const double cell_size = 1.0 / cells;
    std::vector<std::vector<std::uint32_t>> buckets(
        static_cast<std::size_t>(cells) * cells);
    auto bucket_of = [&](double x, double y) {
        auto cx = std::min<std::uint32_t>(cells - 1,
                                          static_cast<std::uint32_t>(x / cell_size));
        auto cy = std::min<std::uint32_t>(cells - 1,
                                          static_cast<std::uint32_t>(y / cell_size));
        return cy * cells + cx;
    };
    for (std::uint32_t v = 0; v < nodes; ++v)
        buckets[bucket_of(xs[v], ys[v])].push_back(v);

    std::vector<Edge> edges;
    const double r2 = radius * radius;
    for (std::uint32_t v = 0; v < nodes; ++v) {
        const auto cx = static_cast<std::int64_t>(xs[v] / cell_size);
        const auto cy = static_cast<std::int64_t>(ys[v] / cell_size);
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                const std::int64_t bx = cx + dx, by = cy + dy;
                if (bx < 0 || by < 0 || bx >= cells || by >= cells) continue;
                for (std::uint32_t u : buckets[by * cells + bx]) {
                    if (u <= v) continue;
                    const double ddx = xs[u] - xs[v], ddy = ys[u] - ys[v];
                    if (ddx * ddx + ddy * ddy > r2) continue;
                    const std::uint32_t w =
                        1 + static_cast<std::uint32_t>(
                                std::sqrt(ddx * ddx + ddy * ddy) * 1000000);
                    edges.push_back({v, u, w});
                    edges.push_back({u, v, w});
                }
            }
        }
    }
    return Graph(nodes, std::move(edges));
}

}  // namespace batchheap
