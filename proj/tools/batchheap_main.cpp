// batchheap: single entry point for the stress/exhaustive checkers, the
// benchmark sweeps, and the two driver applications. Structured output is
// CSV only; every run prints its resolved configuration first. Exit codes:
// 0 success, 1 correctness failure, 2 usage or invalid input.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "batchheap/bench.hpp"
#include "batchheap/graph.hpp"
#include "batchheap/knapsack.hpp"
#include "batchheap/lincheck.hpp"
#include "batchheap/seq_heap.hpp"
#include "batchheap/sssp.hpp"
#include "batchheap/workload.hpp"

namespace {

using namespace batchheap;

std::uint64_t resolve_seed(std::uint64_t flag_seed) {
    if (const char* env = std::getenv("BATCHHEAP_SEED"))
        return std::strtoull(env, nullptr, 10);
    return flag_seed;
}

Variant parse_variant(const std::string& name) {
    if (name == "td") return Variant::TD;
    if (name == "bu") return Variant::BU;
    throw CLI::ValidationError("--variant", "must be td or bu");
}

std::vector<std::uint32_t> parse_u32_list(const std::string& csv) {
    std::vector<std::uint32_t> out;
    std::istringstream in(csv);
    std::string field;
    while (std::getline(in, field, ','))
        out.push_back(static_cast<std::uint32_t>(std::stoul(field)));
    if (out.empty()) throw CLI::ValidationError("empty list");
    return out;
}

int run_stress_cmd(const std::string& variant_name, std::uint32_t workers,
                   std::uint64_t ops, std::uint32_t k,
                   std::uint32_t partial_pct, std::uint64_t seed,
                   std::uint32_t runs) {
    const Variant variant = parse_variant(variant_name);
    std::cout << "config: stress variant=" << variant_name
              << " workers=" << workers << " ops=" << ops << " k=" << k
              << " partial=" << partial_pct << "% seed=" << seed
              << " runs=" << runs << "\n";
    for (std::uint32_t run = 0; run < runs; ++run) {
        StressSpec spec;
        spec.variant = variant;
        spec.k = k;
        spec.workers = workers;
        spec.ops_per_worker = std::max<std::uint64_t>(1, ops / workers);
        spec.partial_pct = partial_pct;
        spec.seed = seed + run;
        StressOutcome outcome = run_stress(spec);

        const History& history = outcome.history;
        auto mutex_check = check_mutual_exclusion(history);
        auto order_check = check_lock_order(history);
        auto lin = variant == Variant::TD ? check_td(history)
                                          : check_bu(history);
        bool ok = outcome.ok() && mutex_check.ok && order_check.ok && lin.pass;
        std::string why;
        if (!outcome.invariants.ok) why = outcome.invariants.detail;
        else if (!outcome.multiset_ok) why = outcome.multiset_detail;
        else if (!mutex_check.ok) why = mutex_check.detail;
        else if (!order_check.ok) why = order_check.detail;
        else if (!lin.pass) why = lin.detail;
        if (variant == Variant::BU) {
            auto window = check_bu_overlap_windows(history);
            if (!window.ok) {
                ok = false;
                why = window.detail;
            }
        }
        if (!ok) {
            std::cout << "FAIL run " << run << ": " << why << "\n";
            return 1;
        }
        std::cout << "PASS run " << run << ": ops=" << history.ops.size()
                  << " events=" << history.event_count()
                  << " merges=" << outcome.counters.merges
                  << " elided=" << outcome.counters.elided_merges
                  << " early_stops=" << outcome.counters.early_stops << "\n";
    }
    return 0;
}

int run_exhaustive_cmd(std::uint32_t runs, std::uint32_t max_ops,
                       std::uint32_t k, std::uint64_t seed) {
    std::cout << "config: exhaustive runs=" << runs << " max-ops=" << max_ops
              << " k=" << k << " seed=" << seed << "\n";
    std::mt19937_64 rng(seed);
    for (std::uint32_t run = 0; run < runs; ++run) {
        StressSpec spec;
        spec.variant = (run % 2 == 0) ? Variant::TD : Variant::BU;
        spec.k = k;
        spec.workers = 2 + static_cast<std::uint32_t>(rng() % 3);
        spec.ops_per_worker =
            std::max<std::uint64_t>(1, (rng() % max_ops) / spec.workers);
        spec.partial_pct = 30;
        spec.key_range = 16;  // collisions make reordering interesting
        spec.seed = rng();
        StressOutcome outcome = run_stress(spec);
        auto constructive = spec.variant == Variant::TD
                                ? check_td(outcome.history)
                                : check_bu(outcome.history);
        auto exhaustive = check_exhaustive(outcome.history);
        if (!constructive.pass || !exhaustive.pass) {
            std::cout << "FAIL run " << run << ": constructive="
                      << (constructive.pass ? "PASS" : "FAIL")
                      << " exhaustive="
                      << (exhaustive.pass ? "PASS" : "FAIL") << "\n";
            return 1;
        }
    }
    std::cout << "PASS " << runs << " runs\n";
    return 0;
}

int run_bench_cmd(const std::string& variant_name, const std::string& k_list,
                  const std::string& worker_list, std::uint64_t keys,
                  const std::string& order_name,
                  const std::string& pattern_name,
                  std::uint32_t initial_levels, std::uint32_t full_frac,
                  std::uint64_t seed, const std::string& csv_path) {
    KeyOrder order = order_name == "random"  ? KeyOrder::Random
                     : order_name == "ascend" ? KeyOrder::Ascend
                                              : KeyOrder::Descend;
    OpPattern pattern = pattern_name == "insall"
                            ? OpPattern::InsertAllThenDeleteAll
                            : OpPattern::InsDelPairs;
    std::vector<WorkloadSpec> grid;
    for (std::uint32_t k : parse_u32_list(k_list)) {
        for (std::uint32_t workers : parse_u32_list(worker_list)) {
            WorkloadSpec spec;
            spec.variant = parse_variant(variant_name);
            spec.k = k;
            spec.workers = workers;
            spec.total_keys = keys;
            spec.key_order = order;
            spec.op_pattern = pattern;
            spec.initial_levels = initial_levels;
            spec.full_batch_pct = full_frac;
            spec.seed = seed;
            grid.push_back(spec);
        }
    }
    std::cout << "config: bench variant=" << variant_name << " k=" << k_list
              << " workers=" << worker_list << " keys=" << keys
              << " order=" << order_name << " pattern=" << pattern_name
              << " initial-levels=" << initial_levels
              << " full-frac=" << full_frac << " seed=" << seed << "\n";
    auto rows = run_sweep(grid);
    if (csv_path.empty()) {
        write_csv(std::cout, rows);
    } else {
        std::ofstream out(csv_path);
        write_csv(out, rows);
        std::cout << "wrote " << rows.size() << " rows to " << csv_path
                  << "\n";
    }
    return 0;
}

int run_sssp_cmd(const std::string& graph_path, const std::string& format,
                 std::uint32_t source, std::uint64_t threshold,
                 std::uint32_t workers, const std::string& csv_path) {
    std::cout << "config: sssp graph=" << graph_path << " format=" << format
              << " source=" << source << " threshold=" << threshold
              << " workers=" << workers << "\n";
    Graph graph = load_graph(graph_path, format == "mm"
                                             ? GraphFormat::MatrixMarket
                                             : GraphFormat::DimacsGr);
    SsspConfig config;
    config.threshold = threshold;
    config.workers = workers;
    SsspResult heap_result = sssp(graph, source, config);
    SsspResult fifo_result = sssp_fifo(graph, source, workers);
    auto oracle = dijkstra(graph, source);
    const bool exact = heap_result.dist == oracle && fifo_result.dist == oracle;

    std::ostringstream row;
    row << "graph,nodes,edges,source,threshold,workers,heap_visits,"
           "fifo_visits,exact\n";
    row << graph_path << ',' << graph.node_count() << ','
        << graph.edge_count() << ',' << source << ',' << threshold << ','
        << workers << ',' << heap_result.visits << ',' << fifo_result.visits
        << ',' << (exact ? 1 : 0) << '\n';
    if (csv_path.empty()) {
        std::cout << row.str();
    } else {
        std::ofstream out(csv_path);
        out << row.str();
    }
    if (!exact) {
        std::cout << "FAIL: distances differ from the reference\n";
        return 1;
    }
    std::cout << "PASS: distances exact; heap visits " << heap_result.visits
              << " vs fifo " << fifo_result.visits << "\n";
    return 0;
}

KnapsackType parse_knapsack_type(const std::string& name) {
    if (name == "sc") return KnapsackType::StronglyCorrelated;
    if (name == "asc") return KnapsackType::AlmostStronglyCorrelated;
    if (name == "esc") return KnapsackType::EvenOdd;
    if (name == "ss") return KnapsackType::SubsetSum;
    throw CLI::ValidationError("--type", "must be sc, asc, esc or ss");
}

int run_knapsack_cmd(const std::string& type_name, std::uint32_t n,
                     std::uint32_t range, std::uint64_t seed,
                     std::uint32_t workers, std::uint64_t gc_threshold,
                     const std::string& csv_path) {
    std::cout << "config: knapsack type=" << type_name << " n=" << n
              << " range=" << range << " seed=" << seed
              << " workers=" << workers << " gc-threshold=" << gc_threshold
              << "\n";
    auto instance = generate_knapsack(parse_knapsack_type(type_name), n,
                                      range, seed);
    BbConfig config;
    config.workers = workers;
    config.gc_threshold = gc_threshold;
    BbOutcome outcome = knapsack_bb(instance, config);

    const bool oracle_feasible =
        static_cast<std::uint64_t>(n) * instance.capacity <= 200'000'000ULL;
    bool exact = true;
    std::uint64_t oracle_best = 0;
    if (oracle_feasible) {
        oracle_best = knapsack_dp(instance);
        exact = outcome.best == oracle_best;
    }

    std::ostringstream row;
    row << "type,n,range,seed,workers,gc_threshold,best,explored,gc_passes,"
           "dp_best\n";
    row << type_name << ',' << n << ',' << range << ',' << seed << ','
        << workers << ',' << gc_threshold << ',' << outcome.best << ','
        << outcome.explored << ',' << outcome.gc_passes << ','
        << (oracle_feasible ? std::to_string(oracle_best) : "-") << '\n';
    if (csv_path.empty()) {
        std::cout << row.str();
    } else {
        std::ofstream out(csv_path);
        out << row.str();
    }
    if (!exact) {
        std::cout << "FAIL: best " << outcome.best << " != oracle "
                  << oracle_best << "\n";
        return 1;
    }
    std::cout << "PASS: best=" << outcome.best
              << " explored=" << outcome.explored
              << " gc_passes=" << outcome.gc_passes << "\n";
    return 0;
}

int run_gen_knapsack_cmd(const std::string& type_name, std::uint32_t n,
                         std::uint32_t range, std::uint64_t seed,
                         const std::string& out_path) {
    auto instance = generate_knapsack(parse_knapsack_type(type_name), n,
                                      range, seed);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        out = &file;
    }
    *out << instance.n << ' ' << instance.capacity << '\n';
    for (std::uint32_t i = 0; i < instance.n; ++i)
        *out << instance.weight[i] << ' ' << instance.benefit[i] << '\n';
    if (!out_path.empty())
        std::cout << "wrote instance ks_" << type_name << '_' << n << " to "
                  << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"batched concurrent heap toolkit"};
    app.require_subcommand(1);

    // stress
    auto* stress = app.add_subcommand(
        "stress", "instrumented concurrent runs + linearizability checks");
    std::string s_variant = "td";
    std::uint32_t s_workers = 8, s_k = 16, s_partial = 20, s_runs = 1;
    std::uint64_t s_ops = 100'000, s_seed = 1;
    stress->add_option("--variant", s_variant)->check(CLI::IsMember({"td", "bu"}));
    stress->add_option("--workers", s_workers)->check(CLI::PositiveNumber);
    stress->add_option("--ops", s_ops)->check(CLI::PositiveNumber);
    stress->add_option("--k", s_k)->check(CLI::PositiveNumber);
    stress->add_option("--partial", s_partial)->check(CLI::Range(0, 100));
    stress->add_option("--seed", s_seed);
    stress->add_option("--runs", s_runs)->check(CLI::PositiveNumber);

    // exhaustive
    auto* exhaustive = app.add_subcommand(
        "exhaustive", "cross-validate constructive checkers on small runs");
    std::uint32_t e_runs = 100, e_max_ops = 12, e_k = 2;
    std::uint64_t e_seed = 1;
    exhaustive->add_option("--runs", e_runs)->check(CLI::PositiveNumber);
    exhaustive->add_option("--max-ops", e_max_ops)->check(CLI::Range(2, 20));
    exhaustive->add_option("--k", e_k)->check(CLI::PositiveNumber);
    exhaustive->add_option("--seed", e_seed);

    // bench
    auto* bench = app.add_subcommand("bench", "parameter sweeps with CSV");
    std::string b_variant = "td", b_k = "64", b_workers = "4";
    std::string b_order = "random", b_pattern = "insall", b_csv;
    std::uint64_t b_keys = 1'000'000, b_seed = 1;
    std::uint32_t b_levels = 0, b_full = 100;
    bench->add_option("--variant", b_variant)->check(CLI::IsMember({"td", "bu"}));
    bench->add_option("--k", b_k);
    bench->add_option("--workers", b_workers);
    bench->add_option("--keys", b_keys)->check(CLI::PositiveNumber);
    bench->add_option("--order", b_order)
        ->check(CLI::IsMember({"random", "ascend", "descend"}));
    bench->add_option("--pattern", b_pattern)
        ->check(CLI::IsMember({"insall", "pairs"}));
    bench->add_option("--initial-levels", b_levels)->check(CLI::Range(0, 20));
    bench->add_option("--full-frac", b_full)->check(CLI::Range(0, 100));
    bench->add_option("--seed", b_seed);
    bench->add_option("--csv", b_csv);

    // sssp
    auto* sssp_cmd = app.add_subcommand("sssp", "heap-based shortest paths");
    std::string g_path, g_format = "mm", g_csv;
    std::uint32_t g_source = 0, g_workers = 4;
    std::uint64_t g_threshold = 10'000;
    sssp_cmd->add_option("--graph", g_path)->required();
    sssp_cmd->add_option("--format", g_format)
        ->check(CLI::IsMember({"mm", "gr"}));
    sssp_cmd->add_option("--source", g_source);
    sssp_cmd->add_option("--threshold", g_threshold);
    sssp_cmd->add_option("--workers", g_workers)->check(CLI::PositiveNumber);
    sssp_cmd->add_option("--csv", g_csv);

    // knapsack
    auto* knap = app.add_subcommand("knapsack", "branch-and-bound 0/1 knapsack");
    std::string k_type = "ss", k_csv;
    std::uint32_t k_n = 100, k_range = 1000, k_workers = 2;
    std::uint64_t k_seed = 1, k_gc = 1 << 16;
    knap->add_option("--type", k_type)
        ->check(CLI::IsMember({"sc", "asc", "esc", "ss"}));
    knap->add_option("--n", k_n)->check(CLI::PositiveNumber);
    knap->add_option("--range", k_range)->check(CLI::Range(10, 1'000'000));
    knap->add_option("--seed", k_seed);
    knap->add_option("--workers", k_workers)->check(CLI::Range(1, 15));
    knap->add_option("--gc-threshold", k_gc);
    knap->add_option("--csv", k_csv);

    // gen-knapsack
    auto* gen = app.add_subcommand("gen-knapsack", "emit a generated instance");
    std::string gk_type = "ss", gk_out;
    std::uint32_t gk_n = 100, gk_range = 1000;
    std::uint64_t gk_seed = 1;
    gen->add_option("--type", gk_type)
        ->check(CLI::IsMember({"sc", "asc", "esc", "ss"}));
    gen->add_option("--n", gk_n)->check(CLI::PositiveNumber);
    gen->add_option("--range", gk_range)->check(CLI::Range(10, 1'000'000));
    gen->add_option("--seed", gk_seed);
    gen->add_option("--out", gk_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*stress)
            return run_stress_cmd(s_variant, s_workers, s_ops, s_k, s_partial,
                                  resolve_seed(s_seed), s_runs);
        if (*exhaustive)
            return run_exhaustive_cmd(e_runs, e_max_ops, e_k,
                                      resolve_seed(e_seed));
        if (*bench)
            return run_bench_cmd(b_variant, b_k, b_workers, b_keys, b_order,
                                 b_pattern, b_levels, b_full,
                                 resolve_seed(b_seed), b_csv);
        if (*sssp_cmd)
            return run_sssp_cmd(g_path, g_format, g_source, g_threshold,
                                g_workers, g_csv);
        if (*knap)
            return run_knapsack_cmd(k_type, k_n, k_range, resolve_seed(k_seed),
                                    k_workers, k_gc, k_csv);
        if (*gen)
            return run_gen_knapsack_cmd(gk_type, gk_n, gk_range,
                                        resolve_seed(gk_seed), gk_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
