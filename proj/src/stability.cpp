#include "schelling/stability.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <thread>

#include "schelling/arborescence.hpp"
#include "schelling/errors.hpp"

namespace schelling {

MaxSegregatedSet max_segregated(const TorusGrid& grid, int red_count, int cap) {
    if (red_count < 0 || red_count > grid.num_vertices())
        throw std::invalid_argument("red_count out of range");
    if (grid.side() > cap)
        throw TooLargeError("max_segregated exhaustion capped at side " + std::to_string(cap) +
                            "; pass an explicit override to go larger");

    // Precompute the edge list as index pairs; each candidate mask is then
    // scored with bit tests only.
    std::vector<std::pair<int, int>> edge_idx;
    for (const Pair& e : grid.edges())
        edge_idx.emplace_back(grid.vertex_index(e.a), grid.vertex_index(e.b));

    MaxSegregatedSet best;
    best.min_bichromatic_edges = grid.num_edges() + 1;
    uint64_t limit = 1ull << grid.num_vertices();
    for (uint64_t mask = 0; mask < limit; ++mask) {
        if (std::popcount(mask) != red_count) continue;
        int bichromatic = 0;
        for (const auto& [u, v] : edge_idx)
            bichromatic += ((mask >> u) ^ (mask >> v)) & 1ull;
        if (bichromatic < best.min_bichromatic_edges) {
            best.min_bichromatic_edges = bichromatic;
            best.config_masks.clear();
        }
        if (bichromatic == best.min_bichromatic_edges)
            best.config_masks.push_back(static_cast<uint32_t>(mask));
    }
    return best;
}

ResistanceGraph build_resistance_graph(const StateSpace& space, const SchedulerSpec& spec,
                                       const ModelParams& params) {
    const TorusGrid& grid = space.grid;
    ResistanceGraph graph;
    graph.num_nodes = space.num_states();
    graph.r = params.r;

    int num_pairs = space.num_pairs();
    std::vector<std::vector<int>> support(num_pairs);
    for (int e = 0; e < num_pairs; ++e) support[e] = spec.support(e);

    for (std::size_t ci = 0; ci < space.num_configs(); ++ci) {
        Configuration config = space.config_at(ci);
        // Swap delta per pair is a property of the configuration alone.
        std::vector<int> delta(num_pairs);
        std::vector<char> differs(num_pairs);
        for (int e = 0; e < num_pairs; ++e) {
            const Pair& p = space.pairs[e];
            differs[e] = config.colors[grid.vertex_index(p.a)] !=
                         config.colors[grid.vertex_index(p.b)];
            delta[e] = differs[e] ? pair_balance_delta(grid, config, p) : 0;
        }
        for (int e = 0; e < num_pairs; ++e) {
            uint32_t from = static_cast<uint32_t>(space.state_index(ci, e));
            for (int to_pair : support[e]) {
                if (!differs[to_pair]) {
                    graph.edges.push_back(
                        {from, static_cast<uint32_t>(space.state_index(ci, to_pair)), 0,
                         MoveKind::Stay});
                    continue;
                }
                const Pair& p = space.pairs[to_pair];
                uint32_t swapped = space.config_masks[ci] ^
                                   ((1u << grid.vertex_index(p.a)) |
                                    (1u << grid.vertex_index(p.b)));
                std::size_t cj = static_cast<std::size_t>(space.config_index(swapped));
                int d = delta[to_pair];
                graph.edges.push_back(
                    {from, static_cast<uint32_t>(space.state_index(cj, to_pair)),
                     d < 0 ? -d : 0, MoveKind::Swap});
                graph.edges.push_back(
                    {from, static_cast<uint32_t>(space.state_index(ci, to_pair)),
                     d > 0 ? d : 0, MoveKind::Stay});
            }
        }
    }
    return graph;
}

namespace {

template <class Cost>
std::vector<typename arborescence_detail::Solver<Cost>::Arc> transposed_arcs(
    const ResistanceGraph& graph, bool real_weights) {
    std::vector<typename arborescence_detail::Solver<Cost>::Arc> arcs;
    arcs.reserve(graph.edges.size());
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
        const auto& e = graph.edges[i];
        if (e.from == e.to) continue;
        Cost w = real_weights ? static_cast<Cost>(graph.r * e.units)
                              : static_cast<Cost>(e.units);
        arcs.push_back({static_cast<int>(e.to), static_cast<int>(e.from), w,
                        static_cast<int>(i)});
    }
    return arcs;
}

// Adding a supersink with uniform expensive arcs from every node turns
// "minimum over all roots of the in-tree cost" into a single solve: the
// optimal tree uses exactly one supersink arc, at an optimal root.
template <class Cost>
Cost min_over_roots(int n, const std::vector<typename arborescence_detail::Solver<Cost>::Arc>& base,
                    Cost big) {
    auto arcs = base;
    arcs.reserve(arcs.size() + n);
    for (int v = 0; v < n; ++v)
        arcs.push_back({n, v, big, static_cast<int>(base.size()) + v});  // transposed direction
    arborescence_detail::Solver<Cost> solver;
    auto result = solver.solve(n + 1, n, arcs, false, std::nullopt);
    if (result.unreachable >= 0) throw UnreachableError(result.unreachable);
    return result.total - big;
}

template <class Cost>
std::vector<std::size_t> stable_roots(std::size_t num_nodes,
                                      const std::vector<typename arborescence_detail::Solver<Cost>::Arc>& arcs,
                                      Cost tie_tolerance, int num_threads) {
    int n = static_cast<int>(num_nodes);
    Cost total_weight{};
    for (const auto& a : arcs) total_weight += a.w;
    Cost global_min = min_over_roots<Cost>(n, arcs, total_weight + 1);

    // Every root whose minimal tree matches the global minimum is stable;
    // solves for hopeless roots abort as soon as their lower bound passes it.
    std::vector<char> stable(num_nodes, 0);
    std::atomic<int> next{0};
    std::atomic<long long> unreachable{-1};
    int workers = num_threads > 0 ? num_threads
                                  : std::max(1u, std::thread::hardware_concurrency());
    auto worker = [&]() {
        arborescence_detail::Solver<Cost> solver;
        for (int root = next.fetch_add(1); root < n; root = next.fetch_add(1)) {
            auto result = solver.solve(n, root, arcs, false, {global_min + tie_tolerance});
            if (result.unreachable >= 0) {
                unreachable.store(result.unreachable);
                return;
            }
            if (!result.aborted && result.total <= global_min + tie_tolerance)
                stable[root] = 1;
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (unreachable.load() >= 0) throw UnreachableError(unreachable.load());

    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < num_nodes; ++v)
        if (stable[v]) out.push_back(v);
    return out;
}

} // namespace

ResistanceTree min_arborescence(const ResistanceGraph& graph, std::size_t root) {
    auto arcs = transposed_arcs<long long>(graph, false);
    arborescence_detail::Solver<long long> solver;
    auto result = solver.solve(static_cast<int>(graph.num_nodes), static_cast<int>(root), arcs,
                               true, std::nullopt);
    if (result.unreachable >= 0) throw UnreachableError(result.unreachable);

    ResistanceTree tree;
    tree.root = root;
    tree.total_units = result.total;
    tree.total_resistance = graph.r * result.total;
    // Solver arc ids were assigned in transposed_arcs as indices into
    // graph.edges, so they map back directly.
    tree.parent_edge.assign(graph.num_nodes, -1);
    for (std::size_t v = 0; v < graph.num_nodes; ++v)
        if (v != root) tree.parent_edge[v] = result.arc_of[v];
    return tree;
}

std::vector<std::size_t> stochastically_stable(const StateSpace& space,
                                               const ResistanceGraph& graph,
                                               const StableOptions& options) {
    (void)space;
    if (options.exact_units) {
        auto arcs = transposed_arcs<long long>(graph, false);
        return stable_roots<long long>(graph.num_nodes, arcs, 0, options.num_threads);
    }
    auto arcs = transposed_arcs<double>(graph, true);
    return stable_roots<double>(graph.num_nodes, arcs, options.tie_tolerance,
                                options.num_threads);
}

StableReport stable_report(const StateSpace& space, const SchedulerSpec& spec,
                           const ModelParams& params, const StableOptions& options) {
    ResistanceGraph graph = build_resistance_graph(space, spec, params);
    StableReport report;
    report.stable_states = stochastically_stable(space, graph, options);
    if (!report.stable_states.empty()) {
        ResistanceTree tree = min_arborescence(graph, report.stable_states.front());
        report.min_total_units = tree.total_units;
        report.min_total_resistance = tree.total_resistance;
    }
    for (std::size_t s : report.stable_states) {
        auto [ci, e] = space.decompose(s);
        (void)e;
        report.stable_config_masks.push_back(space.config_masks[ci]);
    }
    std::sort(report.stable_config_masks.begin(), report.stable_config_masks.end());
    report.stable_config_masks.erase(
        std::unique(report.stable_config_masks.begin(), report.stable_config_masks.end()),
        report.stable_config_masks.end());

    report.max_segregated =
        max_segregated(space.grid, space.red_count, std::max(4, space.grid.side()));
    report.subset_of_max_segregated = std::includes(
        report.max_segregated.config_masks.begin(), report.max_segregated.config_masks.end(),
        report.stable_config_masks.begin(), report.stable_config_masks.end());
    report.equals_max_segregated_product =
        report.stable_config_masks == report.max_segregated.config_masks &&
        report.stable_states.size() ==
            report.max_segregated.config_masks.size() * space.pairs.size();
    return report;
}

CrossCheckReport cross_check(const StateSpace& space, const SchedulerSpec& spec,
                             const ModelParams& params, double beta_large) {
    ResistanceGraph graph = build_resistance_graph(space, spec, params);
    std::vector<std::size_t> stable = stochastically_stable(space, graph);

    ModelParams hot = params;
    hot.beta = beta_large;
    StationaryDistribution dist = stationary(build_matrix(space, spec, hot));
    std::vector<double> mass = project_to_configs(space, dist);

    CrossCheckReport report;
    report.residual = dist.residual;
    std::vector<char> is_stable(space.num_configs(), 0);
    for (std::size_t s : stable) {
        auto [ci, e] = space.decompose(s);
        (void)e;
        if (!is_stable[ci]) {
            is_stable[ci] = 1;
            report.stable_config_masks.push_back(space.config_masks[ci]);
        }
    }
    std::sort(report.stable_config_masks.begin(), report.stable_config_masks.end());

    report.min_stable_mass = 1.0;
    report.max_other_mass = 0.0;
    for (std::size_t ci = 0; ci < space.num_configs(); ++ci) {
        if (is_stable[ci]) report.min_stable_mass = std::min(report.min_stable_mass, mass[ci]);
        else report.max_other_mass = std::max(report.max_other_mass, mass[ci]);
    }
    report.mass_gap = report.min_stable_mass - report.max_other_mass;
    report.rank_agreement =
        !report.stable_config_masks.empty() && report.mass_gap > 0.0;
    return report;
}

} // namespace schelling
