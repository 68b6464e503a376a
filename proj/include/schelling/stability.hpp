#pragma once

#include <cstdint>
#include <vector>

#include "schelling/exact.hpp"
#include "schelling/model.hpp"
#include "schelling/scheduler.hpp"

namespace schelling {

// Configurations attaining the minimum bichromatic edge count for their
// color counts, found by exhaustion.
struct MaxSegregatedSet {
    int min_bichromatic_edges = 0;
    std::vector<uint32_t> config_masks;  // ascending
};

// Throws TooLargeError when grid.side() > cap.
MaxSegregatedSet max_segregated(const TorusGrid& grid, int red_count, int cap = 4);

// Weighted digraph of all feasible moves between enumerated states. Weights
// are kept in exact integer units of r; the real resistance is r * units.
struct ResistanceGraph {
    struct Edge {
        uint32_t from;
        uint32_t to;
        int32_t units;
        MoveKind kind;
    };

    std::size_t num_nodes = 0;
    double r = 1.0;
    std::vector<Edge> edges;  // sorted by (from, scheduled pair, outcome)

    double resistance(const Edge& e) const { return r * e.units; }
};

ResistanceGraph build_resistance_graph(const StateSpace& space, const SchedulerSpec& spec,
                                       const ModelParams& params);

struct ResistanceTree {
    std::size_t root = 0;
    long long total_units = 0;
    double total_resistance = 0.0;
    // Edge index into graph.edges of each node's tree arc; -1 for the root.
    std::vector<long long> parent_edge;
};

// Minimum-resistance tree rooted at `root` (every other state has a unique
// directed path to it). Throws UnreachableError if some state cannot reach
// the root.
ResistanceTree min_arborescence(const ResistanceGraph& graph, std::size_t root);

struct StableOptions {
    // Exact integer argmin by default; the floating route exists to exercise
    // scale invariance and eps != 0 and compares totals with this tolerance.
    bool exact_units = true;
    double tie_tolerance = 1e-9;
    int num_threads = 0;  // 0 = hardware concurrency
};

// States admitting a rooted tree of globally minimal resistance.
std::vector<std::size_t> stochastically_stable(const StateSpace& space,
                                               const ResistanceGraph& graph,
                                               const StableOptions& options = {});

struct StableReport {
    long long min_total_units = 0;
    double min_total_resistance = 0.0;
    std::vector<std::size_t> stable_states;
    std::vector<uint32_t> stable_config_masks;  // ascending, deduplicated
    MaxSegregatedSet max_segregated;
    bool subset_of_max_segregated = false;
    bool equals_max_segregated_product = false;  // stable set == maxseg x all pairs
};

StableReport stable_report(const StateSpace& space, const SchedulerSpec& spec,
                           const ModelParams& params, const StableOptions& options = {});

struct CrossCheckReport {
    bool rank_agreement = false;
    double min_stable_mass = 0.0;
    double max_other_mass = 0.0;
    double mass_gap = 0.0;
    double residual = 0.0;
    std::vector<uint32_t> stable_config_masks;
};

// Consistency between the two routes to stochastic stability: the
// arborescence-stable configurations must be exactly the top-mass
// configurations of the stationary distribution at a large beta.
CrossCheckReport cross_check(const StateSpace& space, const SchedulerSpec& spec,
                             const ModelParams& params, double beta_large);

} // namespace schelling
