#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "schelling/lattice.hpp"

namespace schelling {

// Color assignment, one +1/-1 entry per vertex in linearization order.
// Swap dynamics conserves the +1 count.
struct Configuration {
    std::vector<int8_t> colors;

    int red_count() const {
        int c = 0;
        for (int8_t v : colors)
            if (v > 0) ++c;
        return c;
    }

    friend bool operator==(const Configuration&, const Configuration&) = default;
};

inline Configuration uniform_configuration(const TorusGrid& grid, int8_t color) {
    return {std::vector<int8_t>(grid.num_vertices(), color)};
}

// Parse a row-major '+'/'-' string, e.g. "++-+-----" for a 3x3 grid.
inline Configuration configuration_from_string(const TorusGrid& grid, std::string_view text) {
    if (static_cast<int>(text.size()) != grid.num_vertices())
        throw std::invalid_argument("configuration string has wrong length");
    Configuration config;
    config.colors.reserve(text.size());
    for (char c : text) {
        if (c == '+') config.colors.push_back(1);
        else if (c == '-') config.colors.push_back(-1);
        else throw std::invalid_argument("configuration string must contain only '+' and '-'");
    }
    return config;
}

inline std::string configuration_to_string(const Configuration& config) {
    std::string out;
    out.reserve(config.colors.size());
    for (int8_t c : config.colors) out.push_back(c > 0 ? '+' : '-');
    return out;
}

// Bitmask encoding for small grids: bit v set means +1 at vertex v.
inline uint32_t configuration_mask(const Configuration& config) {
    if (config.colors.size() > 32)
        throw std::invalid_argument("configuration too large for mask encoding");
    uint32_t mask = 0;
    for (size_t v = 0; v < config.colors.size(); ++v)
        if (config.colors[v] > 0) mask |= (1u << v);
    return mask;
}

inline Configuration configuration_from_mask(const TorusGrid& grid, uint32_t mask) {
    Configuration config;
    config.colors.resize(grid.num_vertices());
    for (int v = 0; v < grid.num_vertices(); ++v)
        config.colors[v] = (mask >> v) & 1u ? int8_t{1} : int8_t{-1};
    return config;
}

// u_i(x) = r * w(x_i) + eps_i with r shared by all agents and eps_i the
// agent-specific offset; beta is the inverse noise of the response rule.
struct ModelParams {
    double r = 1.0;
    double beta = 1.0;
    std::vector<double> eps;  // one per agent; empty means all zeros

    double eps_of(int agent) const {
        return eps.empty() ? 0.0 : eps[agent];
    }

    double eps_sum() const {
        return std::accumulate(eps.begin(), eps.end(), 0.0);
    }
};

// Bijection vertex -> agent id. Agents carry their eps offset with them when
// they swap positions.
struct AgentPlacement {
    std::vector<int32_t> agent_at;

    static AgentPlacement identity(int num_vertices) {
        AgentPlacement p;
        p.agent_at.resize(num_vertices);
        std::iota(p.agent_at.begin(), p.agent_at.end(), 0);
        return p;
    }

    friend bool operator==(const AgentPlacement&, const AgentPlacement&) = default;
};

enum class MoveKind : uint8_t { Swap, Stay };

struct MoveOutcome {
    MoveKind kind;
    Pair pair;
};

// (# same-colored neighbors) - (# opposite-colored neighbors); in {-4,-2,0,2,4}.
inline int local_balance(const TorusGrid& grid, const Configuration& config, Vertex v) {
    int own = config.colors[grid.vertex_index(v)];
    int sum = 0;
    for (const Vertex& u : grid.neighbors(v))
        sum += config.colors[grid.vertex_index(u)];
    return own * sum;
}

inline double utility(const TorusGrid& grid, const Configuration& config,
                      const AgentPlacement& placement, const ModelParams& params, Vertex v) {
    return params.r * local_balance(grid, config, v) +
           params.eps_of(placement.agent_at[grid.vertex_index(v)]);
}

// Sum of local balances over all vertices = 2 * (monochromatic - bichromatic
// edge count); the potential is r times this plus the eps sum.
inline long long potential_units(const TorusGrid& grid, const Configuration& config) {
    long long sum = 0;
    for (int i = 0; i < grid.num_vertices(); ++i)
        sum += local_balance(grid, config, grid.vertex_at(i));
    return sum;
}

inline double potential(const TorusGrid& grid, const Configuration& config,
                        const AgentPlacement& placement, const ModelParams& params) {
    (void)placement;  // eps enters only as a configuration-independent sum
    return params.r * static_cast<double>(potential_units(grid, config)) + params.eps_sum();
}

inline int bichromatic_edge_count(const TorusGrid& grid, const Configuration& config) {
    int count = 0;
    for (int i = 0; i < grid.num_vertices(); ++i) {
        Vertex v = grid.vertex_at(i);
        Vertex right = grid.wrap(v.row, v.col + 1);
        Vertex down = grid.wrap(v.row + 1, v.col);
        if (config.colors[i] != config.colors[grid.vertex_index(right)]) ++count;
        if (config.colors[i] != config.colors[grid.vertex_index(down)]) ++count;
    }
    return count;
}

// Exchange colors and agent ids at the endpoints. Same-colored endpoints
// leave the configuration unchanged; agent ids swap regardless.
inline void apply_swap_in_place(const TorusGrid& grid, Configuration& config,
                                AgentPlacement& placement, const Pair& pair) {
    int a = grid.vertex_index(pair.a);
    int b = grid.vertex_index(pair.b);
    std::swap(config.colors[a], config.colors[b]);
    std::swap(placement.agent_at[a], placement.agent_at[b]);
}

inline std::pair<Configuration, AgentPlacement> apply_swap(
    const TorusGrid& grid, Configuration config, AgentPlacement placement, const Pair& pair) {
    apply_swap_in_place(grid, config, placement, pair);
    return {std::move(config), std::move(placement)};
}

// Joint-utility change of the two scheduled agents if they swap, in exact
// integer units of r. The eps offsets travel with the agents and cancel.
// Both balances are evaluated on the full configuration, partner included.
inline int pair_balance_delta(const TorusGrid& grid, const Configuration& config, const Pair& pair) {
    int ia = grid.vertex_index(pair.a);
    int ib = grid.vertex_index(pair.b);
    int ca = config.colors[ia];
    int cb = config.colors[ib];
    if (ca == cb) return 0;
    // Neighbor color sums excluding the partner; the shared edge (if the
    // endpoints are adjacent) contributes equally before and after the swap.
    int sum_a = 0;
    for (const Vertex& u : grid.neighbors(pair.a)) {
        int iu = grid.vertex_index(u);
        if (iu != ib) sum_a += config.colors[iu];
    }
    int sum_b = 0;
    for (const Vertex& u : grid.neighbors(pair.b)) {
        int iu = grid.vertex_index(u);
        if (iu != ia) sum_b += config.colors[iu];
    }
    return (cb - ca) * (sum_a - sum_b);
}

inline double pair_utility_delta(const TorusGrid& grid, const Configuration& config,
                                 const AgentPlacement& placement, const ModelParams& params,
                                 const Pair& pair) {
    (void)placement;
    return params.r * pair_balance_delta(grid, config, pair);
}

// exp(x) / (1 + exp(x)) without overflow.
inline double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

// Log-linear response: probability that the scheduled pair swaps.
inline double swap_probability(const TorusGrid& grid, const Configuration& config,
                               const AgentPlacement& placement, const ModelParams& params,
                               const Pair& pair) {
    return logistic(params.beta * pair_utility_delta(grid, config, placement, params, pair));
}

// Resistance of a move in integer units of r: a swap resists the forgone
// joint-utility loss, a stay resists the forgone improvement; neutral moves
// have resistance zero.
inline int move_resistance_units(const TorusGrid& grid, const Configuration& config,
                                 const MoveOutcome& outcome) {
    int delta = pair_balance_delta(grid, config, outcome.pair);
    int res = (outcome.kind == MoveKind::Swap) ? -delta : delta;
    return res > 0 ? res : 0;
}

inline double move_resistance(const TorusGrid& grid, const Configuration& config,
                              const AgentPlacement& placement, const ModelParams& params,
                              const MoveOutcome& outcome) {
    (void)placement;
    return params.r * move_resistance_units(grid, config, outcome);
}

} // namespace schelling
