#include "schelling/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "schelling/errors.hpp"

namespace schelling {

void RunConfig::validate() const {
    std::vector<std::string> bad;
    if (n < 3) bad.push_back("n must be at least 3");
    if (n >= 3 && (red_count < 0 || red_count > n * n))
        bad.push_back("red_count must lie in [0, n^2]");
    if (!(r > 0.0)) bad.push_back("r must be positive");
    if (!(beta > 0.0)) bad.push_back("beta must be positive");
    if (!eps.empty() && static_cast<int>(eps.size()) != n * n)
        bad.push_back("eps must have one entry per vertex");
    if (steps < 0) bad.push_back("steps must be nonnegative");
    if (record_every < 0) bad.push_back("record_every must be nonnegative");
    if (scheduler.family == SchedulerFamily::Contagion && scheduler.self_weight &&
        !(*scheduler.self_weight > 0.0 && *scheduler.self_weight < 1.0))
        bad.push_back("scheduler self_weight must lie in (0,1)");
    if (scheduler.family == SchedulerFamily::Custom && scheduler.custom_file.empty())
        bad.push_back("custom scheduler requires a file path");
    if (initial.kind == InitialSpec::Kind::Explicit) {
        if (static_cast<int>(initial.colors.size()) != n * n) {
            bad.push_back("explicit initial configuration must have n^2 characters");
        } else {
            int plus = 0;
            bool chars_ok = true;
            for (char c : initial.colors) {
                if (c == '+') ++plus;
                else if (c != '-') chars_ok = false;
            }
            if (!chars_ok) bad.push_back("initial colors must contain only '+' and '-'");
            else if (plus != red_count)
                bad.push_back("initial configuration has " + std::to_string(plus) +
                              " '+' cells but red_count is " + std::to_string(red_count));
        }
    }
    if (!bad.empty()) throw ValidationError(std::move(bad));
}

SchedulerSpec RunConfig::build_scheduler() const {
    switch (scheduler.family) {
        case SchedulerFamily::UniformAll:
            return SchedulerSpec::uniform(grid());
        case SchedulerFamily::Contagion:
            return SchedulerSpec::contagion(grid(), scheduler.self_weight);
        case SchedulerFamily::Custom:
            return load_scheduler_file(grid(), scheduler.custom_file);
    }
    throw std::logic_error("unknown scheduler family");
}

Configuration RunConfig::initial_configuration(const TorusGrid& g, Rng& rng) const {
    if (initial.kind == InitialSpec::Kind::Explicit)
        return configuration_from_string(g, initial.colors);
    // Partial Fisher-Yates: pick red_count cells without replacement.
    int m = g.num_vertices();
    std::vector<int> cells(m);
    std::iota(cells.begin(), cells.end(), 0);
    Rng local = initial.seed ? make_rng(*initial.seed) : Rng();
    Rng& use = initial.seed ? local : rng;
    Configuration config{std::vector<int8_t>(m, -1)};
    for (int i = 0; i < red_count; ++i) {
        int j = i + uniform_index(use, m - i);
        std::swap(cells[i], cells[j]);
        config.colors[cells[i]] = 1;
    }
    return config;
}

namespace {

struct MoveResult {
    Pair scheduled;
    MoveKind outcome;
    int applied_balance_delta;  // swap delta in r units, 0 for stays
};

// Shared transition core: one pair draw, one outcome draw.
MoveResult advance(ChainState& state, const SchedulerSpec& spec, const ModelParams& params,
                   Rng& rng) {
    const TorusGrid& grid = spec.grid();
    int current = spec.pair_index(state.last_pair);
    Pair scheduled = spec.pair_at(spec.sample(current, uniform_unit(rng)));
    int delta = pair_balance_delta(grid, state.config, scheduled);
    double p = logistic(params.beta * params.r * delta);
    bool swap = uniform_unit(rng) < p;
    state.last_pair = scheduled;
    if (swap) {
        apply_swap_in_place(grid, state.config, state.placement, scheduled);
        return {scheduled, MoveKind::Swap, delta};
    }
    return {scheduled, MoveKind::Stay, 0};
}

} // namespace

std::pair<ChainState, TraceRecord> step(const ChainState& state, const SchedulerSpec& spec,
                                        const ModelParams& params, Rng& rng,
                                        long long step_index) {
    ChainState next = state;
    MoveResult move = advance(next, spec, params, rng);
    const TorusGrid& grid = spec.grid();
    TraceRecord record{step_index, move.scheduled, move.outcome,
                       potential(grid, next.config, next.placement, params),
                       bichromatic_edge_count(grid, next.config)};
    return {std::move(next), record};
}

RunResult run(const RunConfig& config) {
    TorusGrid grid = config.grid();
    SchedulerSpec spec = config.build_scheduler();
    return run(config, grid, spec);
}

RunResult run(const RunConfig& config, const TorusGrid& grid, const SchedulerSpec& spec,
              const RunHooks& hooks) {
    config.validate();
    ModelParams params = config.params();
    Rng rng = make_rng(config.seed);

    ChainState state;
    state.config = config.initial_configuration(grid, rng);
    state.placement = AgentPlacement::identity(grid.num_vertices());
    state.last_pair = spec.pair_at(uniform_index(rng, spec.num_pairs()));

    // Running statistics are updated incrementally: a swap changes the
    // potential only through the <= 8 edges incident to its endpoints.
    long long units = potential_units(grid, state.config);
    int bichromatic = bichromatic_edge_count(grid, state.config);
    double eps_sum = params.eps_sum();
    bool track_visits = grid.side() <= 3;
    uint32_t mask = track_visits ? configuration_mask(state.config) : 0;

    RunResult result;
    double potential_acc = 0.0;
    double bichromatic_acc = 0.0;

    for (long long i = 1; i <= config.steps; ++i) {
        MoveResult move = advance(state, spec, params, rng);
        if (move.applied_balance_delta != 0) {
            units += 2LL * move.applied_balance_delta;
            bichromatic -= move.applied_balance_delta / 2;
        }
        if (track_visits) {
            if (move.outcome == MoveKind::Swap) {
                int ia = grid.vertex_index(move.scheduled.a);
                int ib = grid.vertex_index(move.scheduled.b);
                uint32_t bit_a = (mask >> ia) & 1u, bit_b = (mask >> ib) & 1u;
                if (bit_a != bit_b) mask ^= (1u << ia) | (1u << ib);
            }
            ++result.summary.config_visits[mask];
        }
        double pot = params.r * static_cast<double>(units) + eps_sum;
        potential_acc += pot;
        bichromatic_acc += bichromatic;
        if (config.record_every > 0 && i % config.record_every == 0)
            result.trace.push_back({i, move.scheduled, move.outcome, pot, bichromatic});
        if (hooks.snapshot_every > 0 && hooks.on_snapshot && i % hooks.snapshot_every == 0)
            hooks.on_snapshot(i, state.config);
    }

    if (units != potential_units(grid, state.config) ||
        bichromatic != bichromatic_edge_count(grid, state.config))
        throw std::logic_error("incremental statistics diverged from the configuration");

    result.summary.steps = config.steps;
    if (config.steps == 0) {
        result.summary.mean_potential = params.r * static_cast<double>(units) + eps_sum;
        result.summary.mean_bichromatic = bichromatic;
    } else {
        result.summary.mean_potential = potential_acc / static_cast<double>(config.steps);
        result.summary.mean_bichromatic = bichromatic_acc / static_cast<double>(config.steps);
    }
    result.summary.final_state = std::move(state);
    return result;
}

double incremental_potential_delta(const TorusGrid& grid, const ChainState& state,
                                   const Pair& pair, const ModelParams& params) {
    return 2.0 * params.r * pair_balance_delta(grid, state.config, pair);
}

} // namespace schelling
