#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "schelling/model.hpp"
#include "schelling/rng.hpp"
#include "schelling/scheduler.hpp"

namespace schelling {

// State of the composite Markov chain: configuration plus the last pair that
// had the opportunity to switch.
struct ChainState {
    Configuration config;
    AgentPlacement placement;
    Pair last_pair;
};

struct TraceRecord {
    long long step;
    Pair scheduled_pair;
    MoveKind outcome;
    double potential;
    int bichromatic_edges;
};

struct InitialSpec {
    enum class Kind { Random, Explicit };
    Kind kind = Kind::Random;
    std::string colors;            // Explicit: row-major '+'/'-' string
    std::optional<uint64_t> seed;  // Random: override for the placement draw
};

struct SchedulerChoice {
    SchedulerFamily family = SchedulerFamily::UniformAll;
    std::optional<double> self_weight;  // contagion
    std::string custom_file;            // custom
};

// Full, reproducible description of one experiment.
struct RunConfig {
    int n = 0;
    int red_count = 0;
    double r = 1.0;
    double beta = 1.0;
    std::vector<double> eps;  // empty = all zeros
    SchedulerChoice scheduler;
    InitialSpec initial;
    long long steps = 0;
    uint64_t seed = 0;
    long long record_every = 0;  // 0 disables the per-step trace

    // Throws ValidationError listing every violation at once.
    void validate() const;

    ModelParams params() const { return {r, beta, eps}; }
    TorusGrid grid() const { return TorusGrid(n); }
    SchedulerSpec build_scheduler() const;
    Configuration initial_configuration(const TorusGrid& grid, Rng& rng) const;
};

struct RunSummary {
    ChainState final_state;
    long long steps = 0;
    double mean_potential = 0.0;
    double mean_bichromatic = 0.0;
    // Post-step visit counts keyed by configuration mask; tracked for n <= 3.
    std::map<uint32_t, long long> config_visits;
};

struct RunResult {
    std::vector<TraceRecord> trace;
    RunSummary summary;
};

// Optional per-step observation (grid snapshots etc.); invoked every
// snapshot_every steps when positive.
struct RunHooks {
    long long snapshot_every = 0;
    std::function<void(long long step, const Configuration&)> on_snapshot;
};

// One transition: draw the next pair from D_{last_pair}, then swap with the
// log-linear probability. Exactly two rng draws per call.
std::pair<ChainState, TraceRecord> step(const ChainState& state, const SchedulerSpec& spec,
                                        const ModelParams& params, Rng& rng,
                                        long long step_index = 0);

RunResult run(const RunConfig& config);
RunResult run(const RunConfig& config, const TorusGrid& grid, const SchedulerSpec& spec,
              const RunHooks& hooks = {});

// potential(after swap at pair) - potential(before), from the edges incident
// to the two endpoints only.
double incremental_potential_delta(const TorusGrid& grid, const ChainState& state,
                                   const Pair& pair, const ModelParams& params);

} // namespace schelling
