#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/SparseCore>

#include "schelling/model.hpp"
#include "schelling/scheduler.hpp"

namespace schelling {

// Complete enumeration of (configuration, last pair) states at fixed color
// counts. State index = config_index * num_pairs + pair_index.
struct StateSpace {
    TorusGrid grid;
    int red_count;
    std::vector<Pair> pairs;
    std::vector<uint32_t> config_masks;  // ascending

    std::size_t num_states() const { return config_masks.size() * pairs.size(); }
    std::size_t num_configs() const { return config_masks.size(); }
    int num_pairs() const { return static_cast<int>(pairs.size()); }

    std::size_t state_index(std::size_t config_idx, int pair_idx) const {
        return config_idx * pairs.size() + pair_idx;
    }
    std::pair<std::size_t, int> decompose(std::size_t state) const {
        return {state / pairs.size(), static_cast<int>(state % pairs.size())};
    }
    // Index of a configuration mask, or -1 when absent.
    long long config_index(uint32_t mask) const;
    Configuration config_at(std::size_t config_idx) const {
        return configuration_from_mask(grid, config_masks[config_idx]);
    }
};

// Throws TooLargeError when grid.side() > cap.
StateSpace enumerate(const TorusGrid& grid, int red_count, const SchedulerSpec& spec,
                     int cap = 3);

// Row-stochastic transition matrix of the composite chain.
struct TransitionMatrix {
    Eigen::SparseMatrix<double, Eigen::RowMajor> P;
};

TransitionMatrix build_matrix(const StateSpace& space, const SchedulerSpec& spec,
                              const ModelParams& params);

struct StationaryDistribution {
    Eigen::VectorXd pi;
    double residual = 0.0;  // || pi P - pi ||_1 at return
};

struct StationaryOptions {
    double residual_tol = 1e-10;
    long long max_iterations = 1'000'000;
    double rel_change_tol = 1e-14;
    bool allow_direct = true;  // sparse LU when power iteration stalls
};

// Unique stationary distribution of an ergodic chain. Power iteration is
// attempted first; a direct sparse solve picks up slowly mixing chains.
// Throws NoConvergenceError if the residual contract cannot be met.
StationaryDistribution stationary(const TransitionMatrix& matrix,
                                  const StationaryOptions& options = {});

// Marginal over configurations (pair component summed out), aligned with
// space.config_masks.
std::vector<double> project_to_configs(const StateSpace& space,
                                       const StationaryDistribution& dist);

// Stationary distribution of the pair walk alone, aligned with spec pairs.
std::vector<double> walk_stationary(const SchedulerSpec& spec,
                                    const StationaryOptions& options = {});

struct BetaSweepEntry {
    double beta;
    double mass_on_q;
    double residual;
    // Top configurations by stationary mass, descending.
    std::vector<std::pair<uint32_t, double>> top_configs;
};

// One stationary solve per beta; Q is the maximally segregated set computed
// by the stability module.
std::vector<BetaSweepEntry> beta_sweep(const TorusGrid& grid, int red_count,
                                       const SchedulerSpec& spec, const ModelParams& params,
                                       const std::vector<double>& betas, int top_k = 5,
                                       int cap = 3);

} // namespace schelling
