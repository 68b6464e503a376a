#pragma once

#include <optional>
#include <string>
#include <vector>

#include "schelling/lattice.hpp"
#include "schelling/rng.hpp"

namespace schelling {

enum class SchedulerFamily { UniformAll, Contagion, Custom };

struct SchedulerViolation {
    enum class Kind {
        NonStochasticRow,
        MissingSelfSupport,
        AsymmetricSupport,
        DisconnectedSupport,
    };

    Kind kind;
    int pair_a = -1;  // offending row (pair index); -1 when not applicable
    int pair_b = -1;  // second pair for AsymmetricSupport
    std::string message;
};

struct SchedulerRowEntry {
    int to;
    double weight;
};

// The pair-scheduling process {D_e}: for every unordered pair e, a
// distribution over the pair to schedule next. The support digraph is the
// influence network on pairs; the walk is nonadaptive by construction
// (no operation here takes a configuration).
class SchedulerSpec {
public:
    // Every row uniform over all pairs.
    static SchedulerSpec uniform(const TorusGrid& grid);

    // Support = pairs sharing a vertex with the current one (which always
    // includes the pair itself); probability self_weight on the pair itself,
    // the remainder uniform over the other sharing pairs. Omitting
    // self_weight makes the row uniform over its support.
    static SchedulerSpec contagion(const TorusGrid& grid,
                                   std::optional<double> self_weight = std::nullopt);

    // Explicit sparse rows; rows[i] lists the nonzero entries of D_i.
    static SchedulerSpec custom(const TorusGrid& grid,
                                std::vector<std::vector<SchedulerRowEntry>> rows);

    const TorusGrid& grid() const { return grid_; }
    SchedulerFamily family() const { return family_; }
    int num_pairs() const { return num_pairs_; }
    Pair pair_at(int index) const { return grid_.pair_at(index); }
    int pair_index(const Pair& p) const { return grid_.pair_index(p); }
    double self_weight() const { return self_weight_; }

    // D_from(to); zero when `to` is outside the support.
    double weight(int from, int to) const;

    // Ascending target indices of supp(D_from).
    std::vector<int> support(int from) const;

    // Materialized row, ascending by target index.
    std::vector<SchedulerRowEntry> row(int from) const;

    // Inverse-CDF draw from D_from given u in [0,1).
    int sample(int from, double u) const;

    Pair next_pair(const Pair& current, Rng& rng) const;

    // Checks row stochasticity, self-support, support symmetry, and strong
    // connectivity of the support digraph. Empty result means valid.
    std::vector<SchedulerViolation> validate() const;

private:
    SchedulerSpec(const TorusGrid& grid, SchedulerFamily family)
        : grid_(grid), family_(family), num_pairs_(grid.num_pairs()) {}

    int contagion_sample(int from, double u) const;

    TorusGrid grid_;
    SchedulerFamily family_;
    int num_pairs_;
    double self_weight_ = 0.0;                          // Contagion only
    std::vector<std::vector<SchedulerRowEntry>> rows_;  // Custom only
    std::vector<std::vector<double>> cumulative_;       // Custom only
};

// Loads a custom scheduler from a text file with one record per nonzero
// entry: "ea_row ea_col eb_row eb_col fa_row fa_col fb_row fb_col weight".
// Pairs are canonicalized; '#' starts a comment. Rows whose weights sum
// within 1e-9 of 1 are renormalized; anything else is left for validate()
// to flag.
SchedulerSpec load_scheduler_file(const TorusGrid& grid, const std::string& path);

std::string to_string(SchedulerViolation::Kind kind);

} // namespace schelling
