#include "schelling/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <Eigen/SparseLU>

#include "schelling/errors.hpp"
#include "schelling/stability.hpp"

namespace schelling {

long long StateSpace::config_index(uint32_t mask) const {
    auto it = std::lower_bound(config_masks.begin(), config_masks.end(), mask);
    if (it == config_masks.end() || *it != mask) return -1;
    return it - config_masks.begin();
}

StateSpace enumerate(const TorusGrid& grid, int red_count, const SchedulerSpec& spec, int cap) {
    if (red_count < 0 || red_count > grid.num_vertices())
        throw std::invalid_argument("red_count out of range");
    if (grid.side() > cap)
        throw TooLargeError("state enumeration capped at side " + std::to_string(cap) +
                            "; pass an explicit override to go larger");
    StateSpace space{grid, red_count, spec.grid().all_pairs(), {}};
    uint32_t limit = 1u << grid.num_vertices();
    for (uint32_t mask = 0; mask < limit; ++mask)
        if (std::popcount(mask) == red_count) space.config_masks.push_back(mask);
    return space;
}

TransitionMatrix build_matrix(const StateSpace& space, const SchedulerSpec& spec,
                              const ModelParams& params) {
    const TorusGrid& grid = space.grid;
    int num_pairs = space.num_pairs();
    std::size_t n_states = space.num_states();

    Eigen::SparseMatrix<double, Eigen::RowMajor> P(n_states, n_states);
    std::vector<Eigen::Triplet<double>> triplets;

    for (std::size_t ci = 0; ci < space.num_configs(); ++ci) {
        Configuration config = space.config_at(ci);
        for (int e = 0; e < num_pairs; ++e) {
            std::size_t from = space.state_index(ci, e);
            for (int to_pair : spec.support(e)) {
                double q = spec.weight(e, to_pair);
                const Pair& scheduled = space.pairs[to_pair];
                int ia = grid.vertex_index(scheduled.a);
                int ib = grid.vertex_index(scheduled.b);
                if (config.colors[ia] == config.colors[ib]) {
                    triplets.emplace_back(from, space.state_index(ci, to_pair), q);
                    continue;
                }
                double p = logistic(params.beta * params.r *
                                    pair_balance_delta(grid, config, scheduled));
                uint32_t swapped = space.config_masks[ci] ^ ((1u << ia) | (1u << ib));
                std::size_t cj = static_cast<std::size_t>(space.config_index(swapped));
                triplets.emplace_back(from, space.state_index(ci, to_pair), q * (1.0 - p));
                triplets.emplace_back(from, space.state_index(cj, to_pair), q * p);
            }
        }
    }
    P.setFromTriplets(triplets.begin(), triplets.end());
    P.makeCompressed();
    return {std::move(P)};
}

namespace {

double residual_l1(const Eigen::SparseMatrix<double, Eigen::RowMajor>& P,
                   const Eigen::VectorXd& pi) {
    Eigen::VectorXd next = P.transpose() * pi;
    return (next - pi).lpNorm<1>();
}

// Power iteration with L1 renormalization; returns the final residual.
double power_iterate(const Eigen::SparseMatrix<double, Eigen::RowMajor>& P,
                     Eigen::VectorXd& pi, const StationaryOptions& options,
                     long long budget) {
    double res = residual_l1(P, pi);
    for (long long it = 0; it < budget && res > options.residual_tol; ++it) {
        Eigen::VectorXd next = P.transpose() * pi;
        next /= next.lpNorm<1>();
        double change = (next - pi).lpNorm<1>();
        pi.swap(next);
        if ((it & 63) == 0 || change <= options.rel_change_tol) {
            res = residual_l1(P, pi);
            if (change <= options.rel_change_tol) break;
        }
    }
    return residual_l1(P, pi);
}

// Direct solve of pi^T P = pi^T with sum(pi) = 1: build A = P^T - I, replace
// the last equation by the normalization, and factor with sparse LU.
bool solve_direct(const Eigen::SparseMatrix<double, Eigen::RowMajor>& P, Eigen::VectorXd& pi) {
    using ColMajor = Eigen::SparseMatrix<double>;
    const Eigen::Index n = P.rows();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(P.nonZeros() + 2 * n);
    for (Eigen::Index i = 0; i < P.outerSize(); ++i)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(P, i); it; ++it)
            if (it.col() != n - 1) triplets.emplace_back(it.col(), i, it.value());
    for (Eigen::Index i = 0; i < n - 1; ++i) triplets.emplace_back(i, i, -1.0);
    for (Eigen::Index j = 0; j < n; ++j) triplets.emplace_back(n - 1, j, 1.0);

    ColMajor A(n, n);
    A.setFromTriplets(triplets.begin(), triplets.end(),
                      [](double a, double b) { return a + b; });
    A.makeCompressed();

    Eigen::SparseLU<ColMajor> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) return false;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b[n - 1] = 1.0;
    pi = lu.solve(b);
    if (lu.info() != Eigen::Success) return false;
    for (Eigen::Index i = 0; i < n; ++i)
        if (pi[i] < 0.0) pi[i] = 0.0;
    double sum = pi.lpNorm<1>();
    if (!(sum > 0.0) || !std::isfinite(sum)) return false;
    pi /= sum;
    return true;
}

} // namespace

StationaryDistribution stationary(const TransitionMatrix& matrix, const StationaryOptions& options) {
    const auto& P = matrix.P;
    if (P.rows() != P.cols() || P.rows() == 0)
        throw std::invalid_argument("transition matrix must be square and nonempty");

    Eigen::VectorXd pi = Eigen::VectorXd::Constant(P.rows(), 1.0 / P.rows());

    // A short power-iteration burst handles fast-mixing chains; the direct
    // solve covers the slowly mixing (large beta) regime where the spectral
    // gap makes iteration hopeless.
    long long burst = std::min<long long>(options.max_iterations, 512);
    double res = power_iterate(P, pi, options, burst);
    if (res <= options.residual_tol) return {std::move(pi), res};

    if (options.allow_direct) {
        Eigen::VectorXd direct;
        if (solve_direct(P, direct)) {
            double dres = residual_l1(P, direct);
            if (dres <= options.residual_tol) return {std::move(direct), dres};
            if (dres < res) {
                pi = direct;
                res = dres;
            }
        }
    }

    res = power_iterate(P, pi, options, options.max_iterations - burst);
    if (res > options.residual_tol) throw NoConvergenceError(options.max_iterations, res);
    return {std::move(pi), res};
}

std::vector<double> project_to_configs(const StateSpace& space, const StationaryDistribution& dist) {
    std::vector<double> mass(space.num_configs(), 0.0);
    std::size_t p = space.pairs.size();
    for (std::size_t ci = 0; ci < space.num_configs(); ++ci) {
        double acc = 0.0;
        for (std::size_t e = 0; e < p; ++e) acc += dist.pi[ci * p + e];
        mass[ci] = acc;
    }
    return mass;
}

std::vector<double> walk_stationary(const SchedulerSpec& spec, const StationaryOptions& options) {
    int p = spec.num_pairs();
    Eigen::SparseMatrix<double, Eigen::RowMajor> P(p, p);
    std::vector<Eigen::Triplet<double>> triplets;
    for (int i = 0; i < p; ++i)
        for (const auto& e : spec.row(i)) triplets.emplace_back(i, e.to, e.weight);
    P.setFromTriplets(triplets.begin(), triplets.end());
    StationaryDistribution d = stationary({std::move(P)}, options);
    return {d.pi.data(), d.pi.data() + d.pi.size()};
}

std::vector<BetaSweepEntry> beta_sweep(const TorusGrid& grid, int red_count,
                                       const SchedulerSpec& spec, const ModelParams& params,
                                       const std::vector<double>& betas, int top_k, int cap) {
    StateSpace space = enumerate(grid, red_count, spec, cap);
    MaxSegregatedSet q = max_segregated(grid, red_count, std::max(cap, grid.side()));

    std::vector<BetaSweepEntry> table;
    table.reserve(betas.size());
    for (double beta : betas) {
        ModelParams p = params;
        p.beta = beta;
        TransitionMatrix matrix = build_matrix(space, spec, p);
        StationaryDistribution dist = stationary(matrix);
        std::vector<double> mass = project_to_configs(space, dist);

        BetaSweepEntry entry{beta, 0.0, dist.residual, {}};
        for (uint32_t mask : q.config_masks) {
            long long ci = space.config_index(mask);
            if (ci >= 0) entry.mass_on_q += mass[ci];
        }
        std::vector<std::size_t> order(mass.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (mass[a] != mass[b]) return mass[a] > mass[b];
            return space.config_masks[a] < space.config_masks[b];
        });
        for (int k = 0; k < top_k && k < static_cast<int>(order.size()); ++k)
            entry.top_configs.emplace_back(space.config_masks[order[k]], mass[order[k]]);
        table.push_back(std::move(entry));
    }
    return table;
}

} // namespace schelling
