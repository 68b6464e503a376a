#include "schelling/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

namespace schelling {

namespace {

constexpr double kRowSumTol = 1e-12;

// Vertex indices k in [0, m) excluding skip1 < skip2, enumerated in order.
int kth_vertex_excluding(int k, int skip1, int skip2) {
    if (k >= skip1) ++k;
    if (k >= skip2) ++k;
    return k;
}

} // namespace

SchedulerSpec SchedulerSpec::uniform(const TorusGrid& grid) {
    return SchedulerSpec(grid, SchedulerFamily::UniformAll);
}

SchedulerSpec SchedulerSpec::contagion(const TorusGrid& grid, std::optional<double> self_weight) {
    int support_size = 2 * grid.num_vertices() - 3;
    double w = self_weight.value_or(1.0 / support_size);
    if (!(w > 0.0 && w < 1.0))
        throw std::invalid_argument("contagion self_weight must lie in (0,1)");
    SchedulerSpec spec(grid, SchedulerFamily::Contagion);
    spec.self_weight_ = w;
    return spec;
}

SchedulerSpec SchedulerSpec::custom(const TorusGrid& grid,
                                    std::vector<std::vector<SchedulerRowEntry>> rows) {
    SchedulerSpec spec(grid, SchedulerFamily::Custom);
    if (static_cast<int>(rows.size()) != spec.num_pairs_)
        throw std::invalid_argument("custom scheduler needs one row per pair");
    for (auto& row : rows) {
        std::sort(row.begin(), row.end(),
                  [](const SchedulerRowEntry& x, const SchedulerRowEntry& y) { return x.to < y.to; });
        for (size_t i = 0; i + 1 < row.size(); ++i)
            if (row[i].to == row[i + 1].to)
                throw std::invalid_argument("duplicate entry in scheduler row");
        for (const auto& e : row)
            if (e.to < 0 || e.to >= spec.num_pairs_)
                throw std::invalid_argument("scheduler row entry out of range");
    }
    spec.rows_ = std::move(rows);
    spec.cumulative_.resize(spec.rows_.size());
    for (size_t i = 0; i < spec.rows_.size(); ++i) {
        double acc = 0.0;
        spec.cumulative_[i].reserve(spec.rows_[i].size());
        for (const auto& e : spec.rows_[i]) {
            acc += e.weight;
            spec.cumulative_[i].push_back(acc);
        }
    }
    return spec;
}

double SchedulerSpec::weight(int from, int to) const {
    switch (family_) {
        case SchedulerFamily::UniformAll:
            return 1.0 / num_pairs_;
        case SchedulerFamily::Contagion: {
            if (to == from) return self_weight_;
            Pair e = pair_at(from);
            Pair f = pair_at(to);
            bool shares = e.a == f.a || e.a == f.b || e.b == f.a || e.b == f.b;
            if (!shares) return 0.0;
            return (1.0 - self_weight_) / (2.0 * grid_.num_vertices() - 4.0);
        }
        case SchedulerFamily::Custom: {
            const auto& row = rows_[from];
            auto it = std::lower_bound(row.begin(), row.end(), to,
                                       [](const SchedulerRowEntry& e, int t) { return e.to < t; });
            return (it != row.end() && it->to == to) ? it->weight : 0.0;
        }
    }
    return 0.0;
}

std::vector<int> SchedulerSpec::support(int from) const {
    std::vector<int> out;
    switch (family_) {
        case SchedulerFamily::UniformAll:
            out.resize(num_pairs_);
            for (int i = 0; i < num_pairs_; ++i) out[i] = i;
            break;
        case SchedulerFamily::Contagion: {
            Pair e = pair_at(from);
            int m = grid_.num_vertices();
            int ia = grid_.vertex_index(e.a);
            int ib = grid_.vertex_index(e.b);
            out.reserve(2 * m - 3);
            for (int v = 0; v < m; ++v) {
                if (v == ia) continue;
                out.push_back(grid_.pair_index(canonical_pair(e.a, grid_.vertex_at(v))));
            }
            for (int v = 0; v < m; ++v) {
                if (v == ib || v == ia) continue;
                out.push_back(grid_.pair_index(canonical_pair(e.b, grid_.vertex_at(v))));
            }
            std::sort(out.begin(), out.end());
            break;
        }
        case SchedulerFamily::Custom:
            out.reserve(rows_[from].size());
            for (const auto& e : rows_[from])
                if (e.weight > 0.0) out.push_back(e.to);
            break;
    }
    return out;
}

std::vector<SchedulerRowEntry> SchedulerSpec::row(int from) const {
    if (family_ == SchedulerFamily::Custom) return rows_[from];
    std::vector<SchedulerRowEntry> out;
    for (int to : support(from)) out.push_back({to, weight(from, to)});
    return out;
}

int SchedulerSpec::contagion_sample(int from, double u) const {
    if (u < self_weight_) return from;
    Pair e = pair_at(from);
    int m = grid_.num_vertices();
    int ia = grid_.vertex_index(e.a);
    int ib = grid_.vertex_index(e.b);
    int others = 2 * m - 4;
    int k = static_cast<int>((u - self_weight_) / (1.0 - self_weight_) * others);
    if (k >= others) k = others - 1;
    int lo = std::min(ia, ib), hi = std::max(ia, ib);
    Vertex anchor = (k < m - 2) ? e.a : e.b;
    int j = (k < m - 2) ? k : k - (m - 2);
    Vertex partner = grid_.vertex_at(kth_vertex_excluding(j, lo, hi));
    return grid_.pair_index(canonical_pair(anchor, partner));
}

int SchedulerSpec::sample(int from, double u) const {
    switch (family_) {
        case SchedulerFamily::UniformAll: {
            int k = static_cast<int>(u * num_pairs_);
            return k < num_pairs_ ? k : num_pairs_ - 1;
        }
        case SchedulerFamily::Contagion:
            return contagion_sample(from, u);
        case SchedulerFamily::Custom: {
            const auto& cum = cumulative_[from];
            if (cum.empty())
                throw std::logic_error("sampling from an empty scheduler row");
            double target = u * cum.back();
            auto it = std::upper_bound(cum.begin(), cum.end(), target);
            size_t k = std::min<size_t>(it - cum.begin(), cum.size() - 1);
            return rows_[from][k].to;
        }
    }
    return from;
}

Pair SchedulerSpec::next_pair(const Pair& current, Rng& rng) const {
    return pair_at(sample(pair_index(current), uniform_unit(rng)));
}

std::string to_string(SchedulerViolation::Kind kind) {
    switch (kind) {
        case SchedulerViolation::Kind::NonStochasticRow: return "NonStochasticRow";
        case SchedulerViolation::Kind::MissingSelfSupport: return "MissingSelfSupport";
        case SchedulerViolation::Kind::AsymmetricSupport: return "AsymmetricSupport";
        case SchedulerViolation::Kind::DisconnectedSupport: return "DisconnectedSupport";
    }
    return "?";
}

namespace {

std::string pair_text(const TorusGrid& grid, int index) {
    Pair p = grid.pair_at(index);
    std::ostringstream os;
    os << "{(" << p.a.row << "," << p.a.col << "),(" << p.b.row << "," << p.b.col << ")}";
    return os.str();
}

} // namespace

std::vector<SchedulerViolation> SchedulerSpec::validate() const {
    std::vector<SchedulerViolation> out;
    for (int i = 0; i < num_pairs_; ++i) {
        auto entries = row(i);
        double sum = 0.0;
        bool negative = false;
        bool self = false;
        for (const auto& e : entries) {
            sum += e.weight;
            if (e.weight < 0.0) negative = true;
            if (e.to == i && e.weight > 0.0) self = true;
        }
        if (negative || std::abs(sum - 1.0) > kRowSumTol) {
            std::ostringstream os;
            os << "row " << pair_text(grid_, i) << " sums to " << sum
               << (negative ? " with negative weights" : "");
            out.push_back({SchedulerViolation::Kind::NonStochasticRow, i, -1, os.str()});
        }
        if (!self) {
            out.push_back({SchedulerViolation::Kind::MissingSelfSupport, i, -1,
                           "row " + pair_text(grid_, i) + " gives no weight to its own pair"});
        }
        for (const auto& e : entries) {
            if (e.weight > 0.0 && weight(e.to, i) <= 0.0) {
                out.push_back({SchedulerViolation::Kind::AsymmetricSupport, i, e.to,
                               "weight " + pair_text(grid_, i) + " -> " + pair_text(grid_, e.to) +
                                   " is positive but the reverse is zero"});
            }
        }
    }

    // Strong connectivity; support symmetry makes one BFS sufficient.
    std::vector<char> seen(num_pairs_, 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    int reached = 1;
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        for (int to : support(cur)) {
            if (!seen[to]) {
                seen[to] = 1;
                ++reached;
                queue.push_back(to);
            }
        }
    }
    if (reached != num_pairs_) {
        std::ostringstream os;
        os << "support digraph reaches only " << reached << " of " << num_pairs_ << " pairs";
        out.push_back({SchedulerViolation::Kind::DisconnectedSupport, -1, -1, os.str()});
    }
    return out;
}

SchedulerSpec load_scheduler_file(const TorusGrid& grid, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scheduler file: " + path);

    std::vector<std::vector<SchedulerRowEntry>> rows(grid.num_pairs());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        int ar, ac, br, bc, fr, fc, gr, gc;
        double w;
        if (!(ls >> ar)) continue;  // blank or comment-only line
        if (!(ls >> ac >> br >> bc >> fr >> fc >> gr >> gc >> w)) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 8 coordinates and a weight");
        }
        std::string rest;
        if (ls >> rest)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": trailing tokens");
        Vertex ea{ar, ac}, eb{br, bc}, fa{fr, fc}, fb{gr, gc};
        for (const Vertex& v : {ea, eb, fa, fb})
            if (!grid.contains(v))
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": vertex outside the grid");
        if (w < 0.0)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": negative weight");
        int from = grid.pair_index(canonical_pair(ea, eb));
        int to = grid.pair_index(canonical_pair(fa, fb));
        auto& row = rows[from];
        auto it = std::find_if(row.begin(), row.end(),
                               [to](const SchedulerRowEntry& e) { return e.to == to; });
        if (it != row.end()) it->weight += w;
        else row.push_back({to, w});
    }

    // Renormalize rows that are stochastic up to accumulated rounding;
    // clearly non-stochastic rows stay as-is and fail validate().
    for (auto& row : rows) {
        double sum = 0.0;
        for (const auto& e : row) sum += e.weight;
        if (!row.empty() && std::abs(sum - 1.0) <= 1e-9 && sum > 0.0)
            for (auto& e : row) e.weight /= sum;
    }
    return SchedulerSpec::custom(grid, std::move(rows));
}

} // namespace schelling
