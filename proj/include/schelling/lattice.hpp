#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace schelling {

struct Vertex {
    int row = 0;
    int col = 0;

    friend bool operator==(const Vertex&, const Vertex&) = default;
    friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

// Unordered pair of distinct vertices, stored with a < b so each pair has a
// single representation.
struct Pair {
    Vertex a;
    Vertex b;

    friend bool operator==(const Pair&, const Pair&) = default;
    friend auto operator<=>(const Pair&, const Pair&) = default;
};

inline Pair canonical_pair(Vertex u, Vertex v) {
    if (u == v) throw std::invalid_argument("pair endpoints must be distinct");
    return (u < v) ? Pair{u, v} : Pair{v, u};
}

// n x n lattice with periodic boundaries. n >= 3 so every four-point
// neighborhood has four distinct members.
class TorusGrid {
public:
    explicit TorusGrid(int n) : n_(n) {
        if (n < 3) throw std::invalid_argument("torus side must be at least 3");
    }

    int side() const { return n_; }
    int num_vertices() const { return n_ * n_; }
    int num_edges() const { return 2 * n_ * n_; }
    int num_pairs() const {
        int m = num_vertices();
        return m * (m - 1) / 2;
    }

    int vertex_index(Vertex v) const { return v.row * n_ + v.col; }

    Vertex vertex_at(int index) const { return {index / n_, index % n_}; }

    Vertex wrap(int row, int col) const {
        row %= n_; if (row < 0) row += n_;
        col %= n_; if (col < 0) col += n_;
        return {row, col};
    }

    bool contains(Vertex v) const {
        return v.row >= 0 && v.row < n_ && v.col >= 0 && v.col < n_;
    }

    // Four-point neighborhood in the order left, right, up, down.
    std::array<Vertex, 4> neighbors(Vertex v) const {
        return {wrap(v.row, v.col - 1), wrap(v.row, v.col + 1),
                wrap(v.row - 1, v.col), wrap(v.row + 1, v.col)};
    }

    bool adjacent(Vertex u, Vertex v) const {
        for (const Vertex& w : neighbors(u))
            if (w == v) return true;
        return false;
    }

    // Position of a canonical pair in the all_pairs() enumeration:
    // pairs (a, b) with a < b as linear indices, ordered lexicographically.
    int pair_index(const Pair& p) const {
        int m = num_vertices();
        int a = vertex_index(p.a);
        int b = vertex_index(p.b);
        return a * m - a * (a + 1) / 2 + (b - a - 1);
    }

    Pair pair_at(int index) const {
        int m = num_vertices();
        // Invert the triangular indexing; start from the float estimate and
        // fix up, so this stays O(1) for large grids.
        int a = static_cast<int>(m - 0.5 - std::sqrt((m - 0.5) * (m - 0.5) - 2.0 * index));
        if (a < 0) a = 0;
        while (a > 0 && a * m - a * (a + 1) / 2 > index) --a;
        while ((a + 1) * m - (a + 1) * (a + 2) / 2 <= index) ++a;
        int b = index - (a * m - a * (a + 1) / 2) + a + 1;
        return {vertex_at(a), vertex_at(b)};
    }

    // All unordered pairs of distinct vertices, canonical order.
    std::vector<Pair> all_pairs() const {
        int m = num_vertices();
        std::vector<Pair> out;
        out.reserve(num_pairs());
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b)
                out.push_back({vertex_at(a), vertex_at(b)});
        return out;
    }

    // The 2n^2 lattice-adjacent pairs, canonical order.
    std::vector<Pair> edges() const {
        std::vector<Pair> out;
        out.reserve(num_edges());
        for (int i = 0; i < num_vertices(); ++i) {
            Vertex v = vertex_at(i);
            out.push_back(canonical_pair(v, wrap(v.row, v.col + 1)));
            out.push_back(canonical_pair(v, wrap(v.row + 1, v.col)));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    int n_;
};

} // namespace schelling
