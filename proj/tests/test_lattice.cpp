#include <doctest.h>

#include <algorithm>
#include <set>

#include "schelling/lattice.hpp"

using namespace schelling;

TEST_CASE("grid construction rejects sides below 3") {
    CHECK_THROWS_AS(TorusGrid(2), std::invalid_argument);
    CHECK_THROWS_AS(TorusGrid(0), std::invalid_argument);
    CHECK_NOTHROW(TorusGrid(3));
}

TEST_CASE("neighbors follow left, right, up, down with wrap-around") {
    TorusGrid g3(3);
    auto n = g3.neighbors({0, 0});
    CHECK(n[0] == Vertex{0, 2});
    CHECK(n[1] == Vertex{0, 1});
    CHECK(n[2] == Vertex{2, 0});
    CHECK(n[3] == Vertex{1, 0});

    TorusGrid g4(4);
    auto m = g4.neighbors({2, 2});
    CHECK(m[0] == Vertex{2, 1});
    CHECK(m[1] == Vertex{2, 3});
    CHECK(m[2] == Vertex{1, 2});
    CHECK(m[3] == Vertex{3, 2});
}

TEST_CASE("neighborhoods are distinct, exclude the center, and are symmetric") {
    for (int side : {3, 4, 5, 6}) {
        TorusGrid grid(side);
        for (int i = 0; i < grid.num_vertices(); ++i) {
            Vertex v = grid.vertex_at(i);
            auto ns = grid.neighbors(v);
            std::set<std::pair<int, int>> unique;
            for (const Vertex& u : ns) {
                CHECK(u != v);
                unique.insert({u.row, u.col});
                auto back = grid.neighbors(u);
                CHECK(std::count(back.begin(), back.end(), v) == 1);
            }
            CHECK(unique.size() == 4);
        }
    }
}

TEST_CASE("all_pairs counts and canonical ordering") {
    TorusGrid g3(3);
    auto pairs3 = g3.all_pairs();
    CHECK(pairs3.size() == 36);
    CHECK(TorusGrid(4).all_pairs().size() == 120);
    CHECK(std::is_sorted(pairs3.begin(), pairs3.end()));
    for (const Pair& p : pairs3) CHECK(p.a < p.b);
}

TEST_CASE("edges: count, mutual adjacency, subset of all pairs") {
    for (int side : {3, 4}) {
        TorusGrid grid(side);
        auto edges = grid.edges();
        CHECK(static_cast<int>(edges.size()) == 2 * side * side);
        auto pairs = grid.all_pairs();
        for (const Pair& e : edges) {
            auto na = grid.neighbors(e.a);
            auto nb = grid.neighbors(e.b);
            CHECK(std::count(na.begin(), na.end(), e.b) == 1);
            CHECK(std::count(nb.begin(), nb.end(), e.a) == 1);
            CHECK(std::binary_search(pairs.begin(), pairs.end(), e));
        }
        std::set<Pair> unique(edges.begin(), edges.end());
        CHECK(unique.size() == edges.size());
    }
}

TEST_CASE("pair_index and pair_at invert each other and match all_pairs") {
    for (int side : {3, 4, 5}) {
        TorusGrid grid(side);
        auto pairs = grid.all_pairs();
        for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
            CHECK(grid.pair_index(pairs[i]) == i);
            CHECK(grid.pair_at(i) == pairs[i]);
        }
    }
}

TEST_CASE("canonical_pair orders endpoints and rejects loops") {
    CHECK(canonical_pair({1, 2}, {0, 1}) == Pair{{0, 1}, {1, 2}});
    CHECK(canonical_pair({0, 1}, {1, 2}) == Pair{{0, 1}, {1, 2}});
    CHECK_THROWS_AS(canonical_pair({1, 1}, {1, 1}), std::invalid_argument);
}

TEST_CASE("vertex linearization is row-major") {
    TorusGrid grid(4);
    CHECK(grid.vertex_index({2, 3}) == 11);
    CHECK(grid.vertex_at(11) == Vertex{2, 3});
    CHECK(grid.wrap(-1, 4) == Vertex{3, 0});
}
