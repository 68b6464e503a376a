#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "schelling/errors.hpp"

namespace schelling {

template <class Cost>
struct InTreeArc {
    int from;
    int to;
    Cost cost;
};

template <class Cost>
struct InTree {
    int root;
    Cost total;
    std::vector<int> arc_of_node;  // chosen out-arc id per node; -1 for the root
};

namespace arborescence_detail {

// Union-find with an undo log; no path compression so rollback stays valid.
class RollbackUnionFind {
public:
    explicit RollbackUnionFind(int n) : parent_(n, -1) {}

    int find(int x) const {
        while (parent_[x] >= 0) x = parent_[x];
        return x;
    }

    int time() const { return static_cast<int>(log_.size()); }

    void rollback(int t) {
        while (static_cast<int>(log_.size()) > t) {
            auto [i, v] = log_.back();
            log_.pop_back();
            parent_[i] = v;
        }
    }

    bool join(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (parent_[a] > parent_[b]) std::swap(a, b);
        log_.emplace_back(a, parent_[a]);
        log_.emplace_back(b, parent_[b]);
        parent_[a] += parent_[b];
        parent_[b] = a;
        return true;
    }

private:
    mutable std::vector<int> parent_;
    std::vector<std::pair<int, int>> log_;
};

// Chu-Liu/Edmonds for a minimum out-arborescence, contraction form with
// lazily-adjusted skew heaps of incoming arcs (O(E log V)). Ties are broken
// by arc id, so results are deterministic.
template <class Cost>
class Solver {
public:
    struct Arc {
        int a;  // tail
        int b;  // head
        Cost w;
        int id;
    };

    struct Result {
        Cost total{};
        std::vector<int> arc_of;  // in-arc id per node, -1 for root; empty unless tree built
        bool aborted = false;
        int unreachable = -1;  // representative node with no incoming arcs, or -1
    };

    // abort_above: give up as soon as the running lower bound exceeds it.
    Result solve(int n, int root, const std::vector<Arc>& arcs, bool build_tree,
                 std::optional<Cost> abort_above) {
        pool_.assign(arcs.size(), Node{});
        pool_used_ = 0;
        std::vector<Node*> heap(n, nullptr);
        for (const Arc& arc : arcs) heap[arc.b] = merge(heap[arc.b], make_node(arc));

        RollbackUnionFind uf(n);
        Result result;
        std::vector<int> seen(n, -1), path(n);
        std::vector<Arc> chosen(n);
        std::vector<Arc> in(n, Arc{-1, -1, Cost{}, -1});
        struct Contraction {
            int supernode;
            int uf_time;
            std::vector<Arc> cycle;
        };
        std::vector<Contraction> contractions;
        seen[root] = root;

        for (int s = 0; s < n; ++s) {
            int u = s, qi = 0;
            while (seen[u] < 0) {
                if (!heap[u]) {
                    result.unreachable = u;
                    return result;
                }
                prop(heap[u]);
                Arc arc = heap[u]->key;
                heap[u]->delta -= arc.w;
                heap[u] = pop(heap[u]);
                chosen[qi] = arc;
                path[qi++] = u;
                seen[u] = s;
                result.total += arc.w;
                if (abort_above && result.total > *abort_above) {
                    result.aborted = true;
                    return result;
                }
                u = uf.find(arc.a);
                if (seen[u] == s) {
                    // Contract the cycle into one supernode and keep growing.
                    Node* merged = nullptr;
                    int end = qi;
                    int t = uf.time();
                    int w;
                    do {
                        merged = merge(merged, heap[w = path[--qi]]);
                    } while (uf.join(u, w));
                    u = uf.find(u);
                    heap[u] = merged;
                    seen[u] = -1;
                    if (build_tree)
                        contractions.push_back(
                            {u, t, std::vector<Arc>(chosen.begin() + qi, chosen.begin() + end)});
                }
            }
            for (int i = 0; i < qi; ++i) in[uf.find(chosen[i].b)] = chosen[i];
        }

        if (build_tree) {
            // Undo contractions newest-first, keeping for each expanded node
            // the cycle arc unless the supernode's in-arc enters it.
            for (auto it = contractions.rbegin(); it != contractions.rend(); ++it) {
                uf.rollback(it->uf_time);
                Arc entering = in[it->supernode];
                for (const Arc& arc : it->cycle) in[uf.find(arc.b)] = arc;
                in[uf.find(entering.b)] = entering;
            }
            result.arc_of.resize(n);
            for (int v = 0; v < n; ++v) result.arc_of[v] = (v == root) ? -1 : in[v].id;
        }
        return result;
    }

private:
    struct Node {
        Arc key{};
        Cost delta{};
        Node* l = nullptr;
        Node* r = nullptr;
    };

    Node* make_node(const Arc& arc) {
        Node* n = &pool_[pool_used_++];
        n->key = arc;
        n->delta = Cost{};
        n->l = n->r = nullptr;
        return n;
    }

    void prop(Node* a) {
        a->key.w += a->delta;
        if (a->l) a->l->delta += a->delta;
        if (a->r) a->r->delta += a->delta;
        a->delta = Cost{};
    }

    static bool key_less(const Node* a, const Node* b) {
        return std::tie(a->key.w, a->key.id) < std::tie(b->key.w, b->key.id);
    }

    // Iterative skew-heap merge; the explicit spine avoids deep recursion.
    Node* merge(Node* a, Node* b) {
        if (!a) return b;
        if (!b) return a;
        spine_.clear();
        while (a && b) {
            prop(a);
            prop(b);
            if (key_less(b, a)) std::swap(a, b);
            spine_.push_back(a);
            a = a->r;
        }
        Node* rest = a ? a : b;
        while (!spine_.empty()) {
            Node* n = spine_.back();
            spine_.pop_back();
            n->r = rest;
            std::swap(n->l, n->r);
            rest = n;
        }
        return rest;
    }

    Node* pop(Node* a) {
        prop(a);
        return merge(a->l, a->r);
    }

    std::vector<Node> pool_;
    std::size_t pool_used_ = 0;
    std::vector<Node*> spine_;
};

// In-trees toward root == out-arborescences from root on the transpose.
template <class Cost>
std::vector<typename Solver<Cost>::Arc> transpose(std::span<const InTreeArc<Cost>> arcs) {
    std::vector<typename Solver<Cost>::Arc> out;
    out.reserve(arcs.size());
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        if (arcs[i].from == arcs[i].to) continue;  // self-loops can never be tree arcs
        out.push_back({arcs[i].to, arcs[i].from, arcs[i].cost, static_cast<int>(i)});
    }
    return out;
}

} // namespace arborescence_detail

// Minimum-cost in-tree: a set of arcs giving every node a unique directed
// path to the root. Throws UnreachableError when no such tree exists.
template <class Cost>
InTree<Cost> min_in_tree(int num_nodes, std::span<const InTreeArc<Cost>> arcs, int root) {
    arborescence_detail::Solver<Cost> solver;
    auto transposed = arborescence_detail::transpose(arcs);
    auto result = solver.solve(num_nodes, root, transposed, true, std::nullopt);
    if (result.unreachable >= 0) throw UnreachableError(result.unreachable);
    return {root, result.total, std::move(result.arc_of)};
}

// Cost-only variant with an optional abort bound; nullopt when the running
// lower bound exceeded the budget. Throws UnreachableError as above.
template <class Cost>
std::optional<Cost> min_in_tree_cost(int num_nodes, std::span<const InTreeArc<Cost>> arcs,
                                     int root, std::optional<Cost> abort_above = std::nullopt) {
    arborescence_detail::Solver<Cost> solver;
    auto transposed = arborescence_detail::transpose(arcs);
    auto result = solver.solve(num_nodes, root, transposed, false, abort_above);
    if (result.unreachable >= 0) throw UnreachableError(result.unreachable);
    if (result.aborted) return std::nullopt;
    return result.total;
}

} // namespace schelling
