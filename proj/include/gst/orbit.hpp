#pragma once

// Local-complementation orbits: closure enumeration with isomorphism dedup,
// LC-equivalence tests, intra-orbit path finding, and the LC-orbit
// classification of all small connected graphs.

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "gst/graph.hpp"

namespace gst {

// Dedup container keyed by WL hash with exact isomorphism inside buckets.
struct GraphSet {
    std::vector<Graph> items;
    std::unordered_map<uint64_t, std::vector<uint32_t>> buckets;

    std::optional<uint32_t> find(const Graph& g) const {
        auto it = buckets.find(wl_hash(g).value);
        if (it == buckets.end()) return std::nullopt;
        for (uint32_t idx : it->second)
            if (isomorphic(items[idx], g)) return idx;
        return std::nullopt;
    }

    // returns (index, inserted)
    std::pair<uint32_t, bool> insert(const Graph& g) {
        auto& bucket = buckets[wl_hash(g).value];
        for (uint32_t idx : bucket)
            if (isomorphic(items[idx], g)) return {idx, false};
        uint32_t idx = static_cast<uint32_t>(items.size());
        bucket.push_back(idx);
        items.push_back(g);
        return {idx, true};
    }

    size_t size() const { return items.size(); }
};

// LC closure of g up to isomorphism. members[0] == g; deterministic BFS order
// (queue order, LC vertex ascending).
inline std::vector<Graph> enumerate_orbit(const Graph& g) {
    GraphSet set;
    set.insert(g);
    for (uint32_t head = 0; head < set.size(); ++head) {
        const Graph cur = set.items[head];  // copy: items may reallocate
        for (int v = 0; v < cur.n; ++v) set.insert(local_complement(cur, v));
    }
    return std::move(set.items);
}

inline bool lc_equivalent(const Graph& a, const Graph& b) {
    if (a.n != b.n) return false;
    GraphSet set;
    set.insert(a);
    for (uint32_t head = 0; head < set.size(); ++head) {
        if (isomorphic(set.items[head], b)) return true;
        const Graph cur = set.items[head];
        for (int v = 0; v < cur.n; ++v) set.insert(local_complement(cur, v));
    }
    return false;
}

// LC steps within an orbit. Applying `steps` (in order) to `from` yields a
// labeled graph W with relabel(W, map) == to exactly.
struct LcPath {
    std::vector<uint8_t> steps;
    VertexMap map;
};

inline std::optional<LcPath> lc_path(const Graph& from, const Graph& to) {
    if (from.n != to.n) return std::nullopt;
    GraphSet set;
    std::vector<std::pair<int32_t, uint8_t>> parent;  // (parent index, lc vertex)
    set.insert(from);
    parent.push_back({-1, 0});
    for (uint32_t head = 0; head < set.size(); ++head) {
        if (auto wit = isomorphic(set.items[head], to)) {
            LcPath path;
            path.map = *wit;
            for (int32_t at = head; parent[at].first >= 0; at = parent[at].first)
                path.steps.push_back(parent[at].second);
            std::reverse(path.steps.begin(), path.steps.end());
            return path;
        }
        const Graph cur = set.items[head];
        for (int v = 0; v < cur.n; ++v) {
            auto [idx, fresh] = set.insert(local_complement(cur, v));
            if (fresh) parent.push_back({static_cast<int32_t>(head), static_cast<uint8_t>(v)});
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Small-graph enumeration (oracle-grade; used by the classification op and by
// tests). Vertex augmentation with hash+iso dedup.

inline std::vector<Graph> enumerate_graphs(int n) {
    assert(n >= 1 && n <= 10);
    GraphSet cur;
    cur.insert(Graph(1));
    for (int k = 2; k <= n; ++k) {
        GraphSet next;
        for (const Graph& g : cur.items) {
            Graph ext(k);
            for (int v = 0; v < k - 1; ++v) ext.adj[v] = g.adj[v];
            for (uint32_t mask = 0; mask < (1u << (k - 1)); ++mask) {
                ext.adj[k - 1] = mask;
                for (int v = 0; v < k - 1; ++v)
                    ext.adj[v] = (ext.adj[v] & ~(1u << (k - 1))) | (((mask >> v) & 1u) << (k - 1));
                next.insert(ext);
            }
        }
        cur = std::move(next);
    }
    return std::move(cur.items);
}

inline std::vector<Graph> enumerate_connected_graphs(int n) {
    std::vector<Graph> out;
    for (const Graph& g : enumerate_graphs(n))
        if (g.is_connected()) out.push_back(g);
    return out;
}

// Partitions all connected graphs on n vertices into LC orbits; returns the
// orbit count (1, 1, 2, 4, 11, 26, 101 for n = 2..8).
inline int classify_all_connected(int n) {
    GraphSet all;
    for (const Graph& g : enumerate_connected_graphs(n)) all.insert(g);
    std::vector<bool> assigned(all.size(), false);
    int orbits = 0;
    for (uint32_t i = 0; i < all.size(); ++i) {
        if (assigned[i]) continue;
        ++orbits;
        for (const Graph& m : enumerate_orbit(all.items[i])) {
            auto idx = all.find(m);
            assert(idx && "orbit member missing from enumeration");
            if (idx) assigned[*idx] = true;
        }
    }
    return orbits;
}

}  // namespace gst
