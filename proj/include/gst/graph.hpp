#pragma once

// Labeled simple undirected graphs on up to 24 vertices, stored as one
// bit-packed neighbor mask per vertex. Everything downstream (orbit
// enumeration, the tablebase builder, fusion rewrites) lives on these ops,
// so they are kept allocation-free where it matters.

#include <algorithm>
#include <array>
#include <bit>
#include <cassert>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#if defined(__BMI2__)
#include <immintrin.h>
#endif

namespace gst {

inline constexpr int kMaxVertices = 24;

// map[src] = dst. Injective when produced by isomorphism search.
using VertexMap = std::vector<uint8_t>;

inline VertexMap identity_map(int n) {
    VertexMap m(n);
    for (int i = 0; i < n; ++i) m[i] = static_cast<uint8_t>(i);
    return m;
}

inline VertexMap inverse_map(const VertexMap& m) {
    VertexMap inv(m.size());
    for (size_t i = 0; i < m.size(); ++i) inv[m[i]] = static_cast<uint8_t>(i);
    return inv;
}

// compose: v -> second[first[v]]
inline VertexMap compose_maps(const VertexMap& first, const VertexMap& second) {
    VertexMap out(first.size());
    for (size_t i = 0; i < first.size(); ++i) out[i] = second[first[i]];
    return out;
}

struct Graph {
    uint8_t n = 0;
    std::array<uint32_t, kMaxVertices> adj{};

    Graph() = default;
    explicit Graph(int nv) : n(static_cast<uint8_t>(nv)) { assert(nv >= 0 && nv <= kMaxVertices); }

    static Graph from_edges(int nv, std::initializer_list<std::pair<int, int>> edges) {
        Graph g(nv);
        for (auto [a, b] : edges) g.add_edge(a, b);
        return g;
    }

    bool has_edge(int i, int j) const { return (adj[i] >> j) & 1u; }
    void add_edge(int i, int j) {
        assert(i != j && i < n && j < n);
        adj[i] |= 1u << j;
        adj[j] |= 1u << i;
    }
    void toggle_edge(int i, int j) {
        assert(i != j && i < n && j < n);
        adj[i] ^= 1u << j;
        adj[j] ^= 1u << i;
    }
    int degree(int v) const { return std::popcount(adj[v]); }
    int edge_count() const {
        int s = 0;
        for (int v = 0; v < n; ++v) s += degree(v);
        return s / 2;
    }
    uint32_t vertex_mask() const { return n == 32 ? ~0u : (1u << n) - 1; }

    bool is_valid() const {
        if (n > kMaxVertices) return false;
        for (int i = 0; i < n; ++i) {
            if (adj[i] & ~vertex_mask()) return false;
            if ((adj[i] >> i) & 1u) return false;
            for (int j = 0; j < n; ++j)
                if (has_edge(i, j) != has_edge(j, i)) return false;
        }
        return true;
    }

    bool is_connected() const {
        if (n == 0) return false;
        uint32_t seen = 1u, frontier = 1u;
        while (frontier) {
            uint32_t next = 0;
            for (uint32_t f = frontier; f;) {
                int v = std::countr_zero(f);
                f &= f - 1;
                next |= adj[v];
            }
            frontier = next & ~seen;
            seen |= next;
        }
        return seen == vertex_mask();
    }

    // mask of the connected component containing v
    uint32_t component_of(int v) const {
        uint32_t seen = 1u << v, frontier = seen;
        while (frontier) {
            uint32_t next = 0;
            for (uint32_t f = frontier; f;) {
                int u = std::countr_zero(f);
                f &= f - 1;
                next |= adj[u];
            }
            frontier = next & ~seen;
            seen |= next;
        }
        return seen;
    }

    std::array<uint8_t, kMaxVertices> sorted_degrees() const {
        std::array<uint8_t, kMaxVertices> d{};
        for (int v = 0; v < n; ++v) d[v] = static_cast<uint8_t>(degree(v));
        std::sort(d.begin(), d.begin() + n);
        return d;
    }

    bool operator==(const Graph& o) const {
        if (n != o.n) return false;
        for (int i = 0; i < n; ++i)
            if (adj[i] != o.adj[i]) return false;
        return true;
    }
};

// g relabeled so that old vertex v becomes map[v]; map must be a bijection on 0..n-1.
inline Graph relabel(const Graph& g, const VertexMap& map) {
    assert(map.size() == g.n);
    Graph out(g.n);
    for (int v = 0; v < g.n; ++v) {
        uint32_t row = 0;
        for (uint32_t m = g.adj[v]; m;) {
            int u = std::countr_zero(m);
            m &= m - 1;
            row |= 1u << map[u];
        }
        out.adj[map[v]] = row;
    }
    return out;
}

// squeeze bits of `mask` through `keep` (bit i of result = bit of i-th set position of keep)
inline uint32_t squeeze_bits(uint32_t mask, uint32_t keep) {
#if defined(__BMI2__)
    return _pext_u32(mask, keep);
#else
    uint32_t out = 0;
    int pos = 0;
    while (keep) {
        int v = std::countr_zero(keep);
        keep &= keep - 1;
        out |= ((mask >> v) & 1u) << pos;
        ++pos;
    }
    return out;
#endif
}

// Induced subgraph on the vertices of keep_mask, relabeled densely in
// increasing original order.
inline Graph induced_subgraph(const Graph& g, uint32_t keep_mask) {
    assert(keep_mask && !(keep_mask & ~g.vertex_mask()));
    Graph out(std::popcount(keep_mask));
    int idx = 0;
    for (uint32_t m = keep_mask; m;) {
        int v = std::countr_zero(m);
        m &= m - 1;
        out.adj[idx++] = squeeze_bits(g.adj[v] & keep_mask, keep_mask);
    }
    return out;
}

inline Graph disjoint_union(const Graph& a, const Graph& b) {
    assert(a.n + b.n <= kMaxVertices);
    Graph out(a.n + b.n);
    for (int v = 0; v < a.n; ++v) out.adj[v] = a.adj[v];
    for (int v = 0; v < b.n; ++v) out.adj[a.n + v] = b.adj[v] << a.n;
    return out;
}

// Local complementation at a: toggles all edges among N(a). Involution.
inline Graph local_complement(const Graph& g, int a) {
    assert(a < g.n);
    Graph out = g;
    const uint32_t na = g.adj[a];
    for (uint32_t m = na; m;) {
        int v = std::countr_zero(m);
        m &= m - 1;
        out.adj[v] ^= na & ~(1u << v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Weisfeiler-Lehman hashing

struct GraphHash {
    uint64_t value = 0;
    bool operator==(const GraphHash&) const = default;
};

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t hash_fold(uint64_t h, uint64_t x) { return splitmix64(h ^ (x * 0xff51afd7ed558ccdull)); }

// Color-refinement hash, 3 iterations by default, seeded with degrees and
// mixed with n. Invariant under vertex relabeling; collisions between
// non-isomorphic graphs are allowed and resolved by bucket lists downstream.
inline GraphHash wl_hash(const Graph& g, int iterations = 3) {
    uint64_t color[kMaxVertices];
    uint64_t next[kMaxVertices];
    uint64_t buf[kMaxVertices];
    const int n = g.n;
    for (int v = 0; v < n; ++v) color[v] = splitmix64(0x5eedull + g.degree(v));
    for (int it = 0; it < iterations; ++it) {
        for (int v = 0; v < n; ++v) {
            int k = 0;
            for (uint32_t m = g.adj[v]; m;) {
                int u = std::countr_zero(m);
                m &= m - 1;
                buf[k++] = color[u];
            }
            std::sort(buf, buf + k);
            uint64_t h = hash_fold(0x77Lu, color[v]);
            for (int i = 0; i < k; ++i) h = hash_fold(h, buf[i]);
            next[v] = h;
        }
        std::copy(next, next + n, color);
    }
    std::sort(color, color + n);
    uint64_t h = splitmix64(0xc0ffee00ull + n);
    for (int v = 0; v < n; ++v) h = hash_fold(h, color[v]);
    return GraphHash{h};
}

// Per-vertex refinement colors (2 rounds), used to prune isomorphism search.
inline void wl_colors(const Graph& g, uint64_t out[], int rounds = 2) {
    uint64_t next[kMaxVertices];
    uint64_t buf[kMaxVertices];
    const int n = g.n;
    for (int v = 0; v < n; ++v) out[v] = splitmix64(0x5eedull + g.degree(v));
    for (int it = 0; it < rounds; ++it) {
        for (int v = 0; v < n; ++v) {
            int k = 0;
            for (uint32_t m = g.adj[v]; m;) {
                int u = std::countr_zero(m);
                m &= m - 1;
                buf[k++] = out[u];
            }
            std::sort(buf, buf + k);
            uint64_t h = hash_fold(0x77Lu, out[v]);
            for (int i = 0; i < k; ++i) h = hash_fold(h, buf[i]);
            next[v] = h;
        }
        std::copy(next, next + n, out);
    }
}

// ---------------------------------------------------------------------------
// Exact isomorphism: color prefilter + ordered backtracking with bitmask
// candidate pruning. Returns a witness map (a-labels -> b-labels) iff the
// graphs are isomorphic.

namespace detail {

struct IsoSearch {
    const Graph& a;
    const Graph& b;
    int n;
    std::array<uint32_t, kMaxVertices> cand{};   // per a-vertex candidate mask in b
    std::array<int, kMaxVertices> order{};       // processing order of a-vertices
    std::array<uint8_t, kMaxVertices> map{};
    uint32_t used = 0;

    bool dfs(int k) {
        if (k == n) return true;
        const int v = order[k];
        uint32_t m = cand[v] & ~used;
        for (int j = 0; j < k; ++j) {
            const int w = order[j];
            if (a.has_edge(v, w))
                m &= b.adj[map[w]];
            else
                m &= ~b.adj[map[w]];
            if (!m) return false;
        }
        while (m) {
            int u = std::countr_zero(m);
            m &= m - 1;
            map[v] = static_cast<uint8_t>(u);
            used |= 1u << u;
            if (dfs(k + 1)) return true;
            used &= ~(1u << u);
        }
        return false;
    }
};

}  // namespace detail

inline std::optional<VertexMap> isomorphic(const Graph& a, const Graph& b) {
    if (a.n != b.n) return std::nullopt;
    const int n = a.n;
    if (n == 0) return VertexMap{};
    if (a == b) return identity_map(n);
    if (a.edge_count() != b.edge_count()) return std::nullopt;
    if (a.sorted_degrees() != b.sorted_degrees()) return std::nullopt;

    uint64_t ca[kMaxVertices], cb[kMaxVertices];
    wl_colors(a, ca);
    wl_colors(b, cb);
    {
        uint64_t sa[kMaxVertices], sb[kMaxVertices];
        std::copy(ca, ca + n, sa);
        std::copy(cb, cb + n, sb);
        std::sort(sa, sa + n);
        std::sort(sb, sb + n);
        if (!std::equal(sa, sa + n, sb)) return std::nullopt;
    }

    detail::IsoSearch s{a, b, n};
    for (int v = 0; v < n; ++v) {
        uint32_t m = 0;
        for (int u = 0; u < n; ++u)
            if (ca[v] == cb[u]) m |= 1u << u;
        if (!m) return std::nullopt;
        s.cand[v] = m;
    }

    // static order: start at the most constrained vertex, then greedily take
    // the vertex with the most already-ordered neighbors (ties: fewer candidates)
    uint32_t placed = 0;
    for (int k = 0; k < n; ++k) {
        int best = -1, bestAdj = -1, bestCand = 1 << 30;
        for (int v = 0; v < n; ++v) {
            if ((placed >> v) & 1u) continue;
            int adjCnt = std::popcount(a.adj[v] & placed);
            int candCnt = std::popcount(s.cand[v]);
            if (adjCnt > bestAdj || (adjCnt == bestAdj && candCnt < bestCand)) {
                best = v;
                bestAdj = adjCnt;
                bestCand = candCnt;
            }
        }
        s.order[k] = best;
        placed |= 1u << best;
    }

    if (!s.dfs(0)) return std::nullopt;
    VertexMap out(n);
    for (int v = 0; v < n; ++v) out[v] = s.map[v];
    return out;
}

// ---------------------------------------------------------------------------
// Caterpillar trees and detached caterpillar sets

// A caterpillar: a tree whose non-leaf vertices form a (possibly empty) path.
inline bool is_caterpillar_tree(const Graph& g) {
    if (g.n == 0 || !g.is_connected()) return false;
    if (g.edge_count() != g.n - 1) return false;  // not a tree
    if (g.n <= 2) return true;
    // strip leaves, remainder must be a path (all degrees <= 2, connected or empty)
    uint32_t leaves = 0;
    for (int v = 0; v < g.n; ++v)
        if (g.degree(v) <= 1) leaves |= 1u << v;
    // a tree minus its leaves stays connected, so max spine degree <= 2 means path
    uint32_t spine = g.vertex_mask() & ~leaves;
    for (uint32_t m = spine; m;) {
        int v = std::countr_zero(m);
        m &= m - 1;
        if (std::popcount(g.adj[v] & spine) > 2) return false;
    }
    return true;
}

inline bool is_caterpillar_forest(const Graph& g) {
    if (g.n == 0) return false;
    uint32_t left = g.vertex_mask();
    while (left) {
        int v = std::countr_zero(left);
        uint32_t comp = g.component_of(v);
        if (!is_caterpillar_tree(induced_subgraph(g, comp))) return false;
        left &= ~comp;
    }
    return true;
}

// All pairwise non-isomorphic caterpillar trees on exactly n vertices.
// Enumerated by spine length and leaf-count composition; the spine is the
// derived path (both endpoints carry at least one leaf), which makes the
// parameterization unique up to reversal.
inline std::vector<Graph> enumerate_caterpillars(int n) {
    assert(n >= 1 && n <= kMaxVertices);
    std::vector<Graph> out;
    if (n == 1) {
        out.push_back(Graph(1));
        return out;
    }
    if (n == 2) {
        out.push_back(Graph::from_edges(2, {{0, 1}}));
        return out;
    }
    std::vector<int> comp;
    for (int s = 1; s < n; ++s) {
        comp.assign(s, 0);
        // enumerate compositions of n-s over s slots
        auto emit = [&]() {
            if (s >= 2 && (comp[0] == 0 || comp[s - 1] == 0)) return;
            if (s == 1 && comp[0] < 2) return;
            // canonical under reversal
            if (std::lexicographical_compare(comp.rbegin(), comp.rend(), comp.begin(), comp.end())) return;
            Graph g(n);
            for (int i = 0; i + 1 < s; ++i) g.add_edge(i, i + 1);
            int next = s;
            for (int i = 0; i < s; ++i)
                for (int c = 0; c < comp[i]; ++c) g.add_edge(i, next++);
            out.push_back(g);
        };
        int rem = n - s;
        auto rec = [&](auto&& self, int pos, int left) -> void {
            if (pos == s - 1) {
                comp[pos] = left;
                emit();
                return;
            }
            for (int c = 0; c <= left; ++c) {
                comp[pos] = c;
                self(self, pos + 1, left - c);
            }
        };
        rec(rec, 0, rem);
    }
    return out;
}

// All pairwise non-isomorphic disjoint unions of >= 2 caterpillar trees with
// total vertex count <= max_total. Multisets are enumerated canonically
// (components in nondecreasing (size, index) order).
inline std::vector<Graph> enumerate_detached_caterpillars(int max_total) {
    assert(max_total >= 1);
    std::vector<std::vector<Graph>> cats(std::max(1, max_total));
    for (int k = 1; k <= max_total - 1; ++k) cats[k] = enumerate_caterpillars(k);
    std::vector<Graph> out;
    std::vector<std::pair<int, int>> chosen;
    auto rec = [&](auto&& self, int budget, int minSize, int minIdx) -> void {
        if (chosen.size() >= 2) {
            Graph g(0);
            for (auto [sz, idx] : chosen) g = disjoint_union(g, cats[sz][idx]);
            out.push_back(g);
        }
        for (int sz = minSize; sz <= std::min(budget, max_total - 1); ++sz) {
            int start = (sz == minSize) ? minIdx : 0;
            for (int idx = start; idx < static_cast<int>(cats[sz].size()); ++idx) {
                chosen.emplace_back(sz, idx);
                self(self, budget - sz, sz, idx);
                chosen.pop_back();
            }
        }
    };
    rec(rec, max_total, 1, 0);
    return out;
}

// ---------------------------------------------------------------------------
// graph6 text format (the standard ASCII encoding; n <= 24 here)

struct ParseError {
    std::string message;
    size_t offset = 0;
};

inline std::string to_graph6(const Graph& g) {
    std::string s;
    s.push_back(static_cast<char>(63 + g.n));
    int bit = 5;
    char cur = 0;
    for (int j = 1; j < g.n; ++j) {
        for (int i = 0; i < j; ++i) {
            if (g.has_edge(i, j)) cur |= static_cast<char>(1 << bit);
            if (--bit < 0) {
                s.push_back(static_cast<char>(63 + cur));
                bit = 5;
                cur = 0;
            }
        }
    }
    if (bit != 5) s.push_back(static_cast<char>(63 + cur));
    return s;
}

inline std::optional<Graph> from_graph6(std::string_view s, ParseError* err = nullptr) {
    auto fail = [&](std::string msg, size_t off) -> std::optional<Graph> {
        if (err) *err = {std::move(msg), off};
        return std::nullopt;
    };
    // optional ">>graph6<<" header
    if (s.starts_with(">>graph6<<")) s.remove_prefix(10);
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return fail("empty graph6 string", 0);
    if (s[0] == 126) return fail("graph6 order > 24 not supported", 0);
    int n = s[0] - 63;
    if (n < 0 || n > kMaxVertices) return fail("vertex count out of range", 0);
    Graph g(n);
    size_t pos = 1;
    int bit = 5;
    int cur = 0;
    auto next_bit = [&](bool& out) -> bool {
        if (bit == 5) {
            if (pos >= s.size()) return false;
            cur = s[pos] - 63;
            if (cur < 0 || cur > 63) return false;
        }
        out = (cur >> bit) & 1;
        if (--bit < 0) {
            bit = 5;
            ++pos;
        }
        return true;
    };
    for (int j = 1; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            bool b = false;
            if (!next_bit(b)) return fail("truncated or invalid graph6 byte", pos);
            if (b) g.add_edge(i, j);
        }
    }
    // remaining padding bits must be zero and no extra bytes may follow
    if (bit != 5) {
        while (bit >= 0) {
            if ((cur >> bit) & 1) return fail("nonzero padding bit", pos);
            --bit;
        }
        ++pos;
    }
    if (pos != s.size()) return fail("trailing bytes after graph6 data", pos);
    return g;
}

}  // namespace gst
