#pragma once

// Graph-theoretic fusion bounds: GF(2) cut rank (= stabilizer entanglement
// entropy of the bipartition), the height function over an emission ordering,
// the min-max height n_s^min (= linear rank width, exact by subset DP), and
// the climb upper bound. The subgraph lower bound queries the tablebase.

#include <random>
#include <vector>

#include "gst/graph.hpp"
#include "gst/tablebase.hpp"

namespace gst {

// GF(2) rank of the adjacency block between part and its complement.
inline int cut_rank(const Graph& g, uint32_t part) {
    const uint32_t other = g.vertex_mask() & ~part;
    uint32_t basis[kMaxVertices];
    int rank = 0;
    for (uint32_t m = part; m;) {
        int v = std::countr_zero(m);
        m &= m - 1;
        uint32_t r = g.adj[v] & other;
        for (int j = 0; j < rank; ++j) {
            uint32_t top = 1u << (31 - std::countl_zero(basis[j]));
            if (r & top) r ^= basis[j];
        }
        if (r) basis[rank++] = r;
    }
    return rank;
}

// h(G, p, k) for k = 0..n given an ordering p of the vertices.
inline std::vector<int> height_profile(const Graph& g, const std::vector<int>& order) {
    std::vector<int> h(g.n + 1, 0);
    uint32_t part = 0;
    for (int k = 0; k < g.n; ++k) {
        part |= 1u << order[k];
        h[k + 1] = cut_rank(g, part);
    }
    return h;
}

namespace detail {

// cut ranks for every vertex subset; n <= 16 keeps this at 65536 entries
inline std::vector<uint8_t> all_cut_ranks(const Graph& g) {
    std::vector<uint8_t> r(size_t{1} << g.n);
    for (uint32_t A = 1; A < r.size(); ++A) r[A] = static_cast<uint8_t>(cut_rank(g, A));
    return r;
}

}  // namespace detail

struct BoundResult {
    int value = 0;
    bool exact = true;
};

inline constexpr int kExactSubsetDpLimit = 16;

// n_s^min = min over orderings of the height maximum. Exact via DP over
// vertex subsets up to kExactSubsetDpLimit vertices; beyond that a sampled
// ordering search gives an upper bound flagged inexact.
inline BoundResult ns_min(const Graph& g, int samples = 2000) {
    if (g.n == 0) return {0, true};
    if (g.n <= kExactSubsetDpLimit) {
        auto r = detail::all_cut_ranks(g);
        std::vector<uint8_t> f(r.size());
        for (uint32_t A = 1; A < f.size(); ++A) {
            uint8_t best = 0xff;
            for (uint32_t m = A; m;) {
                int v = std::countr_zero(m);
                m &= m - 1;
                best = std::min(best, f[A & ~(1u << v)]);
            }
            f[A] = std::max(best, r[A]);
        }
        return {f[f.size() - 1], true};
    }
    std::mt19937_64 rng(0x5eedb01dull);
    std::vector<int> order(g.n);
    for (int i = 0; i < g.n; ++i) order[i] = i;
    int best = g.n;
    for (int s = 0; s < samples; ++s) {
        std::shuffle(order.begin(), order.end(), rng);
        auto h = height_profile(g, order);
        best = std::min(best, *std::max_element(h.begin(), h.end()));
    }
    return {best, false};
}

// clmb(G, n_s): min over orderings of the number of height-profile moves with
// an endpoint above the baseline n_s. Exact by shortest-path DP over subsets.
inline BoundResult climb(const Graph& g, int ns, int samples = 2000) {
    if (g.n == 0) return {0, true};
    if (g.n <= kExactSubsetDpLimit) {
        auto r = detail::all_cut_ranks(g);
        std::vector<uint16_t> cost(r.size(), 0xffff);
        cost[0] = 0;
        for (uint32_t A = 1; A < cost.size(); ++A) {
            uint16_t best = 0xffff;
            const int rA = r[A];
            for (uint32_t m = A; m;) {
                int v = std::countr_zero(m);
                m &= m - 1;
                const uint32_t prev = A & ~(1u << v);
                const int rp = r[prev];
                uint16_t step = static_cast<uint16_t>(rp != rA && (rp > ns || rA > ns) ? 1 : 0);
                best = std::min<uint16_t>(best, static_cast<uint16_t>(cost[prev] + step));
            }
            cost[A] = best;
        }
        return {cost[cost.size() - 1], true};
    }
    std::mt19937_64 rng(0xc11b0137ull);
    std::vector<int> order(g.n);
    for (int i = 0; i < g.n; ++i) order[i] = i;
    int best = 1 << 20;
    for (int s = 0; s < samples; ++s) {
        std::shuffle(order.begin(), order.end(), rng);
        auto h = height_profile(g, order);
        int c = 0;
        for (int k = 0; k < g.n; ++k)
            if (h[k] != h[k + 1] && (h[k] > ns || h[k + 1] > ns)) ++c;
        best = std::min(best, c);
    }
    return {best, false};
}

// Max table depth over induced subgraphs of g that resolve in the table: a
// lower bound on the fusion count of g. Subsets are visited size-descending
// with memoized misses; a work budget keeps very large inputs bounded (the
// result is a valid lower bound either way).
inline int subgraph_lower_bound(const Tablebase& tb, const Graph& g,
                                uint64_t subset_budget = 4000000) {
    int maxdepth = 0, max_tn = 0;
    for (const Orbit& o : tb.orbits) {
        maxdepth = std::max<int>(maxdepth, o.depth);
        max_tn = std::max<int>(max_tn, o.n);
    }
    int best = 0;
    GraphSet seen;
    for (int size = std::min<int>(g.n, max_tn); size >= 1 && best < maxdepth; --size) {
        uint32_t comb = (1u << size) - 1;
        const uint32_t limit = 1u << g.n;
        while (comb < limit && best < maxdepth) {
            if (subset_budget-- == 0) return best;
            Graph sub = induced_subgraph(g, comb);
            if (seen.insert(sub).second) {
                if (auto hit = tb.lookup(sub))
                    best = std::max(best, static_cast<int>(tb.orbits[hit->orbit].depth));
            }
            // Gosper's hack: next subset of the same size
            uint32_t c = comb & (~comb + 1);
            uint32_t r = comb + c;
            if (r >= limit || c == 0) break;
            comb = (((r ^ comb) >> 2) / c) | r;
        }
    }
    return best;
}

}  // namespace gst
