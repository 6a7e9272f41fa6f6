#pragma once

// Success branch of the type-II fusion: measure a pair of commuting two-qubit
// parities on (a, b), delete both qubits, and express the result as a graph
// plus a local Clifford frame. The tableau pipeline defines the semantics;
// for the default parity pair XZ^ZX on non-adjacent endpoints a pure graph
// rewrite (validated exhaustively against the pipeline) is used instead.

#include <cstdlib>
#include <optional>

#include "gst/graph.hpp"
#include "gst/pauli.hpp"
#include "gst/tableau.hpp"

namespace gst {

// The five parity-pair columns realizable by a linear-optics Bell measurement
// rotated with local Cliffords.
enum class FusionKind : uint8_t {
    XZ_ZX = 0,  // default: X_A Z_B and Z_A X_B
    XX_ZZ,
    XY_YX,
    YZ_ZY,
    XY_YZ,
};
inline constexpr FusionKind kAllFusionKinds[5] = {FusionKind::XZ_ZX, FusionKind::XX_ZZ,
                                                  FusionKind::XY_YX, FusionKind::YZ_ZY,
                                                  FusionKind::XY_YZ};

inline std::pair<Pauli, Pauli> fusion_parities(FusionKind kind, int a, int b) {
    const uint32_t A = 1u << a, B = 1u << b;
    auto X = [](uint32_t m) { return Pauli{m, 0, 0}; };
    auto Z = [](uint32_t m) { return Pauli{0, m, 0}; };
    auto Y = [](uint32_t m) { return Pauli{m, m, 1}; };
    auto mul = [](Pauli p, Pauli q) { return pauli_mul(p, q); };
    switch (kind) {
        case FusionKind::XZ_ZX: return {mul(X(A), Z(B)), mul(Z(A), X(B))};
        case FusionKind::XX_ZZ: return {mul(X(A), X(B)), mul(Z(A), Z(B))};
        case FusionKind::XY_YX: return {mul(X(A), Y(B)), mul(Y(A), X(B))};
        case FusionKind::YZ_ZY: return {mul(Y(A), Z(B)), mul(Z(A), Y(B))};
        case FusionKind::XY_YZ: return {mul(X(A), Y(B)), mul(Y(A), Z(B))};
    }
    return {};
}

enum class FuseStatus : uint8_t {
    ok = 0,
    bad_vertices,       // a == b or out of range
    endpoint_isolated,  // deg(a) == 0 or deg(b) == 0: acts as single-qubit measurements
    isolated_pair,      // a-b form an isolated edge: same degeneracy
};

struct FusionResult {
    Graph graph;               // on n-2 vertices, dense labels
    LocalCliffordFrame frame;  // post-fusion state = frame |graph>, up to signs
    VertexMap relabel;         // old -> new labels; a and b map to 0xff
};

inline VertexMap fusion_relabel_map(int n, int a, int b) {
    VertexMap m(n, 0xff);
    int next = 0;
    for (int v = 0; v < n; ++v)
        if (v != a && v != b) m[v] = static_cast<uint8_t>(next++);
    return m;
}

// Pure graph rewrite for the default kind on non-adjacent, non-isolated a, b:
// toggle {u, v} exactly when u in N(a), v in N(b) (xor the symmetric case),
// then drop a and b. Returns nullopt when the preconditions fail.
inline std::optional<Graph> fast_fuse_rewrite(const Graph& g, int a, int b) {
    if (a == b || a >= g.n || b >= g.n) return std::nullopt;
    if (g.has_edge(a, b)) return std::nullopt;
    const uint32_t na = g.adj[a];
    const uint32_t nb = g.adj[b];
    if (!na || !nb) return std::nullopt;
    Graph h = g;
    for (int v = 0; v < g.n; ++v) {
        uint32_t t = 0;
        if ((na >> v) & 1u) t ^= nb;
        if ((nb >> v) & 1u) t ^= na;
        h.adj[v] ^= t & ~(1u << v);
    }
    return induced_subgraph(h, g.vertex_mask() & ~((1u << a) | (1u << b)));
}

struct FusionOutcome {
    FuseStatus status = FuseStatus::ok;
    FusionResult result;

    bool ok() const { return status == FuseStatus::ok; }
};

inline FusionOutcome fuse(const Graph& g, int a, int b, FusionKind kind = FusionKind::XZ_ZX) {
    FusionOutcome out;
    if (a == b || a >= g.n || b >= g.n || g.n < 3) {
        out.status = FuseStatus::bad_vertices;
        return out;
    }
    if (g.adj[a] == 0 || g.adj[b] == 0) {
        out.status = FuseStatus::endpoint_isolated;
        return out;
    }
    if (g.adj[a] == (1u << b) && g.adj[b] == (1u << a)) {
        out.status = FuseStatus::isolated_pair;
        return out;
    }
    out.result.relabel = fusion_relabel_map(g.n, a, b);
    if (kind == FusionKind::XZ_ZX && !g.has_edge(a, b)) {
        auto rewritten = fast_fuse_rewrite(g, a, b);
        if (!rewritten) std::abort();
        out.result.graph = *rewritten;
        out.result.frame = LocalCliffordFrame::identity(g.n - 2);
        return out;
    }
    Tableau t = Tableau::from_graph(g);
    auto [p1, p2] = fusion_parities(kind, a, b);
    t.measure(p1, +1);
    t.measure(p2, +1);
    auto reduced = t.delete_qubits((1u << a) | (1u << b));
    // two independent parities on the pair always factorize it
    if (!reduced) std::abort();
    GraphFrame gf = tableau_to_graph(*reduced);
    out.result.graph = gf.graph;
    out.result.frame = gf.frame;
    return out;
}

}  // namespace gst

#include "gst/orbit.hpp"

namespace gst {

// Order-invariant identity of an LC orbit: fold of the sorted member hashes.
inline uint64_t orbit_fingerprint(const Graph& g) {
    std::vector<uint64_t> hs;
    for (const Graph& m : enumerate_orbit(g)) hs.push_back(wl_hash(m).value);
    std::sort(hs.begin(), hs.end());
    uint64_t h = splitmix64(0x0f1bull + g.n);
    for (uint64_t v : hs) h = hash_fold(h, v);
    return h;
}

// Executable form of the single-fusion-type sufficiency claim: for every
// graph on <= n vertices, every orbit reachable by any of the five parity
// pairs (from some member, some ordered pair) is also reachable by the
// default pair. Exhaustive; intended for n <= 6 (n = 7 takes minutes).
inline bool fusion_kinds_equivalent_on_orbits(int n) {
    for (int sz = 3; sz <= n; ++sz) {
        GraphSet processed;
        for (const Graph& g : enumerate_graphs(sz)) {
            if (processed.find(g)) continue;
            std::vector<Graph> members = enumerate_orbit(g);
            for (const Graph& m : members) processed.insert(m);

            std::vector<uint64_t> reach_default;
            std::array<std::vector<uint64_t>, 5> reach;
            for (const Graph& m : members) {
                for (int a = 0; a < sz; ++a)
                    for (int b = 0; b < sz; ++b) {
                        if (a == b) continue;
                        for (FusionKind k : kAllFusionKinds) {
                            FusionOutcome fo = fuse(m, a, b, k);
                            if (!fo.ok()) continue;
                            reach[static_cast<int>(k)].push_back(orbit_fingerprint(fo.result.graph));
                        }
                    }
            }
            for (auto& r : reach) {
                std::sort(r.begin(), r.end());
                r.erase(std::unique(r.begin(), r.end()), r.end());
            }
            const auto& dflt = reach[static_cast<int>(FusionKind::XZ_ZX)];
            for (FusionKind k : kAllFusionKinds)
                for (uint64_t fp : reach[static_cast<int>(k)])
                    if (!std::binary_search(dflt.begin(), dflt.end(), fp)) return false;
        }
    }
    return true;
}

}  // namespace gst
