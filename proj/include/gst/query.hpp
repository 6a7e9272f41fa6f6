#pragma once

// Query side of the tablebase: resolve a target graph to its orbit, assemble
// a construction protocol (initial caterpillar set, LC steps, fusions), and
// verify protocols end to end in the stabilizer simulator: photon emission
// for the initial state, the LC unitary gate sequence for LC steps, and the
// measure-and-delete pipeline for fusions.

#include <optional>
#include <string>
#include <vector>

#include "gst/fusion.hpp"
#include "gst/graph.hpp"
#include "gst/orbit.hpp"
#include "gst/tablebase.hpp"
#include "gst/tableau.hpp"

namespace gst {

struct ProtocolStep {
    enum class Op : uint8_t { LC, FUSE };
    Op op = Op::LC;
    uint8_t v = 0;             // LC vertex
    uint8_t a = 0, b = 0;      // fusion pair
    LocalCliffordFrame frame;  // FUSE only: state after fusion = frame |graph>; replay undoes it

    static ProtocolStep lc(int v) {
        ProtocolStep s;
        s.op = Op::LC;
        s.v = static_cast<uint8_t>(v);
        return s;
    }
    static ProtocolStep fuse_step(int a, int b, LocalCliffordFrame frame) {
        ProtocolStep s;
        s.op = Op::FUSE;
        s.a = static_cast<uint8_t>(a);
        s.b = static_cast<uint8_t>(b);
        s.frame = std::move(frame);
        return s;
    }
};

struct ConstructionProtocol {
    Graph initial;  // caterpillar set, labels as stored
    std::vector<ProtocolStep> steps;
    VertexMap final_map;  // replay-result labels -> target labels
    int depth = 0;        // number of FUSE steps

    // pure graph replay of the steps (no tableau)
    Graph replay_graph() const {
        Graph c = initial;
        for (const ProtocolStep& s : steps)
            if (s.op == ProtocolStep::Op::LC)
                c = local_complement(c, s.v);
            else
                c = fuse(c, s.a, s.b).result.graph;
        return c;
    }
};

// Eq.-5-style LC unitary: sqrt(-i X_a) on a, sqrt(+i Z_j) on every neighbor.
inline void apply_lc_unitary(Tableau& t, int a, uint32_t neighbors) {
    static const SingleClifford kSqrtXNeg{{0, 0}, {1, 1}};  // X -> X, Z -> -Y
    t.apply_single(kSqrtXNeg, a);
    for (uint32_t m = neighbors; m;) {
        int j = std::countr_zero(m);
        m &= m - 1;
        t.apply_single(kCliffRdg, j);  // X -> -Y, Z -> Z
    }
}

// ---------------------------------------------------------------------------
// Photon emission planning (Lindner-Rudolph): every caterpillar component is
// produced by a sequence of emit_photon calls; the plan records which final
// qubit realizes which graph vertex.

struct EmissionPlan {
    std::vector<EmitMode> modes;   // applied in order; qubit 0 is the spin
    VertexMap qubit_to_vertex;     // final qubit index -> graph vertex
};

inline std::optional<EmissionPlan> plan_emission(const Graph& cat) {
    if (!is_caterpillar_tree(cat)) return std::nullopt;
    EmissionPlan plan;
    plan.qubit_to_vertex.assign(cat.n, 0);
    if (cat.n == 1) return plan;

    // longest path via double BFS; its endpoints carry no off-path leaves
    auto farthest = [&](int src) {
        std::vector<int> dist(cat.n, -1), par(cat.n, -1);
        dist[src] = 0;
        std::vector<int> q{src};
        int best = src;
        for (size_t h = 0; h < q.size(); ++h) {
            int v = q[h];
            if (dist[v] > dist[best]) best = v;
            for (uint32_t m = cat.adj[v]; m;) {
                int u = std::countr_zero(m);
                m &= m - 1;
                if (dist[u] < 0) {
                    dist[u] = dist[v] + 1;
                    par[u] = v;
                    q.push_back(u);
                }
            }
        }
        return std::tuple{best, par};
    };
    auto [e1, par1] = farthest(0);
    auto [e2, par2] = farthest(e1);
    std::vector<int> spine;
    for (int v = e2; v >= 0; v = par2[v]) spine.push_back(v);

    uint32_t on_spine = 0;
    for (int v : spine) on_spine |= 1u << v;

    int qubit = 1;  // next photon index; spin is qubit 0
    const int m = static_cast<int>(spine.size());
    for (int i = 0; i < m; ++i) {
        const int pi = spine[i];
        for (uint32_t lm = cat.adj[pi] & ~on_spine; lm;) {
            int leaf = std::countr_zero(lm);
            lm &= lm - 1;
            plan.modes.push_back(EmitMode::leaf_photon);
            plan.qubit_to_vertex[qubit++] = static_cast<uint8_t>(leaf);
        }
        if (i + 1 < m) {
            // the new photon takes the spin's place (= p_i); the spin moves on
            plan.modes.push_back(EmitMode::leaf_spin);
            plan.qubit_to_vertex[qubit++] = static_cast<uint8_t>(pi);
        }
    }
    plan.qubit_to_vertex[0] = static_cast<uint8_t>(spine[m - 1]);
    if (qubit != cat.n) return std::nullopt;
    return plan;
}

// Emit a caterpillar forest component by component (independent emitters /
// re-initialized emitter); returns the tableau and vertex -> qubit map.
inline std::optional<std::pair<Tableau, VertexMap>> emit_initial_state(const Graph& forest) {
    if (!is_caterpillar_forest(forest)) return std::nullopt;
    Tableau total;
    total.n = 0;
    VertexMap vertex_to_qubit(forest.n, 0);
    uint32_t left = forest.vertex_mask();
    while (left) {
        uint32_t comp = forest.component_of(std::countr_zero(left));
        left &= ~comp;
        Graph cg = induced_subgraph(forest, comp);
        auto plan = plan_emission(cg);
        if (!plan) return std::nullopt;
        Tableau t;  // single spin in |+>
        t.n = 1;
        t.stab[0] = Pauli{1, 0, 0};
        t.destab[0] = Pauli{0, 1, 0};
        for (EmitMode mode : plan->modes) t = emit_photon(t, 0, mode);
        const int base = total.n;
        total = total.n == 0 ? t : total.tensor(t);
        // component vertices in ascending order match induced_subgraph labels
        std::vector<int> verts;
        for (uint32_t mm = comp; mm;) {
            verts.push_back(std::countr_zero(mm));
            mm &= mm - 1;
        }
        for (int q = 0; q < cg.n; ++q)
            vertex_to_qubit[verts[plan->qubit_to_vertex[q]]] = static_cast<uint8_t>(base + q);
    }
    return std::pair{total, vertex_to_qubit};
}

// ---------------------------------------------------------------------------
// Comparison of stabilizer groups modulo signs (Pauli byproducts are dropped
// throughout, so protocol verification is up to signs).

inline bool stab_groups_equal_up_to_signs(const Tableau& t1, const Tableau& t2) {
    if (t1.n != t2.n) return false;
    auto canon = [](const Tableau& t) {
        std::vector<uint64_t> rows(t.n);
        for (int i = 0; i < t.n; ++i)
            rows[i] = (static_cast<uint64_t>(t.stab[i].x) << 32) | t.stab[i].z;
        std::vector<uint64_t> basis;
        for (uint64_t r : rows) {
            for (uint64_t b : basis) {
                uint64_t top = 1ull << (63 - std::countl_zero(b));
                if (r & top) r ^= b;
            }
            if (r) {
                basis.push_back(r);
                // keep basis rows sorted by leading bit for a canonical form
                for (size_t i = basis.size(); i-- > 1;)
                    if (basis[i] > basis[i - 1]) std::swap(basis[i], basis[i - 1]);
            }
        }
        // full reduction: clear leading bits from other rows
        for (size_t i = 0; i < basis.size(); ++i) {
            uint64_t top = 1ull << (63 - std::countl_zero(basis[i]));
            for (size_t j = 0; j < basis.size(); ++j)
                if (j != i && (basis[j] & top)) basis[j] ^= basis[i];
        }
        std::sort(basis.begin(), basis.end());
        return basis;
    };
    return canon(t1) == canon(t2);
}

// ---------------------------------------------------------------------------
// Protocol assembly and replay

struct QueryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline ConstructionProtocol construct(const Tablebase& tb, const Graph& target) {
    auto look = tb.lookup(target);
    if (!look) throw QueryError("target graph is not in the table");

    // parent chain down to a depth-0 orbit
    std::vector<uint32_t> chain{look->orbit};
    while (tb.orbits[chain.back()].parent) chain.push_back(tb.orbits[chain.back()].parent->parent_orbit);
    std::reverse(chain.begin(), chain.end());

    ConstructionProtocol proto;
    proto.depth = static_cast<int>(chain.size()) - 1;
    proto.initial = tb.member(chain[0], 0);
    Graph cur = proto.initial;

    for (size_t i = 1; i < chain.size(); ++i) {
        const FusionLink& link = *tb.orbits[chain[i]].parent;
        const Graph parent_member = tb.member(link.parent_orbit, link.parent_member);
        auto path = lc_path(cur, parent_member);
        if (!path) throw QueryError("internal: orbit navigation failed");
        for (uint8_t v : path->steps) {
            proto.steps.push_back(ProtocolStep::lc(v));
            cur = local_complement(cur, v);
        }
        // stored fusion pair expressed in our labeling
        VertexMap inv = inverse_map(path->map);
        int a = inv[link.a], b = inv[link.b];
        FusionOutcome fo = fuse(cur, a, b);
        if (!fo.ok()) throw QueryError("internal: stored fusion is degenerate");
        proto.steps.push_back(ProtocolStep::fuse_step(a, b, fo.result.frame));
        cur = fo.result.graph;
    }

    // navigate to the target's exact labeling
    auto fin = lc_path(cur, target);
    if (!fin) throw QueryError("internal: final navigation failed");
    for (uint8_t v : fin->steps) {
        proto.steps.push_back(ProtocolStep::lc(v));
        cur = local_complement(cur, v);
    }
    proto.final_map = fin->map;
    return proto;
}

struct ReplayReport {
    bool ok = false;
    int failed_step = -1;  // -1: initial state, steps.size(): final comparison
    std::string detail;
};

// Full stabilizer replay: emit the initial caterpillar set, run every step as
// gates/measurements, undo recorded fusion frames, and compare the final
// state with |target> (after final_map) up to signs.
inline ReplayReport replay_verify(const ConstructionProtocol& proto, const Graph& target) {
    ReplayReport rep;
    auto emitted = emit_initial_state(proto.initial);
    if (!emitted) {
        rep.detail = "initial state is not a caterpillar set";
        return rep;
    }
    auto [t, vertex_to_qubit] = *emitted;
    {
        Tableau expect = Tableau::from_graph(relabel(proto.initial, vertex_to_qubit));
        if (!stab_groups_equal_up_to_signs(t, expect)) {
            rep.detail = "emission did not reproduce the initial graph state";
            return rep;
        }
    }
    Graph cur = proto.initial;
    for (size_t si = 0; si < proto.steps.size(); ++si) {
        const ProtocolStep& s = proto.steps[si];
        if (s.op == ProtocolStep::Op::LC) {
            if (s.v >= cur.n) {
                rep.failed_step = static_cast<int>(si);
                rep.detail = "LC vertex out of range";
                return rep;
            }
            uint32_t nbr_qubits = 0;
            for (uint32_t m = cur.adj[s.v]; m;) {
                int u = std::countr_zero(m);
                m &= m - 1;
                nbr_qubits |= 1u << vertex_to_qubit[u];
            }
            apply_lc_unitary(t, vertex_to_qubit[s.v], nbr_qubits);
            cur = local_complement(cur, s.v);
        } else {
            FusionOutcome fo = fuse(cur, s.a, s.b);
            if (!fo.ok()) {
                rep.failed_step = static_cast<int>(si);
                rep.detail = "degenerate fusion step";
                return rep;
            }
            const int qa = vertex_to_qubit[s.a], qb = vertex_to_qubit[s.b];
            auto [p1, p2] = fusion_parities(FusionKind::XZ_ZX, qa, qb);
            t.measure(p1, +1);
            t.measure(p2, +1);
            auto reduced = t.delete_qubits((1u << qa) | (1u << qb));
            if (!reduced) {
                rep.failed_step = static_cast<int>(si);
                rep.detail = "fusion left the measured pair entangled";
                return rep;
            }
            t = *reduced;
            // deleted qubits shift the survivors down
            const uint32_t kept = ~((1u << qa) | (1u << qb));
            VertexMap next(fo.result.graph.n, 0);
            for (int v = 0; v < cur.n; ++v) {
                if (v == s.a || v == s.b) continue;
                uint8_t nv = fo.result.relabel[v];
                // surviving qubits are renumbered densely by delete_qubits
                int nq = std::popcount(kept & ((1u << vertex_to_qubit[v]) - 1));
                next[nv] = static_cast<uint8_t>(nq);
            }
            cur = fo.result.graph;
            vertex_to_qubit = std::move(next);
            // undo the recorded frame so the state is exactly |cur>
            for (int q = 0; q < cur.n; ++q) {
                SingleClifford c = s.frame.at(q);
                if (!c.is_identity()) t.apply_single(c.inverse(), vertex_to_qubit[q]);
            }
            // the recorded frame must match what the pipeline produced
            for (int q = 0; q < cur.n; ++q)
                if (!(s.frame.at(q) == fo.result.frame.at(q))) {
                    rep.failed_step = static_cast<int>(si);
                    rep.detail = "recorded fusion frame differs from pipeline";
                    return rep;
                }
        }
        Tableau expect = Tableau::from_graph(relabel(cur, vertex_to_qubit));
        if (!stab_groups_equal_up_to_signs(t, expect)) {
            rep.failed_step = static_cast<int>(si);
            rep.detail = "state diverged from the graph replay";
            return rep;
        }
    }
    if (proto.final_map.size() != cur.n || target.n != cur.n) {
        rep.failed_step = static_cast<int>(proto.steps.size());
        rep.detail = "final map size mismatch";
        return rep;
    }
    if (!(relabel(cur, proto.final_map) == target)) {
        rep.failed_step = static_cast<int>(proto.steps.size());
        rep.detail = "final graph does not match the target";
        return rep;
    }
    rep.ok = true;
    return rep;
}

}  // namespace gst
