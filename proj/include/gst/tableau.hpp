#pragma once

// Stabilizer tableau with destabilizer rows (Aaronson-Gottesman style), fixed
// capacity so the fusion pipeline runs allocation-free. Signs are tracked as
// i^phase per row; graph-equivalence decisions downstream ignore them.

#include <algorithm>
#include <array>
#include <bit>
#include <cassert>
#include <cstdint>
#include <optional>

#include "gst/graph.hpp"
#include "gst/pauli.hpp"

namespace gst {

struct MeasureResult {
    int value = +1;      // +1 or -1
    bool random = false; // outcome was not determined by the state
    bool conflict = false;  // forced value contradicted a determined outcome
};

struct Tableau {
    int n = 0;
    std::array<Pauli, kMaxVertices> stab{};
    std::array<Pauli, kMaxVertices> destab{};

    static Tableau zero_state(int n) {
        Tableau t;
        t.n = n;
        for (int q = 0; q < n; ++q) {
            t.stab[q] = Pauli{0, 1u << q, 0};
            t.destab[q] = Pauli{1u << q, 0, 0};
        }
        return t;
    }

    // |G>: stabilizer i is X_i Z_{N(i)} with + sign; destabilizer i is Z_i.
    static Tableau from_graph(const Graph& g) {
        Tableau t;
        t.n = g.n;
        for (int q = 0; q < g.n; ++q) {
            t.stab[q] = Pauli{1u << q, g.adj[q], 0};
            t.destab[q] = Pauli{0, 1u << q, 0};
        }
        return t;
    }

    void for_each_row(auto&& f) {
        for (int i = 0; i < n; ++i) {
            f(stab[i]);
            f(destab[i]);
        }
    }

    void h(int q) {
        const uint32_t bit = 1u << q;
        for_each_row([&](Pauli& p) {
            uint32_t xb = p.x & bit, zb = p.z & bit;
            if (xb && zb) p.phase = static_cast<uint8_t>((p.phase + 2) & 3);  // Y -> -Y
            p.x = (p.x & ~bit) | (zb ? bit : 0);
            p.z = (p.z & ~bit) | (xb ? bit : 0);
        });
    }
    // R = diag(1, i): X -> Y, Z -> Z
    void r(int q) {
        const uint32_t bit = 1u << q;
        for_each_row([&](Pauli& p) {
            if (p.x & bit) {
                p.phase = static_cast<uint8_t>((p.phase + 1) & 3);
                p.z ^= bit;
            }
        });
    }
    void rdg(int q) {
        const uint32_t bit = 1u << q;
        for_each_row([&](Pauli& p) {
            if (p.x & bit) {
                p.phase = static_cast<uint8_t>((p.phase + 3) & 3);
                p.z ^= bit;
            }
        });
    }
    void z(int q) {
        const uint32_t bit = 1u << q;
        for_each_row([&](Pauli& p) {
            if (p.x & bit) p.phase = static_cast<uint8_t>((p.phase + 2) & 3);
        });
    }
    void x(int q) {
        const uint32_t bit = 1u << q;
        for_each_row([&](Pauli& p) {
            if (p.z & bit) p.phase = static_cast<uint8_t>((p.phase + 2) & 3);
        });
    }
    void cz(int a, int b) {
        assert(a != b && a < n && b < n);
        const uint32_t ba = 1u << a, bb = 1u << b;
        for_each_row([&](Pauli& p) {
            bool xa = p.x & ba, xb = p.x & bb;
            if (xa && xb) p.phase = static_cast<uint8_t>((p.phase + 2) & 3);
            if (xa) p.z ^= bb;
            if (xb) p.z ^= ba;
        });
    }
    void cnot(int c, int t) {
        assert(c != t && c < n && t < n);
        const uint32_t bc = 1u << c, bt = 1u << t;
        for_each_row([&](Pauli& p) {
            if (p.x & bc) p.x ^= bt;
            if (p.z & bt) p.z ^= bc;
        });
    }

    void apply_single(const SingleClifford& c, int q) {
        if (c.is_identity()) return;
        // image table for the four (x,z) combos on qubit q
        using detail::axis_to_p1;
        using detail::P1;
        const P1 ix = axis_to_p1(c.img_x);
        const P1 iz = axis_to_p1(c.img_z);
        const P1 ixz = detail::p1_mul(ix, iz);
        const uint32_t bit = 1u << q;
        for_each_row([&](Pauli& p) {
            bool xb = p.x & bit, zb = p.z & bit;
            if (!xb && !zb) return;
            P1 img = xb ? (zb ? ixz : ix) : iz;
            p.x = (p.x & ~bit) | (img.x ? bit : 0);
            p.z = (p.z & ~bit) | (img.z ? bit : 0);
            p.phase = static_cast<uint8_t>((p.phase + img.phase) & 3);
        });
    }

    void apply_frame(const LocalCliffordFrame& f) {
        for (int q = 0; q < static_cast<int>(f.ops.size()); ++q) apply_single(f.ops[q], q);
    }

    // Measure Pauli p (must satisfy p.phase in {0,2} for +-P); when the
    // outcome is random it is set to `force` (default +1); determined
    // outcomes are reported as-is, with conflict set if force disagrees.
    MeasureResult measure(const Pauli& p, std::optional<int> force = +1, uint64_t* rng = nullptr) {
        int piv = -1;
        for (int i = 0; i < n; ++i)
            if (!pauli_commutes(stab[i], p)) {
                piv = i;
                break;
            }
        if (piv >= 0) {
            for (int i = 0; i < n; ++i) {
                if (i != piv && !pauli_commutes(stab[i], p)) stab[i] = pauli_mul(stab[i], stab[piv]);
                if (!pauli_commutes(destab[i], p)) destab[i] = pauli_mul(destab[i], stab[piv]);
            }
            destab[piv] = stab[piv];
            int value;
            if (force)
                value = *force;
            else if (rng) {
                *rng = splitmix64(*rng);
                value = (*rng & 1) ? -1 : +1;
            } else
                value = +1;
            stab[piv] = p;
            if (value < 0) stab[piv].phase = static_cast<uint8_t>((stab[piv].phase + 2) & 3);
            return {value, true, false};
        }
        // determined: express p as a product of stabilizers via destabilizer pairing
        Pauli acc{0, 0, 0};
        for (int i = 0; i < n; ++i)
            if (!pauli_commutes(destab[i], p)) acc = pauli_mul(acc, stab[i]);
        assert(acc.x == p.x && acc.z == p.z);
        int diff = (acc.phase - p.phase) & 3;
        assert(diff == 0 || diff == 2);
        int value = diff == 0 ? +1 : -1;
        return {value, false, force && *force != value};
    }

    // S(part) = rank of stabilizer generators restricted to part - |part|
    int entanglement_entropy(uint32_t part) const {
        std::array<uint64_t, kMaxVertices> basis{};
        int rk = 0;
        for (int i = 0; i < n; ++i) {
            uint64_t r = (static_cast<uint64_t>(squeeze_bits(stab[i].x, part)) << 32) |
                         squeeze_bits(stab[i].z, part);
            for (int j = 0; j < rk; ++j) {
                uint64_t top = 1ull << (63 - std::countl_zero(basis[j]));
                if (r & top) r ^= basis[j];
            }
            if (r) basis[rk++] = r;
        }
        return rk - std::popcount(part);
    }

    // True iff the deleted set factorizes from the rest (its local stabilizer
    // subgroup has full rank |del|).
    bool qubits_deletable(uint32_t del) const { return entanglement_entropy(del) == 0; }

    // Remove the qubits in del (which must factorize); remaining qubits are
    // relabeled densely preserving order. Destabilizers are rebuilt.
    std::optional<Tableau> delete_qubits(uint32_t del) const {
        Tableau work = *this;
        const uint32_t keep = vertex_mask() & ~del;
        bool used[kMaxVertices] = {};
        // eliminate support on del columns among stabilizer rows
        for (uint32_t m = del; m;) {
            int q = std::countr_zero(m);
            m &= m - 1;
            for (int kind = 0; kind < 2; ++kind) {
                const uint32_t bit = 1u << q;
                int piv = -1;
                for (int i = 0; i < n; ++i) {
                    if (used[i]) continue;
                    uint32_t v = kind == 0 ? work.stab[i].x : work.stab[i].z;
                    if (v & bit) {
                        piv = i;
                        break;
                    }
                }
                if (piv < 0) continue;
                used[piv] = true;
                for (int i = 0; i < n; ++i) {
                    if (i == piv) continue;
                    uint32_t v = kind == 0 ? work.stab[i].x : work.stab[i].z;
                    if (v & bit) work.stab[i] = pauli_mul(work.stab[i], work.stab[piv]);
                }
            }
        }
        Tableau out;
        out.n = std::popcount(keep);
        int k = 0;
        for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            const Pauli& p = work.stab[i];
            if ((p.x & del) || (p.z & del)) return std::nullopt;  // still entangled
            if (k >= out.n) return std::nullopt;
            out.stab[k++] = Pauli{squeeze_bits(p.x, keep), squeeze_bits(p.z, keep), p.phase};
        }
        if (k != out.n) return std::nullopt;
        out.rebuild_destabilizers();
        return out;
    }

    void rebuild_destabilizers() {
        // symplectic pairing against fresh single-qubit candidates
        std::array<Pauli, 2 * kMaxVertices> cand;
        int nc = 0;
        for (int q = 0; q < n; ++q) cand[nc++] = Pauli{1u << q, 0, 0};
        for (int q = 0; q < n; ++q) cand[nc++] = Pauli{0, 1u << q, 0};
        for (int i = 0; i < n; ++i) {
            int pick = -1;
            for (int c = 0; c < nc; ++c)
                if (!pauli_commutes(cand[c], stab[i])) {
                    pick = c;
                    break;
                }
            assert(pick >= 0);
            Pauli d = cand[pick];
            cand[pick] = cand[--nc];
            // make later stabilizers commute with d (multiply by stab[i])
            for (int j = i + 1; j < n; ++j)
                if (!pauli_commutes(stab[j], d)) stab[j] = pauli_mul(stab[j], stab[i]);
            // make remaining candidates commute with both stab[i] and d
            for (int c = 0; c < nc; ++c) {
                if (!pauli_commutes(cand[c], stab[i])) cand[c] = pauli_mul(cand[c], d);
                if (!pauli_commutes(cand[c], d)) cand[c] = pauli_mul(cand[c], stab[i]);
            }
            d.phase = 0;
            destab[i] = d;
        }
    }

    Tableau tensor(const Tableau& o) const {
        assert(n + o.n <= kMaxVertices);
        Tableau out;
        out.n = n + o.n;
        for (int i = 0; i < n; ++i) {
            out.stab[i] = stab[i];
            out.destab[i] = destab[i];
        }
        for (int i = 0; i < o.n; ++i) {
            out.stab[n + i] = Pauli{o.stab[i].x << n, o.stab[i].z << n, o.stab[i].phase};
            out.destab[n + i] = Pauli{o.destab[i].x << n, o.destab[i].z << n, o.destab[i].phase};
        }
        return out;
    }

    uint32_t vertex_mask() const { return n == 32 ? ~0u : (1u << n) - 1; }

    // invariant check (tests): stabilizers commute pairwise, destabilizer i
    // anticommutes with stabilizer i only
    bool well_formed() const {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (!pauli_commutes(stab[i], stab[j])) return false;
                if (pauli_commutes(destab[i], stab[j]) == (i == j)) return false;
            }
        return true;
    }
};

inline Tableau graph_to_tableau(const Graph& g) { return Tableau::from_graph(g); }

// Photon emission of the Lindner-Rudolph scheme. leaf_photon attaches the new
// qubit as a leaf on the spin (CNOT spin->new, then H on new); leaf_spin makes
// the spin the leaf with the new photon taking its place (H on spin instead).
enum class EmitMode { leaf_photon, leaf_spin };

inline Tableau emit_photon(const Tableau& t, int spin, EmitMode mode) {
    assert(spin < t.n && t.n + 1 <= kMaxVertices);
    Tableau out = t;
    int q = out.n++;
    out.stab[q] = Pauli{0, 1u << q, 0};
    out.destab[q] = Pauli{1u << q, 0, 0};
    out.cnot(spin, q);
    if (mode == EmitMode::leaf_photon)
        out.h(q);
    else
        out.h(spin);
    return out;
}

// ---------------------------------------------------------------------------
// Tableau -> (graph, frame). Applying the frame to |graph> reproduces the
// state up to stabilizer signs; pivoting is deterministic (lowest index).

struct GraphFrame {
    Graph graph;
    LocalCliffordFrame frame;  // state = frame |graph>, up to signs
};

inline GraphFrame tableau_to_graph(const Tableau& t) {
    const int n = t.n;
    std::array<Pauli, kMaxVertices> rows;
    std::copy(t.stab.begin(), t.stab.begin() + n, rows.begin());
    // gates applied to reach graph form; frame is their inverse composition
    LocalCliffordFrame applied = LocalCliffordFrame::identity(n);
    auto conj = [&](const SingleClifford& c, int q) {
        using detail::axis_to_p1;
        using detail::P1;
        const P1 ix = axis_to_p1(c.img_x);
        const P1 iz = axis_to_p1(c.img_z);
        const P1 ixz = detail::p1_mul(ix, iz);
        const uint32_t bit = 1u << q;
        for (int i = 0; i < n; ++i) {
            Pauli& p = rows[i];
            bool xb = p.x & bit, zb = p.z & bit;
            if (!xb && !zb) continue;
            P1 img = xb ? (zb ? ixz : ix) : iz;
            p.x = (p.x & ~bit) | (img.x ? bit : 0);
            p.z = (p.z & ~bit) | (img.z ? bit : 0);
            p.phase = static_cast<uint8_t>((p.phase + img.phase) & 3);
        }
        applied.ops[q] = c.compose(applied.ops[q]);
    };

    for (int c = 0; c < n; ++c) {
        const uint32_t bit = 1u << c;
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (rows[r].x & bit) {
                piv = r;
                break;
            }
        if (piv < 0) {
            conj(kCliffH, c);
            for (int r = c; r < n; ++r)
                if (rows[r].x & bit) {
                    piv = r;
                    break;
                }
        }
        assert(piv >= 0 && "tableau does not describe a stabilizer state");
        std::swap(rows[c], rows[piv]);
        for (int r = 0; r < n; ++r)
            if (r != c && (rows[r].x & bit)) rows[r] = pauli_mul(rows[r], rows[c]);
    }
    // clear the Z diagonal with R; only row c has X support on column c here
    for (int c = 0; c < n; ++c)
        if (rows[c].z & (1u << c)) conj(kCliffR, c);

    Graph g(n);
    for (int i = 0; i < n; ++i) g.adj[i] = rows[i].z & ~(1u << i);
    assert(g.is_valid());

    LocalCliffordFrame frame = LocalCliffordFrame::identity(n);
    for (int q = 0; q < n; ++q) frame.ops[q] = applied.ops[q].inverse();
    return {g, frame};
}

}  // namespace gst
