#pragma once

// Loss-tolerant graph codes built from progenitor graphs. A progenitor graph
// with a chosen encoding vertex delta defines a code on the remaining qubits:
// logical X = Z over the input set I = N(delta), logical Z = a stabilizer of
// an input qubit, code stabilizers generated by {S_i}_{i not in I} and
// {S_i S_{i*}}_{i in I \ i*}. A logical survives an erasure pattern iff some
// representative avoids every lost qubit (GF(2) solvability on the lost
// coordinates); loss curves count failing patterns exactly.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gst/graph.hpp"
#include "gst/pauli.hpp"
#include "gst/tablebase.hpp"

namespace gst {

struct GraphCode {
    Graph code_graph;   // progenitor minus delta, dense labels
    uint32_t input_set; // I in code_graph labels
    int istar = 0;
    Pauli logical_x, logical_z;
    std::vector<Pauli> generators;  // n_physical - 1 generators

    int n_physical() const { return code_graph.n; }
    Pauli logical(int which) const {  // 0=X, 1=Y, 2=Z
        if (which == 0) return logical_x;
        if (which == 2) return logical_z;
        return pauli_mul(logical_x, logical_z);
    }
};

// istar < 0 picks the lowest-index input qubit; the code space (and hence all
// loss statistics) is independent of the choice, which tests assert.
inline std::optional<GraphCode> make_code(const Graph& progenitor, int delta, int istar = -1) {
    if (delta >= progenitor.n || progenitor.adj[delta] == 0 || progenitor.n < 2) return std::nullopt;
    GraphCode code;
    const uint32_t keep = progenitor.vertex_mask() & ~(1u << delta);
    code.code_graph = induced_subgraph(progenitor, keep);
    code.input_set = squeeze_bits(progenitor.adj[delta], keep);
    if (istar < 0)
        code.istar = std::countr_zero(code.input_set);
    else {
        // istar given in progenitor labels
        if (istar == delta || !((progenitor.adj[delta] >> istar) & 1u)) return std::nullopt;
        code.istar = std::popcount(keep & ((1u << istar) - 1));
    }
    const Graph& g = code.code_graph;
    auto stab = [&](int i) { return Pauli{1u << i, g.adj[i], 0}; };
    code.logical_x = Pauli{0, code.input_set, 0};
    code.logical_z = stab(code.istar);
    for (int i = 0; i < g.n; ++i) {
        if (!((code.input_set >> i) & 1u))
            code.generators.push_back(stab(i));
        else if (i != code.istar)
            code.generators.push_back(pauli_mul(stab(i), code.logical_z));
    }
    // construction invariants
    if (pauli_commutes(code.logical_x, code.logical_z)) std::abort();
    for (const Pauli& s : code.generators)
        if (!pauli_commutes(s, code.logical_x) || !pauli_commutes(s, code.logical_z)) std::abort();
    return code;
}

// Is some representative logical * stabilizer supported entirely off `lost`?
// Equivalent to: the lost-restriction of the logical lies in the span of the
// lost-restrictions of the generators.
inline bool pattern_recoverable(const GraphCode& code, int which, uint32_t lost) {
    if (!lost) return true;
    auto restrict_op = [&](const Pauli& p) -> uint64_t {
        return (static_cast<uint64_t>(squeeze_bits(p.x, lost)) << 32) | squeeze_bits(p.z, lost);
    };
    uint64_t target = restrict_op(code.logical(which));
    if (!target) return true;
    uint64_t basis[kMaxVertices];
    int rank = 0;
    for (const Pauli& s : code.generators) {
        uint64_t r = restrict_op(s);
        for (int j = 0; j < rank; ++j) {
            uint64_t top = 1ull << (63 - std::countl_zero(basis[j]));
            if (r & top) r ^= basis[j];
        }
        if (r) basis[rank++] = r;
    }
    for (int j = 0; j < rank; ++j) {
        uint64_t top = 1ull << (63 - std::countl_zero(basis[j]));
        if (target & top) target ^= basis[j];
    }
    return target == 0;
}

struct LossCurve {
    int n_physical = 0;
    std::vector<uint64_t> unrecoverable;  // index k: number of k-loss patterns causing logical loss
    double threshold = 0.0;

    double logical_loss(double eps) const {
        long double sum = 0;
        for (size_t k = 0; k < unrecoverable.size(); ++k)
            if (unrecoverable[k])
                sum += static_cast<long double>(unrecoverable[k]) * std::pow((long double)eps, (int)k) *
                       std::pow((long double)(1.0 - eps), (int)(n_physical - k));
        return static_cast<double>(sum);
    }
};

namespace detail {

// threshold = sup{ t : L(eps) < eps on (0, t) }, clamped to [0, 0.5];
// located by grid scan plus bisection of the first upward crossing.
inline double curve_threshold(const LossCurve& c) {
    auto gap = [&](double e) { return c.logical_loss(e) - e; };
    const double tol = 1e-12;
    bool seen_below = false;
    double prev = 1e-9;
    for (int k = 1; k <= 500; ++k) {
        double e = 0.001 * k;
        if (e > 0.5) e = 0.5;
        double v = gap(e);
        if (v < -tol) seen_below = true;
        if (v > tol) {
            if (!seen_below) return 0.0;
            double lo = prev, hi = e;
            for (int it = 0; it < 60 && hi - lo > 1e-9; ++it) {
                double mid = 0.5 * (lo + hi);
                (gap(mid) > tol ? hi : lo) = mid;
            }
            return std::min(0.5, 0.5 * (lo + hi));
        }
        prev = e;
        if (e >= 0.5) break;
    }
    return seen_below ? 0.5 : 0.0;
}

}  // namespace detail

// Exact loss curve by enumerating all 2^n loss patterns (n_physical <= 16).
inline LossCurve loss_curve(const GraphCode& code, int which) {
    const int m = code.n_physical();
    if (m > 16) std::abort();
    LossCurve c;
    c.n_physical = m;
    c.unrecoverable.assign(m + 1, 0);
    // monotone: supersets of a failing pattern fail; check cache by subset
    std::vector<bool> fails(size_t{1} << m, false);
    for (uint32_t lost = 1; lost < (1u << m); ++lost) {
        uint32_t low = lost & (~lost + 1);
        bool f = fails[lost & ~low];  // subset missing the lowest lost qubit
        if (!f) {
            // also inherit failure from any other direct subset
            for (uint32_t mm = lost & ~low; mm && !f; mm &= mm - 1)
                f = fails[lost & ~(mm & (~mm + 1))];
            if (!f) f = !pattern_recoverable(code, which, lost);
        }
        fails[lost] = f;
        if (f) ++c.unrecoverable[std::popcount(lost)];
    }
    c.threshold = detail::curve_threshold(c);
    return c;
}

// min over the three logical Pauli measurements
inline double code_threshold(const GraphCode& code) {
    double t = 1.0;
    for (int w = 0; w < 3; ++w) t = std::min(t, loss_curve(code, w).threshold);
    return t;
}

struct CodeHit {
    double threshold = 0.0;
    uint32_t orbit = 0;
    uint32_t member = 0;
    uint8_t delta = 0;
    uint8_t n = 0;  // progenitor vertex count
    std::string progenitor_g6;
};

namespace detail {

// cheap upper bound on a code's min-logical threshold from loss patterns of
// size <= 2 only (the true curve dominates the truncated one pointwise)
inline double threshold_upper_bound(const GraphCode& code) {
    const int m = code.n_physical();
    double ub = 1.0;
    for (int w = 0; w < 3; ++w) {
        LossCurve c;
        c.n_physical = m;
        c.unrecoverable.assign(m + 1, 0);
        for (int q = 0; q < m; ++q)
            if (!pattern_recoverable(code, w, 1u << q)) ++c.unrecoverable[1];
        for (int q = 0; q < m; ++q)
            for (int p = q + 1; p < m; ++p)
                if (!pattern_recoverable(code, w, (1u << q) | (1u << p))) ++c.unrecoverable[2];
        ub = std::min(ub, detail::curve_threshold(c));
    }
    return ub;
}

}  // namespace detail

// Rank the best codes over all table graphs with <= max_nodes vertices at
// depth <= fusion_budget, looping over every encoding vertex. Disconnected
// progenitors add nothing (each component is itself a table graph at <= the
// same depth with an identical loss curve), so only connected members are
// visited. Deterministic order: threshold desc, n asc, graph6 asc, delta asc.
inline std::vector<CodeHit> search_codes(const Tablebase& tb, int max_nodes, int fusion_budget,
                                         size_t top_k = 10) {
    std::vector<CodeHit> hits;
    auto worst_kept = [&]() -> double {
        return hits.size() < top_k ? -1.0 : hits.back().threshold;
    };
    auto insert_hit = [&](CodeHit h) {
        auto cmp = [](const CodeHit& x, const CodeHit& y) {
            if (x.threshold != y.threshold) return x.threshold > y.threshold;
            if (x.n != y.n) return x.n < y.n;
            if (x.progenitor_g6 != y.progenitor_g6) return x.progenitor_g6 < y.progenitor_g6;
            return x.delta < y.delta;
        };
        hits.insert(std::upper_bound(hits.begin(), hits.end(), h, cmp), std::move(h));
        if (hits.size() > top_k) hits.pop_back();
    };
    for (uint32_t oi = 0; oi < tb.orbits.size(); ++oi) {
        const Orbit& o = tb.orbits[oi];
        if (o.depth > fusion_budget || o.n > max_nodes || o.n < 2 || !o.connected) continue;
        for (uint32_t mi = 0; mi < o.member_count; ++mi) {
            const Graph g = tb.member(oi, mi);
            for (int delta = 0; delta < g.n; ++delta) {
                auto code = make_code(g, delta);
                if (!code) continue;
                if (detail::threshold_upper_bound(*code) <= worst_kept() + 1e-9) continue;
                double t = code_threshold(*code);
                if (t <= worst_kept() + 1e-12) continue;
                insert_hit({t, oi, mi, static_cast<uint8_t>(delta), o.n, to_graph6(g)});
            }
        }
    }
    return hits;
}

}  // namespace gst
