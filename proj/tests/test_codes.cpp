#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "gst/codes.hpp"
#include "gst/graph.hpp"
#include "gst/orbit.hpp"
#include "gst/tablebase.hpp"

using namespace gst;

namespace {

Graph path(int n) {
    Graph g(n);
    for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    return g;
}
Graph star(int n) {
    Graph g(n);
    for (int i = 1; i < n; ++i) g.add_edge(0, i);
    return g;
}
Graph cube() {
    Graph g(8);
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j)
            if (std::popcount(unsigned(i ^ j)) == 1) g.add_edge(i, j);
    return g;
}

const Tablebase& table(int m) {
    static std::map<int, Tablebase> cache;
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, build(BuildOptions{.max_initial_qubits = m})).first;
    return it->second;
}

}  // namespace

TEST_CASE("make_code constructs valid codes") {
    // P2 with delta at an endpoint: the 1-qubit trivial code, Xbar = Z, Zbar = X
    auto triv = make_code(path(2), 0);
    REQUIRE(triv);
    CHECK(triv->n_physical() == 1);
    CHECK(triv->logical_x == Pauli{0, 1, 0});
    CHECK(triv->logical_z == Pauli{1, 0, 0});
    CHECK(triv->generators.empty());

    // star center: 4-qubit repetition-like code with valid (anti)commutation
    auto rep = make_code(star(5), 0);
    REQUIRE(rep);
    CHECK(rep->n_physical() == 4);
    CHECK_FALSE(pauli_commutes(rep->logical_x, rep->logical_z));
    for (const Pauli& s : rep->generators) {
        CHECK(pauli_commutes(s, rep->logical_x));
        CHECK(pauli_commutes(s, rep->logical_z));
    }

    // cube plus a ninth encoding vertex: a valid 8-qubit code
    Graph cubeplus = cube();
    Graph withdelta(9);
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j)
            if (cubeplus.has_edge(i, j)) withdelta.add_edge(i, j);
    withdelta.add_edge(8, 0);
    withdelta.add_edge(8, 3);
    withdelta.add_edge(8, 5);
    auto big = make_code(withdelta, 8);
    REQUIRE(big);
    CHECK(big->n_physical() == 8);
    CHECK(int(big->generators.size()) == 7);

    // isolated delta is rejected
    Graph lonely(3);
    lonely.add_edge(0, 1);
    CHECK_FALSE(make_code(lonely, 2));
}

TEST_CASE("pattern recoverability") {
    auto triv = make_code(path(2), 0);
    for (int w = 0; w < 3; ++w) {
        CHECK(pattern_recoverable(*triv, w, 0));
        CHECK_FALSE(pattern_recoverable(*triv, w, 1));
    }
    // cube code: every single loss is recoverable for all logicals
    auto code = make_code(cube(), 0);
    REQUIRE(code);
    CHECK(code->n_physical() == 7);
    for (int w = 0; w < 3; ++w)
        for (int q = 0; q < 7; ++q) CHECK(pattern_recoverable(*code, w, 1u << q));
}

TEST_CASE("recoverability is monotone under subsets") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 4 + int(rng() % 4);
        Graph g(n);
        std::bernoulli_distribution coin(0.5);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (coin(rng)) g.add_edge(i, j);
        auto code = make_code(g, 0);
        if (!code) continue;
        const int m = code->n_physical();
        for (int w = 0; w < 3; ++w)
            for (uint32_t lost = 1; lost < (1u << m); ++lost) {
                if (pattern_recoverable(*code, w, lost)) continue;
                // every superset must also fail
                for (int q = 0; q < m; ++q)
                    if (!((lost >> q) & 1)) CHECK_FALSE(pattern_recoverable(*code, w, lost | (1u << q)));
            }
    }
}

TEST_CASE("loss curves and thresholds") {
    // trivial code: L(eps) = eps, threshold 0
    auto triv = make_code(path(2), 0);
    auto curve = loss_curve(*triv, 0);
    CHECK(curve.threshold == 0.0);
    CHECK(curve.logical_loss(0.3) == Catch::Approx(0.3));

    // the cube code saturates the complementarity limit
    auto code = make_code(cube(), 0);
    double t = code_threshold(*code);
    CHECK(t == Catch::Approx(0.50).margin(0.01));
    // vertex transitivity: the same threshold from every encoding vertex
    for (int delta = 1; delta < 8; ++delta)
        CHECK(code_threshold(*make_code(cube(), delta)) == Catch::Approx(t).margin(1e-9));

    // the star code dies immediately: a single leaf loss kills logical X
    CHECK(code_threshold(*make_code(star(5), 0)) == 0.0);
}

TEST_CASE("thresholds never exceed one half") {
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 25; ++trial) {
        int n = 3 + int(rng() % 5);
        Graph g(n);
        std::bernoulli_distribution coin(0.5);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (coin(rng)) g.add_edge(i, j);
        auto code = make_code(g, 0);
        if (!code) continue;
        CHECK(code_threshold(*code) <= 0.5 + 1e-12);
    }
}

TEST_CASE("the logical-Z anchor does not change the code") {
    // the stabilizer group and logical classes are independent of i*
    Graph g = Graph::from_edges(6, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {3, 4}, {4, 5}, {2, 5}});
    uint32_t inputs = g.adj[0];
    double ref = -1;
    for (int istar = 0; istar < 6; ++istar) {
        if (!((inputs >> istar) & 1)) continue;
        auto code = make_code(g, 0, istar);
        REQUIRE(code);
        double t = code_threshold(*code);
        if (ref < 0) ref = t;
        CHECK(t == Catch::Approx(ref).margin(1e-12));
    }
}

TEST_CASE("cube loss-pattern counts respect vertex transitivity") {
    auto code = make_code(cube(), 0);
    auto c0 = loss_curve(*code, 0);
    for (int delta : {1, 2, 4, 7}) {
        auto other = loss_curve(*make_code(cube(), delta), 0);
        CHECK(other.unrecoverable == c0.unrecoverable);
    }
}

TEST_CASE("search over a small table is deterministic and self-consistent") {
    const Tablebase& t8 = table(8);
    auto hits = search_codes(t8, 8, 0, 5);
    REQUIRE(!hits.empty());
    for (size_t i = 1; i < hits.size(); ++i) CHECK(hits[i - 1].threshold >= hits[i].threshold);
    // reported thresholds reproduce from scratch
    for (const auto& h : hits) {
        Graph g = t8.member(h.orbit, h.member);
        CHECK(code_threshold(*make_code(g, h.delta)) == Catch::Approx(h.threshold).margin(1e-9));
        CHECK(t8.orbits[h.orbit].depth == 0);
    }
    auto again = search_codes(t8, 8, 0, 5);
    REQUIRE(again.size() == hits.size());
    for (size_t i = 0; i < hits.size(); ++i) {
        CHECK(again[i].progenitor_g6 == hits[i].progenitor_g6);
        CHECK(again[i].delta == hits[i].delta);
    }
}
