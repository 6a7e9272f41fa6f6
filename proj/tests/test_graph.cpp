#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "gst/graph.hpp"
#include "gst/io_json.hpp"
#include "gst/orbit.hpp"

using namespace gst;

namespace {

Graph path(int n) {
    Graph g(n);
    for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    return g;
}
Graph cycle(int n) {
    Graph g = path(n);
    g.add_edge(0, n - 1);
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

Graph random_graph(int n, std::mt19937_64& rng, double p = 0.5) {
    Graph g(n);
    std::bernoulli_distribution coin(p);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (coin(rng)) g.add_edge(i, j);
    return g;
}

VertexMap random_permutation(int n, std::mt19937_64& rng) {
    VertexMap p = identity_map(n);
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

// oracle: isomorphism by searching all n! permutations
bool brute_force_isomorphic(const Graph& a, const Graph& b) {
    if (a.n != b.n) return false;
    VertexMap p = identity_map(a.n);
    do {
        if (relabel(a, p) == b) return true;
    } while (std::next_permutation(p.begin(), p.end()));
    return false;
}

}  // namespace

TEST_CASE("wl_hash is invariant under relabeling") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + int(rng() % 10);
        Graph g = random_graph(n, rng);
        Graph h = relabel(g, random_permutation(n, rng));
        CHECK(wl_hash(g) == wl_hash(h));
    }
}

TEST_CASE("wl_hash separates simple non-isomorphic cases") {
    CHECK_FALSE(wl_hash(path(3)) == wl_hash(cycle(3)));
    CHECK_FALSE(wl_hash(Graph(3)) == wl_hash(Graph(4)));  // n enters the digest
}

TEST_CASE("isomorphic finds witness maps") {
    std::mt19937_64 rng(11);
    Graph c5 = cycle(5);
    Graph c5r = relabel(c5, random_permutation(5, rng));
    auto wit = isomorphic(c5, c5r);
    REQUIRE(wit);
    CHECK(relabel(c5, *wit) == c5r);
    CHECK_FALSE(isomorphic(cycle(5), path(5)));
}

TEST_CASE("isomorphic on the two 6-vertex trees with degrees 3,2,2,1,1,1") {
    // spider: center with legs of lengths 2,2,1 vs path with a leaf off-center (legs 3,1,1)
    Graph spider = Graph::from_edges(6, {{0, 1}, {1, 2}, {0, 3}, {3, 4}, {0, 5}});
    Graph pleaf = Graph::from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {1, 5}});
    CHECK(spider.sorted_degrees() == pleaf.sorted_degrees());
    CHECK(brute_force_isomorphic(spider, pleaf) == isomorphic(spider, pleaf).has_value());
    CHECK_FALSE(isomorphic(spider, pleaf));
    std::mt19937_64 rng(3);
    Graph spider2 = relabel(spider, random_permutation(6, rng));
    CHECK(isomorphic(spider, spider2));
}

TEST_CASE("isomorphic agrees with brute force") {
    std::mt19937_64 rng(13);
    // exhaustive over all pairs of 5-vertex graphs
    auto all5 = enumerate_graphs(5);
    for (size_t i = 0; i < all5.size(); ++i)
        for (size_t j = 0; j < all5.size(); ++j) {
            bool fast = isomorphic(all5[i], all5[j]).has_value();
            bool slow = i == j;  // enumeration is already deduped by isomorphism
            INFO("i=" << i << " j=" << j);
            CHECK(fast == slow);
        }
    // randomized pairs at n = 6, 7: relabelings must match, near-misses must not
    for (int trial = 0; trial < 60; ++trial) {
        int n = 6 + int(rng() % 2);
        Graph a = random_graph(n, rng);
        Graph b = relabel(a, random_permutation(n, rng));
        auto wit = isomorphic(a, b);
        REQUIRE(wit);
        CHECK(relabel(a, *wit) == b);
        // toggle one edge: still same iff brute force says so
        int u = int(rng() % n), v = int((u + 1 + rng() % (n - 1)) % n);
        Graph c = b;
        c.toggle_edge(u, v);
        CHECK(isomorphic(a, c).has_value() == brute_force_isomorphic(a, c));
    }
}

TEST_CASE("caterpillar enumeration matches the closed-form counts") {
    const int expect[15] = {0, 1, 1, 1, 2, 3, 6, 10, 20, 36, 72, 136, 272, 528, 1056};
    int total = 0;
    for (int n = 1; n <= 14; ++n) {
        auto cats = enumerate_caterpillars(n);
        CAPTURE(n);
        CHECK(int(cats.size()) == expect[n]);
        if (n >= 4) CHECK(int(cats.size()) == (1 << (n - 4)) + (1 << (n / 2 - 2)));
        total += int(cats.size());
        for (const Graph& c : cats) CHECK(is_caterpillar_tree(c));
        // pairwise non-isomorphic
        GraphSet set;
        for (const Graph& c : cats) CHECK(set.insert(c).second);
    }
    CHECK(total == 2144);
}

TEST_CASE("caterpillar enumeration matches brute force at n = 7") {
    GraphSet brute;
    for (const Graph& g : enumerate_connected_graphs(7))
        if (g.edge_count() == 6 && is_caterpillar_tree(g)) brute.insert(g);
    auto cats = enumerate_caterpillars(7);
    CHECK(cats.size() == 10);
    CHECK(brute.size() == cats.size());
    for (const Graph& c : cats) CHECK(brute.find(c).has_value());
}

TEST_CASE("detached caterpillar sets") {
    auto two = enumerate_detached_caterpillars(2);
    REQUIRE(two.size() == 1);
    CHECK(two[0].n == 2);
    CHECK(two[0].edge_count() == 0);

    auto four = enumerate_detached_caterpillars(4);
    // K1+K1, K1+K1+K1, K1+K1+K1+K1, K1+P2, K1+P3, P2+P2, K1+K1+P2
    CHECK(four.size() == 7);
    GraphSet set;
    for (const Graph& g : four) {
        CHECK(is_caterpillar_forest(g));
        CHECK_FALSE(g.is_connected());
        CHECK(set.insert(g).second);
    }
    std::multiset<std::pair<int, int>> shapes;  // (n, edges)
    for (const Graph& g : four) shapes.insert({g.n, g.edge_count()});
    std::multiset<std::pair<int, int>> want{{2, 0}, {3, 0}, {4, 0}, {3, 1}, {4, 2}, {4, 2}, {4, 1}};
    CHECK(shapes == want);
}

TEST_CASE("induced subgraphs") {
    Graph k3 = cycle(3);
    CHECK(induced_subgraph(k3, 0b011) == path(2));
    Graph c5 = cycle(5);
    CHECK(isomorphic(induced_subgraph(c5, 0b01111), path(4)).has_value());
    for (int v = 0; v < 8; ++v) {
        Graph q = induced_subgraph(cube(), 0xffu & ~(1u << v));
        CHECK(q.n == 7);
        CHECK(q.edge_count() == 9);
    }
    // keep = V is the identity
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        Graph g = random_graph(6, rng);
        CHECK(induced_subgraph(g, g.vertex_mask()) == g);
        // commutes with relabeling, up to isomorphism of the result
        VertexMap p = random_permutation(6, rng);
        uint32_t keep = 0b10111;
        uint32_t keep_mapped = 0;
        for (int v = 0; v < 6; ++v)
            if ((keep >> v) & 1) keep_mapped |= 1u << p[v];
        CHECK(isomorphic(induced_subgraph(g, keep), induced_subgraph(relabel(g, p), keep_mapped))
                  .has_value());
    }
}

TEST_CASE("graph6 encoding round trips against frozen strings") {
    CHECK(to_graph6(cycle(5)) == "Dhc");
    CHECK(to_graph6(path(5)) == "DhC");
    CHECK(to_graph6(Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}})) == "C~");
    CHECK(to_graph6(cube()) == "Gr`HOk");
    CHECK(to_graph6(Graph(1)) == "@");
    CHECK(to_graph6(path(2)) == "A_");

    auto c5 = from_graph6("Dhc");
    REQUIRE(c5);
    CHECK(*c5 == cycle(5));
    CHECK(to_graph6(*c5) == "Dhc");

    std::mt19937_64 rng(17);
    for (int t = 0; t < 100; ++t) {
        Graph g = random_graph(1 + int(rng() % 14), rng);
        auto back = from_graph6(to_graph6(g));
        REQUIRE(back);
        CHECK(*back == g);
    }
}

TEST_CASE("graph6 parse errors carry byte offsets") {
    ParseError err;
    CHECK_FALSE(from_graph6("", &err));
    CHECK_FALSE(from_graph6("D", &err));  // truncated: needs edge bytes
    CHECK(err.offset == 1);
    std::string bad = "Dh";
    bad += char(200);  // out-of-range byte inside edge data
    CHECK_FALSE(from_graph6(bad, &err));
    CHECK(err.offset == 2);
    CHECK_FALSE(from_graph6("Dhc?", &err));  // trailing bytes
    CHECK_FALSE(from_graph6("Dhd", &err));   // nonzero padding bit
}

TEST_CASE("JSON edge list form") {
    auto p2 = graph_from_json(R"({"n":2,"edges":[[0,1]]})");
    REQUIRE(p2);
    CHECK(*p2 == path(2));
    Graph c5 = cycle(5);
    auto back = graph_from_json(graph_to_json(c5));
    REQUIRE(back);
    CHECK(*back == c5);
    ParseError err;
    CHECK_FALSE(graph_from_json(R"({"n":2,"edges":[[0,2]]})", &err));
    CHECK_FALSE(graph_from_json(R"({"edges":[]})", &err));
    // auto-detection
    CHECK(read_graph_auto("Dhc").value() == c5);
    CHECK(read_graph_auto(R"({"n":5,"edges":[[0,1],[1,2],[2,3],[3,4],[0,4]]})").value() == c5);
}

TEST_CASE("local complementation basics") {
    // K3 at vertex 0 -> path 1-0-2
    CHECK(local_complement(cycle(3), 0) == Graph::from_edges(3, {{0, 1}, {0, 2}}));
    // star center -> complete graph
    Graph k4 = Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    CHECK(local_complement(star(4), 0) == k4);
    // involution
    std::mt19937_64 rng(23);
    for (int t = 0; t < 50; ++t) {
        Graph g = random_graph(2 + int(rng() % 9), rng);
        int v = int(rng() % g.n);
        CHECK(local_complement(local_complement(g, v), v) == g);
    }
}
