#include "doctest.h"

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "hypermatch/generators.hpp"
#include "hypermatch/graph.hpp"
#include "hypermatch/io.hpp"
#include "hypermatch/oracle.hpp"

using namespace hypermatch;
using hmtest::v;

TEST_CASE("legality basics") {
    KPGraph g = gen_complete(3, 2);
    CHECK(g.is_legal(std::vector<Vertex>{}));
    CHECK(g.is_legal(std::vector<Vertex>{v(1, 0), v(2, 0)}));
    CHECK_FALSE(g.is_legal(std::vector<Vertex>{v(1, 0), v(1, 1), v(2, 0)}));
    CHECK_THROWS_AS((void)g.is_legal(std::vector<Vertex>{v(4, 0)}), input_error);
    CHECK_THROWS_AS((void)g.is_legal(std::vector<Vertex>{v(1, 7)}), input_error);

    KPGraph h = g.delete_vertices(std::vector<Vertex>{v(1, 0)});
    CHECK_FALSE(h.is_legal(std::vector<Vertex>{v(1, 0), v(2, 0)}));
    CHECK(h.is_legal(std::vector<Vertex>{v(1, 1), v(2, 0)}));
}

TEST_CASE("LegalSet rejects doubled classes") {
    CHECK_THROWS_AS(LegalSet({v(1, 0), v(1, 1)}), input_error);
    LegalSet s{v(2, 3), v(1, 0)};
    CHECK(s.vertices().front() == v(1, 0)); // sorted
    CHECK(s.occupies(2));
    CHECK_FALSE(s.occupies(3));
}

TEST_CASE("neighborhood on complete and empty graphs") {
    KPGraph g = gen_complete(3, 2);
    auto nb = g.neighborhood(LegalSet{v(1, 0), v(2, 0)});
    REQUIRE(nb.size() == 2);
    CHECK(nb[0] == LegalSet{v(3, 0)});
    CHECK(nb[1] == LegalSet{v(3, 1)});

    KPGraph e = gen_empty(3, 2);
    CHECK(e.neighborhood(LegalSet{v(1, 0), v(2, 0)}).empty());
    CHECK(e.neighborhood(LegalSet{v(1, 0)}).empty());

    CHECK_THROWS_AS(g.neighborhood(LegalSet{v(1, 0), v(2, 0), v(3, 0)}), input_error);
}

TEST_CASE("neighborhood of a guard vertex in h0(3,9)") {
    KPGraph g = gen_h0(3, 9);
    // u in U_1: every legal pair in V_2 x V_3 completes it
    auto nb = g.neighborhood(LegalSet{v(1, 0)});
    CHECK(nb.size() == 81);
    // cross-check one member against the edge list
    CHECK(hmtest::scan_degree(g, {v(1, 0)}) == 81);
}

TEST_CASE("degree examples") {
    KPGraph g = gen_complete(3, 5);
    CHECK(g.degree(LegalSet{v(1, 0), v(2, 3)}) == 5);

    KPGraph h0 = gen_h0(3, 9); // guards = {0,1} per class
    LegalSet avoid{v(1, 5), v(2, 6)};
    CHECK(g.degree(LegalSet{v(1, 0), v(2, 3)}) == hmtest::scan_degree(g, {v(1, 0), v(2, 3)}));
    CHECK(h0.degree(avoid) == 2);
    CHECK(h0.degree(avoid) == hmtest::scan_degree(h0, {v(1, 5), v(2, 6)}));
    LegalSet with_guard{v(1, 0), v(2, 6)};
    CHECK(h0.degree(with_guard) == 9);
    CHECK(h0.degree(with_guard) == hmtest::scan_degree(h0, {v(1, 0), v(2, 6)}));
}

TEST_CASE("min_l_degree") {
    CHECK(gen_complete(3, 4).min_l_degree(2) == 4);
    CHECK(gen_h0(3, 9).min_l_degree(2) == 2);
    CHECK(gen_empty(3, 4).min_l_degree(2) == 0);
    CHECK_THROWS_AS(gen_complete(3, 4).min_l_degree(0), input_error);
    CHECK_THROWS_AS(gen_complete(3, 4).min_l_degree(3), input_error);
    CHECK_THROWS_AS(gen_empty(3, 0).min_l_degree(1), input_error);
}

TEST_CASE("min_l_degree is a lower bound over all legal l-sets (n <= 6)") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        KPGraph g = gen_random(3, 5, 0.4, seed);
        for (int l = 1; l <= 2; ++l) {
            long long mn = g.min_l_degree(l);
            // exhaustive over single-class choices for l=1 and pairs for l=2
            if (l == 1) {
                for (int c = 1; c <= 3; ++c)
                    for (int i = 0; i < 5; ++i) CHECK(g.degree(LegalSet{v(c, i)}) >= mn);
            } else {
                for (int c1 = 1; c1 <= 3; ++c1)
                    for (int c2 = c1 + 1; c2 <= 3; ++c2)
                        for (int i = 0; i < 5; ++i)
                            for (int j = 0; j < 5; ++j)
                                CHECK(g.degree(LegalSet{v(c1, i), v(c2, j)}) >= mn);
            }
        }
    }
}

TEST_CASE("is_independent") {
    KPGraph g = gen_complete(3, 2);
    CHECK(g.is_independent(std::vector<Vertex>{}));
    CHECK_FALSE(g.is_independent(hmtest::all_vertices(g)));

    KPGraph h0 = gen_h0(3, 9);
    CHECK(h0.is_independent(hmtest::h0_outside_guards(h0, 2)));
}

TEST_CASE("independence cross-checks link_count on small random graphs") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        KPGraph g = gen_random(3, 4, 0.35, seed);
        // W = a seeded half of the vertices
        std::vector<Vertex> w;
        for (int c = 1; c <= 3; ++c)
            for (int i = 0; i < 4; ++i)
                if (prng::u01(seed, prng::kStreamTests, c * 16 + i) < 0.5) w.push_back(v(c, i));
        bool indep = g.is_independent(w);
        bool any_link = false;
        for (const Vertex& x : w) {
            std::vector<Vertex> rest;
            for (const Vertex& y : w)
                if (!(y == x)) rest.push_back(y);
            if (g.link_count(x, rest) > 0) any_link = true;
        }
        CHECK(indep == !any_link);
    }
}

TEST_CASE("link_count examples") {
    KPGraph g = gen_complete(3, 3);
    std::vector<Vertex> w23;
    for (int c = 2; c <= 3; ++c)
        for (int i = 0; i < 3; ++i) w23.push_back(v(c, i));
    CHECK(g.link_count(v(1, 0), w23) == 9);

    KPGraph e = gen_empty(3, 3);
    CHECK(e.link_count(v(1, 0), w23) == 0);

    KPGraph h0 = gen_h0(3, 9);
    std::vector<Vertex> w;
    for (int c = 2; c <= 3; ++c)
        for (int i = 2; i < 9; ++i) w.push_back(v(c, i));
    CHECK(h0.link_count(v(1, 0), w) == 49);

    CHECK_THROWS_AS(g.link_count(v(2, 0), w23), input_error);
}

TEST_CASE("delete_vertices masks queries") {
    KPGraph g = gen_complete(3, 3);

    SUBCASE("empty deletion changes nothing") {
        KPGraph h = g.delete_vertices(std::vector<Vertex>{});
        CHECK(h.alive_edge_count() == g.alive_edge_count());
        CHECK(h.min_l_degree(2) == g.min_l_degree(2));
    }
    SUBCASE("deleting a whole class breaks min_l_degree") {
        std::vector<Vertex> x{v(1, 0), v(1, 1), v(1, 2)};
        KPGraph h = g.delete_vertices(x);
        CHECK(h.effective_size(1) == 0);
        CHECK(h.class_size(1) == 3);
        CHECK_THROWS_AS(h.min_l_degree(2), input_error);
    }
    SUBCASE("effective matching number drops") {
        KPGraph h = g.delete_vertices(std::vector<Vertex>{v(1, 0)});
        CHECK(max_matching_exact(h).size == 2);
    }
}

TEST_CASE("masked view agrees with a rebuilt instance") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        KPGraph g = gen_random(3, 5, 0.5, seed);
        // delete one seeded vertex per class
        std::vector<Vertex> xs;
        for (int c = 1; c <= 3; ++c)
            xs.push_back(v(c, int(prng::bounded(seed, prng::kStreamTests, 7 + c, 5))));
        KPGraph masked = g.delete_vertices(xs);

        // rebuild from scratch with reindexed vertices
        std::vector<std::vector<int>> remap(3);
        std::vector<int> new_sizes(3);
        for (int c = 1; c <= 3; ++c) {
            remap[c - 1].assign(5, -1);
            int next = 0;
            for (int i = 0; i < 5; ++i)
                if (!masked.is_deleted(v(c, i))) remap[c - 1][i] = next++;
            new_sizes[c - 1] = next;
        }
        std::vector<std::vector<int>> edges;
        for (int id = 0; id < g.edge_rows(); ++id) {
            if (!masked.edge_alive(id)) continue;
            auto e = g.edge(id);
            edges.push_back({remap[0][e[0]], remap[1][e[1]], remap[2][e[2]]});
        }
        KPGraph rebuilt(3, new_sizes, edges);

        CHECK(masked.alive_edge_count() == rebuilt.alive_edge_count());
        CHECK(max_matching_exact(masked).size == max_matching_exact(rebuilt).size);
        bool any_empty = false;
        for (int c = 1; c <= 3; ++c)
            if (rebuilt.class_size(c) == 0) any_empty = true;
        if (!any_empty) CHECK(masked.min_l_degree(2) == rebuilt.min_l_degree(2));
        for (int c = 1; c <= 3; ++c) {
            for (int i = 0; i < 5; ++i) {
                if (masked.is_deleted(v(c, i))) continue;
                CHECK(masked.degree(LegalSet{v(c, i)}) ==
                      rebuilt.degree(LegalSet{v(c, remap[c - 1][i])}));
            }
        }
    }
}

TEST_CASE("neighborhood members extend to edges") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        KPGraph g = gen_random(3, 4, 0.5, seed);
        for (int c = 1; c <= 3; ++c) {
            for (int i = 0; i < 4; ++i) {
                LegalSet s{v(c, i)};
                for (const LegalSet& u : g.neighborhood(s)) {
                    std::vector<Vertex> both = s.vertices();
                    both.insert(both.end(), u.vertices().begin(), u.vertices().end());
                    CHECK(g.is_legal(both));
                    std::vector<int> tuple(3);
                    for (const Vertex& x : both) tuple[x.cls - 1] = x.idx;
                    CHECK(g.find_edge(tuple).has_value());
                }
                CHECK((long long)g.neighborhood(s).size() == g.degree(s));
            }
        }
    }
}

TEST_CASE("co-degree fast path equals scan") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        KPGraph g = gen_random(3, 6, 0.4, seed);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) {
                CHECK(g.degree(LegalSet{v(1, i), v(2, j)}) ==
                      hmtest::scan_degree(g, {v(1, i), v(2, j)}));
                CHECK(g.degree(LegalSet{v(1, i), v(3, j)}) ==
                      hmtest::scan_degree(g, {v(1, i), v(3, j)}));
            }
    }
}

TEST_CASE("duplicate edges rejected") {
    CHECK_THROWS_AS(hmtest::from_edges(3, 2, {{0, 0, 0}, {0, 0, 0}}), input_error);
    CHECK_THROWS_AS(hmtest::from_edges(3, 2, {{0, 0}}), input_error);
    CHECK_THROWS_AS(hmtest::from_edges(3, 2, {{0, 0, 2}}), input_error);
}

TEST_CASE("matching bookkeeping") {
    KPGraph g = gen_complete(3, 3);
    Matching m(g);
    int e0 = *g.find_edge(std::vector<int>{0, 0, 0});
    int e1 = *g.find_edge(std::vector<int>{1, 1, 1});
    int clash = *g.find_edge(std::vector<int>{1, 2, 2});
    m.add(g, e0);
    m.add(g, e1);
    CHECK(m.size() == 2);
    CHECK(m.covers(v(1, 1)));
    CHECK(m.conflicts(g, clash));
    CHECK_THROWS_AS(m.add(g, clash), internal_error);
    m.validate(g);
    m.remove(g, e1);
    CHECK_FALSE(m.covers(v(1, 1)));
    CHECK(m.uncovered_count(g, 1) == 2);
    m.validate(g);
}
