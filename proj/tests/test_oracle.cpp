#include "doctest.h"

#include "helpers.hpp"
#include "hypermatch/oracle.hpp"

using namespace hypermatch;
using hmtest::v;

TEST_CASE("exact matching on reference instances") {
    CHECK(max_matching_exact(gen_complete(3, 4)).size == 4);
    CHECK(max_matching_exact(gen_empty(3, 4)).size == 0);

    auto h0 = max_matching_exact(gen_h0(3, 9));
    CHECK(h0.size == 6); // k * floor((n-1)/k)
    CHECK(h0.exact);

    CHECK(max_matching_exact(gen_h0(3, 4)).size == 3);
    CHECK(max_matching_exact(gen_h0(2, 3)).size == 2);
    CHECK(naive_max_matching(gen_h0(2, 3)) == 2);
    CHECK(naive_max_matching(gen_h0(2, 5)) == 4);
}

TEST_CASE("budget exhaustion is reported, not hidden") {
    auto r = max_matching_exact(gen_complete(3, 4), 2);
    CHECK_FALSE(r.exact);
    CHECK(r.size <= 4);
    r.matching.validate(gen_complete(3, 4));
}

TEST_CASE("branch-and-bound equals naive enumeration on random instances") {
    int done = 0;
    for (std::uint64_t seed = 0; done < 200; ++seed) {
        REQUIRE(seed < 2000);
        KPGraph g = gen_random(3, 4, 0.25, seed);
        if (g.edge_rows() > 20) continue;
        ++done;
        auto bb = max_matching_exact(g);
        REQUIRE(bb.exact);
        CHECK(bb.size == naive_max_matching(g));
        bb.matching.validate(g);
    }
}

TEST_CASE("adding an edge never decreases the matching number") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        KPGraph g = gen_random(3, 4, 0.2, seed);
        long long before = max_matching_exact(g).size;
        // first absent tuple, seeded offset
        std::vector<std::vector<int>> edges;
        for (int id = 0; id < g.edge_rows(); ++id) {
            auto e = g.edge(id);
            edges.push_back({e[0], e[1], e[2]});
        }
        std::uint64_t off = prng::bounded(seed, prng::kStreamTests, 0, 64);
        bool added = false;
        for (std::uint64_t t = 0; t < 64 && !added; ++t) {
            std::uint64_t r = (t + off) % 64;
            std::vector<int> tup{int(r / 16), int((r / 4) % 4), int(r % 4)};
            if (!g.find_edge(tup)) {
                edges.push_back(tup);
                added = true;
            }
        }
        if (!added) continue; // complete already
        KPGraph g2(3, std::vector<int>(3, 4), edges);
        CHECK(max_matching_exact(g2).size >= before);
    }
}

TEST_CASE("witness search: exact certificates") {
    SUBCASE("edgeless graph: everything qualifies") {
        auto r = find_extremal_witness(gen_empty(3, 6), 0.3);
        REQUIRE(r.witness.has_value());
        CHECK(r.exhaustive);
        for (long long c : r.witness->per_class_counts) CHECK(c == 6);
        CHECK(witness_sound(gen_empty(3, 6), *r.witness));
    }
    SUBCASE("complete graph: certified absence at gamma = 0") {
        auto r = find_extremal_witness(gen_complete(3, 3), 0.0);
        CHECK_FALSE(r.witness.has_value());
        CHECK(r.exhaustive);
    }
    SUBCASE("h0(3,9) at gamma 0.2: the off-guard block is a witness") {
        KPGraph g = gen_h0(3, 9);
        auto r = find_extremal_witness(g, 0.2);
        REQUIRE(r.witness.has_value());
        CHECK(witness_sound(g, *r.witness));
        // threshold ceil(0.8 * 2 * 9 / 3) = 5
        CHECK(extremal_threshold(3, 9, 0.2) == 5);
        for (long long c : r.witness->per_class_counts) CHECK(c >= 5);
    }
}

TEST_CASE("witness search: heuristic route flags itself") {
    // n above the exact cap -> heuristic; complete graphs admit no witness
    auto r = find_extremal_witness(gen_complete(3, 12), 0.1, 10);
    CHECK_FALSE(r.witness.has_value());
    CHECK_FALSE(r.exhaustive);

    auto ok = find_extremal_witness(gen_h0(3, 12), 0.2, 10);
    if (ok.witness) CHECK(witness_sound(gen_h0(3, 12), *ok.witness));
}

TEST_CASE("witness soundness on random instances") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        KPGraph g = gen_random(3, 6, 0.1, seed);
        auto r = find_extremal_witness(g, 0.25);
        if (r.witness) CHECK(witness_sound(g, *r.witness));
    }
}

TEST_CASE("degree-sum precheck") {
    CHECK(degree_split_precheck(gen_complete(3, 3), 1, 0.5));
    CHECK_FALSE(degree_split_precheck(gen_empty(3, 3), 1, 0.1));
    CHECK_FALSE(degree_split_precheck(gen_h0(3, 9), 2, 0.1));
    CHECK_THROWS_AS(degree_split_precheck(gen_complete(3, 3), 3, 0.1), input_error);
}

TEST_CASE("precheck true lines up with perfect matchings at small n") {
    int violations = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        KPGraph g = gen_random(3, 4, 0.75, seed);
        if (!degree_split_precheck(g, 1, 0.1)) continue;
        if (max_matching_exact(g).size != 4) ++violations;
    }
    // consistency finding, not a hard guarantee at this scale
    WARN_MESSAGE(violations == 0, "precheck-true instances without perfect matching: ",
                 violations);
}
