#include "doctest.h"

#include "helpers.hpp"
#include "hypermatch/extremal.hpp"
#include "hypermatch/oracle.hpp"

using namespace hypermatch;
using hmtest::v;

namespace {

std::vector<std::vector<int>> first_indices(int k, int count) {
    std::vector<std::vector<int>> w(k);
    for (int c = 0; c < k; ++c)
        for (int i = 0; i < count; ++i) w[c].push_back(i);
    return w;
}

} // namespace

TEST_CASE("residual arithmetic") {
    // frozen worked examples
    CHECK(residual_slice_size(3, 9, 0.1) == 3);
    CHECK(residual_boost_r(3, 9, 0.1) == 0);
    CHECK(residual_split_s(3, 9) == 3);
    CHECK(residual_m0_size(3, 9, 0.1) == 0);
    CHECK(residual_n_prime(3, 9, 0.1) == 9);

    CHECK(residual_boost_r(3, 12, 0.05) == 0);
    CHECK(residual_m0_size(3, 12, 0.05) == 0);
    CHECK(residual_n_prime(3, 12, 0.05) == 12);

    CHECK(residual_boost_r(3, 30, 0.2) == 6);
    CHECK(residual_split_s(3, 30) == 3);
    CHECK(residual_m0_size(3, 30, 0.2) == 18);
    CHECK(residual_n_prime(3, 30, 0.2) == 12);

    // identity sweep: n - m0 = k * |A'| whenever the target is feasible
    for (int k : {3, 4})
        for (int n = 5; n <= 40; ++n)
            for (double eps : {0.05, 0.1, 0.2}) {
                if (eps >= 1.0 / k) continue;
                if (residual_m0_size(k, n, eps) < 0) continue;
                CHECK(residual_n_prime(k, n, eps) == (long long)k * residual_slice_size(k, n, eps));
            }
}

TEST_CASE("strict parameter regime") {
    CHECK_FALSE(strict_params_ok(3, 0.1, 0.2)); // desk defaults are far outside
    CHECK(strict_params_ok(3, 1e-7, 3e-4));
    CHECK_FALSE(strict_params_ok(3, 3e-4, 1e-7)); // gamma must stay below eps
    KPGraph g = gen_complete(3, 6);
    ExtremalOptions strict;
    strict.strict_constants = true;
    CHECK_THROWS_AS(run_extremal(g, first_indices(3, 4), 0.1, 0.2, strict), input_error);
}

TEST_CASE("select_a on the complete graph keeps every non-witness vertex") {
    KPGraph g = gen_complete(3, 6);
    ExtremalRun run;
    run.gamma = run.eps = 0.05;
    run.n = 6;
    REQUIRE_FALSE(stage_trim_witness(g, run, first_indices(3, 4)).has_value());
    REQUIRE_FALSE(stage_select_a(g, run).has_value());
    for (int c = 0; c < 3; ++c) {
        CHECK(run.a[c] == std::vector<int>{4, 5});
        CHECK(run.a_prime[c] == std::vector<int>{4, 5});
    }
}

TEST_CASE("select_a failure carries per-class pool sizes") {
    KPGraph g = gen_empty(3, 6);
    ExtremalRun run;
    run.gamma = run.eps = 0.05;
    run.n = 6;
    REQUIRE_FALSE(stage_trim_witness(g, run, first_indices(3, 4)).has_value());
    auto f = stage_select_a(g, run);
    REQUIRE(f.has_value());
    CHECK(f->stage == "select_a");
    CHECK_FALSE(f->values.empty());
}

TEST_CASE("select_a on h0(3,9): guards are link-rich but too few") {
    KPGraph g = gen_h0(3, 9);
    ExtremalRun run;
    run.gamma = run.eps = 0.1;
    run.n = 9;
    // witness = everything outside the guard blocks
    std::vector<std::vector<int>> wit(3);
    for (int c = 0; c < 3; ++c)
        for (int i = 2; i < 9; ++i) wit[c].push_back(i);
    REQUIRE_FALSE(stage_trim_witness(g, run, wit).has_value());
    auto f = stage_select_a(g, run);
    REQUIRE(f.has_value()); // |A_i| = 2 guards < ceil(0.7*... ) = 3
    CHECK(f->stage == "select_a");
    double need = 0, a1 = -1;
    for (auto& [k, val] : f->values) {
        if (k == "need") need = val;
        if (k == "|A_1|") a1 = val;
    }
    CHECK(need == 3);
    CHECK(a1 == 2);
}

TEST_CASE("balance loop exits immediately when the identity already holds") {
    KPGraph g = gen_complete(3, 12);
    ExtremalRun run;
    run.gamma = run.eps = 0.05;
    run.n = 12;
    run.m0 = Matching(g);
    run.m1 = Matching(g);
    // synthetic residuals: A' = {10,11} per class, W = {0..3} per class
    run.a_prime.assign(3, {10, 11});
    run.w.assign(3, {0, 1, 2, 3});
    run.a_prime_bits.clear();
    run.w_bits.clear();
    for (int c = 0; c < 3; ++c) {
        DynBits a(12), w(12);
        a.set(10);
        a.set(11);
        for (int i = 0; i < 4; ++i) w.set(i);
        run.a_prime_bits.push_back(a);
        run.w_bits.push_back(w);
    }
    REQUIRE_FALSE(stage_balance_m2(g, run).has_value());
    CHECK(run.l == 1); // (k-1)(6-1) = 10 = 12 - 2
    CHECK(run.m2.size() == 0);
    CHECK_FALSE(run.degenerate_l);
    CHECK(run.delta_trace == std::vector<long long>{0});
}

TEST_CASE("balance loop flags the all-zero degenerate case") {
    KPGraph g = gen_complete(3, 6);
    ExtremalRun run;
    run.gamma = run.eps = 0.05;
    run.n = 6;
    run.m0 = Matching(g);
    run.m1 = Matching(g);
    run.a_prime.assign(3, {});
    run.w.assign(3, {});
    run.a_prime_bits.assign(3, DynBits(6));
    run.w_bits.assign(3, DynBits(6));
    REQUIRE_FALSE(stage_balance_m2(g, run).has_value());
    // the split identity degenerates to l = 1 when every residual is zero
    CHECK(run.l == 1);
    CHECK(run.degenerate_l);
}

TEST_CASE("partition_f balances blocks") {
    SUBCASE("all singletons") {
        std::vector<std::vector<int>> a2{{0}, {0}, {0}};
        std::vector<std::vector<int>> w2{{1, 2}, {1, 2}, {1, 2}};
        auto r = partition_f(a2, w2);
        REQUIRE(std::holds_alternative<std::vector<std::vector<std::vector<int>>>>(r));
        auto f = std::get<0>(r);
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 3; ++c) CHECK(f[i][c].size() == 1);
        // class 2 hands its W vertices to blocks 1 and 3 in order
        CHECK(f[0][1] == std::vector<int>{1});
        CHECK(f[2][1] == std::vector<int>{2});
    }
    SUBCASE("empty residual") {
        auto r = partition_f({{}, {}, {}}, {{}, {}, {}});
        REQUIRE(std::holds_alternative<std::vector<std::vector<std::vector<int>>>>(r));
    }
    SUBCASE("uneven blocks") {
        std::vector<std::vector<int>> a2{{0, 1}, {0}, {0}};
        std::vector<std::vector<int>> w2{{2, 3}, {1, 2, 3}, {1, 2, 3}};
        auto r = partition_f(a2, w2);
        REQUIRE(std::holds_alternative<std::vector<std::vector<std::vector<int>>>>(r));
        auto f = std::get<0>(r);
        CHECK(f[0][0] == std::vector<int>{0, 1});
        CHECK(f[0][1] == std::vector<int>{1, 2});
        CHECK(f[1][1] == std::vector<int>{0});
        CHECK(f[2][1] == std::vector<int>{3});
    }
    SUBCASE("imbalance is rejected") {
        auto r = partition_f({{0}, {0}, {0}}, {{1}, {1, 2}, {1, 2}});
        REQUIRE(std::holds_alternative<StageFailure>(r));
    }
}

TEST_CASE("full extremal run on complete graphs") {
    for (int n : {6, 9, 12, 15}) {
        KPGraph g = gen_complete(3, n);
        long long trim = ceil_tol((1.0 - 1.0 / 3 - 0.05) * n);
        auto res = run_extremal(g, first_indices(3, int(trim)), 0.05, 0.05);
        INFO("n = ", n);
        REQUIRE(res.matching.has_value());
        CHECK(res.matching->size() == n - 1);
        res.matching->validate(g);
        // misses exactly the leave-out set
        for (const Vertex& x : res.run.leave_out.vertices()) CHECK_FALSE(res.matching->covers(x));
        // residual identities
        CHECK(res.run.n_prime == 3 * residual_slice_size(3, n, 0.05));
        long long sum_a = 0;
        for (auto& a : res.run.a2) sum_a += (long long)a.size();
        CHECK(sum_a == res.run.n_second);
        for (int c = 0; c < 3; ++c)
            CHECK((long long)res.run.w2[c].size() == sum_a - (long long)res.run.a2[c].size());
        for (long long d : res.run.delta_trace) CHECK(d % 3 == 0);
    }
}

TEST_CASE("full extremal run on a complete 4-partite graph") {
    KPGraph g = gen_complete(4, 8);
    long long trim = ceil_tol((1.0 - 0.25 - 0.05) * 8);
    auto res = run_extremal(g, first_indices(4, int(trim)), 0.05, 0.05);
    REQUIRE(res.matching.has_value());
    CHECK(res.matching->size() == 7);
    res.matching->validate(g);
}

TEST_CASE("extremal run fails on h0 and empty graphs with evidence") {
    KPGraph h0 = gen_h0(3, 9);
    std::vector<std::vector<int>> wit(3);
    for (int c = 0; c < 3; ++c)
        for (int i = 2; i < 9; ++i) wit[c].push_back(i);

    auto r1 = run_extremal(h0, wit, 0.1, 0.1);
    REQUIRE(r1.failure.has_value());
    CHECK(r1.failure->stage == "select_a");
    CHECK_FALSE(r1.failure->values.empty());

    // desk defaults pass the link filter but die at the boost
    auto r2 = run_extremal(h0, wit, 0.1, 0.2);
    REQUIRE(r2.failure.has_value());
    CHECK(r2.failure->stage == "build_m0");

    auto r3 = run_extremal(gen_empty(3, 9), first_indices(3, 9), 0.1, 0.2);
    REQUIRE(r3.failure.has_value());
}

TEST_CASE("split identity on synthetic residual sizes") {
    // (k-1)(sumA - l) == sumW - (k-l) for exactly one l when sums are consistent
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        int k = 3;
        // build per-class residuals with equal per-class totals
        std::vector<long long> a2(k), w2(k);
        long long total = 4 + (long long)prng::bounded(seed, prng::kStreamTests, 1, 5);
        for (int c = 0; c < k; ++c) {
            a2[c] = (long long)prng::bounded(seed, prng::kStreamTests, 10 + c, total + 1);
            w2[c] = total - a2[c];
        }
        long long sum_a = a2[0] + a2[1] + a2[2];
        long long sum_w = w2[0] + w2[1] + w2[2];
        long long delta = 2 * sum_a - sum_w;
        // divisibility: per-class totals equal forces delta = k*sumA - k*total
        CHECK(delta % k == 0);
        int hits = 0;
        for (int l = 1; l <= k - 1; ++l)
            if (2 * (sum_a - l) == sum_w - (k - l)) ++hits;
        CHECK(hits <= 1);
        if (delta == k * 0) CHECK(delta % k == 0);
    }
}
