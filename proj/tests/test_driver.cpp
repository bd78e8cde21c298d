#include "doctest.h"

#include <sstream>

#include "helpers.hpp"
#include "hypermatch/driver.hpp"

using namespace hypermatch;

TEST_CASE("solve on the complete graph reaches the target") {
    KPGraph g = gen_complete(3, 6);
    SolveReport rep = solve(g);
    rep.matching.validate(g);
    CHECK(rep.size >= rep.target);
    CHECK(rep.hypothesis_met);
    CHECK_FALSE(rep.stage_log.empty());
}

TEST_CASE("solve on h0(3,9): warning, extremal failure, exact fallback") {
    KPGraph g = gen_h0(3, 9);
    SolveReport rep = solve(g);
    CHECK_FALSE(rep.hypothesis_met); // codegree 2 < 3
    CHECK(rep.route == SolveRoute::oracle_fallback);
    CHECK(rep.size == 6);
    CHECK(rep.size_exact);
    CHECK(rep.findings);
    bool witness_found = false, extremal_failed = false;
    for (const std::string& s : rep.stage_log) {
        if (s.rfind("witness: found", 0) == 0) witness_found = true;
        if (s.rfind("extremal: failed", 0) == 0) extremal_failed = true;
    }
    CHECK(witness_found);
    CHECK(extremal_failed);
}

TEST_CASE("solve on a floored instance stays within the oracle optimum") {
    KPGraph g = gen_codegree_floor(3, 9, 3, 4);
    REQUIRE(g.min_l_degree(2) >= 3);
    SolveReport rep = solve(g);
    rep.matching.validate(g);
    auto nu = max_matching_exact(g);
    REQUIRE(nu.exact);
    CHECK(nu.size == 9); // this instance has a perfect matching
    CHECK(rep.size <= nu.size);
    CHECK(rep.size >= 8);
}

TEST_CASE("forced routes") {
    KPGraph g = gen_complete(3, 6);
    SolveParams p;
    p.force_route = SolveParams::Route::nonextremal;
    SolveReport rep = solve(g, p);
    rep.matching.validate(g);
    CHECK(rep.size >= 5);
    CHECK((rep.route == SolveRoute::nonextremal || rep.route == SolveRoute::oracle_fallback));

    SolveParams q;
    q.force_route = SolveParams::Route::extremal;
    SolveReport rep2 = solve(g, q);
    CHECK(rep2.size >= 5);
}

TEST_CASE("check_theorem verdicts") {
    CHECK(check_theorem(gen_h0(3, 9)).verdict == TheoremCheck::Verdict::hypothesis_false);
    auto ok = check_theorem(gen_complete(3, 5));
    CHECK(ok.verdict == TheoremCheck::Verdict::confirmed);
    CHECK(ok.nu == 5);
    CHECK(ok.nu_exact);
}

TEST_CASE("scan rows and determinism") {
    SUBCASE("empty grid") {
        std::ostringstream os;
        write_scan_csv(os, scan({}, {}));
        CHECK(os.str() == "k,n,gen,seed,delta,route,size,nu_exact,verdict,ms\n");
    }
    SUBCASE("h0 sweep: the gap appears exactly off the residue") {
        std::vector<GenSpec> grid;
        for (int n = 6; n <= 12; ++n) {
            GenSpec s;
            s.kind = GenKind::h0;
            s.k = 3;
            s.n = n;
            grid.push_back(s);
        }
        SolveParams p;
        auto rows = scan(grid, p);
        for (const ScanRow& r : rows) {
            INFO("n = ", r.spec.n);
            int u = h0_guard_size(3, r.spec.n);
            REQUIRE(r.nu >= 0);
            CHECK(r.nu == 3LL * u);
            CHECK(r.delta == u);
            bool gap = r.nu < r.spec.n - 1;
            CHECK(gap == (r.spec.n % 3 != 1));
        }
        std::ostringstream a, b;
        write_scan_csv(a, rows);
        write_scan_csv(b, scan(grid, p));
        CHECK(a.str() == b.str());
        // parallel execution emits the same bytes in the same order
        std::ostringstream c;
        write_scan_csv(c, scan(grid, p, 4));
        CHECK(a.str() == c.str());
    }
}

TEST_CASE("report text is stable and carries the stage log") {
    KPGraph g = gen_h0(3, 9);
    SolveReport rep = solve(g);
    std::string t1 = report_text(rep);
    std::string t2 = report_text(solve(g));
    CHECK(t1 == t2);
    CHECK(t1.find("route: oracle_fallback") != std::string::npos);
    CHECK(t1.find("fallback: oracle exact") != std::string::npos);
    CHECK(report_csv(rep, 3, 9).find("3,9,oracle_fallback,6,8,1,") != std::string::npos);
}
