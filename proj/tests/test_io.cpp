#include "doctest.h"

#include <sstream>

#include "helpers.hpp"
#include "hypermatch/io.hpp"

using namespace hypermatch;

TEST_CASE("instance round trip") {
    KPGraph g = gen_h0(3, 6);
    std::ostringstream os;
    write_instance(os, g, {"genspec: kind=h0 k=3 n=6"});
    std::istringstream is(os.str());
    KPGraph h = read_instance(is);
    CHECK(h.k() == 3);
    CHECK(h.class_sizes() == g.class_sizes());
    REQUIRE(h.edge_rows() == g.edge_rows());
    for (int id = 0; id < g.edge_rows(); ++id) {
        auto a = g.edge(id), b = h.edge(id);
        CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }
}

TEST_CASE("format errors") {
    auto parse = [](const std::string& s) {
        std::istringstream is(s);
        return read_instance(is);
    };
    CHECK_THROWS_AS(parse(""), input_error);
    CHECK_THROWS_AS(parse("# only comments\n"), input_error);
    CHECK_THROWS_AS(parse("1 4\n"), input_error);
    CHECK_THROWS_AS(parse("3 2 2 2\n0 0\n"), input_error);
    CHECK_THROWS_AS(parse("3 2 2 2\n0 0 0 0\n"), input_error);
    CHECK_THROWS_AS(parse("3 2 2 2\n0 0 0\n0 0 0\n"), input_error); // duplicate edge
    CHECK_THROWS_AS(parse("3 2 2 2\n0 0 5\n"), input_error);
}

TEST_CASE("comments and blank lines are skipped") {
    std::istringstream is("# header\n\n2 2 2\n# mid\n0 1\n \n1 0\n");
    KPGraph g = read_instance(is);
    CHECK(g.k() == 2);
    CHECK(g.edge_rows() == 2);
}
