#pragma once

// Shared test fixtures: small instance builders and independent re-derivations
// used as oracles against the library code.

#include <vector>

#include "hypermatch/generators.hpp"
#include "hypermatch/graph.hpp"
#include "hypermatch/prng.hpp"

namespace hmtest {

using namespace hypermatch;

inline Vertex v(int cls, int idx) { return Vertex{cls, idx}; }

inline KPGraph from_edges(int k, int n, std::vector<std::vector<int>> edges) {
    return KPGraph(k, std::vector<int>(k, n), edges);
}

// Independent edge scan: number of alive edges containing every vertex of s.
inline long long scan_degree(const KPGraph& g, const std::vector<Vertex>& s) {
    long long n = 0;
    for (int id = 0; id < g.edge_rows(); ++id) {
        if (!g.edge_alive(id)) continue;
        auto e = g.edge(id);
        bool ok = true;
        for (const Vertex& x : s)
            if (e[x.cls - 1] != x.idx) {
                ok = false;
                break;
            }
        if (ok) ++n;
    }
    return n;
}

// All vertices of all classes.
inline std::vector<Vertex> all_vertices(const KPGraph& g) {
    std::vector<Vertex> out;
    for (int c = 1; c <= g.k(); ++c)
        for (int i = 0; i < g.class_size(c); ++i) out.push_back(v(c, i));
    return out;
}

// Union of V_i - U_i for generated h0 instances.
inline std::vector<Vertex> h0_outside_guards(const KPGraph& g, int guard) {
    std::vector<Vertex> out;
    for (int c = 1; c <= g.k(); ++c)
        for (int i = guard; i < g.class_size(c); ++i) out.push_back(v(c, i));
    return out;
}

} // namespace hmtest
