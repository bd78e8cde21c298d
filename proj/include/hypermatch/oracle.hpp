#pragma once

// Ground-truth computations: branch-and-bound maximum matching, a naive
// all-subset enumerator that exists solely to cross-check the branch-and-bound,
// exact/heuristic search for large independent witnesses, and the split
// degree-sum precheck predicate.

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "graph.hpp"
#include "numeric.hpp"

namespace hypermatch {

struct OracleResult {
    long long size = 0;
    Matching matching;
    bool exact = false; // false when the node budget ran out; size is then a lower bound
    std::uint64_t nodes = 0;
};

namespace detail {

// Branch on one free vertex per node: either one of its usable edges joins the
// matching, or the vertex stays uncovered for the rest of the subtree. Two
// upper bounds prune: the smallest per-class free count, and the size of a
// greedy hitting set of the usable edges (disjoint edges each spend one
// hitting-set vertex).
struct MatchSearch {
    const KPGraph& g;
    std::uint64_t budget;
    std::uint64_t nodes = 0;
    bool exact = true;

    int k;
    std::vector<DynBits> covered, skipped;
    std::vector<int> cur, best;
    long long global_ub;

    explicit MatchSearch(const KPGraph& graph, std::uint64_t node_budget)
        : g(graph), budget(node_budget), k(graph.k()) {
        covered.reserve(k);
        skipped.reserve(k);
        for (int c = 1; c <= k; ++c) {
            covered.emplace_back(g.class_size(c));
            skipped.emplace_back(g.class_size(c));
        }
        global_ub = std::numeric_limits<long long>::max();
        for (int c = 1; c <= k; ++c)
            global_ub = std::min(global_ub, (long long)g.effective_size(c));
    }

    bool free_vertex(int cls, int idx) const {
        return !g.deleted_mask(cls).test(idx) && !covered[cls - 1].test(idx) &&
               !skipped[cls - 1].test(idx);
    }

    bool usable(int id) const {
        auto e = g.edge(id);
        for (int c = 1; c <= k; ++c)
            if (!free_vertex(c, e[c - 1])) return false;
        return true;
    }

    int free_count(int cls) const {
        return g.effective_size(cls) - covered[cls - 1].count() - skipped[cls - 1].count();
    }

    void take(int id) {
        auto e = g.edge(id);
        for (int c = 1; c <= k; ++c) covered[c - 1].set(e[c - 1]);
        cur.push_back(id);
    }
    void untake(int id) {
        auto e = g.edge(id);
        for (int c = 1; c <= k; ++c) covered[c - 1].reset(e[c - 1]);
        cur.pop_back();
    }

    // Size of a greedy hitting set of the usable edges, stopping early once it
    // can no longer prune (bail > cap means "no prune").
    long long hitting_bound(long long cap) {
        std::vector<int> es;
        for (int id = 0; id < g.edge_rows(); ++id)
            if (usable(id)) es.push_back(id);
        if (es.empty()) return 0;

        std::vector<std::vector<int>> cnt(k);
        for (int c = 1; c <= k; ++c) cnt[c - 1].assign(g.class_size(c), 0);
        for (int id : es) {
            auto e = g.edge(id);
            for (int c = 1; c <= k; ++c) ++cnt[c - 1][e[c - 1]];
        }
        std::vector<char> alive(es.size(), 1);
        long long t = 0;
        std::size_t remaining = es.size();
        while (remaining > 0) {
            if (t > cap) return t;
            int bc = -1, bi = -1, bv = 0;
            for (int c = 1; c <= k; ++c)
                for (int i = 0; i < g.class_size(c); ++i)
                    if (cnt[c - 1][i] > bv) {
                        bv = cnt[c - 1][i];
                        bc = c;
                        bi = i;
                    }
            ++t;
            for (std::size_t j = 0; j < es.size(); ++j) {
                if (!alive[j]) continue;
                auto e = g.edge(es[j]);
                if (e[bc - 1] == bi) {
                    alive[j] = 0;
                    --remaining;
                    for (int c = 1; c <= k; ++c) --cnt[c - 1][e[c - 1]];
                }
            }
        }
        return t;
    }

    void dfs() {
        if (++nodes > budget) {
            exact = false;
            return;
        }
        if ((long long)cur.size() > (long long)best.size()) best = cur;
        if ((long long)best.size() >= global_ub) return;

        // Free vertices with no usable edge can never be covered: skip them all
        // at once (tightens the class-count bound), then re-select.
        std::vector<Vertex> zeros;
        int selc = -1, seli = -1;
        long long seldeg = std::numeric_limits<long long>::max();
        for (int c = 1; c <= k; ++c) {
            for (int i = 0; i < g.class_size(c); ++i) {
                if (!free_vertex(c, i)) continue;
                long long d = 0;
                for (int id : g.edges_at(Vertex{c, i}))
                    if (usable(id)) ++d;
                if (d == 0) {
                    zeros.push_back(Vertex{c, i});
                } else if (d < seldeg) {
                    seldeg = d;
                    selc = c;
                    seli = i;
                }
            }
        }
        if (!zeros.empty()) {
            for (Vertex v : zeros) skipped[v.cls - 1].set(v.idx);
            dfs();
            for (Vertex v : zeros) skipped[v.cls - 1].reset(v.idx);
            return;
        }
        if (selc == -1) return; // no usable edge anywhere: leaf

        long long slack = (long long)best.size() - (long long)cur.size();
        long long ub = std::numeric_limits<long long>::max();
        for (int c = 1; c <= k; ++c) ub = std::min(ub, (long long)free_count(c));
        if (ub <= slack) return;
        if (hitting_bound(slack) <= slack) return;

        for (int id : g.edges_at(Vertex{selc, seli})) {
            if (!usable(id)) continue;
            take(id);
            dfs();
            untake(id);
            if (!exact || (long long)best.size() >= global_ub) return;
        }
        skipped[selc - 1].set(seli);
        dfs();
        skipped[selc - 1].reset(seli);
    }
};

} // namespace detail

inline OracleResult max_matching_exact(const KPGraph& g, std::uint64_t node_budget = 10'000'000) {
    detail::MatchSearch s(g, node_budget);
    s.dfs();
    OracleResult r;
    r.size = (long long)s.best.size();
    r.exact = s.exact;
    r.nodes = s.nodes;
    r.matching = Matching(g);
    for (int id : s.best) r.matching.add(g, id);
    r.matching.validate(g);
    return r;
}

// Dumb include/exclude recursion over the edge list. Exists to validate the
// branch-and-bound, so it shares no logic with it.
inline long long naive_max_matching(const KPGraph& g, int max_edges = 25) {
    std::vector<int> ids;
    for (int id = 0; id < g.edge_rows(); ++id)
        if (g.edge_alive(id)) ids.push_back(id);
    if (int(ids.size()) > max_edges)
        throw input_error("naive_max_matching: too many edges (" + std::to_string(ids.size()) +
                          " > " + std::to_string(max_edges) + ")");

    std::vector<DynBits> used;
    for (int c = 1; c <= g.k(); ++c) used.emplace_back(g.class_size(c));
    long long best = 0;
    auto rec = [&](auto&& self, std::size_t at, long long have) -> void {
        if (at == ids.size()) {
            if (have > best) best = have;
            return;
        }
        self(self, at + 1, have);
        auto e = g.edge(ids[at]);
        for (int c = 1; c <= g.k(); ++c)
            if (used[c - 1].test(e[c - 1])) return;
        for (int c = 1; c <= g.k(); ++c) used[c - 1].set(e[c - 1]);
        self(self, at + 1, have + 1);
        for (int c = 1; c <= g.k(); ++c) used[c - 1].reset(e[c - 1]);
    };
    rec(rec, 0, 0);
    return best;
}

// Independent set with at least ceil((1-gamma)(k-1)n/k) vertices per class.
struct ExtremalWitness {
    std::vector<std::vector<int>> per_class; // ascending indices
    std::vector<long long> per_class_counts;
    double gamma = 0;
};

struct WitnessSearch {
    std::optional<ExtremalWitness> witness;
    bool exhaustive = false; // true: an empty result certifies absence
};

inline long long extremal_threshold(int k, int n, double gamma) {
    return ceil_tol((1.0 - gamma) * (k - 1) * double(n) / double(k));
}

inline bool witness_sound(const KPGraph& g, const ExtremalWitness& w) {
    long long t = extremal_threshold(g.k(), g.effective_size(1), w.gamma);
    std::vector<Vertex> vs;
    for (int c = 1; c <= g.k(); ++c) {
        if ((long long)w.per_class[c - 1].size() < t) return false;
        for (int i : w.per_class[c - 1]) vs.push_back(Vertex{c, i});
    }
    return g.is_independent(vs);
}

// Exact route: a witness W with per-class floor T exists iff the complement
// X = V - W hits every edge with per-class budget n_c - T. Backtrack over the
// first unhit edge; the unhit frontier only moves forward along a DFS path.
inline WitnessSearch find_extremal_witness(const KPGraph& g, double gamma, int exact_cap = 10) {
    if (gamma < 0 || gamma >= 1) throw input_error("find_extremal_witness: gamma in [0,1)");
    if (!g.balanced()) throw input_error("find_extremal_witness: balanced instance required");
    int k = g.k();
    int n = g.effective_size(1);
    long long t = extremal_threshold(k, n, gamma);

    auto make_witness = [&](const std::vector<DynBits>& excluded) {
        ExtremalWitness w;
        w.gamma = gamma;
        w.per_class.resize(k);
        w.per_class_counts.resize(k);
        for (int c = 1; c <= k; ++c) {
            for (int i : g.alive_indices(c))
                if (!excluded[c - 1].test(i)) w.per_class[c - 1].push_back(i);
            w.per_class_counts[c - 1] = (long long)w.per_class[c - 1].size();
        }
        return w;
    };

    if (t > n) return {std::nullopt, true}; // no class can reach the floor

    if (n <= exact_cap && k <= 4) {
        std::vector<int> budget(k);
        for (int c = 1; c <= k; ++c) budget[c - 1] = int(n - t);
        std::vector<int> edges;
        for (int id = 0; id < g.edge_rows(); ++id)
            if (g.edge_alive(id)) edges.push_back(id);

        std::vector<DynBits> x;
        for (int c = 1; c <= k; ++c) x.emplace_back(g.class_size(c));
        std::vector<int> spent(k, 0);

        auto hit = [&](int id) {
            auto e = g.edge(id);
            for (int c = 1; c <= k; ++c)
                if (x[c - 1].test(e[c - 1])) return true;
            return false;
        };

        std::optional<ExtremalWitness> found;
        auto rec = [&](auto&& self, std::size_t from) -> bool {
            std::size_t at = from;
            while (at < edges.size() && hit(edges[at])) ++at;
            if (at == edges.size()) {
                found = make_witness(x);
                return true;
            }
            auto e = g.edge(edges[at]);
            for (int c = 1; c <= k; ++c) {
                if (spent[c - 1] >= budget[c - 1]) continue;
                x[c - 1].set(e[c - 1]);
                ++spent[c - 1];
                if (self(self, at)) return true;
                --spent[c - 1];
                x[c - 1].reset(e[c - 1]);
            }
            return false;
        };
        rec(rec, 0);
        return {found, true};
    }

    // Heuristic: peel the vertex on the most edges inside W until independent.
    std::vector<DynBits> excluded;
    for (int c = 1; c <= k; ++c) excluded.emplace_back(g.class_size(c));
    while (true) {
        std::vector<std::vector<long long>> cnt(k);
        for (int c = 1; c <= k; ++c) cnt[c - 1].assign(g.class_size(c), 0);
        bool has_edge = false;
        for (int id = 0; id < g.edge_rows(); ++id) {
            if (!g.edge_alive(id)) continue;
            auto e = g.edge(id);
            bool inside = true;
            for (int c = 1; c <= k; ++c)
                if (excluded[c - 1].test(e[c - 1])) {
                    inside = false;
                    break;
                }
            if (!inside) continue;
            has_edge = true;
            for (int c = 1; c <= k; ++c) ++cnt[c - 1][e[c - 1]];
        }
        if (!has_edge) break;
        int bc = -1, bi = -1;
        long long bv = -1;
        for (int c = 1; c <= k; ++c)
            for (int i = 0; i < g.class_size(c); ++i)
                if (cnt[c - 1][i] > bv) {
                    bv = cnt[c - 1][i];
                    bc = c;
                    bi = i;
                }
        excluded[bc - 1].set(bi);
    }
    ExtremalWitness w = make_witness(excluded);
    for (int c = 1; c <= k; ++c)
        if (w.per_class_counts[c - 1] < t) return {std::nullopt, false};
    return {w, false};
}

// min over legal l-sets S in V_1..V_l of d(S)/n^{k-l}, plus the same for legal
// (k-l)-sets in V_{l+1}..V_k over n^l, strictly above 1 + alpha.
inline bool degree_split_precheck(const KPGraph& g, int l, double alpha) {
    int k = g.k();
    if (l < 1 || l > k - 1) throw input_error("degree_split_precheck: l out of range");
    if (!g.balanced()) throw input_error("degree_split_precheck: balanced instance required");
    int n = g.effective_size(1);
    if (n == 0) return false;

    auto min_over = [&](int c_lo, int c_hi) {
        long long best = std::numeric_limits<long long>::max();
        int m = c_hi - c_lo + 1;
        std::vector<int> it(m, -1);
        std::vector<Vertex> cur(m);
        int d = 0;
        while (d >= 0) {
            int next = g.next_alive(c_lo + d, it[d]);
            if (next == -1) {
                it[d] = -1;
                --d;
                continue;
            }
            it[d] = next;
            cur[d] = Vertex{c_lo + d, next};
            if (d + 1 == m) {
                long long deg = g.degree(LegalSet(std::vector<Vertex>(cur.begin(), cur.end())));
                if (deg < best) {
                    best = deg;
                    if (best == 0) return 0LL;
                }
            } else {
                ++d;
            }
        }
        return best == std::numeric_limits<long long>::max() ? 0LL : best;
    };

    long long min_front = min_over(1, l);
    long long min_back = min_over(l + 1, k);
    double lhs = double(min_front) / std::pow(double(n), k - l) +
                 double(min_back) / std::pow(double(n), l);
    return lhs > 1.0 + alpha;
}

} // namespace hypermatch
