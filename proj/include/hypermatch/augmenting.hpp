#pragma once

// Constructive matching growth. boost_to_kr() turns the co-degree floor
// delta_{k-1} >= r into a matching of size kr by repeated pigeonhole swaps.
// The nonextremal machinery grows a maximal matching by local exchanges: an
// edge fully inside the uncovered set, a two-for-one swap through a matching
// edge seen twice from the completion sets, or a release-and-recover move
// through an edge of H[V_D - D].

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graph.hpp"
#include "oracle.hpp"

namespace hypermatch {

inline Matching greedy_maximal(const KPGraph& g) {
    Matching m(g);
    for (int id = 0; id < g.edge_rows(); ++id)
        if (g.edge_alive(id) && !m.conflicts(g, id)) m.add(g, id);
    return m;
}

// Extend m with any alive edges disjoint from it, in edge order.
inline void extend_maximal(const KPGraph& g, Matching& m) {
    for (int id = 0; id < g.edge_rows(); ++id)
        if (g.edge_alive(id) && !m.conflicts(g, id)) m.add(g, id);
}

// Matching of size >= k*r under delta_{k-1}(H) >= r and n >= kr + (k-1).
//
// Loop invariant: while |M| < kr there are k pairwise disjoint legal
// (k-1)-sets f_1..f_k in the uncovered vertices with f_i avoiding class i.
// Every completion of f_i either leaves V(M) (extend M directly) or lands in
// V(M); in the latter case the completions of distinct f_i are disjoint and
// number >= kr > |M|, so some matching edge is hit from two different f's and
// a one-for-two swap grows M.
inline Matching boost_to_kr(const KPGraph& g, int r) {
    if (r < 0) throw input_error("boost_to_kr: r must be nonnegative");
    Matching empty(g);
    if (r == 0) return empty;
    if (!g.balanced()) throw input_error("boost_to_kr: balanced instance required");
    int k = g.k();
    int n = g.effective_size(1);
    if (n < k * r + (k - 1))
        throw input_error("boost_to_kr: need n >= kr + (k-1), have n = " + std::to_string(n));
    long long delta = g.min_l_degree(k - 1);
    if (delta < r)
        throw input_error("boost_to_kr: co-degree " + std::to_string(delta) + " below r = " +
                          std::to_string(r));

    Matching m = greedy_maximal(g);
    while (m.size() < k * r) {
        // f_i takes, from every class c != i, the rank(i)-th uncovered vertex,
        // where rank runs over [k]-{c} in ascending i. Disjoint by construction.
        std::vector<std::vector<int>> unc(k);
        for (int c = 1; c <= k; ++c) unc[c - 1] = m.uncovered_indices(g, c);

        std::vector<LegalSet> f(k);
        for (int i = 1; i <= k; ++i) {
            std::vector<Vertex> vs;
            for (int c = 1; c <= k; ++c) {
                if (c == i) continue;
                int rank = (i < c) ? i - 1 : i - 2; // position of i among [k]-{c}
                if (rank >= int(unc[c - 1].size()))
                    throw internal_error("boost_to_kr: uncovered pool exhausted");
                vs.push_back(Vertex{c, unc[c - 1][rank]});
            }
            f[i - 1] = LegalSet(std::move(vs));
        }

        // Direct extension first.
        bool extended = false;
        std::vector<DynBits> comp(k);
        for (int i = 1; i <= k && !extended; ++i) {
            comp[i - 1] = g.completions(f[i - 1]);
            int free = comp[i - 1].find_first();
            while (free != -1) {
                if (!m.covers(Vertex{i, free})) {
                    std::vector<int> tuple(k);
                    for (const Vertex& x : f[i - 1].vertices()) tuple[x.cls - 1] = x.idx;
                    tuple[i - 1] = free;
                    m.add(g, *g.find_edge(tuple));
                    extended = true;
                    break;
                }
                free = comp[i - 1].find_next(free);
            }
        }
        if (extended) continue;

        // All completions lie in V(M): find a matching edge hit from two f's.
        std::vector<int> first_i(g.edge_rows(), 0), first_v(g.edge_rows(), 0);
        bool swapped = false;
        // map covered vertex -> matching edge
        std::vector<std::vector<int>> owner(k);
        for (int c = 1; c <= k; ++c) owner[c - 1].assign(g.class_size(c), -1);
        for (int id : m.edge_ids()) {
            auto e = g.edge(id);
            for (int c = 1; c <= k; ++c) owner[c - 1][e[c - 1]] = id;
        }
        for (int i = 1; i <= k && !swapped; ++i) {
            for (int x = comp[i - 1].find_first(); x != -1 && !swapped;
                 x = comp[i - 1].find_next(x)) {
                int id = owner[i - 1][x];
                if (id < 0) throw internal_error("boost_to_kr: completion outside V(M)");
                if (first_i[id] == 0) {
                    first_i[id] = i;
                    first_v[id] = x;
                    continue;
                }
                if (first_i[id] == i) continue;
                int j = first_i[id], y = first_v[id];
                std::vector<int> ta(k), tb(k);
                for (const Vertex& t : f[j - 1].vertices()) ta[t.cls - 1] = t.idx;
                ta[j - 1] = y;
                for (const Vertex& t : f[i - 1].vertices()) tb[t.cls - 1] = t.idx;
                tb[i - 1] = x;
                m.remove(g, id);
                m.add(g, *g.find_edge(ta));
                m.add(g, *g.find_edge(tb));
                swapped = true;
            }
        }
        if (!swapped)
            throw internal_error("boost_to_kr: pigeonhole step failed; hypothesis violated");
    }
    return m;
}

// State for one augmentation step: the k*k disjoint helper sets drawn from the
// uncovered vertices, their common/any completion targets C_j and D_j, and the
// matching edges touching D.
struct AugState {
    Matching m;
    std::vector<DynBits> uncovered;                // alive and not covered, per class
    std::vector<std::vector<LegalSet>> a_sets;     // [j-1][i-1], avoids class j
    std::vector<DynBits> c_sets, d_sets;           // per class j
    std::vector<int> d_edge_ids;                   // matching edges meeting D
    std::vector<DynBits> v_d;                      // vertices of those edges
};

struct AugBuild {
    std::optional<AugState> state;
    bool too_close = false; // some class has at most k^2 uncovered vertices
};

inline AugBuild build_aug_state(const KPGraph& g, const Matching& m) {
    int k = g.k();
    AugBuild out;
    std::vector<DynBits> unc;
    for (int c = 1; c <= k; ++c) {
        DynBits u(g.class_size(c));
        for (int i : m.uncovered_indices(g, c)) u.set(i);
        if (u.count() <= k * k) {
            out.too_close = true;
            return out;
        }
        unc.push_back(std::move(u));
    }

    AugState st;
    st.m = m;
    st.uncovered = unc;

    // Greedy lexicographic packing: per class a cursor walks the uncovered
    // indices; each A_i^j takes the next unused vertex from every class != j.
    std::vector<int> cursor(k, -1);
    auto next_from = [&](int c) {
        int i = unc[c - 1].find_next(cursor[c - 1]);
        if (i == -1) throw internal_error("build_aug_state: pool exhausted");
        cursor[c - 1] = i;
        return i;
    };
    st.a_sets.assign(k, {});
    for (int j = 1; j <= k; ++j) {
        st.a_sets[j - 1].reserve(k);
        for (int i = 1; i <= k; ++i) {
            std::vector<Vertex> vs;
            for (int c = 1; c <= k; ++c)
                if (c != j) vs.push_back(Vertex{c, next_from(c)});
            st.a_sets[j - 1].push_back(LegalSet(std::move(vs)));
        }
    }

    for (int j = 1; j <= k; ++j) {
        DynBits any(g.class_size(j)), all(g.class_size(j));
        all.set_all();
        all.andnot_with(g.deleted_mask(j));
        for (int i = 1; i <= k; ++i) {
            DynBits comp = g.completions(st.a_sets[j - 1][i - 1]);
            any.or_with(comp);
            all.and_with(comp);
        }
        st.c_sets.push_back(std::move(any));
        st.d_sets.push_back(std::move(all));
    }

    for (int c = 1; c <= k; ++c) st.v_d.emplace_back(g.class_size(c));
    for (int id : m.edge_ids()) {
        auto e = g.edge(id);
        bool meets_d = false;
        for (int c = 1; c <= k; ++c)
            if (st.d_sets[c - 1].test(e[c - 1])) {
                meets_d = true;
                break;
            }
        if (!meets_d) continue;
        st.d_edge_ids.push_back(id);
        for (int c = 1; c <= k; ++c) st.v_d[c - 1].set(e[c - 1]);
    }

    out.state = std::move(st);
    return out;
}

struct NoAugment {
    std::string detail; // which move failed and why
    std::vector<long long> c_sizes, d_sizes;
};

struct StepResult {
    std::optional<Matching> matched; // size |M| + 1, validated by the caller
    std::optional<NoAugment> stalled;
};

inline StepResult nonextremal_step(const KPGraph& g, const AugState& st) {
    int k = g.k();
    StepResult out;

    // move (i): an alive edge entirely inside the uncovered set
    for (int id = 0; id < g.edge_rows(); ++id) {
        if (!g.edge_alive(id)) continue;
        auto e = g.edge(id);
        bool inside = true;
        for (int c = 1; c <= k; ++c)
            if (!st.uncovered[c - 1].test(e[c - 1])) {
                inside = false;
                break;
            }
        if (!inside) continue;
        Matching m = st.m;
        m.add(g, id);
        out.matched = std::move(m);
        return out;
    }

    auto a_edge_id = [&](int j, int i, int v_idx) -> std::optional<int> {
        std::vector<int> tuple(k);
        for (const Vertex& t : st.a_sets[j - 1][i - 1].vertices()) tuple[t.cls - 1] = t.idx;
        tuple[j - 1] = v_idx;
        return g.find_edge(tuple);
    };
    auto first_completer = [&](int j, int v_idx) -> int {
        for (int i = 1; i <= k; ++i)
            if (g.completions(st.a_sets[j - 1][i - 1]).test(v_idx)) return i;
        return -1;
    };

    // move (ii): a matching edge met by C in two classes
    for (int id : st.m.edge_ids()) {
        auto e = g.edge(id);
        int ca = -1, cb = -1;
        for (int c = 1; c <= k; ++c) {
            if (!st.c_sets[c - 1].test(e[c - 1])) continue;
            if (ca == -1)
                ca = c;
            else {
                cb = c;
                break;
            }
        }
        if (cb == -1) continue;
        int ia = first_completer(ca, e[ca - 1]);
        int ib = first_completer(cb, e[cb - 1]);
        if (ia < 0 || ib < 0) throw internal_error("nonextremal_step: C membership desync");
        Matching m = st.m;
        m.remove(g, id);
        m.add(g, *a_edge_id(ca, ia, e[ca - 1]));
        m.add(g, *a_edge_id(cb, ib, e[cb - 1]));
        out.matched = std::move(m);
        return out;
    }

    // move (iii): an alive edge inside V_D - D; release the matching edges it
    // meets, re-cover their D-vertices with distinct helper sets, add the edge
    std::vector<DynBits> vd_minus_d = st.v_d;
    for (int c = 1; c <= k; ++c) vd_minus_d[c - 1].andnot_with(st.d_sets[c - 1]);
    for (int id = 0; id < g.edge_rows(); ++id) {
        if (!g.edge_alive(id)) continue;
        auto e = g.edge(id);
        bool inside = true;
        for (int c = 1; c <= k; ++c)
            if (!vd_minus_d[c - 1].test(e[c - 1])) {
                inside = false;
                break;
            }
        if (!inside) continue;

        // matching edges meeting e0 (distinct, in matching order)
        std::vector<int> released;
        for (int mid : st.m.edge_ids()) {
            auto me = g.edge(mid);
            for (int c = 1; c <= k; ++c)
                if (me[c - 1] == e[c - 1]) {
                    released.push_back(mid);
                    break;
                }
        }
        if (released.empty() || int(released.size()) > k)
            throw internal_error("nonextremal_step: bad release set");

        Matching m = st.m;
        std::vector<std::vector<char>> used(k, std::vector<char>(k + 1, 0));
        for (int mid : released) m.remove(g, mid);
        for (int mid : released) {
            auto me = g.edge(mid);
            int dj = -1, dv = -1;
            for (int c = 1; c <= k; ++c)
                if (st.d_sets[c - 1].test(me[c - 1])) {
                    dj = c;
                    dv = me[c - 1];
                    break;
                }
            if (dj < 0) throw internal_error("nonextremal_step: released edge misses D");
            int pick = -1;
            for (int i = 1; i <= k; ++i) {
                if (used[dj - 1][i]) continue;
                if (!g.completions(st.a_sets[dj - 1][i - 1]).test(dv)) continue;
                pick = i;
                break;
            }
            if (pick < 0) throw internal_error("nonextremal_step: no helper set available");
            used[dj - 1][pick] = 1;
            m.add(g, *a_edge_id(dj, pick, dv));
        }
        m.add(g, id);
        out.matched = std::move(m);
        return out;
    }

    NoAugment na;
    na.detail = "no uncovered edge, |C ^ e| <= 1 for every matching edge, and H[V_D - D] is edgeless";
    for (int c = 1; c <= k; ++c) {
        na.c_sizes.push_back(st.c_sets[c - 1].count());
        na.d_sizes.push_back(st.d_sets[c - 1].count());
    }
    out.stalled = std::move(na);
    return out;
}

struct StallEvidence {
    NoAugment last;
    Matching final_matching; // the maximal matching the search stalled on
    long long matching_size = 0;
    double c_bound = 0; // (1 + (k-1) beta) n / k
    double d_bound = 0; // (1 - k^2 beta) n / k
};

struct NonextremalResult {
    std::optional<Matching> matching;
    std::optional<StallEvidence> stalled;
    int steps = 0;
};

// Grow a maximal matching until it covers all but k^2 vertices per class, or
// report the stall with the measured C/D sizes against the proof-shape bounds.
inline NonextremalResult almost_perfect_nonextremal(const KPGraph& g, double beta) {
    int k = g.k();
    if (!g.balanced()) throw input_error("almost_perfect_nonextremal: balanced instance required");
    if (!(beta > 0 && beta < 1.0 / (2.0 * k * k)))
        throw input_error("almost_perfect_nonextremal: beta must lie in (0, 1/(2k^2))");
    int n = g.effective_size(1);
    long long target = (long long)n - (long long)k * k;

    NonextremalResult out;
    Matching m = greedy_maximal(g);
    while (true) {
        if ((long long)m.size() >= target) {
            out.matching = std::move(m);
            return out;
        }
        AugBuild b = build_aug_state(g, m);
        if (b.too_close) { // uncovered <= k^2 per class, i.e. |M| >= n - k^2
            out.matching = std::move(m);
            return out;
        }
        StepResult step = nonextremal_step(g, *b.state);
        if (step.matched) {
            if (step.matched->size() != m.size() + 1)
                throw internal_error("almost_perfect_nonextremal: step size drift");
            step.matched->validate(g);
            m = std::move(*step.matched);
            ++out.steps;
            continue;
        }
        StallEvidence ev;
        ev.last = std::move(*step.stalled);
        ev.matching_size = m.size();
        ev.final_matching = std::move(m);
        ev.c_bound = (1.0 + (k - 1) * beta) * double(n) / k;
        ev.d_bound = (1.0 - double(k) * k * beta) * double(n) / k;
        out.stalled = std::move(ev);
        return out;
    }
}

} // namespace hypermatch
