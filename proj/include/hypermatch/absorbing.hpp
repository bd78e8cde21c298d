#pragma once

// The absorbing machinery. A type-j set S has two vertices in class j and one
// in every other class. An edge e disjoint from S absorbs S when for some
// class r != j and some v in S's class-j pair, both exchange edges exist:
//   S_e = (S - {v} - V_r) u (e ^ V_r)
//   e_S = (e - V_j - V_r) u {v} u (S ^ V_r)
// Swapping e for {S_e, e_S} grows a matching by one and covers S.
//
// Plans are certified by exhaustive post-hoc counting, never by the sampling
// probabilities: sample_absorbing_matching() draws edge subsets until one is a
// matching within the size cap whose per-S absorbing count clears the floor.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "graph.hpp"
#include "prng.hpp"

namespace hypermatch {

struct TypeJSet {
    int j = 0;              // doubled class
    std::vector<int> base;  // one index per class; slot j-1 holds the lower pair index
    int extra = -1;         // second index in class j, > base[j-1]

    std::vector<Vertex> vertices() const {
        std::vector<Vertex> out;
        for (int c = 1; c <= int(base.size()); ++c) out.push_back(Vertex{c, base[c - 1]});
        out.push_back(Vertex{j, extra});
        std::sort(out.begin(), out.end());
        return out;
    }
};

inline TypeJSet make_type_j(const KPGraph& g, int j, int pair_a, int pair_b,
                            const std::vector<int>& others) {
    if (j < 1 || j > g.k()) throw input_error("type-j set: class out of range");
    if (pair_a == pair_b) throw input_error("type-j set: pair must be two distinct vertices");
    if (int(others.size()) != g.k())
        throw input_error("type-j set: need one index per class");
    TypeJSet s;
    s.j = j;
    s.base = others;
    s.base[j - 1] = std::min(pair_a, pair_b);
    s.extra = std::max(pair_a, pair_b);
    for (const Vertex& v : s.vertices()) {
        g.check_vertex(v);
        if (g.is_deleted(v)) throw input_error("type-j set touches deleted vertex " + to_string(v));
    }
    return s;
}

struct AbsorbCert {
    int edge_id = -1;
    int r = 0;      // exchanged class, != j
    Vertex v;       // the class-j vertex moved into e_S
    int s_e_id = -1;
    int e_s_id = -1;
};

// First certificate in (r, v) lexicographic order, if any. Edges sharing a
// vertex with S never absorb it.
inline std::optional<AbsorbCert> find_absorb_cert(const KPGraph& g, int edge_id,
                                                  const TypeJSet& s) {
    if (edge_id < 0 || edge_id >= g.edge_rows() || !g.edge_alive(edge_id)) return std::nullopt;
    int k = g.k();
    auto e = g.edge(edge_id);
    for (int c = 1; c <= k; ++c) {
        if (e[c - 1] == s.base[c - 1]) return std::nullopt;
        if (c == s.j && e[c - 1] == s.extra) return std::nullopt;
    }
    int pair[2] = {s.base[s.j - 1], s.extra};
    std::vector<int> t(k);
    for (int r = 1; r <= k; ++r) {
        if (r == s.j) continue;
        for (int v : pair) {
            // S_e: S minus v, with the class-r slot replaced by e's vertex
            for (int c = 1; c <= k; ++c) t[c - 1] = s.base[c - 1];
            t[s.j - 1] = (v == pair[0]) ? pair[1] : pair[0];
            t[r - 1] = e[r - 1];
            auto se = g.find_edge(t);
            if (!se) continue;
            // e_S: e with class j slot = v and class r slot = S's vertex
            for (int c = 1; c <= k; ++c) t[c - 1] = e[c - 1];
            t[s.j - 1] = v;
            t[r - 1] = s.base[r - 1];
            auto es = g.find_edge(t);
            if (!es) continue;
            return AbsorbCert{edge_id, r, Vertex{s.j, v}, *se, *es};
        }
    }
    return std::nullopt;
}

inline long long count_absorbing(const KPGraph& g, const TypeJSet& s) {
    long long n = 0;
    for (int id = 0; id < g.edge_rows(); ++id)
        if (g.edge_alive(id) && find_absorb_cert(g, id, s)) ++n;
    return n;
}

struct AbsorbPlan {
    Matching m_prime;
    long long per_s_floor = 0;
    int size_cap = 0;
    double c = 0;
    std::uint64_t seed = 0;
    int retries_used = 0;
};

struct AbsorbAuditRow {
    TypeJSet s;
    long long count = 0;
};

struct AbsorbAudit {
    bool certified = false;
    long long sets_checked = 0;
    long long min_count = 0;
    bool sampled = false; // true when the S space was sampled, not enumerated
    std::vector<AbsorbAuditRow> rows;
};

// Count, for every (or a seeded sample of) type-j set disjoint from V(M'), the
// absorbing edges inside M'. Floors below `floor_t` fail the audit; with
// collect_rows false the audit aborts on the first failure.
inline AbsorbAudit audit_absorbing(const KPGraph& g, const Matching& m_prime, long long floor_t,
                                   int verify_cap = 12, int sample_per_class = 1000,
                                   std::uint64_t seed = 0, bool collect_rows = false) {
    int k = g.k();
    AbsorbAudit audit;
    audit.min_count = std::numeric_limits<long long>::max();
    audit.certified = true;

    std::vector<std::vector<int>> free(k);
    int max_free = 0;
    for (int c = 1; c <= k; ++c) {
        for (int i : g.alive_indices(c))
            if (!m_prime.covers(Vertex{c, i})) free[c - 1].push_back(i);
        max_free = std::max(max_free, int(free[c - 1].size()));
    }

    auto check_one = [&](const TypeJSet& s) {
        long long cnt = 0;
        for (int id : m_prime.edge_ids())
            if (find_absorb_cert(g, id, s)) ++cnt;
        ++audit.sets_checked;
        audit.min_count = std::min(audit.min_count, cnt);
        if (cnt < floor_t) audit.certified = false;
        if (collect_rows) audit.rows.push_back({s, cnt});
        return audit.certified || collect_rows;
    };

    if (max_free <= verify_cap) {
        for (int j = 1; j <= k && (audit.certified || collect_rows); ++j) {
            const auto& fj = free[j - 1];
            for (std::size_t a = 0; a < fj.size(); ++a) {
                for (std::size_t b = a + 1; b < fj.size(); ++b) {
                    // odometer over the other classes
                    std::vector<std::size_t> it(k, 0);
                    bool viable = true;
                    for (int c = 1; c <= k; ++c)
                        if (c != j && free[c - 1].empty()) viable = false;
                    if (!viable) break;
                    while (true) {
                        std::vector<int> others(k, 0);
                        for (int c = 1; c <= k; ++c)
                            if (c != j) others[c - 1] = free[c - 1][it[c - 1]];
                        TypeJSet s = make_type_j(g, j, fj[a], fj[b], others);
                        if (!check_one(s)) return audit;
                        int c = k;
                        while (c >= 1) {
                            if (c == j) {
                                --c;
                                continue;
                            }
                            if (++it[c - 1] < free[c - 1].size()) break;
                            it[c - 1] = 0;
                            --c;
                        }
                        if (c < 1) break;
                    }
                }
            }
        }
        if (audit.sets_checked == 0) audit.min_count = 0;
        return audit;
    }

    // Sampled verification at larger n.
    audit.sampled = true;
    for (int j = 1; j <= k && (audit.certified || collect_rows); ++j) {
        if (int(free[j - 1].size()) < 2) continue;
        bool viable = true;
        for (int c = 1; c <= k; ++c)
            if (c != j && free[c - 1].empty()) viable = false;
        if (!viable) continue;
        std::uint64_t stream = prng::substream(prng::kStreamAbsorbVerify, std::uint64_t(j));
        for (int t = 0; t < sample_per_class; ++t) {
            std::uint64_t ctr = std::uint64_t(t) * (k + 2);
            const auto& fj = free[j - 1];
            int a = int(prng::bounded(seed, stream, ctr, fj.size()));
            int b = int(prng::bounded(seed, stream, ctr + 1, fj.size() - 1));
            if (b >= a) ++b;
            std::vector<int> others(k, 0);
            for (int c = 1; c <= k; ++c)
                if (c != j)
                    others[c - 1] =
                        free[c - 1][prng::bounded(seed, stream, ctr + 1 + c, free[c - 1].size())];
            TypeJSet s = make_type_j(g, j, fj[a], fj[b], others);
            if (!check_one(s)) return audit;
        }
    }
    if (audit.sets_checked == 0) audit.min_count = 0;
    return audit;
}

// Wrap an existing matching as a certified plan, or nothing if the audit fails.
inline std::optional<AbsorbPlan> certify_plan(const KPGraph& g, const Matching& m_prime,
                                              long long floor_t, int verify_cap = 12,
                                              int sample_per_class = 1000, std::uint64_t seed = 0) {
    AbsorbAudit a = audit_absorbing(g, m_prime, floor_t, verify_cap, sample_per_class, seed);
    if (!a.certified) return std::nullopt;
    AbsorbPlan plan;
    plan.m_prime = m_prime;
    plan.per_s_floor = floor_t;
    plan.size_cap = m_prime.size();
    plan.seed = seed;
    return plan;
}

struct AbsorbSampleResult {
    std::optional<AbsorbPlan> plan;
    int attempts = 0;
    std::string reason;
};

inline long long analysis_floor_t(int k, int n) {
    return n >= 2 ? (long long)std::ceil(4.0 * (k + 2) * std::log(double(n))) : 0;
}
inline long long analysis_size_cap(int k, int n, double c) {
    return n >= 2 ? (long long)std::ceil(32.0 * (k + 2) / (c * c * c) * std::log(double(n))) : 0;
}

// Bernoulli edge sampling at the analysis rate (C/2) n^{-k} log n, rescaled so
// the expected draw fits the size cap. Wholesale rejection of non-matchings
// means the rate must sit below the collision threshold; rather than guessing
// it, the rate halves after every four rejected attempts. analysis_constants
// disables the rescaling entirely; at small n that fails, which is the honest
// outcome for an asymptotic guarantee.
inline AbsorbSampleResult sample_absorbing_matching(const KPGraph& g, double c, long long floor_t,
                                                    int size_cap, std::uint64_t seed, int retries,
                                                    int verify_cap = 12, int sample_per_class = 1000,
                                                    bool analysis_constants = false) {
    AbsorbSampleResult out;
    int k = g.k();
    if (!g.balanced()) throw input_error("sample_absorbing_matching: balanced instance required");
    if (!(c > 0 && c < 1)) throw input_error("sample_absorbing_matching: c in (0,1)");
    if (floor_t < 0 || size_cap < 0)
        throw input_error("sample_absorbing_matching: floor and cap must be nonnegative");
    int n = g.effective_size(1);
    long long delta = g.min_l_degree(k - 1);
    if (double(delta) + 1e-9 < c * n)
        throw input_error("sample_absorbing_matching: co-degree " + std::to_string(delta) +
                          " below c*n = " + std::to_string(c * n));

    long long rows = g.edge_rows();
    double analysis_p =
        n >= 2 ? (16.0 * (k + 2) / (c * c * c)) * std::pow(double(n), -k) * std::log(double(n))
               : 0.0;
    double p0 = std::min(1.0, analysis_p);
    if (!analysis_constants && rows > 0) p0 = std::min(p0, double(size_cap) / double(rows));

    for (int attempt = 1; attempt <= retries; ++attempt) {
        out.attempts = attempt;
        double p = analysis_constants ? p0 : p0 / double(std::uint64_t(1) << ((attempt - 1) / 4));
        std::uint64_t stream = prng::substream(prng::kStreamAbsorbSample, std::uint64_t(attempt));
        Matching m(g);
        bool clash = false;
        long long picked = 0;
        for (int id = 0; id < g.edge_rows() && !clash; ++id) {
            if (!g.edge_alive(id)) continue;
            if (prng::u01(seed, stream, std::uint64_t(id)) >= p) continue;
            ++picked;
            if (picked > size_cap || m.conflicts(g, id)) {
                clash = true;
                break;
            }
            m.add(g, id);
        }
        if (clash) {
            out.reason = "sampled set was not a matching within the size cap";
            continue;
        }
        AbsorbAudit audit = audit_absorbing(g, m, floor_t, verify_cap, sample_per_class,
                                            prng::substream(seed, std::uint64_t(attempt)));
        if (!audit.certified) {
            out.reason = "per-S absorbing floor failed (min " + std::to_string(audit.min_count) +
                         " < " + std::to_string(floor_t) + ")";
            continue;
        }
        AbsorbPlan plan;
        plan.m_prime = std::move(m);
        plan.per_s_floor = floor_t;
        plan.size_cap = size_cap;
        plan.c = c;
        plan.seed = seed;
        plan.retries_used = attempt;
        out.plan = std::move(plan);
        out.reason.clear();
        return out;
    }
    if (out.reason.empty()) out.reason = "no attempt produced a certifiable plan";
    out.reason = "absorbing plan unavailable at this scale: " + out.reason;
    return out;
}

// (M - {e}) u {S_e, e_S} for the first plan edge still in M that absorbs S.
inline std::optional<Matching> absorb_one(const KPGraph& g, const Matching& m,
                                          const AbsorbPlan& plan, const TypeJSet& s) {
    for (const Vertex& x : s.vertices())
        if (m.covers(x)) throw input_error("absorb_one: S meets V(M)");
    for (int id : plan.m_prime.edge_ids()) {
        if (!m.contains(id)) continue;
        auto cert = find_absorb_cert(g, id, s);
        if (!cert) continue;
        Matching out = m;
        out.remove(g, id);
        out.add(g, cert->s_e_id);
        out.add(g, cert->e_s_id);
        return out;
    }
    return std::nullopt;
}

} // namespace hypermatch
