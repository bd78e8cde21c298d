#pragma once

// The extremal assembly: given per-class witness sets (a large independent
// block), build a matching of size n-1 in stages. Link-rich vertices outside
// the witness form the A pools; a boosted matching M0' fixes the residual
// arithmetic; M1 covers the leftover D vertices; M2 rebalances until the
// A/W residuals satisfy the split identity for some l; a legal k-set L is left
// out; the remainder splits into blocks F_1..F_k that are finished by exact
// perfect matchings. Any stage may fail at small n and reports the violated
// inequality with both sides evaluated.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "augmenting.hpp"
#include "graph.hpp"
#include "numeric.hpp"
#include "oracle.hpp"

namespace hypermatch {

struct StageFailure {
    std::string stage;
    std::string message;
    std::vector<std::pair<std::string, double>> values;
};

struct ExtremalOptions {
    bool strict_constants = false;
    std::uint64_t oracle_budget = 10'000'000;
};

// Parameter regime of the extremal assembly, checked only in strict mode.
inline bool strict_params_ok(int k, double gamma, double eps) {
    if (!(gamma > 0 && gamma < eps)) return false;
    if (!(eps < 1.0 / (100.0 * k * k * k))) return false;
    if (!(gamma * std::pow(1.0 - 1.0 / k - gamma, k - 1) < eps * eps)) return false;
    if (!(eps < std::pow(1.0 / k - 4.0 * k * eps, k - 1) / 100.0)) return false;
    return true;
}

// Residual arithmetic around the boosted matching.
inline long long residual_slice_size(int k, int n, double eps) {
    return ceil_tol((1.0 / k - eps) * n);
}
inline long long residual_boost_r(int k, int n, double eps) {
    return (n + k - 1) / k - residual_slice_size(k, n, eps);
}
inline long long residual_split_s(int k, int n) { return n - (long long)((n - 1) / k) * k; }
inline long long residual_m0_size(int k, int n, double eps) {
    return k * (residual_boost_r(k, n, eps) - 1) + residual_split_s(k, n);
}
inline long long residual_n_prime(int k, int n, double eps) {
    return n - residual_m0_size(k, n, eps);
}

struct ExtremalRun {
    double gamma = 0, eps = 0;
    int n = 0;

    std::vector<std::vector<int>> w;  // trimmed witness, per class
    std::vector<DynBits> w_bits;
    std::vector<std::vector<int>> a, a_prime;
    std::vector<DynBits> a_prime_bits;

    long long r = 0, s = 0, m0_target = 0, n_prime = 0;
    Matching m0, m1, m2;
    std::vector<std::vector<int>> d;

    std::vector<long long> delta_trace;
    int l = 0;
    bool degenerate_l = false;

    LegalSet leave_out;
    std::vector<std::vector<int>> a2, w2;
    long long n_second = 0;
    std::vector<std::vector<std::vector<int>>> f; // f[i-1][c-1] -> indices
    std::vector<bool> f_precheck;
    std::vector<Matching> f_matchings;

    Matching total;
};

namespace extremal_detail {

inline StageFailure fail(std::string stage, std::string msg,
                         std::vector<std::pair<std::string, double>> values = {}) {
    return StageFailure{std::move(stage), std::move(msg), std::move(values)};
}

} // namespace extremal_detail

// Keep the lowest-indexed ceil((1 - 1/k - gamma) n) witness vertices per class.
inline std::optional<StageFailure> stage_trim_witness(
    const KPGraph& g, ExtremalRun& run, const std::vector<std::vector<int>>& witness) {
    int k = g.k();
    long long want = ceil_tol((1.0 - 1.0 / k - run.gamma) * run.n);
    run.w.assign(k, {});
    run.w_bits.clear();
    for (int c = 1; c <= k; ++c) {
        if ((long long)witness[c - 1].size() < want)
            return extremal_detail::fail(
                "trim_witness", "witness class " + std::to_string(c) + " below the trim size",
                {{"have", double(witness[c - 1].size())}, {"want", double(want)}});
        std::vector<int> keep(witness[c - 1].begin(), witness[c - 1].begin() + want);
        std::sort(keep.begin(), keep.end());
        run.w[c - 1] = std::move(keep);
    }
    for (int c = 1; c <= k; ++c) {
        DynBits b(g.class_size(c));
        for (int i : run.w[c - 1]) b.set(i);
        run.w_bits.push_back(std::move(b));
    }
    return std::nullopt;
}

// A_i = link-rich vertices outside the witness; A_i' = its lowest slice of the
// target size.
inline std::optional<StageFailure> stage_select_a(const KPGraph& g, ExtremalRun& run) {
    int k = g.k();
    double thr =
        (std::pow(1.0 - 1.0 / k - run.gamma, k - 1) - run.eps) * std::pow(double(run.n), k - 1);
    long long need = residual_slice_size(k, run.n, run.eps);

    run.a.assign(k, {});
    run.a_prime.assign(k, {});
    run.a_prime_bits.clear();
    for (int c = 1; c <= k; ++c) {
        for (int i : g.alive_indices(c)) {
            if (run.w_bits[c - 1].test(i)) continue;
            if (double(g.link_count(Vertex{c, i}, run.w_bits)) >= thr - 1e-9)
                run.a[c - 1].push_back(i);
        }
    }
    for (int c = 1; c <= k; ++c) {
        if ((long long)run.a[c - 1].size() < need) {
            std::vector<std::pair<std::string, double>> ev{{"need", double(need)},
                                                           {"link_threshold", thr}};
            for (int cc = 1; cc <= k; ++cc)
                ev.push_back({"|A_" + std::to_string(cc) + "|", double(run.a[cc - 1].size())});
            return extremal_detail::fail("select_a", "link-rich pool below the slice size", ev);
        }
        run.a_prime[c - 1].assign(run.a[c - 1].begin(), run.a[c - 1].begin() + need);
    }
    for (int c = 1; c <= k; ++c) {
        DynBits b(g.class_size(c));
        for (int i : run.a_prime[c - 1]) b.set(i);
        run.a_prime_bits.push_back(std::move(b));
    }
    return std::nullopt;
}

inline std::optional<StageFailure> stage_build_m0(const KPGraph& g, ExtremalRun& run) {
    int k = g.k();
    run.r = residual_boost_r(k, run.n, run.eps);
    run.s = residual_split_s(k, run.n);
    run.m0_target = residual_m0_size(k, run.n, run.eps);
    if (run.r < 0 || run.m0_target < 0)
        return extremal_detail::fail("build_m0", "residual size target is negative",
                                     {{"r", double(run.r)},
                                      {"s", double(run.s)},
                                      {"m0_target", double(run.m0_target)}});

    run.m0 = Matching(g);
    if (run.m0_target > 0) {
        std::vector<Vertex> aprime_vertices;
        for (int c = 1; c <= k; ++c)
            for (int i : run.a_prime[c - 1]) aprime_vertices.push_back(Vertex{c, i});
        KPGraph carved = g.delete_vertices(aprime_vertices);
        Matching boosted;
        try {
            boosted = boost_to_kr(carved, int(run.r));
        } catch (const input_error& e) {
            return extremal_detail::fail("build_m0", std::string("boost failed: ") + e.what(),
                                         {{"r", double(run.r)}});
        }
        for (int i = 0; i < run.m0_target; ++i) run.m0.add(g, boosted.edge_ids()[i]);
    }
    run.n_prime = run.n - run.m0_target;
    long long need = residual_slice_size(k, run.n, run.eps);
    if (run.n_prime != (long long)k * need)
        throw internal_error("stage_build_m0: residual identity broke");
    return std::nullopt;
}

// Cover D = V - A' - W - V(M0') by one greedy edge per uncovered D vertex.
inline std::optional<StageFailure> stage_cover_d(const KPGraph& g, ExtremalRun& run) {
    int k = g.k();
    run.d.assign(k, {});
    for (int c = 1; c <= k; ++c)
        for (int i : g.alive_indices(c)) {
            if (run.a_prime_bits[c - 1].test(i)) continue;
            if (run.w_bits[c - 1].test(i)) continue;
            if (run.m0.covered(c).test(i)) continue;
            run.d[c - 1].push_back(i);
        }

    run.m1 = Matching(g);
    for (int j = 1; j <= k; ++j) {
        for (int idx : run.d[j - 1]) {
            if (run.m1.covers(Vertex{j, idx})) continue;
            int comp_cls = j % k + 1;
            std::vector<int> tuple(k, -1);
            tuple[j - 1] = idx;
            std::vector<Vertex> partial{Vertex{j, idx}};
            for (int c = 1; c <= k; ++c) {
                if (c == j || c == comp_cls) continue;
                int pick = -1;
                for (int i : g.alive_indices(c)) {
                    if (run.a_prime_bits[c - 1].test(i)) continue;
                    if (run.m0.covered(c).test(i)) continue;
                    if (run.m1.covered(c).test(i)) continue;
                    pick = i;
                    break;
                }
                if (pick < 0)
                    return extremal_detail::fail(
                        "cover_d", "no companion vertex left in class " + std::to_string(c),
                        {{"class", double(c)}, {"pool", 0.0}});
                partial.push_back(Vertex{c, pick});
                tuple[c - 1] = pick;
            }
            DynBits comp = g.completions(LegalSet(std::move(partial)));
            comp.andnot_with(run.m0.covered(comp_cls));
            comp.andnot_with(run.m1.covered(comp_cls));
            int ext = comp.find_first();
            if (ext == -1)
                return extremal_detail::fail(
                    "cover_d", "no completion for the D vertex " + to_string(Vertex{j, idx}),
                    {{"class", double(j)}, {"completions", 0.0}});
            tuple[comp_cls - 1] = ext;
            auto id = g.find_edge(tuple);
            if (!id) throw internal_error("stage_cover_d: completion lookup desync");
            run.m1.add(g, *id);

            // per-edge shape: >= 1 D vertex by construction; <= 1 from A'
            auto e = g.edge(*id);
            int a_hits = 0;
            for (int c = 1; c <= k; ++c)
                if (run.a_prime_bits[c - 1].test(e[c - 1])) ++a_hits;
            if (a_hits > 1) throw internal_error("stage_cover_d: edge uses two A' vertices");
        }
    }
    return std::nullopt;
}

namespace extremal_detail {

inline long long resid_a_sum(const ExtremalRun& run, int cls) {
    long long n = 0;
    for (int i : run.a_prime[cls - 1])
        if (!run.m1.covered(cls).test(i) && !run.m2.covered(cls).test(i)) ++n;
    return n;
}
inline long long resid_w_sum(const ExtremalRun& run, int cls) {
    long long n = 0;
    for (int i : run.w[cls - 1])
        if (!run.m0.covered(cls).test(i) && !run.m1.covered(cls).test(i) &&
            !run.m2.covered(cls).test(i))
            ++n;
    return n;
}

} // namespace extremal_detail

// Add balancing edges (one vertex from each A_s' residual, completed in class
// k) until some l in [k-1] satisfies
//   (k-1) (sum_i |A_i' res| - l) = (sum_i |W_i' res|) - (k - l).
inline std::optional<StageFailure> stage_balance_m2(const KPGraph& g, ExtremalRun& run) {
    int k = g.k();
    run.m2 = Matching(g);
    run.delta_trace.clear();
    run.l = 0;
    run.degenerate_l = false;

    while (true) {
        long long sum_a = 0, sum_w = 0;
        for (int c = 1; c <= k; ++c) {
            sum_a += extremal_detail::resid_a_sum(run, c);
            sum_w += extremal_detail::resid_w_sum(run, c);
        }
        long long delta = (long long)(k - 1) * sum_a - sum_w;
        if (!run.delta_trace.empty()) {
            long long prev = run.delta_trace.back();
            if (delta > prev - k)
                throw internal_error("stage_balance_m2: delta did not drop by k");
        }
        run.delta_trace.push_back(delta);
        if (delta < 0)
            return extremal_detail::fail("balance_m2", "residual surplus went negative",
                                         {{"delta", double(delta)}});

        bool found = false;
        for (int l = 1; l <= k - 1 && !found; ++l) {
            if ((long long)(k - 1) * (sum_a - l) == sum_w - (k - l)) {
                run.l = l;
                found = true;
            }
        }
        if (found) {
            run.degenerate_l = (sum_a == 0 && sum_w == 0);
            return std::nullopt;
        }

        if (delta % k != 0)
            throw internal_error("stage_balance_m2: split residual lost divisibility");
        if (run.m2.size() >= run.m1.size())
            return extremal_detail::fail(
                "balance_m2", "balancing needs more edges than the D cover",
                {{"m1", double(run.m1.size())},
                 {"m2", double(run.m2.size())},
                 {"delta", double(delta)}});

        std::vector<Vertex> partial;
        for (int c = 1; c <= k - 1; ++c) {
            int pick = -1;
            for (int i : run.a_prime[c - 1])
                if (!run.m1.covered(c).test(i) && !run.m2.covered(c).test(i)) {
                    pick = i;
                    break;
                }
            if (pick < 0)
                return extremal_detail::fail("balance_m2",
                                             "A' residual empty in class " + std::to_string(c),
                                             {{"class", double(c)}});
            partial.push_back(Vertex{c, pick});
        }
        DynBits comp = g.completions(LegalSet(std::vector<Vertex>(partial)));
        comp.andnot_with(run.m0.covered(k));
        comp.andnot_with(run.m1.covered(k));
        comp.andnot_with(run.m2.covered(k));
        int ext = comp.find_first();
        if (ext == -1)
            return extremal_detail::fail("balance_m2", "no completion for the balancing edge",
                                         {{"delta", double(delta)}});
        std::vector<int> tuple(k);
        for (const Vertex& x : partial) tuple[x.cls - 1] = x.idx;
        tuple[k - 1] = ext;
        run.m2.add(g, *g.find_edge(tuple));
    }
}

// Leave-out set: the l lowest classes with A' residual contribute one residual
// A vertex each; every other class contributes its lowest leftover W vertex.
inline std::optional<StageFailure> stage_choose_leave_out(const KPGraph& g, ExtremalRun& run) {
    int k = g.k();
    std::vector<int> a_classes;
    for (int c = 1; c <= k && int(a_classes.size()) < run.l; ++c)
        if (extremal_detail::resid_a_sum(run, c) > 0) a_classes.push_back(c);
    if (int(a_classes.size()) < run.l)
        return extremal_detail::fail(
            "leave_out", "fewer classes with A' residual than l",
            {{"l", double(run.l)}, {"classes", double(a_classes.size())}});

    std::vector<Vertex> vs;
    for (int c = 1; c <= k; ++c) {
        bool use_a = std::find(a_classes.begin(), a_classes.end(), c) != a_classes.end();
        int pick = -1;
        if (use_a) {
            for (int i : run.a_prime[c - 1])
                if (!run.m1.covered(c).test(i) && !run.m2.covered(c).test(i)) {
                    pick = i;
                    break;
                }
        } else {
            for (int i : run.w[c - 1])
                if (!run.m0.covered(c).test(i) && !run.m1.covered(c).test(i) &&
                    !run.m2.covered(c).test(i)) {
                    pick = i;
                    break;
                }
        }
        if (pick < 0)
            return extremal_detail::fail("leave_out",
                                         "no leftover vertex in class " + std::to_string(c),
                                         {{"class", double(c)}, {"want_a", use_a ? 1.0 : 0.0}});
        vs.push_back(Vertex{c, pick});
    }
    run.leave_out = LegalSet(std::move(vs));
    return std::nullopt;
}

// Split the leftover A''/W'' vertices into per-class-balanced blocks: block i
// holds A_i'' in class i and |A_i''| leftover W vertices in every other class.
inline std::variant<std::vector<std::vector<std::vector<int>>>, StageFailure> partition_f(
    const std::vector<std::vector<int>>& a2, const std::vector<std::vector<int>>& w2) {
    int k = int(a2.size());
    long long sum_a = 0;
    for (int c = 0; c < k; ++c) sum_a += (long long)a2[c].size();
    for (int j = 0; j < k; ++j) {
        long long want = sum_a - (long long)a2[j].size();
        if ((long long)w2[j].size() != want)
            return extremal_detail::fail(
                "partition_f", "leftover W size off in class " + std::to_string(j + 1),
                {{"have", double(w2[j].size())}, {"want", double(want)}});
    }
    std::vector<std::vector<std::vector<int>>> f(k, std::vector<std::vector<int>>(k));
    for (int i = 0; i < k; ++i) f[i][i] = a2[i];
    for (int j = 0; j < k; ++j) {
        std::size_t at = 0;
        for (int i = 0; i < k; ++i) {
            if (i == j) continue;
            for (std::size_t t = 0; t < a2[i].size(); ++t) f[i][j].push_back(w2[j][at++]);
        }
    }
    return f;
}

inline std::optional<StageFailure> stage_partition(const KPGraph& g, ExtremalRun& run) {
    int k = g.k();
    run.a2.assign(k, {});
    run.w2.assign(k, {});
    auto left_out = [&](Vertex v) {
        for (const Vertex& x : run.leave_out.vertices())
            if (x == v) return true;
        return false;
    };
    for (int c = 1; c <= k; ++c) {
        for (int i : run.a_prime[c - 1]) {
            if (run.m1.covered(c).test(i) || run.m2.covered(c).test(i)) continue;
            if (left_out(Vertex{c, i})) continue;
            run.a2[c - 1].push_back(i);
        }
        for (int i : run.w[c - 1]) {
            if (run.m0.covered(c).test(i) || run.m1.covered(c).test(i) ||
                run.m2.covered(c).test(i))
                continue;
            if (left_out(Vertex{c, i})) continue;
            run.w2[c - 1].push_back(i);
        }
    }

    long long sum_a = 0, sum_w = 0;
    for (int c = 1; c <= k; ++c) {
        sum_a += (long long)run.a2[c - 1].size();
        sum_w += (long long)run.w2[c - 1].size();
    }
    if ((long long)(k - 1) * sum_a != sum_w)
        return extremal_detail::fail("partition_f", "split residual identity failed after L",
                                     {{"(k-1)*sumA", double((k - 1) * sum_a)},
                                      {"sumW", double(sum_w)}});
    run.n_second = (long long)run.a2[0].size() + (long long)run.w2[0].size();
    if (sum_a != run.n_second)
        return extremal_detail::fail("partition_f", "block total differs from class residual",
                                     {{"sumA", double(sum_a)}, {"n''", double(run.n_second)}});
    for (int c = 1; c <= k; ++c) {
        long long want = sum_a - (long long)run.a2[c - 1].size();
        if ((long long)run.w2[c - 1].size() != want)
            return extremal_detail::fail(
                "partition_f", "W'' size in class " + std::to_string(c) + " off",
                {{"have", double(run.w2[c - 1].size())}, {"want", double(want)}});
    }

    auto res = partition_f(run.a2, run.w2);
    if (std::holds_alternative<StageFailure>(res)) return std::get<StageFailure>(res);
    run.f = std::get<std::vector<std::vector<std::vector<int>>>>(res);
    return std::nullopt;
}

inline std::optional<StageFailure> stage_finish_blocks(const KPGraph& g, ExtremalRun& run,
                                                       const ExtremalOptions& opt) {
    int k = g.k();
    run.f_matchings.clear();
    run.f_precheck.assign(k, false);
    for (int i = 0; i < k; ++i) {
        long long want = (long long)run.a2[i].size();
        if (want == 0) {
            run.f_matchings.emplace_back(g);
            continue;
        }
        std::vector<Vertex> drop;
        for (int c = 1; c <= k; ++c) {
            DynBits keep(g.class_size(c));
            for (int idx : run.f[i][c - 1]) keep.set(idx);
            for (int idx : g.alive_indices(c))
                if (!keep.test(idx)) drop.push_back(Vertex{c, idx});
        }
        KPGraph block = g.delete_vertices(drop);
        run.f_precheck[i] = degree_split_precheck(block, 1, 0.1);
        OracleResult res = max_matching_exact(block, opt.oracle_budget);
        if (!res.exact)
            return extremal_detail::fail("finish_blocks",
                                         "oracle budget exhausted on block " + std::to_string(i + 1),
                                         {{"budget", double(opt.oracle_budget)}});
        if (res.size < want)
            return extremal_detail::fail(
                "finish_blocks", "block " + std::to_string(i + 1) + " has no perfect matching",
                {{"found", double(res.size)}, {"want", double(want)}});
        run.f_matchings.push_back(res.matching);
    }

    run.total = Matching(g);
    run.total.merge(g, run.m0);
    run.total.merge(g, run.m1);
    run.total.merge(g, run.m2);
    for (const Matching& m : run.f_matchings) run.total.merge(g, m);
    run.total.validate(g);
    for (int c = 1; c <= k; ++c)
        if (run.total.uncovered_count(g, c) != 1)
            throw internal_error("extremal assembly misses more than the leave-out");
    return std::nullopt;
}

struct ExtremalResult {
    std::optional<Matching> matching;
    std::optional<StageFailure> failure;
    ExtremalRun run;
};

inline ExtremalResult run_extremal(const KPGraph& g,
                                   const std::vector<std::vector<int>>& witness_per_class,
                                   double gamma, double eps, const ExtremalOptions& opt = {}) {
    int k = g.k();
    if (k < 3) throw input_error("run_extremal: k >= 3 required");
    if (!g.balanced()) throw input_error("run_extremal: balanced instance required");
    if (int(witness_per_class.size()) != k)
        throw input_error("run_extremal: witness must list every class");
    if (!(gamma >= 0 && gamma < 1.0 - 1.0 / k))
        throw input_error("run_extremal: gamma outside [0, 1 - 1/k)");
    if (!(eps > 0 && eps < 1.0 / k)) throw input_error("run_extremal: eps outside (0, 1/k)");
    if (opt.strict_constants && !strict_params_ok(k, gamma, eps))
        throw input_error("run_extremal: (gamma, eps) fail the strict parameter regime");

    ExtremalResult result;
    ExtremalRun& run = result.run;
    run.gamma = gamma;
    run.eps = eps;
    run.n = g.effective_size(1);

    auto fail = [&](StageFailure f) {
        result.failure = std::move(f);
        return result;
    };
    if (auto f = stage_trim_witness(g, run, witness_per_class)) return fail(*f);
    if (auto f = stage_select_a(g, run)) return fail(*f);
    if (auto f = stage_build_m0(g, run)) return fail(*f);
    if (auto f = stage_cover_d(g, run)) return fail(*f);
    if (auto f = stage_balance_m2(g, run)) return fail(*f);
    if (auto f = stage_choose_leave_out(g, run)) return fail(*f);
    if (auto f = stage_partition(g, run)) return fail(*f);
    if (auto f = stage_finish_blocks(g, run, opt)) return fail(*f);
    result.matching = run.total;
    return result;
}

} // namespace hypermatch
