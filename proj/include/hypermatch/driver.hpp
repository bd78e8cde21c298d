#pragma once

// Top-level solve pipeline and the experiment harness. solve() follows the
// dichotomy: look for a large independent witness and run the extremal
// assembly if one exists; otherwise sample an absorbing plan, grow an almost
// perfect matching beside it, and absorb leftover pairs one class at a time.
// Any failure downgrades to the exact oracle below the fallback cap, or to the
// best matching found so far with an explicit lower-bound note.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "absorbing.hpp"
#include "augmenting.hpp"
#include "extremal.hpp"
#include "generators.hpp"
#include "graph.hpp"
#include "oracle.hpp"

namespace hypermatch {

struct SolveParams {
    double gamma = 0.1;
    double epsilon = 0.2;
    double beta = -1;       // <= 0: gamma / (2 k^2)
    double c = -1;          // <= 0: 1 / k
    std::uint64_t seed = 0;
    bool strict_constants = false;
    int fallback_cap = -1;  // <= 0: 9 for k <= 3, 6 for k == 4, 5 beyond
    std::uint64_t budget = 10'000'000;
    long long absorb_floor = 1;
    int absorb_cap = -1;    // <= 0: n
    int absorb_retries = 64;
    int verify_cap = 12;
    int sample_per_class = 1000;
    int witness_exact_cap = 10;

    enum class Route { automatic, extremal, nonextremal };
    Route force_route = Route::automatic;

    double beta_for(int k) const { return beta > 0 ? beta : gamma / (2.0 * k * k); }
    double c_for(int k) const { return c > 0 ? c : 1.0 / k; }
    int fallback_cap_for(int k) const {
        if (fallback_cap > 0) return fallback_cap;
        return k <= 3 ? 9 : (k == 4 ? 6 : 5);
    }
};

enum class SolveRoute { extremal, nonextremal, oracle_fallback };

inline std::string to_string(SolveRoute r) {
    switch (r) {
        case SolveRoute::extremal: return "extremal";
        case SolveRoute::nonextremal: return "nonextremal";
        case SolveRoute::oracle_fallback: return "oracle_fallback";
    }
    return "?";
}

struct SolveReport {
    SolveRoute route = SolveRoute::oracle_fallback;
    Matching matching;
    long long size = 0;
    long long target = 0; // n - 1
    bool size_exact = false; // true when the fallback oracle finished
    bool findings = false;   // stalls, plan failures, or non-exact fallback
    bool hypothesis_met = true;
    std::vector<std::string> stage_log;
    std::vector<std::pair<std::string, double>> timings_ms;
    SolveParams params;
};

namespace driver_detail {

class StageTimer {
public:
    explicit StageTimer(SolveReport& r) : r_(r) {}
    template <class F>
    auto time(const std::string& name, F&& f) {
        auto t0 = std::chrono::steady_clock::now();
        auto cleanup = [&] {
            auto t1 = std::chrono::steady_clock::now();
            r_.timings_ms.push_back(
                {name, std::chrono::duration<double, std::milli>(t1 - t0).count()});
        };
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            cleanup();
        } else {
            auto out = f();
            cleanup();
            return out;
        }
    }

private:
    SolveReport& r_;
};

inline std::string join_counts(const std::vector<long long>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
    return s;
}

} // namespace driver_detail

inline SolveReport solve(const KPGraph& g, const SolveParams& params = {}) {
    int k = g.k();
    if (!g.balanced()) throw input_error("solve: balanced instance required");
    int n = g.effective_size(1);
    if (n == 0) throw input_error("solve: empty classes");

    SolveReport rep;
    rep.params = params;
    rep.params.beta = params.beta_for(k);
    rep.params.c = params.c_for(k);
    rep.target = n - 1;
    rep.matching = Matching(g);
    driver_detail::StageTimer timer(rep);

    long long delta = timer.time("codegree", [&] { return g.min_l_degree(k - 1); });
    long long need = (n + k - 1) / k; // integer reading of delta >= n/k
    rep.hypothesis_met = delta * (long long)k >= n;
    if (!rep.hypothesis_met)
        rep.stage_log.push_back("hypothesis: codegree " + std::to_string(delta) + " < ceil(n/k) = " +
                                std::to_string(need) + " (warning, solving anyway)");

    Matching best_so_far(g);
    auto track = [&](const Matching& m) {
        if (m.size() > best_so_far.size()) best_so_far = m;
    };

    bool try_extremal = params.force_route != SolveParams::Route::nonextremal && k >= 3;
    bool tried_constructive = false;

    if (try_extremal) {
        WitnessSearch ws = timer.time("witness_search", [&] {
            return find_extremal_witness(g, params.gamma, params.witness_exact_cap);
        });
        if (ws.witness) {
            rep.stage_log.push_back(std::string("witness: found (") +
                                    (ws.exhaustive ? "exact search" : "greedy peel") + ")");
            tried_constructive = true;
            ExtremalOptions opt;
            opt.strict_constants = params.strict_constants;
            opt.oracle_budget = params.budget;
            ExtremalResult ex = timer.time("extremal", [&] {
                return run_extremal(g, ws.witness->per_class, params.gamma, params.epsilon, opt);
            });
            if (ex.matching) {
                ex.matching->validate(g);
                rep.route = SolveRoute::extremal;
                rep.matching = std::move(*ex.matching);
                rep.size = rep.matching.size();
                rep.stage_log.push_back("extremal: assembled size " + std::to_string(rep.size));
                return rep;
            }
            rep.findings = true;
            std::string ev;
            for (auto& [key, val] : ex.failure->values)
                ev += " " + key + "=" + format_double(val);
            rep.stage_log.push_back("extremal: failed at " + ex.failure->stage + ": " +
                                    ex.failure->message + ev);
        } else {
            rep.stage_log.push_back(std::string("witness: none (") +
                                    (ws.exhaustive ? "absence certified" : "heuristic, not certified") +
                                    ")");
        }
    }

    bool try_nonextremal = params.force_route != SolveParams::Route::extremal &&
                           !tried_constructive;
    if (params.force_route == SolveParams::Route::nonextremal) try_nonextremal = true;

    if (try_nonextremal) {
        double c = params.c_for(k);
        // strict mode runs the analysis floors and sampling rate unscaled
        long long floor_t = params.strict_constants ? analysis_floor_t(k, n) : params.absorb_floor;
        int cap = params.absorb_cap > 0
                      ? params.absorb_cap
                      : (params.strict_constants
                             ? int(std::min<long long>(analysis_size_cap(k, n, c), 1 << 20))
                             : n);
        bool plan_ok = false;
        AbsorbSampleResult plan;
        if (double(delta) + 1e-9 >= c * n) {
            plan = timer.time("absorb_plan", [&] {
                return sample_absorbing_matching(g, c, floor_t, cap, params.seed,
                                                 params.absorb_retries, params.verify_cap,
                                                 params.sample_per_class,
                                                 params.strict_constants);
            });
            plan_ok = plan.plan.has_value();
            if (plan_ok)
                rep.stage_log.push_back("absorbing: plan certified, |M'| = " +
                                        std::to_string(plan.plan->m_prime.size()) + ", attempts " +
                                        std::to_string(plan.attempts));
            else {
                rep.findings = true;
                rep.stage_log.push_back("absorbing: " + plan.reason);
            }
        } else {
            rep.findings = true;
            rep.stage_log.push_back("absorbing: skipped, codegree " + std::to_string(delta) +
                                    " below c*n = " + format_double(c * n));
        }

        if (plan_ok) {
            KPGraph carved = g.delete_vertices(plan.plan->m_prime.covered_vertices(g));
            NonextremalResult aug = timer.time("augment", [&] {
                return almost_perfect_nonextremal(carved, params.beta_for(k));
            });
            if (aug.matching) {
                Matching m = plan.plan->m_prime;
                m.merge(g, *aug.matching);
                extend_maximal(g, m);
                track(m);
                rep.stage_log.push_back("nonextremal: base matching size " +
                                        std::to_string(m.size()));

                // absorption loop: cover two uncovered vertices of the fullest
                // class per iteration, at most k^2 - 1 times
                int iterations = 0;
                bool absorb_failed = false;
                while (true) {
                    std::vector<long long> unc(k);
                    long long mx = 0;
                    int j = 1;
                    for (int cc = 1; cc <= k; ++cc) {
                        unc[cc - 1] = m.uncovered_count(g, cc);
                        if (unc[cc - 1] > mx) {
                            mx = unc[cc - 1];
                            j = cc;
                        }
                    }
                    if (mx <= 1) break;
                    if (iterations >= k * k - 1) {
                        rep.findings = true;
                        rep.stage_log.push_back(
                            "absorb: iteration bound k^2-1 reached with uncovered " +
                            driver_detail::join_counts(unc));
                        absorb_failed = true;
                        break;
                    }
                    bool shaped = true;
                    std::vector<int> others(k, 0);
                    std::vector<int> ujs = m.uncovered_indices(g, j);
                    for (int cc = 1; cc <= k && shaped; ++cc) {
                        if (cc == j) continue;
                        std::vector<int> u = m.uncovered_indices(g, cc);
                        if (u.empty())
                            shaped = false;
                        else
                            others[cc - 1] = u[0];
                    }
                    if (!shaped || ujs.size() < 2) {
                        rep.findings = true;
                        rep.stage_log.push_back("absorb: uncovered classes out of shape");
                        absorb_failed = true;
                        break;
                    }
                    TypeJSet s = make_type_j(g, j, ujs[0], ujs[1], others);
                    auto next = absorb_one(g, m, *plan.plan, s);
                    if (!next) {
                        rep.findings = true;
                        rep.stage_log.push_back("absorb: no plan edge absorbs the pair after " +
                                                std::to_string(iterations) + " absorptions");
                        absorb_failed = true;
                        break;
                    }
                    if (next->uncovered_count(g, j) != m.uncovered_count(g, j) - 1)
                        throw internal_error("solve: absorption did not shrink the doubled class");
                    m = std::move(*next);
                    track(m);
                    ++iterations;
                }
                if (!absorb_failed) {
                    if (iterations > 0)
                        rep.stage_log.push_back("absorb: " + std::to_string(iterations) +
                                                " absorptions");
                    m.validate(g);
                    rep.route = SolveRoute::nonextremal;
                    rep.matching = std::move(m);
                    rep.size = rep.matching.size();
                    rep.size_exact = rep.size == n;
                    rep.stage_log.push_back("nonextremal: final size " + std::to_string(rep.size));
                    return rep;
                }
            } else {
                rep.findings = true;
                std::string detail = aug.stalled ? aug.stalled->last.detail : "";
                if (aug.stalled) {
                    Matching m = plan.plan->m_prime;
                    m.merge(g, aug.stalled->final_matching);
                    extend_maximal(g, m);
                    track(m);
                }
                rep.stage_log.push_back("nonextremal: stalled at size " +
                                        std::to_string(aug.stalled ? aug.stalled->matching_size
                                                                   : -1) +
                                        " (" + detail + ")");
                if (aug.stalled) {
                    rep.stage_log.push_back(
                        "nonextremal: |C_j| = " + driver_detail::join_counts(aug.stalled->last.c_sizes) +
                        " vs (1+(k-1)b)n/k = " + format_double(aug.stalled->c_bound) +
                        "; |D_j| = " + driver_detail::join_counts(aug.stalled->last.d_sizes) +
                        " vs (1-k^2 b)n/k = " + format_double(aug.stalled->d_bound));
                }
            }
        }
    }

    // fallback
    if (n <= params.fallback_cap_for(k)) {
        OracleResult res = timer.time("oracle_fallback", [&] {
            return max_matching_exact(g, params.budget);
        });
        rep.route = SolveRoute::oracle_fallback;
        rep.matching = std::move(res.matching);
        rep.size = res.size;
        rep.size_exact = res.exact;
        if (!res.exact) rep.findings = true;
        rep.stage_log.push_back(std::string("fallback: oracle ") +
                                (res.exact ? "exact" : "budget-bound lower estimate") + ", size " +
                                std::to_string(res.size));
    } else {
        Matching greedy = greedy_maximal(g);
        track(greedy);
        rep.route = SolveRoute::oracle_fallback;
        rep.matching = best_so_far;
        rep.size = rep.matching.size();
        rep.size_exact = rep.size == n; // a perfect matching cannot be beaten
        if (!rep.size_exact) {
            rep.findings = true;
            rep.stage_log.push_back("fallback: above the oracle cap, reporting best found (size " +
                                    std::to_string(rep.size) + ", lower bound only)");
        } else {
            rep.stage_log.push_back("fallback: best found is perfect (size " +
                                    std::to_string(rep.size) + ")");
        }
    }
    rep.matching.validate(g);
    return rep;
}

// Hypothesis/conclusion check with the exact oracle.
struct TheoremCheck {
    enum class Verdict { hypothesis_false, confirmed, counterexample, inconclusive };
    Verdict verdict = Verdict::inconclusive;
    long long delta = 0;
    int n = 0;
    long long nu = -1;
    bool nu_exact = false;
};

inline std::string to_string(TheoremCheck::Verdict v) {
    switch (v) {
        case TheoremCheck::Verdict::hypothesis_false: return "hypothesis-false";
        case TheoremCheck::Verdict::confirmed: return "confirmed";
        case TheoremCheck::Verdict::counterexample: return "counterexample";
        case TheoremCheck::Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

inline TheoremCheck check_theorem(const KPGraph& g, std::uint64_t budget = 10'000'000) {
    if (!g.balanced()) throw input_error("check_theorem: balanced instance required");
    TheoremCheck out;
    out.n = g.effective_size(1);
    if (out.n == 0) throw input_error("check_theorem: empty classes");
    out.delta = g.min_l_degree(g.k() - 1);
    if (out.delta * (long long)g.k() < out.n) {
        out.verdict = TheoremCheck::Verdict::hypothesis_false;
        return out;
    }
    OracleResult res = max_matching_exact(g, budget);
    out.nu = res.size;
    out.nu_exact = res.exact;
    if (!res.exact) {
        out.verdict = res.size >= out.n - 1 ? TheoremCheck::Verdict::confirmed
                                            : TheoremCheck::Verdict::inconclusive;
        return out;
    }
    out.verdict = res.size >= out.n - 1 ? TheoremCheck::Verdict::confirmed
                                        : TheoremCheck::Verdict::counterexample;
    return out;
}

struct ScanRow {
    GenSpec spec;
    long long delta = 0;
    SolveRoute route = SolveRoute::oracle_fallback;
    long long size = 0;
    long long nu = -1; // -1: oracle did not finish
    std::string verdict;
    double ms = 0;
};

// One row per spec: generate, measure the co-degree, solve, and (budget
// permitting) compare with the exact optimum. Rows are computed independently
// and emitted in grid order.
inline std::vector<ScanRow> scan(const std::vector<GenSpec>& grid, const SolveParams& params,
                                 int jobs = 1) {
    std::vector<ScanRow> rows(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            ScanRow& row = rows[i];
            row.spec = grid[i];
            auto t0 = std::chrono::steady_clock::now();
            try {
                KPGraph g = generate(grid[i]);
                row.delta = g.min_l_degree(g.k() - 1);
                SolveReport rep = solve(g, params);
                row.route = rep.route;
                row.size = rep.size;
                OracleResult nu = max_matching_exact(g, params.budget);
                if (nu.exact) row.nu = nu.size;
                int n = g.effective_size(1);
                TheoremCheck::Verdict v;
                if (row.delta * (long long)g.k() < n)
                    v = TheoremCheck::Verdict::hypothesis_false;
                else if (nu.size >= n - 1)
                    v = TheoremCheck::Verdict::confirmed;
                else
                    v = nu.exact ? TheoremCheck::Verdict::counterexample
                                 : TheoremCheck::Verdict::inconclusive;
                row.verdict = to_string(v);
            } catch (const std::exception&) {
                row.verdict = "error"; // row-level failures never abort the scan
            }
            auto t1 = std::chrono::steady_clock::now();
            row.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        }
    };
    int threads = std::max(1, jobs);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return rows;
}

// CSV with the fixed header; ms stays 0 unless timings are requested, so that
// identical runs emit identical bytes.
inline void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows,
                           bool with_timings = false) {
    os << "k,n,gen,seed,delta,route,size,nu_exact,verdict,ms\n";
    for (const ScanRow& r : rows) {
        os << r.spec.k << ',' << r.spec.n << ',' << gen_label(r.spec) << ',' << r.spec.seed << ','
           << r.delta << ',' << to_string(r.route) << ',' << r.size << ',';
        if (r.nu >= 0) os << r.nu;
        os << ',' << r.verdict << ',';
        if (with_timings)
            os << (long long)(r.ms + 0.5);
        else
            os << 0;
        os << '\n';
    }
}

inline std::string report_text(const SolveReport& rep, bool with_timings = false) {
    std::ostringstream os;
    os << "route: " << to_string(rep.route) << "\n";
    os << "size: " << rep.size << "\n";
    os << "target: " << rep.target << "\n";
    os << "size_exact: " << (rep.size_exact ? "yes" : "no") << "\n";
    os << "hypothesis_met: " << (rep.hypothesis_met ? "yes" : "no") << "\n";
    os << "findings: " << (rep.findings ? "yes" : "no") << "\n";
    os << "params: gamma=" << format_double(rep.params.gamma)
       << " epsilon=" << format_double(rep.params.epsilon)
       << " beta=" << format_double(rep.params.beta)
       << " c=" << format_double(rep.params.c) << " seed=" << rep.params.seed << "\n";
    os << "stages:\n";
    for (const std::string& s : rep.stage_log) os << "  - " << s << "\n";
    if (with_timings) {
        os << "timings_ms:\n";
        for (auto& [name, ms] : rep.timings_ms) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.1f", ms);
            os << "  " << name << ": " << buf << "\n";
        }
    }
    return os.str();
}

inline std::string report_csv(const SolveReport& rep, int k, int n) {
    std::ostringstream os;
    os << "k,n,route,size,target,size_exact,hypothesis_met,findings\n";
    os << k << ',' << n << ',' << to_string(rep.route) << ',' << rep.size << ',' << rep.target
       << ',' << (rep.size_exact ? 1 : 0) << ',' << (rep.hypothesis_met ? 1 : 0) << ','
       << (rep.findings ? 1 : 0) << "\n";
    return os.str();
}

} // namespace hypermatch
