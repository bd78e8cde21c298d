// Command-line front end: instance generation, solving, exact matching
// numbers, co-degrees, threshold checks, experiment scans, and absorbing-plan
// certification. Exit codes: 0 done, 2 done with findings (counterexamples,
// stalls, uncertified plans), 1 input error.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hypermatch/absorbing.hpp"
#include "hypermatch/driver.hpp"
#include "hypermatch/generators.hpp"
#include "hypermatch/io.hpp"
#include "hypermatch/oracle.hpp"

using namespace hypermatch;

namespace {

struct OutSink {
    std::ofstream file;
    std::ostream* os = &std::cout;
    explicit OutSink(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw input_error("cannot open " + path + " for writing");
        os = &file;
    }
    std::ostream& get() { return *os; }
};

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw input_error("empty list: " + s);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"k-partite k-graph matching toolkit"};
    app.require_subcommand(1);

    // global knobs
    std::uint64_t seed = 0;
    double gamma = 0.1, epsilon = 0.2, beta = -1, c_const = -1;
    bool strict = false;
    int fallback_cap = -1;
    std::uint64_t budget = 10'000'000;
    std::string format = "text", out_path;
    bool timings = false;
    app.add_option("--seed", seed, "seed for every randomized component");
    app.add_option("--gamma", gamma, "witness-density parameter");
    app.add_option("--epsilon", epsilon, "extremal slice parameter");
    app.add_option("--beta", beta, "augmentation slack (default gamma/(2k^2))");
    app.add_option("--c", c_const, "absorbing co-degree fraction (default 1/k)");
    app.add_flag("--strict-constants", strict, "enforce the analysis parameter regime");
    app.add_option("--fallback-cap", fallback_cap, "largest n the exact fallback may solve");
    app.add_option("--budget", budget, "exact-search node budget");
    app.add_option("--format", format, "csv or text")->check(CLI::IsMember({"csv", "text"}));
    app.add_option("--out", out_path, "write output to this file instead of stdout");
    app.add_flag("--timings", timings, "include wall-clock timings (breaks byte reproducibility)");

    auto params = [&](int /*k*/) {
        SolveParams p;
        p.gamma = gamma;
        p.epsilon = epsilon;
        p.beta = beta;
        p.c = c_const;
        p.seed = seed;
        p.strict_constants = strict;
        p.fallback_cap = fallback_cap;
        p.budget = budget;
        return p;
    };

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "generate an instance file");
    std::string gen_kind = "h0";
    int gen_k = 3, gen_n = 6, gen_dmin = 0;
    double gen_p = 0.5;
    gen_cmd->add_option("--kind", gen_kind, "h0|complete|empty|random|codegree-floor")
        ->required();
    gen_cmd->add_option("--k", gen_k, "number of partition classes");
    gen_cmd->add_option("--n", gen_n, "class size");
    gen_cmd->add_option("--p", gen_p, "edge probability (random)");
    gen_cmd->add_option("--d-min", gen_dmin, "co-degree floor (codegree-floor)");

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "run the matching pipeline on an instance");
    std::string solve_input, route = "auto";
    solve_cmd->add_option("input", solve_input, "instance file")->required();
    solve_cmd->add_option("--route", route, "auto|extremal|nonextremal")
        ->check(CLI::IsMember({"auto", "extremal", "nonextremal"}));

    // nu
    auto* nu_cmd = app.add_subcommand("nu", "exact maximum matching size");
    std::string nu_input;
    nu_cmd->add_option("input", nu_input, "instance file")->required();

    // codegree
    auto* cod_cmd = app.add_subcommand("codegree", "minimum l-degree");
    std::string cod_input;
    int cod_l = -1;
    cod_cmd->add_option("input", cod_input, "instance file")->required();
    cod_cmd->add_option("--l", cod_l, "set size (default k-1)");

    // check-theorem
    auto* thm_cmd = app.add_subcommand("check-theorem",
                                       "evaluate the co-degree hypothesis and the conclusion");
    std::string thm_input;
    thm_cmd->add_option("input", thm_input, "instance file")->required();

    // scan
    auto* scan_cmd = app.add_subcommand("scan", "solve a seeded grid and emit CSV");
    std::string scan_kind = "codegree-floor", scan_ns = "6", scan_dmin = "auto";
    int scan_k = 3, scan_seeds = 1, scan_jobs = 1;
    std::uint64_t scan_seed0 = 0;
    double scan_p = 0.5;
    scan_cmd->add_option("--kind", scan_kind, "h0|complete|empty|random|codegree-floor");
    scan_cmd->add_option("--k", scan_k, "number of partition classes");
    scan_cmd->add_option("--n", scan_ns, "comma-separated class sizes");
    scan_cmd->add_option("--p", scan_p, "edge probability (random)");
    scan_cmd->add_option("--d-min", scan_dmin, "co-degree floor or 'auto' for ceil(n/k)");
    scan_cmd->add_option("--seeds", scan_seeds, "seeds per grid point");
    scan_cmd->add_option("--seed0", scan_seed0, "first seed");
    scan_cmd->add_option("--jobs", scan_jobs, "worker threads");

    // verify-absorbing
    auto* va_cmd = app.add_subcommand("verify-absorbing",
                                      "sample and certify an absorbing plan, reporting per-S counts");
    std::string va_input;
    long long va_t = 1;
    int va_cap = -1, va_retries = 64;
    va_cmd->add_option("input", va_input, "instance file")->required();
    va_cmd->add_option("--t", va_t, "per-S absorbing floor");
    va_cmd->add_option("--size-cap", va_cap, "plan size cap (default n)");
    va_cmd->add_option("--retries", va_retries, "sampling attempts");


    for (CLI::App* sc : app.get_subcommands([](const CLI::App*) { return true; }))
        sc->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        OutSink sink(out_path);
        std::ostream& os = sink.get();

        if (*gen_cmd) {
            auto kind = parse_gen_kind(gen_kind);
            if (!kind) throw input_error("unknown kind: " + gen_kind);
            GenSpec spec;
            spec.kind = *kind;
            spec.k = gen_k;
            spec.n = gen_n;
            spec.p = gen_p;
            spec.d_min = gen_dmin;
            spec.seed = seed;
            KPGraph g = generate(spec);
            write_instance(os, g, {genspec_comment(spec)});
            return 0;
        }

        if (*solve_cmd) {
            KPGraph g = read_instance_file(solve_input);
            SolveParams p = params(g.k());
            if (route == "extremal") p.force_route = SolveParams::Route::extremal;
            if (route == "nonextremal") p.force_route = SolveParams::Route::nonextremal;
            SolveReport rep = solve(g, p);
            if (format == "csv")
                os << report_csv(rep, g.k(), g.effective_size(1));
            else
                os << report_text(rep, timings);
            return rep.findings ? 2 : 0;
        }

        if (*nu_cmd) {
            KPGraph g = read_instance_file(nu_input);
            OracleResult r = max_matching_exact(g, budget);
            if (format == "csv") {
                os << "nu,exact,nodes\n" << r.size << ',' << (r.exact ? 1 : 0) << ',' << r.nodes
                   << "\n";
            } else {
                os << "nu: " << r.size << "\n"
                   << "exact: " << (r.exact ? "yes" : "no (budget exhausted, lower bound)") << "\n";
            }
            return r.exact ? 0 : 2;
        }

        if (*cod_cmd) {
            KPGraph g = read_instance_file(cod_input);
            int l = cod_l > 0 ? cod_l : g.k() - 1;
            long long d = g.min_l_degree(l);
            if (format == "csv")
                os << "l,delta\n" << l << ',' << d << "\n";
            else
                os << "delta_" << l << ": " << d << "\n";
            return 0;
        }

        if (*thm_cmd) {
            KPGraph g = read_instance_file(thm_input);
            TheoremCheck tc = check_theorem(g, budget);
            if (format == "csv") {
                os << "n,delta,nu,nu_exact,verdict\n"
                   << tc.n << ',' << tc.delta << ',' << tc.nu << ',' << (tc.nu_exact ? 1 : 0)
                   << ',' << to_string(tc.verdict) << "\n";
            } else {
                os << "n: " << tc.n << "\ncodegree: " << tc.delta << "\n";
                if (tc.nu >= 0)
                    os << "nu: " << tc.nu << (tc.nu_exact ? "" : " (lower bound)") << "\n";
                os << "verdict: " << to_string(tc.verdict) << "\n";
            }
            return tc.verdict == TheoremCheck::Verdict::counterexample ? 2 : 0;
        }

        if (*scan_cmd) {
            auto kind = parse_gen_kind(scan_kind);
            if (!kind) throw input_error("unknown kind: " + scan_kind);
            std::vector<GenSpec> grid;
            bool seeded =
                *kind == GenKind::random || *kind == GenKind::codegree_floor;
            for (int n : parse_int_list(scan_ns)) {
                int reps = seeded ? scan_seeds : 1;
                for (int t = 0; t < reps; ++t) {
                    GenSpec s;
                    s.kind = *kind;
                    s.k = scan_k;
                    s.n = n;
                    s.p = scan_p;
                    if (*kind == GenKind::codegree_floor)
                        s.d_min = (scan_dmin == "auto") ? (n + scan_k - 1) / scan_k
                                                        : std::stoi(scan_dmin);
                    s.seed = scan_seed0 + std::uint64_t(t);
                    grid.push_back(s);
                }
            }
            auto rows = scan(grid, params(scan_k), scan_jobs);
            write_scan_csv(os, rows, timings);
            for (const ScanRow& r : rows)
                if (r.verdict == "counterexample") return 2;
            return 0;
        }

        if (*va_cmd) {
            KPGraph g = read_instance_file(va_input);
            int k = g.k();
            int n = g.effective_size(1);
            double c = c_const > 0 ? c_const : 1.0 / k;
            // --strict-constants switches to the unscaled analysis rate and floors
            long long t = strict ? analysis_floor_t(k, n) : va_t;
            int cap = va_cap > 0
                          ? va_cap
                          : (strict ? int(std::min<long long>(analysis_size_cap(k, n, c), 1 << 20))
                                    : n);
            auto res =
                sample_absorbing_matching(g, c, t, cap, seed, va_retries, 12, 1000, strict);
            if (!res.plan) {
                std::cerr << res.reason << " (attempts: " << res.attempts << ")\n";
                return 2;
            }
            AbsorbAudit audit = audit_absorbing(g, res.plan->m_prime, t, 12, 1000,
                                                prng::substream(seed, 0xA11D17), true);
            os << "# plan: edges=" << res.plan->m_prime.size() << " floor=" << t
               << " attempts=" << res.attempts << " sets_checked=" << audit.sets_checked
               << " min_count=" << audit.min_count << (audit.sampled ? " (sampled S)" : "")
               << "\n";
            os << "j,s,count\n";
            for (const AbsorbAuditRow& row : audit.rows) {
                os << row.s.j << ',';
                bool first = true;
                for (const Vertex& x : row.s.vertices()) {
                    os << (first ? "" : " ") << x.cls << ':' << x.idx;
                    first = false;
                }
                os << ',' << row.count << "\n";
            }
            return audit.certified ? 0 : 2;
        }
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const internal_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
