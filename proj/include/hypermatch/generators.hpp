#pragma once

// Instance factories. Every generator is a pure function of its parameters and
// seed: identical inputs produce bit-identical instances.

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "graph.hpp"
#include "prng.hpp"

namespace hypermatch {

enum class GenKind { h0, complete, empty, random, codegree_floor };

inline std::string to_string(GenKind k) {
    switch (k) {
        case GenKind::h0: return "h0";
        case GenKind::complete: return "complete";
        case GenKind::empty: return "empty";
        case GenKind::random: return "random";
        case GenKind::codegree_floor: return "codegree_floor";
    }
    return "?";
}

inline std::optional<GenKind> parse_gen_kind(const std::string& s) {
    if (s == "h0") return GenKind::h0;
    if (s == "complete") return GenKind::complete;
    if (s == "empty") return GenKind::empty;
    if (s == "random") return GenKind::random;
    if (s == "codegree_floor" || s == "codegree-floor") return GenKind::codegree_floor;
    return std::nullopt;
}

struct GenSpec {
    GenKind kind = GenKind::empty;
    int k = 3;
    int n = 0;
    double p = 0;       // random density
    int d_min = 0;      // co-degree floor
    std::uint64_t seed = 0;
};

namespace detail {

inline void check_enumerable(int k, int n) {
    double total = std::pow(double(n), k);
    if (total > 5e7)
        throw input_error("generator: n^k too large to enumerate (" + std::to_string(n) + "^" +
                          std::to_string(k) + ")");
}

// Visit all n^k index tuples in lexicographic order.
template <class F>
void for_each_tuple(int k, int n, F&& f) {
    if (n == 0) return;
    std::vector<int> t(k, 0);
    std::uint64_t rank = 0;
    while (true) {
        f(t, rank);
        ++rank;
        int d = k - 1;
        while (d >= 0 && ++t[d] == n) t[d--] = 0;
        if (d < 0) break;
    }
}

} // namespace detail

inline KPGraph gen_complete(int k, int n) {
    if (k < 2 || n < 0) throw input_error("gen_complete: need k >= 2, n >= 0");
    detail::check_enumerable(k, n);
    std::vector<std::vector<int>> edges;
    detail::for_each_tuple(k, n, [&](const std::vector<int>& t, std::uint64_t) {
        edges.push_back(t);
    });
    return KPGraph(k, std::vector<int>(k, n), edges);
}

inline KPGraph gen_empty(int k, int n) {
    if (k < 2 || n < 0) throw input_error("gen_empty: need k >= 2, n >= 0");
    return KPGraph(k, std::vector<int>(k, n), {});
}

// U_i = the lowest floor((n-1)/k) indices of class i; the edges are exactly
// the legal k-sets meeting the union of the U_i.
inline KPGraph gen_h0(int k, int n) {
    if (k < 2 || n < k) throw input_error("gen_h0: need n >= k >= 2");
    detail::check_enumerable(k, n);
    int u = (n - 1) / k;
    std::vector<std::vector<int>> edges;
    detail::for_each_tuple(k, n, [&](const std::vector<int>& t, std::uint64_t) {
        for (int c = 0; c < k; ++c)
            if (t[c] < u) {
                edges.push_back(t);
                return;
            }
    });
    return KPGraph(k, std::vector<int>(k, n), edges);
}

inline int h0_guard_size(int k, int n) { return (n - 1) / k; }

// Each legal k-set is an edge independently with probability p.
inline KPGraph gen_random(int k, int n, double p, std::uint64_t seed) {
    if (k < 2 || n < 0) throw input_error("gen_random: need k >= 2, n >= 0");
    if (p < 0 || p > 1) throw input_error("gen_random: p in [0,1]");
    detail::check_enumerable(k, n);
    std::vector<std::vector<int>> edges;
    detail::for_each_tuple(k, n, [&](const std::vector<int>& t, std::uint64_t rank) {
        if (prng::u01(seed, prng::kStreamRandomEdges, rank) < p) edges.push_back(t);
    });
    return KPGraph(k, std::vector<int>(k, n), edges);
}

// Random base at density d_min/n, then a repair pass: every legal (k-1)-set
// with degree below d_min gets missing completions added (drawn without
// replacement, deterministically) until it reaches d_min. Additions only raise
// other degrees, so one pass suffices and the floor holds on output.
inline KPGraph gen_codegree_floor(int k, int n, int d_min, std::uint64_t seed) {
    if (k < 2 || n < 0) throw input_error("gen_codegree_floor: need k >= 2, n >= 0");
    if (d_min < 0 || d_min > n) throw input_error("gen_codegree_floor: need 0 <= d_min <= n");
    detail::check_enumerable(k, n);
    if (n == 0) return gen_empty(k, n);

    double p0 = double(d_min) / double(n);
    std::unordered_set<std::uint64_t> ranks;
    detail::for_each_tuple(k, n, [&](const std::vector<int>&, std::uint64_t rank) {
        if (prng::u01(seed, prng::kStreamRandomEdges, rank) < p0) ranks.insert(rank);
    });

    // rank helpers (radix n in every class)
    auto full_rank = [&](const std::vector<int>& t) {
        std::uint64_t r = 0;
        for (int c = 0; c < k; ++c) r = r * std::uint64_t(n) + std::uint64_t(t[c]);
        return r;
    };

    if (d_min > 0) {
        // degree counters per missing class, keyed by the rank of the tuple
        // with the missing slot zeroed and tagged by class
        std::vector<std::unordered_map<std::uint64_t, int>> deg(k);
        auto key_for = [&](std::vector<int> t, int missing) {
            t[missing] = 0;
            return full_rank(t);
        };
        auto count_edge = [&](const std::vector<int>& t, int delta) {
            for (int c = 0; c < k; ++c) deg[c][key_for(t, c)] += delta;
        };
        std::vector<int> tmp(k);
        for (std::uint64_t r : ranks) {
            std::uint64_t x = r;
            for (int c = k - 1; c >= 0; --c) {
                tmp[c] = int(x % std::uint64_t(n));
                x /= std::uint64_t(n);
            }
            count_edge(tmp, +1);
        }

        // repair, missing class ascending, (k-1)-tuples in lexicographic order
        for (int missing = 0; missing < k; ++missing) {
            std::vector<int> t(k, 0);
            t[missing] = 0;
            std::vector<int> dims;
            for (int c = 0; c < k; ++c)
                if (c != missing) dims.push_back(c);
            std::vector<int> it(k - 1, 0);
            while (true) {
                for (int d = 0; d < k - 1; ++d) t[dims[d]] = it[d];
                std::uint64_t key = key_for(t, missing);
                int have = 0;
                if (auto f = deg[missing].find(key); f != deg[missing].end()) have = f->second;
                if (have < d_min) {
                    std::vector<int> absent;
                    for (int v = 0; v < n; ++v) {
                        t[missing] = v;
                        if (!ranks.count(full_rank(t))) absent.push_back(v);
                    }
                    t[missing] = 0;
                    prng::shuffle(absent, seed,
                                  prng::substream(prng::kStreamFloorRepair, std::uint64_t(missing),
                                                  key));
                    for (int j = 0; j < d_min - have; ++j) {
                        t[missing] = absent[j];
                        ranks.insert(full_rank(t));
                        count_edge(t, +1);
                    }
                    t[missing] = 0;
                }
                int d = k - 2;
                while (d >= 0 && ++it[d] == n) it[d--] = 0;
                if (d < 0) break;
            }
        }
    }

    std::vector<std::vector<int>> edges;
    edges.reserve(ranks.size());
    std::vector<int> tmp(k);
    for (std::uint64_t r : ranks) {
        std::uint64_t x = r;
        for (int c = k - 1; c >= 0; --c) {
            tmp[c] = int(x % std::uint64_t(n));
            x /= std::uint64_t(n);
        }
        edges.push_back(tmp);
    }
    return KPGraph(k, std::vector<int>(k, n), edges);
}

inline KPGraph generate(const GenSpec& s) {
    switch (s.kind) {
        case GenKind::h0: return gen_h0(s.k, s.n);
        case GenKind::complete: return gen_complete(s.k, s.n);
        case GenKind::empty: return gen_empty(s.k, s.n);
        case GenKind::random: return gen_random(s.k, s.n, s.p, s.seed);
        case GenKind::codegree_floor: return gen_codegree_floor(s.k, s.n, s.d_min, s.seed);
    }
    throw input_error("generate: unknown kind");
}

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

inline std::string genspec_comment(const GenSpec& s) {
    std::ostringstream os;
    os << "genspec: kind=" << to_string(s.kind) << " k=" << s.k << " n=" << s.n;
    if (s.kind == GenKind::random) os << " p=" << format_double(s.p);
    if (s.kind == GenKind::codegree_floor) os << " d_min=" << s.d_min;
    if (s.kind == GenKind::random || s.kind == GenKind::codegree_floor) os << " seed=" << s.seed;
    return os.str();
}

// Short label for CSV cells (no commas).
inline std::string gen_label(const GenSpec& s) {
    switch (s.kind) {
        case GenKind::random: return "random(p=" + format_double(s.p) + ")";
        case GenKind::codegree_floor: return "codegree_floor(d=" + std::to_string(s.d_min) + ")";
        default: return to_string(s.kind);
    }
}

} // namespace hypermatch
