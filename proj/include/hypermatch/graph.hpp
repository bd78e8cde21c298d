#pragma once

// k-partite k-graph data model. Vertices live in numbered partition classes
// (1-based class, 0-based index within the class); every edge takes exactly
// one vertex per class. A graph is immutable after construction;
// delete_vertices() returns a masked view that shares the edge store, so edge
// ids are stable across views.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bits.hpp"
#include "errors.hpp"

namespace hypermatch {

struct Vertex {
    int cls = 0; // 1..k
    int idx = 0; // 0..n_cls-1
    friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

inline std::string to_string(Vertex v) {
    return "(" + std::to_string(v.cls) + "," + std::to_string(v.idx) + ")";
}

// Vertex set with at most one vertex per class.
class LegalSet {
public:
    LegalSet() = default;
    LegalSet(std::initializer_list<Vertex> vs) : LegalSet(std::vector<Vertex>(vs)) {}

    explicit LegalSet(std::vector<Vertex> vs) : vs_(std::move(vs)) {
        std::sort(vs_.begin(), vs_.end());
        for (const Vertex& v : vs_) {
            if (v.cls < 1 || v.cls > 62) throw input_error("LegalSet: class out of range");
            std::uint64_t bit = std::uint64_t(1) << (v.cls - 1);
            if (mask_ & bit)
                throw input_error("LegalSet: two vertices in class " + std::to_string(v.cls));
            mask_ |= bit;
        }
    }

    int size() const { return int(vs_.size()); }
    bool empty() const { return vs_.empty(); }
    const std::vector<Vertex>& vertices() const { return vs_; }
    std::uint64_t class_mask() const { return mask_; }
    bool occupies(int cls) const { return (mask_ >> (cls - 1)) & 1; }

    std::optional<int> index_in(int cls) const {
        for (const Vertex& v : vs_)
            if (v.cls == cls) return v.idx;
        return std::nullopt;
    }

    friend bool operator==(const LegalSet&, const LegalSet&) = default;

private:
    std::vector<Vertex> vs_;
    std::uint64_t mask_ = 0;
};

namespace detail {

// Shared, immutable edge storage plus co-degree maps built lazily per missing
// class. Lookups lock a mutex; once a class map is built it is never mutated,
// so the returned bitmap pointers stay valid.
struct EdgeStore {
    int k = 0;
    std::vector<int> sizes;
    std::vector<std::int32_t> flat;                // row-major, sorted lex
    std::vector<std::vector<std::vector<int>>> at; // [cls-1][idx] -> edge ids

    mutable std::vector<std::unordered_map<std::uint64_t, DynBits>> comap;
    mutable std::vector<char> costate; // 0 unbuilt, 1 built, 2 unusable (rank overflow)
    mutable std::mutex mu;

    int rows() const { return k ? int(flat.size()) / k : 0; }
    std::span<const std::int32_t> row(int id) const {
        return {flat.data() + std::size_t(id) * k, std::size_t(k)};
    }

    // Mixed-radix rank of the k-1 indices outside `missing`; nullopt on overflow.
    template <class T>
    std::optional<std::uint64_t> corank(int missing, std::span<const T> full_row) const {
        std::uint64_t r = 0;
        for (int c = 1; c <= k; ++c) {
            if (c == missing) continue;
            std::uint64_t n = std::uint64_t(sizes[c - 1]);
            std::uint64_t x = std::uint64_t(full_row[c - 1]);
            if (n == 0) return std::nullopt;
            if (r > (std::numeric_limits<std::uint64_t>::max() - x) / n) return std::nullopt;
            r = r * n + x;
        }
        return r;
    }

    // first: whether the map route is usable; second: raw completion bitmap or
    // nullptr when the key has no completions.
    std::pair<bool, const DynBits*> completions_raw(int missing,
                                                    std::span<const std::int32_t> full) const {
        std::lock_guard<std::mutex> lock(mu);
        char& st = costate[missing - 1];
        if (st == 0) {
            std::vector<std::int32_t> probe(k, 0);
            for (int c = 1; c <= k; ++c)
                probe[c - 1] = sizes[c - 1] > 0 ? std::int32_t(sizes[c - 1] - 1) : 0;
            if (!corank<std::int32_t>(missing, probe)) {
                st = 2;
            } else {
                auto& m = comap[missing - 1];
                for (int id = 0; id < rows(); ++id) {
                    auto e = row(id);
                    std::uint64_t r = *corank<std::int32_t>(missing, e);
                    auto it = m.find(r);
                    if (it == m.end()) it = m.emplace(r, DynBits(sizes[missing - 1])).first;
                    it->second.set(e[missing - 1]);
                }
                st = 1;
            }
        }
        if (st == 2) return {false, nullptr};
        auto r = corank<std::int32_t>(missing, full);
        if (!r) return {true, nullptr};
        auto it = comap[missing - 1].find(*r);
        return {true, it == comap[missing - 1].end() ? nullptr : &it->second};
    }
};

} // namespace detail

class KPGraph {
public:
    KPGraph(int k, std::vector<int> class_sizes, const std::vector<std::vector<int>>& edges) {
        if (k < 2) throw input_error("KPGraph: k must be at least 2");
        if (k > 62) throw input_error("KPGraph: k too large");
        if (int(class_sizes.size()) != k) throw input_error("KPGraph: expected k class sizes");
        for (int n : class_sizes)
            if (n < 0) throw input_error("KPGraph: negative class size");

        auto store = std::make_shared<detail::EdgeStore>();
        store->k = k;
        store->sizes = class_sizes;

        std::vector<std::vector<int>> rows = edges;
        for (const auto& e : rows) {
            if (int(e.size()) != k) throw input_error("KPGraph: edge must have one vertex per class");
            for (int c = 1; c <= k; ++c)
                if (e[c - 1] < 0 || e[c - 1] >= class_sizes[c - 1])
                    throw input_error("KPGraph: edge index out of range in class " +
                                      std::to_string(c));
        }
        std::sort(rows.begin(), rows.end());
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i] == rows[i - 1]) throw input_error("KPGraph: duplicate edge");

        store->flat.reserve(rows.size() * std::size_t(k));
        for (const auto& e : rows)
            for (int x : e) store->flat.push_back(std::int32_t(x));

        store->at.resize(k);
        for (int c = 1; c <= k; ++c) store->at[c - 1].resize(class_sizes[c - 1]);
        for (int id = 0; id < int(rows.size()); ++id)
            for (int c = 1; c <= k; ++c) store->at[c - 1][rows[id][c - 1]].push_back(id);

        store->comap.resize(k);
        store->costate.assign(k, 0);
        store_ = std::move(store);

        deleted_.reserve(k);
        for (int c = 1; c <= k; ++c) deleted_.emplace_back(class_sizes[c - 1]);
        eff_ = class_sizes;
    }

    int k() const { return store_->k; }
    const std::vector<int>& class_sizes() const { return store_->sizes; }
    int class_size(int cls) const { return store_->sizes[cls - 1]; }
    const std::vector<int>& effective_sizes() const { return eff_; }
    int effective_size(int cls) const { return eff_[cls - 1]; }

    bool balanced() const {
        for (int c = 2; c <= k(); ++c)
            if (eff_[c - 1] != eff_[0]) return false;
        return true;
    }

    int edge_rows() const { return store_->rows(); }
    std::span<const std::int32_t> edge(int id) const { return store_->row(id); }

    bool is_deleted(Vertex v) const { return deleted_[v.cls - 1].test(v.idx); }
    const DynBits& deleted_mask(int cls) const { return deleted_[cls - 1]; }

    bool any_deleted() const {
        for (const auto& d : deleted_)
            if (d.any()) return true;
        return false;
    }

    bool edge_alive(int id) const {
        auto e = edge(id);
        for (int c = 1; c <= k(); ++c)
            if (deleted_[c - 1].test(e[c - 1])) return false;
        return true;
    }

    long long alive_edge_count() const {
        if (!any_deleted()) return edge_rows();
        long long n = 0;
        for (int id = 0; id < edge_rows(); ++id)
            if (edge_alive(id)) ++n;
        return n;
    }

    std::span<const int> edges_at(Vertex v) const {
        check_vertex(v);
        return store_->at[v.cls - 1][v.idx];
    }

    // Id of the alive edge with these indices (one per class), if present.
    std::optional<int> find_edge(std::span<const int> tuple) const {
        int kk = k();
        int lo = 0, hi = edge_rows();
        while (lo < hi) {
            int mid = (lo + hi) / 2;
            auto e = edge(mid);
            int cmp = 0;
            for (int c = 0; c < kk && cmp == 0; ++c)
                cmp = (e[c] < tuple[c]) ? -1 : (e[c] > tuple[c]) ? 1 : 0;
            if (cmp < 0)
                lo = mid + 1;
            else if (cmp > 0)
                hi = mid;
            else
                return edge_alive(mid) ? std::optional<int>(mid) : std::nullopt;
        }
        return std::nullopt;
    }
    std::optional<int> find_edge(const std::vector<int>& tuple) const {
        return find_edge(std::span<const int>(tuple));
    }

    void check_vertex(Vertex v) const {
        if (v.cls < 1 || v.cls > k() || v.idx < 0 || v.idx >= class_size(v.cls))
            throw input_error("invalid vertex " + to_string(v));
    }

    // True iff no two vertices of S share a class and none is deleted.
    bool is_legal(std::span<const Vertex> s) const {
        std::uint64_t mask = 0;
        for (const Vertex& v : s) {
            check_vertex(v);
            std::uint64_t bit = std::uint64_t(1) << (v.cls - 1);
            if (mask & bit) return false;
            mask |= bit;
            if (is_deleted(v)) return false;
        }
        return true;
    }
    bool is_legal(const std::vector<Vertex>& s) const {
        return is_legal(std::span<const Vertex>(s));
    }

    int missing_class(const LegalSet& s) const {
        for (int c = 1; c <= k(); ++c)
            if (!s.occupies(c)) return c;
        throw internal_error("missing_class: set occupies every class");
    }

    // Alive extensions of a legal (k-1)-set into its missing class.
    DynBits completions(const LegalSet& s) const {
        require_legal(s, k() - 1, k() - 1);
        int c = missing_class(s);
        std::vector<std::int32_t> full(k(), 0);
        for (const Vertex& v : s.vertices()) full[v.cls - 1] = std::int32_t(v.idx);

        auto [usable, bits] = store_->completions_raw(c, full);
        DynBits out(class_size(c));
        if (usable) {
            if (bits) {
                out = *bits;
                out.andnot_with(deleted_[c - 1]);
            }
            return out;
        }
        // Rank overflow: scan the incidence list of any member vertex.
        for (int id : edges_at(s.vertices().front())) {
            if (!edge_alive(id)) continue;
            if (matches(id, s)) out.set(edge(id)[c - 1]);
        }
        return out;
    }

    // N_H(S) = { U : S u U in E(H) }, in lexicographic order.
    std::vector<LegalSet> neighborhood(const LegalSet& s) const {
        require_legal(s, 1, k() - 1);
        std::vector<LegalSet> out;
        if (s.size() == k() - 1) {
            int c = missing_class(s);
            completions(s).for_each([&](int i) { out.push_back(LegalSet{Vertex{c, i}}); });
            return out;
        }
        for (int id = 0; id < edge_rows(); ++id) {
            if (!edge_alive(id) || !matches(id, s)) continue;
            auto e = edge(id);
            std::vector<Vertex> rest;
            for (int c = 1; c <= k(); ++c)
                if (!s.occupies(c)) rest.push_back(Vertex{c, e[c - 1]});
            out.push_back(LegalSet(std::move(rest)));
        }
        return out;
    }

    long long degree(const LegalSet& s) const {
        require_legal(s, 1, k() - 1);
        if (s.size() == k() - 1) return completions(s).count();
        long long n = 0;
        for (int id = 0; id < edge_rows(); ++id)
            if (edge_alive(id) && matches(id, s)) ++n;
        return n;
    }

    // Minimum degree over all legal l-sets; l = k-1 is the co-degree.
    long long min_l_degree(int l) const {
        if (l < 1 || l > k() - 1) throw input_error("min_l_degree: l out of range");
        for (int c = 1; c <= k(); ++c)
            if (eff_[c - 1] == 0)
                throw input_error("min_l_degree: class " + std::to_string(c) + " is empty");

        long long best = std::numeric_limits<long long>::max();

        std::vector<std::vector<int>> combos;
        std::vector<int> cls;
        auto choose = [&](auto&& self, int start) -> void {
            if (int(cls.size()) == l) {
                combos.push_back(cls);
                return;
            }
            for (int c = start; c <= k(); ++c) {
                cls.push_back(c);
                self(self, c + 1);
                cls.pop_back();
            }
        };
        choose(choose, 1);

        std::vector<Vertex> cur(l);
        for (const auto& chosen : combos) {
            std::vector<int> it(l, -1);
            int d = 0;
            while (d >= 0) {
                int next = next_alive(chosen[d], it[d]);
                if (next == -1) {
                    it[d] = -1;
                    --d;
                    continue;
                }
                it[d] = next;
                cur[d] = Vertex{chosen[d], next};
                if (d + 1 == l) {
                    long long deg = degree(LegalSet(std::vector<Vertex>(cur.begin(), cur.end())));
                    if (deg < best) {
                        best = deg;
                        if (best == 0) return 0;
                    }
                } else {
                    ++d;
                }
            }
        }
        return best;
    }

    // Per-class bitsets from a vertex list (validates ids).
    std::vector<DynBits> class_bits(std::span<const Vertex> vs) const {
        std::vector<DynBits> out;
        out.reserve(k());
        for (int c = 1; c <= k(); ++c) out.emplace_back(class_size(c));
        for (const Vertex& v : vs) {
            check_vertex(v);
            out[v.cls - 1].set(v.idx);
        }
        return out;
    }

    bool is_independent(const std::vector<DynBits>& w) const {
        for (int id = 0; id < edge_rows(); ++id) {
            if (!edge_alive(id)) continue;
            auto e = edge(id);
            bool inside = true;
            for (int c = 1; c <= k(); ++c)
                if (!w[c - 1].test(e[c - 1])) {
                    inside = false;
                    break;
                }
            if (inside) return false;
        }
        return true;
    }
    bool is_independent(std::span<const Vertex> w) const { return is_independent(class_bits(w)); }
    bool is_independent(const std::vector<Vertex>& w) const {
        return is_independent(std::span<const Vertex>(w));
    }

    // Number of alive edges containing x whose other k-1 vertices lie in W.
    long long link_count(Vertex x, const std::vector<DynBits>& w) const {
        check_vertex(x);
        if (w[x.cls - 1].test(x.idx)) throw input_error("link_count: x is in W");
        long long n = 0;
        for (int id : edges_at(x)) {
            if (!edge_alive(id)) continue;
            auto e = edge(id);
            bool in = true;
            for (int c = 1; c <= k(); ++c) {
                if (c == x.cls) continue;
                if (!w[c - 1].test(e[c - 1])) {
                    in = false;
                    break;
                }
            }
            if (in) ++n;
        }
        return n;
    }
    long long link_count(Vertex x, std::span<const Vertex> w) const {
        return link_count(x, class_bits(w));
    }
    long long link_count(Vertex x, const std::vector<Vertex>& w) const {
        return link_count(x, std::span<const Vertex>(w));
    }

    // Masked view; X joins the deleted set. Edge ids stay stable.
    KPGraph delete_vertices(std::span<const Vertex> xs) const {
        KPGraph g = *this;
        for (const Vertex& v : xs) {
            check_vertex(v);
            g.deleted_[v.cls - 1].set(v.idx);
        }
        for (int c = 1; c <= k(); ++c)
            g.eff_[c - 1] = class_size(c) - g.deleted_[c - 1].count();
        return g;
    }
    KPGraph delete_vertices(const std::vector<Vertex>& xs) const {
        return delete_vertices(std::span<const Vertex>(xs));
    }

    std::vector<int> alive_indices(int cls) const {
        std::vector<int> out;
        out.reserve(eff_[cls - 1]);
        for (int i = 0; i < class_size(cls); ++i)
            if (!deleted_[cls - 1].test(i)) out.push_back(i);
        return out;
    }

    int next_alive(int cls, int after) const {
        for (int i = after + 1; i < class_size(cls); ++i)
            if (!deleted_[cls - 1].test(i)) return i;
        return -1;
    }

private:
    bool matches(int id, const LegalSet& s) const {
        auto e = edge(id);
        for (const Vertex& v : s.vertices())
            if (e[v.cls - 1] != v.idx) return false;
        return true;
    }

    void require_legal(const LegalSet& s, int lo, int hi) const {
        if (s.size() < lo || s.size() > hi)
            throw input_error("operation requires a legal set of size in [" + std::to_string(lo) +
                              "," + std::to_string(hi) + "]");
        for (const Vertex& v : s.vertices()) {
            check_vertex(v);
            if (is_deleted(v))
                throw input_error("legal set touches deleted vertex " + to_string(v));
        }
    }

    std::shared_ptr<const detail::EdgeStore> store_;
    std::vector<DynBits> deleted_;
    std::vector<int> eff_;
};

// A set of pairwise-disjoint edges plus per-class coverage bookkeeping.
class Matching {
public:
    Matching() = default;
    explicit Matching(const KPGraph& g) {
        covered_.reserve(g.k());
        for (int c = 1; c <= g.k(); ++c) covered_.emplace_back(g.class_size(c));
    }

    int size() const { return int(ids_.size()); }
    bool empty() const { return ids_.empty(); }
    const std::vector<int>& edge_ids() const { return ids_; }

    bool contains(int id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

    const DynBits& covered(int cls) const { return covered_[cls - 1]; }
    bool covers(Vertex v) const { return covered_[v.cls - 1].test(v.idx); }

    bool conflicts(const KPGraph& g, int id) const {
        auto e = g.edge(id);
        for (int c = 1; c <= g.k(); ++c)
            if (covered_[c - 1].test(e[c - 1])) return true;
        return false;
    }

    void add(const KPGraph& g, int id) {
        if (id < 0 || id >= g.edge_rows()) throw internal_error("Matching::add: bad edge id");
        if (conflicts(g, id)) throw internal_error("Matching::add: edge conflicts with matching");
        auto e = g.edge(id);
        for (int c = 1; c <= g.k(); ++c) covered_[c - 1].set(e[c - 1]);
        ids_.insert(std::upper_bound(ids_.begin(), ids_.end(), id), id);
    }

    void remove(const KPGraph& g, int id) {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
        if (it == ids_.end() || *it != id)
            throw internal_error("Matching::remove: edge not present");
        ids_.erase(it);
        auto e = g.edge(id);
        for (int c = 1; c <= g.k(); ++c) covered_[c - 1].reset(e[c - 1]);
    }

    void merge(const KPGraph& g, const Matching& o) {
        for (int id : o.ids_) add(g, id);
    }

    int uncovered_count(const KPGraph& g, int cls) const {
        return g.effective_size(cls) - covered_[cls - 1].count_andnot(g.deleted_mask(cls));
    }

    std::vector<int> uncovered_indices(const KPGraph& g, int cls) const {
        std::vector<int> out;
        for (int i = 0; i < g.class_size(cls); ++i)
            if (!g.deleted_mask(cls).test(i) && !covered_[cls - 1].test(i)) out.push_back(i);
        return out;
    }

    std::vector<Vertex> covered_vertices(const KPGraph& g) const {
        std::vector<Vertex> out;
        for (int c = 1; c <= g.k(); ++c)
            covered_[c - 1].for_each([&](int i) { out.push_back(Vertex{c, i}); });
        return out;
    }

    // Disjointness and membership, recomputed from scratch.
    void validate(const KPGraph& g) const {
        std::vector<DynBits> seen;
        for (int c = 1; c <= g.k(); ++c) seen.emplace_back(g.class_size(c));
        for (int id : ids_) {
            if (id < 0 || id >= g.edge_rows()) throw internal_error("matching: bad edge id");
            if (!g.edge_alive(id)) throw internal_error("matching: edge touches deleted vertex");
            auto e = g.edge(id);
            for (int c = 1; c <= g.k(); ++c) {
                if (seen[c - 1].test(e[c - 1])) throw internal_error("matching: edges overlap");
                seen[c - 1].set(e[c - 1]);
            }
        }
        for (int c = 1; c <= g.k(); ++c)
            if (!(seen[c - 1] == covered_[c - 1])) throw internal_error("matching: coverage desync");
    }

private:
    std::vector<int> ids_; // sorted
    std::vector<DynBits> covered_;
};

} // namespace hypermatch
