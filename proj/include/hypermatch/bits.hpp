#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace hypermatch {

// Fixed-width dynamic bitset. Width is set at construction; all binary
// operations require equal widths. Unused tail bits stay zero.
class DynBits {
public:
    DynBits() = default;
    explicit DynBits(int n) : n_(n), w_((n + 63) / 64, 0) {}

    int width() const { return n_; }

    void set(int i) { w_[i >> 6] |= word(1) << (i & 63); }
    void reset(int i) { w_[i >> 6] &= ~(word(1) << (i & 63)); }
    bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

    void clear() { std::fill(w_.begin(), w_.end(), word(0)); }

    void set_all() {
        for (int i = 0; i < n_; ++i) set(i);
    }

    int count() const {
        int c = 0;
        for (word w : w_) c += std::popcount(w);
        return c;
    }

    // |this \ other|
    int count_andnot(const DynBits& o) const {
        int c = 0;
        for (size_t i = 0; i < w_.size(); ++i) c += std::popcount(w_[i] & ~o.w_[i]);
        return c;
    }

    bool any() const {
        for (word w : w_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    bool intersects(const DynBits& o) const {
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }

    bool is_subset_of(const DynBits& o) const {
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }

    void or_with(const DynBits& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    }
    void and_with(const DynBits& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    }
    void andnot_with(const DynBits& o) {
        for (size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
    }

    int find_first() const { return find_next(-1); }

    // Smallest set bit strictly greater than `after`, or -1.
    int find_next(int after) const {
        int start = after + 1;
        if (start >= n_) return -1;
        size_t wi = size_t(start) >> 6;
        word w = w_[wi] & (~word(0) << (start & 63));
        while (true) {
            if (w) return int(wi * 64 + std::countr_zero(w));
            if (++wi >= w_.size()) return -1;
            w = w_[wi];
        }
    }

    template <class F>
    void for_each(F&& f) const {
        for (int i = find_first(); i != -1; i = find_next(i)) f(i);
    }

    std::vector<int> to_indices() const {
        std::vector<int> out;
        for_each([&](int i) { out.push_back(i); });
        return out;
    }

    friend bool operator==(const DynBits&, const DynBits&) = default;

private:
    using word = std::uint64_t;
    int n_ = 0;
    std::vector<word> w_;
};

} // namespace hypermatch
