#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace capplan::detail {

// Per-minute count of busy units for one vehicle type. Segment tree where
// each node keeps a pending add and the max of its subtree including that
// add, so range updates never need to push down.
class BusyProfile {
public:
    void reset(std::int64_t length) {
        leaves_ = 1;
        while (leaves_ < length) leaves_ <<= 1;
        add_.assign(static_cast<std::size_t>(2 * leaves_), 0);
        max_.assign(static_cast<std::size_t>(2 * leaves_), 0);
    }

    std::int64_t length() const { return leaves_; }

    // max over [lo, hi)
    std::int64_t max_over(std::int64_t lo, std::int64_t hi) const {
        if (lo >= hi) return 0;
        return query(1, 0, leaves_, lo, hi);
    }

    void add(std::int64_t lo, std::int64_t hi, std::int64_t value) {
        if (lo < hi) update(1, 0, leaves_, lo, hi, value);
    }

    // Rightmost minute in [lo, hi) whose busy count is >= threshold, or -1.
    std::int64_t last_at_least(std::int64_t lo, std::int64_t hi, std::int64_t threshold) const {
        if (lo >= hi) return -1;
        return find_last(1, 0, leaves_, lo, hi, threshold, 0);
    }

private:
    std::int64_t query(std::size_t node, std::int64_t nlo, std::int64_t nhi, std::int64_t lo,
                       std::int64_t hi) const {
        if (lo <= nlo && nhi <= hi) return max_[node];
        const std::int64_t mid = (nlo + nhi) / 2;
        std::int64_t best = INT64_MIN;
        if (lo < mid) best = std::max(best, query(2 * node, nlo, mid, lo, hi));
        if (hi > mid) best = std::max(best, query(2 * node + 1, mid, nhi, lo, hi));
        return best + add_[node];
    }

    void update(std::size_t node, std::int64_t nlo, std::int64_t nhi, std::int64_t lo,
                std::int64_t hi, std::int64_t value) {
        if (lo <= nlo && nhi <= hi) {
            add_[node] += value;
            max_[node] += value;
            return;
        }
        const std::int64_t mid = (nlo + nhi) / 2;
        if (lo < mid) update(2 * node, nlo, mid, lo, hi, value);
        if (hi > mid) update(2 * node + 1, mid, nhi, lo, hi, value);
        max_[node] = add_[node] + std::max(max_[2 * node], max_[2 * node + 1]);
    }

    std::int64_t find_last(std::size_t node, std::int64_t nlo, std::int64_t nhi, std::int64_t lo,
                           std::int64_t hi, std::int64_t threshold, std::int64_t above) const {
        if (nhi <= lo || hi <= nlo) return -1;
        if (max_[node] + above < threshold) return -1;
        if (nhi - nlo == 1) return nlo;
        const std::int64_t mid = (nlo + nhi) / 2;
        const std::int64_t carried = above + add_[node];
        const std::int64_t right = find_last(2 * node + 1, mid, nhi, lo, hi, threshold, carried);
        if (right >= 0) return right;
        return find_last(2 * node, nlo, mid, lo, hi, threshold, carried);
    }

    std::int64_t leaves_ = 1;
    std::vector<std::int64_t> add_;
    std::vector<std::int64_t> max_;
};

}  // namespace capplan::detail
