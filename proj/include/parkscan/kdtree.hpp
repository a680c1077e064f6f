#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

namespace parkscan {

/// Static 2-d k-d tree over parallel coordinate arrays. Exact k-nearest-
/// neighbor queries; built once, queried concurrently.
class KdTree2 {
public:
    KdTree2(const std::vector<double>& xs, const std::vector<double>& ys)
        : xs_(xs), ys_(ys), order_(xs.size()) {
        for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
        if (!order_.empty()) build(0, order_.size(), 0);
    }

    /// Squared distance from point qi to its k-th nearest neighbor
    /// (qi itself excluded). Requires 1 <= k <= n-1.
    double kth_neighbor_dist2(std::size_t qi, std::size_t k) const {
        std::vector<double> heap;  // max-heap of the k best squared distances
        heap.reserve(k + 1);
        query(0, order_.size(), 0, qi, k, heap);
        return heap.front();
    }

private:
    void build(std::size_t lo, std::size_t hi, int axis) {
        if (hi - lo <= kLeafSize) return;
        const std::size_t mid = (lo + hi) / 2;
        auto cmp = [&](std::size_t a, std::size_t b) {
            const double ca = axis == 0 ? xs_[a] : ys_[a];
            const double cb = axis == 0 ? xs_[b] : ys_[b];
            if (ca != cb) return ca < cb;
            return a < b;  // deterministic ordering under exact ties
        };
        std::nth_element(order_.begin() + lo, order_.begin() + mid,
                         order_.begin() + hi, cmp);
        build(lo, mid, 1 - axis);
        build(mid + 1, hi, 1 - axis);
    }

    void query(std::size_t lo, std::size_t hi, int axis, std::size_t qi,
               std::size_t k, std::vector<double>& heap) const {
        const double qx = xs_[qi];
        const double qy = ys_[qi];
        if (hi - lo <= kLeafSize) {
            for (std::size_t i = lo; i < hi; ++i) offer(order_[i], qi, qx, qy, k, heap);
            return;
        }
        const std::size_t mid = (lo + hi) / 2;
        offer(order_[mid], qi, qx, qy, k, heap);
        const double split = axis == 0 ? xs_[order_[mid]] : ys_[order_[mid]];
        const double qc = axis == 0 ? qx : qy;
        const double delta = qc - split;
        const std::size_t near_lo = delta <= 0.0 ? lo : mid + 1;
        const std::size_t near_hi = delta <= 0.0 ? mid : hi;
        const std::size_t far_lo = delta <= 0.0 ? mid + 1 : lo;
        const std::size_t far_hi = delta <= 0.0 ? hi : mid;
        query(near_lo, near_hi, 1 - axis, qi, k, heap);
        if (heap.size() < k || delta * delta < heap.front())
            query(far_lo, far_hi, 1 - axis, qi, k, heap);
    }

    void offer(std::size_t i, std::size_t qi, double qx, double qy,
               std::size_t k, std::vector<double>& heap) const {
        if (i == qi) return;
        const double dx = xs_[i] - qx;
        const double dy = ys_[i] - qy;
        const double d2 = dx * dx + dy * dy;
        if (heap.size() < k) {
            heap.push_back(d2);
            std::push_heap(heap.begin(), heap.end());
        } else if (d2 < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = d2;
            std::push_heap(heap.begin(), heap.end());
        }
    }

    static constexpr std::size_t kLeafSize = 16;
    const std::vector<double>& xs_;
    const std::vector<double>& ys_;
    std::vector<std::size_t> order_;
};

}  // namespace parkscan
