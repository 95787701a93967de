#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "topoblend/geometry.hpp"

namespace topoblend {

/// Static 3-d tree over a point set; nearest-neighbor queries only.
/// Built once, queries are const and thread-safe.
class KdTree {
public:
    KdTree() = default;

    explicit KdTree(std::vector<Vec3> points) : pts_(std::move(points)) {
        if (pts_.empty()) throw std::domain_error("KdTree: empty point set");
        index_.resize(pts_.size());
        for (size_t i = 0; i < pts_.size(); ++i) index_[i] = static_cast<int>(i);
        build(0, static_cast<int>(pts_.size()), 0);
    }

    bool empty() const { return pts_.empty(); }
    size_t size() const { return pts_.size(); }

    /// Distance from p to the nearest stored point.
    double nearest_distance(const Vec3& p) const {
        double best = std::numeric_limits<double>::infinity();
        nearest(0, static_cast<int>(pts_.size()), 0, p, best);
        return std::sqrt(best);
    }

private:
    void build(int lo, int hi, int axis) {
        if (hi - lo <= 1) return;
        const int mid = (lo + hi) / 2;
        std::nth_element(index_.begin() + lo, index_.begin() + mid, index_.begin() + hi,
                         [&](int a, int b) { return pts_[a][axis] < pts_[b][axis]; });
        build(lo, mid, (axis + 1) % 3);
        build(mid + 1, hi, (axis + 1) % 3);
    }

    void nearest(int lo, int hi, int axis, const Vec3& p, double& best_sq) const {
        if (hi <= lo) return;
        const int mid = (lo + hi) / 2;
        const Vec3& q = pts_[index_[mid]];
        const Vec3 d = q - p;
        best_sq = std::min(best_sq, d.dot(d));
        const double delta = p[axis] - q[axis];
        const int next = (axis + 1) % 3;
        if (delta < 0) {
            nearest(lo, mid, next, p, best_sq);
            if (delta * delta < best_sq) nearest(mid + 1, hi, next, p, best_sq);
        } else {
            nearest(mid + 1, hi, next, p, best_sq);
            if (delta * delta < best_sq) nearest(lo, mid, next, p, best_sq);
        }
    }

    std::vector<Vec3> pts_;
    std::vector<int> index_;
};

}  // namespace topoblend
