#include "topoblend/region.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "topoblend/kdtree.hpp"

namespace topoblend {

Region region_from_indicator(ScalarField f) { return {std::move(f)}; }

Region region_box(const Aabb& b) {
    return {{[b](const Vec3& p) {
                 double d = b.lo.x - p.x;
                 d = std::max(d, p.x - b.hi.x);
                 d = std::max(d, b.lo.y - p.y);
                 d = std::max(d, p.y - b.hi.y);
                 d = std::max(d, b.lo.z - p.z);
                 d = std::max(d, p.z - b.hi.z);
                 return d;
             },
             b}};
}

Region region_half_space(const Vec3& normal, double offset, const Aabb& box) {
    return {{[normal, offset](const Vec3& p) { return normal.dot(p) - offset; }, box}};
}

Region region_cylinder(const Vec3& center, const Vec3& axis, double radius,
                       const Aabb& box) {
    const double len = axis.norm();
    if (len <= 0) throw std::domain_error("region_cylinder: zero axis");
    const Vec3 a = axis * (1.0 / len);
    return {{[center, a, radius](const Vec3& p) {
                 const Vec3 d = p - center;
                 const Vec3 radial = d - a * d.dot(a);
                 return radial.norm() - radius;
             },
             box}};
}

Region region_sphere(const Vec3& center, double radius) {
    const Vec3 r{radius, radius, radius};
    return {{[center, radius](const Vec3& p) { return (p - center).norm() - radius; },
             {center - r, center + r}}};
}

Region region_union(const Region& a, const Region& b) {
    return {min_field(a.indicator, b.indicator)};
}

Region region_intersection(const Region& a, const Region& b) {
    return {max_field(a.indicator, b.indicator)};
}

Region region_complement(const Region& a) { return {negate_field(a.indicator)}; }

Region region_difference(const Region& a, const Region& b) {
    return {max_field(a.indicator, negate_field(b.indicator))};
}

std::pair<Region, Region> image_region(const GrayImage& img, std::uint8_t threshold,
                                       double z_lo, double z_hi) {
    if (img.empty()) throw std::domain_error("image_region: empty image");
    if (!(z_lo < z_hi)) throw std::domain_error("image_region: empty z-range");

    auto shared = std::make_shared<GrayImage>(img);
    const Aabb box{{0, 0, z_lo}, {1, 1, z_hi}};
    auto make = [&](bool dark) {
        return Region{{[shared, threshold, dark, z_lo, z_hi](const Vec3& p) {
                           const int w = shared->width, h = shared->height;
                           int col = static_cast<int>(std::floor(p.x * w));
                           col = std::clamp(col, 0, w - 1);
                           // row 0 is the top of the image -> y near 1
                           int row = static_cast<int>(std::floor((1.0 - p.y) * h));
                           row = std::clamp(row, 0, h - 1);
                           const bool is_dark = shared->at(col, row) < threshold;
                           double d = (is_dark == dark) ? -1.0 : 1.0;
                           d = std::max(d, z_lo - p.z);
                           d = std::max(d, p.z - z_hi);
                           return d;
                       },
                       box}};
    };
    return {make(true), make(false)};
}

Region dilate_region_boundary(const Region& a, const Region& b, double radius,
                              int grid_resolution) {
    if (radius <= 0) throw std::domain_error("dilate_region_boundary: radius must be > 0");
    const int n = std::max(grid_resolution, 4);
    const Aabb box = a.box().united(b.box());

    // Membership of a on the sample lattice; interface points are midpoints of
    // lattice edges where a-membership and b-membership swap.
    std::vector<std::uint8_t> in_a(size_t(n) * n * n), in_b(size_t(n) * n * n);
    auto at = [n](int i, int j, int k) { return (size_t(k) * n + j) * n + i; };
    auto pt = [&](int i, int j, int k) {
        return box.lerp({i / double(n - 1), j / double(n - 1), k / double(n - 1)});
    };
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const Vec3 p = pt(i, j, k);
                in_a[at(i, j, k)] = a.contains(p);
                in_b[at(i, j, k)] = b.contains(p);
            }

    std::vector<Vec3> interface;
    auto consider = [&](int i0, int j0, int k0, int i1, int j1, int k1) {
        const bool a0 = in_a[at(i0, j0, k0)], b0 = in_b[at(i0, j0, k0)];
        const bool a1 = in_a[at(i1, j1, k1)], b1 = in_b[at(i1, j1, k1)];
        if ((a0 && b1 && !b0 && !a1) || (b0 && a1 && !a0 && !b1))
            interface.push_back((pt(i0, j0, k0) + pt(i1, j1, k1)) * 0.5);
    };
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                if (i + 1 < n) consider(i, j, k, i + 1, j, k);
                if (j + 1 < n) consider(i, j, k, i, j + 1, k);
                if (k + 1 < n) consider(i, j, k, i, j, k + 1);
            }
    if (interface.empty())
        throw std::domain_error(
            "dilate_region_boundary: no a/b interface found inside the bounding box");

    auto tree = std::make_shared<KdTree>(std::move(interface));
    const Vec3 pad{radius, radius, radius};
    const Aabb br_box{box.lo - pad, box.hi + pad};
    return {{[tree, radius](const Vec3& p) { return tree->nearest_distance(p) - radius; },
             br_box}};
}

}  // namespace topoblend
