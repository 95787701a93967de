#pragma once

#include <utility>

#include "topoblend/field.hpp"
#include "topoblend/image.hpp"

namespace topoblend {

/// Implicit region: membership is indicator(p) <= 0.
struct Region {
    ScalarField indicator;

    bool contains(const Vec3& p) const { return indicator(p) <= 0.0; }
    const Aabb& box() const { return indicator.box; }
};

Region region_from_indicator(ScalarField f);
Region region_box(const Aabb& b);
/// {p : normal . p - offset <= 0}
Region region_half_space(const Vec3& normal, double offset, const Aabb& box);
/// Infinite cylinder of given radius around the line through `center` along
/// `axis`, restricted to `box`.
Region region_cylinder(const Vec3& center, const Vec3& axis, double radius,
                       const Aabb& box);
Region region_sphere(const Vec3& center, double radius);
Region region_union(const Region& a, const Region& b);
Region region_intersection(const Region& a, const Region& b);
Region region_complement(const Region& a);
Region region_difference(const Region& a, const Region& b);

/// Split space by a thresholded image extruded over a z-range: pixels with
/// value < threshold form the dark region, the rest the light region. The
/// image covers the unit square (pixel centers; row 0 maps to y near 1) and
/// membership is nearest-pixel.
std::pair<Region, Region> image_region(const GrayImage& img, std::uint8_t threshold,
                                       double z_lo, double z_hi);

/// Blending region between two adjacent regions: all points within `radius`
/// of the a/b interface. The interface is located on a sampling grid and
/// distances use a nearest-neighbor structure over the sampled interface.
Region dilate_region_boundary(const Region& a, const Region& b, double radius,
                              int grid_resolution = 64);

}  // namespace topoblend
