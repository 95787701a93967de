#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace topoblend {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }

    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }

    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Axis-aligned bounding box.
struct Aabb {
    Vec3 lo{0, 0, 0};
    Vec3 hi{1, 1, 1};

    Vec3 extent() const { return hi - lo; }
    Vec3 center() const { return (lo + hi) * 0.5; }

    bool contains(const Vec3& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
               p.z >= lo.z && p.z <= hi.z;
    }

    bool degenerate(double eps = 0.0) const {
        const Vec3 e = extent();
        return e.x <= eps || e.y <= eps || e.z <= eps;
    }

    Aabb united(const Aabb& o) const {
        return {{std::min(lo.x, o.lo.x), std::min(lo.y, o.lo.y), std::min(lo.z, o.lo.z)},
                {std::max(hi.x, o.hi.x), std::max(hi.y, o.hi.y), std::max(hi.z, o.hi.z)}};
    }

    /// Point at normalized coordinates t in [0,1]^3.
    Vec3 lerp(const Vec3& t) const {
        return {lo.x + t.x * (hi.x - lo.x), lo.y + t.y * (hi.y - lo.y),
                lo.z + t.z * (hi.z - lo.z)};
    }
};

/// Axis-aligned affine map p -> p * scale + offset (componentwise).
struct AxisMap {
    Vec3 scale{1, 1, 1};
    Vec3 offset{0, 0, 0};

    Vec3 operator()(const Vec3& p) const {
        return {p.x * scale.x + offset.x, p.y * scale.y + offset.y, p.z * scale.z + offset.z};
    }

    AxisMap inverse() const {
        if (scale.x == 0 || scale.y == 0 || scale.z == 0)
            throw std::domain_error("AxisMap: singular scale has no inverse");
        const Vec3 s{1.0 / scale.x, 1.0 / scale.y, 1.0 / scale.z};
        return {s, {-offset.x * s.x, -offset.y * s.y, -offset.z * s.z}};
    }

    static AxisMap identity() { return {}; }

    /// Map taking `from` onto `to` componentwise.
    static AxisMap box_to_box(const Aabb& from, const Aabb& to) {
        if (from.degenerate())
            throw std::domain_error("AxisMap: degenerate source box");
        Vec3 s{to.extent().x / from.extent().x, to.extent().y / from.extent().y,
               to.extent().z / from.extent().z};
        Vec3 o = to.lo - Vec3{from.lo.x * s.x, from.lo.y * s.y, from.lo.z * s.z};
        return {s, o};
    }
};

}  // namespace topoblend
