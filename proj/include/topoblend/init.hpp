#pragma once

#include <optional>
#include <vector>

#include "topoblend/region.hpp"
#include "topoblend/spline.hpp"

namespace topoblend {

/// Frame in which a one-dimensional blending function varies: a Cartesian
/// axis, distance to a cylinder axis, or distance to a point. `Volume` marks
/// a full trivariate weight (parameters = mapped space coordinates).
struct CoordinateFrame {
    enum class Kind { CartesianAxis, Cylindrical, Spherical, Volume };
    Kind kind = Kind::Volume;
    int axis = 0;        // CartesianAxis: the coordinate; Cylindrical: the cylinder axis
    Vec3 center{0, 0, 0};

    /// Scalar coordinate t of a 1-d frame at p.
    double coord(const Vec3& p) const;

    static CoordinateFrame cartesian(int axis);
    static CoordinateFrame cylindrical(int axis, const Vec3& center);
    static CoordinateFrame spherical(const Vec3& center);
    static CoordinateFrame volume();
};

/// Blending weight omega: a spline volume plus the map from space to its
/// parameters. Parameters are clamped into the parametric box, so the weight
/// extends constantly beyond it.
struct WeightField {
    SplineVolume spline;
    CoordinateFrame frame;
    AxisMap to_param;  // used by Volume frames: space -> parametric box

    Vec3 param(const Vec3& p) const;
    double eval(const Vec3& p) const { return spline.eval(param(p)); }
    ScalarField as_field(const Aabb& box) const;
};

struct InitPlan {
    enum class Mode { OneDimensional, ThreeDimensional };
    Mode mode = Mode::OneDimensional;
    CoordinateFrame frame = CoordinateFrame::cartesian(0);  // 1-d only
    std::array<int, 3> coefficients{50, 1, 1};
    std::array<int, 3> degrees{3, 0, 0};
    int fit_grid = 64;     // cell resolution for the distance-data generation
    int index_grid = 128;  // sampling resolution for support classification
    LspiaOptions fit;      // solver budget for the constrained fit

    void validate() const;
};

struct InitResult {
    WeightField weight;
    IndexSet fixed;
    int fit_iterations = 0;
    double fit_residual = 0;
};

/// One-dimensional ramp initialization: coefficients influencing the first
/// region are pinned to 0, those influencing the second to 1, and the
/// in-between coefficients ramp linearly with their index.
InitResult init_1d(const CoordinateFrame& frame, const Region& er1, const Region& er2,
                   const Region& br, const InitPlan& plan, const Aabb& domain);

struct FitData {
    std::vector<FitPoint> points;  // boundary points first (values 0/1), then interior
    std::vector<Vec3> boundary0, boundary1;
    size_t inner_count = 0;
};

/// Classify cell centers of a uniform grid over `domain`: 0/1-boundary cells
/// (touching the BR boundary from inside one of the regions) and BR-interior
/// cells, whose value is the normalized distance d0 / (d0 + d1) to the two
/// boundary point sets.
FitData generate_fit_data(const Region& er1, const Region& er2, const Region& br,
                          const Aabb& domain, int resolution);

/// Indices whose basis is nonzero somewhere outside BR, determined on a
/// sampling grid over `domain` (membership eroded by one sample so the free
/// supports lie strictly inside BR).
IndexSet fixed_index_set(const WeightField& w, const Region& br, const Aabb& domain,
                         int resolution = 128);

/// Three-dimensional initialization: pin coefficients seeing either region
/// (refining knots while a support sees both), then Local-LSPIA fit of the
/// distance data with the pinned set held fixed.
InitResult init_3d(const Region& er1, const Region& er2, const Region& br,
                   const InitPlan& plan, const Aabb& domain);

}  // namespace topoblend
