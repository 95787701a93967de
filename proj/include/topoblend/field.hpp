#pragma once

#include <functional>
#include <memory>
#include <string>

#include "topoblend/geometry.hpp"
#include "topoblend/spline.hpp"

namespace topoblend {

/// Implicit scalar function of space. Evaluation is pure and thread-safe;
/// fields are cheap to copy (shared evaluator) and closed under the
/// combinators below. `box` is the axis-aligned region of interest.
struct ScalarField {
    std::function<double(const Vec3&)> f;
    Aabb box;

    double operator()(const Vec3& p) const { return f(p); }
    double operator()(double x, double y, double z) const { return f({x, y, z}); }
};

ScalarField constant_field(double c, const Aabb& box = {});

/// tilde-phi = max(phi, phi_M): the structure clipped to the model
/// {phi_M <= 0}.
ScalarField clip_to_model(const ScalarField& phi, const ScalarField& phi_m);

ScalarField min_field(const ScalarField& a, const ScalarField& b);
ScalarField max_field(const ScalarField& a, const ScalarField& b);
ScalarField sum_field(const ScalarField& a, const ScalarField& b);
ScalarField negate_field(const ScalarField& a);
ScalarField scale_field(const ScalarField& a, double s);
ScalarField offset_field(const ScalarField& a, double c);
/// Field evaluated through a point map: result(p) = a(m(p)).
ScalarField remap_field(const ScalarField& a, const AxisMap& m, const Aabb& box);

enum class TpmsKind { P, G, D, IWP };

TpmsKind tpms_kind_from_string(const std::string& name);
std::string to_string(TpmsKind k);

/// Level-set approximant of the chosen surface family with periods.x cells
/// along x over [0,1], etc.
ScalarField tpms(TpmsKind kind, std::array<int, 3> periods);

enum class SetKind { Pore, Rod, Sheet };

SetKind set_kind_from_string(const std::string& name);
std::string to_string(SetKind k);

/// One implicit porous structure: a base field plus the set convention and
/// threshold distribution fields that carve the solid out of it.
struct PorousSpec {
    SetKind kind = SetKind::Rod;
    ScalarField base;
    ScalarField c;        // pore / rod threshold
    ScalarField c1, c2;   // sheet thresholds, c1 <= c2

    /// Sheet specs are checked (by sampling) for c1 <= c2 over the box.
    void validate(int samples_per_axis = 8) const;
};

/// Signed form with the solid exactly {result <= 0}:
///   pore:  c - phi,  rod: phi - c,  sheet: max(c1 - phi, phi - c2).
ScalarField normalize_spec(const PorousSpec& spec);

/// Pointwise (1 - omega) * left + omega * right with omega evaluated directly
/// in the fields' coordinates (the volume's parametric box must cover them).
ScalarField blended_field(const SplineVolume& omega, const ScalarField& left,
                          const ScalarField& right);

/// Same, with an explicit point-to-parameter map for omega.
ScalarField blended_field(std::shared_ptr<const SplineVolume> omega,
                          std::function<Vec3(const Vec3&)> to_param,
                          const ScalarField& left, const ScalarField& right);

}  // namespace topoblend
