#include "topoblend/field.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace topoblend {

ScalarField constant_field(double c, const Aabb& box) {
    return {[c](const Vec3&) { return c; }, box};
}

ScalarField clip_to_model(const ScalarField& phi, const ScalarField& phi_m) {
    return max_field(phi, phi_m);
}

ScalarField min_field(const ScalarField& a, const ScalarField& b) {
    return {[fa = a.f, fb = b.f](const Vec3& p) { return std::min(fa(p), fb(p)); },
            a.box.united(b.box)};
}

ScalarField max_field(const ScalarField& a, const ScalarField& b) {
    return {[fa = a.f, fb = b.f](const Vec3& p) { return std::max(fa(p), fb(p)); },
            a.box.united(b.box)};
}

ScalarField sum_field(const ScalarField& a, const ScalarField& b) {
    return {[fa = a.f, fb = b.f](const Vec3& p) { return fa(p) + fb(p); },
            a.box.united(b.box)};
}

ScalarField negate_field(const ScalarField& a) {
    return {[fa = a.f](const Vec3& p) { return -fa(p); }, a.box};
}

ScalarField scale_field(const ScalarField& a, double s) {
    return {[fa = a.f, s](const Vec3& p) { return s * fa(p); }, a.box};
}

ScalarField offset_field(const ScalarField& a, double c) {
    return {[fa = a.f, c](const Vec3& p) { return fa(p) + c; }, a.box};
}

ScalarField remap_field(const ScalarField& a, const AxisMap& m, const Aabb& box) {
    return {[fa = a.f, m](const Vec3& p) { return fa(m(p)); }, box};
}

TpmsKind tpms_kind_from_string(const std::string& name) {
    if (name == "P" || name == "p") return TpmsKind::P;
    if (name == "G" || name == "g") return TpmsKind::G;
    if (name == "D" || name == "d") return TpmsKind::D;
    if (name == "IWP" || name == "iwp" || name == "I-WP") return TpmsKind::IWP;
    throw std::domain_error("unknown TPMS kind: " + name);
}

std::string to_string(TpmsKind k) {
    switch (k) {
        case TpmsKind::P: return "P";
        case TpmsKind::G: return "G";
        case TpmsKind::D: return "D";
        case TpmsKind::IWP: return "IWP";
    }
    return "?";
}

ScalarField tpms(TpmsKind kind, std::array<int, 3> periods) {
    if (periods[0] < 1 || periods[1] < 1 || periods[2] < 1)
        throw std::domain_error("tpms: periods must be >= 1");
    const double fx = 2.0 * std::numbers::pi * periods[0];
    const double fy = 2.0 * std::numbers::pi * periods[1];
    const double fz = 2.0 * std::numbers::pi * periods[2];
    const Aabb unit{{0, 0, 0}, {1, 1, 1}};
    switch (kind) {
        case TpmsKind::P:
            return {[=](const Vec3& p) {
                        return std::cos(fx * p.x) + std::cos(fy * p.y) + std::cos(fz * p.z);
                    },
                    unit};
        case TpmsKind::G:
            return {[=](const Vec3& p) {
                        const double X = fx * p.x, Y = fy * p.y, Z = fz * p.z;
                        return std::sin(X) * std::cos(Y) + std::sin(Y) * std::cos(Z) +
                               std::sin(Z) * std::cos(X);
                    },
                    unit};
        case TpmsKind::D:
            return {[=](const Vec3& p) {
                        const double X = fx * p.x, Y = fy * p.y, Z = fz * p.z;
                        return std::cos(X) * std::cos(Y) * std::cos(Z) -
                               std::sin(X) * std::sin(Y) * std::sin(Z);
                    },
                    unit};
        case TpmsKind::IWP:
            return {[=](const Vec3& p) {
                        const double X = fx * p.x, Y = fy * p.y, Z = fz * p.z;
                        return 2.0 * (std::cos(X) * std::cos(Y) + std::cos(Y) * std::cos(Z) +
                                      std::cos(Z) * std::cos(X)) -
                               (std::cos(2 * X) + std::cos(2 * Y) + std::cos(2 * Z));
                    },
                    unit};
    }
    throw std::domain_error("tpms: unknown kind");
}

SetKind set_kind_from_string(const std::string& name) {
    if (name == "pore") return SetKind::Pore;
    if (name == "rod") return SetKind::Rod;
    if (name == "sheet") return SetKind::Sheet;
    throw std::domain_error("unknown set kind: " + name);
}

std::string to_string(SetKind k) {
    switch (k) {
        case SetKind::Pore: return "pore";
        case SetKind::Rod: return "rod";
        case SetKind::Sheet: return "sheet";
    }
    return "?";
}

void PorousSpec::validate(int samples_per_axis) const {
    if (kind != SetKind::Sheet) return;
    const int n = std::max(2, samples_per_axis);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const Vec3 p = base.box.lerp({i / double(n - 1), j / double(n - 1),
                                              k / double(n - 1)});
                if (c1(p) > c2(p))
                    throw std::domain_error("PorousSpec: sheet requires c1 <= c2 on the box");
            }
}

ScalarField normalize_spec(const PorousSpec& spec) {
    switch (spec.kind) {
        case SetKind::Pore: {
            return {[phi = spec.base.f, c = spec.c.f](const Vec3& p) { return c(p) - phi(p); },
                    spec.base.box};
        }
        case SetKind::Rod: {
            return {[phi = spec.base.f, c = spec.c.f](const Vec3& p) { return phi(p) - c(p); },
                    spec.base.box};
        }
        case SetKind::Sheet: {
            return {[phi = spec.base.f, c1 = spec.c1.f, c2 = spec.c2.f](const Vec3& p) {
                        const double v = phi(p);
                        return std::max(c1(p) - v, v - c2(p));
                    },
                    spec.base.box};
        }
    }
    throw std::domain_error("normalize_spec: unknown set kind");
}

ScalarField blended_field(std::shared_ptr<const SplineVolume> omega,
                          std::function<Vec3(const Vec3&)> to_param,
                          const ScalarField& left, const ScalarField& right) {
    return {[omega = std::move(omega), map = std::move(to_param), lf = left.f,
             rf = right.f](const Vec3& p) {
                const double w = omega->eval(map(p));
                return (1.0 - w) * lf(p) + w * rf(p);
            },
            left.box.united(right.box)};
}

ScalarField blended_field(const SplineVolume& omega, const ScalarField& left,
                          const ScalarField& right) {
    return blended_field(std::make_shared<SplineVolume>(omega),
                         [](const Vec3& p) { return p; }, left, right);
}

}  // namespace topoblend
