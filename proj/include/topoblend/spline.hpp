#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "topoblend/geometry.hpp"

namespace topoblend {

/// Nondecreasing knot sequence plus degree. All construction in this project
/// uses the clamped form (first/last knot repeated degree+1 times), so the
/// spline interpolates its end coefficients.
struct KnotVector {
    std::vector<double> knots;
    int degree = 0;

    int basis_count() const { return static_cast<int>(knots.size()) - degree - 1; }
    double domain_lo() const { return knots[degree]; }
    double domain_hi() const { return knots[basis_count()]; }

    /// Support interval [u_i, u_{i+p+1}] of basis i.
    std::pair<double, double> support(int i) const {
        return {knots[i], knots[i + degree + 1]};
    }

    /// Knot span index s with knots[s] <= u < knots[s+1]; the right end of the
    /// domain maps to the last nonempty span.
    int find_span(double u) const;

    /// The degree+1 basis values that are nonzero at u. `first` receives the
    /// index of the first one (= span - degree).
    void nonzero_basis(double u, int& first, std::span<double> out) const;

    void validate() const;

    static KnotVector clamped_uniform(int degree, int basis_count, double lo, double hi);
};

/// N_{i,p}(u). Out-of-range i or u outside the knot domain is a domain error.
double basis_eval(const KnotVector& kv, int i, double u);

/// Set of coefficient multi-indices, stored as a dense mask over the
/// coefficient lattice.
struct IndexSet {
    std::array<int, 3> dims{0, 0, 0};
    std::vector<std::uint8_t> mask;

    IndexSet() = default;
    explicit IndexSet(std::array<int, 3> d)
        : dims(d), mask(static_cast<size_t>(d[0]) * d[1] * d[2], 0) {}

    int flat(int i, int j, int k) const { return (i * dims[1] + j) * dims[2] + k; }
    bool contains(int i, int j, int k) const { return mask[flat(i, j, k)] != 0; }
    void insert(int i, int j, int k) { mask[flat(i, j, k)] = 1; }
    size_t count() const;
};

/// Trivariate tensor-product B-spline. Univariate blending functions are the
/// degenerate case M_v = M_w = 1 with degree 0 in v and w.
struct SplineVolume {
    KnotVector knots_u, knots_v, knots_w;
    std::vector<double> coefficients;  // row-major: ((i * M_v) + j) * M_w + k

    int count_u() const { return knots_u.basis_count(); }
    int count_v() const { return knots_v.basis_count(); }
    int count_w() const { return knots_w.basis_count(); }
    std::array<int, 3> counts() const { return {count_u(), count_v(), count_w()}; }

    int flat(int i, int j, int k) const { return (i * count_v() + j) * count_w() + k; }
    double& coeff(int i, int j, int k) { return coefficients[flat(i, j, k)]; }
    double coeff(int i, int j, int k) const { return coefficients[flat(i, j, k)]; }

    Aabb parametric_box() const {
        return {{knots_u.domain_lo(), knots_v.domain_lo(), knots_w.domain_lo()},
                {knots_u.domain_hi(), knots_v.domain_hi(), knots_w.domain_hi()}};
    }

    void validate() const;

    /// Tensor-product evaluation; parameters outside the box are a domain error.
    double eval(double u, double v, double w) const;
    double eval(const Vec3& p) const { return eval(p.x, p.y, p.z); }

    static SplineVolume constant(const KnotVector& u, const KnotVector& v,
                                 const KnotVector& w, double value);

    /// Degenerate volume wrapping a univariate function of u; v and w are
    /// degree-0 single-coefficient axes over [0,1].
    static SplineVolume univariate(const KnotVector& u, std::vector<double> coeffs);
};

struct CoeffWeight {
    int i = 0, j = 0, k = 0;
    double weight = 0;
};

/// d eval / d C_{ijk} at (u,v,w): the nonzero basis products, at most
/// (p_u+1)(p_v+1)(p_w+1) entries.
std::vector<CoeffWeight> volume_gradient_wrt_coeff(const SplineVolume& s, double u,
                                                   double v, double w);

enum class Axis : int { U = 0, V = 1, W = 2 };

/// Boehm single-knot insertion along one axis; evaluation is unchanged.
SplineVolume knot_insert(const SplineVolume& s, Axis axis, double new_knot);

struct FitPoint {
    Vec3 param;    // (u,v,w) in the parametric box
    double value = 0;
};

struct LspiaOptions {
    int max_iters = 500;
    double tol = 1e-8;  // stop when the squared-residual improvement drops below this
};

struct LspiaResult {
    SplineVolume spline;
    int iterations = 0;
    double initial_residual = 0;  // sum of squared residuals
    double final_residual = 0;
    std::vector<double> residual_trace;    // committed iterates, nonincreasing
    int fully_constrained_points = 0;      // data influenced only by fixed coefficients
};

/// Local-LSPIA: progressive least-squares fitting that never touches
/// coefficients in `fixed`. Residual is nonincreasing across iterations.
LspiaResult local_lspia_fit(std::span<const FitPoint> data, const SplineVolume& s0,
                            const IndexSet& fixed, const LspiaOptions& opts = {});

/// JSON round-trip (shortest-representation floats, exact decimal round-trip).
std::string to_json_string(const SplineVolume& s, int indent = -1);
SplineVolume spline_from_json_string(const std::string& text);

}  // namespace topoblend
