#include "topoblend/init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "topoblend/kdtree.hpp"

namespace topoblend {

double CoordinateFrame::coord(const Vec3& p) const {
    switch (kind) {
        case Kind::CartesianAxis:
            return p[axis];
        case Kind::Cylindrical: {
            const int a = (axis + 1) % 3, b = (axis + 2) % 3;
            const double da = p[a] - center[a], db = p[b] - center[b];
            return std::sqrt(da * da + db * db);
        }
        case Kind::Spherical:
            return (p - center).norm();
        case Kind::Volume:
            throw std::domain_error("CoordinateFrame: volume frame has no scalar coordinate");
    }
    return 0;
}

CoordinateFrame CoordinateFrame::cartesian(int axis) {
    if (axis < 0 || axis > 2) throw std::domain_error("CoordinateFrame: bad axis");
    return {Kind::CartesianAxis, axis, {}};
}
CoordinateFrame CoordinateFrame::cylindrical(int axis, const Vec3& center) {
    if (axis < 0 || axis > 2) throw std::domain_error("CoordinateFrame: bad axis");
    if (!std::isfinite(center.x) || !std::isfinite(center.y) || !std::isfinite(center.z))
        throw std::domain_error("CoordinateFrame: non-finite center");
    return {Kind::Cylindrical, axis, center};
}
CoordinateFrame CoordinateFrame::spherical(const Vec3& center) {
    if (!std::isfinite(center.x) || !std::isfinite(center.y) || !std::isfinite(center.z))
        throw std::domain_error("CoordinateFrame: non-finite center");
    return {Kind::Spherical, 0, center};
}
CoordinateFrame CoordinateFrame::volume() { return {Kind::Volume, 0, {}}; }

Vec3 WeightField::param(const Vec3& p) const {
    Vec3 q;
    if (frame.kind == CoordinateFrame::Kind::Volume) {
        q = to_param(p);
    } else {
        q = {frame.coord(p), 0.0, 0.0};
    }
    const Aabb box = spline.parametric_box();
    return {std::clamp(q.x, box.lo.x, box.hi.x), std::clamp(q.y, box.lo.y, box.hi.y),
            std::clamp(q.z, box.lo.z, box.hi.z)};
}

ScalarField WeightField::as_field(const Aabb& box) const {
    auto self = std::make_shared<WeightField>(*this);
    return {[self](const Vec3& p) { return self->eval(p); }, box};
}

void InitPlan::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (degrees[a] < 0) throw std::domain_error("InitPlan: negative degree");
        if (coefficients[a] < degrees[a] + 1)
            throw std::domain_error("InitPlan: coefficient count must be >= degree+1");
    }
    if (fit_grid < 2) throw std::domain_error("InitPlan: fit_grid too small");
    if (index_grid < 4) throw std::domain_error("InitPlan: index_grid too small");
}

namespace {

struct Interval {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    bool empty() const { return lo > hi; }
    void absorb(double t) {
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
};

}  // namespace

InitResult init_1d(const CoordinateFrame& frame, const Region& er1, const Region& er2,
                   const Region& br, const InitPlan& plan, const Aabb& domain) {
    plan.validate();
    if (frame.kind == CoordinateFrame::Kind::Volume)
        throw std::domain_error("init_1d: needs a one-dimensional frame");

    // Project the three sets onto the frame coordinate.
    const int n = std::max(24, std::min(plan.index_grid, 96));
    Interval range, i_er1, i_br, i_er2;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const Vec3 p = domain.lerp(
                    {i / double(n - 1), j / double(n - 1), k / double(n - 1)});
                const double t = frame.coord(p);
                range.absorb(t);
                if (br.contains(p)) i_br.absorb(t);
                else if (er1.contains(p)) i_er1.absorb(t);
                else if (er2.contains(p)) i_er2.absorb(t);
            }
    if (i_er1.empty() || i_er2.empty() || i_br.empty())
        throw std::domain_error("init_1d: a region projects to an empty interval");

    const double slack = 2.0 * (range.hi - range.lo) / n;
    if (!(i_er1.hi < i_er2.lo))
        throw std::domain_error("init_1d: region intervals out of order (ER1 must precede ER2)");
    if (i_br.lo > i_er1.hi + slack || i_br.hi < i_er2.lo - slack)
        throw std::domain_error("init_1d: blending interval does not bridge the regions");
    if (i_br.lo < i_er1.lo - slack || i_br.hi > i_er2.hi + slack)
        throw std::domain_error("init_1d: blending interval overlaps a preserved region");

    const int count = plan.coefficients[0];
    const int degree = plan.degrees[0];
    const KnotVector kv = KnotVector::clamped_uniform(degree, count, range.lo, range.hi);

    const double pad = (range.hi - range.lo) / n;
    std::vector<double> coeffs(count, -1.0);
    IndexSet fixed({count, 1, 1});
    int first_ramp = count, last_ramp = -1;
    for (int i = 0; i < count; ++i) {
        const auto [lo, hi] = kv.support(i);
        const bool sees_er1 = lo <= i_er1.hi + pad;
        const bool sees_er2 = hi >= i_er2.lo - pad;
        if (sees_er1 && sees_er2)
            throw std::domain_error(
                "init_1d: a basis support spans both regions; increase coefficient count");
        if (sees_er1) {
            coeffs[i] = 0.0;
            fixed.insert(i, 0, 0);
        } else if (sees_er2) {
            coeffs[i] = 1.0;
            fixed.insert(i, 0, 0);
        } else {
            first_ramp = std::min(first_ramp, i);
            last_ramp = std::max(last_ramp, i);
        }
    }
    // Linear ramp over the in-between coefficients, 0 to 1 left to right.
    for (int i = first_ramp; i <= last_ramp; ++i)
        coeffs[i] = double(i - first_ramp + 1) / double(last_ramp - first_ramp + 2);

    InitResult res;
    res.weight.spline = SplineVolume::univariate(kv, std::move(coeffs));
    res.weight.frame = frame;
    res.fixed = std::move(fixed);
    return res;
}

FitData generate_fit_data(const Region& er1, const Region& er2, const Region& br,
                          const Aabb& domain, int resolution) {
    if (resolution < 2) throw std::domain_error("generate_fit_data: resolution too small");
    const int n = resolution;  // cells per axis; corner lattice is (n+1)^3

    const long nc = long(n) + 1;
    std::vector<std::uint8_t> c_br(nc * nc * nc), c_e1(nc * nc * nc), c_e2(nc * nc * nc);
    auto cid = [nc](int i, int j, int k) { return (long(k) * nc + j) * nc + i; };
    for (int k = 0; k <= n; ++k)
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                const Vec3 p =
                    domain.lerp({i / double(n), j / double(n), k / double(n)});
                const long id = cid(i, j, k);
                c_br[id] = br.contains(p);
                c_e1[id] = er1.contains(p);
                c_e2[id] = er2.contains(p);
            }

    FitData out;
    std::vector<Vec3> inner_pts;
    std::vector<std::pair<Vec3, int>> boundary;  // (center, which)
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const Vec3 center = domain.lerp(
                    {(i + 0.5) / n, (j + 0.5) / n, (k + 0.5) / n});
                int in_br = br.contains(center);
                int any_e1 = er1.contains(center), any_e2 = er2.contains(center);
                int n_samples = 1 + 8;
                for (int c = 0; c < 8; ++c) {
                    const long id = cid(i + (c & 1), j + ((c >> 1) & 1), k + (c >> 2));
                    in_br += c_br[id];
                    any_e1 += c_e1[id];
                    any_e2 += c_e2[id];
                }
                const bool touches_boundary = in_br > 0 && in_br < n_samples;
                if (touches_boundary && any_e1 > 0) {
                    boundary.emplace_back(center, 0);
                } else if (touches_boundary && any_e2 > 0) {
                    boundary.emplace_back(center, 1);
                } else if (in_br == n_samples) {
                    inner_pts.push_back(center);
                }
            }

    for (const auto& [p, which] : boundary)
        (which == 0 ? out.boundary0 : out.boundary1).push_back(p);
    if (out.boundary0.empty() || out.boundary1.empty())
        throw std::domain_error(
            "generate_fit_data: the blending region does not touch both structures");

    auto dedup = [](std::vector<Vec3>& pts) {
        std::sort(pts.begin(), pts.end(), [](const Vec3& a, const Vec3& b) {
            return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
        });
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    };
    dedup(out.boundary0);
    dedup(out.boundary1);

    out.points.reserve(out.boundary0.size() + out.boundary1.size() + inner_pts.size());
    for (const Vec3& p : out.boundary0) out.points.push_back({p, 0.0});
    for (const Vec3& p : out.boundary1) out.points.push_back({p, 1.0});

    const KdTree t0(out.boundary0), t1(out.boundary1);
    for (const Vec3& p : inner_pts) {
        const double d0 = t0.nearest_distance(p), d1 = t1.nearest_distance(p);
        const double v = (d0 + d1) > 0 ? d0 / (d0 + d1) : 0.5;
        out.points.push_back({p, v});
    }
    out.inner_count = inner_pts.size();
    return out;
}

namespace {

// Membership of BR on a sample lattice, eroded by one sample so that a basis
// judged inside is inside with margin.
struct BrMask {
    std::array<int, 3> n;
    std::vector<std::uint8_t> raw, eroded;

    long id(int i, int j, int k) const { return (long(k) * n[1] + j) * n[0] + i; }
};

BrMask sample_br(const Region& br, const Aabb& domain, std::array<int, 3> n) {
    BrMask m;
    m.n = n;
    m.raw.resize(long(n[0]) * n[1] * n[2]);
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                const Vec3 p = domain.lerp({i / double(n[0] - 1), j / double(n[1] - 1),
                                            k / double(n[2] - 1)});
                m.raw[m.id(i, j, k)] = br.contains(p);
            }
    m.eroded = m.raw;
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                if (!m.raw[m.id(i, j, k)]) continue;
                bool keep = true;
                for (int dk = -1; dk <= 1 && keep; ++dk)
                    for (int dj = -1; dj <= 1 && keep; ++dj)
                        for (int di = -1; di <= 1 && keep; ++di) {
                            const int ii = i + di, jj = j + dj, kk = k + dk;
                            if (ii < 0 || jj < 0 || kk < 0 || ii >= n[0] || jj >= n[1] ||
                                kk >= n[2])
                                continue;  // outside the domain is not outside BR
                            if (!m.raw[m.id(ii, jj, kk)]) keep = false;
                        }
                m.eroded[m.id(i, j, k)] = keep;
            }
    return m;
}

// Mark every basis whose window covers the parameter of sample p.
template <typename Fn>
void mark_window(const SplineVolume& s, const Vec3& q, Fn&& mark) {
    const int su = s.knots_u.find_span(q.x) - s.knots_u.degree;
    const int sv = s.knots_v.find_span(q.y) - s.knots_v.degree;
    const int sw = s.knots_w.find_span(q.z) - s.knots_w.degree;
    for (int a = 0; a <= s.knots_u.degree; ++a)
        for (int b = 0; b <= s.knots_v.degree; ++b)
            for (int c = 0; c <= s.knots_w.degree; ++c) mark(su + a, sv + b, sw + c);
}

}  // namespace

IndexSet fixed_index_set(const WeightField& w, const Region& br, const Aabb& domain,
                         int resolution) {
    const std::array<int, 3> n{resolution, resolution, resolution};
    const BrMask m = sample_br(br, domain, n);
    IndexSet fixed(w.spline.counts());
    for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                if (m.eroded[m.id(i, j, k)]) continue;
                const Vec3 p = domain.lerp({i / double(n[0] - 1), j / double(n[1] - 1),
                                            k / double(n[2] - 1)});
                mark_window(w.spline, w.param(p),
                            [&](int a, int b, int c) { fixed.insert(a, b, c); });
            }
    return fixed;
}

InitResult init_3d(const Region& er1, const Region& er2, const Region& br,
                   const InitPlan& plan, const Aabb& domain) {
    plan.validate();

    const Aabb unit{{0, 0, 0}, {1, 1, 1}};
    const AxisMap to_param = AxisMap::box_to_box(domain, unit);

    SplineVolume s;
    for (int a = 0; a < 3; ++a) {
        KnotVector kv = KnotVector::clamped_uniform(plan.degrees[a], plan.coefficients[a],
                                                    0.0, 1.0);
        (a == 0 ? s.knots_u : a == 1 ? s.knots_v : s.knots_w) = kv;
    }
    s.coefficients.assign(size_t(s.count_u()) * s.count_v() * s.count_w(), 0.5);

    const std::array<int, 3> n{plan.index_grid, plan.index_grid, plan.index_grid};
    const BrMask mask = sample_br(br, domain, n);

    // Classify coefficient supports from the sample lattice: a basis seeing
    // points of ER1 outside the blending region is pinned to 0, one seeing
    // ER2 is pinned to 1; one seeing both forces knot refinement.
    std::vector<std::uint8_t> pin0, pin1, fixed_mask;
    for (int round = 0;; ++round) {
        const size_t ncoef = s.coefficients.size();
        pin0.assign(ncoef, 0);
        pin1.assign(ncoef, 0);
        fixed_mask.assign(ncoef, 0);
        for (int k = 0; k < n[2]; ++k)
            for (int j = 0; j < n[1]; ++j)
                for (int i = 0; i < n[0]; ++i) {
                    if (mask.eroded[mask.id(i, j, k)]) continue;
                    const Vec3 p =
                        domain.lerp({i / double(n[0] - 1), j / double(n[1] - 1),
                                     k / double(n[2] - 1)});
                    const bool e1 = er1.contains(p);
                    const bool e2 = !e1 && er2.contains(p);
                    Vec3 q = to_param(p);
                    q = {std::clamp(q.x, 0.0, 1.0), std::clamp(q.y, 0.0, 1.0),
                         std::clamp(q.z, 0.0, 1.0)};
                    mark_window(s, q, [&](int a, int b, int c) {
                        const int idx = s.flat(a, b, c);
                        fixed_mask[idx] = 1;
                        if (e1) pin0[idx] = 1;
                        if (e2) pin1[idx] = 1;
                    });
                }

        std::vector<std::pair<Axis, double>> inserts;
        for (int a = 0; a < s.count_u(); ++a)
            for (int b = 0; b < s.count_v(); ++b)
                for (int c = 0; c < s.count_w(); ++c) {
                    const int idx = s.flat(a, b, c);
                    if (!(pin0[idx] && pin1[idx])) continue;
                    const auto su = s.knots_u.support(a);
                    const auto sv = s.knots_v.support(b);
                    const auto sw = s.knots_w.support(c);
                    const double eu = su.second - su.first, ev = sv.second - sv.first,
                                 ew = sw.second - sw.first;
                    Axis ax = Axis::U;
                    double mid = 0.5 * (su.first + su.second);
                    if (ev > eu && ev >= ew) { ax = Axis::V; mid = 0.5 * (sv.first + sv.second); }
                    else if (ew > eu && ew > ev) { ax = Axis::W; mid = 0.5 * (sw.first + sw.second); }
                    inserts.emplace_back(ax, mid);
                }
        if (inserts.empty()) break;
        if (round >= 16)
            throw std::domain_error(
                "init_3d: knot refinement did not separate the regions; the blending "
                "region may be thinner than the sampling resolution");
        std::sort(inserts.begin(), inserts.end());
        inserts.erase(std::unique(inserts.begin(), inserts.end(),
                                  [](const auto& x, const auto& y) {
                                      return x.first == y.first &&
                                             std::abs(x.second - y.second) < 1e-9;
                                  }),
                      inserts.end());
        for (const auto& [ax, t] : inserts) s = knot_insert(s, ax, t);
    }

    for (size_t i = 0; i < s.coefficients.size(); ++i) {
        if (pin0[i]) s.coefficients[i] = 0.0;
        else if (pin1[i]) s.coefficients[i] = 1.0;
    }
    IndexSet fixed(s.counts());
    fixed.mask = fixed_mask;

    FitData data = generate_fit_data(er1, er2, br, domain, plan.fit_grid);
    for (auto& d : data.points) {
        Vec3 q = to_param(d.param);
        d.param = {std::clamp(q.x, 0.0, 1.0), std::clamp(q.y, 0.0, 1.0),
                   std::clamp(q.z, 0.0, 1.0)};
    }
    LspiaResult fit = local_lspia_fit(data.points, s, fixed, plan.fit);

    InitResult res;
    res.weight.spline = std::move(fit.spline);
    res.weight.frame = CoordinateFrame::volume();
    res.weight.to_param = to_param;
    res.fixed = std::move(fixed);
    res.fit_iterations = fit.iterations;
    res.fit_residual = fit.final_residual;
    return res;
}

}  // namespace topoblend
