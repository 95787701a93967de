#include "topoblend/spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace topoblend {

void KnotVector::validate() const {
    if (degree < 0) throw std::domain_error("KnotVector: negative degree");
    if (basis_count() < 1)
        throw std::domain_error("KnotVector: too few knots for degree");
    for (size_t i = 1; i < knots.size(); ++i)
        if (knots[i] < knots[i - 1])
            throw std::domain_error("KnotVector: knots must be nondecreasing");
    if (domain_lo() >= domain_hi())
        throw std::domain_error("KnotVector: empty parametric domain");
}

KnotVector KnotVector::clamped_uniform(int degree, int basis_count, double lo, double hi) {
    if (degree < 0 || basis_count < degree + 1)
        throw std::domain_error("KnotVector: need at least degree+1 basis functions");
    if (!(lo < hi)) throw std::domain_error("KnotVector: empty interval");
    KnotVector kv;
    kv.degree = degree;
    const int spans = basis_count - degree;  // interior spans
    kv.knots.reserve(basis_count + degree + 1);
    for (int i = 0; i <= degree; ++i) kv.knots.push_back(lo);
    for (int i = 1; i < spans; ++i)
        kv.knots.push_back(lo + (hi - lo) * (static_cast<double>(i) / spans));
    for (int i = 0; i <= degree; ++i) kv.knots.push_back(hi);
    return kv;
}

int KnotVector::find_span(double u) const {
    const int m = basis_count();
    if (u >= knots[m]) return m - 1;
    if (u <= knots[degree]) return degree;
    auto it = std::upper_bound(knots.begin() + degree, knots.begin() + m, u);
    return static_cast<int>(it - knots.begin()) - 1;
}

void KnotVector::nonzero_basis(double u, int& first, std::span<double> out) const {
    const int p = degree;
    const int span = find_span(u);
    first = span - p;
    // Triangular scheme over the p+1 nonzero functions (The NURBS Book, A2.2).
    out[0] = 1.0;
    std::vector<double> left(p + 1), right(p + 1);
    for (int j = 1; j <= p; ++j) {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = out[r] / (right[r + 1] + left[j - r]);
            out[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        out[j] = saved;
    }
}

double basis_eval(const KnotVector& kv, int i, double u) {
    if (i < 0 || i >= kv.basis_count())
        throw std::domain_error("basis_eval: basis index out of range");
    if (u < kv.knots.front() || u > kv.knots.back())
        throw std::domain_error("basis_eval: parameter outside knot range");
    if (u < kv.domain_lo() || u > kv.domain_hi()) return 0.0;
    int first = 0;
    std::vector<double> vals(kv.degree + 1);
    kv.nonzero_basis(u, first, vals);
    if (i < first || i > first + kv.degree) return 0.0;
    return vals[i - first];
}

size_t IndexSet::count() const {
    size_t n = 0;
    for (auto b : mask) n += b;
    return n;
}

void SplineVolume::validate() const {
    knots_u.validate();
    knots_v.validate();
    knots_w.validate();
    const size_t expect =
        static_cast<size_t>(count_u()) * count_v() * count_w();
    if (coefficients.size() != expect)
        throw std::domain_error("SplineVolume: coefficient count does not match knots");
}

SplineVolume SplineVolume::constant(const KnotVector& u, const KnotVector& v,
                                    const KnotVector& w, double value) {
    SplineVolume s;
    s.knots_u = u;
    s.knots_v = v;
    s.knots_w = w;
    s.coefficients.assign(static_cast<size_t>(s.count_u()) * s.count_v() * s.count_w(),
                          value);
    return s;
}

SplineVolume SplineVolume::univariate(const KnotVector& u, std::vector<double> coeffs) {
    SplineVolume s;
    s.knots_u = u;
    s.knots_v = KnotVector{{0.0, 1.0}, 0};
    s.knots_w = KnotVector{{0.0, 1.0}, 0};
    s.coefficients = std::move(coeffs);
    s.validate();
    return s;
}

namespace {

struct AxisBasis {
    int first = 0;
    double vals[16];  // degree <= 15 is far beyond anything used here
};

inline void axis_basis(const KnotVector& kv, double t, AxisBasis& b) {
    kv.nonzero_basis(t, b.first, std::span<double>(b.vals, kv.degree + 1));
}

inline void check_param(const SplineVolume& s, double u, double v, double w) {
    if (u < s.knots_u.domain_lo() || u > s.knots_u.domain_hi() ||
        v < s.knots_v.domain_lo() || v > s.knots_v.domain_hi() ||
        w < s.knots_w.domain_lo() || w > s.knots_w.domain_hi())
        throw std::domain_error("SplineVolume: parameter outside parametric box");
}

}  // namespace

double SplineVolume::eval(double u, double v, double w) const {
    check_param(*this, u, v, w);
    AxisBasis bu, bv, bw;
    axis_basis(knots_u, u, bu);
    axis_basis(knots_v, v, bv);
    axis_basis(knots_w, w, bw);
    const int pu = knots_u.degree, pv = knots_v.degree, pw = knots_w.degree;
    double acc = 0.0;
    for (int a = 0; a <= pu; ++a) {
        double acc_v = 0.0;
        for (int b = 0; b <= pv; ++b) {
            double acc_w = 0.0;
            const int base = ((bu.first + a) * count_v() + (bv.first + b)) * count_w() + bw.first;
            for (int c = 0; c <= pw; ++c) acc_w += bw.vals[c] * coefficients[base + c];
            acc_v += bv.vals[b] * acc_w;
        }
        acc += bu.vals[a] * acc_v;
    }
    return acc;
}

std::vector<CoeffWeight> volume_gradient_wrt_coeff(const SplineVolume& s, double u,
                                                   double v, double w) {
    check_param(s, u, v, w);
    AxisBasis bu, bv, bw;
    axis_basis(s.knots_u, u, bu);
    axis_basis(s.knots_v, v, bv);
    axis_basis(s.knots_w, w, bw);
    std::vector<CoeffWeight> out;
    out.reserve((s.knots_u.degree + 1) * (s.knots_v.degree + 1) * (s.knots_w.degree + 1));
    for (int a = 0; a <= s.knots_u.degree; ++a)
        for (int b = 0; b <= s.knots_v.degree; ++b)
            for (int c = 0; c <= s.knots_w.degree; ++c) {
                const double wgt = bu.vals[a] * bv.vals[b] * bw.vals[c];
                if (wgt != 0.0)
                    out.push_back({bu.first + a, bv.first + b, bw.first + c, wgt});
            }
    return out;
}

namespace {

// One Boehm insertion on a flat coefficient lane. `stride` walks the lane.
void insert_1d(const KnotVector& kv, double t, const double* in, int in_count,
               double* out, int stride_in, int stride_out) {
    const int p = kv.degree;
    const int span = kv.find_span(t);
    for (int i = 0; i <= span - p; ++i) out[i * stride_out] = in[i * stride_in];
    for (int i = span - p + 1; i <= span; ++i) {
        const double denom = kv.knots[i + p] - kv.knots[i];
        const double alpha = denom > 0.0 ? (t - kv.knots[i]) / denom : 0.0;
        out[i * stride_out] =
            alpha * in[i * stride_in] + (1.0 - alpha) * in[(i - 1) * stride_in];
    }
    for (int i = span + 1; i <= in_count; ++i)
        out[i * stride_out] = in[(i - 1) * stride_in];
}

}  // namespace

SplineVolume knot_insert(const SplineVolume& s, Axis axis, double new_knot) {
    const KnotVector& kv =
        axis == Axis::U ? s.knots_u : (axis == Axis::V ? s.knots_v : s.knots_w);
    if (!(new_knot > kv.domain_lo() && new_knot < kv.domain_hi()))
        throw std::domain_error("knot_insert: knot must lie strictly inside the domain");
    const long mult = std::count(kv.knots.begin(), kv.knots.end(), new_knot);
    if (mult > kv.degree)
        throw std::domain_error("knot_insert: multiplicity would exceed degree+1");

    SplineVolume r;
    r.knots_u = s.knots_u;
    r.knots_v = s.knots_v;
    r.knots_w = s.knots_w;
    KnotVector& rkv = axis == Axis::U ? r.knots_u : (axis == Axis::V ? r.knots_v : r.knots_w);
    rkv.knots.insert(std::upper_bound(rkv.knots.begin(), rkv.knots.end(), new_knot),
                     new_knot);

    const int mu = s.count_u(), mv = s.count_v(), mw = s.count_w();
    const int nu = r.count_u(), nv = r.count_v(), nw = r.count_w();
    r.coefficients.resize(static_cast<size_t>(nu) * nv * nw);

    if (axis == Axis::U) {
        for (int j = 0; j < mv; ++j)
            for (int k = 0; k < mw; ++k)
                insert_1d(kv, new_knot, &s.coefficients[s.flat(0, j, k)], mu,
                          &r.coefficients[r.flat(0, j, k)], mv * mw, nv * nw);
    } else if (axis == Axis::V) {
        for (int i = 0; i < mu; ++i)
            for (int k = 0; k < mw; ++k)
                insert_1d(kv, new_knot, &s.coefficients[s.flat(i, 0, k)], mv,
                          &r.coefficients[r.flat(i, 0, k)], mw, nw);
    } else {
        for (int i = 0; i < mu; ++i)
            for (int j = 0; j < mv; ++j)
                insert_1d(kv, new_knot, &s.coefficients[s.flat(i, j, 0)], mw,
                          &r.coefficients[r.flat(i, j, 0)], 1, 1);
    }
    return r;
}

LspiaResult local_lspia_fit(std::span<const FitPoint> data, const SplineVolume& s0,
                            const IndexSet& fixed, const LspiaOptions& opts) {
    s0.validate();
    if (fixed.dims != s0.counts())
        throw std::domain_error("local_lspia_fit: fixed-index mask shape mismatch");

    LspiaResult res;
    res.spline = s0;
    if (data.empty()) return res;

    const Aabb box = s0.parametric_box();
    for (const auto& d : data)
        if (!box.contains(d.param))
            throw std::domain_error("local_lspia_fit: data point outside parametric box");

    // Cache, per data point, the nonzero basis window on each axis (packed:
    // three window starts plus pu+1 + pv+1 + pw+1 basis values).
    const int pu = s0.knots_u.degree, pv = s0.knots_v.degree, pw = s0.knots_w.degree;
    const int stride = (pu + 1) + (pv + 1) + (pw + 1);
    std::vector<int> first_u(data.size()), first_v(data.size()), first_w(data.size());
    std::vector<double> basis(data.size() * size_t(stride));
    const size_t ncoef = s0.coefficients.size();
    std::vector<double> influence(ncoef, 0.0);  // per free coefficient, sum of weights
    {
        AxisBasis bu, bv, bw;
        for (size_t q = 0; q < data.size(); ++q) {
            axis_basis(s0.knots_u, data[q].param.x, bu);
            axis_basis(s0.knots_v, data[q].param.y, bv);
            axis_basis(s0.knots_w, data[q].param.z, bw);
            first_u[q] = bu.first;
            first_v[q] = bv.first;
            first_w[q] = bw.first;
            double* slot = &basis[q * stride];
            for (int a = 0; a <= pu; ++a) slot[a] = bu.vals[a];
            for (int b = 0; b <= pv; ++b) slot[pu + 1 + b] = bv.vals[b];
            for (int c = 0; c <= pw; ++c) slot[pu + 1 + pv + 1 + c] = bw.vals[c];
            bool any_free = false;
            for (int a = 0; a <= pu; ++a)
                for (int b = 0; b <= pv; ++b)
                    for (int c = 0; c <= pw; ++c) {
                        const int idx =
                            s0.flat(bu.first + a, bv.first + b, bw.first + c);
                        if (fixed.mask[idx]) continue;
                        any_free = true;
                        influence[idx] += bu.vals[a] * bv.vals[b] * bw.vals[c];
                    }
            if (!any_free) ++res.fully_constrained_points;
        }
    }
    const double max_influence = *std::max_element(influence.begin(), influence.end());

    std::vector<double>& coef = res.spline.coefficients;
    auto eval_cached = [&](size_t q) {
        const double* bu = &basis[q * stride];
        const double* bv = bu + pu + 1;
        const double* bw = bv + pv + 1;
        double acc = 0.0;
        for (int a = 0; a <= pu; ++a) {
            double av = 0.0;
            for (int b = 0; b <= pv; ++b) {
                double aw = 0.0;
                const int base = s0.flat(first_u[q] + a, first_v[q] + b, first_w[q]);
                for (int cc = 0; cc <= pw; ++cc) aw += bw[cc] * coef[base + cc];
                av += bv[b] * aw;
            }
            acc += bu[a] * av;
        }
        return acc;
    };

    std::vector<double> residual(data.size());
    auto compute_residuals = [&]() {
        double ssr = 0.0;
        for (size_t q = 0; q < data.size(); ++q) {
            residual[q] = data[q].value - eval_cached(q);
            ssr += residual[q] * residual[q];
        }
        return ssr;
    };

    double ssr = compute_residuals();
    res.initial_residual = ssr;
    res.residual_trace.push_back(ssr);
    if (max_influence <= 0.0) {  // every data point is fully constrained
        res.final_residual = ssr;
        return res;
    }

    // Influence-normalized step: each free coefficient moves by the weighted
    // mean of the residuals under its basis. The preconditioned iteration
    // matrix has unit row sums, and the halving safeguard keeps the squared
    // residual nonincreasing in all cases.
    double relax = 1.0;
    std::vector<double> delta(ncoef);
    std::vector<double> saved;
    for (int iter = 0; iter < opts.max_iters; ++iter) {
        std::fill(delta.begin(), delta.end(), 0.0);
        for (size_t q = 0; q < data.size(); ++q) {
            const double* bu = &basis[q * stride];
            const double* bv = bu + pu + 1;
            const double* bw = bv + pv + 1;
            const double r = residual[q];
            for (int a = 0; a <= pu; ++a)
                for (int b = 0; b <= pv; ++b) {
                    const int base = s0.flat(first_u[q] + a, first_v[q] + b, first_w[q]);
                    const double wab = bu[a] * bv[b] * r;
                    for (int cc = 0; cc <= pw; ++cc) delta[base + cc] += wab * bw[cc];
                }
        }
        saved = coef;
        for (size_t i = 0; i < ncoef; ++i)
            if (!fixed.mask[i] && influence[i] > 0.0)
                coef[i] += relax * delta[i] / influence[i];
        const double ssr_new = compute_residuals();
        if (ssr_new > ssr) {
            coef = saved;
            compute_residuals();
            relax *= 0.5;
            if (relax < 1e-12) break;
            continue;
        }
        res.iterations = iter + 1;
        res.residual_trace.push_back(ssr_new);
        const double gain = ssr - ssr_new;
        ssr = ssr_new;
        if (gain < opts.tol * std::max(ssr, 1e-300)) break;
    }
    res.final_residual = ssr;
    return res;
}

std::string to_json_string(const SplineVolume& s, int indent) {
    nlohmann::json j;
    j["degrees"] = {s.knots_u.degree, s.knots_v.degree, s.knots_w.degree};
    j["knots_u"] = s.knots_u.knots;
    j["knots_v"] = s.knots_v.knots;
    j["knots_w"] = s.knots_w.knots;
    j["coefficients"] = s.coefficients;
    return j.dump(indent);
}

SplineVolume spline_from_json_string(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    SplineVolume s;
    s.knots_u.degree = j.at("degrees").at(0).get<int>();
    s.knots_v.degree = j.at("degrees").at(1).get<int>();
    s.knots_w.degree = j.at("degrees").at(2).get<int>();
    s.knots_u.knots = j.at("knots_u").get<std::vector<double>>();
    s.knots_v.knots = j.at("knots_v").get<std::vector<double>>();
    s.knots_w.knots = j.at("knots_w").get<std::vector<double>>();
    s.coefficients = j.at("coefficients").get<std::vector<double>>();
    s.validate();
    return s;
}

}  // namespace topoblend
