// Acceptance suite: end-to-end checks of the blend pipeline, the persistence
// machinery against the union-find oracle, the loss gradient against finite
// differences, and the spline toolbox properties. Prints one PASS/FAIL line
// per criterion and exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "topoblend/pipeline.hpp"

using namespace topoblend;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_failures = 0;

void report(int criterion, const char* title, const Outcome& o) {
    std::printf("[%s] criterion %2d: %s — %s\n", o.pass ? "PASS" : "FAIL", criterion,
                title, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++g_failures;
}

std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }
double uni(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}
int uni_int(std::mt19937_64& g, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(g);
}

ScalarField random_smooth_field(std::mt19937_64& g, int waves = 4, int max_freq = 2) {
    struct Wave {
        double ax, ay, az, phase, amp;
    };
    std::vector<Wave> ws(waves);
    for (auto& w : ws) {
        w.ax = 2.0 * 3.14159265358979 * uni_int(g, 0, max_freq);
        w.ay = 2.0 * 3.14159265358979 * uni_int(g, 0, max_freq);
        w.az = 2.0 * 3.14159265358979 * uni_int(g, 0, max_freq);
        w.phase = uni(g, 0.0, 6.28318530717959);
        w.amp = uni(g, 0.3, 1.0);
    }
    return {[ws](const Vec3& p) {
                double v = 0;
                for (const auto& w : ws)
                    v += w.amp * std::cos(w.ax * p.x + w.ay * p.y + w.az * p.z + w.phase);
                return v;
            },
            {{0, 0, 0}, {1, 1, 1}}};
}

// ---------------------------------------------------------------------------
// Shared fixtures: the bar layout with two structures side by side along x.
// ---------------------------------------------------------------------------

const Aabb kBar{{0, 0, 0}, {1, 0.25, 0.25}};

PorousSpec rod(TpmsKind kind, double c, const Aabb& box,
               std::array<int, 3> periods = {4, 4, 4}) {
    return {SetKind::Rod, tpms(kind, periods), constant_field(c, box), {}, {}};
}
PorousSpec sheet(TpmsKind kind, double c, const Aabb& box,
                 std::array<int, 3> periods = {4, 4, 4}) {
    return {SetKind::Sheet, tpms(kind, periods), {}, constant_field(-c, box),
            constant_field(c, box)};
}

InitPlan bar_plan_1d() {
    InitPlan plan;
    plan.mode = InitPlan::Mode::OneDimensional;
    plan.frame = CoordinateFrame::cartesian(0);
    plan.coefficients = {50, 1, 1};
    plan.degrees = {3, 0, 0};
    return plan;
}

BlendProblem bar_problem(PorousSpec left, PorousSpec right, InitPlan plan) {
    BlendProblem prob;
    prob.specs = {std::move(left), std::move(right)};
    prob.ers = {region_box({{0, 0, 0}, {0.5, 0.25, 0.25}}),
                region_box({{0.5, 0, 0}, {1, 0.25, 0.25}})};
    prob.brs = {region_box({{0.3, 0, 0}, {0.7, 0.25, 0.25}})};
    prob.plans = {std::move(plan)};
    prob.settings.resolution = {50, 50, 50};
    prob.settings.max_iters = 10;
    prob.output_resolution = {50, 50, 50};
    return prob;
}

struct BlendRun {
    BlendProblem problem;
    ScalarField field;
    BlendReport report;
    double seconds = 0;
};

BlendRun run_blend(BlendProblem problem) {
    BlendRun run;
    const auto t0 = std::chrono::steady_clock::now();
    auto [field, report] = blend_many(problem);
    run.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    run.problem = std::move(problem);
    run.field = std::move(field);
    run.report = std::move(report);
    return run;
}

std::string run_summary(const BlendRun& run) {
    std::ostringstream ss;
    int iters = 0;
    for (const auto& s : run.report.stages) iters = std::max(iters, s.iterations);
    ss << "betti=(" << run.report.final_betti[0] << "," << run.report.final_betti[2]
       << ") oracle=(" << run.report.final_oracle[0] << "," << run.report.final_oracle[1]
       << ") iterations=" << iters << " loss_end="
       << run.report.stages.back().loss_trace.back()
       << " time=" << int(run.seconds * 10) / 10.0 << "s";
    return ss.str();
}

bool counts_match(const BlendRun& run, int n0, int n2) {
    return run.report.converged && run.report.final_betti[0] == n0 &&
           run.report.final_betti[2] == n2 && run.report.final_oracle[0] == n0 &&
           run.report.final_oracle[1] == n2;
}

// Max |final - input| over probes in the preserved parts of the regions.
double preservation_error(const BlendRun& run, std::uint64_t seed, int count = 1000) {
    Aabb domain = run.problem.ers[0].box();
    for (const Region& er : run.problem.ers) domain = domain.united(er.box());
    auto g = rng(seed);
    double max_err = 0;
    int found = 0;
    long guard = 0;
    while (found < count && guard++ < 400l * count) {
        const Vec3 p = domain.lerp({uni(g, 0, 1), uni(g, 0, 1), uni(g, 0, 1)});
        bool in_br = false;
        for (const Region& br : run.problem.brs) in_br = in_br || br.contains(p);
        if (in_br) continue;
        int owner = -1;
        for (size_t i = 0; i < run.problem.ers.size(); ++i)
            if (run.problem.ers[i].contains(p)) {
                owner = int(i);
                break;
            }
        if (owner < 0) continue;
        const ScalarField input = normalize_spec(run.problem.specs[owner]);
        max_err = std::max(max_err, std::abs(run.field(p) - input(p)));
        ++found;
    }
    return max_err;
}

// ---------------------------------------------------------------------------
// Criteria 6-8 helpers
// ---------------------------------------------------------------------------

Outcome check_persistence_oracle() {
    const Aabb unit{{0, 0, 0}, {1, 1, 1}};
    auto g = rng(601);
    for (int trial = 0; trial < 200; ++trial) {
        const ScalarField f = random_smooth_field(g);
        const int n = uni_int(g, 10, 24);
        const FilteredGrid grid = sample_field(f, unit, {n, n, n});
        const PersistenceDiagram dia = compute_persistence(grid);
        double lo = 1e18, hi = -1e18;
        for (double v : grid.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        for (int s = 0; s < 5; ++s) {
            const double t = uni(g, lo, hi);
            const auto betti = betti_at(dia, t);
            const auto oracle = oracle_betti(grid, t);
            if (betti[0] != oracle[0] || betti[2] != oracle[1]) {
                std::ostringstream ss;
                ss << "mismatch on field " << trial << " at t=" << t << ": persistence ("
                   << betti[0] << "," << betti[2] << ") vs oracle (" << oracle[0] << ","
                   << oracle[1] << ")";
                return {false, ss.str()};
            }
        }
    }

    // The worked small-complex example: three minima at 0, merges at 1 and 2,
    // loops born at 1 and 2 dying at 3.
    const std::vector<double> sheet_vals = {0, 1, 1, 2, 0, 1, 3, 1, 3, 2, 0, 1, 1, 2, 2};
    FilteredGrid wg;
    wg.dims = {5, 3, 2};
    wg.box = {{0, 0, 0}, {4, 2, 1}};
    wg.values = sheet_vals;
    wg.values.insert(wg.values.end(), sheet_vals.begin(), sheet_vals.end());
    const PersistenceDiagram dia = compute_persistence(wg);
    std::multiset<std::pair<double, double>> d0, d1;
    int essentials = 0;
    for (const auto& p : dia.pairs) {
        if (p.essential()) {
            ++essentials;
            if (p.dim != 0 || p.birth != 0.0) return {false, "wrong essential pair"};
            continue;
        }
        if (p.dim == 0) d0.insert({p.birth, p.death});
        if (p.dim == 1) d1.insert({p.birth, p.death});
        if (p.dim == 2) return {false, "unexpected 2-dimensional pair"};
    }
    const std::multiset<std::pair<double, double>> want0{{0, 1}, {0, 2}};
    const std::multiset<std::pair<double, double>> want1{{1, 3}, {2, 3}};
    if (essentials != 1 || d0 != want0 || d1 != want1)
        return {false,
                "worked example pairs do not match {(0,1),(0,2),(0,inf)} / {(1,3),(2,3)}"};
    return {true, "1000 threshold checks on 200 random fields exact; worked example exact"};
}

// One random blend scene for the gradient check.
struct GradScene {
    ScalarField left, right;
    WeightField weight;
    Region br;
    IndexSet fixed;
};

GradScene make_scene(std::uint64_t seed) {
    auto g = rng(seed);
    GradScene sc;
    sc.left = random_smooth_field(g);
    sc.right = random_smooth_field(g);
    const int count = 20;
    const KnotVector kv = KnotVector::clamped_uniform(3, count, 0.0, 1.0);
    std::vector<double> coeffs(count);
    sc.fixed = IndexSet({count, 1, 1});
    for (int i = 0; i < count; ++i) {
        const auto [lo, hi] = kv.support(i);
        if (lo <= 0.25) {
            coeffs[i] = 0.0;
            sc.fixed.insert(i, 0, 0);
        } else if (hi >= 0.75) {
            coeffs[i] = 1.0;
            sc.fixed.insert(i, 0, 0);
        } else {
            coeffs[i] = uni(g, 0.2, 0.8);
        }
    }
    sc.weight.spline = SplineVolume::univariate(kv, coeffs);
    sc.weight.frame = CoordinateFrame::cartesian(0);
    sc.br = region_box({{0.25, 0, 0}, {0.75, 1, 1}});
    return sc;
}

Outcome check_gradient() {
    const Aabb unit{{0, 0, 0}, {1, 1, 1}};
    const std::array<int, 3> res{20, 20, 20};
    int tested = 0;
    double worst = 0;
    for (std::uint64_t seed = 1; seed < 600 && tested < 50; ++seed) {
        GradScene sc = make_scene(seed * 7919);
        const FilteredGrid grid =
            sample_field(blend_of(sc.weight, sc.left, sc.right, unit), unit, res);
        const PersistenceDiagram dia = inverse_map(grid, compute_persistence(grid));
        const LossBreakdown lb0 = loss(dia, grid, sc.br);
        if (lb0.total == 0.0) continue;
        const auto grad =
            loss_gradient(dia, grid, sc.weight, sc.left, sc.right, sc.br, sc.fixed);
        if (grad.empty()) continue;

        auto g = rng(seed * 31 + 7);
        std::vector<double> dir(sc.weight.spline.coefficients.size(), 0.0);
        double directional = 0;
        for (const auto& e : grad) {
            const double d = uni(g, -1.0, 1.0);
            dir[sc.weight.spline.flat(e.i, e.j, e.k)] = d;
            directional += e.weight * d;
        }
        if (std::abs(directional) < 1e-6) continue;

        const double h = 1e-5;
        auto probe = [&](double step) {
            WeightField w = sc.weight;
            for (size_t i = 0; i < dir.size(); ++i)
                w.spline.coefficients[i] += step * dir[i];
            const FilteredGrid pg =
                sample_field(blend_of(w, sc.left, sc.right, unit), unit, res);
            const PersistenceDiagram pd = inverse_map(pg, compute_persistence(pg));
            const LossBreakdown plb = loss(pd, pg, sc.br);
            const bool stable =
                plb.count_ii == lb0.count_ii && plb.count_iii == lb0.count_iii;
            return std::pair<double, bool>(plb.total, stable);
        };
        const auto [lp, sp] = probe(h);
        const auto [lm, sm] = probe(-h);
        if (!sp || !sm) continue;  // pairing changed under the step: rejected

        const double fd = (lp - lm) / (2 * h);
        const double rel = std::abs(fd - directional) / std::max(std::abs(directional), 1e-12);
        worst = std::max(worst, rel);
        if (rel > 1e-3) {
            std::ostringstream ss;
            ss << "config seed " << seed << ": fd=" << fd << " grad=" << directional
               << " rel=" << rel;
            return {false, ss.str()};
        }
        ++tested;
    }
    if (tested < 50)
        return {false, "only " + std::to_string(tested) + " stable configurations"};
    std::ostringstream ss;
    ss << "50 stable configurations, worst relative error " << worst;
    return {true, ss.str()};
}

Outcome check_spline_properties() {
    auto g = rng(801);
    // partition of unity over random knot vectors
    for (int trial = 0; trial < 10000; ++trial) {
        const int degree = uni_int(g, 0, 4);
        const int count = uni_int(g, degree + 1, degree + 9);
        KnotVector kv = KnotVector::clamped_uniform(degree, count, 0.0, 1.0);
        for (int s = degree + 1; s < count; ++s) kv.knots[s] = uni(g, 0.0, 1.0);
        std::sort(kv.knots.begin() + degree + 1, kv.knots.begin() + count);
        const double u = uni(g, 0.0, 1.0);
        double sum = 0;
        for (int i = 0; i < kv.basis_count(); ++i) {
            const double n = basis_eval(kv, i, u);
            if (n < 0) return {false, "negative basis value"};
            sum += n;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            return {false, "partition of unity violated by " + std::to_string(sum - 1.0)};
    }

    auto random_volume = [&]() {
        SplineVolume s;
        for (int a = 0; a < 3; ++a) {
            const int degree = uni_int(g, 1, 3);
            const int count = uni_int(g, degree + 1, 8);
            (a == 0 ? s.knots_u : a == 1 ? s.knots_v : s.knots_w) =
                KnotVector::clamped_uniform(degree, count, 0.0, 1.0);
        }
        s.coefficients.resize(size_t(s.count_u()) * s.count_v() * s.count_w());
        for (double& c : s.coefficients) c = uni(g, -2.0, 2.0);
        return s;
    };

    // knot insertion is value-preserving
    for (int trial = 0; trial < 20; ++trial) {
        const SplineVolume s = random_volume();
        const SplineVolume r = knot_insert(s, Axis(uni_int(g, 0, 2)), uni(g, 0.01, 0.99));
        for (int probe = 0; probe < 100; ++probe) {
            const Vec3 q{uni(g, 0, 1), uni(g, 0, 1), uni(g, 0, 1)};
            if (std::abs(r.eval(q) - s.eval(q)) > 1e-12)
                return {false, "knot insertion changed the volume"};
        }
    }

    // constrained fits: monotone residual, fixed coefficients bitwise stable
    for (int trial = 0; trial < 20; ++trial) {
        const SplineVolume target = random_volume();
        SplineVolume s0 = target;
        for (double& c : s0.coefficients) c = uni(g, -1.0, 1.0);
        IndexSet fixed(s0.counts());
        for (auto& m : fixed.mask) m = uni_int(g, 0, 1);
        std::vector<FitPoint> data;
        for (int i = 0; i < 300; ++i) {
            const Vec3 q{uni(g, 0, 1), uni(g, 0, 1), uni(g, 0, 1)};
            data.push_back({q, target.eval(q)});
        }
        const LspiaResult res = local_lspia_fit(data, s0, fixed);
        for (size_t i = 1; i < res.residual_trace.size(); ++i)
            if (res.residual_trace[i] > res.residual_trace[i - 1])
                return {false, "residual increased during a fit"};
        for (size_t i = 0; i < fixed.mask.size(); ++i)
            if (fixed.mask[i] && res.spline.coefficients[i] != s0.coefficients[i])
                return {false, "a fixed coefficient moved"};
    }
    return {true, "partition of unity, insertion invariance and 20 constrained fits clean"};
}

}  // namespace

int main() {
    std::printf("acceptance suite\n================\n");

    // --- criteria 1-3: the side-by-side bar blends --------------------------
    BlendRun rod_pair = run_blend(bar_problem(rod(TpmsKind::P, 0.3, kBar),
                                              rod(TpmsKind::IWP, 0.3, kBar), bar_plan_1d()));
    {
        Outcome o;
        o.pass = counts_match(rod_pair, 1, 0) && rod_pair.seconds <= 60.0;
        o.detail = run_summary(rod_pair);
        report(1, "rod P + rod IWP bar blend reaches (1,0) within 60 s", o);
    }

    InitPlan sheet_plan;
    sheet_plan.mode = InitPlan::Mode::ThreeDimensional;
    sheet_plan.coefficients = {64, 16, 16};
    sheet_plan.degrees = {3, 3, 3};
    sheet_plan.fit_grid = 96;
    sheet_plan.index_grid = 96;
    BlendRun sheet_pair = run_blend(bar_problem(sheet(TpmsKind::P, 0.3, kBar),
                                                sheet(TpmsKind::G, 0.4, kBar), sheet_plan));
    {
        Outcome o;
        o.pass = counts_match(sheet_pair, 2, 0);
        o.detail = run_summary(sheet_pair);
        report(2, "sheet P + sheet G bar blend keeps the intrinsic piece: (2,0)", o);
    }

    BlendRun mixed_pair = run_blend(bar_problem(rod(TpmsKind::P, 0.3, kBar),
                                                sheet(TpmsKind::P, 0.3, kBar), bar_plan_1d()));
    {
        Outcome o;
        o.pass = counts_match(mixed_pair, 1, 0);
        o.detail = run_summary(mixed_pair);
        report(3, "rod P + sheet P bar blend reaches (1,0)", o);
    }

    {
        Outcome o;
        o.pass = true;
        int worst = 0;
        for (const BlendRun* run : {&rod_pair, &sheet_pair, &mixed_pair})
            for (const auto& s : run->report.stages) {
                o.pass = o.pass && s.converged && s.iterations <= 10;
                worst = std::max(worst, s.iterations);
            }
        o.detail = "max iterations " + std::to_string(worst);
        report(4, "bar blends converge within 10 iterations", o);
    }

    // --- criteria 9-10 run before 5 so preservation covers every blend ------
    const Aabb plate{{0, 0, 0}, {1, 1, 0.25}};
    auto surface = [](double x) { return 0.5 + 0.15 * std::sin(6.283185307179586 * x); };
    BlendProblem sinus;
    {
        Region er1 = region_from_indicator(
            {[surface](const Vec3& p) { return p.y - surface(p.x); }, plate});
        Region er2 = region_complement(er1);
        er2.indicator.box = plate;
        Region br = region_from_indicator(
            {[surface](const Vec3& p) { return std::abs(p.y - surface(p.x)) - 0.2; },
             plate});
        sinus.specs = {rod(TpmsKind::P, 0.3, plate), rod(TpmsKind::G, 0.2, plate)};
        sinus.ers = {er1, er2};
        sinus.brs = {br};
        InitPlan plan;
        plan.mode = InitPlan::Mode::ThreeDimensional;
        plan.coefficients = {80, 80, 20};
        plan.degrees = {3, 3, 3};
        plan.fit_grid = 120;
        plan.index_grid = 128;
        plan.fit = {150, 1e-7};
        sinus.plans = {plan};
        sinus.settings.resolution = {50, 50, 25};
        sinus.settings.max_iters = 10;
        sinus.output_resolution = {50, 50, 25};
    }
    BlendRun sinus_run = run_blend(std::move(sinus));

    BlendProblem stack;
    {
        const Aabb cube{{0, 0, 0}, {1, 1, 1}};
        const TpmsKind kinds[4] = {TpmsKind::P, TpmsKind::G, TpmsKind::D, TpmsKind::IWP};
        const double cs[4] = {0.3, 0.2, 0.15, 0.3};
        for (int i = 0; i < 4; ++i) {
            stack.specs.push_back(rod(kinds[i], cs[i], cube));
            stack.ers.push_back(region_box({{0, 0, 0.25 * i}, {1, 1, 0.25 * (i + 1)}}));
        }
        for (int i = 1; i < 4; ++i)
            stack.brs.push_back(
                region_box({{0, 0, 0.25 * i - 0.0625}, {1, 1, 0.25 * i + 0.0625}}));
        InitPlan plan;
        plan.mode = InitPlan::Mode::OneDimensional;
        plan.frame = CoordinateFrame::cartesian(2);
        plan.coefficients = {80, 1, 1};
        plan.degrees = {3, 0, 0};
        stack.plans = {plan};
        stack.settings.resolution = {50, 50, 50};
        stack.settings.max_iters = 10;
        stack.output_resolution = {50, 50, 50};
    }
    BlendRun stack_run = run_blend(std::move(stack));

    {
        Outcome o;
        o.pass = true;
        double worst = 0;
        const std::vector<std::pair<const char*, const BlendRun*>> runs = {
            {"rods", &rod_pair},      {"sheets", &sheet_pair}, {"mixed", &mixed_pair},
            {"sinusoid", &sinus_run}, {"stack", &stack_run}};
        for (const auto& [name, run] : runs) {
            const double err = preservation_error(*run, 505);
            worst = std::max(worst, err);
            if (err > 1e-12) {
                o.detail =
                    std::string(name) + " violates preservation: " + std::to_string(err);
                o.pass = false;
            }
        }
        if (o.pass) {
            std::ostringstream ss;
            ss << "5 blends x 1000 probes, max |blend - input| = " << worst;
            o.detail = ss.str();
        }
        report(5, "structures outside the blending regions are preserved to 1e-12", o);
    }

    report(6, "persistence Betti equals the union-find oracle; worked example exact",
           check_persistence_oracle());
    report(7, "loss gradient matches directional finite differences to 1e-3",
           check_gradient());
    report(8, "spline toolbox properties (partition of unity, insertion, fits)",
           check_spline_properties());

    {
        Outcome o;
        const auto& s = sinus_run.report.stages[0];
        o.pass = s.converged && s.iterations <= 10 && sinus_run.report.final_oracle[0] == 1 &&
                 sinus_run.report.final_oracle[1] == 0 && sinus_run.report.betti_match;
        o.detail = run_summary(sinus_run);
        report(9, "sinusoidal-interface trivariate blend reaches zero loss and (1,0)", o);
    }
    {
        Outcome o;
        o.pass = stack_run.report.converged && stack_run.report.final_oracle[0] == 1 &&
                 stack_run.report.final_oracle[1] == 0 && stack_run.report.betti_match;
        for (const auto& s : stack_run.report.stages)
            o.pass = o.pass && s.loss_trace.back() == 0.0;
        o.detail = run_summary(stack_run);
        report(10, "four structures stacked along z blend into one solid: (1,0)", o);
    }

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria FAILED\n", g_failures);
    return 1;
}
