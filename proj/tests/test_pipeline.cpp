#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "topoblend/pipeline.hpp"

using namespace topoblend;
namespace tt = topoblend::testing;

namespace {

const Aabb kUnit{{0, 0, 0}, {1, 1, 1}};

InitPlan plan_1d(int axis, int coefficients = 30) {
    InitPlan plan;
    plan.mode = InitPlan::Mode::OneDimensional;
    plan.frame = CoordinateFrame::cartesian(axis);
    plan.coefficients = {coefficients, 1, 1};
    plan.degrees = {3, 0, 0};
    return plan;
}

PorousSpec rod_spec(TpmsKind kind, std::array<int, 3> periods, double c) {
    PorousSpec spec;
    spec.kind = SetKind::Rod;
    spec.base = tpms(kind, periods);
    spec.c = constant_field(c, spec.base.box);
    return spec;
}

}  // namespace

TEST_CASE("scale_to_unit: identity, uniform and anisotropic boxes") {
    const Region unit_box = region_box(kUnit);
    auto [fwd, inv] = scale_to_unit(unit_box);
    CHECK(fwd.scale == Vec3{1, 1, 1});
    CHECK(fwd.offset == Vec3{0, 0, 0});

    const Region big = region_box({{0, 0, 0}, {2, 2, 2}});
    auto [fwd2, inv2] = scale_to_unit(big);
    CHECK(fwd2.scale == Vec3{0.5, 0.5, 0.5});

    const Region aniso = region_box({{0, 0, 0}, {1, 0.25, 0.25}});
    auto [fwd3, inv3] = scale_to_unit(aniso);
    CHECK(fwd3.scale.x == doctest::Approx(1.0));
    CHECK(fwd3.scale.y == doctest::Approx(4.0));
    CHECK(fwd3.scale.z == doctest::Approx(4.0));

    auto g = tt::rng(71);
    for (int i = 0; i < 200; ++i) {
        const Vec3 p{tt::uniform(g, -1, 3), tt::uniform(g, -1, 3), tt::uniform(g, -1, 3)};
        const Vec3 back = inv3(fwd3(p));
        CHECK(std::abs(back.x - p.x) < 1e-14);
        CHECK(std::abs(back.y - p.y) < 1e-14);
        CHECK(std::abs(back.z - p.z) < 1e-14);
    }
}

TEST_CASE("scale_to_unit rejects degenerate boxes") {
    const Region flat = region_from_indicator(
        {[](const Vec3&) { return -1.0; }, {{0, 0, 0}, {1, 1, 0}}});
    CHECK_THROWS_AS(scale_to_unit(flat), std::domain_error);
}

TEST_CASE("blend_pair: identical fields pass through with zero iterations") {
    const ScalarField f = offset_field(tpms(TpmsKind::P, {3, 3, 3}), -0.3);
    const Region er1 = region_box({{0, 0, 0}, {0.5, 1, 1}});
    const Region er2 = region_box({{0.5, 0, 0}, {1, 1, 1}});
    const Region br = region_box({{0.35, 0, 0}, {0.65, 1, 1}});
    OptimizeSettings st;
    st.resolution = {24, 24, 24};
    st.max_iters = 10;
    const auto [field, rep] = blend_pair(f, f, er1, er2, br, plan_1d(0), st);
    CHECK(rep.converged);
    CHECK(rep.iterations == 0);
    auto g = tt::rng(72);
    for (int i = 0; i < 500; ++i) {
        const Vec3 p{tt::uniform(g, 0, 1), tt::uniform(g, 0, 1), tt::uniform(g, 0, 1)};
        CHECK(field(p) == doctest::Approx(f(p)).epsilon(1e-12));
    }
}

TEST_CASE("blend_pair: outside-BR probes match the inputs exactly") {
    const ScalarField left = offset_field(tpms(TpmsKind::P, {4, 4, 4}), -0.4);
    const ScalarField right = offset_field(tpms(TpmsKind::G, {4, 4, 4}), -0.3);
    const Region er1 = region_box({{0, 0, 0}, {0.5, 1, 1}});
    const Region er2 = region_box({{0.5, 0, 0}, {1, 1, 1}});
    const Region br = region_box({{0.3, 0, 0}, {0.7, 1, 1}});
    OptimizeSettings st;
    st.resolution = {32, 32, 32};
    st.max_iters = 12;
    const auto [field, rep] = blend_pair(left, right, er1, er2, br, plan_1d(0, 40), st);
    auto g = tt::rng(73);
    for (int i = 0; i < 1000; ++i) {
        Vec3 p{tt::uniform(g, 0, 1), tt::uniform(g, 0, 1), tt::uniform(g, 0, 1)};
        if (br.contains(p)) continue;
        if (er1.contains(p)) CHECK(std::abs(field(p) - left(p)) <= 1e-12);
        else if (er2.contains(p)) CHECK(std::abs(field(p) - right(p)) <= 1e-12);
    }
}

TEST_CASE("blend_pair: radial blend preserves the inputs outside the annulus") {
    const ScalarField left = offset_field(tpms(TpmsKind::P, {5, 5, 5}), -0.5);
    const ScalarField right = offset_field(tpms(TpmsKind::IWP, {5, 5, 5}), -0.5);
    const Region er1 = region_cylinder({0.5, 0.5, 0.5}, {0, 0, 1}, 0.25, kUnit);
    const Region er2 = region_complement(er1);
    const Region br = region_from_indicator(
        {[](const Vec3& p) {
             const double r = std::hypot(p.x - 0.5, p.y - 0.5);
             return std::abs(r - 0.25) - 0.05;
         },
         kUnit});
    InitPlan plan;
    plan.mode = InitPlan::Mode::OneDimensional;
    plan.frame = CoordinateFrame::cylindrical(2, {0.5, 0.5, 0.5});
    plan.coefficients = {30, 1, 1};
    plan.degrees = {3, 0, 0};
    OptimizeSettings st;
    st.resolution = {32, 32, 32};
    st.max_iters = 12;
    const auto [field, rep] = blend_pair(left, right, er1, er2, br, plan, st);
    auto g = tt::rng(74);
    for (int i = 0; i < 1000; ++i) {
        Vec3 p{tt::uniform(g, 0, 1), tt::uniform(g, 0, 1), tt::uniform(g, 0, 1)};
        if (br.contains(p)) continue;
        if (er1.contains(p)) CHECK(std::abs(field(p) - left(p)) <= 1e-12);
        else CHECK(std::abs(field(p) - right(p)) <= 1e-12);
    }
}

TEST_CASE("BlendProblem validation") {
    BlendProblem problem;
    problem.specs = {rod_spec(TpmsKind::P, {4, 4, 4}, 0.2),
                     rod_spec(TpmsKind::G, {4, 4, 4}, 0.2)};
    problem.ers = {region_box({{0, 0, 0}, {0.5, 1, 1}}),
                   region_box({{0.5, 0, 0}, {1, 1, 1}})};
    problem.plans = {plan_1d(0)};
    SUBCASE("missing blending region") {
        CHECK_THROWS_AS(problem.validate(), std::domain_error);
    }
    SUBCASE("too many blending regions") {
        problem.brs = {region_box({{0.3, 0, 0}, {0.7, 1, 1}}),
                       region_box({{0.3, 0, 0}, {0.7, 1, 1}})};
        CHECK_THROWS_AS(problem.validate(), std::domain_error);
    }
    SUBCASE("single structure") {
        problem.specs.pop_back();
        problem.ers.pop_back();
        problem.brs = {};
        CHECK_THROWS_AS(problem.validate(), std::domain_error);
    }
}

TEST_CASE("blend_pair rejects a blending region that misses a side") {
    const ScalarField f = offset_field(tpms(TpmsKind::P, {3, 3, 3}), -0.3);
    const Region er1 = region_box({{0, 0, 0}, {0.4, 1, 1}});
    const Region er2 = region_box({{0.6, 0, 0}, {1, 1, 1}});
    const Region br = region_box({{0.45, 0, 0}, {0.55, 1, 1}});  // gap on both sides
    OptimizeSettings st;
    CHECK_THROWS_AS(blend_pair(f, f, er1, er2, br, plan_1d(0), st), std::domain_error);
}

TEST_CASE("blend_many: two structures reduce to blend_pair and report consistency") {
    BlendProblem problem;
    problem.specs = {rod_spec(TpmsKind::P, {4, 4, 4}, 0.3),
                     rod_spec(TpmsKind::IWP, {4, 4, 4}, 0.0)};
    problem.ers = {region_box({{0, 0, 0}, {0.5, 1, 1}}),
                   region_box({{0.5, 0, 0}, {1, 1, 1}})};
    problem.brs = {region_box({{0.3, 0, 0}, {0.7, 1, 1}})};
    problem.plans = {plan_1d(0, 40)};
    problem.settings.resolution = {32, 32, 32};
    problem.settings.max_iters = 15;
    problem.output_resolution = {32, 32, 32};

    const auto [field, report] = blend_many(problem);
    REQUIRE(report.stages.size() == 1);
    CHECK(report.betti_match);
    CHECK(report.final_betti[0] == report.final_oracle[0]);
    CHECK(report.final_betti[2] == report.final_oracle[1]);

    // whole-pipeline outside-BR preservation
    auto g = tt::rng(75);
    const ScalarField left = normalize_spec(problem.specs[0]);
    const ScalarField right = normalize_spec(problem.specs[1]);
    for (int i = 0; i < 1000; ++i) {
        Vec3 p{tt::uniform(g, 0, 1), tt::uniform(g, 0, 1), tt::uniform(g, 0, 1)};
        if (problem.brs[0].contains(p)) continue;
        if (problem.ers[0].contains(p)) CHECK(std::abs(field(p) - left(p)) <= 1e-12);
        else CHECK(std::abs(field(p) - right(p)) <= 1e-12);
    }
}

TEST_CASE("blend_many: three slabs stacked along z with growing accumulated region") {
    BlendProblem problem;
    problem.specs = {rod_spec(TpmsKind::P, {3, 3, 6}, 0.3),
                     rod_spec(TpmsKind::G, {3, 3, 6}, 0.2),
                     rod_spec(TpmsKind::D, {3, 3, 6}, 0.2)};
    problem.ers = {region_box({{0, 0, 0}, {1, 1, 1.0 / 3}}),
                   region_box({{0, 0, 1.0 / 3}, {1, 1, 2.0 / 3}}),
                   region_box({{0, 0, 2.0 / 3}, {1, 1, 1}})};
    problem.brs = {region_box({{0, 0, 0.28}, {1, 1, 0.39}}),
                   region_box({{0, 0, 0.61}, {1, 1, 0.72}})};
    problem.plans = {plan_1d(2, 40)};
    problem.settings.resolution = {24, 24, 36};
    problem.settings.max_iters = 15;
    problem.output_resolution = {24, 24, 36};

    const auto [field, report] = blend_many(problem);
    REQUIRE(report.stages.size() == 2);

    // preserved structure in each slab away from both bands
    auto g = tt::rng(76);
    for (int i = 0; i < 600; ++i) {
        Vec3 p{tt::uniform(g, 0, 1), tt::uniform(g, 0, 1), tt::uniform(g, 0, 1)};
        if (problem.brs[0].contains(p) || problem.brs[1].contains(p)) continue;
        for (size_t j = 0; j < problem.ers.size(); ++j)
            if (problem.ers[j].contains(p)) {
                const ScalarField input = normalize_spec(problem.specs[j]);
                CHECK(std::abs(field(p) - input(p)) <= 1e-12);
                break;
            }
    }
}

TEST_CASE("blend_many reports the failing stage index") {
    BlendProblem problem;
    problem.specs = {rod_spec(TpmsKind::P, {4, 4, 4}, 0.3),
                     rod_spec(TpmsKind::G, {4, 4, 4}, 0.2),
                     rod_spec(TpmsKind::D, {4, 4, 4}, 0.2)};
    problem.ers = {region_box({{0, 0, 0}, {1, 1, 0.33}}),
                   region_box({{0, 0, 0.33}, {1, 1, 0.66}}),
                   region_box({{0, 0, 0.66}, {1, 1, 1}})};
    // second blending region misses its structures entirely
    problem.brs = {region_box({{0, 0, 0.28}, {1, 1, 0.38}}),
                   region_box({{0.45, 0.45, 0.05}, {0.55, 0.55, 0.15}})};
    problem.plans = {plan_1d(2, 40)};
    problem.settings.resolution = {16, 16, 24};
    problem.settings.max_iters = 2;
    problem.output_resolution = {16, 16, 24};
    CHECK_THROWS_WITH_AS(blend_many(problem), doctest::Contains("stage 1"),
                         std::runtime_error);
}

TEST_CASE("clip participates in the blend output") {
    BlendProblem problem;
    problem.specs = {rod_spec(TpmsKind::P, {4, 4, 4}, 0.3),
                     rod_spec(TpmsKind::G, {4, 4, 4}, 0.2)};
    problem.ers = {region_box({{0, 0, 0}, {0.5, 1, 1}}),
                   region_box({{0.5, 0, 0}, {1, 1, 1}})};
    problem.brs = {region_box({{0.35, 0, 0}, {0.65, 1, 1}})};
    problem.plans = {plan_1d(0, 30)};
    problem.settings.resolution = {24, 24, 24};
    problem.settings.max_iters = 10;
    problem.output_resolution = {24, 24, 24};
    problem.clip = region_sphere({0.5, 0.5, 0.5}, 0.45).indicator;

    const auto [field, report] = blend_many(problem);
    auto g = tt::rng(77);
    for (int i = 0; i < 500; ++i) {
        Vec3 p{tt::uniform(g, 0, 1), tt::uniform(g, 0, 1), tt::uniform(g, 0, 1)};
        const double r = (p - Vec3{0.5, 0.5, 0.5}).norm();
        if (r > 0.45) CHECK(field(p) > 0);  // outside the model: no structure
    }
}
