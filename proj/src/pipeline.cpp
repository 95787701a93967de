#include "topoblend/pipeline.hpp"

#include <chrono>
#include <stdexcept>

namespace topoblend {

std::pair<AxisMap, AxisMap> scale_to_unit(const Region& ter) {
    const Aabb box = ter.box();
    if (box.degenerate())
        throw std::domain_error("scale_to_unit: degenerate bounding box");
    const Aabb unit{{0, 0, 0}, {1, 1, 1}};
    return {AxisMap::box_to_box(box, unit), AxisMap::box_to_box(unit, box)};
}

void BlendProblem::validate() const {
    if (specs.size() < 2)
        throw std::domain_error("BlendProblem: need at least two structures");
    if (ers.size() != specs.size())
        throw std::domain_error("BlendProblem: one existing region per structure required");
    if (brs.size() != specs.size() - 1)
        throw std::domain_error(
            "BlendProblem: need exactly one blending region per adjacent pair "
            "(|BR| = |specs| - 1)");
    if (plans.size() != 1 && plans.size() != brs.size())
        throw std::domain_error("BlendProblem: one init plan, or one per stage");
}

const InitPlan& BlendProblem::plan_for_stage(size_t i) const {
    return plans.size() == 1 ? plans[0] : plans[i];
}

namespace {

// The blending region must meet both structures it bridges.
void check_br_bridges(const Region& br, const Region& a, const Region& b,
                      const Aabb& domain) {
    const int n = 48;
    bool hits_a = false, hits_b = false;
    for (int k = 0; k < n && !(hits_a && hits_b); ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const Vec3 p = domain.lerp(
                    {i / double(n - 1), j / double(n - 1), k / double(n - 1)});
                if (!br.contains(p)) continue;
                hits_a = hits_a || a.contains(p);
                hits_b = hits_b || b.contains(p);
            }
    if (!hits_a || !hits_b)
        throw std::domain_error(
            "blend: the blending region does not intersect both structures");
}

}  // namespace

std::pair<ScalarField, StageReport> blend_pair(const ScalarField& left,
                                               const ScalarField& right, const Region& er1,
                                               const Region& er2, const Region& br,
                                               const InitPlan& plan,
                                               const OptimizeSettings& settings,
                                               const Aabb* frame_box) {
    const Aabb domain = frame_box ? *frame_box : er1.box().united(er2.box());
    check_br_bridges(br, er1, er2, domain);

    InitResult init = plan.mode == InitPlan::Mode::OneDimensional
                          ? init_1d(plan.frame, er1, er2, br, plan, domain)
                          : init_3d(er1, er2, br, plan, domain);

    auto [w, rep] = optimize(std::move(init.weight), left, right, br, domain, init.fixed,
                             settings);

    StageReport stage;
    stage.loss_trace = rep.loss_trace;
    stage.iterations = rep.iterations;
    stage.converged = rep.converged;
    stage.seconds = rep.seconds;
    stage.betti = rep.betti;
    stage.betti_oracle = rep.betti_oracle;
    stage.betti_match = rep.betti_match;
    stage.fit_iterations = init.fit_iterations;
    stage.fit_residual = init.fit_residual;

    const ScalarField* clip = settings.clip ? &*settings.clip : nullptr;
    return {blend_of(w, left, right, domain, clip), stage};
}

std::pair<ScalarField, BlendReport> blend_many(const BlendProblem& problem) {
    problem.validate();
    const auto t_start = std::chrono::steady_clock::now();

    Aabb domain = problem.ers[0].box();
    for (const Region& er : problem.ers) domain = domain.united(er.box());

    OptimizeSettings settings = problem.settings;
    settings.clip = problem.clip;

    BlendReport report;
    report.resolution = problem.output_resolution;

    ScalarField phi = normalize_spec(problem.specs[0]);
    Region cer = problem.ers[0];
    for (size_t i = 0; i + 1 < problem.specs.size(); ++i) {
        const ScalarField next = normalize_spec(problem.specs[i + 1]);
        OptimizeSettings stage_settings = settings;
        if (!settings.trace_dir.empty())
            stage_settings.trace_dir = settings.trace_dir + "/stage_" + std::to_string(i);
        std::pair<ScalarField, StageReport> stage;
        try {
            stage = blend_pair(phi, next, cer, problem.ers[i + 1], problem.brs[i],
                               problem.plan_for_stage(i), stage_settings, &domain);
        } catch (const std::exception& e) {
            throw std::runtime_error("blend stage " + std::to_string(i) + ": " + e.what());
        }
        phi = std::move(stage.first);
        report.stages.push_back(std::move(stage.second));
        report.converged = report.converged && report.stages.back().converged;
        cer = region_union(cer, problem.ers[i + 1]);
    }

    // Whole-model audit at the output resolution.
    const FilteredGrid grid = sample_field(phi, domain, problem.output_resolution);
    const PersistenceDiagram dia = compute_persistence(grid);
    report.final_betti = betti_at(dia, 0.0);
    report.final_oracle = oracle_betti(grid, 0.0);
    report.betti_match = report.final_betti[0] == report.final_oracle[0] &&
                         report.final_betti[2] == report.final_oracle[1];
    report.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(phi), std::move(report)};
}

}  // namespace topoblend
