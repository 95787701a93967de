#pragma once

#include <optional>
#include <vector>

#include "topoblend/optimize.hpp"

namespace topoblend {

/// Affine maps taking the total existing region's bounding box onto the unit
/// box and back; they compose to the identity.
std::pair<AxisMap, AxisMap> scale_to_unit(const Region& ter);

struct StageReport {
    std::vector<double> loss_trace;
    int iterations = 0;
    bool converged = true;
    double seconds = 0;
    std::array<int, 3> betti{0, 0, 0};
    std::array<int, 2> betti_oracle{0, 0};
    bool betti_match = true;
    int fit_iterations = 0;
    double fit_residual = 0;
};

struct BlendReport {
    std::vector<StageReport> stages;
    std::array<int, 3> final_betti{0, 0, 0};
    std::array<int, 2> final_oracle{0, 0};
    bool betti_match = true;   // final persistence vs oracle, dims 0 and 2
    bool converged = true;     // all stages reached zero loss
    std::array<int, 3> resolution{0, 0, 0};
    double total_seconds = 0;
};

/// Two or more porous structures with their regions and per-stage blending
/// regions; stage i blends the running structure with specs[i+1] inside
/// brs[i].
struct BlendProblem {
    std::vector<PorousSpec> specs;
    std::vector<Region> ers;
    std::vector<Region> brs;
    std::vector<InitPlan> plans;  // one per stage, or a single shared plan
    OptimizeSettings settings;
    std::optional<ScalarField> clip;
    std::array<int, 3> output_resolution{50, 50, 50};

    void validate() const;
    const InitPlan& plan_for_stage(size_t i) const;
};

/// Initialize, optimize, and compose one pair. `left` and `right` are
/// pre-normalized signed fields (threshold folded in, solid = {f <= 0}).
/// `frame_box` overrides the parametric frame (used by blend_many so all
/// stages share one frame).
std::pair<ScalarField, StageReport> blend_pair(const ScalarField& left,
                                               const ScalarField& right, const Region& er1,
                                               const Region& er2, const Region& br,
                                               const InitPlan& plan,
                                               const OptimizeSettings& settings,
                                               const Aabb* frame_box = nullptr);

/// Fold blend_pair over the spec list, accumulating the current existing
/// region, then audit the final structure at the output resolution.
std::pair<ScalarField, BlendReport> blend_many(const BlendProblem& problem);

}  // namespace topoblend
