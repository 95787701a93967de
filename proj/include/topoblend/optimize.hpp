#pragma once

#include <optional>
#include <vector>

#include "topoblend/init.hpp"
#include "topoblend/topology.hpp"

namespace topoblend {

/// Persistence-diagram region in the (birth, death) plane, cut by the lines
/// b = 0, d = 0 and d = -b. Pairs in II and III are the features present in
/// the solid {phi <= 0}; the repair drives them out to I and IV.
enum class DiagramRegion { I, II, III, IV, Essential };

DiagramRegion classify_pair(const PersistencePair& p);

/// Eq-style blending-region filter: the pair survives only if both critical
/// vertices lie in BR; otherwise it becomes the zero pair (0, 0), which
/// contributes nothing. Essential pairs are always zeroed.
PersistencePair filter_by_br(const PersistencePair& p, const FilteredGrid& grid,
                             const Region& br);

struct PairContribution {
    size_t pair_index = 0;  // into diagram.pairs
    int dim = 0;
    DiagramRegion region = DiagramRegion::I;
    double value = 0;  // nonnegative contribution to the total
};

struct LossBreakdown {
    double total = 0;
    std::vector<PairContribution> contributions;
    std::array<int, 2> count_ii{0, 0};   // selected pairs per dim {0, 2}
    std::array<int, 2> count_iii{0, 0};
};

/// Topological loss: sum of deaths of region-III pairs minus births of
/// region-II pairs, dims 0 and 2, restricted to pairs whose critical vertices
/// lie in BR. Zero exactly when no such pairs remain.
LossBreakdown loss(const PersistenceDiagram& diagram, const FilteredGrid& grid,
                   const Region& br);

/// Gradient of the loss with respect to omega's control coefficients through
/// the critical vertices: d(death)/dC = R(xi_d) * (right - left)(xi_d) for
/// region-III pairs and -d(birth)/dC for region-II pairs. Fixed coefficients
/// receive no entry. Entries are sorted by index.
std::vector<CoeffWeight> loss_gradient(const PersistenceDiagram& diagram,
                                       const FilteredGrid& grid, const WeightField& w,
                                       const ScalarField& left, const ScalarField& right,
                                       const Region& br, const IndexSet& fixed,
                                       const ScalarField* clip = nullptr);

struct OptimizeSettings {
    double learning_rate = 0.05;
    double epsilon = 1e-8;
    int max_iters = 30;
    std::array<int, 3> resolution{50, 50, 50};
    std::optional<ScalarField> clip;  // model field phi_M, sampled as max(blend, clip)
    std::string trace_dir;            // when nonempty, per-iteration CSV dumps
};

struct OptimizeReport {
    std::vector<double> loss_trace;  // loss at entry of each iteration (incl. final)
    int iterations = 0;              // update steps taken
    bool converged = false;
    std::array<int, 3> betti{0, 0, 0};      // persistence Betti at t = 0
    std::array<int, 2> betti_oracle{0, 0};  // union-find oracle at t = 0
    bool betti_match = true;
    double seconds = 0;
};

/// Adaptive-gradient repair loop: sample the blend, compute persistence,
/// evaluate the filtered loss, stop at zero or the iteration cap, otherwise
/// take an AdaGrad step on the non-fixed coefficients.
std::pair<WeightField, OptimizeReport> optimize(WeightField w, const ScalarField& left,
                                                const ScalarField& right, const Region& br,
                                                const Aabb& domain, const IndexSet& fixed,
                                                const OptimizeSettings& settings);

/// The sampled blend (1 - omega) * left + omega * right, clipped if required.
ScalarField blend_of(const WeightField& w, const ScalarField& left,
                     const ScalarField& right, const Aabb& domain,
                     const ScalarField* clip = nullptr);

}  // namespace topoblend
