#include "topoblend/optimize.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

namespace topoblend {

DiagramRegion classify_pair(const PersistencePair& p) {
    if (p.essential()) return DiagramRegion::Essential;
    if (!(p.birth < p.death))
        throw std::domain_error("classify_pair: birth must precede death");
    if (p.birth > 0) return DiagramRegion::I;
    if (p.death <= 0) return DiagramRegion::IV;
    return p.death >= -p.birth ? DiagramRegion::II : DiagramRegion::III;
}

PersistencePair filter_by_br(const PersistencePair& p, const FilteredGrid& grid,
                             const Region& br) {
    PersistencePair zero;
    zero.dim = p.dim;
    zero.birth = 0;
    zero.death = 0;
    if (p.essential()) return zero;
    if (!p.has_vertices())
        throw std::domain_error("filter_by_br: critical vertices not populated");
    if (br.contains(grid.point(p.birth_vertex)) && br.contains(grid.point(p.death_vertex)))
        return p;
    return zero;
}

LossBreakdown loss(const PersistenceDiagram& diagram, const FilteredGrid& grid,
                   const Region& br) {
    LossBreakdown out;
    for (size_t idx = 0; idx < diagram.pairs.size(); ++idx) {
        const auto& p = diagram.pairs[idx];
        if (p.dim != 0 && p.dim != 2) continue;
        if (p.essential()) continue;
        const DiagramRegion region = classify_pair(p);
        if (region != DiagramRegion::II && region != DiagramRegion::III) continue;
        const PersistencePair filtered = filter_by_br(p, grid, br);
        if (filtered.birth == 0 && filtered.death == 0) continue;
        const int slot = p.dim == 0 ? 0 : 1;
        double value;
        if (region == DiagramRegion::III) {
            value = filtered.death;
            ++out.count_iii[slot];
        } else {
            value = -filtered.birth;
            ++out.count_ii[slot];
        }
        out.contributions.push_back({idx, p.dim, region, value});
        out.total += value;
    }
    return out;
}

std::vector<CoeffWeight> loss_gradient(const PersistenceDiagram& diagram,
                                       const FilteredGrid& grid, const WeightField& w,
                                       const ScalarField& left, const ScalarField& right,
                                       const Region& br, const IndexSet& fixed,
                                       const ScalarField* clip) {
    if (fixed.dims != w.spline.counts())
        throw std::domain_error("loss_gradient: fixed-index mask shape mismatch");
    std::map<std::array<int, 3>, double> acc;
    const LossBreakdown lb = loss(diagram, grid, br);
    for (const auto& c : lb.contributions) {
        const auto& p = diagram.pairs[c.pair_index];
        const bool at_death = c.region == DiagramRegion::III;
        const auto& vtx = at_death ? p.death_vertex : p.birth_vertex;
        const Vec3 x = grid.point(vtx);
        if (clip) {
            // Where the model field dominates the blend, the critical value
            // does not depend on omega.
            const double lw = w.eval(x);
            const double blend = (1.0 - lw) * left(x) + lw * right(x);
            if ((*clip)(x) > blend) continue;
        }
        const double factor = (at_death ? 1.0 : -1.0) * (right(x) - left(x));
        const Vec3 q = w.param(x);
        for (const auto& g : volume_gradient_wrt_coeff(w.spline, q.x, q.y, q.z)) {
            if (fixed.contains(g.i, g.j, g.k)) continue;
            acc[{g.i, g.j, g.k}] += factor * g.weight;
        }
    }
    std::vector<CoeffWeight> out;
    out.reserve(acc.size());
    for (const auto& [idx, v] : acc) out.push_back({idx[0], idx[1], idx[2], v});
    return out;
}

ScalarField blend_of(const WeightField& w, const ScalarField& left,
                     const ScalarField& right, const Aabb& domain,
                     const ScalarField* clip) {
    auto ww = std::make_shared<WeightField>(w);
    ScalarField blend{[ww, lf = left.f, rf = right.f](const Vec3& p) {
                          const double t = ww->eval(p);
                          return (1.0 - t) * lf(p) + t * rf(p);
                      },
                      domain};
    if (clip) return max_field(blend, *clip);
    return blend;
}

std::pair<WeightField, OptimizeReport> optimize(WeightField w, const ScalarField& left,
                                                const ScalarField& right, const Region& br,
                                                const Aabb& domain, const IndexSet& fixed,
                                                const OptimizeSettings& settings) {
    if (fixed.dims != w.spline.counts())
        throw std::domain_error("optimize: fixed-index mask shape mismatch");
    const auto t_start = std::chrono::steady_clock::now();
    const ScalarField* clip = settings.clip ? &*settings.clip : nullptr;

    OptimizeReport rep;
    std::vector<double> grad_sq(w.spline.coefficients.size(), 0.0);

    FilteredGrid grid;
    PersistenceDiagram dia;
    while (true) {
        grid = sample_field(blend_of(w, left, right, domain, clip), domain,
                            settings.resolution);
        dia = inverse_map(grid, compute_persistence(grid));
        const LossBreakdown lb = loss(dia, grid, br);
        rep.loss_trace.push_back(lb.total);
        if (!settings.trace_dir.empty()) {
            namespace fs = std::filesystem;
            fs::create_directories(settings.trace_dir);
            std::ofstream csv(fs::path(settings.trace_dir) /
                              ("diagram_iter_" + std::to_string(rep.iterations) + ".csv"));
            csv << diagram_to_csv(dia);
        }
        if (lb.total == 0.0) {
            rep.converged = true;
            break;
        }
        if (rep.iterations >= settings.max_iters) {
            rep.converged = false;
            break;
        }
        const auto grad = loss_gradient(dia, grid, w, left, right, br, fixed, clip);
        for (const auto& g : grad) {
            const int idx = w.spline.flat(g.i, g.j, g.k);
            grad_sq[idx] += g.weight * g.weight;
            w.spline.coefficients[idx] -=
                settings.learning_rate * g.weight / std::sqrt(grad_sq[idx] + settings.epsilon);
        }
        ++rep.iterations;
    }

    const auto b3 = betti_at(dia, 0.0);
    const auto b2 = oracle_betti(grid, 0.0);
    rep.betti = b3;
    rep.betti_oracle = b2;
    rep.betti_match = b3[0] == b2[0] && b3[2] == b2[1];
    if (!settings.trace_dir.empty()) {
        std::ofstream csv(std::filesystem::path(settings.trace_dir) / "loss_trace.csv");
        csv << "iteration,loss\n";
        for (size_t i = 0; i < rep.loss_trace.size(); ++i)
            csv << i << "," << rep.loss_trace[i] << "\n";
    }
    rep.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(w), std::move(rep)};
}

}  // namespace topoblend
