#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "topoblend/config.hpp"
#include "topoblend/io.hpp"
#include "topoblend/mesh.hpp"

namespace py = pybind11;
using namespace topoblend;

namespace {

Aabb box_from(std::pair<std::array<double, 3>, std::array<double, 3>> box) {
    return {{box.first[0], box.first[1], box.first[2]},
            {box.second[0], box.second[1], box.second[2]}};
}

FilteredGrid grid_from_array(const py::array_t<double, py::array::c_style>& values,
                             std::pair<std::array<double, 3>, std::array<double, 3>> box) {
    if (values.ndim() != 3) throw std::domain_error("expected a 3-d array (z, y, x)");
    FilteredGrid g;
    g.dims = {int(values.shape(2)), int(values.shape(1)), int(values.shape(0))};
    g.box = box_from(box);
    g.values.assign(values.data(), values.data() + values.size());
    g.validate();
    return g;
}

py::array_t<double> grid_to_array(const FilteredGrid& g) {
    py::array_t<double> out({g.dims[2], g.dims[1], g.dims[0]});
    std::copy(g.values.begin(), g.values.end(), out.mutable_data());
    return out;
}

py::dict pair_to_dict(const PersistencePair& p) {
    py::dict d;
    d["dim"] = p.dim;
    d["birth"] = p.birth;
    d["death"] = p.death;
    if (p.has_vertices()) {
        d["birth_vertex"] = p.birth_vertex;
        if (!p.essential()) d["death_vertex"] = p.death_vertex;
    }
    return d;
}

py::dict stage_to_dict(const StageReport& s) {
    py::dict d;
    d["iterations"] = s.iterations;
    d["converged"] = s.converged;
    d["loss_trace"] = s.loss_trace;
    d["seconds"] = s.seconds;
    d["betti"] = s.betti;
    d["betti_oracle"] = s.betti_oracle;
    d["betti_match"] = s.betti_match;
    return d;
}

py::dict report_to_dict(const BlendReport& r) {
    py::dict d;
    d["converged"] = r.converged;
    d["betti_match"] = r.betti_match;
    d["final_betti"] = r.final_betti;
    d["final_oracle"] = r.final_oracle;
    d["resolution"] = r.resolution;
    d["total_seconds"] = r.total_seconds;
    py::list stages;
    for (const auto& s : r.stages) stages.append(stage_to_dict(s));
    d["stages"] = stages;
    return d;
}

InitPlan make_plan(const std::string& mode, const std::string& frame,
                   std::array<int, 3> coefficients, std::array<int, 3> degrees,
                   int fit_grid, int index_grid, std::array<double, 3> center) {
    InitPlan plan;
    plan.coefficients = coefficients;
    plan.degrees = degrees;
    plan.fit_grid = fit_grid;
    plan.index_grid = index_grid;
    if (mode == "3d") {
        plan.mode = InitPlan::Mode::ThreeDimensional;
        plan.frame = CoordinateFrame::volume();
        return plan;
    }
    plan.mode = InitPlan::Mode::OneDimensional;
    const Vec3 c{center[0], center[1], center[2]};
    if (frame == "x" || frame == "y" || frame == "z")
        plan.frame = CoordinateFrame::cartesian(frame == "x" ? 0 : frame == "y" ? 1 : 2);
    else if (frame == "cylindrical_x" || frame == "cylindrical_y" || frame == "cylindrical_z")
        plan.frame = CoordinateFrame::cylindrical(frame.back() == 'x'   ? 0
                                                  : frame.back() == 'y' ? 1
                                                                        : 2,
                                                  c);
    else if (frame == "spherical")
        plan.frame = CoordinateFrame::spherical(c);
    else
        throw std::domain_error("unknown frame: " + frame);
    return plan;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Topology-aware blending of implicit porous structures";

    py::class_<ScalarField>(m, "ScalarField")
        .def("__call__",
             [](const ScalarField& f, double x, double y, double z) { return f(x, y, z); })
        .def_property_readonly("box", [](const ScalarField& f) {
            return std::make_pair(std::array<double, 3>{f.box.lo.x, f.box.lo.y, f.box.lo.z},
                                  std::array<double, 3>{f.box.hi.x, f.box.hi.y, f.box.hi.z});
        });

    py::class_<Region>(m, "Region").def("contains", [](const Region& r, double x, double y,
                                                       double z) {
        return r.contains({x, y, z});
    });

    py::class_<PorousSpec>(m, "PorousSpec");
    py::class_<InitPlan>(m, "InitPlan");

    m.def("tpms",
          [](const std::string& kind, std::array<int, 3> periods) {
              return tpms(tpms_kind_from_string(kind), periods);
          },
          py::arg("kind"), py::arg("periods") = std::array<int, 3>{1, 1, 1});
    m.def("constant_field", [](double c) { return constant_field(c, {{0, 0, 0}, {1, 1, 1}}); });
    m.def("offset_field", &offset_field);
    m.def("scale_field", &scale_field);
    m.def("min_field", &min_field);
    m.def("max_field", &max_field);
    m.def("clip_to_model", &clip_to_model);

    m.def("rod", [](const ScalarField& base, double c) {
        return PorousSpec{SetKind::Rod, base, constant_field(c, base.box), {}, {}};
    });
    m.def("pore", [](const ScalarField& base, double c) {
        return PorousSpec{SetKind::Pore, base, constant_field(c, base.box), {}, {}};
    });
    m.def("sheet", [](const ScalarField& base, double c1, double c2) {
        return PorousSpec{SetKind::Sheet, base, {}, constant_field(c1, base.box),
                          constant_field(c2, base.box)};
    });
    m.def("normalize_spec", &normalize_spec);

    m.def("box_region",
          [](std::array<double, 3> lo, std::array<double, 3> hi) {
              return region_box({{lo[0], lo[1], lo[2]}, {hi[0], hi[1], hi[2]}});
          });
    m.def("sphere_region", [](std::array<double, 3> c, double r) {
        return region_sphere({c[0], c[1], c[2]}, r);
    });
    m.def("cylinder_region",
          [](std::array<double, 3> c, std::array<double, 3> axis, double r,
             std::pair<std::array<double, 3>, std::array<double, 3>> box) {
              return region_cylinder({c[0], c[1], c[2]}, {axis[0], axis[1], axis[2]}, r,
                                     box_from(box));
          });
    m.def("field_region",
          [](const ScalarField& f,
             std::pair<std::array<double, 3>, std::array<double, 3>> box) {
              ScalarField g = f;
              g.box = box_from(box);
              return region_from_indicator(g);
          });
    m.def("region_union", &region_union);
    m.def("region_intersection", &region_intersection);
    m.def("region_complement", &region_complement);
    m.def("dilate_region_boundary", &dilate_region_boundary, py::arg("a"), py::arg("b"),
          py::arg("radius"), py::arg("grid_resolution") = 64);

    m.def("init_plan", &make_plan, py::arg("mode") = "1d", py::arg("frame") = "x",
          py::arg("coefficients") = std::array<int, 3>{50, 1, 1},
          py::arg("degrees") = std::array<int, 3>{3, 0, 0}, py::arg("fit_grid") = 64,
          py::arg("index_grid") = 128,
          py::arg("center") = std::array<double, 3>{0.5, 0.5, 0.5});

    m.def(
        "blend",
        [](std::vector<PorousSpec> specs, std::vector<Region> ers, std::vector<Region> brs,
           const InitPlan& plan, std::array<int, 3> resolution, int max_iters,
           double learning_rate, std::array<int, 3> output_resolution) {
            BlendProblem prob;
            prob.specs = std::move(specs);
            prob.ers = std::move(ers);
            prob.brs = std::move(brs);
            prob.plans = {plan};
            prob.settings.resolution = resolution;
            prob.settings.max_iters = max_iters;
            prob.settings.learning_rate = learning_rate;
            prob.output_resolution = output_resolution;
            auto [field, report] = blend_many(prob);
            return std::make_pair(field, report_to_dict(report));
        },
        py::arg("specs"), py::arg("ers"), py::arg("brs"), py::arg("plan"),
        py::arg("resolution") = std::array<int, 3>{50, 50, 50}, py::arg("max_iters") = 30,
        py::arg("learning_rate") = 0.05,
        py::arg("output_resolution") = std::array<int, 3>{50, 50, 50});

    m.def(
        "sample_field",
        [](const ScalarField& f, std::pair<std::array<double, 3>, std::array<double, 3>> box,
           std::array<int, 3> resolution) {
            return grid_to_array(sample_field(f, box_from(box), resolution));
        },
        py::arg("field"), py::arg("box"), py::arg("resolution"),
        "Sample onto a (z, y, x) array over the box");

    m.def(
        "persistence",
        [](const py::array_t<double, py::array::c_style>& values,
           std::pair<std::array<double, 3>, std::array<double, 3>> box) {
            const FilteredGrid g = grid_from_array(values, box);
            const PersistenceDiagram dia = inverse_map(g, compute_persistence(g));
            py::list out;
            for (const auto& p : dia.pairs) out.append(pair_to_dict(p));
            return out;
        },
        py::arg("values"),
        py::arg("box") = std::make_pair(std::array<double, 3>{0, 0, 0},
                                        std::array<double, 3>{1, 1, 1}));

    m.def(
        "betti",
        [](const py::array_t<double, py::array::c_style>& values, double t) {
            FilteredGrid g = grid_from_array(
                values, {std::array<double, 3>{0, 0, 0}, std::array<double, 3>{1, 1, 1}});
            return betti_at(compute_persistence(g), t);
        },
        py::arg("values"), py::arg("t") = 0.0);

    m.def(
        "oracle_betti",
        [](const py::array_t<double, py::array::c_style>& values, double t) {
            FilteredGrid g = grid_from_array(
                values, {std::array<double, 3>{0, 0, 0}, std::array<double, 3>{1, 1, 1}});
            return oracle_betti(g, t);
        },
        py::arg("values"), py::arg("t") = 0.0);

    m.def(
        "marching_cubes",
        [](const py::array_t<double, py::array::c_style>& values,
           std::pair<std::array<double, 3>, std::array<double, 3>> box, double iso) {
            const TriangleMesh mesh = marching_cubes(grid_from_array(values, box), iso);
            py::array_t<double> verts({int(mesh.vertices.size()), 3});
            for (size_t i = 0; i < mesh.vertices.size(); ++i) {
                verts.mutable_at(i, 0) = mesh.vertices[i].x;
                verts.mutable_at(i, 1) = mesh.vertices[i].y;
                verts.mutable_at(i, 2) = mesh.vertices[i].z;
            }
            py::array_t<int> tris({int(mesh.triangles.size()), 3});
            for (size_t i = 0; i < mesh.triangles.size(); ++i)
                for (int k = 0; k < 3; ++k) tris.mutable_at(i, k) = mesh.triangles[i][k];
            return std::make_pair(verts, tris);
        },
        py::arg("values"),
        py::arg("box") = std::make_pair(std::array<double, 3>{0, 0, 0},
                                        std::array<double, 3>{1, 1, 1}),
        py::arg("iso") = 0.0);

    m.def(
        "run_config",
        [](const std::string& text, const std::string& base_dir) {
            const Config config = parse_config(text);
            const BlendProblem problem = build_problem(config, base_dir);
            auto [field, report] = blend_many(problem);
            return std::make_pair(field, report_to_dict(report));
        },
        py::arg("text"), py::arg("base_dir") = ".",
        "Run a JSON configuration; returns (field, report)");

    py::class_<SplineVolume>(m, "SplineVolume")
        .def("__call__", [](const SplineVolume& s, double u, double v, double w) {
            return s.eval(u, v, w);
        })
        .def("to_json", [](const SplineVolume& s) { return to_json_string(s); })
        .def_static("from_json", &spline_from_json_string)
        .def_property_readonly("counts", &SplineVolume::counts);
}
