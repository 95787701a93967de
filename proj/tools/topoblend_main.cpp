#include <filesystem>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "topoblend/config.hpp"
#include "topoblend/io.hpp"
#include "topoblend/mesh.hpp"

namespace fs = std::filesystem;
using namespace topoblend;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitUnconverged = 3;
constexpr int kExitIo = 4;

struct RunOutputs {
    nlohmann::json report;
    bool converged = true;
};

// Max |final - input| over random probes inside the preserved parts of the
// existing regions (outside every blending region).
nlohmann::json preservation_probes(const BlendProblem& problem, const ScalarField& final_field,
                                   unsigned seed, int count) {
    Aabb domain = problem.ers[0].box();
    for (const Region& er : problem.ers) domain = domain.united(er.box());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double max_err = 0.0;
    int found = 0;
    long attempts = 0;
    const long max_attempts = 200l * count;
    while (found < count && attempts++ < max_attempts) {
        const Vec3 p = domain.lerp({uni(rng), uni(rng), uni(rng)});
        bool in_br = false;
        for (const Region& br : problem.brs) in_br = in_br || br.contains(p);
        if (in_br) continue;
        int owner = -1;
        for (size_t i = 0; i < problem.ers.size(); ++i)
            if (problem.ers[i].contains(p)) {
                owner = int(i);
                break;
            }
        if (owner < 0) continue;
        ScalarField input = normalize_spec(problem.specs[owner]);
        if (problem.clip) input = clip_to_model(input, *problem.clip);
        max_err = std::max(max_err, std::abs(final_field(p) - input(p)));
        ++found;
    }
    return {{"seed", seed}, {"probes", found}, {"max_error", max_err}};
}

int run_pipeline(const std::string& config_path, const std::string& out_dir, bool trace,
                 unsigned seed, bool optimize_enabled) {
    std::string text;
    try {
        text = read_text_file(config_path);
    } catch (const IoError& e) {
        std::cerr << e.what() << "\n";
        return kExitIo;
    }

    Config config;
    BlendProblem problem;
    try {
        config = parse_config(text);
        problem = build_problem(config, fs::path(config_path).parent_path());
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << e.what() << "\n";
        return kExitIo;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    if (!optimize_enabled) problem.settings.max_iters = 0;
    if (trace) problem.settings.trace_dir = (fs::path(out_dir) / "trace").string();

    ScalarField result;
    BlendReport report;
    try {
        std::tie(result, report) = blend_many(problem);
    } catch (const std::exception& e) {
        std::cerr << "blend failed: " << e.what() << "\n";
        return 1;
    }

    try {
        fs::create_directories(out_dir);
        const OutputPlan outputs = output_plan(config);
        Aabb domain = problem.ers[0].box();
        for (const Region& er : problem.ers) domain = domain.united(er.box());
        const FilteredGrid grid = sample_field(result, domain, problem.output_resolution);

        nlohmann::json jreport = nlohmann::json::parse(report_to_json(report));
        jreport["preservation"] = preservation_probes(problem, result, seed, 1000);
        if (!outputs.grid.empty()) export_grid(grid, fs::path(out_dir) / outputs.grid);
        if (!outputs.mesh.empty()) write_obj(fs::path(out_dir) / outputs.mesh, marching_cubes(grid, 0.0));
        if (!outputs.diagram.empty()) {
            const PersistenceDiagram dia = inverse_map(grid, compute_persistence(grid));
            write_text_file(fs::path(out_dir) / outputs.diagram, diagram_to_csv(dia));
        }
        if (!outputs.report.empty())
            write_text_file(fs::path(out_dir) / outputs.report, jreport.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "export failed: " << e.what() << "\n";
        return kExitIo;
    }

    for (size_t i = 0; i < report.stages.size(); ++i) {
        const StageReport& s = report.stages[i];
        std::cout << "stage " << i << ": iterations=" << s.iterations
                  << " loss=" << s.loss_trace.back() << " betti=(" << s.betti[0] << ","
                  << s.betti[1] << "," << s.betti[2] << ")"
                  << (s.converged ? "" : " [unconverged]") << "\n";
    }
    std::cout << "final betti=(" << report.final_betti[0] << "," << report.final_betti[1]
              << "," << report.final_betti[2] << ") oracle=(" << report.final_oracle[0]
              << "," << report.final_oracle[1] << ")\n";

    if (optimize_enabled && !report.converged) {
        std::cerr << "optimization did not reach zero loss (report written)\n";
        return kExitUnconverged;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topology-aware blending of implicit porous structures"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", mesh_out;
    bool trace = false;
    unsigned seed = 0;

    CLI::App* blend = app.add_subcommand("blend", "Run the full blend pipeline");
    blend->add_option("config", config_path, "configuration JSON")->required();
    blend->add_option("--out", out_dir, "output directory");
    blend->add_flag("--trace", trace, "dump per-iteration diagrams and the loss trace");
    blend->add_option("--seed", seed, "seed for the preservation probe sampling");

    CLI::App* analyze = app.add_subcommand(
        "analyze", "Topology report of the initialized blend, no optimization");
    analyze->add_option("config", config_path, "configuration JSON")->required();
    analyze->add_option("--out", out_dir, "output directory");
    analyze->add_option("--seed", seed, "seed for the preservation probe sampling");

    CLI::App* mesh = app.add_subcommand("mesh", "Extract the zero isosurface of a grid file");
    mesh->add_option("grid", config_path, "raw float32 grid (with .json sidecar)")->required();
    mesh->add_option("--out", mesh_out, "output mesh path (.obj or .stl)")->required();

    CLI11_PARSE(app, argc, argv);

    if (blend->parsed()) return run_pipeline(config_path, out_dir, trace, seed, true);
    if (analyze->parsed()) return run_pipeline(config_path, out_dir, false, seed, false);

    // mesh subcommand
    try {
        const FilteredGrid grid = import_grid(config_path);
        const TriangleMesh m = marching_cubes(grid, 0.0);
        const std::string ext = fs::path(mesh_out).extension().string();
        if (ext == ".obj") {
            write_obj(mesh_out, m);
        } else if (ext == ".stl") {
            write_stl(mesh_out, m);
        } else {
            std::cerr << "unsupported mesh format: " << ext << " (use .obj or .stl)\n";
            return kExitConfig;
        }
        std::cout << "wrote " << mesh_out << " (" << m.vertices.size() << " vertices, "
                  << m.triangles.size() << " triangles)\n";
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
