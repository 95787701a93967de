#include "topoblend/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace topoblend {

void export_grid(const FilteredGrid& grid, const std::filesystem::path& path) {
    grid.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write grid: " + path.string());
    std::vector<float> payload(grid.values.size());
    for (size_t i = 0; i < payload.size(); ++i) payload[i] = float(grid.values[i]);
    out.write(reinterpret_cast<const char*>(payload.data()),
              std::streamsize(payload.size() * sizeof(float)));
    if (!out) throw IoError("short write: " + path.string());
    out.close();

    nlohmann::json side;
    side["dims"] = grid.dims;
    side["box"] = {{"lo", {grid.box.lo.x, grid.box.lo.y, grid.box.lo.z}},
                   {"hi", {grid.box.hi.x, grid.box.hi.y, grid.box.hi.z}}};
    side["dtype"] = "float32-le";
    side["order"] = "x-fastest";
    write_text_file(path.string() + ".json", side.dump(2) + "\n");
}

FilteredGrid import_grid(const std::filesystem::path& path) {
    nlohmann::json side;
    try {
        side = nlohmann::json::parse(read_text_file(path.string() + ".json"));
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("malformed grid sidecar " + path.string() + ".json: " + e.what());
    }
    FilteredGrid grid;
    try {
        grid.dims = side.at("dims").get<std::array<int, 3>>();
        const auto lo = side.at("box").at("lo").get<std::array<double, 3>>();
        const auto hi = side.at("box").at("hi").get<std::array<double, 3>>();
        grid.box = {{lo[0], lo[1], lo[2]}, {hi[0], hi[1], hi[2]}};
    } catch (const nlohmann::json::exception& e) {
        throw IoError("grid sidecar missing fields: " + std::string(e.what()));
    }

    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open grid: " + path.string());
    const size_t count = size_t(grid.dims[0]) * grid.dims[1] * grid.dims[2];
    std::vector<float> payload(count);
    in.read(reinterpret_cast<char*>(payload.data()), std::streamsize(count * sizeof(float)));
    if (size_t(in.gcount()) != count * sizeof(float))
        throw IoError("truncated grid payload: " + path.string());
    grid.values.assign(payload.begin(), payload.end());
    grid.validate();
    return grid;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + path.string());
    out << text;
    if (!out) throw IoError("short write: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

nlohmann::json stage_to_json(const StageReport& s) {
    return {{"iterations", s.iterations},
            {"converged", s.converged},
            {"loss_trace", s.loss_trace},
            {"seconds", s.seconds},
            {"betti", s.betti},
            {"betti_oracle", s.betti_oracle},
            {"betti_match", s.betti_match},
            {"fit_iterations", s.fit_iterations},
            {"fit_residual", s.fit_residual}};
}

}  // namespace

std::string report_to_json(const BlendReport& report, int indent) {
    nlohmann::json j;
    j["converged"] = report.converged;
    j["betti_match"] = report.betti_match;
    j["final"] = {{"betti", report.final_betti}, {"oracle", report.final_oracle}};
    j["resolution"] = report.resolution;
    j["total_seconds"] = report.total_seconds;
    j["stages"] = nlohmann::json::array();
    for (const auto& s : report.stages) j["stages"].push_back(stage_to_json(s));
    return j.dump(indent) + "\n";
}

}  // namespace topoblend
