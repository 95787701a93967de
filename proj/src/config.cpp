#include "topoblend/config.hpp"

#include <cmath>
#include <numbers>

namespace topoblend {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& expected) {
    throw ConfigError(path, expected);
}

const json& need(const json& j, const std::string& path, const char* key) {
    if (!j.is_object() || !j.contains(key))
        fail(path + "/" + key, "required field is missing");
    return j.at(key);
}

double need_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::string need_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

std::array<double, 3> need_vec3(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) fail(path, "expected an array of 3 numbers");
    std::array<double, 3> v;
    for (int i = 0; i < 3; ++i) v[i] = need_number(j[i], path + "/" + std::to_string(i));
    return v;
}

// ints or a 3-array of ints, normalized to a 3-array
json norm_triple(const json& j, const std::string& path, int minimum) {
    json out = json::array();
    if (j.is_number_integer()) {
        out = {j, j, j};
    } else if (j.is_array() && j.size() == 3) {
        out = j;
    } else {
        fail(path, "expected an integer or an array of 3 integers");
    }
    for (int i = 0; i < 3; ++i) {
        if (!out[i].is_number_integer() || out[i].get<int>() < minimum)
            fail(path + "/" + std::to_string(i),
                 "expected an integer >= " + std::to_string(minimum));
    }
    return out;
}

int axis_from(const json& j, const std::string& path) {
    const std::string s = need_string(j, path);
    if (s == "x") return 0;
    if (s == "y") return 1;
    if (s == "z") return 2;
    fail(path, "expected \"x\", \"y\" or \"z\"");
}

// ---------------------------------------------------------------------------
// Field specifications
// ---------------------------------------------------------------------------

json norm_field(const json& j, const std::string& path);

json norm_field_list(const json& j, const std::string& path, size_t min_count) {
    if (!j.is_array() || j.size() < min_count)
        fail(path, "expected an array of at least " + std::to_string(min_count) +
                       " field specifications");
    json out = json::array();
    for (size_t i = 0; i < j.size(); ++i)
        out.push_back(norm_field(j[i], path + "/" + std::to_string(i)));
    return out;
}

json norm_field(const json& j, const std::string& path) {
    if (j.is_number()) return json{{"type", "constant"}, {"value", j}};
    if (!j.is_object()) fail(path, "expected a field specification object");
    const std::string type = need_string(need(j, path, "type"), path + "/type");
    json out{{"type", type}};
    if (type == "tpms") {
        const std::string kind = need_string(need(j, path, "kind"), path + "/kind");
        try {
            tpms_kind_from_string(kind);
        } catch (const std::domain_error&) {
            fail(path + "/kind", "expected one of \"P\", \"G\", \"D\", \"IWP\"");
        }
        out["kind"] = kind;
        out["periods"] = norm_triple(j.contains("periods") ? j.at("periods") : json(1),
                                     path + "/periods", 1);
    } else if (type == "constant") {
        out["value"] = need_number(need(j, path, "value"), path + "/value");
    } else if (type == "sine_offset") {
        out["axis"] = need_string(need(j, path, "axis"), path + "/axis");
        axis_from(out["axis"], path + "/axis");
        out["along"] = j.contains("along") ? j.at("along") : json("x");
        axis_from(out["along"], path + "/along");
        out["base"] = j.contains("base") ? need_number(j.at("base"), path + "/base") : 0.5;
        out["amplitude"] = need_number(need(j, path, "amplitude"), path + "/amplitude");
        out["frequency"] =
            j.contains("frequency") ? need_number(j.at("frequency"), path + "/frequency") : 1.0;
        out["phase"] = j.contains("phase") ? need_number(j.at("phase"), path + "/phase") : 0.0;
    } else if (type == "sphere") {
        out["center"] = need(j, path, "center");
        need_vec3(out["center"], path + "/center");
        out["radius"] = need_number(need(j, path, "radius"), path + "/radius");
    } else if (type == "half_space") {
        out["normal"] = need(j, path, "normal");
        need_vec3(out["normal"], path + "/normal");
        out["offset"] = need_number(need(j, path, "offset"), path + "/offset");
    } else if (type == "min" || type == "max" || type == "sum") {
        out["of"] = norm_field_list(need(j, path, "of"), path + "/of", 2);
    } else if (type == "negate") {
        out["of"] = norm_field(need(j, path, "of"), path + "/of");
    } else if (type == "offset" || type == "scale") {
        out["of"] = norm_field(need(j, path, "of"), path + "/of");
        out["value"] = need_number(need(j, path, "value"), path + "/value");
    } else {
        fail(path + "/type", "unknown field type \"" + type + "\"");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Region specifications
// ---------------------------------------------------------------------------

json norm_region(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected a region specification object");
    const std::string type = need_string(need(j, path, "type"), path + "/type");
    json out{{"type", type}};
    if (type == "box") {
        out["min"] = need(j, path, "min");
        out["max"] = need(j, path, "max");
        const auto lo = need_vec3(out["min"], path + "/min");
        const auto hi = need_vec3(out["max"], path + "/max");
        for (int i = 0; i < 3; ++i)
            if (!(lo[i] < hi[i])) fail(path, "box min must be strictly below max");
    } else if (type == "half_space") {
        out["normal"] = need(j, path, "normal");
        need_vec3(out["normal"], path + "/normal");
        out["offset"] = need_number(need(j, path, "offset"), path + "/offset");
        out["box"] = j.contains("box") ? j.at("box")
                                       : json{{"min", {0, 0, 0}}, {"max", {1, 1, 1}}};
    } else if (type == "cylinder") {
        out["center"] = need(j, path, "center");
        need_vec3(out["center"], path + "/center");
        out["axis"] = j.contains("axis") ? j.at("axis") : json("z");
        axis_from(out["axis"], path + "/axis");
        out["radius"] = need_number(need(j, path, "radius"), path + "/radius");
        if (out["radius"].get<double>() <= 0) fail(path + "/radius", "expected radius > 0");
        out["box"] = j.contains("box") ? j.at("box")
                                       : json{{"min", {0, 0, 0}}, {"max", {1, 1, 1}}};
    } else if (type == "sphere") {
        out["center"] = need(j, path, "center");
        need_vec3(out["center"], path + "/center");
        out["radius"] = need_number(need(j, path, "radius"), path + "/radius");
        if (out["radius"].get<double>() <= 0) fail(path + "/radius", "expected radius > 0");
    } else if (type == "image") {
        out["path"] = need_string(need(j, path, "path"), path + "/path");
        out["threshold"] = j.contains("threshold") ? j.at("threshold") : json(128);
        if (!out["threshold"].is_number_integer() || out["threshold"].get<int>() < 0 ||
            out["threshold"].get<int>() > 255)
            fail(path + "/threshold", "expected an integer in [0, 255]");
        out["z_range"] = j.contains("z_range") ? j.at("z_range") : json{0.0, 1.0};
        if (!out["z_range"].is_array() || out["z_range"].size() != 2)
            fail(path + "/z_range", "expected [z_lo, z_hi]");
        const std::string which =
            j.contains("which") ? need_string(j.at("which"), path + "/which") : "dark";
        if (which != "dark" && which != "light")
            fail(path + "/which", "expected \"dark\" or \"light\"");
        out["which"] = which;
    } else if (type == "implicit") {
        out["field"] = norm_field(need(j, path, "field"), path + "/field");
        out["box"] = j.contains("box") ? j.at("box")
                                       : json{{"min", {0, 0, 0}}, {"max", {1, 1, 1}}};
    } else if (type == "band") {
        out["field"] = norm_field(need(j, path, "field"), path + "/field");
        out["width"] = need_number(need(j, path, "width"), path + "/width");
        if (out["width"].get<double>() <= 0) fail(path + "/width", "expected width > 0");
        out["box"] = j.contains("box") ? j.at("box")
                                       : json{{"min", {0, 0, 0}}, {"max", {1, 1, 1}}};
    } else if (type == "union" || type == "intersection") {
        const json& of = need(j, path, "of");
        if (!of.is_array() || of.size() < 2)
            fail(path + "/of", "expected an array of at least 2 regions");
        out["of"] = json::array();
        for (size_t i = 0; i < of.size(); ++i)
            out["of"].push_back(norm_region(of[i], path + "/of/" + std::to_string(i)));
    } else if (type == "complement") {
        out["of"] = norm_region(need(j, path, "of"), path + "/of");
    } else if (type == "difference") {
        out["a"] = norm_region(need(j, path, "a"), path + "/a");
        out["b"] = norm_region(need(j, path, "b"), path + "/b");
    } else if (type == "dilate") {
        const json& between = need(j, path, "between");
        if (!between.is_array() || between.size() != 2)
            fail(path + "/between", "expected exactly two regions");
        out["between"] = json::array();
        out["between"].push_back(norm_region(between[0], path + "/between/0"));
        out["between"].push_back(norm_region(between[1], path + "/between/1"));
        out["radius"] = need_number(need(j, path, "radius"), path + "/radius");
        if (out["radius"].get<double>() <= 0) fail(path + "/radius", "expected radius > 0");
        out["grid"] = j.contains("grid") ? j.at("grid") : json(64);
    } else {
        fail(path + "/type", "unknown region type \"" + type + "\"");
    }
    return out;
}

json norm_blend(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected a blend specification object");
    json out;
    const std::string mode =
        j.contains("mode") ? need_string(j.at("mode"), path + "/mode") : "1d";
    if (mode != "1d" && mode != "3d") fail(path + "/mode", "expected \"1d\" or \"3d\"");
    out["mode"] = mode;
    if (mode == "1d") {
        json frame = j.contains("frame") ? j.at("frame") : json{{"kind", "x"}};
        if (!frame.is_object()) fail(path + "/frame", "expected a frame object");
        const std::string kind =
            need_string(need(frame, path + "/frame", "kind"), path + "/frame/kind");
        json nf{{"kind", kind}};
        if (kind == "x" || kind == "y" || kind == "z") {
            // nothing else
        } else if (kind == "cylindrical") {
            nf["axis"] = frame.contains("axis") ? frame.at("axis") : json("z");
            axis_from(nf["axis"], path + "/frame/axis");
            if (frame.contains("center")) {
                nf["center"] = frame.at("center");
                need_vec3(nf["center"], path + "/frame/center");
            }
        } else if (kind == "spherical") {
            if (frame.contains("center")) {
                nf["center"] = frame.at("center");
                need_vec3(nf["center"], path + "/frame/center");
            }
        } else {
            fail(path + "/frame/kind",
                 "expected \"x\", \"y\", \"z\", \"cylindrical\" or \"spherical\"");
        }
        out["frame"] = nf;
        out["coefficients"] = norm_triple(
            j.contains("coefficients") ? j.at("coefficients") : json(50),
            path + "/coefficients", 1);
        out["degree"] =
            norm_triple(j.contains("degree") ? j.at("degree") : json(3), path + "/degree", 0);
        // only the first axis matters for a 1-d weight
        out["coefficients"][1] = 1;
        out["coefficients"][2] = 1;
        out["degree"][1] = 0;
        out["degree"][2] = 0;
    } else {
        out["coefficients"] = norm_triple(
            j.contains("coefficients") ? j.at("coefficients") : json{80, 80, 20},
            path + "/coefficients", 1);
        out["degree"] =
            norm_triple(j.contains("degree") ? j.at("degree") : json(3), path + "/degree", 0);
    }
    for (int a = 0; a < 3; ++a)
        if (out["coefficients"][a].get<int>() < out["degree"][a].get<int>() + 1)
            fail(path + "/coefficients", "coefficient count must be >= degree+1");
    out["fit_grid"] = j.contains("fit_grid") ? j.at("fit_grid") : json(64);
    if (!out["fit_grid"].is_number_integer() || out["fit_grid"].get<int>() < 2)
        fail(path + "/fit_grid", "expected an integer >= 2");
    out["index_grid"] = j.contains("index_grid") ? j.at("index_grid") : json(128);
    if (!out["index_grid"].is_number_integer() || out["index_grid"].get<int>() < 4)
        fail(path + "/index_grid", "expected an integer >= 4");
    return out;
}

}  // namespace

Config parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("/", std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("/", "expected a configuration object");

    json out;

    const json& specs = need(j, "", "specs");
    if (!specs.is_array() || specs.size() < 2)
        fail("/specs", "expected an array of at least 2 porous structures");
    out["specs"] = json::array();
    for (size_t i = 0; i < specs.size(); ++i) {
        const std::string path = "/specs/" + std::to_string(i);
        const json& s = specs[i];
        if (!s.is_object()) fail(path, "expected a structure object");
        json ns;
        ns["field"] = norm_field(need(s, path, "field"), path + "/field");
        const std::string set = need_string(need(s, path, "set"), path + "/set");
        try {
            set_kind_from_string(set);
        } catch (const std::domain_error&) {
            fail(path + "/set", "expected \"pore\", \"rod\" or \"sheet\"");
        }
        ns["set"] = set;
        if (set == "sheet") {
            ns["c1"] = norm_field(need(s, path, "c1"), path + "/c1");
            ns["c2"] = norm_field(need(s, path, "c2"), path + "/c2");
        } else {
            ns["c"] = norm_field(s.contains("c") ? s.at("c") : json(0.0), path + "/c");
        }
        out["specs"].push_back(ns);
    }
    const size_t n_specs = out["specs"].size();

    const json& regions = need(j, "", "regions");
    const json& er = need(regions, "/regions", "er");
    if (!er.is_array() || er.size() != n_specs)
        fail("/regions/er", "expected one existing region per structure (" +
                                std::to_string(n_specs) + ")");
    const json& br = need(regions, "/regions", "br");
    if (!br.is_array() || br.size() != n_specs - 1)
        fail("/regions/br",
             "expected one blending region per adjacent pair (|br| = |specs| - 1 = " +
                 std::to_string(n_specs - 1) + ")");
    out["regions"]["er"] = json::array();
    for (size_t i = 0; i < er.size(); ++i)
        out["regions"]["er"].push_back(norm_region(er[i], "/regions/er/" + std::to_string(i)));
    out["regions"]["br"] = json::array();
    for (size_t i = 0; i < br.size(); ++i)
        out["regions"]["br"].push_back(norm_region(br[i], "/regions/br/" + std::to_string(i)));

    const json blend = j.contains("blend") ? j.at("blend") : json::object();
    if (blend.is_array()) {
        if (blend.size() != n_specs - 1)
            fail("/blend", "per-stage blend list must have one entry per blending region");
        out["blend"] = json::array();
        for (size_t i = 0; i < blend.size(); ++i)
            out["blend"].push_back(norm_blend(blend[i], "/blend/" + std::to_string(i)));
    } else {
        out["blend"] = norm_blend(blend, "/blend");
    }

    const json opt = j.contains("optimize") ? j.at("optimize") : json::object();
    if (!opt.is_object()) fail("/optimize", "expected an object");
    json nopt;
    nopt["learning_rate"] = opt.contains("learning_rate")
                                ? need_number(opt.at("learning_rate"), "/optimize/learning_rate")
                                : 0.05;
    if (nopt["learning_rate"].get<double>() <= 0)
        fail("/optimize/learning_rate", "expected a positive number");
    nopt["epsilon"] =
        opt.contains("epsilon") ? need_number(opt.at("epsilon"), "/optimize/epsilon") : 1e-8;
    nopt["max_iters"] = opt.contains("max_iters") ? opt.at("max_iters") : json(30);
    if (!nopt["max_iters"].is_number_integer() || nopt["max_iters"].get<int>() < 0)
        fail("/optimize/max_iters", "expected an integer >= 0");
    nopt["resolution"] = norm_triple(
        opt.contains("resolution") ? opt.at("resolution") : json{50, 50, 50},
        "/optimize/resolution", 2);
    out["optimize"] = nopt;

    if (j.contains("clip")) out["clip"] = norm_field(j.at("clip"), "/clip");

    const json output = j.contains("output") ? j.at("output") : json::object();
    if (!output.is_object()) fail("/output", "expected an object");
    json nout;
    nout["resolution"] = output.contains("resolution")
                             ? norm_triple(output.at("resolution"), "/output/resolution", 2)
                             : nopt["resolution"];
    auto name = [&](const char* key, const char* fallback) {
        if (!output.contains(key)) return json(fallback);
        if (!output.at(key).is_string())
            fail(std::string("/output/") + key, "expected a file name string");
        return output.at(key);
    };
    nout["mesh"] = name("mesh", "blend.obj");
    nout["grid"] = name("grid", "grid.f32");
    nout["diagram"] = name("diagram", "diagram.csv");
    nout["report"] = name("report", "report.json");
    out["output"] = nout;

    return Config{out};
}

std::string serialize_config(const Config& config, int indent) {
    return config.doc.dump(indent) + "\n";
}

namespace {

ScalarField build_field(const json& j, const Aabb& unit) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "tpms") {
        const auto periods = j.at("periods").get<std::array<int, 3>>();
        return tpms(tpms_kind_from_string(j.at("kind").get<std::string>()), periods);
    }
    if (type == "constant") return constant_field(j.at("value").get<double>(), unit);
    if (type == "sine_offset") {
        const int axis = j.at("axis").get<std::string>() == "x"   ? 0
                         : j.at("axis").get<std::string>() == "y" ? 1
                                                                  : 2;
        const int along = j.at("along").get<std::string>() == "x"   ? 0
                          : j.at("along").get<std::string>() == "y" ? 1
                                                                    : 2;
        const double base = j.at("base").get<double>();
        const double amp = j.at("amplitude").get<double>();
        const double freq = j.at("frequency").get<double>();
        const double phase = j.at("phase").get<double>();
        return {[=](const Vec3& p) {
                    return p[axis] - base -
                           amp * std::sin(2.0 * std::numbers::pi * freq * p[along] + phase);
                },
                unit};
    }
    if (type == "sphere") {
        const auto c = j.at("center").get<std::array<double, 3>>();
        const double r = j.at("radius").get<double>();
        return region_sphere({c[0], c[1], c[2]}, r).indicator;
    }
    if (type == "half_space") {
        const auto n = j.at("normal").get<std::array<double, 3>>();
        return region_half_space({n[0], n[1], n[2]}, j.at("offset").get<double>(), unit)
            .indicator;
    }
    if (type == "min" || type == "max" || type == "sum") {
        ScalarField acc = build_field(j.at("of")[0], unit);
        for (size_t i = 1; i < j.at("of").size(); ++i) {
            const ScalarField next = build_field(j.at("of")[i], unit);
            acc = type == "min" ? min_field(acc, next)
                  : type == "max" ? max_field(acc, next)
                                  : sum_field(acc, next);
        }
        return acc;
    }
    if (type == "negate") return negate_field(build_field(j.at("of"), unit));
    if (type == "offset")
        return offset_field(build_field(j.at("of"), unit), j.at("value").get<double>());
    if (type == "scale")
        return scale_field(build_field(j.at("of"), unit), j.at("value").get<double>());
    throw ConfigError("/", "unknown field type (internal)");
}

Aabb box_from(const json& j) {
    const auto lo = j.at("min").get<std::array<double, 3>>();
    const auto hi = j.at("max").get<std::array<double, 3>>();
    return {{lo[0], lo[1], lo[2]}, {hi[0], hi[1], hi[2]}};
}

Region build_region(const json& j, const std::filesystem::path& base_dir, const Aabb& unit) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "box") return region_box(box_from(j));
    if (type == "half_space") {
        const auto n = j.at("normal").get<std::array<double, 3>>();
        return region_half_space({n[0], n[1], n[2]}, j.at("offset").get<double>(),
                                 box_from(j.at("box")));
    }
    if (type == "cylinder") {
        const auto c = j.at("center").get<std::array<double, 3>>();
        const int axis = j.at("axis").get<std::string>() == "x"   ? 0
                         : j.at("axis").get<std::string>() == "y" ? 1
                                                                  : 2;
        Vec3 dir{0, 0, 0};
        dir[axis] = 1.0;
        return region_cylinder({c[0], c[1], c[2]}, dir, j.at("radius").get<double>(),
                               box_from(j.at("box")));
    }
    if (type == "sphere") {
        const auto c = j.at("center").get<std::array<double, 3>>();
        return region_sphere({c[0], c[1], c[2]}, j.at("radius").get<double>());
    }
    if (type == "image") {
        const GrayImage img = read_pgm(base_dir / j.at("path").get<std::string>());
        const auto zr = j.at("z_range").get<std::array<double, 2>>();
        auto [dark, light] =
            image_region(img, std::uint8_t(j.at("threshold").get<int>()), zr[0], zr[1]);
        return j.at("which").get<std::string>() == "dark" ? dark : light;
    }
    if (type == "implicit") {
        ScalarField f = build_field(j.at("field"), box_from(j.at("box")));
        f.box = box_from(j.at("box"));
        return region_from_indicator(f);
    }
    if (type == "band") {
        const double width = j.at("width").get<double>();
        const Aabb box = box_from(j.at("box"));
        ScalarField f = build_field(j.at("field"), box);
        return region_from_indicator(
            {[inner = f.f, width](const Vec3& p) { return std::abs(inner(p)) - width; },
             box});
    }
    if (type == "union" || type == "intersection") {
        Region acc = build_region(j.at("of")[0], base_dir, unit);
        for (size_t i = 1; i < j.at("of").size(); ++i) {
            const Region next = build_region(j.at("of")[i], base_dir, unit);
            acc = type == "union" ? region_union(acc, next) : region_intersection(acc, next);
        }
        return acc;
    }
    if (type == "complement") return region_complement(build_region(j.at("of"), base_dir, unit));
    if (type == "difference")
        return region_difference(build_region(j.at("a"), base_dir, unit),
                                 build_region(j.at("b"), base_dir, unit));
    if (type == "dilate")
        return dilate_region_boundary(build_region(j.at("between")[0], base_dir, unit),
                                      build_region(j.at("between")[1], base_dir, unit),
                                      j.at("radius").get<double>(),
                                      j.at("grid").get<int>());
    throw ConfigError("/", "unknown region type (internal)");
}

InitPlan build_plan(const json& j, const Aabb& domain) {
    InitPlan plan;
    plan.coefficients = j.at("coefficients").get<std::array<int, 3>>();
    plan.degrees = j.at("degree").get<std::array<int, 3>>();
    plan.fit_grid = j.at("fit_grid").get<int>();
    plan.index_grid = j.at("index_grid").get<int>();
    if (j.at("mode").get<std::string>() == "3d") {
        plan.mode = InitPlan::Mode::ThreeDimensional;
        plan.frame = CoordinateFrame::volume();
        return plan;
    }
    plan.mode = InitPlan::Mode::OneDimensional;
    const json& frame = j.at("frame");
    const std::string kind = frame.at("kind").get<std::string>();
    const Vec3 center = frame.contains("center")
                            ? Vec3{frame.at("center")[0].get<double>(),
                                   frame.at("center")[1].get<double>(),
                                   frame.at("center")[2].get<double>()}
                            : domain.center();
    if (kind == "x" || kind == "y" || kind == "z") {
        plan.frame = CoordinateFrame::cartesian(kind == "x" ? 0 : kind == "y" ? 1 : 2);
    } else if (kind == "cylindrical") {
        const std::string a = frame.at("axis").get<std::string>();
        plan.frame = CoordinateFrame::cylindrical(a == "x" ? 0 : a == "y" ? 1 : 2, center);
    } else {
        plan.frame = CoordinateFrame::spherical(center);
    }
    return plan;
}

}  // namespace

BlendProblem build_problem(const Config& config, const std::filesystem::path& base_dir) {
    const json& j = config.doc;
    const Aabb unit{{0, 0, 0}, {1, 1, 1}};

    BlendProblem problem;
    for (const json& r : j.at("regions").at("er"))
        problem.ers.push_back(build_region(r, base_dir, unit));
    for (const json& r : j.at("regions").at("br"))
        problem.brs.push_back(build_region(r, base_dir, unit));

    Aabb domain = problem.ers[0].box();
    for (const Region& er : problem.ers) domain = domain.united(er.box());

    for (const json& s : j.at("specs")) {
        PorousSpec spec;
        spec.kind = set_kind_from_string(s.at("set").get<std::string>());
        spec.base = build_field(s.at("field"), domain);
        spec.base.box = domain;
        if (spec.kind == SetKind::Sheet) {
            spec.c1 = build_field(s.at("c1"), domain);
            spec.c2 = build_field(s.at("c2"), domain);
        } else {
            spec.c = build_field(s.at("c"), domain);
        }
        spec.validate();
        problem.specs.push_back(std::move(spec));
    }

    if (j.at("blend").is_array()) {
        for (const json& b : j.at("blend")) problem.plans.push_back(build_plan(b, domain));
    } else {
        problem.plans.push_back(build_plan(j.at("blend"), domain));
    }

    const json& opt = j.at("optimize");
    problem.settings.learning_rate = opt.at("learning_rate").get<double>();
    problem.settings.epsilon = opt.at("epsilon").get<double>();
    problem.settings.max_iters = opt.at("max_iters").get<int>();
    problem.settings.resolution = opt.at("resolution").get<std::array<int, 3>>();

    if (j.contains("clip")) problem.clip = build_field(j.at("clip"), domain);

    problem.output_resolution = j.at("output").at("resolution").get<std::array<int, 3>>();
    problem.validate();
    return problem;
}

OutputPlan output_plan(const Config& config) {
    const json& out = config.doc.at("output");
    return {out.at("mesh").get<std::string>(), out.at("grid").get<std::string>(),
            out.at("diagram").get<std::string>(), out.at("report").get<std::string>()};
}

}  // namespace topoblend
