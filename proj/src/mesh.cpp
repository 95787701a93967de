#include "topoblend/mesh.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace topoblend {

void TriangleMesh::validate() const {
    const int n = static_cast<int>(vertices.size());
    for (const auto& t : triangles)
        for (int idx : t)
            if (idx < 0 || idx >= n)
                throw std::domain_error("TriangleMesh: triangle index out of range");
}

namespace {

// Unit-cube corners 0..7 (x, y, z bits) and the 12 edges between them.
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                              {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};
// Faces listed with corners counterclockwise as seen from outside the cube.
constexpr int kFace[6][4] = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                             {2, 3, 7, 6}, {0, 4, 7, 3}, {1, 2, 6, 5}};

int edge_between(int a, int b) {
    for (int e = 0; e < 12; ++e)
        if ((kEdge[e][0] == a && kEdge[e][1] == b) || (kEdge[e][0] == b && kEdge[e][1] == a))
            return e;
    return -1;
}

// Per-configuration triangulation in edge-id space, derived once at startup.
// On every face, crossings are paired by walking the inside-corner runs, so
// two cells sharing a face always emit matching boundary segments.
struct CaseTable {
    std::vector<std::array<int, 3>> tris[256];

    CaseTable() {
        for (int config = 0; config < 256; ++config) {
            auto inside = [&](int corner) { return (config >> corner) & 1; };
            int next_edge[12];
            for (int& e : next_edge) e = -1;
            for (const auto& face : kFace) {
                // Maximal runs of inside corners along the face boundary; each
                // run contributes one segment directed exit -> entry, keeping
                // the solid on the left seen from outside.
                for (int s = 0; s < 4; ++s) {
                    if (!inside(face[s]) || inside(face[(s + 3) % 4])) continue;
                    int e = s;  // run start; extend while inside
                    while (inside(face[(e + 1) % 4])) e = (e + 1) % 4;
                    const int entry = edge_between(face[(s + 3) % 4], face[s]);
                    const int exit = edge_between(face[e], face[(e + 1) % 4]);
                    next_edge[exit] = entry;
                }
            }
            bool used[12] = {};
            for (int start = 0; start < 12; ++start) {
                if (next_edge[start] < 0 || used[start]) continue;
                std::vector<int> loop;
                int e = start;
                do {
                    loop.push_back(e);
                    used[e] = true;
                    e = next_edge[e];
                } while (e != start);
                // Reversed fan so triangle normals point out of the solid
                // {value <= iso}.
                for (size_t i = 1; i + 1 < loop.size(); ++i)
                    tris[config].push_back({loop[0], int(loop[i + 1]), int(loop[i])});
            }
        }
    }
};

const CaseTable& case_table() {
    static const CaseTable table;
    return table;
}

}  // namespace

TriangleMesh marching_cubes(const FilteredGrid& grid, double iso) {
    grid.validate();
    const CaseTable& table = case_table();
    const int nx = grid.dims[0], ny = grid.dims[1], nz = grid.dims[2];

    TriangleMesh mesh;
    // Global lattice-edge key -> mesh vertex, so neighbors share vertices.
    std::unordered_map<long long, int> edge_vertex;
    auto vertex_on = [&](int i0, int j0, int k0, int i1, int j1, int k1) {
        const long long a = grid.vertex_index(i0, j0, k0);
        const long long b = grid.vertex_index(i1, j1, k1);
        const long long key = std::min(a, b) * (long long)grid.values.size() + std::max(a, b);
        auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;
        const double v0 = grid.value(i0, j0, k0), v1 = grid.value(i1, j1, k1);
        double t = v1 != v0 ? (iso - v0) / (v1 - v0) : 0.5;
        t = std::clamp(t, 0.0, 1.0);
        const Vec3 p0 = grid.point(i0, j0, k0), p1 = grid.point(i1, j1, k1);
        mesh.vertices.push_back(p0 + (p1 - p0) * t);
        const int id = int(mesh.vertices.size()) - 1;
        edge_vertex.emplace(key, id);
        return id;
    };

    for (int k = 0; k + 1 < nz; ++k)
        for (int j = 0; j + 1 < ny; ++j)
            for (int i = 0; i + 1 < nx; ++i) {
                int config = 0;
                for (int c = 0; c < 8; ++c)
                    if (grid.value(i + kCorner[c][0], j + kCorner[c][1],
                                   k + kCorner[c][2]) <= iso)
                        config |= 1 << c;
                if (config == 0 || config == 255) continue;
                int verts[12];
                for (int e = 0; e < 12; ++e) verts[e] = -1;
                for (const auto& tri : table.tris[config]) {
                    std::array<int, 3> ids;
                    for (int t = 0; t < 3; ++t) {
                        const int e = tri[t];
                        if (verts[e] < 0) {
                            const int* c0 = kCorner[kEdge[e][0]];
                            const int* c1 = kCorner[kEdge[e][1]];
                            verts[e] = vertex_on(i + c0[0], j + c0[1], k + c0[2],
                                                 i + c1[0], j + c1[1], k + c1[2]);
                        }
                        ids[t] = verts[e];
                    }
                    const Vec3& a = mesh.vertices[ids[0]];
                    const Vec3& b = mesh.vertices[ids[1]];
                    const Vec3& c = mesh.vertices[ids[2]];
                    if ((b - a).cross(c - a).norm() * 0.5 <= 1e-12) continue;
                    mesh.triangles.push_back(ids);
                }
            }
    return mesh;
}

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
    mesh.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write mesh: " + path.string());
    char line[128];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(line, sizeof(line), "v %.17g %.17g %.17g\n", v.x, v.y, v.z);
        out << line;
    }
    for (const auto& t : mesh.triangles)
        out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
    if (!out) throw std::runtime_error("short write: " + path.string());
}

TriangleMesh read_obj(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mesh: " + path.string());
    TriangleMesh mesh;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            Vec3 v;
            ss >> v.x >> v.y >> v.z;
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::array<int, 3> t;
            for (int& idx : t) {
                std::string tok;
                ss >> tok;
                idx = std::stoi(tok.substr(0, tok.find('/'))) - 1;
            }
            mesh.triangles.push_back(t);
        }
    }
    mesh.validate();
    return mesh;
}

void write_stl(const std::filesystem::path& path, const TriangleMesh& mesh) {
    mesh.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write mesh: " + path.string());
    char header[80] = {};
    std::strncpy(header, "binary STL", sizeof(header) - 1);
    out.write(header, sizeof(header));
    const std::uint32_t count = static_cast<std::uint32_t>(mesh.triangles.size());
    out.write(reinterpret_cast<const char*>(&count), 4);
    for (const auto& t : mesh.triangles) {
        const Vec3& a = mesh.vertices[t[0]];
        const Vec3& b = mesh.vertices[t[1]];
        const Vec3& c = mesh.vertices[t[2]];
        Vec3 n = (b - a).cross(c - a);
        const double len = n.norm();
        if (len > 0) n = n * (1.0 / len);
        float data[12] = {float(n.x), float(n.y), float(n.z), float(a.x),
                          float(a.y), float(a.z), float(b.x), float(b.y),
                          float(b.z), float(c.x), float(c.y), float(c.z)};
        out.write(reinterpret_cast<const char*>(data), sizeof(data));
        const std::uint16_t attr = 0;
        out.write(reinterpret_cast<const char*>(&attr), 2);
    }
    if (!out) throw std::runtime_error("short write: " + path.string());
}

}  // namespace topoblend
