#pragma once

#include <filesystem>
#include <vector>

#include "topoblend/topology.hpp"

namespace topoblend {

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;

    void validate() const;
};

/// Isosurface {value = iso} of the grid by per-cell case triangulation with
/// linear interpolation along crossed lattice edges. Face crossings are
/// paired so neighboring cells agree (diagonal ambiguities keep the inside
/// corners separated), and output is deterministic for identical grids.
TriangleMesh marching_cubes(const FilteredGrid& grid, double iso = 0.0);

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);
TriangleMesh read_obj(const std::filesystem::path& path);
void write_stl(const std::filesystem::path& path, const TriangleMesh& mesh);

}  // namespace topoblend
