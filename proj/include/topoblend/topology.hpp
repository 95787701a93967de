#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "topoblend/field.hpp"

namespace topoblend {

/// Uniform vertex grid of field samples inducing a cubical sub-level
/// filtration (V-construction: each cube carries the max of its vertices).
struct FilteredGrid {
    std::array<int, 3> dims{0, 0, 0};  // vertices per axis, >= 2 each
    Aabb box;
    std::vector<double> values;  // x-fastest: (k * ny + j) * nx + i

    int vertex_index(int i, int j, int k) const {
        return (k * dims[1] + j) * dims[0] + i;
    }
    double value(int i, int j, int k) const { return values[vertex_index(i, j, k)]; }

    /// Lattice point in space; the lattice spans the box inclusively.
    Vec3 point(int i, int j, int k) const {
        return box.lerp({i / double(dims[0] - 1), j / double(dims[1] - 1),
                         k / double(dims[2] - 1)});
    }
    Vec3 point(const std::array<int, 3>& v) const { return point(v[0], v[1], v[2]); }

    void validate() const;
    std::uint64_t content_hash() const;
};

FilteredGrid sample_field(const ScalarField& phi, const Aabb& box,
                          std::array<int, 3> resolution);

/// Reference to one cube of the complex: dim 0..3, `type` selects the extent
/// axes (edges: the axis; faces: 0=xy, 1=xz, 2=yz), anchor = lowest vertex.
struct CubeRef {
    std::int8_t dim = -1;
    std::int8_t type = 0;
    int i = 0, j = 0, k = 0;
    bool valid() const { return dim >= 0; }
};

struct PersistencePair {
    int dim = 0;
    double birth = 0;
    double death = std::numeric_limits<double>::infinity();
    CubeRef birth_cube, death_cube;
    std::array<int, 3> birth_vertex{-1, -1, -1};
    std::array<int, 3> death_vertex{-1, -1, -1};

    bool essential() const { return std::isinf(death); }
    bool has_vertices() const { return birth_vertex[0] >= 0; }
};

struct PersistenceDiagram {
    std::vector<PersistencePair> pairs;  // sorted by (dim, birth, death)
    std::array<int, 3> resolution{0, 0, 0};
    std::uint64_t grid_hash = 0;

    std::vector<PersistencePair> pairs_of_dim(int k) const;
};

/// Sub-level persistence of the V-construction complex in dims 0, 1, 2.
/// Zero-persistence pairs (birth == death) are not reported. Ties are broken
/// by cube enumeration order, so identical grids give identical diagrams.
PersistenceDiagram compute_persistence(const FilteredGrid& grid);

/// Populate birth/death critical vertices: the lexicographically first vertex
/// of the birth (resp. death) cube attaining its filtration value.
PersistenceDiagram inverse_map(const FilteredGrid& grid, PersistenceDiagram diagram);

/// Betti numbers at threshold t read off the diagram: #{pairs, b <= t < d}.
std::array<int, 3> betti_at(const PersistenceDiagram& diagram, double t);

/// Independent union-find oracle: b0 = 6-connected components of {value <= t};
/// b2 = bounded components of the complement (26-connectivity, the dual
/// adjacency of the V-construction) inside a one-voxel padded box.
std::array<int, 2> oracle_betti(const FilteredGrid& grid, double t);

/// Euler characteristic of the thresholded complex by direct cube counting.
long euler_characteristic(const FilteredGrid& grid, double t);

/// CSV export: dim,birth,death,bx,by,bz,dx,dy,dz ("inf" for essential deaths,
/// empty death-vertex columns for essential pairs).
std::string diagram_to_csv(const PersistenceDiagram& diagram);

}  // namespace topoblend
