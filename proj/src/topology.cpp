#include "topoblend/topology.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace topoblend {

void FilteredGrid::validate() const {
    if (dims[0] < 2 || dims[1] < 2 || dims[2] < 2)
        throw std::domain_error("FilteredGrid: resolution must be >= 2 per axis");
    if (values.size() != size_t(dims[0]) * dims[1] * dims[2])
        throw std::domain_error("FilteredGrid: value count does not match resolution");
    for (double v : values)
        if (!std::isfinite(v)) throw std::domain_error("FilteredGrid: non-finite value");
}

std::uint64_t FilteredGrid::content_hash() const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    auto mix = [&h](const void* data, size_t n) {
        const auto* b = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    mix(dims.data(), sizeof(dims));
    mix(values.data(), values.size() * sizeof(double));
    return h;
}

FilteredGrid sample_field(const ScalarField& phi, const Aabb& box,
                          std::array<int, 3> resolution) {
    if (resolution[0] < 2 || resolution[1] < 2 || resolution[2] < 2)
        throw std::domain_error("sample_field: resolution must be >= 2 per axis");
    FilteredGrid g;
    g.dims = resolution;
    g.box = box;
    g.values.resize(size_t(resolution[0]) * resolution[1] * resolution[2]);
    for (int k = 0; k < resolution[2]; ++k)
        for (int j = 0; j < resolution[1]; ++j)
            for (int i = 0; i < resolution[0]; ++i) {
                const Vec3 p = g.point(i, j, k);
                const double v = phi(p);
                if (!std::isfinite(v)) {
                    std::ostringstream msg;
                    msg << "sample_field: non-finite value at (" << p.x << ", " << p.y
                        << ", " << p.z << ")";
                    throw std::domain_error(msg.str());
                }
                g.values[g.vertex_index(i, j, k)] = v;
            }
    return g;
}

std::vector<PersistencePair> PersistenceDiagram::pairs_of_dim(int k) const {
    std::vector<PersistencePair> out;
    for (const auto& p : pairs)
        if (p.dim == k) out.push_back(p);
    return out;
}

namespace {

// Enumeration of the cubes of the grid complex. Edges carry their extent axis
// as `type`; faces use 0=xy, 1=xz, 2=yz.
struct GridTopo {
    int nx, ny, nz;
    const std::vector<double>& vals;

    long e0, e1, e2, f0, f1, f2;

    explicit GridTopo(const FilteredGrid& g)
        : nx(g.dims[0]), ny(g.dims[1]), nz(g.dims[2]), vals(g.values) {
        e0 = long(nx - 1) * ny * nz;
        e1 = long(nx) * (ny - 1) * nz;
        e2 = long(nx) * ny * (nz - 1);
        f0 = long(nx - 1) * (ny - 1) * nz;
        f1 = long(nx - 1) * ny * (nz - 1);
        f2 = long(nx) * (ny - 1) * (nz - 1);
    }

    long n_vertices() const { return long(nx) * ny * nz; }
    long n_edges() const { return e0 + e1 + e2; }
    long n_faces() const { return f0 + f1 + f2; }
    long n_cells() const { return long(nx - 1) * (ny - 1) * (nz - 1); }

    long vid(int i, int j, int k) const { return (long(k) * ny + j) * nx + i; }

    long edge_id(int axis, int i, int j, int k) const {
        switch (axis) {
            case 0: return (long(k) * ny + j) * (nx - 1) + i;
            case 1: return e0 + (long(k) * (ny - 1) + j) * nx + i;
            default: return e0 + e1 + (long(k) * ny + j) * nx + i;
        }
    }
    CubeRef edge_ref(long id) const {
        CubeRef c;
        c.dim = 1;
        if (id < e0) {
            c.type = 0;
            c.i = int(id % (nx - 1)); id /= (nx - 1);
            c.j = int(id % ny); c.k = int(id / ny);
        } else if (id < e0 + e1) {
            id -= e0;
            c.type = 1;
            c.i = int(id % nx); id /= nx;
            c.j = int(id % (ny - 1)); c.k = int(id / (ny - 1));
        } else {
            id -= e0 + e1;
            c.type = 2;
            c.i = int(id % nx); id /= nx;
            c.j = int(id % ny); c.k = int(id / ny);
        }
        return c;
    }

    long face_id(int type, int i, int j, int k) const {
        switch (type) {
            case 0: return (long(k) * (ny - 1) + j) * (nx - 1) + i;
            case 1: return f0 + (long(k) * ny + j) * (nx - 1) + i;
            default: return f0 + f1 + (long(k) * (ny - 1) + j) * nx + i;
        }
    }
    CubeRef face_ref(long id) const {
        CubeRef c;
        c.dim = 2;
        if (id < f0) {
            c.type = 0;
            c.i = int(id % (nx - 1)); id /= (nx - 1);
            c.j = int(id % (ny - 1)); c.k = int(id / (ny - 1));
        } else if (id < f0 + f1) {
            id -= f0;
            c.type = 1;
            c.i = int(id % (nx - 1)); id /= (nx - 1);
            c.j = int(id % ny); c.k = int(id / ny);
        } else {
            id -= f0 + f1;
            c.type = 2;
            c.i = int(id % nx); id /= nx;
            c.j = int(id % (ny - 1)); c.k = int(id / (ny - 1));
        }
        return c;
    }

    CubeRef cell_ref(long id) const {
        CubeRef c;
        c.dim = 3;
        c.i = int(id % (nx - 1)); id /= (nx - 1);
        c.j = int(id % (ny - 1)); c.k = int(id / (ny - 1));
        return c;
    }

    // Vertex linear ids of a cube, in increasing order.
    int cube_vertices(const CubeRef& c, long out[8]) const {
        const long v = vid(c.i, c.j, c.k);
        const long dx = 1, dy = nx, dz = long(nx) * ny;
        switch (c.dim) {
            case 0: out[0] = v; return 1;
            case 1: {
                const long d = c.type == 0 ? dx : (c.type == 1 ? dy : dz);
                out[0] = v; out[1] = v + d;
                return 2;
            }
            case 2: {
                long da, db;
                if (c.type == 0) { da = dx; db = dy; }
                else if (c.type == 1) { da = dx; db = dz; }
                else { da = dy; db = dz; }
                out[0] = v; out[1] = v + da; out[2] = v + db; out[3] = v + da + db;
                return 4;
            }
            default:
                out[0] = v; out[1] = v + dx; out[2] = v + dy; out[3] = v + dx + dy;
                out[4] = v + dz; out[5] = v + dz + dx; out[6] = v + dz + dy;
                out[7] = v + dz + dx + dy;
                return 8;
        }
    }

    double cube_value(const CubeRef& c) const {
        long vs[8];
        const int n = cube_vertices(c, vs);
        double m = vals[vs[0]];
        for (int t = 1; t < n; ++t) m = std::max(m, vals[vs[t]]);
        return m;
    }

    // First vertex (lowest linear index) attaining the cube's value.
    long critical_vertex(const CubeRef& c) const {
        long vs[8];
        const int n = cube_vertices(c, vs);
        long best = vs[0];
        double m = vals[vs[0]];
        for (int t = 1; t < n; ++t)
            if (vals[vs[t]] > m) { m = vals[vs[t]]; best = vs[t]; }
        return best;
    }

    void face_edges(const CubeRef& f, long out[4]) const {
        const int i = f.i, j = f.j, k = f.k;
        switch (f.type) {
            case 0:
                out[0] = edge_id(0, i, j, k); out[1] = edge_id(0, i, j + 1, k);
                out[2] = edge_id(1, i, j, k); out[3] = edge_id(1, i + 1, j, k);
                break;
            case 1:
                out[0] = edge_id(0, i, j, k); out[1] = edge_id(0, i, j, k + 1);
                out[2] = edge_id(2, i, j, k); out[3] = edge_id(2, i + 1, j, k);
                break;
            default:
                out[0] = edge_id(1, i, j, k); out[1] = edge_id(1, i, j, k + 1);
                out[2] = edge_id(2, i, j, k); out[3] = edge_id(2, i, j + 1, k);
        }
    }

    void cell_faces(const CubeRef& c, long out[6]) const {
        const int i = c.i, j = c.j, k = c.k;
        out[0] = face_id(0, i, j, k); out[1] = face_id(0, i, j, k + 1);
        out[2] = face_id(1, i, j, k); out[3] = face_id(1, i, j + 1, k);
        out[4] = face_id(2, i, j, k); out[5] = face_id(2, i + 1, j, k);
    }

    std::array<int, 3> vertex_coords(long v) const {
        const int i = int(v % nx);
        const int j = int((v / nx) % ny);
        const int k = int(v / (long(nx) * ny));
        return {i, j, k};
    }
};

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(long n) : parent(n, -1) {}
    int find(int a) {
        int r = a;
        while (parent[r] >= 0) r = parent[r];
        while (parent[a] >= 0) { int next = parent[a]; parent[a] = r; a = next; }
        return r;
    }
    void attach(int child_root, int new_root) { parent[child_root] = new_root; }
};

// XOR of two sorted index lists (symmetric difference) into `out`.
void xor_merge(std::vector<std::int32_t>& col, const std::vector<std::int32_t>& other,
               std::vector<std::int32_t>& out) {
    out.clear();
    size_t a = 0, b = 0;
    while (a < col.size() && b < other.size()) {
        if (col[a] < other[b]) out.push_back(col[a++]);
        else if (other[b] < col[a]) out.push_back(other[b++]);
        else { ++a; ++b; }
    }
    out.insert(out.end(), col.begin() + a, col.end());
    out.insert(out.end(), other.begin() + b, other.end());
    col.swap(out);
}

// Column reduction of one boundary operator block. `boundary(col_id, out)`
// writes the row ids of column `col_id`; rows/columns are ranked by their
// filtration order. Reports each pivot pairing via `on_pair(row_id, col_id)`.
template <typename BoundaryFn, typename PairFn>
void reduce_block(const std::vector<long>& col_order, const std::vector<char>& skip,
                  const std::vector<std::int32_t>& row_rank, long n_rows,
                  int entries_per_col, BoundaryFn boundary, PairFn on_pair) {
    std::vector<std::vector<std::int32_t>> cols;
    cols.reserve(col_order.size());
    std::vector<std::int32_t> owner(n_rows, -1);
    std::vector<std::int32_t> work, scratch;
    std::vector<long> rows(entries_per_col);
    for (size_t ci = 0; ci < col_order.size(); ++ci) {
        const long col_id = col_order[ci];
        work.clear();
        if (!skip.empty() && skip[col_id]) {
            cols.emplace_back();  // cleared: known to reduce to zero
            continue;
        }
        boundary(col_id, rows.data());
        for (int t = 0; t < entries_per_col; ++t) work.push_back(row_rank[rows[t]]);
        std::sort(work.begin(), work.end());
        while (!work.empty()) {
            const std::int32_t piv = work.back();
            const std::int32_t own = owner[piv];
            if (own < 0) {
                owner[piv] = static_cast<std::int32_t>(ci);
                on_pair(piv, col_id);
                break;
            }
            xor_merge(work, cols[own], scratch);
        }
        cols.push_back(work);
    }
}

}  // namespace

PersistenceDiagram compute_persistence(const FilteredGrid& grid) {
    grid.validate();
    const GridTopo topo(grid);
    PersistenceDiagram dia;
    dia.resolution = grid.dims;
    dia.grid_hash = grid.content_hash();

    const long V = topo.n_vertices(), E = topo.n_edges(), F = topo.n_faces(),
               C = topo.n_cells();

    // Cube filtration values.
    std::vector<double> evals(E), fvals(F), cvals(C);
    for (long e = 0; e < E; ++e) evals[e] = topo.cube_value(topo.edge_ref(e));
    for (long f = 0; f < F; ++f) fvals[f] = topo.cube_value(topo.face_ref(f));
    for (long c = 0; c < C; ++c) cvals[c] = topo.cube_value(topo.cell_ref(c));

    auto sorted_ids = [](long n, const std::vector<double>& v) {
        std::vector<long> order(n);
        std::iota(order.begin(), order.end(), 0l);
        std::sort(order.begin(), order.end(), [&](long a, long b) {
            return v[a] != v[b] ? v[a] < v[b] : a < b;
        });
        return order;
    };
    const std::vector<long> eorder = sorted_ids(E, evals);
    const std::vector<long> forder = sorted_ids(F, fvals);
    const std::vector<long> corder = sorted_ids(C, cvals);

    // --- dimension 0: union-find over the vertex-edge graph -----------------
    {
        DisjointSet ds(V);
        auto elder = [&](int a, int b) {  // true if a is older than b
            return grid.values[a] != grid.values[b] ? grid.values[a] < grid.values[b]
                                                    : a < b;
        };
        for (long e : eorder) {
            const CubeRef er = topo.edge_ref(e);
            long vs[8];
            topo.cube_vertices(er, vs);
            int r0 = ds.find(int(vs[0])), r1 = ds.find(int(vs[1]));
            if (r0 == r1) continue;
            if (!elder(r0, r1)) std::swap(r0, r1);  // r0 old, r1 young
            const double b = grid.values[r1], d = evals[e];
            if (b < d) {
                PersistencePair p;
                p.dim = 0;
                p.birth = b;
                p.death = d;
                p.birth_cube = CubeRef{0, 0, 0, 0, 0};
                const auto bc = topo.vertex_coords(r1);
                p.birth_cube.i = bc[0]; p.birth_cube.j = bc[1]; p.birth_cube.k = bc[2];
                p.death_cube = er;
                dia.pairs.push_back(p);
            }
            ds.attach(r1, r0);
        }
        const int root = ds.find(0);
        PersistencePair ess;
        ess.dim = 0;
        ess.birth = grid.values[root];
        ess.birth_cube = CubeRef{0, 0, 0, 0, 0};
        const auto rc = topo.vertex_coords(root);
        ess.birth_cube.i = rc[0]; ess.birth_cube.j = rc[1]; ess.birth_cube.k = rc[2];
        dia.pairs.push_back(ess);
    }

    // Row ranks (position in the sorted order of the same dimension).
    std::vector<std::int32_t> erank(E), frank(F);
    for (size_t r = 0; r < eorder.size(); ++r) erank[eorder[r]] = std::int32_t(r);
    for (size_t r = 0; r < forder.size(); ++r) frank[forder[r]] = std::int32_t(r);

    // --- dimension 2: reduce cell boundaries --------------------------------
    std::vector<char> positive_face(F, 0);
    reduce_block(
        corder, {}, frank, F, 6,
        [&](long cell, long* rows) { topo.cell_faces(topo.cell_ref(cell), rows); },
        [&](std::int32_t face_rank, long cell) {
            const long face = forder[face_rank];
            positive_face[face] = 1;
            if (fvals[face] < cvals[cell]) {
                PersistencePair p;
                p.dim = 2;
                p.birth = fvals[face];
                p.death = cvals[cell];
                p.birth_cube = topo.face_ref(face);
                p.death_cube = topo.cell_ref(cell);
                dia.pairs.push_back(p);
            }
        });

    // --- dimension 1: reduce face boundaries, clearing the positive faces ---
    reduce_block(
        forder, positive_face, erank, E, 4,
        [&](long face, long* rows) { topo.face_edges(topo.face_ref(face), rows); },
        [&](std::int32_t edge_rank, long face) {
            const long edge = eorder[edge_rank];
            if (evals[edge] < fvals[face]) {
                PersistencePair p;
                p.dim = 1;
                p.birth = evals[edge];
                p.death = fvals[face];
                p.birth_cube = topo.edge_ref(edge);
                p.death_cube = topo.face_ref(face);
                dia.pairs.push_back(p);
            }
        });

    std::sort(dia.pairs.begin(), dia.pairs.end(), [](const auto& a, const auto& b) {
        if (a.dim != b.dim) return a.dim < b.dim;
        if (a.birth != b.birth) return a.birth < b.birth;
        if (a.death != b.death) return a.death < b.death;
        return std::tie(a.birth_cube.type, a.birth_cube.k, a.birth_cube.j, a.birth_cube.i) <
               std::tie(b.birth_cube.type, b.birth_cube.k, b.birth_cube.j, b.birth_cube.i);
    });
    return dia;
}

PersistenceDiagram inverse_map(const FilteredGrid& grid, PersistenceDiagram diagram) {
    grid.validate();
    if (diagram.grid_hash != grid.content_hash())
        throw std::domain_error("inverse_map: diagram was not produced from this grid");
    const GridTopo topo(grid);
    for (auto& p : diagram.pairs) {
        p.birth_vertex = topo.vertex_coords(topo.critical_vertex(p.birth_cube));
        if (!p.essential())
            p.death_vertex = topo.vertex_coords(topo.critical_vertex(p.death_cube));
    }
    return diagram;
}

std::array<int, 3> betti_at(const PersistenceDiagram& diagram, double t) {
    std::array<int, 3> betti{0, 0, 0};
    for (const auto& p : diagram.pairs)
        if (p.dim <= 2 && p.birth <= t && t < p.death) ++betti[p.dim];
    return betti;
}

std::array<int, 2> oracle_betti(const FilteredGrid& grid, double t) {
    grid.validate();
    const int nx = grid.dims[0], ny = grid.dims[1], nz = grid.dims[2];
    const long V = long(nx) * ny * nz;
    auto inside = [&](long v) { return grid.values[v] <= t; };

    DisjointSet fg(V), bg(V);
    auto unite = [](DisjointSet& ds, long a, long b) {
        const int ra = ds.find(int(a)), rb = ds.find(int(b));
        if (ra != rb) ds.attach(std::max(ra, rb), std::min(ra, rb));
    };

    // Foreground: 6-connectivity. Background: 26-connectivity (the 13 forward
    // offsets), matching the dual adjacency of the V-construction complex.
    static const int bg_off[13][3] = {{1, 0, 0},  {0, 1, 0},  {0, 0, 1},  {1, 1, 0},
                                      {1, -1, 0}, {1, 0, 1},  {1, 0, -1}, {0, 1, 1},
                                      {0, 1, -1}, {1, 1, 1},  {1, 1, -1}, {1, -1, 1},
                                      {1, -1, -1}};
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const long v = grid.vertex_index(i, j, k);
                if (inside(v)) {
                    if (i + 1 < nx && inside(v + 1)) unite(fg, v, v + 1);
                    if (j + 1 < ny && inside(v + nx)) unite(fg, v, v + nx);
                    if (k + 1 < nz && inside(v + long(nx) * ny))
                        unite(fg, v, v + long(nx) * ny);
                } else {
                    for (const auto& o : bg_off) {
                        const int ii = i + o[0], jj = j + o[1], kk = k + o[2];
                        if (ii < 0 || jj < 0 || kk < 0 || ii >= nx || jj >= ny || kk >= nz)
                            continue;
                        const long u = grid.vertex_index(ii, jj, kk);
                        if (!inside(u)) unite(bg, v, u);
                    }
                }
            }

    int b0 = 0;
    std::vector<char> bg_root(V, 0), bg_open(V, 0);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const long v = grid.vertex_index(i, j, k);
                if (inside(v)) {
                    if (fg.find(int(v)) == v) ++b0;
                } else {
                    const int r = bg.find(int(v));
                    bg_root[r] = 1;
                    // Components reaching the grid boundary connect to the
                    // padded outside and are not cavities.
                    if (i == 0 || j == 0 || k == 0 || i == nx - 1 || j == ny - 1 ||
                        k == nz - 1)
                        bg_open[r] = 1;
                }
            }
    int b2 = 0;
    for (long v = 0; v < V; ++v)
        if (bg_root[v] && !bg_open[v]) ++b2;
    return {b0, b2};
}

long euler_characteristic(const FilteredGrid& grid, double t) {
    grid.validate();
    const GridTopo topo(grid);
    long chi = 0;
    for (long v = 0; v < topo.n_vertices(); ++v)
        if (grid.values[v] <= t) ++chi;
    for (long e = 0; e < topo.n_edges(); ++e)
        if (topo.cube_value(topo.edge_ref(e)) <= t) --chi;
    for (long f = 0; f < topo.n_faces(); ++f)
        if (topo.cube_value(topo.face_ref(f)) <= t) ++chi;
    for (long c = 0; c < topo.n_cells(); ++c)
        if (topo.cube_value(topo.cell_ref(c)) <= t) --chi;
    return chi;
}

std::string diagram_to_csv(const PersistenceDiagram& diagram) {
    std::string out = "dim,birth,death,bx,by,bz,dx,dy,dz\n";
    char buf[64];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& p : diagram.pairs) {
        out += std::to_string(p.dim) + "," + fmt(p.birth) + ",";
        out += p.essential() ? "inf" : fmt(p.death);
        out += "," + std::to_string(p.birth_vertex[0]) + "," +
               std::to_string(p.birth_vertex[1]) + "," + std::to_string(p.birth_vertex[2]);
        if (p.essential())
            out += ",,,";
        else
            out += "," + std::to_string(p.death_vertex[0]) + "," +
                   std::to_string(p.death_vertex[1]) + "," +
                   std::to_string(p.death_vertex[2]);
        out += "\n";
    }
    return out;
}

}  // namespace topoblend
