#include "surftopt/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "surftopt/error.hpp"

namespace surftopt {

namespace {

std::uint64_t next_mesh_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
}

std::uint64_t edge_key(int a, int b, std::uint64_t nv) {
    auto [lo, hi] = std::minmax(a, b);
    return static_cast<std::uint64_t>(lo) * nv + static_cast<std::uint64_t>(hi);
}

}  // namespace

SurfaceMesh SurfaceMesh::from_data(std::vector<Vec3> vertices,
                                   std::vector<std::array<int, 3>> triangles) {
    const int nv = static_cast<int>(vertices.size());
    const int nt = static_cast<int>(triangles.size());
    if (nv < 4 || nt < 4)
        throw MeshError("mesh too small: need at least 4 vertices and 4 triangles for a "
                        "closed surface");
    for (const Vec3& p : vertices)
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
            throw MeshError("non-finite vertex coordinate");

    for (int t = 0; t < nt; ++t) {
        const auto& tri = triangles[t];
        for (int i = 0; i < 3; ++i)
            if (tri[i] < 0 || tri[i] >= nv)
                throw MeshError("triangle " + std::to_string(t) + " references vertex " +
                                std::to_string(tri[i]) + " outside [0," +
                                std::to_string(nv - 1) + "]");
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw MeshError("triangle " + std::to_string(t) + " repeats a vertex");
    }

    // Closed-manifold check: each undirected edge must appear in exactly
    // two triangles.
    std::unordered_map<std::uint64_t, int> edge_count;
    edge_count.reserve(static_cast<std::size_t>(nt) * 3);
    for (const auto& tri : triangles)
        for (int i = 0; i < 3; ++i)
            ++edge_count[edge_key(tri[i], tri[(i + 1) % 3], static_cast<std::uint64_t>(nv))];
    for (const auto& [key, count] : edge_count) {
        if (count != 2) {
            const int a = static_cast<int>(key / static_cast<std::uint64_t>(nv));
            const int b = static_cast<int>(key % static_cast<std::uint64_t>(nv));
            throw MeshError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                            ") belongs to " + std::to_string(count) +
                            " triangles; surface is not closed");
        }
    }

    SurfaceMesh m;
    m.vertices_ = std::move(vertices);
    m.triangles_ = std::move(triangles);
    m.area_.resize(nt);
    m.normal_.resize(nt);
    m.basis_grad_.resize(nt);

    double total = 0.0;
    for (int t = 0; t < nt; ++t) {
        const auto& tri = m.triangles_[t];
        const Vec3& p0 = m.vertices_[tri[0]];
        const Vec3& p1 = m.vertices_[tri[1]];
        const Vec3& p2 = m.vertices_[tri[2]];
        const Vec3 n = cross(p1 - p0, p2 - p0);
        const double two_area = norm(n);
        const double e01 = norm(p1 - p0), e12 = norm(p2 - p1), e20 = norm(p0 - p2);
        const double lmax = std::max({e01, e12, e20});
        if (!(two_area > 2e-14 * lmax * lmax))
            throw MeshError("triangle " + std::to_string(t) + " is degenerate (area " +
                            std::to_string(two_area / 2) + ")");
        m.area_[t] = 0.5 * two_area;
        m.normal_[t] = n / two_area;
        // Hat-function gradient at local vertex i: rotate the opposite
        // edge into the triangle plane, scale by 1/(2A). Independent of
        // vertex order since flipping it also flips the normal.
        const Vec3* p[3] = {&p0, &p1, &p2};
        for (int i = 0; i < 3; ++i) {
            const Vec3 opposite = *p[(i + 2) % 3] - *p[(i + 1) % 3];
            m.basis_grad_[t][i] = cross(m.normal_[t], opposite) / two_area;
        }
        total += m.area_[t];
    }
    m.total_area_ = total;

    // Vertex-to-triangle adjacency in CSR form; filling in triangle order
    // leaves each vertex's list sorted.
    m.v2t_offset_.assign(nv + 1, 0);
    for (const auto& tri : m.triangles_)
        for (int i = 0; i < 3; ++i) ++m.v2t_offset_[tri[i] + 1];
    for (int v = 0; v < nv; ++v) m.v2t_offset_[v + 1] += m.v2t_offset_[v];
    m.v2t_item_.resize(m.v2t_offset_[nv]);
    std::vector<int> cursor(m.v2t_offset_.begin(), m.v2t_offset_.end() - 1);
    for (int t = 0; t < nt; ++t)
        for (int i = 0; i < 3; ++i) m.v2t_item_[cursor[m.triangles_[t][i]]++] = t;

    m.id_ = next_mesh_id();
    return m;
}

std::span<const int> SurfaceMesh::incident_triangles(int v) const {
    return {v2t_item_.data() + v2t_offset_[v],
            static_cast<std::size_t>(v2t_offset_[v + 1] - v2t_offset_[v])};
}

VertexField VertexField::zeros(const SurfaceMesh& mesh) {
    return {std::vector<double>(mesh.num_vertices(), 0.0), mesh.id()};
}

VertexField VertexField::constant(const SurfaceMesh& mesh, double value) {
    return {std::vector<double>(mesh.num_vertices(), value), mesh.id()};
}

VertexField VertexField::from_function(const SurfaceMesh& mesh,
                                       const std::function<double(const Vec3&)>& f) {
    VertexField out = zeros(mesh);
    for (int v = 0; v < mesh.num_vertices(); ++v) out.values[v] = f(mesh.vertex(v));
    return out;
}

MaterialIndicator MaterialIndicator::uniform(const SurfaceMesh& mesh, Material m) {
    return {std::vector<Material>(mesh.num_triangles(), m), mesh.id()};
}

void ensure_bound(const SurfaceMesh& mesh, const VertexField& f, const char* what) {
    if (f.mesh_id != mesh.id() || f.size() != mesh.num_vertices())
        throw MeshError(std::string(what) + ": vertex field is not bound to this mesh");
}

void ensure_bound(const SurfaceMesh& mesh, const MaterialIndicator& m, const char* what) {
    if (m.mesh_id != mesh.id() || m.size() != mesh.num_triangles())
        throw MeshError(std::string(what) + ": material indicator is not bound to this mesh");
}

SurfaceMesh build_icosphere(int subdivisions) {
    if (subdivisions < 0) throw MeshError("icosphere subdivision level must be >= 0");
    if (subdivisions > 8)
        throw MeshError("icosphere subdivision level " + std::to_string(subdivisions) +
                        " exceeds the supported maximum of 8");

    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    for (Vec3& v : verts) v = normalized(v);
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    for (int level = 0; level < subdivisions; ++level) {
        std::unordered_map<std::uint64_t, int> midpoint;
        midpoint.reserve(verts.size() * 4);
        const std::uint64_t nv = verts.size();
        auto mid = [&](int a, int b) {
            const std::uint64_t key = edge_key(a, b, nv);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            verts.push_back(normalized((verts[a] + verts[b]) * 0.5));
            const int idx = static_cast<int>(verts.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int a = mid(f[0], f[1]);
            const int b = mid(f[1], f[2]);
            const int c = mid(f[2], f[0]);
            next.push_back({f[0], a, c});
            next.push_back({f[1], b, a});
            next.push_back({f[2], c, b});
            next.push_back({a, b, c});
        }
        faces = std::move(next);
    }
    return SurfaceMesh::from_data(std::move(verts), std::move(faces));
}

namespace {

[[noreturn]] void off_fail(const std::string& path, int line, const std::string& msg) {
    throw MeshError(path + ":" + std::to_string(line) + ": " + msg);
}

// Next line that is neither blank nor a '#' comment; returns false at EOF.
bool next_content_line(std::istream& in, std::string& line, int& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        const auto pos = line.find('#');
        if (pos != std::string::npos) line.erase(pos);
        if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
}

}  // namespace

SurfaceMesh load_off(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open mesh file: " + path);

    std::string line;
    int lineno = 0;
    if (!next_content_line(in, line, lineno)) off_fail(path, lineno, "empty file");

    std::istringstream header(line);
    std::string magic;
    header >> magic;
    if (magic != "OFF") off_fail(path, lineno, "expected OFF header, got '" + magic + "'");

    long long nv = -1, nf = -1, ne = -1;
    if (!(header >> nv >> nf >> ne)) {
        if (!next_content_line(in, line, lineno)) off_fail(path, lineno, "missing counts line");
        std::istringstream counts(line);
        if (!(counts >> nv >> nf >> ne))
            off_fail(path, lineno, "cannot parse vertex/face/edge counts");
    }
    if (nv < 0 || nf < 0) off_fail(path, lineno, "negative vertex or face count");

    std::vector<Vec3> vertices;
    vertices.reserve(static_cast<std::size_t>(nv));
    for (long long i = 0; i < nv; ++i) {
        if (!next_content_line(in, line, lineno))
            off_fail(path, lineno, "unexpected end of file in vertex list");
        std::istringstream ls(line);
        Vec3 p;
        if (!(ls >> p.x >> p.y >> p.z))
            off_fail(path, lineno, "cannot parse vertex coordinates");
        vertices.push_back(p);
    }

    std::vector<std::array<int, 3>> faces;
    faces.reserve(static_cast<std::size_t>(nf));
    for (long long i = 0; i < nf; ++i) {
        if (!next_content_line(in, line, lineno))
            off_fail(path, lineno, "unexpected end of file in face list");
        std::istringstream ls(line);
        int count = 0;
        if (!(ls >> count)) off_fail(path, lineno, "cannot parse face vertex count");
        if (count != 3)
            off_fail(path, lineno,
                     "face has " + std::to_string(count) + " vertices; only triangles are supported");
        std::array<int, 3> tri{};
        if (!(ls >> tri[0] >> tri[1] >> tri[2]))
            off_fail(path, lineno, "cannot parse face vertex indices");
        faces.push_back(tri);
    }

    try {
        return SurfaceMesh::from_data(std::move(vertices), std::move(faces));
    } catch (const MeshError& e) {
        throw MeshError(path + ": " + e.what());
    }
}

MaterialIndicator classify_elements(const SurfaceMesh& mesh, const VertexField& psi) {
    ensure_bound(mesh, psi, "classify_elements");
    MaterialIndicator out;
    out.mesh_id = mesh.id();
    out.labels.resize(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        const double mean =
            (psi.values[tri[0]] + psi.values[tri[1]] + psi.values[tri[2]]) / 3.0;
        out.labels[t] = mean < 0.0 ? Material::material1 : Material::material2;
    }
    return out;
}

double l2_inner(const SurfaceMesh& mesh, const VertexField& f, const VertexField& g) {
    ensure_bound(mesh, f, "l2_inner");
    ensure_bound(mesh, g, "l2_inner");
    double s = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        const double f0 = f.values[tri[0]], f1 = f.values[tri[1]], f2 = f.values[tri[2]];
        const double g0 = g.values[tri[0]], g1 = g.values[tri[1]], g2 = g.values[tri[2]];
        s += mesh.area(t) / 12.0 *
             ((f0 + f1 + f2) * (g0 + g1 + g2) + f0 * g0 + f1 * g1 + f2 * g2);
    }
    return s;
}

double l2_norm(const SurfaceMesh& mesh, const VertexField& f) {
    return std::sqrt(std::max(0.0, l2_inner(mesh, f, f)));
}

double material_area(const SurfaceMesh& mesh, const MaterialIndicator& ind, Material m) {
    ensure_bound(mesh, ind, "material_area");
    double s = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t)
        if (ind.labels[t] == m) s += mesh.area(t);
    return s;
}

double symmetric_difference_area(const SurfaceMesh& mesh, const MaterialIndicator& a,
                                 const MaterialIndicator& b) {
    ensure_bound(mesh, a, "symmetric_difference_area");
    ensure_bound(mesh, b, "symmetric_difference_area");
    double s = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t)
        if (a.labels[t] != b.labels[t]) s += mesh.area(t);
    return s;
}

}  // namespace surftopt
