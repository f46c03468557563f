#include "surftopt/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "surftopt/error.hpp"
#include "surftopt/levelset.hpp"
#include "surftopt/topo.hpp"

namespace surftopt {

Vec3 sphere_exp_map(const Vec3& q, const Vec3& v) {
    if (std::abs(norm(q) - 1.0) > 1e-9)
        throw ConfigError("sphere_exp_map requires a unit base point");
    if (std::abs(dot(q, v)) > 1e-10)
        throw ConfigError("sphere_exp_map requires a tangent displacement");
    const double angle = norm(v);
    if (angle == 0.0) return q;
    return std::cos(angle) * q + (std::sin(angle) / angle) * v;
}

double geodesic_disk_area_exact(double eps) {
    if (!(eps > 0.0) || eps > std::numbers::pi)
        throw ConfigError("geodesic disk radius must lie in (0, pi]");
    return 2.0 * std::numbers::pi * (1.0 - std::cos(eps));
}

FlipResult flip_geodesic_disk(const SurfaceMesh& mesh, const MaterialIndicator& base,
                              int center, double eps) {
    ensure_bound(mesh, base, "flip_geodesic_disk");
    if (center < 0 || center >= mesh.num_vertices())
        throw ConfigError("flip center vertex index out of range");
    if (!(eps > 0.0) || eps > std::numbers::pi / 2)
        throw ConfigError("flip radius must lie in (0, pi/2]");

    const Vec3 q = normalized(mesh.vertex(center));
    FlipResult out{base, 0.0, 0};
    Material inside = Material::material1;  // label shared by the flip set
    bool first = true;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        const Vec3 centroid = normalized(
            (mesh.vertex(tri[0]) + mesh.vertex(tri[1]) + mesh.vertex(tri[2])) / 3.0);
        const double dist = std::acos(std::clamp(dot(centroid, q), -1.0, 1.0));
        if (dist >= eps) continue;
        if (first) {
            inside = base.labels[t];
            first = false;
        } else if (base.labels[t] != inside) {
            throw ConfigError("geodesic disk at vertex " + std::to_string(center) +
                              " with radius " + std::to_string(eps) +
                              " crosses a material interface");
        }
        out.materials.labels[t] = inside == Material::material1 ? Material::material2
                                                                : Material::material1;
        out.flipped_area += mesh.area(t);
        ++out.flipped_count;
    }
    return out;
}

MaterialIndicator spherical_cap_design(const SurfaceMesh& mesh, const Vec3& axis,
                                       double angle) {
    if (!(angle > 0.0) || angle >= std::numbers::pi)
        throw ConfigError("cap angle must lie in (0, pi)");
    const double n = norm(axis);
    if (!(n > 0.0)) throw ConfigError("cap axis must be nonzero");
    const Vec3 a = axis / n;
    MaterialIndicator out = MaterialIndicator::uniform(mesh, Material::material2);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        const Vec3 centroid = normalized(
            (mesh.vertex(tri[0]) + mesh.vertex(tri[1]) + mesh.vertex(tri[2])) / 3.0);
        const double dist = std::acos(std::clamp(dot(centroid, a), -1.0, 1.0));
        if (dist < angle) out.labels[t] = Material::material1;
    }
    return out;
}

int farthest_vertex_from_interface(const SurfaceMesh& mesh, const MaterialIndicator& m) {
    ensure_bound(mesh, m, "farthest_vertex_from_interface");

    // Interface edge midpoints, projected back to the sphere. An edge is
    // on the interface when its two incident triangles disagree. Edges
    // are visited from both sides; the t2 > t filter keeps one copy.
    std::vector<Vec3> midpoints;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        for (int i = 0; i < 3; ++i) {
            const int a = tri[i], b = tri[(i + 1) % 3];
            for (int t2 : mesh.incident_triangles(a)) {
                if (t2 == t) continue;
                const auto& tri2 = mesh.triangle(t2);
                if (tri2[0] != b && tri2[1] != b && tri2[2] != b) continue;
                if (t2 > t && m.labels[t] != m.labels[t2])
                    midpoints.push_back(normalized((mesh.vertex(a) + mesh.vertex(b)) * 0.5));
                break;
            }
        }
    }
    if (midpoints.empty()) return 0;

    int best = 0;
    double best_dist = -1.0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const Vec3 p = normalized(mesh.vertex(v));
        double nearest = std::numbers::pi;
        for (const Vec3& mp : midpoints)
            nearest = std::min(nearest, std::acos(std::clamp(dot(p, mp), -1.0, 1.0)));
        if (nearest > best_dist) {
            best_dist = nearest;
            best = v;
        }
    }
    return best;
}

QuotientTable td_quotient_study(const SurfaceMesh& mesh, const MaterialIndicator& base,
                                const VertexField& u_d, const ProblemCoefficients& c,
                                int vertex, std::span<const double> eps_list,
                                const SolverOptions& opts) {
    ensure_bound(mesh, base, "td_quotient_study");
    ensure_bound(mesh, u_d, "td_quotient_study");
    if (vertex < 0 || vertex >= mesh.num_vertices())
        throw ConfigError("study vertex index out of range");
    if (eps_list.empty()) throw ConfigError("eps list is empty");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0) || eps_list[i] > std::numbers::pi / 2)
            throw ConfigError("every radius must lie in (0, pi/2]");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw ConfigError("radii must be strictly decreasing");
    }

    // Unperturbed design: state, adjoint (same matrix), sensitivity.
    const SparseSystem system = assemble_system(mesh, base, c);
    CgInfo cg;
    const VertexField u0{solve_cg(system, system.rhs, opts, &cg), mesh.id()};
    const double j0 = objective(mesh, u0, u_d, c);
    const VertexField p0{
        solve_cg(system, assemble_adjoint_load(mesh, u0, u_d, c), opts, &cg), mesh.id()};
    const VertexField psi = init_levelset(mesh, base);
    const TDField td = td_field(mesh, psi, u0, p0, c);

    QuotientTable table;
    table.vertex = vertex;
    table.base_objective = j0;
    table.formula_value = td.derivative.values[vertex];

    for (double eps : eps_list) {
        QuotientRow row;
        row.eps = eps;
        row.area_exact = geodesic_disk_area_exact(eps);
        row.formula_value = table.formula_value;

        const FlipResult flip = flip_geodesic_disk(mesh, base, vertex, eps);
        row.area_mesh = flip.flipped_area;
        row.below_resolution = flip.flipped_count == 0;
        if (row.below_resolution) {
            // The disk captured no element: the design did not change and
            // the quotient degenerates to zero.
            row.objective_perturbed = j0;
            row.quotient = 0.0;
        } else {
            const FieldSolution pert = solve_state(mesh, flip.materials, c, opts);
            row.objective_perturbed = objective(mesh, pert.field, u_d, c);
            row.quotient = (row.objective_perturbed - j0) / row.area_exact;
        }
        // A vanishing sensitivity (e.g. indistinguishable materials) makes
        // any nonzero quotient an infinite relative error; a matching zero
        // quotient is exact.
        const double diff = std::abs(row.quotient - row.formula_value);
        if (row.formula_value != 0.0)
            row.rel_error = diff / std::abs(row.formula_value);
        else
            row.rel_error = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace surftopt
