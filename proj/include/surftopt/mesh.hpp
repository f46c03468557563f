// Triangulated closed-surface mesh with the per-element geometry caches
// needed by a piecewise-linear surface FEM: element areas, tangential
// basis-function gradients, and vertex-to-element adjacency.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "surftopt/vec3.hpp"

namespace surftopt {

class SurfaceMesh {
public:
    // Validates and caches geometry. Requirements: at least 4 vertices,
    // in-range distinct indices per triangle, strictly positive areas,
    // and a closed 2-manifold (every edge shared by exactly two
    // triangles). Violations throw MeshError.
    static SurfaceMesh from_data(std::vector<Vec3> vertices,
                                 std::vector<std::array<int, 3>> triangles);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }

    const Vec3& vertex(int v) const { return vertices_[v]; }
    const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }

    double area(int t) const { return area_[t]; }
    double total_area() const { return total_area_; }

    // Tangential gradient of the hat function of local vertex i (0..2) on
    // triangle t; constant per triangle and orthogonal to its normal.
    const Vec3& basis_gradient(int t, int i) const { return basis_grad_[t][i]; }

    // Outward-oriented unit normal of triangle t (orientation as given by
    // the triangle's vertex order).
    const Vec3& unit_normal(int t) const { return normal_[t]; }

    // Triangles incident to vertex v, ascending.
    std::span<const int> incident_triangles(int v) const;

    // Identity token used to check that fields belong to this mesh.
    std::uint64_t id() const { return id_; }

private:
    SurfaceMesh() = default;

    std::vector<Vec3> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<double> area_;
    std::vector<Vec3> normal_;
    std::vector<std::array<Vec3, 3>> basis_grad_;
    std::vector<int> v2t_offset_;
    std::vector<int> v2t_item_;
    double total_area_ = 0.0;
    std::uint64_t id_ = 0;
};

// Nodal scalar field bound to one mesh through its id.
struct VertexField {
    std::vector<double> values;
    std::uint64_t mesh_id = 0;

    static VertexField zeros(const SurfaceMesh& mesh);
    static VertexField constant(const SurfaceMesh& mesh, double value);
    static VertexField from_function(const SurfaceMesh& mesh,
                                     const std::function<double(const Vec3&)>& f);

    int size() const { return static_cast<int>(values.size()); }
    double* data() { return values.data(); }
    const double* data() const { return values.data(); }
};

enum class Material : std::uint8_t { material1 = 1, material2 = 2 };

// Per-element two-phase material assignment.
struct MaterialIndicator {
    std::vector<Material> labels;
    std::uint64_t mesh_id = 0;

    static MaterialIndicator uniform(const SurfaceMesh& mesh, Material m);

    int size() const { return static_cast<int>(labels.size()); }
};

// Throws MeshError unless the field/indicator belongs to `mesh`.
void ensure_bound(const SurfaceMesh& mesh, const VertexField& f, const char* what);
void ensure_bound(const SurfaceMesh& mesh, const MaterialIndicator& m, const char* what);

// Unit icosphere: recursive midpoint subdivision of an icosahedron with
// projection to the unit sphere. 20*4^k triangles, 10*4^k+2 vertices.
// Levels above 8 are refused (memory guard).
SurfaceMesh build_icosphere(int subdivisions);

// Reads an ASCII OFF file (triangles only). Parse failures report the
// offending line number; the surface must be closed.
SurfaceMesh load_off(const std::string& path);

// Element classification from a nodal level-set: mean of the three vertex
// values < 0 selects material 1, otherwise (ties included) material 2.
MaterialIndicator classify_elements(const SurfaceMesh& mesh, const VertexField& psi);

// L2 inner product of nodal fields under the consistent mass matrix:
// sum_T A_T/12 * ((f_i+f_j+f_k)(g_i+g_j+g_k) + f_i g_i + f_j g_j + f_k g_k).
double l2_inner(const SurfaceMesh& mesh, const VertexField& f, const VertexField& g);
double l2_norm(const SurfaceMesh& mesh, const VertexField& f);

// Total area of elements carrying material m.
double material_area(const SurfaceMesh& mesh, const MaterialIndicator& ind, Material m);

// Total area of elements labeled differently by a and b.
double symmetric_difference_area(const SurfaceMesh& mesh, const MaterialIndicator& a,
                                 const MaterialIndicator& b);

}  // namespace surftopt
