// Numerical checks of the small-inclusion asymptotics on the unit
// sphere: exact geodesic-disk areas against their flat expansion, and
// finite-difference quotients of the objective against the closed-form
// sensitivity when a small geodesic disk of material is swapped.

#pragma once

#include <span>
#include <vector>

#include "surftopt/fem.hpp"
#include "surftopt/mesh.hpp"

namespace surftopt {

// Exponential map of the unit sphere at q (|q| = 1): walks the great
// circle in direction v (tangent at q) through the angle |v|.
Vec3 sphere_exp_map(const Vec3& q, const Vec3& v);

// Area of a geodesic disk of radius eps on the unit sphere,
// 2 pi (1 - cos eps); eps must lie in (0, pi].
double geodesic_disk_area_exact(double eps);

struct FlipResult {
    MaterialIndicator materials;
    double flipped_area = 0.0;  // mesh area of the flipped elements
    int flipped_count = 0;
};

// Swaps the material of every element whose sphere-projected centroid
// lies within geodesic distance eps of vertex `center`. The selected
// elements must share one label in `base` (the perturbation must sit
// inside a single material region).
FlipResult flip_geodesic_disk(const SurfaceMesh& mesh, const MaterialIndicator& base,
                              int center, double eps);

struct QuotientRow {
    double eps = 0.0;
    double area_exact = 0.0;       // 2 pi (1 - cos eps)
    double area_mesh = 0.0;        // area actually flipped on the mesh
    double objective_perturbed = 0.0;
    double quotient = 0.0;         // (J_perturbed - J_base) / area_exact
    double formula_value = 0.0;    // closed-form sensitivity at the vertex
    double rel_error = 0.0;        // |quotient - formula| / |formula|
    bool below_resolution = false; // no element flipped at this radius
};

struct QuotientTable {
    int vertex = -1;
    double base_objective = 0.0;
    double formula_value = 0.0;
    std::vector<QuotientRow> rows;
};

// For each radius in `eps_list` (strictly decreasing, in (0, pi/2]):
// flip a geodesic disk of material around `vertex`, re-solve the state
// equation, and compare the objective difference per unit exact disk
// area with the closed-form sensitivity of the unperturbed design.
QuotientTable td_quotient_study(const SurfaceMesh& mesh, const MaterialIndicator& base,
                                const VertexField& u_d, const ProblemCoefficients& c,
                                int vertex, std::span<const double> eps_list,
                                const SolverOptions& opts = {});

// Benchmark design on the unit sphere: material 1 on every element whose
// projected centroid lies within `angle` (radians) of `axis`, material 2
// elsewhere.
MaterialIndicator spherical_cap_design(const SurfaceMesh& mesh, const Vec3& axis,
                                       double angle);

// Vertex with the largest geodesic distance to the material interface
// (edges separating differently labeled elements); lowest index wins
// ties, and a uniform design yields vertex 0.
int farthest_vertex_from_interface(const SurfaceMesh& mesh, const MaterialIndicator& m);

}  // namespace surftopt
