// P1 surface FEM for the two-material reaction-diffusion state equation
//
//   -div_M(beta grad_M u) + gamma u = f   on a closed surface M,
//
// with piecewise-constant beta/gamma/f chosen per element by a material
// indicator, plus the tracking objective and its adjoint equation.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "surftopt/mesh.hpp"

namespace surftopt {

struct ProblemCoefficients {
    double beta1 = 1.0, beta2 = 1.0;    // diffusion per material, > 0
    double gamma1 = 1.0, gamma2 = 1.0;  // reaction per material, > 0
    double f1 = 0.0, f2 = 0.0;          // source per material
    double alpha1 = 1.0, alpha2 = 0.0;  // objective weights, >= 0, not both 0

    // Throws ConfigError on invalid values.
    void validate() const;

    double beta(Material m) const { return m == Material::material1 ? beta1 : beta2; }
    double gamma(Material m) const { return m == Material::material1 ? gamma1 : gamma2; }
    double source(Material m) const { return m == Material::material1 ? f1 : f2; }

    // Coefficient set with the two material roles exchanged.
    ProblemCoefficients swapped() const;
};

// Symmetric positive definite system in CSR form, bound to a mesh.
struct SparseSystem {
    std::vector<int> row_ptr;
    std::vector<int> cols;     // ascending within each row
    std::vector<double> vals;
    std::vector<double> rhs;
    std::uint64_t mesh_id = 0;

    int rows() const { return static_cast<int>(row_ptr.size()) - 1; }
    void multiply(const double* x, double* y) const;
    std::vector<double> diagonal() const;
    double max_abs_entry() const;
    double max_asymmetry() const;  // max |A_ij - A_ji|, 0 for exact symmetry
};

struct SolverOptions {
    double tol = 1e-10;  // relative residual target, in (0, 1e-2]
    int max_iter = 0;    // 0 selects 20 * n
};

struct CgInfo {
    int iterations = 0;
    double rel_residual = 0.0;
};

// Jacobi-preconditioned conjugate gradients from a zero start. Converges
// when ||b - A x|| <= tol * ||b|| (verified against the true residual);
// b = 0 returns x = 0 immediately. Throws SolverError on breakdown or
// when max_iter is exhausted.
std::vector<double> solve_cg(const SparseSystem& A, std::span<const double> b,
                             const SolverOptions& opts, CgInfo* info = nullptr);

// Stiffness + mass assembly with per-element coefficients; fills rhs with
// the source load (f constant per element, lumped as f * A_T / 3 per
// corner). Deterministic: fixed element order, bitwise-symmetric result.
SparseSystem assemble_system(const SurfaceMesh& mesh, const MaterialIndicator& materials,
                             const ProblemCoefficients& c);

// Consistent mass matrix product y = M x.
void mass_apply(const SurfaceMesh& mesh, const double* x, double* y);

// Unit-coefficient stiffness product y = K x (beta = 1 everywhere).
void unit_stiffness_apply(const SurfaceMesh& mesh, const double* x, double* y);

// sum_T A_T |grad_M e|^2 for the nodal field e.
double unit_stiffness_energy(const SurfaceMesh& mesh, const VertexField& e);

// Adjoint load -2 alpha1 M (u - u_d) - 2 alpha2 K (u - u_d).
std::vector<double> assemble_adjoint_load(const SurfaceMesh& mesh, const VertexField& u,
                                          const VertexField& u_d,
                                          const ProblemCoefficients& c);

struct FieldSolution {
    VertexField field;
    CgInfo cg;
};

// Assembles and solves the state equation.
FieldSolution solve_state(const SurfaceMesh& mesh, const MaterialIndicator& materials,
                          const ProblemCoefficients& c, const SolverOptions& opts = {});

// Solves the adjoint equation reusing an already assembled state system.
FieldSolution solve_adjoint(const SurfaceMesh& mesh, const SparseSystem& system,
                            const VertexField& u, const VertexField& u_d,
                            const ProblemCoefficients& c, const SolverOptions& opts = {});

// Convenience overload that assembles first.
FieldSolution solve_adjoint(const SurfaceMesh& mesh, const MaterialIndicator& materials,
                            const VertexField& u, const VertexField& u_d,
                            const ProblemCoefficients& c, const SolverOptions& opts = {});

// Tracking objective alpha1 ||u - u_d||_L2^2 + alpha2 |u - u_d|_H1^2.
double objective(const SurfaceMesh& mesh, const VertexField& u, const VertexField& u_d,
                 const ProblemCoefficients& c);

// Tangential gradient of a nodal field on element t (constant there).
Vec3 element_gradient(const SurfaceMesh& mesh, const VertexField& f, int t);

}  // namespace surftopt
