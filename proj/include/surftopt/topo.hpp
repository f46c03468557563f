// Closed-form topological derivative of the tracking objective for the
// two-material reaction-diffusion problem, together with the polarization
// (exterior transmission) solution it is derived from and the descent
// field / stationarity measure used by the level-set optimizer.

#pragma once

#include <span>
#include <vector>

#include "surftopt/fem.hpp"
#include "surftopt/mesh.hpp"

namespace surftopt {

// a = -(beta1 - beta2) / (beta1 + (d-2) beta2) for a unit-ball inclusion
// in R^{d-1}; requires beta1, beta2 > 0 and d >= 2.
double polarization_coefficient(double beta1, double beta2, int d);

// Solution of the unit-ball transmission problem whose far field drives
// the gradient term of the topological derivative:
//   Q(x) = a x_axis                 inside the ball,
//   Q(x) = a x_axis / |x|^(d-1)     outside.
struct PolarizationField {
    double a = 0.0;
    double beta1 = 1.0;
    double beta2 = 1.0;
    int dim = 3;   // ambient dimension d; the ball lives in R^(d-1)
    int axis = 0;  // coordinate direction of the linear far field

    static PolarizationField make(double beta1, double beta2, int dim, int axis = 0);
};

// Evaluates Q at a point of R^(dim-1); the two branches match on |x| = 1.
double polarization_eval(const PolarizationField& field, std::span<const double> x);

// Largest flux-jump defect |beta1 dQ_in/dn - beta2 dQ_out/dn + (beta1-beta2) n_axis|
// over `samples` points of the unit sphere of R^(dim-1), normalized by
// max(beta1, beta2). Zero (to rounding) exactly when `a` solves the
// transmission problem; dim must be 2 or 3.
double check_transmission(const PolarizationField& field, int samples);

// Area-weighted average of incident element gradients at each vertex.
std::vector<Vec3> recover_vertex_gradient(const SurfaceMesh& mesh, const VertexField& f);

struct TDField {
    VertexField derivative;  // sensitivity of J to a small material swap at each vertex
    VertexField descent;     // derivative with its sign flipped inside the level-set region
};

// Vertex-wise topological derivative for a ball-shaped trial inclusion,
// evaluated from the state u and adjoint p of the current design. The
// branch per vertex follows sign(psi): psi < 0 lies inside the region
// occupied by material 1. Requires alpha2 == 0 (the closed form only
// covers the L2 tracking term); alpha2 != 0 is rejected.
TDField td_field(const SurfaceMesh& mesh, const VertexField& psi, const VertexField& u,
                 const VertexField& p, const ProblemCoefficients& c);

// arccos of the L2 angle between the unit level-set psi and the
// normalized descent field; 0 marks stationarity. Throws on a zero or
// non-finite descent field and on a non-unit psi.
double stationarity_angle(const SurfaceMesh& mesh, const VertexField& psi,
                          const VertexField& descent);

}  // namespace surftopt
