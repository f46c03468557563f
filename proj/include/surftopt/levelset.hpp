// Level-set driven two-material optimization loop: spherical
// interpolation of the unit-norm level set toward the normalized descent
// field, with a backtracking step-size search that enforces a strict
// objective decrease.

#pragma once

#include <functional>
#include <vector>

#include "surftopt/fem.hpp"
#include "surftopt/mesh.hpp"
#include "surftopt/topo.hpp"

namespace surftopt {

struct OptimizerConfig {
    double kappa_max = 0.05;     // step-size cap and initial trial value
    double kappa_growth = 1.1;   // growth factor applied after acceptance
    double kappa_min = 1e-4;     // below this the line search gives up
    int max_halvings = 20;       // trial budget within one line search
    int max_iterations = 100;
    double angle_tol = 1e-3;     // stationarity threshold on the angle (radians)
    SolverOptions solver;

    void validate() const;  // throws ConfigError
};

enum class StopReason {
    stationary,           // angle fell below angle_tol
    zero_sensitivity,     // descent field vanished: nothing left to improve
    max_iterations,
    line_search_failure,  // no step size achieved a decrease
};

const char* to_string(StopReason r);

// One accepted optimization step. `iteration` is the loop pass at which
// the step was taken; gaps in the sequence mark drift passes.
struct IterationRecord {
    int iteration = 0;
    double objective = 0.0;
    double theta = 0.0;
    double kappa = 0.0;
    int cg_iterations = 0;
};

struct OptimizerState {
    VertexField psi;
    MaterialIndicator materials;
    VertexField state;  // PDE solution for the final design
    double objective = 0.0;
    double initial_objective = 0.0;
    int iterations = 0;   // accepted steps that changed the design
    int drift_steps = 0;  // accepted steps that only rotated the level set
    StopReason stop = StopReason::max_iterations;
    std::vector<IterationRecord> history;
};

// Uniform initial level sets: the whole surface assigned to one material.
// Material 1 yields the constant -1/sqrt(area), material 2 the positive
// counterpart; both are unit vectors in the mesh L2 inner product.
VertexField init_levelset(const SurfaceMesh& mesh, Material everywhere);

// Level set matching an existing element labeling: each vertex averages
// +/-1 votes of its incident elements (-1 for material 1), normalized to
// unit L2 norm.
VertexField init_levelset(const SurfaceMesh& mesh, const MaterialIndicator& materials);

struct SlerpResult {
    VertexField psi;
    double norm_drift = 0.0;  // |norm before renormalization - 1|
};

// Rotates psi by the fraction kappa of the angle theta toward the
// normalized descent field along the great circle joining them:
//   psi' = [sin((1-kappa) theta) psi + sin(kappa theta) g/||g||] / sin(theta),
// then renormalizes. theta within 1e-12 of 0 or pi is rejected.
SlerpResult slerp_step(const SurfaceMesh& mesh, const VertexField& psi,
                       const VertexField& descent, double theta, double kappa);

struct LineSearchResult {
    bool accepted = false;
    // Drift step: the trial left the element classification identical, so
    // the objective cannot respond at this or any smaller step size. The
    // level set still rotates toward the descent field (psi is set); the
    // design, state, and objective are unchanged and stay with the caller.
    bool drift = false;
    VertexField psi;
    MaterialIndicator materials;
    SparseSystem system;
    VertexField u;
    double objective = 0.0;
    double kappa = 0.0;      // accepted step size
    int cg_iterations = 0;   // across all trial evaluations
    int evaluations = 0;
};

// Backtracking on kappa starting from kappa_start: halve until the
// objective strictly decreases or kappa falls below cfg.kappa_min. A
// trial whose classification equals `current` is accepted as a drift
// step instead of halving further: the discrete objective is piecewise
// constant in psi, so once a step is below the flip resolution no
// smaller step can decrease it, but the rotation itself is the only way
// the loop can leave such a plateau.
LineSearchResult line_search(const SurfaceMesh& mesh, const VertexField& psi,
                             const MaterialIndicator& current,
                             const VertexField& descent, double theta,
                             double current_objective, double kappa_start,
                             const VertexField& u_d, const ProblemCoefficients& c,
                             const OptimizerConfig& cfg);

// Full optimization loop from the initial level set psi0. Records one
// history row per accepted step that changed the design; objectives
// along the history are strictly decreasing. The optional callback
// observes each appended row.
OptimizerState optimize(const SurfaceMesh& mesh, const VertexField& psi0,
                        const VertexField& u_d, const ProblemCoefficients& c,
                        const OptimizerConfig& cfg,
                        const std::function<void(const IterationRecord&)>& on_step = {});

}  // namespace surftopt
