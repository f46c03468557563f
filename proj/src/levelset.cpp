#include "surftopt/levelset.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "surftopt/error.hpp"

namespace surftopt {

void OptimizerConfig::validate() const {
    if (!(kappa_max > 0.0) || kappa_max > 1.0)
        throw ConfigError("kappa_max must lie in (0, 1]");
    if (!(kappa_growth > 1.0)) throw ConfigError("kappa_growth must be > 1");
    if (!(kappa_min > 0.0) || !(kappa_min < kappa_max))
        throw ConfigError("kappa_min must lie in (0, kappa_max)");
    if (max_halvings < 0) throw ConfigError("max_halvings must be >= 0");
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    if (!(angle_tol >= 0.0)) throw ConfigError("angle_tol must be >= 0");
}

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::stationary: return "stationary";
        case StopReason::zero_sensitivity: return "zero_sensitivity";
        case StopReason::max_iterations: return "max_iterations";
        case StopReason::line_search_failure: return "line_search_failure";
    }
    return "unknown";
}

VertexField init_levelset(const SurfaceMesh& mesh, Material everywhere) {
    const double value = 1.0 / std::sqrt(mesh.total_area());
    return VertexField::constant(mesh, everywhere == Material::material1 ? -value : value);
}

VertexField init_levelset(const SurfaceMesh& mesh, const MaterialIndicator& materials) {
    ensure_bound(mesh, materials, "init_levelset");
    VertexField psi = VertexField::zeros(mesh);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const auto tris = mesh.incident_triangles(v);
        double vote = 0.0;
        for (int t : tris) vote += materials.labels[t] == Material::material1 ? -1.0 : 1.0;
        psi.values[v] = vote / static_cast<double>(tris.size());
    }
    const double n = l2_norm(mesh, psi);
    if (!(n > 0.0))
        throw OptimizerError("indicator-driven level set collapsed to zero");
    for (double& v : psi.values) v /= n;
    return psi;
}

SlerpResult slerp_step(const SurfaceMesh& mesh, const VertexField& psi,
                       const VertexField& descent, double theta, double kappa) {
    ensure_bound(mesh, psi, "slerp_step");
    ensure_bound(mesh, descent, "slerp_step");
    if (!(kappa > 0.0) || kappa > 1.0)
        throw OptimizerError("slerp step fraction must lie in (0, 1]");
    if (!(theta >= 1e-12) || theta > std::numbers::pi - 1e-12)
        throw OptimizerError("slerp angle " + std::to_string(theta) +
                             " is degenerate (too close to 0 or pi)");
    const double ng = l2_norm(mesh, descent);
    if (!(ng > 0.0)) throw OptimizerError("descent field is identically zero");

    const double w_old = std::sin((1.0 - kappa) * theta) / std::sin(theta);
    const double w_new = std::sin(kappa * theta) / (std::sin(theta) * ng);

    SlerpResult out{VertexField::zeros(mesh), 0.0};
    for (int v = 0; v < mesh.num_vertices(); ++v)
        out.psi.values[v] = w_old * psi.values[v] + w_new * descent.values[v];

    const double n = l2_norm(mesh, out.psi);
    if (!(n > 0.0)) throw OptimizerError("slerp produced a zero level set");
    out.norm_drift = std::abs(n - 1.0);
    for (double& v : out.psi.values) v /= n;
    return out;
}

LineSearchResult line_search(const SurfaceMesh& mesh, const VertexField& psi,
                             const MaterialIndicator& current,
                             const VertexField& descent, double theta,
                             double current_objective, double kappa_start,
                             const VertexField& u_d, const ProblemCoefficients& c,
                             const OptimizerConfig& cfg) {
    ensure_bound(mesh, u_d, "line_search");
    ensure_bound(mesh, current, "line_search");
    LineSearchResult out;
    double kappa = std::min(kappa_start, cfg.kappa_max);
    for (int halvings = 0; kappa >= cfg.kappa_min && halvings <= cfg.max_halvings;
         ++halvings, kappa *= 0.5) {
        SlerpResult trial = slerp_step(mesh, psi, descent, theta, kappa);
        MaterialIndicator mat = classify_elements(mesh, trial.psi);
        ++out.evaluations;
        if (mat.labels == current.labels) {
            // No element changed hands, so the objective is exactly the
            // current one and shrinking kappa can only keep it there.
            // Rotating the level set is still progress: it is the only
            // way off a plateau of the quantized objective.
            out.accepted = true;
            out.drift = true;
            out.psi = std::move(trial.psi);
            out.kappa = kappa;
            return out;
        }
        SparseSystem system = assemble_system(mesh, mat, c);
        CgInfo cg;
        VertexField u{solve_cg(system, system.rhs, cfg.solver, &cg), mesh.id()};
        const double j = objective(mesh, u, u_d, c);
        out.cg_iterations += cg.iterations;
        if (j < current_objective) {
            out.accepted = true;
            out.psi = std::move(trial.psi);
            out.materials = std::move(mat);
            out.system = std::move(system);
            out.u = std::move(u);
            out.objective = j;
            out.kappa = kappa;
            return out;
        }
    }
    return out;
}

OptimizerState optimize(const SurfaceMesh& mesh, const VertexField& psi0,
                        const VertexField& u_d, const ProblemCoefficients& c,
                        const OptimizerConfig& cfg,
                        const std::function<void(const IterationRecord&)>& on_step) {
    cfg.validate();
    c.validate();
    ensure_bound(mesh, psi0, "optimize");
    ensure_bound(mesh, u_d, "optimize");
    if (c.alpha2 != 0.0)
        throw ConfigError("optimize requires alpha2 == 0 (no closed-form sensitivity for "
                          "the gradient tracking term)");
    {
        const double n = l2_norm(mesh, psi0);
        if (std::abs(n - 1.0) > 1e-8)
            throw OptimizerError("initial level set must have unit L2 norm, got " +
                                 std::to_string(n));
    }

    OptimizerState st;
    st.psi = psi0;
    st.materials = classify_elements(mesh, st.psi);

    SparseSystem system = assemble_system(mesh, st.materials, c);
    st.state = VertexField{solve_cg(system, system.rhs, cfg.solver), mesh.id()};
    st.objective = objective(mesh, st.state, u_d, c);
    st.initial_objective = st.objective;

    double kappa_next = cfg.kappa_max;

    for (int k = 0; k < cfg.max_iterations; ++k) {
        CgInfo cg_adj;
        VertexField p{
            solve_cg(system, assemble_adjoint_load(mesh, st.state, u_d, c), cfg.solver,
                     &cg_adj),
            mesh.id()};
        TDField td = td_field(mesh, st.psi, st.state, p, c);

        const double sensitivity_norm = l2_norm(mesh, td.descent);
        double theta = 0.0;
        if (sensitivity_norm > 0.0) theta = stationarity_angle(mesh, st.psi, td.descent);

        if (sensitivity_norm == 0.0) {
            st.stop = StopReason::zero_sensitivity;
            return st;
        }
        if (theta <= cfg.angle_tol) {
            st.stop = StopReason::stationary;
            return st;
        }

        LineSearchResult ls = line_search(mesh, st.psi, st.materials, td.descent, theta,
                                          st.objective, kappa_next, u_d, c, cfg);
        if (!ls.accepted) {
            st.stop = StopReason::line_search_failure;
            return st;
        }
        kappa_next = std::min(ls.kappa * cfg.kappa_growth, cfg.kappa_max);

        if (ls.drift) {
            // Same design, same objective: only the level set moved. The
            // history records objective changes, so no row is appended.
            st.psi = std::move(ls.psi);
            ++st.drift_steps;
            continue;
        }

        st.psi = std::move(ls.psi);
        st.materials = std::move(ls.materials);
        st.state = std::move(ls.u);
        st.objective = ls.objective;
        system = std::move(ls.system);
        ++st.iterations;
        st.history.push_back({k + 1, st.objective, theta, ls.kappa,
                              cg_adj.iterations + ls.cg_iterations});
        if (on_step) on_step(st.history.back());
    }
    st.stop = StopReason::max_iterations;
    return st;
}

}  // namespace surftopt
