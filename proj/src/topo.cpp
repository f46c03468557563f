#include "surftopt/topo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "surftopt/error.hpp"

namespace surftopt {

double polarization_coefficient(double beta1, double beta2, int d) {
    if (!(beta1 > 0.0) || !(beta2 > 0.0) || !std::isfinite(beta1) || !std::isfinite(beta2))
        throw ConfigError("polarization coefficient requires beta1, beta2 finite and > 0");
    if (d < 2) throw ConfigError("polarization coefficient requires dimension >= 2");
    return -(beta1 - beta2) / (beta1 + static_cast<double>(d - 2) * beta2);
}

PolarizationField PolarizationField::make(double beta1, double beta2, int dim, int axis) {
    if (axis < 0 || axis >= dim - 1)
        throw ConfigError("polarization axis must lie in [0, dim-2]");
    PolarizationField f;
    f.a = polarization_coefficient(beta1, beta2, dim);
    f.beta1 = beta1;
    f.beta2 = beta2;
    f.dim = dim;
    f.axis = axis;
    return f;
}

double polarization_eval(const PolarizationField& field, std::span<const double> x) {
    if (static_cast<int>(x.size()) != field.dim - 1)
        throw ConfigError("polarization point has dimension " + std::to_string(x.size()) +
                          ", expected " + std::to_string(field.dim - 1));
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    const double linear = field.a * x[field.axis];
    if (r2 <= 1.0) return linear;
    const double r = std::sqrt(r2);
    return linear / std::pow(r, field.dim - 1);
}

double check_transmission(const PolarizationField& field, int samples) {
    if (samples < 1) throw ConfigError("check_transmission requires at least one sample");
    if (field.dim != 2 && field.dim != 3)
        throw ConfigError("check_transmission supports dimensions 2 and 3 only");

    const int d = field.dim;
    const int m = d - 1;  // the ball lives in R^m
    const double scale = std::max(field.beta1, field.beta2);
    double worst = 0.0;

    for (int k = 0; k < samples; ++k) {
        double n[2] = {0.0, 0.0};
        if (m == 1) {
            n[0] = (k % 2 == 0) ? 1.0 : -1.0;
        } else {
            const double phi = 2.0 * std::numbers::pi * k / samples;
            n[0] = std::cos(phi);
            n[1] = std::sin(phi);
        }

        // Interior gradient is the constant a * e_axis.
        double flux_in = field.beta1 * field.a * n[field.axis];

        // Exterior gradient at |x| = 1:
        //   d/dx_j [a x_i |x|^-(d-1)] = a (delta_ij - (d-1) x_i x_j).
        double flux_out = 0.0;
        for (int j = 0; j < m; ++j) {
            const double delta = (j == field.axis) ? 1.0 : 0.0;
            const double grad_j =
                field.a * (delta - static_cast<double>(d - 1) * n[field.axis] * n[j]);
            flux_out += field.beta2 * grad_j * n[j];
        }

        const double target = -(field.beta1 - field.beta2) * n[field.axis];
        worst = std::max(worst, std::abs(flux_in - flux_out - target) / scale);
    }
    return worst;
}

std::vector<Vec3> recover_vertex_gradient(const SurfaceMesh& mesh, const VertexField& f) {
    ensure_bound(mesh, f, "recover_vertex_gradient");
    std::vector<Vec3> out(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        Vec3 acc{};
        double wsum = 0.0;
        for (int t : mesh.incident_triangles(v)) {
            acc += mesh.area(t) * element_gradient(mesh, f, t);
            wsum += mesh.area(t);
        }
        out[v] = acc / wsum;
    }
    return out;
}

TDField td_field(const SurfaceMesh& mesh, const VertexField& psi, const VertexField& u,
                 const VertexField& p, const ProblemCoefficients& c) {
    ensure_bound(mesh, psi, "td_field");
    ensure_bound(mesh, u, "td_field");
    ensure_bound(mesh, p, "td_field");
    c.validate();
    if (c.alpha2 != 0.0)
        throw ConfigError("the closed-form topological derivative requires alpha2 == 0");

    const std::vector<Vec3> grad_u = recover_vertex_gradient(mesh, u);
    const std::vector<Vec3> grad_p = recover_vertex_gradient(mesh, p);

    // Gradient-term weights for a trial ball on the surface (d = 3).
    const double weight_out = 2.0 * c.beta2 * (c.beta1 - c.beta2) / (c.beta1 + c.beta2);
    const double weight_in = 2.0 * c.beta1 * (c.beta2 - c.beta1) / (c.beta2 + c.beta1);

    TDField out{VertexField::zeros(mesh), VertexField::zeros(mesh)};
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const double gg = dot(grad_u[v], grad_p[v]);
        const double up = u.values[v] * p.values[v];
        const double pv = p.values[v];
        double dj;
        if (psi.values[v] < 0.0) {
            // Vertex sits inside the material-1 region: trial swap 1 -> 2.
            dj = weight_in * gg + (c.gamma2 - c.gamma1) * up - (c.f2 - c.f1) * pv;
        } else {
            // Vertex sits in the material-2 region: trial swap 2 -> 1.
            dj = weight_out * gg + (c.gamma1 - c.gamma2) * up - (c.f1 - c.f2) * pv;
        }
        out.derivative.values[v] = dj;
        out.descent.values[v] = psi.values[v] < 0.0 ? -dj : dj;
    }
    return out;
}

double stationarity_angle(const SurfaceMesh& mesh, const VertexField& psi,
                          const VertexField& descent) {
    ensure_bound(mesh, psi, "stationarity_angle");
    ensure_bound(mesh, descent, "stationarity_angle");
    for (double v : descent.values)
        if (!std::isfinite(v))
            throw OptimizerError("descent field contains a non-finite value");
    const double ng = l2_norm(mesh, descent);
    if (!(ng > 0.0)) throw OptimizerError("descent field is identically zero");
    const double npsi = l2_norm(mesh, psi);
    if (std::abs(npsi - 1.0) > 1e-8)
        throw OptimizerError("level-set field must have unit L2 norm, got " +
                             std::to_string(npsi));
    double cosine = l2_inner(mesh, psi, descent) / (npsi * ng);
    cosine = std::clamp(cosine, -1.0, 1.0);
    return std::acos(cosine);
}

}  // namespace surftopt
