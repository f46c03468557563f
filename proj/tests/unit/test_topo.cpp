// Polarization solution, transmission self-test, gradient recovery, the
// closed-form sensitivity field, and the stationarity angle.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "surftopt/asymptotics.hpp"
#include "surftopt/error.hpp"
#include "surftopt/topo.hpp"

using namespace surftopt;

TEST_CASE("polarization coefficient") {
    CHECK(polarization_coefficient(2.0, 1.0, 3) == -1.0 / 3.0);
    CHECK(polarization_coefficient(5.0, 5.0, 3) == 0.0);
    CHECK(polarization_coefficient(2.0, 1.0, 2) == -0.5);
    // A 1e7 contrast drives the coefficient to its -1 saturation.
    const double a = polarization_coefficient(1e4, 1e-3, 3);
    CHECK(a == -(1e4 - 1e-3) / (1e4 + 1e-3));
    CHECK(a == doctest::Approx(-0.9999998).epsilon(1e-7));

    CHECK_THROWS_AS(polarization_coefficient(0.0, 1.0, 3), ConfigError);
    CHECK_THROWS_AS(polarization_coefficient(1.0, -2.0, 3), ConfigError);
    CHECK_THROWS_AS(polarization_coefficient(1.0, 1.0, 1), ConfigError);
}

TEST_CASE("polarization field evaluation") {
    const PolarizationField q = PolarizationField::make(2.0, 1.0, 3, 0);
    REQUIRE(q.a == -1.0 / 3.0);

    SUBCASE("outer branch arithmetic") {
        const double x[2] = {2.0, 0.0};
        CHECK(polarization_eval(q, x) == doctest::Approx(-1.0 / 6.0).epsilon(1e-15));
    }
    SUBCASE("inner branch is linear") {
        const double x[2] = {0.3, 0.4};
        CHECK(polarization_eval(q, x) == doctest::Approx(q.a * 0.3).epsilon(1e-15));
    }
    SUBCASE("branches agree on the interface circle") {
        for (int k = 0; k < 12; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / 12.0;
            const double inside[2] = {std::cos(phi), std::sin(phi)};
            // On |x| = 1 both formulas reduce to a * x_axis.
            CHECK(polarization_eval(q, inside) ==
                  doctest::Approx(q.a * inside[0]).epsilon(1e-14));
        }
    }
    SUBCASE("zero component in the field direction") {
        const double x[2] = {0.0, 0.7};
        CHECK(polarization_eval(q, x) == 0.0);
    }
    SUBCASE("dimension mismatch is rejected") {
        const double x[3] = {1.0, 0.0, 0.0};
        CHECK_THROWS_AS(polarization_eval(q, x), ConfigError);
    }
}

TEST_CASE("transmission flux jump") {
    SUBCASE("closed-form coefficient satisfies the jump identity") {
        CHECK(check_transmission(PolarizationField::make(2.0, 1.0, 3), 64) < 1e-12);
        CHECK(check_transmission(PolarizationField::make(2.0, 1.0, 2), 64) < 1e-12);
    }
    SUBCASE("equal materials give the zero solution") {
        CHECK(check_transmission(PolarizationField::make(3.0, 3.0, 3), 16) == 0.0);
    }
    SUBCASE("perturbed coefficient is caught") {
        PolarizationField q = PolarizationField::make(2.0, 1.0, 3);
        q.a += 0.1;
        CHECK(check_transmission(q, 64) > 0.01);
    }
    SUBCASE("random contrasts across seven decades") {
        std::mt19937 rng(2024);
        std::uniform_real_distribution<double> exp10(-3.0, 4.0);
        for (int trial = 0; trial < 100; ++trial) {
            const double b1 = std::pow(10.0, exp10(rng));
            const double b2 = std::pow(10.0, exp10(rng));
            const int d = (trial % 2 == 0) ? 3 : 2;
            INFO("beta1 ", b1, " beta2 ", b2, " d ", d);
            CHECK(check_transmission(PolarizationField::make(b1, b2, d), 32) < 1e-12);
        }
    }
    SUBCASE("unsupported dimension") {
        PolarizationField q = PolarizationField::make(2.0, 1.0, 4, 0);
        CHECK_THROWS_AS(check_transmission(q, 8), ConfigError);
    }
}

TEST_CASE("vertex gradient recovery") {
    const SurfaceMesh mesh = build_icosphere(5);

    SUBCASE("constants recover to zero") {
        const auto g = recover_vertex_gradient(mesh, VertexField::constant(mesh, 4.0));
        for (const Vec3& v : g) CHECK(norm(v) <= 1e-12);
    }
    SUBCASE("height function recovers the tangential unit field") {
        const VertexField z = VertexField::from_function(mesh, [](const Vec3& p) { return p.z; });
        const auto g = recover_vertex_gradient(mesh, z);
        double worst = 0.0;
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            const Vec3 x = mesh.vertex(v);
            const Vec3 exact = Vec3{0.0, 0.0, 1.0} - x.z * x;
            worst = std::max(worst, norm(g[v] - exact));
        }
        CHECK(worst < 0.05);
    }
    SUBCASE("recovery is linear") {
        const VertexField f = VertexField::from_function(mesh, [](const Vec3& p) {
            return p.x * p.x - p.y;
        });
        const VertexField h = VertexField::from_function(mesh, [](const Vec3& p) {
            return std::sin(p.z);
        });
        VertexField sum = VertexField::zeros(mesh);
        for (int v = 0; v < mesh.num_vertices(); ++v)
            sum.values[v] = f.values[v] + h.values[v];
        const auto gf = recover_vertex_gradient(mesh, f);
        const auto gh = recover_vertex_gradient(mesh, h);
        const auto gs = recover_vertex_gradient(mesh, sum);
        double scale = 0.0;
        for (int v = 0; v < mesh.num_vertices(); ++v)
            scale = std::max(scale, norm(gf[v]) + norm(gh[v]));
        for (int v = 0; v < mesh.num_vertices(); ++v)
            CHECK(norm(gf[v] + gh[v] - gs[v]) <= 1e-12 * scale);
    }
}

TEST_CASE("sensitivity field") {
    const SurfaceMesh mesh = build_icosphere(3);
    const VertexField u = VertexField::from_function(mesh, [](const Vec3& p) {
        return p.x + 0.2 * p.z * p.z;
    });
    const VertexField p = VertexField::from_function(mesh, [](const Vec3& q) {
        return q.y - 0.7 * q.x;
    });
    const VertexField psi = VertexField::from_function(mesh, [](const Vec3& q) {
        return q.z - 0.31;  // avoid exact zeros at vertices
    });
    ProblemCoefficients c;
    c.beta1 = 2.0;
    c.beta2 = 1.0;
    c.gamma1 = 3.0;
    c.gamma2 = 0.5;
    c.f1 = 1.0;
    c.f2 = -2.0;

    SUBCASE("null contrast vanishes identically") {
        ProblemCoefficients same;
        same.beta1 = same.beta2 = 3.0;
        same.gamma1 = same.gamma2 = 2.0;
        same.f1 = same.f2 = 1.0;
        const TDField td = td_field(mesh, psi, u, p, same);
        for (double v : td.derivative.values) CHECK(v == 0.0);
        for (double v : td.descent.values) CHECK(v == 0.0);
    }
    SUBCASE("zero adjoint kills every term") {
        const TDField td = td_field(mesh, psi, u, VertexField::zeros(mesh), c);
        for (double v : td.derivative.values) CHECK(v == 0.0);
    }
    SUBCASE("descent sign rule holds vertex-wise") {
        const TDField td = td_field(mesh, psi, u, p, c);
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            const double expect = psi.values[v] < 0.0 ? -td.derivative.values[v]
                                                      : td.derivative.values[v];
            CHECK(td.descent.values[v] == expect);
        }
    }
    SUBCASE("inside formula equals the outside formula with roles exchanged") {
        VertexField flipped = psi;
        for (double& v : flipped.values) v = -v;
        const TDField a = td_field(mesh, psi, u, p, c);
        const TDField b = td_field(mesh, flipped, u, p, c.swapped());
        CHECK(a.derivative.values == b.derivative.values);
    }
    SUBCASE("equal diffusion makes the two branches exact negatives") {
        ProblemCoefficients cb = c;
        cb.beta1 = cb.beta2 = 1.5;
        VertexField flipped = psi;
        for (double& v : flipped.values) v = -v;
        const TDField a = td_field(mesh, psi, u, p, cb);
        const TDField b = td_field(mesh, flipped, u, p, cb);
        for (int v = 0; v < mesh.num_vertices(); ++v)
            CHECK(a.derivative.values[v] == -b.derivative.values[v]);
    }
    SUBCASE("scaling the level set changes nothing") {
        VertexField scaled = psi;
        for (double& v : scaled.values) v *= 17.0;
        const TDField a = td_field(mesh, psi, u, p, c);
        const TDField b = td_field(mesh, scaled, u, p, c);
        CHECK(a.derivative.values == b.derivative.values);
        CHECK(a.descent.values == b.descent.values);
    }
    SUBCASE("gradient tracking weight is rejected") {
        ProblemCoefficients bad = c;
        bad.alpha2 = 0.5;
        CHECK_THROWS_AS(td_field(mesh, psi, u, p, bad), ConfigError);
    }
}

TEST_CASE("sensitivity is negative inside an unmet target region") {
    // All-water design, target state concentrated in a 60-degree cap:
    // adding material where the target is large must promise a decrease.
    const SurfaceMesh mesh = build_icosphere(3);
    ProblemCoefficients c;
    c.beta1 = 1e4;
    c.beta2 = 1e-3;
    c.gamma1 = c.gamma2 = 1.0;
    c.f1 = 1e3;
    c.f2 = 0.0;
    const SolverOptions opts{1e-8, 0};

    const MaterialIndicator target =
        spherical_cap_design(mesh, {0.0, 0.0, 1.0}, 60.0 * std::numbers::pi / 180.0);
    const VertexField u_d = solve_state(mesh, target, c, opts).field;

    const MaterialIndicator water = MaterialIndicator::uniform(mesh, Material::material2);
    const SparseSystem sys = assemble_system(mesh, water, c);
    const VertexField u{solve_cg(sys, sys.rhs, opts), mesh.id()};
    const FieldSolution adj = solve_adjoint(mesh, sys, u, u_d, c, opts);

    const VertexField psi = VertexField::constant(mesh, 1.0);
    const TDField td = td_field(mesh, psi, u, adj.field, c);
    for (int v = 0; v < mesh.num_vertices(); ++v)
        if (mesh.vertex(v).z > std::cos(40.0 * std::numbers::pi / 180.0))
            CHECK(td.derivative.values[v] < 0.0);
}

TEST_CASE("stationarity angle") {
    const SurfaceMesh mesh = build_icosphere(2);
    VertexField psi = VertexField::from_function(mesh, [](const Vec3& p) {
        return 1.0 + 0.3 * p.x;
    });
    const double n = l2_norm(mesh, psi);
    for (double& v : psi.values) v /= n;

    SUBCASE("aligned fields are stationary") {
        VertexField g = psi;
        for (double& v : g.values) v *= 2.5;  // positive multiple
        CHECK(stationarity_angle(mesh, psi, g) <= 1e-7);
    }
    SUBCASE("anti-aligned fields sit at pi") {
        VertexField g = psi;
        for (double& v : g.values) v = -v;
        CHECK(stationarity_angle(mesh, psi, g) ==
              doctest::Approx(std::numbers::pi).epsilon(1e-7));
    }
    SUBCASE("orthogonal fields sit at pi/2") {
        VertexField g = VertexField::from_function(mesh, [](const Vec3& p) { return p.y; });
        const double coupling = l2_inner(mesh, psi, g);
        for (int v = 0; v < mesh.num_vertices(); ++v)
            g.values[v] -= coupling * psi.values[v];  // exact L2 projection
        CHECK(stationarity_angle(mesh, psi, g) ==
              doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-9));
    }
    SUBCASE("degenerate inputs are rejected") {
        CHECK_THROWS_AS(stationarity_angle(mesh, psi, VertexField::zeros(mesh)),
                        OptimizerError);
        VertexField bad = psi;
        bad.values[0] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(stationarity_angle(mesh, psi, bad), OptimizerError);
        VertexField not_unit = psi;
        for (double& v : not_unit.values) v *= 2.0;
        CHECK_THROWS_AS(stationarity_angle(mesh, not_unit, psi), OptimizerError);
    }
}
