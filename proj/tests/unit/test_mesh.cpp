// Mesh construction, icosphere generation, OFF parsing, element
// classification, and the mass-matrix inner product.

#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "surftopt/error.hpp"
#include "surftopt/mesh.hpp"
#include "test_util.hpp"

using namespace surftopt;

namespace {

constexpr double kSphereArea = 4.0 * std::numbers::pi;

// Closed tetrahedron with one face flat in the x1-x2 plane.
SurfaceMesh make_tetrahedron() {
    return SurfaceMesh::from_data(
        {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
        {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}});
}

std::string off_text(const SurfaceMesh& mesh) {
    std::ostringstream out;
    out.precision(17);
    out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_triangles() << " 0\n";
    for (const Vec3& v : mesh.vertices()) out << v.x << ' ' << v.y << ' ' << v.z << '\n';
    for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    return out.str();
}

}  // namespace

TEST_CASE("tetrahedron face carries the textbook hat gradients") {
    const SurfaceMesh mesh = make_tetrahedron();
    // Face 0 is the unit triangle (0,0) (1,0) (0,1) in the x1-x2 plane;
    // the hat at the origin is 1 - x1 - x2.
    const Vec3 g0 = mesh.basis_gradient(0, 0);
    CHECK(g0.x == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(g0.y == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(g0.z == doctest::Approx(0.0));
    CHECK(mesh.basis_gradient(0, 1).x == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mesh.basis_gradient(0, 2).y == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mesh.area(0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("basis gradients: partition of unity and tangency") {
    const SurfaceMesh mesh = build_icosphere(2);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Vec3 sum = mesh.basis_gradient(t, 0) + mesh.basis_gradient(t, 1) +
                         mesh.basis_gradient(t, 2);
        double scale = 0.0;
        for (int i = 0; i < 3; ++i) scale = std::max(scale, norm(mesh.basis_gradient(t, i)));
        CHECK(norm(sum) <= 1e-12 * scale);
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs(dot(mesh.basis_gradient(t, i), mesh.unit_normal(t))) <=
                  1e-12 * norm(mesh.basis_gradient(t, i)));
    }
}

TEST_CASE("icosphere counts and area") {
    SUBCASE("level 0 is the icosahedron") {
        const SurfaceMesh m = build_icosphere(0);
        CHECK(m.num_vertices() == 12);
        CHECK(m.num_triangles() == 20);
    }
    SUBCASE("level 3 area approximates the sphere within 1%") {
        const SurfaceMesh m = build_icosphere(3);
        CHECK(m.num_triangles() == 1280);
        CHECK(m.num_vertices() == 642);
        CHECK(std::abs(m.total_area() - kSphereArea) < 0.01 * kSphereArea);
    }
    SUBCASE("level 5 triangle count") {
        CHECK(build_icosphere(5).num_triangles() == 20480);
    }
    SUBCASE("area increases monotonically toward the sphere from below") {
        double prev = 0.0;
        for (int level = 0; level <= 4; ++level) {
            const double a = build_icosphere(level).total_area();
            CHECK(a > prev);
            CHECK(a < kSphereArea);
            prev = a;
        }
    }
    SUBCASE("all vertices lie on the unit sphere") {
        const SurfaceMesh m = build_icosphere(3);
        for (const Vec3& v : m.vertices())
            CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("normals point outward") {
        const SurfaceMesh m = build_icosphere(1);
        for (int t = 0; t < m.num_triangles(); ++t) {
            const auto& tri = m.triangle(t);
            const Vec3 c = (m.vertex(tri[0]) + m.vertex(tri[1]) + m.vertex(tri[2])) / 3.0;
            CHECK(dot(m.unit_normal(t), c) > 0.0);
        }
    }
    SUBCASE("subdivision bound is enforced") {
        CHECK_THROWS_AS(build_icosphere(9), MeshError);
        CHECK_THROWS_AS(build_icosphere(-1), MeshError);
    }
}

TEST_CASE("from_data validation") {
    SUBCASE("fewer than 4 vertices") {
        CHECK_THROWS_AS(SurfaceMesh::from_data({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}},
                                               {{0, 1, 2}}),
                        MeshError);
    }
    SUBCASE("vertex index out of range") {
        CHECK_THROWS_AS(SurfaceMesh::from_data(
                            {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
                            {{0, 1, 2}, {0, 1, 5}, {0, 2, 3}, {1, 2, 3}}),
                        MeshError);
    }
    SUBCASE("repeated vertex inside a triangle") {
        CHECK_THROWS_AS(SurfaceMesh::from_data(
                            {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
                            {{0, 1, 1}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}),
                        MeshError);
    }
    SUBCASE("open surface: an edge with a single triangle") {
        CHECK_THROWS_AS(SurfaceMesh::from_data(
                            {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}},
                            {{0, 1, 2}, {1, 3, 2}}),
                        MeshError);
    }
    SUBCASE("non-manifold edge shared by three triangles") {
        CHECK_THROWS_AS(SurfaceMesh::from_data(
                            {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, -1, 0}},
                            {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}, {0, 2, 3}, {1, 2, 3},
                             {0, 3, 4}, {1, 3, 4}}),
                        MeshError);
    }
    SUBCASE("degenerate (zero-area) triangle") {
        // Two coincident vertices squash the triangles between them.
        CHECK_THROWS_AS(SurfaceMesh::from_data(
                            {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 1, 0}},
                            {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}),
                        MeshError);
    }
    SUBCASE("non-finite coordinate") {
        CHECK_THROWS_AS(SurfaceMesh::from_data(
                            {{0, 0, 0}, {1, 0, 0}, {0, 1, 0},
                             {0, 0, std::numeric_limits<double>::quiet_NaN()}},
                            {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}),
                        MeshError);
    }
    SUBCASE("meshes get distinct identity tokens") {
        CHECK(make_tetrahedron().id() != make_tetrahedron().id());
    }
}

TEST_CASE("incident_triangles lists each vertex's stars in ascending order") {
    const SurfaceMesh mesh = build_icosphere(1);
    std::vector<std::set<int>> expect(mesh.num_vertices());
    for (int t = 0; t < mesh.num_triangles(); ++t)
        for (int v : mesh.triangle(t)) expect[v].insert(t);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const auto tris = mesh.incident_triangles(v);
        REQUIRE(tris.size() == expect[v].size());
        int prev = -1;
        for (int t : tris) {
            CHECK(t > prev);
            CHECK(expect[v].count(t) == 1);
            prev = t;
        }
    }
}

TEST_CASE("OFF round trip of the level-0 icosphere") {
    testutil::TempDir dir;
    const SurfaceMesh source = build_icosphere(0);
    testutil::write_text(dir.file("ico0.off"), off_text(source));
    const SurfaceMesh loaded = load_off(dir.file("ico0.off"));
    CHECK(loaded.num_vertices() == 12);
    CHECK(loaded.num_triangles() == 20);
    CHECK(loaded.total_area() == doctest::Approx(source.total_area()));
}

TEST_CASE("OFF parser tolerates comments, blank lines, and counts after the header") {
    testutil::TempDir dir;
    testutil::write_text(dir.file("tet.off"),
                         "# tetrahedron\nOFF\n\n# counts\n4 4 6\n"
                         "0 0 0\n1 0 0\n0 1 0\n0 0 1\n"
                         "3 0 1 2\n3 0 1 3\n3 0 2 3\n3 1 2 3\n");
    const SurfaceMesh mesh = load_off(dir.file("tet.off"));
    CHECK(mesh.num_vertices() == 4);
    CHECK(mesh.num_triangles() == 4);
}

TEST_CASE("OFF parser failure modes") {
    testutil::TempDir dir;
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_off(dir.file("absent.off")), MeshError);
    }
    SUBCASE("wrong header") {
        testutil::write_text(dir.file("bad.off"), "PLY\n4 4 6\n");
        CHECK_THROWS_AS(load_off(dir.file("bad.off")), MeshError);
    }
    SUBCASE("quad face is rejected with its line number") {
        testutil::write_text(dir.file("quad.off"),
                             "OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n4 0 1 2 3\n");
        try {
            load_off(dir.file("quad.off"));
            FAIL("expected MeshError");
        } catch (const MeshError& e) {
            CHECK(std::string(e.what()).find(":7:") != std::string::npos);
        }
    }
    SUBCASE("non-numeric vertex line") {
        testutil::write_text(dir.file("nan.off"),
                             "OFF\n4 4 6\n0 0 0\nx 0 0\n0 1 0\n0 0 1\n"
                             "3 0 1 2\n3 0 1 3\n3 0 2 3\n3 1 2 3\n");
        try {
            load_off(dir.file("nan.off"));
            FAIL("expected MeshError");
        } catch (const MeshError& e) {
            CHECK(std::string(e.what()).find(":4:") != std::string::npos);
        }
    }
    SUBCASE("truncated file") {
        testutil::write_text(dir.file("short.off"), "OFF\n4 4 6\n0 0 0\n1 0 0\n");
        CHECK_THROWS_AS(load_off(dir.file("short.off")), MeshError);
    }
    SUBCASE("single triangle is not a closed surface") {
        testutil::write_text(dir.file("tri.off"), "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
        CHECK_THROWS_AS(load_off(dir.file("tri.off")), MeshError);
    }
    SUBCASE("two-triangle patch has boundary edges") {
        testutil::write_text(dir.file("patch.off"),
                             "OFF\n4 2 0\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n3 0 1 2\n3 1 3 2\n");
        CHECK_THROWS_AS(load_off(dir.file("patch.off")), MeshError);
    }
}

TEST_CASE("classify_elements") {
    const SurfaceMesh mesh = build_icosphere(3);
    SUBCASE("uniform negative and positive level sets") {
        const MaterialIndicator m1 = classify_elements(mesh, VertexField::constant(mesh, -1.0));
        const MaterialIndicator m2 = classify_elements(mesh, VertexField::constant(mesh, 1.0));
        for (Material m : m1.labels) CHECK(m == Material::material1);
        for (Material m : m2.labels) CHECK(m == Material::material2);
    }
    SUBCASE("zero level set is a tie and goes to material 2") {
        const MaterialIndicator m = classify_elements(mesh, VertexField::zeros(mesh));
        for (Material label : m.labels) CHECK(label == Material::material2);
    }
    SUBCASE("height function splits the sphere almost in half") {
        const VertexField psi = VertexField::from_function(mesh, [](const Vec3& p) { return p.z; });
        const MaterialIndicator m = classify_elements(mesh, psi);
        int south = 0;
        for (Material label : m.labels)
            if (label == Material::material1) ++south;
        // The icosphere is mirror-symmetric in z; only the equatorial
        // tie band (mean exactly 0, 32 triangles at this level) tips the
        // balance toward material 2, so the split is 624/656.
        CHECK(south == 624);
        CHECK(std::abs(south - mesh.num_triangles() / 2) <= 0.02 * mesh.num_triangles());
    }
    SUBCASE("classification is scale invariant") {
        const VertexField psi = VertexField::from_function(mesh, [](const Vec3& p) {
            return p.z - 0.3 * p.x;
        });
        VertexField scaled = psi;
        for (double& v : scaled.values) v *= 739.25;
        CHECK(classify_elements(mesh, psi).labels == classify_elements(mesh, scaled).labels);
    }
    SUBCASE("foreign field is rejected") {
        const SurfaceMesh other = build_icosphere(1);
        CHECK_THROWS_AS(classify_elements(mesh, VertexField::zeros(other)), MeshError);
    }
}

TEST_CASE("l2_inner and l2_norm") {
    const SurfaceMesh mesh = build_icosphere(4);
    const VertexField one = VertexField::constant(mesh, 1.0);
    const VertexField z = VertexField::from_function(mesh, [](const Vec3& p) { return p.z; });

    SUBCASE("constants integrate to the surface area") {
        const double a = l2_inner(mesh, one, one);
        CHECK(a == doctest::Approx(mesh.total_area()).epsilon(1e-13));
        CHECK(std::abs(a - kSphereArea) < 0.005 * kSphereArea);
    }
    SUBCASE("odd function integrates to zero") {
        CHECK(std::abs(l2_inner(mesh, one, z)) <= 1e-10 * mesh.total_area());
    }
    SUBCASE("zero fields") {
        CHECK(l2_inner(mesh, VertexField::zeros(mesh), VertexField::zeros(mesh)) == 0.0);
    }
    SUBCASE("symmetry, bilinearity, positivity") {
        const VertexField f = VertexField::from_function(mesh, [](const Vec3& p) {
            return std::sin(3.0 * p.x) + p.y * p.y;
        });
        CHECK(l2_inner(mesh, f, z) == l2_inner(mesh, z, f));
        VertexField combo = VertexField::zeros(mesh);
        for (int v = 0; v < mesh.num_vertices(); ++v)
            combo.values[v] = 2.0 * f.values[v] - 0.5 * z.values[v];
        CHECK(l2_inner(mesh, combo, z) ==
              doctest::Approx(2.0 * l2_inner(mesh, f, z) - 0.5 * l2_inner(mesh, z, z))
                  .epsilon(1e-12));
        CHECK(l2_inner(mesh, f, f) > 0.0);
        CHECK(l2_norm(mesh, f) == doctest::Approx(std::sqrt(l2_inner(mesh, f, f))));
    }
}

TEST_CASE("material_area and symmetric_difference_area") {
    const SurfaceMesh mesh = build_icosphere(2);
    const MaterialIndicator all1 = MaterialIndicator::uniform(mesh, Material::material1);
    const MaterialIndicator all2 = MaterialIndicator::uniform(mesh, Material::material2);
    CHECK(material_area(mesh, all1, Material::material1) ==
          doctest::Approx(mesh.total_area()));
    CHECK(material_area(mesh, all1, Material::material2) == 0.0);
    CHECK(symmetric_difference_area(mesh, all1, all1) == 0.0);
    CHECK(symmetric_difference_area(mesh, all1, all2) == doctest::Approx(mesh.total_area()));

    const MaterialIndicator split = classify_elements(
        mesh, VertexField::from_function(mesh, [](const Vec3& p) { return p.z; }));
    CHECK(material_area(mesh, split, Material::material1) +
              material_area(mesh, split, Material::material2) ==
          doctest::Approx(mesh.total_area()));
    CHECK(symmetric_difference_area(mesh, split, all2) ==
          doctest::Approx(material_area(mesh, split, Material::material1)));
}

TEST_CASE("ensure_bound rejects foreign fields and indicators") {
    const SurfaceMesh a = build_icosphere(1);
    const SurfaceMesh b = build_icosphere(1);
    CHECK_THROWS_AS(ensure_bound(a, VertexField::zeros(b), "test"), MeshError);
    CHECK_THROWS_AS(ensure_bound(a, MaterialIndicator::uniform(b, Material::material1), "test"),
                    MeshError);
    CHECK_NOTHROW(ensure_bound(a, VertexField::zeros(a), "test"));
}
