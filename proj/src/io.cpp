#include "surftopt/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "surftopt/error.hpp"

namespace surftopt {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp);
        out << content;
        out.flush();
        if (!out) throw IoError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot rename " + tmp + " to " + path);
    }
}

void write_vtk(const std::string& path, const SurfaceMesh& mesh,
               const std::vector<std::pair<std::string, const VertexField*>>& point_fields,
               const MaterialIndicator* materials) {
    for (const auto& [name, f] : point_fields) ensure_bound(mesh, *f, "write_vtk");
    if (materials) ensure_bound(mesh, *materials, "write_vtk");

    std::ostringstream out;
    out << "# vtk DataFile Version 2.0\n"
        << "two-material surface design\n"
        << "ASCII\n"
        << "DATASET POLYDATA\n"
        << "POINTS " << mesh.num_vertices() << " double\n";
    for (const Vec3& p : mesh.vertices())
        out << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z)
            << '\n';
    out << "POLYGONS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
    for (const auto& t : mesh.triangles())
        out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';

    if (!point_fields.empty()) {
        out << "POINT_DATA " << mesh.num_vertices() << '\n';
        for (const auto& [name, f] : point_fields) {
            out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
            for (double v : f->values) out << format_double(v) << '\n';
        }
    }
    if (materials) {
        out << "CELL_DATA " << mesh.num_triangles() << '\n'
            << "SCALARS material int 1\nLOOKUP_TABLE default\n";
        for (Material m : materials->labels)
            out << (m == Material::material1 ? 1 : 2) << '\n';
    }
    write_text_atomic(path, out.str());
}

void write_field_file(const std::string& path, const VertexField& f) {
    std::ostringstream out;
    out << f.size() << '\n';
    for (double v : f.values) out << format_double(v) << '\n';
    write_text_atomic(path, out.str());
}

VertexField read_field_file(const std::string& path, const SurfaceMesh& mesh) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open field file: " + path);
    long long count = -1;
    if (!(in >> count)) throw IoError(path + ": missing value count");
    if (count != mesh.num_vertices())
        throw IoError(path + ": holds " + std::to_string(count) + " values but the mesh has " +
                      std::to_string(mesh.num_vertices()) + " vertices");
    VertexField f = VertexField::zeros(mesh);
    for (long long i = 0; i < count; ++i) {
        if (!(in >> f.values[i]))
            throw IoError(path + ": cannot parse value " + std::to_string(i + 1));
        if (!std::isfinite(f.values[i]))
            throw IoError(path + ": non-finite value at index " + std::to_string(i));
    }
    return f;
}

void write_indicator_file(const std::string& path, const MaterialIndicator& m) {
    std::ostringstream out;
    out << m.size() << '\n';
    for (Material label : m.labels) out << (label == Material::material1 ? 1 : 2) << '\n';
    write_text_atomic(path, out.str());
}

MaterialIndicator read_indicator_file(const std::string& path, const SurfaceMesh& mesh) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open label file: " + path);
    long long count = -1;
    if (!(in >> count)) throw IoError(path + ": missing label count");
    if (count != mesh.num_triangles())
        throw IoError(path + ": holds " + std::to_string(count) + " labels but the mesh has " +
                      std::to_string(mesh.num_triangles()) + " triangles");
    MaterialIndicator m{std::vector<Material>(mesh.num_triangles()), mesh.id()};
    for (long long i = 0; i < count; ++i) {
        int label = 0;
        if (!(in >> label))
            throw IoError(path + ": cannot parse label " + std::to_string(i + 1));
        if (label != 1 && label != 2)
            throw IoError(path + ": label " + std::to_string(label) + " at index " +
                          std::to_string(i) + " is neither 1 nor 2");
        m.labels[i] = label == 1 ? Material::material1 : Material::material2;
    }
    return m;
}

void write_history_csv(const std::string& path, const std::vector<IterationRecord>& history) {
    std::ostringstream out;
    out << "iter,J,theta,kappa,cg_iters\n";
    for (const IterationRecord& r : history)
        out << r.iteration << ',' << format_double(r.objective) << ','
            << format_double(r.theta) << ',' << format_double(r.kappa) << ','
            << r.cg_iterations << '\n';
    write_text_atomic(path, out.str());
}

void write_quotient_csv(const std::string& path, const QuotientTable& table) {
    std::ostringstream out;
    out << "eps,area_exact,area_mesh,J_pert,quotient,td_formula,rel_err\n";
    for (const QuotientRow& r : table.rows)
        out << format_double(r.eps) << ',' << format_double(r.area_exact) << ','
            << format_double(r.area_mesh) << ',' << format_double(r.objective_perturbed)
            << ',' << format_double(r.quotient) << ',' << format_double(r.formula_value)
            << ',' << format_double(r.rel_error) << '\n';
    write_text_atomic(path, out.str());
}

}  // namespace surftopt
